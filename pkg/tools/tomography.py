#!/usr/bin/env python
"""Run the cmps-tomo command line without installing the package."""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cmps_tomo.engine.commands import main  # noqa E402 isort:skip


if __name__ == "__main__":
    sys.exit(main())
