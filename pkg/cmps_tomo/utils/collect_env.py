import platform

import numpy
import scipy
import yacs


def collect_env_info():
    rows = [
        ("Python", platform.python_version()),
        ("Platform", platform.platform()),
        ("numpy", numpy.__version__),
        ("scipy", scipy.__version__),
        ("yacs", getattr(yacs, "__version__", "unknown")),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join("{}: {}".format(name.ljust(width), value) for name, value in rows)
