import numpy as np


def frozen(array, dtype=complex):
    """Private read-only copy of `array`."""
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def max_abs(array):
    array = np.asarray(array)
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))
