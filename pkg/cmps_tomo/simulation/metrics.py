import numpy as np

from cmps_tomo.modeling.matcher import PoleMatcher
from cmps_tomo.utils.errors import PreconditionError


def _drop_stationary(poles):
    poles = np.asarray(poles, dtype=complex).reshape(-1)
    if poles.size == 0:
        return poles
    return np.delete(poles, int(np.argmax(poles.real)))


def pole_error(true_poles, est_poles, exclude_stationary=False):
    """
    Mean and max of |l - l_est| / |l| after greedy minimal-distance matching.
    With exclude_stationary the pole of largest real part is removed from both
    sets first.
    """
    true_poles = np.asarray(true_poles, dtype=complex).reshape(-1)
    est_poles = np.asarray(est_poles, dtype=complex).reshape(-1)
    if exclude_stationary:
        true_poles = _drop_stationary(true_poles)
        est_poles = _drop_stationary(est_poles)
    if true_poles.size != est_poles.size:
        raise PreconditionError(
            "pole counts differ: {} true and {} estimated".format(true_poles.size, est_poles.size)
        )
    if true_poles.size == 0:
        return 0.0, 0.0
    matches = PoleMatcher(np.inf)(true_poles, est_poles)
    denom = np.maximum(np.abs(true_poles), np.finfo(float).tiny)
    rel = np.abs(true_poles - est_poles[matches]) / denom
    return float(rel.mean()), float(rel.max())


def damping_statistics(poles):
    """Median |Re l| / |Im l| over the non-stationary poles (inf for real ones)."""
    rest = _drop_stationary(poles)
    if rest.size == 0:
        return float("nan")
    with np.errstate(divide="ignore"):
        ratio = np.abs(rest.real) / np.abs(rest.imag)
    return float(np.median(ratio))
