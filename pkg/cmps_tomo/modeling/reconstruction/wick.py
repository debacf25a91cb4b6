import numpy as np

from cmps_tomo.modeling.correlators import residue_tensor, synthesize
from cmps_tomo.structures.poles import ResidueModel
from cmps_tomo.utils.errors import GridMismatchError, PreconditionError


def wick_predict(md, n):
    """
    Residues of the n-point function implied by an MD model,
    rho^(n)_{k_1..k_{n-1}} = Mhat11^n M[k_1, 0] M[k_2, k_1] .. M[0, k_{n-1}].
    """
    if n < 2:
        raise PreconditionError("correlation order should be at least 2, got {}".format(n))
    residues = md.Mhat11 ** n * residue_tensor(md.M, n)
    return ResidueModel(md.poles, residues, n)


def consistency_check(md, observed, threshold=1e-2, max_grid_points=2000000):
    """
    Predict the observed tensor from the MD model and compare.

    Returns:
        dict with "sup_deviation" and "rms_deviation" (both relative to the
        observed magnitude), "threshold" and "passed"
    """
    if observed.n < 2:
        raise PreconditionError("observed tensor needs n >= 2, got n={}".format(observed.n))
    bandwidth = float(np.max(np.abs(np.asarray(md.poles).imag)))
    if bandwidth * observed.delta_tau >= np.pi:
        raise GridMismatchError(
            "grid spacing {:.6g} aliases the model poles (max |Im l| = {:.6g})".format(
                observed.delta_tau, bandwidth
            )
        )
    rm = wick_predict(md, observed.n)
    predicted = synthesize(md.poles, rm.residues, observed.N, observed.delta_tau, max_grid_points)
    if observed.amputated:
        predicted = predicted - md.Mhat11 ** 2
    values = observed.values
    diff = np.abs(predicted - values)
    sup_scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    rms_scale = max(float(np.sqrt(np.mean(np.abs(values) ** 2))), np.finfo(float).tiny)
    sup = float(np.max(diff)) / sup_scale
    rms = float(np.sqrt(np.mean(diff ** 2))) / rms_scale
    return {
        "n": observed.n,
        "sup_deviation": sup,
        "rms_deviation": rms,
        "threshold": float(threshold),
        "passed": bool(sup <= threshold),
    }
