import numpy as np

from cmps_tomo.structures.poles import ResidueModel
from cmps_tomo.utils.errors import EstimationError, PreconditionError


def project_average(ct):
    """
    Collapse an n-point tensor (n >= 3) into a 2-point-like signal with the
    same poles: for every axis sum over all the other indices, then add the
    per-axis sums.
    """
    if ct.n < 3:
        raise PreconditionError("projection needs n >= 3, got n={}".format(ct.n))
    values = ct.values
    axes = tuple(range(values.ndim))
    total = np.zeros(ct.N, dtype=complex)
    for j in axes:
        total += values.sum(axis=tuple(a for a in axes if a != j))
    return total


def vandermonde(mus, N):
    """V[l, k] = mu_k^l, l = 0 .. N-1."""
    mus = np.asarray(mus, dtype=complex).reshape(-1)
    return np.power(mus[None, :], np.arange(N)[:, None])


def _contract(matrix, tensor):
    for axis in range(tensor.ndim):
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [axis])), 0, axis)
    return tensor


def solve_residues(poles, ct, max_condition=1e13):
    """
    Least-squares residues of a tensor for given poles.

    The design matrix is the (n-1)-fold Kronecker power of the per-axis
    Vandermonde matrix, so the solution is the per-axis pseudoinverse applied
    along every axis. Columns are equilibrated before inversion; the reported
    condition number is cond(V)^(n-1).

    Arguments:
        poles (PoleEstimate)
        ct (CorrelationTensor)

    Returns:
        ResidueModel with extra field "condition"
    """
    if poles.order == 0:
        raise PreconditionError("at least one pole is required")
    if abs(poles.delta_tau - ct.delta_tau) > 1e-12 * ct.delta_tau:
        raise PreconditionError(
            "poles were estimated with delta_tau={} but the tensor has {}".format(
                poles.delta_tau, ct.delta_tau
            )
        )
    V = vandermonde(poles.mus, ct.N)
    if not np.all(np.isfinite(V)):
        raise EstimationError("Vandermonde design overflows", condition=np.inf)
    scale = np.linalg.norm(V, axis=0)
    scale[scale == 0] = 1.0
    Vs = V / scale
    cond = float(np.linalg.cond(Vs)) ** (ct.n - 1)
    if not np.isfinite(cond) or cond > max_condition:
        raise EstimationError(
            "residue design is ill-conditioned, condition number {:.3e}".format(cond),
            condition=cond,
        )
    pinv = np.linalg.pinv(Vs) / scale[:, None]
    residues = _contract(pinv, ct.values)
    fitted = _contract(V, residues)
    rms = float(np.sqrt(np.mean(np.abs(ct.values - fitted) ** 2)))
    rm = ResidueModel(poles.lambdas, residues, ct.n, rms, ct.delta_tau)
    rm.add_field("condition", cond)
    return rm


def restore_stationary(rm, density):
    """Prepend the stationary pole with residue density^2 to a 2-point model."""
    if rm.n != 2:
        raise PreconditionError(
            "only 2-point models carry a stationary residue, got n={}".format(rm.n)
        )
    poles = np.concatenate([[0.0], rm.poles])
    residues = np.concatenate([[density ** 2], rm.residues])
    out = ResidueModel(poles, residues, 2, rm.rms_fit_error, rm.delta_tau)
    out.extra_fields = dict(rm.extra_fields)
    return out
