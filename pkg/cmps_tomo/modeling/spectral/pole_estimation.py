import logging

import numpy as np

from cmps_tomo.modeling.matcher import pair_conjugates
from cmps_tomo.modeling.registry import ESTIMATORS
from cmps_tomo.structures.poles import PoleEstimate
from cmps_tomo.utils.errors import PreconditionError

from .estimators import max_order, resolve_pencil
from .hankel import build_hankel, hankel_singular_values
from .residues import vandermonde

# candidates growing beyond this over the sampled window are discarded
_MAX_GROWTH = 1e8
# singular values below this fraction of the largest one count as zero
_RANK_TOL = 1e-12


def symmetrize_conjugates(estimate):
    """
    Enforce a conjugation-closed pole set. Poles are paired greedily by the
    smallest |l_a - conj(l_b)|, where a pole may pair with itself; a self
    paired pole is made real and a pair (a, b) becomes (m, conj(m)) with
    m = (l_a + conj(l_b)) / 2.
    """
    lam = np.array(estimate.lambdas, dtype=complex)
    for a, b in pair_conjugates(lam):
        if a == b:
            lam[a] = lam[a].real
        else:
            mean = 0.5 * (lam[a] + lam[b].conj())
            lam[a], lam[b] = mean, mean.conj()
    out = PoleEstimate.from_lambdas(lam, estimate.delta_tau)
    out._copy_extra_fields(estimate)
    return out


def prune_poles(estimate, signal, order):
    """
    Keep the `order` candidate poles with the largest fitted residues.
    Candidates that are not finite or grow by more than a factor 1e8 over
    the window are dropped first.
    """
    signal = np.asarray(signal, dtype=complex).reshape(-1)
    N = signal.size
    mus = estimate.mus
    with np.errstate(over="ignore", invalid="ignore"):
        growth = np.abs(mus) ** (N - 1)
    usable = np.isfinite(estimate.lambdas) & np.isfinite(growth) & (growth <= _MAX_GROWTH)
    candidates = np.flatnonzero(usable)
    if candidates.size < order:
        # keep the least growing ones to reach the order
        ranked = np.where(np.isfinite(growth), growth, np.inf)
        candidates = np.argsort(ranked, kind="stable")[:order]
        logging.getLogger("cmps_tomo.estimation").warning(
            "Only {} of {} pole candidates decay, keeping growing ones".format(
                int(usable.sum()), mus.size
            )
        )
    dropped = mus.size - candidates.size
    if dropped:
        logger = logging.getLogger("cmps_tomo.estimation")
        logger.debug("Dropped {} non-decaying pole candidates".format(dropped))
    V = vandermonde(mus[candidates], N)
    scale = np.linalg.norm(V, axis=0)
    scale[scale == 0] = 1.0
    rho = np.linalg.lstsq(V / scale, signal, rcond=None)[0] / scale
    keep = candidates[np.argsort(-np.abs(rho), kind="stable")[:order]]
    out = estimate[np.sort(keep)]
    out.add_field("pruned", int(mus.size - order))
    return out


def estimate_poles(
    signal,
    order,
    delta_tau,
    estimator="ssmpm",
    pencil=0,
    pencil_fraction=0.4,
    overestimation=1.0,
    max_condition=1e15,
):
    """
    Estimate `order` poles of a sampled signal.

    With overestimation > 1, ceil(overestimation * order) poles are estimated
    (as far as the sample count allows) and the surplus with the smallest
    residues is pruned. The result is always conjugation closed.
    max_condition bounds the condition number of the linear system or pencil
    the estimator solves.
    """
    signal = np.asarray(signal, dtype=complex).reshape(-1)
    N = signal.size
    if order < 1:
        raise PreconditionError("order should be positive, got {}".format(order))
    if overestimation < 1:
        raise ValueError("overestimation should be >= 1, got {}".format(overestimation))
    fn = ESTIMATORS[estimator]
    target = order
    if overestimation > 1:
        target = max(order, min(int(np.ceil(overestimation * order)), max_order(estimator, N)))
        # surplus poles beyond the numerical rank of noiseless data are undefined
        s = hankel_singular_values(build_hankel(signal, max(N // 2, 1)))
        rank = int(np.count_nonzero(s > _RANK_TOL))
        target = max(order, min(target, rank))
    P = 0 if estimator.startswith("prony") else resolve_pencil(N, target, pencil, pencil_fraction)
    estimate = fn(signal, target, delta_tau, P, max_condition)
    if target > order:
        estimate = prune_poles(estimate, signal, order)
    return symmetrize_conjugates(estimate)


def append_stationary_pole(estimate):
    """Prepend mu = 1 (l = 0) to poles estimated from an amputated signal."""
    lam = np.concatenate([[0.0], estimate.lambdas])
    out = PoleEstimate.from_lambdas(lam, estimate.delta_tau)
    out._copy_extra_fields(estimate)
    return out
