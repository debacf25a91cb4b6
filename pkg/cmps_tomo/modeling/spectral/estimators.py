"""
Pole estimators for sampled sums of damped exponentials,

    C_l = sum_k rho_k mu_k^l,    mu_k = exp(l_k dt).

Each estimator returns a PoleEstimate with its diagnostics attached as extra
fields; `ESTIMATORS` maps the configured names to a common call signature.
"""
import logging

import numpy as np
import scipy.linalg

from cmps_tomo.modeling.registry import ESTIMATORS
from cmps_tomo.structures.poles import PoleEstimate
from cmps_tomo.utils.errors import EstimationError, PreconditionError

from .hankel import build_hankel, default_pencil


def _prony_system(samples, order):
    N = samples.size
    H = scipy.linalg.hankel(samples[:N - order], samples[N - order - 1:N - 1])
    return H, -samples[order:N]


def prony_poles(samples, order, delta_tau, variant="solve", max_condition=1e15):
    """
    Prony's method: the samples obey the recurrence
    sum_l a_l C_{j+l} = 0 (a_order = 1), whose characteristic polynomial has
    the mu_k as roots.

    Arguments:
        samples (array): C_0 .. C_{N-1}, N >= 2 * order
        variant (str): "solve" solves the (overdetermined) Hankel system in
            the least-squares sense, "kernel" takes the coefficients from the
            right singular vector of the smallest singular value of the
            (order + 1)-column Hankel matrix
        max_condition (float): the "solve" system is rejected above this
            condition number

    Returns:
        PoleEstimate with extra fields "coefficients" and "condition"
    """
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    N = samples.size
    if order < 1:
        raise PreconditionError("order should be positive, got {}".format(order))
    if N < 2 * order:
        raise PreconditionError(
            "Prony needs at least {} samples for order {}, got {}".format(2 * order, order, N)
        )
    if variant == "solve":
        H, rhs = _prony_system(samples, order)
        s = scipy.linalg.svd(H, compute_uv=False)
        cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
        if cond > max_condition:
            raise EstimationError(
                "Prony system is ill-conditioned, condition number {:.3e}".format(cond),
                condition=cond,
            )
        a = scipy.linalg.lstsq(H, rhs)[0]
        coefficients = np.concatenate([a, [1.0]])
    elif variant == "kernel":
        H = scipy.linalg.hankel(samples[:N - order], samples[N - order - 1:])
        _, s, Vh = scipy.linalg.svd(H)
        v = Vh[-1].conj()
        if abs(v[order]) <= np.finfo(float).eps * np.abs(v).max():
            raise EstimationError("kernel vector has a vanishing leading coefficient")
        coefficients = v / v[order]
        cond = float(s[0] / s[order - 1]) if s[order - 1] > 0 else np.inf
    else:
        raise ValueError("variant should be 'solve' or 'kernel', got {}".format(variant))

    # companion expects the highest power first
    C = scipy.linalg.companion(coefficients[::-1])
    try:
        mus = scipy.linalg.eigvals(C)
    except np.linalg.LinAlgError as e:
        raise EstimationError("root finding failed: {}".format(e))
    estimate = PoleEstimate(mus, delta_tau)
    estimate.add_field("coefficients", coefficients)
    estimate.add_field("condition", cond)
    return estimate


def _check_pencil(hp, order):
    if order < 1:
        raise PreconditionError("order should be positive, got {}".format(order))
    if not (hp.P > order and hp.N - hp.P > order):
        raise PreconditionError(
            "pencil needs P > order and N - P > order, got N={}, P={}, order={}".format(
                hp.N, hp.P, order
            )
        )


def mpm_poles(hp, order, delta_tau, max_condition=1e15):
    """
    Matrix pencil method: the mu_k are the values where C2 - g C1 drops
    rank, found as eigenvalues of the rank-`order` pseudoinverse of C1
    applied to C2. The `order` eigenvalues of largest modulus are kept.
    C1 counts as rank deficient when s_order < s_1 / max_condition or
    s_order is at round-off level.
    """
    _check_pencil(hp, order)
    U, s, Vh = scipy.linalg.svd(hp.C1, full_matrices=False)
    floor = s[0] * max(max(hp.C1.shape) * np.finfo(float).eps, 1.0 / max_condition)
    if s[order - 1] <= floor:
        rank = int(np.count_nonzero(s > floor))
        raise EstimationError(
            "rank of C1 is {}, below the order {}".format(rank, order),
            condition=float(s[0] / s[order - 1]) if s[order - 1] > 0 else np.inf,
        )
    pinv = (Vh[:order].conj().T / s[:order]) @ U[:, :order].conj().T
    eigenvalues = scipy.linalg.eigvals(pinv @ hp.C2)
    keep = np.argsort(-np.abs(eigenvalues), kind="stable")[:order]
    estimate = PoleEstimate(eigenvalues[keep], delta_tau)
    estimate.add_field("singular_values", s / s[0])
    return estimate


def ssmpm_poles(hp, order, delta_tau, max_condition=1e15):
    """
    State-space matrix pencil method. A joint SVD of [C1, C2] truncated to
    `order` right singular vectors gives the pencil blocks A1, A2; a second
    joint SVD of [A1, A2], truncated again, gives B1, B2, and the mu_k are
    the eigenvalues of B1^-1 B2.
    """
    _check_pencil(hp, order)
    P = hp.P
    _, s, Vh = scipy.linalg.svd(np.hstack([hp.C1, hp.C2]), full_matrices=False)
    A1 = Vh[:order, :P].T
    A2 = Vh[:order, P:].T
    _, _, Vh2 = scipy.linalg.svd(np.hstack([A1, A2]), full_matrices=False)
    B1 = Vh2[:order, :order]
    B2 = Vh2[:order, order:]
    cond = np.linalg.cond(B1)
    if np.isfinite(cond) and cond <= max_condition:
        F = np.linalg.solve(B1, B2)
    else:
        logger = logging.getLogger("cmps_tomo.estimation")
        logger.warning(
            "Truncated pencil block is singular (condition {:.3e}), "
            "using the pseudoinverse".format(cond)
        )
        F = np.linalg.pinv(B1) @ B2
    estimate = PoleEstimate(scipy.linalg.eigvals(F), delta_tau)
    estimate.add_field("singular_values", s / s[0] if s[0] > 0 else s)
    estimate.add_field("condition", float(cond))
    return estimate


@ESTIMATORS.register("prony")
def _prony(samples, order, delta_tau, pencil, max_condition=1e15):
    return prony_poles(samples, order, delta_tau, "solve", max_condition)


@ESTIMATORS.register("prony-kernel")
def _prony_kernel(samples, order, delta_tau, pencil, max_condition=1e15):
    return prony_poles(samples, order, delta_tau, "kernel", max_condition)


@ESTIMATORS.register("mpm")
def _mpm(samples, order, delta_tau, pencil, max_condition=1e15):
    return mpm_poles(build_hankel(samples, pencil), order, delta_tau, max_condition)


@ESTIMATORS.register("ssmpm")
def _ssmpm(samples, order, delta_tau, pencil, max_condition=1e15):
    return ssmpm_poles(build_hankel(samples, pencil), order, delta_tau, max_condition)


def max_order(estimator, N):
    """Largest order an estimator supports on N samples."""
    if estimator.startswith("prony"):
        return N // 2
    # P > order and N - P > order
    return max((N - 2) // 2, 0)


def resolve_pencil(N, order, pencil=0, fraction=0.4):
    if pencil:
        return int(pencil)
    P = default_pencil(N, order, fraction)
    if P != int(round(fraction * N)):
        logger = logging.getLogger("cmps_tomo.estimation")
        logger.warning(
            "Pencil parameter clamped to {} for order {} on {} samples".format(P, order, N)
        )
    return P
