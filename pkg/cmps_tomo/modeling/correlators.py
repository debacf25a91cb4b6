"""
Forward model: pole/residue decomposition of a cMPS and exact evaluation of
its density-like correlation functions.

With the ordered eigenvalues l_k of T and M = X^-1 (conj(R) (x) R) X,

    C^(n)(t_1, .., t_{n-1}) = sum_idx rho[idx] prod_j exp(l_{k_j} t_j),
    rho[k_1, .., k_{n-1}] = M[0, k_{n-1}] M[k_{n-1}, k_{n-2}] .. M[k_1, 0].
"""
import numpy as np
import scipy.linalg

from cmps_tomo.structures.correlation_tensor import CorrelationTensor
from cmps_tomo.structures.spectral_data import SpectralData
from cmps_tomo.structures.transfer import sort_poles, swap_index
from cmps_tomo.utils.errors import (
    DegenerateSpectrumError,
    NonDiagonalizableError,
    PoleEvaluationError,
    PreconditionError,
    ResourceLimitError,
)
from .transfer import build_transfer


def _first_significant(v, rel=1e-8):
    mags = np.abs(v)
    return int(np.argmax(mags > rel * mags.max()))


def _self_conjugate_phase(v, swap):
    """Rotate a unit eigenvector of a real pole so that Lambda conj(v) = v."""
    overlap = np.vdot(v, v[swap].conj())
    v = v * np.exp(0.5j * np.angle(overlap))
    # remaining sign freedom: make the largest real part positive
    k = int(np.argmax(np.abs(v.real)))
    if v[k].real < 0:
        v = -v
    return v


def _check_gaps(lam, tol):
    if lam.size < 2:
        return
    scale = max(float(np.max(np.abs(lam))), np.finfo(float).tiny)
    gaps = np.abs(lam[:, None] - lam[None, :])
    gaps[np.diag_indices_from(gaps)] = np.inf
    gap = float(gaps.min())
    if gap < tol * scale:
        raise DegenerateSpectrumError(
            "transfer matrix spectrum is degenerate: minimal eigenvalue gap {:.3e} "
            "(relative {:.3e})".format(gap, gap / scale)
        )


def spectral_decompose(T, R, realness_tol=1e-9, degeneracy_tol=1e-8, max_condition=1e12):
    """
    Diagonalize T and express conj(R) (x) R in its eigenbasis.

    Eigenvectors are normalized to unit length. A real pole gets the phase
    with Lambda conj(x) = x; for a complex pair the member with positive
    imaginary part has its first significant component real positive and the
    partner is Lambda conj(x). With this choice Xi conj(M) Xi = M holds.

    Arguments:
        T (TransferMatrix)
        R (array): the d x d field matrix T was built from

    Returns:
        SpectralData
    """
    d = T.d
    R = np.asarray(R, dtype=complex)
    eigenvalues, vectors = scipy.linalg.eig(T.T)
    _check_gaps(eigenvalues, degeneracy_tol)
    order, kappa = sort_poles(eigenvalues, realness_tol)
    poles = eigenvalues[order]
    vectors = vectors[:, order]
    swap = swap_index(d)

    X = np.empty_like(vectors)
    for k in range(kappa):
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        X[:, k] = _self_conjugate_phase(v, swap)
        poles[k] = poles[k].real
    for k in range(kappa, poles.size, 2):
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        i = _first_significant(v)
        v = v * (abs(v[i]) / v[i])
        X[:, k] = v
        X[:, k + 1] = v[swap].conj()
        poles[k + 1] = np.conj(poles[k])

    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > max_condition:
        raise NonDiagonalizableError(
            "transfer matrix eigenvectors are (numerically) dependent, condition "
            "number {:.3e}".format(cond)
        )
    B = np.kron(R.conj(), R)
    M = np.linalg.solve(X, B @ X)
    return SpectralData(d, poles, M, kappa)


def residue(sd, idx):
    """rho[k_1, .., k_{n-1}] = M[0, k_{n-1}] .. M[k_1, 0], 0-based indices."""
    idx = [int(k) for k in idx]
    if not idx:
        raise PreconditionError("a residue needs at least one index")
    for k in idx:
        if not 0 <= k < sd.size:
            raise IndexError("pole index {} out of range 0..{}".format(k, sd.size - 1))
    M = sd.M
    value = M[idx[0], 0]
    for a, b in zip(idx[:-1], idx[1:]):
        value = value * M[b, a]
    return complex(value * M[0, idx[-1]])


def residue_tensor(M, n):
    """All n-point residues of the chain matrix M, shape (D,) * (n - 1)."""
    M = np.asarray(M)
    if n < 2:
        raise PreconditionError("correlation order should be at least 2, got {}".format(n))
    F = M[:, 0]
    for _ in range(n - 2):
        F = F[..., :, None] * M.T
    return F * M[0, :]


def correlate(sd, taus):
    """C^(n) at a single point, n = len(taus) + 1."""
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if taus.size == 0:
        raise PreconditionError("at least one time difference is required")
    if np.any(taus < 0):
        raise PreconditionError("time differences should be non-negative, got {}".format(taus))
    M = sd.M
    v = M[:, 0]
    for j, tau in enumerate(taus):
        v = np.exp(sd.poles * tau) * v
        if j < taus.size - 1:
            v = M @ v
    return complex(M[0, :] @ v)


def _grid_guard(N, n, max_grid_points):
    points = float(N) ** (n - 1)
    if points > max_grid_points:
        raise ResourceLimitError(
            "sampling {} points (N={}, n={}) exceeds the cap of {}".format(
                int(points), N, n, int(max_grid_points)
            )
        )


def pole_powers(poles, N, delta_tau):
    """A[l, k] = exp(l_k * l * dt)."""
    steps = np.arange(N)[:, None] * delta_tau
    return np.exp(steps * np.asarray(poles)[None, :])


def sample(sd, n, N, delta_tau, max_grid_points=2000000):
    """
    Sample C^(n) on the uniform grid l * delta_tau, l = 0 .. N-1, per axis.

    The chain is contracted axis by axis against per-axis pole power tables,
    so the cost is linear in the number of grid points.
    """
    if n < 2 or N < 1 or not delta_tau > 0:
        raise PreconditionError(
            "need n >= 2, N >= 1 and delta_tau > 0, got n={}, N={}, delta_tau={}".format(
                n, N, delta_tau
            )
        )
    _grid_guard(N, n, max_grid_points)
    M = sd.M
    A = pole_powers(sd.poles, N, delta_tau)
    G = A * M[:, 0][None, :]
    for _ in range(n - 2):
        G = (G @ M.T)[..., None, :] * A
    values = G @ M[0, :]
    return CorrelationTensor(n, N, delta_tau, values, amputated=False)


def synthesize(poles, residues, N, delta_tau, max_grid_points=2000000):
    """Evaluate sum_idx rho[idx] prod_j mu_{k_j}^{l_j} on an N^(n-1) grid."""
    residues = np.asarray(residues, dtype=complex)
    n = residues.ndim + 1
    _grid_guard(N, n, max_grid_points)
    A = pole_powers(poles, N, delta_tau)
    values = residues
    for axis in range(n - 1):
        values = np.moveaxis(np.tensordot(A, values, axes=([1], [axis])), 0, axis)
    return values


def amputate(ct, density):
    """Subtract density^2 from a 2-point function."""
    if ct.n != 2:
        raise PreconditionError("only 2-point functions can be amputated, got n={}".format(ct.n))
    if ct.amputated:
        raise PreconditionError("correlation function is already amputated")
    if density < 0:
        raise PreconditionError("density should be non-negative, got {}".format(density))
    return ct.with_values(ct.values - density ** 2, amputated=True)


def laplace_eval(sd, s, min_distance=1e-12):
    """
    Laplace transform of C^(n),

        L(s) = int_0^inf C(t) exp(-s . t) dt = sum_idx rho[idx] / prod_j (s_j - l_{k_j}),

    valid for Re s_j > max Re l. Terms carry s_j - l in the denominator, so for
    n = 2 each is -rho / (l - s); s L(s) tends to C(0) as s grows. Diagnostic only.
    """
    s = np.asarray(s, dtype=complex).reshape(-1)
    if s.size == 0:
        raise PreconditionError("at least one Laplace variable is required")
    distance = np.abs(s[:, None] - sd.poles[None, :])
    if distance.min() <= min_distance:
        raise PoleEvaluationError("Laplace transform evaluated at a pole")
    M = sd.M
    v = M[:, 0]
    for j, s_j in enumerate(s):
        v = v / (s_j - sd.poles)
        if j < s.size - 1:
            v = M @ v
    return complex(M[0, :] @ v)


def nyquist_delta_tau(poles, fraction=0.5):
    """dt = fraction * pi / max|l|; fraction < 1 respects the sampling theorem."""
    scale = float(np.max(np.abs(np.asarray(poles))))
    if scale == 0.0:
        return 1.0
    return fraction * np.pi / scale


def decay_num_samples(poles, delta_tau, periods=4.0, min_samples=1, max_samples=1000):
    """
    Samples per axis for the grid to span `periods` decay times of the
    slowest non-stationary pole, clamped to [min_samples, max_samples].

    Weakly damped poles need a window of several 1 / |Re l| to be told apart
    in the Hankel spectrum. The stationary pole (largest real part) is
    excluded; without a decaying pole the count is max_samples.
    """
    if delta_tau <= 0:
        raise PreconditionError("delta_tau should be positive, got {}".format(delta_tau))
    if min_samples > max_samples:
        raise PreconditionError(
            "min_samples {} exceeds max_samples {}".format(min_samples, max_samples)
        )
    rates = np.sort(-np.asarray(poles, dtype=complex).real)[1:]
    rates = rates[rates > 0]
    if rates.size == 0:
        return int(max_samples)
    N = int(np.ceil(periods / (rates[0] * delta_tau)))
    return int(min(max(N, min_samples), max_samples))


def spectral_data(state, realness_tol=1e-9, degeneracy_tol=1e-8, max_condition=1e12):
    """spectral_decompose(build_transfer(state), state.R)."""
    return spectral_decompose(
        build_transfer(state), state.R, realness_tol, degeneracy_tol, max_condition
    )
