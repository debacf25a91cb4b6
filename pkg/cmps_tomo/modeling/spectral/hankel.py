import numpy as np
import scipy.linalg

from cmps_tomo.structures.poles import HankelPair
from cmps_tomo.utils.errors import EstimationError, PreconditionError


def build_hankel(samples, P):
    """C1[j, k] = C_{j+k}, C2[j, k] = C_{j+k+1}, j < N - P, k < P."""
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    N = samples.size
    if not 1 <= P <= N - 1:
        raise PreconditionError("pencil parameter should lie in [1, {}], got {}".format(N - 1, P))
    C1 = scipy.linalg.hankel(samples[:N - P], samples[N - P - 1:N - 1])
    C2 = scipy.linalg.hankel(samples[1:N - P + 1], samples[N - P:N])
    return HankelPair(C1, C2, N, P)


def default_pencil(N, order, fraction=0.4):
    """round(fraction * N) clamped so that both P and N - P exceed the order."""
    low, high = order + 1, N - order - 1
    if low > high:
        raise PreconditionError(
            "{} samples are too few for a pencil of order {}".format(N, order)
        )
    return int(min(max(int(round(fraction * N)), low), high))


def hankel_singular_values(hp):
    """Singular values of C1 divided by the largest one."""
    s = scipy.linalg.svd(hp.C1, compute_uv=False)
    if s[0] == 0:
        raise EstimationError("Hankel matrix is identically zero")
    return s / s[0]


def estimate_order(hp, rel_threshold=1e-8):
    """Number of singular values of C1 above rel_threshold * sigma_1."""
    if not 0 < rel_threshold < 1:
        raise ValueError("rel_threshold should lie in (0, 1), got {}".format(rel_threshold))
    s = hankel_singular_values(hp)
    return int(np.count_nonzero(s > rel_threshold))
