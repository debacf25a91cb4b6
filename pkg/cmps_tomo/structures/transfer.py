import numpy as np

from cmps_tomo.utils.errors import DimensionError, PreconditionError
from ._arrays import frozen


def is_real_pole(value, realness_tol=1e-9):
    return abs(value.imag) <= realness_tol * (1.0 + abs(value))


def sort_poles(eigenvalues, realness_tol=1e-9):
    """
    Ordering convention shared by every pole list in the package.

    The stationary pole (the real eigenvalue with the largest real part) comes
    first, then the remaining real eigenvalues by descending real part, then
    the complex pairs by descending real part with the member of positive
    imaginary part first and its partner right after it.

    Arguments:
        eigenvalues (array[complex]): unordered eigenvalues, closed under
            complex conjugation
        realness_tol (float): |Im l| <= realness_tol * (1 + |l|) counts as real

    Returns:
        order (array[int]): permutation, eigenvalues[order] is sorted
        kappa (int): number of real eigenvalues
    """
    lam = np.asarray(eigenvalues, dtype=complex).reshape(-1)
    if lam.size == 0:
        raise PreconditionError("cannot order an empty pole list")
    real = [k for k in range(lam.size) if is_real_pole(lam[k], realness_tol)]
    if not real:
        raise PreconditionError("no real eigenvalue to serve as the stationary pole")
    real.sort(key=lambda k: (-lam[k].real, k))
    upper = [k for k in range(lam.size) if k not in real and lam[k].imag > 0]
    lower = [k for k in range(lam.size) if k not in real and lam[k].imag < 0]
    if len(upper) != len(lower):
        raise PreconditionError(
            "pole set is not closed under conjugation, got {} poles above and {} "
            "below the real axis".format(len(upper), len(lower))
        )
    upper.sort(key=lambda k: (-lam[k].real, -lam[k].imag, k))
    order = list(real)
    for k in upper:
        partner = min(lower, key=lambda j: abs(lam[j] - np.conj(lam[k])))
        lower.remove(partner)
        order.extend([k, partner])
    return np.asarray(order, dtype=int), len(real)


def swap_index(d):
    """Index form of Lambda_d: position i*d + j holds j*d + i."""
    return np.arange(d * d).reshape(d, d).T.reshape(-1)


def conjugation_index(size, kappa):
    """Index form of Xi: identity on the first kappa slots, pair swaps after."""
    if kappa < 0 or kappa > size or (size - kappa) % 2:
        raise ValueError(
            "size - kappa should be a non-negative even number, got size={} "
            "and kappa={}".format(size, kappa)
        )
    index = np.arange(size)
    index[kappa:] = index[kappa:].reshape(-1, 2)[:, ::-1].reshape(-1).copy()
    return index


def permutation_matrix(index):
    index = np.asarray(index, dtype=int)
    P = np.zeros((index.size, index.size))
    P[np.arange(index.size), index] = 1.0
    return P


def conjugate_symmetric(M, index):
    """Return Xi conj(M) Xi for the permutation `index` of Xi."""
    return np.asarray(M)[np.ix_(index, index)].conj()


class SymmetryMaps(object):
    """
    The two permutations tying a density-like model to its complex conjugate.

    lambda_index / Lambda swap the tensor factors of C^d (x) C^d, so that
    Lambda conj(T) Lambda = T. xi_index / Xi swap each complex pole with its
    partner and leave the kappa real poles alone, so that Xi conj(M) Xi = M.
    """

    def __init__(self, d, kappa):
        if d < 1:
            raise ValueError("d should be positive, got {}".format(d))
        self.d = int(d)
        self.kappa = int(kappa)
        self.lambda_index = swap_index(self.d)
        self.xi_index = conjugation_index(self.d * self.d, self.kappa)

    @property
    def Lambda(self):
        return permutation_matrix(self.lambda_index)

    @property
    def Xi(self):
        return permutation_matrix(self.xi_index)


class TransferMatrix(object):
    """The d^2 x d^2 transfer matrix T of a cMPS, row-major Kronecker layout."""

    def __init__(self, T, d):
        T = np.asarray(T, dtype=complex)
        if T.shape != (d * d, d * d):
            raise DimensionError(
                "T should have shape ({0}, {0}) for d={1}, got {2}".format(d * d, d, T.shape)
            )
        self.T = frozen(T)
        self.d = int(d)
        self._eigenvalues = None

    def eigenvalues(self):
        if self._eigenvalues is None:
            self._eigenvalues = frozen(np.linalg.eigvals(self.T))
        return self._eigenvalues

    def max_real_part(self):
        return float(np.max(self.eigenvalues().real))

    def shifted(self, c):
        """T - c * 1."""
        return TransferMatrix(self.T - c * np.eye(self.d * self.d), self.d)

    def lambda_symmetry_defect(self):
        idx = swap_index(self.d)
        return float(np.max(np.abs(self.T[np.ix_(idx, idx)].conj() - self.T)))
