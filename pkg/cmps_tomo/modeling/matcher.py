import numpy as np

from cmps_tomo.utils.errors import PoleMatchingError


class PoleMatcher(object):
    """
    Assigns to every reference pole one candidate pole. Assignment is greedy:
    the globally closest remaining (reference, candidate) pair is matched
    first. Distances are measured relative to the largest reference modulus,
    so the stationary pole l = 0 is matched like any other.

    The matcher returns an array with, for every reference pole, the index of
    its candidate, or UNMATCHED when the closest free candidate lies beyond
    the tolerance (or there is none left).
    """

    UNMATCHED = -1

    def __init__(self, tol=1e-3):
        """
        Arguments:
            tol (float): relative distance up to which two poles are
                considered the same; np.inf matches everything
        """
        if not tol > 0:
            raise ValueError("tol should be positive, got {}".format(tol))
        self.tol = tol

    def distances(self, reference, candidates):
        reference = np.asarray(reference, dtype=complex).reshape(-1)
        candidates = np.asarray(candidates, dtype=complex).reshape(-1)
        scale = max(float(np.max(np.abs(reference), initial=0.0)), np.finfo(float).tiny)
        return np.abs(reference[:, None] - candidates[None, :]) / scale

    def __call__(self, reference, candidates):
        D = self.distances(reference, candidates)
        matches = np.full(D.shape[0], PoleMatcher.UNMATCHED, dtype=int)
        if D.size == 0:
            return matches
        D = D.copy()
        for _ in range(min(D.shape)):
            i, j = np.unravel_index(np.argmin(D), D.shape)
            if not D[i, j] <= self.tol:
                break
            matches[i] = j
            D[i, :] = np.inf
            D[:, j] = np.inf
        return matches

    def permutation(self, reference, candidates):
        """
        Indices into `candidates` that order them like `reference`; both
        sets must have the same size and match completely.
        """
        reference = np.asarray(reference, dtype=complex).reshape(-1)
        candidates = np.asarray(candidates, dtype=complex).reshape(-1)
        if reference.size != candidates.size:
            raise PoleMatchingError(
                "pole sets differ in size: {} and {}".format(reference.size, candidates.size)
            )
        matches = self(reference, candidates)
        missing = matches == PoleMatcher.UNMATCHED
        if np.any(missing):
            raise PoleMatchingError(
                "poles without a counterpart within relative tolerance {:.1e}: {}".format(
                    self.tol, reference[missing].tolist()
                )
            )
        return matches


def pair_conjugates(values):
    """
    Greedy pairing of values with the complex conjugates of others: the pair
    (a, b) with the smallest |v_a - conj(v_b)| is taken first. A value may
    pair with itself, which is how (near-)real values end up.

    Returns:
        list of (a, b) index pairs, a == b for self pairs
    """
    values = np.asarray(values, dtype=complex).reshape(-1)
    remaining = list(range(values.size))
    pairs = []
    while remaining:
        sub = values[remaining]
        distance = np.abs(sub[:, None] - sub[None, :].conj())
        a, b = np.unravel_index(np.argmin(distance), distance.shape)
        ia, ib = remaining[a], remaining[b]
        pairs.append((ia, ib))
        remaining.remove(ia)
        if ib != ia:
            remaining.remove(ib)
    return pairs
