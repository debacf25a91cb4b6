import numpy as np

from cmps_tomo.utils.errors import DimensionError
from ._arrays import frozen, max_abs


class CMPS(object):
    """
    A translation invariant continuous matrix product state, given by the
    complex d x d matrices Q and R. The auxiliary Hamiltonian K is optional
    and only stored when the state was built from it.
    `meta` is a free-form dictionary (for example the interaction strength
    of an imported ground state).
    """

    def __init__(self, Q, R, K=None, meta=None):
        Q = np.asarray(Q, dtype=complex)
        R = np.asarray(R, dtype=complex)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionError("Q should be a square matrix, got shape {}".format(Q.shape))
        if R.shape != Q.shape:
            raise DimensionError(
                "Q and R should have the same shape, got {} and {}".format(Q.shape, R.shape)
            )
        if K is not None:
            K = AuxiliaryHamiltonian(K).K
            if K.shape != Q.shape:
                raise DimensionError(
                    "K should have the shape of Q, got {} and {}".format(K.shape, Q.shape)
                )
        self.d = Q.shape[0]
        self.Q = frozen(Q)
        self.R = frozen(R)
        self.K = K
        self.meta = dict(meta or {})

    @classmethod
    def from_kr(cls, K, R, meta=None):
        # late import, modeling depends on structures
        from cmps_tomo.modeling.transfer import q_from_kr

        K = AuxiliaryHamiltonian(K)
        return cls(q_from_kr(K, R), R, K=K.K, meta=meta)

    def with_k(self, K):
        return CMPS(self.Q, self.R, K=K, meta=self.meta)

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "d={}, ".format(self.d)
        s += "has_K={})".format(self.K is not None)
        return s


class AuxiliaryHamiltonian(object):
    """Hermitian d x d matrix K with Q = -iK - R^dag R / 2."""

    def __init__(self, K, tol=1e-12):
        if isinstance(K, AuxiliaryHamiltonian):
            K = K.K
        K = np.asarray(K, dtype=complex)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise DimensionError("K should be a square matrix, got shape {}".format(K.shape))
        defect = max_abs(K - K.conj().T)
        if defect > tol * max(max_abs(K), np.finfo(float).tiny):
            raise ValueError(
                "K should be Hermitian, got |K - K^dag|_max = {:.3e}".format(defect)
            )
        self.K = frozen(K)
        self.d = K.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.K)
