import numpy as np

from cmps_tomo.utils.errors import DimensionError
from ._arrays import frozen
from .transfer import conjugation_index, conjugate_symmetric


class SpectralData(object):
    """
    Pole/residue form of a cMPS: the ordered transfer matrix eigenvalues and
    M = X^-1 (conj(R) (x) R) X in the matching eigenbasis.

    Every density-like correlation function is determined by (poles, M). The
    density <Psi^dag Psi> is M[0, 0].
    """

    def __init__(self, d, poles, M, kappa):
        poles = np.asarray(poles, dtype=complex).reshape(-1)
        M = np.asarray(M, dtype=complex)
        if d * d != poles.size:
            raise DimensionError(
                "expected d^2 = {} poles, got {}".format(d * d, poles.size)
            )
        if M.shape != (poles.size, poles.size):
            raise DimensionError(
                "M should have shape ({0}, {0}), got {1}".format(poles.size, M.shape)
            )
        self.d = int(d)
        self.poles = frozen(poles)
        self.M = frozen(M)
        self.kappa = int(kappa)

    @property
    def size(self):
        return self.poles.size

    @property
    def density(self):
        return float(self.M[0, 0].real)

    def xi_index(self):
        return conjugation_index(self.size, self.kappa)

    def symmetry_defect(self):
        """max |Xi conj(M) Xi - M| / max |M|."""
        scale = max(float(np.max(np.abs(self.M))), np.finfo(float).tiny)
        diff = conjugate_symmetric(self.M, self.xi_index()) - self.M
        return float(np.max(np.abs(diff))) / scale

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "d={}, ".format(self.d)
        s += "kappa={}, ".format(self.kappa)
        s += "density={:.6g})".format(self.density)
        return s
