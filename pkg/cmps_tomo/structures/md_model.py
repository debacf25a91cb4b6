import numpy as np

from ._arrays import frozen, max_abs
from .transfer import conjugation_index, conjugate_symmetric


class MDModel(object):
    """
    The robust product of a reconstruction: ordered poles D (stationary
    first) and M normalized to a first row of ones, together with the
    pre-normalization entry Mhat11 (the density).

    Residues follow from rho^(n)_{k_1..k_{n-1}} = Mhat11^n M[0, k_{n-1}] ...
    M[k_1, 0]. `d` is None when the pole count is not a perfect square, which
    is the case for visible blocks of block-structured models.
    """

    def __init__(self, poles, M, Mhat11, kappa, unknown=None):
        poles = np.asarray(poles, dtype=complex).reshape(-1)
        M = np.asarray(M, dtype=complex)
        if M.shape != (poles.size, poles.size):
            raise ValueError(
                "M should have shape ({0}, {0}), got {1}".format(poles.size, M.shape)
            )
        if not np.all(M[0, :] == 1):
            raise ValueError(
                "first row of M should be all ones, got {}".format(M[0, :])
            )
        if not Mhat11 > 0:
            raise ValueError("Mhat11 should be positive, got {}".format(Mhat11))
        self.poles = frozen(poles)
        self.M = frozen(M)
        self.Mhat11 = float(Mhat11)
        self.kappa = int(kappa)
        if unknown is None:
            unknown = np.zeros(M.shape, dtype=bool)
        self.unknown = frozen(unknown, dtype=bool)
        root = int(round(np.sqrt(poles.size)))
        self.d = root if root * root == poles.size else None
        self.extra_fields = {}

    @property
    def size(self):
        return self.poles.size

    @property
    def Mhat(self):
        """Mhat11 * M, similar to conj(R) (x) R."""
        return self.Mhat11 * self.M

    def add_field(self, field, field_data):
        self.extra_fields[field] = field_data

    def get_field(self, field):
        return self.extra_fields[field]

    def has_field(self, field):
        return field in self.extra_fields

    def xi_index(self):
        return conjugation_index(self.size, self.kappa)

    def symmetry_defect(self):
        """max |Xi conj(M) Xi - M| / max |M|."""
        diff = conjugate_symmetric(self.M, self.xi_index()) - self.M
        return max_abs(diff) / max(max_abs(self.M), np.finfo(float).tiny)

    def has_unknown_entries(self):
        return bool(np.any(self.unknown))

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "size={}, ".format(self.size)
        s += "d={}, ".format(self.d)
        s += "Mhat11={:.6g})".format(self.Mhat11)
        return s


class ReconstructedCMPS(object):
    """
    The full product of a reconstruction: R_rec diagonal, Q_rec in the gauge
    fixed by R_rec, optional Hermitian K_rec.

    gauge_note records the fixed freedoms: "phi" (R phase, reference entry
    made real positive), "chi" (imaginary shift removed from q_00),
    "reference" (index of the reference entry) and "mirror" (the model is only
    determined up to simultaneous complex conjugation of Q and R).
    quality collects the metrics echoed by the pipeline.
    """

    def __init__(self, R_rec, Q_rec, K_rec=None, gauge_note=None, quality=None):
        R_rec = np.asarray(R_rec, dtype=complex)
        Q_rec = np.asarray(Q_rec, dtype=complex)
        if R_rec.ndim != 2 or R_rec.shape[0] != R_rec.shape[1]:
            raise ValueError("R_rec should be square, got shape {}".format(R_rec.shape))
        if Q_rec.shape != R_rec.shape:
            raise ValueError(
                "Q_rec should have the shape of R_rec, got {} and {}".format(
                    Q_rec.shape, R_rec.shape
                )
            )
        if np.any(R_rec - np.diag(np.diag(R_rec))):
            raise ValueError("R_rec should be diagonal")
        self.R_rec = frozen(R_rec)
        self.Q_rec = frozen(Q_rec)
        self.K_rec = None if K_rec is None else frozen(K_rec)
        self.gauge_note = dict(gauge_note or {})
        self.quality = dict(quality or {})
        self.d = R_rec.shape[0]

    def with_k(self, K_rec, defect=None):
        quality = dict(self.quality)
        if defect is not None:
            quality["hermiticity_defect"] = defect
        return ReconstructedCMPS(self.R_rec, self.Q_rec, K_rec, self.gauge_note, quality)

    def to_cmps(self):
        from .cmps import CMPS

        meta = {"gauge_note": self.gauge_note}
        return CMPS(self.Q_rec, self.R_rec, meta=meta)

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "d={}, ".format(self.d)
        s += "has_K={})".format(self.K_rec is not None)
        return s
