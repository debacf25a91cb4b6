import numpy as np

from ._arrays import frozen


class HankelPair(object):
    """
    The shifted Hankel matrices of a sampled signal C_0 .. C_{N-1}:
    C1[j, k] = C_{j+k} and C2[j, k] = C_{j+k+1}, both (N - P) x P.
    """

    def __init__(self, C1, C2, N, P):
        C1 = np.asarray(C1, dtype=complex)
        C2 = np.asarray(C2, dtype=complex)
        if C1.shape != (N - P, P) or C2.shape != C1.shape:
            raise ValueError(
                "C1 and C2 should have shape ({}, {}), got {} and {}".format(
                    N - P, P, C1.shape, C2.shape
                )
            )
        self.C1 = frozen(C1)
        self.C2 = frozen(C2)
        self.N = int(N)
        self.P = int(P)

    def signal(self):
        """Recover C_0 .. C_{N-1} from the first column and last row."""
        return np.concatenate([self.C1[:, 0], self.C2[-1, :]])


class PoleEstimate(object):
    """
    Estimated exponentiated poles mu_k = exp(l_k dt) with the continuous
    poles l_k = log(mu_k) / dt on the principal branch.

    Estimators attach diagnostics (condition numbers, singular values) as
    extra fields.
    """

    def __init__(self, mus, delta_tau, lambdas=None):
        if not delta_tau > 0:
            raise ValueError("delta_tau should be positive, got {}".format(delta_tau))
        mus = np.asarray(mus, dtype=complex).reshape(-1)
        if lambdas is None:
            with np.errstate(divide="ignore", invalid="ignore"):
                lambdas = np.log(mus) / delta_tau
        lambdas = np.asarray(lambdas, dtype=complex).reshape(-1)
        if lambdas.shape != mus.shape:
            raise ValueError(
                "mus and lambdas should have the same length, got {} and {}".format(
                    mus.size, lambdas.size
                )
            )
        self.mus = frozen(mus)
        self.lambdas = frozen(lambdas)
        self.delta_tau = float(delta_tau)
        self.extra_fields = {}

    @classmethod
    def from_lambdas(cls, lambdas, delta_tau):
        lambdas = np.asarray(lambdas, dtype=complex).reshape(-1)
        return cls(np.exp(lambdas * delta_tau), delta_tau, lambdas=lambdas)

    @property
    def order(self):
        return self.mus.size

    def add_field(self, field, field_data):
        self.extra_fields[field] = field_data

    def get_field(self, field):
        return self.extra_fields[field]

    def has_field(self, field):
        return field in self.extra_fields

    def fields(self):
        return list(self.extra_fields.keys())

    def _copy_extra_fields(self, other):
        for k, v in other.extra_fields.items():
            self.extra_fields[k] = v

    def __getitem__(self, item):
        out = PoleEstimate(self.mus[item], self.delta_tau, lambdas=self.lambdas[item])
        out._copy_extra_fields(self)
        return out

    def __len__(self):
        return self.order

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "order={}, ".format(self.order)
        s += "delta_tau={:.6g})".format(self.delta_tau)
        return s


class ResidueModel(object):
    """
    Poles l_k and residue tensor rho of an n-point function,
    C^(n)(t) = sum_idx rho[idx] prod_j exp(l_{idx_j} t_j).
    """

    def __init__(self, poles, residues, n, rms_fit_error=0.0, delta_tau=None):
        poles = np.asarray(poles, dtype=complex).reshape(-1)
        residues = np.asarray(residues, dtype=complex)
        n = int(n)
        if n < 2:
            raise ValueError("correlation order should be at least 2, got {}".format(n))
        expected = (poles.size,) * (n - 1)
        if residues.shape != expected:
            raise ValueError(
                "residues should have shape {}, got {}".format(expected, residues.shape)
            )
        if rms_fit_error < 0:
            raise ValueError("rms_fit_error should be non-negative, got {}".format(rms_fit_error))
        self.poles = frozen(poles)
        self.residues = frozen(residues)
        self.n = n
        self.rms_fit_error = float(rms_fit_error)
        self.delta_tau = None if delta_tau is None else float(delta_tau)
        self.extra_fields = {}

    @property
    def order(self):
        return self.poles.size

    def add_field(self, field, field_data):
        self.extra_fields[field] = field_data

    def get_field(self, field):
        return self.extra_fields[field]

    def has_field(self, field):
        return field in self.extra_fields

    def permuted(self, order):
        """Reorder the poles and every residue axis consistently."""
        order = np.asarray(order, dtype=int)
        residues = self.residues[np.ix_(*([order] * (self.n - 1)))]
        out = ResidueModel(
            self.poles[order], residues, self.n, self.rms_fit_error, self.delta_tau
        )
        out.extra_fields = dict(self.extra_fields)
        return out

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "n={}, ".format(self.n)
        s += "order={}, ".format(self.order)
        s += "rms_fit_error={:.3e})".format(self.rms_fit_error)
        return s
