import numpy as np

from ._arrays import frozen


class CorrelationTensor(object):
    """
    Uniformly sampled n-point correlation function.

    values[l_1, ..., l_{n-1}] = C^(n)(l_1 dt, ..., l_{n-1} dt) with the last
    index running fastest. `amputated` marks 2-point data with the squared
    density already subtracted.
    """

    def __init__(self, n, N, delta_tau, values, amputated=False):
        n = int(n)
        N = int(N)
        if n < 2:
            raise ValueError("correlation order should be at least 2, got {}".format(n))
        if N < 1:
            raise ValueError("N should be positive, got {}".format(N))
        if not delta_tau > 0:
            raise ValueError("delta_tau should be positive, got {}".format(delta_tau))
        values = np.asarray(values, dtype=complex)
        expected = (N,) * (n - 1)
        if values.shape != expected:
            raise ValueError(
                "values should have shape {}, got {}".format(expected, values.shape)
            )
        if amputated and n != 2:
            raise ValueError("only 2-point functions can be amputated, got n={}".format(n))
        self.n = n
        self.N = N
        self.delta_tau = float(delta_tau)
        self.values = frozen(values)
        self.amputated = bool(amputated)

    def with_values(self, values, amputated=None):
        if amputated is None:
            amputated = self.amputated
        return CorrelationTensor(self.n, self.N, self.delta_tau, values, amputated)

    def taus(self):
        return np.arange(self.N) * self.delta_tau

    def is_real(self, tol=1e-10):
        v = self.values
        return bool(np.all(np.abs(v.imag) <= tol * (1.0 + np.abs(v.real))))

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "n={}, ".format(self.n)
        s += "N={}, ".format(self.N)
        s += "delta_tau={:.6g}, ".format(self.delta_tau)
        s += "amputated={})".format(self.amputated)
        return s
