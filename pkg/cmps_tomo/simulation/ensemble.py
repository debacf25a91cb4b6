import numpy as np

from cmps_tomo.modeling.transfer import q_from_kr, stationarize
from cmps_tomo.structures.cmps import CMPS


def _complex_normal(rng, mu, sigma, d):
    return rng.normal(mu, sigma, (d, d)) + 1j * rng.normal(mu, sigma, (d, d))


def random_cmps(spec, rng=None):
    """
    Draw a random stationary cMPS.

    "naive": real and imaginary parts of Q and R from N(mu, sigma), then Q
    is shifted to stationarity. "refined": K = (A + A^dag) / 2 and R with
    entries from the same distribution, both scaled by eta, and
    Q = -iK - R^dag R / 2.

    Arguments:
        spec (EnsembleSpec)
        rng (np.random.Generator): overrides the generator seeded by spec.seed
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    d = spec.d
    if spec.mode == "naive":
        Q = _complex_normal(rng, spec.mu, spec.sigma, d)
        R = _complex_normal(rng, spec.mu, spec.sigma, d)
        return stationarize(CMPS(Q, R))
    A = _complex_normal(rng, spec.mu, spec.sigma, d)
    K = spec.eta * 0.5 * (A + A.conj().T)
    R = spec.eta * _complex_normal(rng, spec.mu, spec.sigma, d)
    return stationarize(CMPS(q_from_kr(K, R), R, K=K))
