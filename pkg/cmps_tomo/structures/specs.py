import numpy as np


_MODES = ("naive", "refined")


class EnsembleSpec(object):
    """
    Parameters of a random cMPS draw.

    mode "naive" draws Q and R with real and imaginary parts from N(mu, sigma)
    and stationarizes; mode "refined" draws a Hermitian K and R from the same
    distribution, scales both by eta and sets Q = -iK - R^dag R / 2.
    """

    def __init__(self, d, mode="refined", mu=0.0, sigma=0.01, eta=1.0, seed=0):
        if int(d) < 1:
            raise ValueError("d should be positive, got {}".format(d))
        if mode in ("naive_QR",):
            mode = "naive"
        if mode in ("refined_KR",):
            mode = "refined"
        if mode not in _MODES:
            raise ValueError("mode should be one of {}, got {!r}".format(_MODES, mode))
        if not sigma > 0:
            raise ValueError("sigma should be positive, got {}".format(sigma))
        if mode == "refined" and not eta > 0:
            raise ValueError("eta should be positive in refined mode, got {}".format(eta))
        self.d = int(d)
        self.mode = mode
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.eta = float(eta)
        self.seed = seed

    @classmethod
    def from_config(cls, cfg, seed=None):
        return cls(
            cfg.ENSEMBLE.D,
            mode=cfg.ENSEMBLE.MODE,
            mu=cfg.ENSEMBLE.MU,
            sigma=cfg.ENSEMBLE.SIGMA,
            eta=cfg.ENSEMBLE.ETA,
            seed=cfg.SEED if seed is None else seed,
        )

    def as_dict(self):
        return dict(d=self.d, mode=self.mode, mu=self.mu, sigma=self.sigma, eta=self.eta)


class NoiseSpec(object):
    """White Gaussian noise with std = mean(|values|) / snr; snr may be inf."""

    def __init__(self, snr, seed=0):
        snr = float(snr)
        if not snr > 0 or np.isnan(snr):
            raise ValueError("snr should be positive, got {}".format(snr))
        self.snr = snr
        self.seed = seed
