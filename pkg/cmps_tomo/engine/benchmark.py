"""
Monte Carlo benchmarks of the reconstruction stages.

Every trial draws one random model and evaluates it at all grid values, so
grid points are compared on the same states. Seeds are derived from the
master seed: SeedSequence(master, spawn_key=(0, t)) draws the state of trial
t and SeedSequence(master, spawn_key=(1 + g, t)) the randomness of grid point
g in that trial. Results do not depend on the number of worker threads.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from cmps_tomo.modeling.correlators import (
    amputate,
    nyquist_delta_tau,
    sample,
    spectral_data,
    spectral_decompose,
)
from cmps_tomo.modeling.reconstruction.extract_m import normalize_md
from cmps_tomo.modeling.reconstruction.extract_rq import extract_Q, extract_R
from cmps_tomo.modeling.reconstruction.gauge import extract_K
from cmps_tomo.modeling.registry import BENCHMARKS
from cmps_tomo.modeling.spectral.pole_estimation import estimate_poles
from cmps_tomo.modeling.transfer import transfer_from_qr
from cmps_tomo.simulation.ensemble import random_cmps
from cmps_tomo.simulation.metrics import pole_error
from cmps_tomo.simulation.perturbation import add_noise, additional_field_transfer, perturb_M
from cmps_tomo.structures.md_model import MDModel, ReconstructedCMPS
from cmps_tomo.structures.reports import BenchmarkReport
from cmps_tomo.structures.specs import EnsembleSpec, NoiseSpec
from cmps_tomo.utils.env import get_num_workers
from cmps_tomo.utils.errors import PreconditionError, TomographyError
from cmps_tomo.utils.metric_logger import MetricLogger
from cmps_tomo.utils.timer import Timer, get_time_str

# redraws allowed when a random model has a degenerate spectrum
_MAX_DRAWS = 10


def trial_rng(master, *key):
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=key))


def _draw(make, rng):
    last = None
    for _ in range(_MAX_DRAWS):
        try:
            return make(rng)
        except TomographyError as e:
            last = e
    raise last


def _rebuilt_poles(md):
    R_rec, Y, O = extract_R(md, pairing_tol=np.inf)
    Q_rec, _ = extract_Q(md, Y, O, check=False)
    return np.linalg.eigvals(transfer_from_qr(Q_rec, R_rec)), R_rec, Q_rec


def _safe(fn):
    try:
        return fn()
    except (TomographyError, np.linalg.LinAlgError, ValueError):
        return (np.inf, np.inf)


@BENCHMARKS.register("noise_snr")
def noise_snr_trial(spec, grid, master, trial, cfg):
    """Pole errors of the amputated 2-point function at each SNR."""
    if spec.d < 2:
        raise PreconditionError("the noise benchmark needs d >= 2, got d={}".format(spec.d))

    def make(rng):
        state = random_cmps(spec, rng)
        return spectral_data(
            state,
            cfg.TRANSFER.REALNESS_TOL,
            cfg.TRANSFER.DEGENERACY_TOL,
            cfg.TRANSFER.MAX_EIGENVECTOR_CONDITION,
        )

    sd = _draw(make, trial_rng(master, 0, trial))
    dt = nyquist_delta_tau(sd.poles, cfg.SAMPLING.NYQUIST_FRACTION)
    ct = amputate(sample(sd, 2, cfg.BENCHMARK.NUM_SAMPLES, dt), sd.density)
    order = sd.size - 1
    errors = []
    for g, snr in enumerate(grid):
        noisy = add_noise(ct, NoiseSpec(snr), trial_rng(master, 1 + g, trial))

        def run():
            est = estimate_poles(
                noisy.values,
                order,
                dt,
                estimator=cfg.BENCHMARK.ESTIMATOR,
                pencil=cfg.ESTIMATOR.PENCIL,
                pencil_fraction=cfg.ESTIMATOR.PENCIL_FRACTION,
                overestimation=cfg.ESTIMATOR.OVERESTIMATION,
                max_condition=cfg.ESTIMATOR.MAX_CONDITION,
            )
            return pole_error(sd.poles[1:], est.lambdas)

        errors.append(_safe(run))
    return errors


@BENCHMARKS.register("perturb_M")
def perturb_m_trial(spec, grid, master, trial, cfg):
    """Spectrum deviation of T rebuilt from a perturbed M at each eps."""
    naive = EnsembleSpec(spec.d, "naive", 0.0, cfg.BENCHMARK.MATRIX_SIGMA)

    def make(rng):
        sd = spectral_data(
            random_cmps(naive, rng),
            cfg.TRANSFER.REALNESS_TOL,
            cfg.TRANSFER.DEGENERACY_TOL,
            cfg.TRANSFER.MAX_EIGENVECTOR_CONDITION,
        )
        return sd, normalize_md(sd)

    sd, md = _draw(make, trial_rng(master, 0, trial))
    errors = []
    for g, eps in enumerate(grid):
        rng = trial_rng(master, 1 + g, trial)

        def run():
            M = perturb_M(md.M, md.kappa, eps, rng)
            rebuilt, _, _ = _rebuilt_poles(MDModel(md.poles, M, md.Mhat11, md.kappa))
            return pole_error(sd.poles, rebuilt, exclude_stationary=True)

        errors.append(_safe(run))
    return errors


def k_difference_error(K_true, K_rec):
    """
    Relative errors of the eigenvalue differences of K, taking the better of
    K_rec and its mirror image -conj(K_rec).
    """
    w_true = np.linalg.eigvalsh(K_true)
    target = w_true[1:] - w_true[0]
    w = np.linalg.eigvalsh(K_rec)
    best = None
    for candidate in (w, np.sort(-w)):
        rel = np.abs((candidate[1:] - candidate[0]) - target) / np.maximum(
            np.abs(target), np.finfo(float).tiny
        )
        if best is None or rel.mean() < best.mean():
            best = rel
    return float(best.mean()), float(best.max())


@BENCHMARKS.register("additional_field")
def additional_field_trial(spec, grid, master, trial, cfg):
    """Errors of the K eigenvalue differences when a second field is ignored."""
    if spec.d < 2:
        raise PreconditionError(
            "the additional field benchmark needs d >= 2, got d={}".format(spec.d)
        )
    d = spec.d
    sigma = cfg.BENCHMARK.MATRIX_SIGMA
    rng = trial_rng(master, 0, trial)

    def gaussian():
        return rng.normal(0.0, sigma, (d, d)) + 1j * rng.normal(0.0, sigma, (d, d))

    A = gaussian()
    K = 0.5 * (A + A.conj().T)
    R1, R2 = gaussian(), gaussian()
    errors = []
    for eps in grid:

        def run():
            T = additional_field_transfer(K, R1, R2, eps)
            sd = spectral_decompose(
                T,
                R1,
                cfg.TRANSFER.REALNESS_TOL,
                cfg.TRANSFER.DEGENERACY_TOL,
                cfg.TRANSFER.MAX_EIGENVECTOR_CONDITION,
            )
            md = normalize_md(sd)
            _, R_rec, Q_rec = _rebuilt_poles(md)
            K_rec, _ = extract_K(
                ReconstructedCMPS(R_rec, Q_rec),
                cfg.RECONSTRUCTION.GAUGE_TOL,
                cfg.RECONSTRUCTION.GAUGE_MAX_ITER,
            )
            return k_difference_error(K, K_rec)

        errors.append(_safe(run))
    return errors


def run_benchmark(kind, grid, trials, spec, cfg):
    """
    Run `trials` seeded trials of a benchmark and reduce them per grid value.

    Arguments:
        kind (str): "noise_snr", "perturb_M" or "additional_field"
        grid (list[float]): SNR values or perturbation strengths
        spec (EnsembleSpec): spec.seed is the master seed
        cfg (CfgNode)

    Returns:
        list[BenchmarkReport], one per grid value
    """
    logger = logging.getLogger("cmps_tomo.benchmark")
    if trials < 1:
        raise PreconditionError("trials should be positive, got {}".format(trials))
    grid = [float(g) for g in grid]
    if not grid:
        raise PreconditionError("benchmark grid is empty")
    trial_fn = BENCHMARKS[kind]
    master = int(spec.seed)
    threshold = cfg.BENCHMARK.SUCCESS_THRESHOLD
    workers = get_num_workers(cfg.BENCHMARK.NUM_WORKERS)
    logger.info(
        "Start {} benchmark: d={}, {} trials, grid {}, {} worker(s)".format(
            kind, spec.d, trials, grid, workers
        )
    )

    timer = Timer()
    timer.tic()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        jobs = executor.map(lambda t: trial_fn(spec, grid, master, t, cfg), range(trials))
        results = list(tqdm(jobs, total=trials, desc=kind, disable=trials < 2))
    timer.toc()

    reports = []
    for g, value in enumerate(grid):
        meters = MetricLogger(window_size=trials)
        failures = 0
        success_mean = success_max = 0
        for errors in results:
            mean_rel, max_rel = errors[g]
            failures += int(not np.isfinite(mean_rel))
            success_mean += int(mean_rel < threshold)
            success_max += int(max_rel < threshold)
            meters.update(mean_error=mean_rel, max_error=max_rel)
        q = meters.mean_error.quantiles([0.1, 0.5, 0.9])
        report = BenchmarkReport(
            kind,
            value,
            trials,
            success_mean / trials,
            success_max / trials,
            error_quantiles={"q10": q[0], "q50": q[1], "q90": q[2]},
            failures=failures,
            config={
                "d": spec.d,
                "ensemble": spec.as_dict(),
                "seed": master,
                "trials": trials,
                "success_threshold": threshold,
                "estimator": cfg.BENCHMARK.ESTIMATOR,
                "num_samples": cfg.BENCHMARK.NUM_SAMPLES,
            },
        )
        logger.info("{} = {:.4g}: {}".format(
            "snr" if kind == "noise_snr" else "eps", value, meters))
        reports.append(report)
    logger.info("Total benchmark time: {}".format(get_time_str(timer.total_time)))
    return reports
