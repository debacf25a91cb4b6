import os
import unittest

import numpy as np

import env_tests.env as env_tests
import utils
from cmps_tomo.config import cfg as g_cfg
from cmps_tomo.engine.benchmark import k_difference_error, run_benchmark, trial_rng
from cmps_tomo.structures.specs import EnsembleSpec


def _cfg(**benchmark):
    cfg = g_cfg.clone()
    for key, value in benchmark.items():
        setattr(cfg.BENCHMARK, key, value)
    return cfg


class TestBenchmark(unittest.TestCase):
    def setUp(self):
        self._threads = os.environ.get("CMPS_TOMO_THREADS")

    def tearDown(self):
        if self._threads is None:
            os.environ.pop("CMPS_TOMO_THREADS", None)
        else:
            os.environ["CMPS_TOMO_THREADS"] = self._threads

    def test_noiseless(self):
        trials = utils.trials(5, 50)
        spec = EnsembleSpec(2, "refined", sigma=0.01, seed=1)
        reports = run_benchmark("noise_snr", [float("inf")], trials, spec, _cfg())
        self.assertEqual(len(reports), 1)
        self.assertEqual(reports[0].trials, trials)
        self.assertEqual(reports[0].success_rate_mean_criterion, 1.0)
        self.assertEqual(reports[0].success_rate_max_criterion, 1.0)
        self.assertEqual(reports[0].failures, 0)

    def test_unperturbed_M(self):
        for d in (2, 3):
            spec = EnsembleSpec(d, seed=2)
            reports = run_benchmark("perturb_M", [0.0, 0.1], utils.trials(5, 100), spec, _cfg())
            self.assertEqual(reports[0].success_rate_mean_criterion, 1.0)
            self.assertEqual(reports[0].grid_value, 0.0)
            self.assertEqual(reports[1].grid_value, 0.1)

    def test_single_field(self):
        spec = EnsembleSpec(2, seed=3)
        reports = run_benchmark("additional_field", [0.0], utils.trials(5, 200), spec, _cfg())
        self.assertEqual(reports[0].success_rate_mean_criterion, 1.0)
        self.assertIn("q50", reports[0].error_quantiles)
        self.assertLess(reports[0].error_quantiles["q90"], 0.1)

    def test_deterministic(self):
        spec = EnsembleSpec(2, seed=4)
        grid = [0.0, 0.05, 0.3]
        os.environ["CMPS_TOMO_THREADS"] = "1"
        a = run_benchmark("perturb_M", grid, 6, spec, _cfg(NUM_WORKERS=4))
        os.environ.pop("CMPS_TOMO_THREADS")
        b = run_benchmark("perturb_M", grid, 6, spec, _cfg(NUM_WORKERS=4))
        self.assertEqual([r.as_dict() for r in a], [r.as_dict() for r in b])

    def test_config_echo(self):
        spec = EnsembleSpec(2, seed=5)
        report = run_benchmark("perturb_M", [0.0], 2, spec, _cfg())[0]
        self.assertEqual(report.config["seed"], 5)
        self.assertEqual(report.config["success_threshold"], 0.1)
        self.assertEqual(report.config["num_samples"], 200)

    def test_preconditions(self):
        spec = EnsembleSpec(2, seed=0)
        with self.assertRaises(ValueError):
            run_benchmark("perturb_M", [0.0], 0, spec, _cfg())
        with self.assertRaises(ValueError):
            run_benchmark("perturb_M", [], 2, spec, _cfg())
        with self.assertRaises(KeyError):
            run_benchmark("no_such_benchmark", [0.0], 2, spec, _cfg())
        with self.assertRaises(ValueError):
            run_benchmark("noise_snr", [10.0], 2, EnsembleSpec(1, seed=0), _cfg())

    @unittest.skipUnless(env_tests.full_tests(), "statistical test, set CMPS_TOMO_FULL_TESTS=1")
    def test_noise_monotonic(self):
        trials = 200
        cfg = utils.load_config("benchmarks/noise_snr_d2.yaml")
        spec = EnsembleSpec.from_config(cfg)
        reports = run_benchmark("noise_snr", cfg.BENCHMARK.GRID, trials, spec, cfg)
        rates = np.array([r.success_rate_mean_criterion for r in reports])
        band = 2 * np.sqrt(np.maximum(rates * (1 - rates), 1.0 / trials) / trials)
        self.assertTrue(np.all(np.diff(rates) >= -2 * band[1:]))
        self.assertGreaterEqual(rates[-1], 0.95)


def binomial_band(rate, trials):
    ''' two standard deviations of a success rate, floored for rates near 0 or 1 '''
    return 2 * np.sqrt(np.maximum(rate * (1 - rate), 1.0 / trials) / trials)


def rates(kind_config, trials, **overrides):
    cfg = utils.load_config(kind_config)
    for key, value in overrides.items():
        section, name = key.split("__")
        setattr(cfg[section], name, value)
    spec = EnsembleSpec.from_config(cfg)
    reports = run_benchmark(cfg.BENCHMARK.KIND, cfg.BENCHMARK.GRID, trials, spec, cfg)
    return np.array([r.success_rate_mean_criterion for r in reports])


class TestBenchmarkOrdering(unittest.TestCase):
    def assertNotWorse(self, a, b, trials, msg=None):
        ''' a >= b up to the combined two-sigma band of both rates '''
        tolerance = np.sqrt(binomial_band(a, trials) ** 2 + binomial_band(b, trials) ** 2)
        self.assertTrue(np.all(a >= b - tolerance), "{} vs {} {}".format(a, b, msg or ""))

    def test_ssmpm_against_mpm(self):
        trials = utils.trials(40, 500)
        grid = (100.0,)
        mpm = rates("benchmarks/noise_snr_d2.yaml", trials, BENCHMARK__GRID=grid)
        ssmpm = rates("benchmarks/noise_snr_d2.yaml", trials, BENCHMARK__GRID=grid,
                      BENCHMARK__ESTIMATOR="ssmpm")
        if env_tests.full_tests():
            self.assertGreaterEqual(ssmpm[0], mpm[0] - 0.02)
        else:
            self.assertNotWorse(ssmpm, mpm, trials)

    def test_noise_d2_against_d3(self):
        trials = utils.trials(40, 200)
        grid = (100.0,)
        d2 = rates("benchmarks/noise_snr_d2.yaml", trials, BENCHMARK__GRID=grid)
        d3 = rates("benchmarks/noise_snr_d3.yaml", trials, BENCHMARK__GRID=grid)
        self.assertNotWorse(d2, d3, trials)

    def test_additional_field_d2_against_d3(self):
        trials = utils.trials(20, 200)
        grid = (0.0, 0.01, 0.1)
        d2 = rates("benchmarks/additional_field.yaml", trials, BENCHMARK__GRID=grid)
        d3 = rates("benchmarks/additional_field.yaml", trials, BENCHMARK__GRID=grid,
                   ENSEMBLE__D=3)
        self.assertEqual(d2[0], 1.0)
        self.assertNotWorse(d2, d3, trials)

    def test_perturb_m_decreasing(self):
        trials = utils.trials(40, 200)
        r = rates("benchmarks/perturb_M.yaml", trials, BENCHMARK__GRID=(0.0, 0.01, 0.1))
        self.assertEqual(r[0], 1.0)
        band = binomial_band(r, trials)
        self.assertTrue(np.all(np.diff(r) <= band[1:]), r)
        self.assertLess(r[-1], r[0])


class TestHelpers(unittest.TestCase):
    def test_trial_rng(self):
        a = trial_rng(7, 0, 3).normal(size=4)
        b = trial_rng(7, 0, 3).normal(size=4)
        c = trial_rng(7, 1, 3).normal(size=4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_k_difference_error(self):
        K = np.diag([0.0, 1.0, 3.0])
        np.testing.assert_allclose(
            k_difference_error(K, K + 5 * np.eye(3)), (0.0, 0.0), atol=1e-12
        )
        # the mirror image -conj(K) has the same differences in reverse
        np.testing.assert_allclose(k_difference_error(K, -K), (0.0, 0.0), atol=1e-12)
        mean_rel, max_rel = k_difference_error(K, np.diag([0.0, 1.1, 3.0]))
        self.assertAlmostEqual(max_rel, 0.1)
        self.assertAlmostEqual(mean_rel, 0.05)


if __name__ == "__main__":
    unittest.main()
