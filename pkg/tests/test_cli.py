import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

import utils
from cmps_tomo.engine.commands import main
from cmps_tomo.modeling.correlators import decay_num_samples, spectral_data
from cmps_tomo.utils.serialization import cmps_to_dict, load_tensor, save_json


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.state = self.path("state.json")
        save_json(cmps_to_dict(utils.fixed_state()), self.state)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def correlate(self, n, name, *extra):
        code, _, _ = run("correlate", "--state", self.state, "--n", n, "--N", 60,
                         "-o", self.path(name), *extra)
        self.assertEqual(code, 0)
        return self.path(name)

    def test_generate_reproducible(self):
        for name in ("a.json", "b.json"):
            code, out, _ = run("generate", "--d", 2, "--seed", 42, "--sigma", 0.5,
                               "-o", self.path(name))
            self.assertEqual(code, 0)
            self.assertIn("|rho|", out)
        with open(self.path("a.json"), "rb") as a, open(self.path("b.json"), "rb") as b:
            self.assertEqual(a.read(), b.read())
        run("generate", "--d", 2, "--seed", 43, "--sigma", 0.5, "-o", self.path("c.json"))
        with open(self.path("a.json"), "rb") as a, open(self.path("c.json"), "rb") as c:
            self.assertNotEqual(a.read(), c.read())

    def test_usage_errors(self):
        self.assertEqual(run("generate", "--d", 0)[0], 2)
        self.assertEqual(run("no-such-command")[0], 2)
        self.assertEqual(run("generate", "--opts", "ESTIMATOR.NO_SUCH_KEY", 1)[0], 2)

    def test_reconstruct(self):
        c3 = self.correlate(3, "c3.json")
        c2 = self.correlate(2, "c2.json")
        out = self.path("rec.json")
        code, _, err = run("reconstruct", "--c3", c3, "--c2", c2, "--order", 4, "-o", out)
        self.assertEqual(code, 0, err)
        with open(self.path("rec_quality.json")) as f:
            quality = json.load(f)
        self.assertEqual(quality["kind"], "quality_report")
        self.assertEqual(quality["order"], 4)
        self.assertLess(quality["kronecker_defect"], 1e-6)
        self.assertLess(quality["spectrum_deviation"], 1e-6)
        self.assertEqual(len(quality["hankel_singular_values"]), 6)
        self.assertEqual(quality["hankel_singular_values"][0], 1.0)

        code, out_text, _ = run("predict", "--model", out, "--compare", c3,
                                "-o", self.path("p3.json"))
        self.assertEqual(code, 0)
        self.assertIn("relative sup deviation", out_text)
        predicted = load_tensor(self.path("p3.json"))
        observed = load_tensor(c3)
        deviation = np.abs(predicted.values - observed.values).max()
        self.assertLess(deviation, 1e-6 * np.abs(observed.values).max())

        self.assertEqual(run("validate", out, c3, self.path("rec_quality.json"))[0], 0)

    def test_md_only_and_csv(self):
        c3 = self.correlate(3, "c3.json")
        c2 = self.correlate(2, "c2.csv", "--amputate")
        out = self.path("md.json")
        code, _, err = run("reconstruct", "--c3", c3, "--c2", c2, "--amputated",
                           "--estimator", "mpm", "--order", 4, "--md-only", "-o", out)
        self.assertEqual(code, 0, err)
        code, out_text, _ = run("validate", out)
        self.assertIn("md_model", out_text)
        code, _, _ = run("predict", "--model", out, "--n", 4, "--N", 5,
                         "-o", self.path("c4.json"))
        self.assertEqual(code, 0)
        self.assertEqual(load_tensor(self.path("c4.json")).values.shape, (5, 5, 5))

    def test_corrupted_input(self):
        bad = self.path("bad.json")
        with open(bad, "w") as f:
            f.write("{\"n\": 3, \"values\": [")
        self.assertEqual(run("reconstruct", "--c3", bad)[0], 1)
        self.assertEqual(run("reconstruct", "--c3", self.path("missing.json"))[0], 1)
        code, out, _ = run("validate", self.state, bad)
        self.assertEqual(code, 1)
        self.assertIn("invalid", out)

    def test_grid_mismatch(self):
        c3 = self.correlate(3, "c3.json")
        c2 = self.correlate(2, "c2.json", "--delta-tau", 0.123)
        self.assertEqual(run("reconstruct", "--c3", c3, "--c2", c2, "--order", 4)[0], 3)

    def test_noise(self):
        c2 = self.correlate(2, "c2.json")
        noisy = self.path("noisy.json")
        code = run("noise", "--input", c2, "--snr", 100, "--seed", 1, "-o", noisy)[0]
        self.assertEqual(code, 0)
        a, b = load_tensor(c2), load_tensor(noisy)
        self.assertGreater(np.abs(a.values - b.values).max(), 0.0)

    def test_benchmark(self):
        out = self.path("bench.json")
        code, text, _ = run("benchmark", "--kind", "perturb_M", "--d", 2, "--grid", 0, 0.1,
                            "--trials", 3, "--seed", 1, "-o", out)
        self.assertEqual(code, 0)
        with open(out) as f:
            reports = json.load(f)["reports"]
        self.assertEqual(len(reports), 2)
        self.assertEqual(reports[0]["success_rate_mean_criterion"], 1.0)
        self.assertTrue(os.path.exists(self.path("bench.csv")))
        cfg = utils.load_config_from_file(self.path("bench_config.yaml"))
        self.assertEqual(cfg.BENCHMARK.KIND, "perturb_M")
        self.assertEqual(cfg.SEED, 1)

    def test_analyze(self):
        out = self.path("structure.json")
        code, text, _ = run("analyze", "--state", self.state, "-o", out)
        self.assertEqual(code, 0)
        self.assertIn("blocks: 1, degenerate pairs: 0", text)
        with open(out) as f:
            self.assertEqual(json.load(f)["kind"], "structure_report")
        self.assertEqual(run("validate", out)[0], 0)

    def write(self, name, obj):
        save_json(obj, self.path(name))
        return self.path(name)

    def test_validate_malformed_reports(self):
        structure = {"kind": "structure_report", "d": 2, "blocks": 1, "double_eigenvalues": 0}
        quality = {"kind": "quality_report", "order": 1, "kronecker_defect": 1e-12,
                   "spectrum_deviation": 0.0, "poles": [[0.0, 0.0]]}
        self.assertEqual(run("validate", self.write("s.json", structure),
                             self.write("q.json", quality))[0], 0)
        malformed = [
            {k: v for k, v in structure.items() if k != "blocks"},
            dict(structure, d=0),
            dict(structure, double_eigenvalues="two"),
            {k: v for k, v in quality.items() if k != "poles"},
            dict(quality, kronecker_defect=-1.0),
            dict(quality, order=2),
            dict(quality, poles=[1.0, 2.0]),
        ]
        for i, obj in enumerate(malformed):
            code, out, _ = run("validate", self.write("bad{}.json".format(i), obj))
            self.assertEqual(code, 1, obj)
            self.assertIn("invalid", out)

    def test_eigenvector_condition_from_config(self):
        code, _, _ = run("correlate", "--state", self.state, "--n", 2, "-o", self.path("c.json"),
                         "--opts", "TRANSFER.MAX_EIGENVECTOR_CONDITION", 1.0)
        self.assertEqual(code, 3)

    def test_samples_from_decay(self):
        out = self.path("c2.json")
        code, _, err = run("correlate", "--state", self.state, "--n", 2, "-o", out,
                           "--opts", "SAMPLING.NUM_SAMPLES", 0)
        self.assertEqual(code, 0, err)
        ct = load_tensor(out)
        sd = spectral_data(utils.fixed_state())
        self.assertEqual(ct.N, decay_num_samples(sd.poles, ct.delta_tau, 4.0, 12, 1000))
        slowest = np.sort(-sd.poles.real)[1]
        self.assertGreaterEqual(ct.N * ct.delta_tau * slowest, 4.0)


if __name__ == "__main__":
    unittest.main()
