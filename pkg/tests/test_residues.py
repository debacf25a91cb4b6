import unittest

import numpy as np

import utils
from cmps_tomo.modeling.correlators import residue, residue_tensor, sample
from cmps_tomo.modeling.spectral.residues import (
    project_average,
    restore_stationary,
    solve_residues,
    vandermonde,
)
from cmps_tomo.simulation.perturbation import add_noise
from cmps_tomo.structures.correlation_tensor import CorrelationTensor
from cmps_tomo.structures.poles import PoleEstimate
from cmps_tomo.structures.specs import NoiseSpec
from cmps_tomo.utils.errors import EstimationError, PreconditionError


class TestResidues(unittest.TestCase):
    def setUp(self):
        self.sd, self.ct2 = utils.sampled(utils.random_state(2, 3), 2, 25)
        self.dt = self.ct2.delta_tau
        self.poles = PoleEstimate.from_lambdas(self.sd.poles, self.dt)

    def test_vandermonde(self):
        V = vandermonde([2.0, 0.5j], 3)
        np.testing.assert_allclose(V, [[1, 1], [2, 0.5j], [4, -0.25]])

    def test_two_point(self):
        rm = solve_residues(self.poles, self.ct2)
        expected = residue_tensor(self.sd.M, 2)
        scale = np.abs(expected).max()
        np.testing.assert_allclose(rm.residues, expected, atol=1e-8 * scale)
        self.assertLess(rm.rms_fit_error, 1e-10 * np.abs(self.ct2.values).max())
        self.assertTrue(rm.has_field("condition"))

    def test_three_point(self):
        ct3 = sample(self.sd, 3, 25, self.dt)
        rm = solve_residues(self.poles, ct3)
        scale = np.abs(residue_tensor(self.sd.M, 3)).max()
        for k1 in range(4):
            for k2 in range(4):
                self.assertLess(abs(rm.residues[k1, k2] - residue(self.sd, (k1, k2))),
                                1e-8 * scale)

    def test_delta_tau_mismatch(self):
        poles = PoleEstimate.from_lambdas(self.sd.poles, 2 * self.dt)
        with self.assertRaises(PreconditionError):
            solve_residues(poles, self.ct2)

    def test_ill_conditioned(self):
        poles = PoleEstimate([0.5, 0.5 + 1e-15], 1.0)
        ct = CorrelationTensor(2, 10, 1.0, 0.5 ** np.arange(10))
        with self.assertRaises(EstimationError):
            solve_residues(poles, ct)

    def test_restore_stationary(self):
        rm = solve_residues(PoleEstimate.from_lambdas(self.sd.poles[1:], self.dt),
                            self.ct2.with_values(self.ct2.values - self.sd.density ** 2,
                                                 amputated=True))
        full = restore_stationary(rm, self.sd.density)
        self.assertEqual(full.order, 4)
        self.assertAlmostEqual(full.residues[0], self.sd.density ** 2)


class TestProjection(unittest.TestCase):
    def setUp(self):
        self.sd, self.ct2 = utils.sampled(utils.random_state(2, 3), 2, 25)
        self.dt = self.ct2.delta_tau

    def test_same_poles(self):
        sd, ct3 = utils.sampled(utils.fixed_state(), 3, 20)
        signal = project_average(ct3)
        self.assertEqual(signal.shape, (20,))
        # a sum of the same damped exponentials: exactly fitted by the poles
        poles = PoleEstimate.from_lambdas(sd.poles, ct3.delta_tau)
        rm = solve_residues(poles, CorrelationTensor(2, 20, ct3.delta_tau, signal))
        self.assertLess(rm.rms_fit_error, 1e-9 * np.abs(signal).max())

    def test_axis_sums(self):
        ct = CorrelationTensor(3, 2, 1.0, np.array([[1.0, 2.0], [3.0, 4.0]]))
        # row sums (3, 7) plus column sums (4, 6)
        np.testing.assert_allclose(project_average(ct), [7.0, 13.0])

    def test_projection_averages_noise(self):
        ct3 = sample(self.sd, 3, 30, self.dt)
        clean = project_average(ct3)
        projected, single = [], []
        for seed in range(5):
            noisy = add_noise(ct3, NoiseSpec(100.0, seed=seed))
            projected.append(
                np.linalg.norm(project_average(noisy) - clean) / np.linalg.norm(clean))
            single.append(
                np.linalg.norm(noisy.values[:, 0] - ct3.values[:, 0])
                / np.linalg.norm(ct3.values[:, 0]))
        # 2N - 1 samples enter every projected entry
        self.assertLess(np.mean(projected), 0.5 * np.mean(single))

    def test_needs_three_points(self):
        ct = CorrelationTensor(2, 4, 1.0, np.ones(4))
        with self.assertRaises(PreconditionError):
            project_average(ct)


if __name__ == "__main__":
    unittest.main()
