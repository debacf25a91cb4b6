import unittest

import numpy as np

import utils
from cmps_tomo.config import cfg as g_cfg
from cmps_tomo.modeling.correlators import (
    amputate,
    residue_tensor,
    sample,
    spectral_data,
    synthesize,
)
from cmps_tomo.modeling.matcher import PoleMatcher, pair_conjugates
from cmps_tomo.modeling.reconstruction.extract_m import extract_M, normalize_md
from cmps_tomo.modeling.reconstruction.extract_rq import (
    extract_Q,
    extract_R,
    kronecker_sum_defect,
    kronecker_sum_readout,
    pairing_mismatch,
    reference_index,
)
from cmps_tomo.modeling.reconstruction.gauge import (
    extract_K,
    fix_gauge,
    k_differences,
    left_fixed_point,
)
from cmps_tomo.modeling.reconstruction.pipeline import reconstruct
from cmps_tomo.modeling.reconstruction.wick import consistency_check, wick_predict
from cmps_tomo.modeling.spectral.hankel import build_hankel, estimate_order
from cmps_tomo.modeling.spectral.pole_estimation import estimate_poles
from cmps_tomo.modeling.spectral.residues import project_average, solve_residues
from cmps_tomo.modeling.transfer import gauge_residual, kronecker_sum, transfer_from_qr
from cmps_tomo.structures.cmps import CMPS
from cmps_tomo.structures.correlation_tensor import CorrelationTensor
from cmps_tomo.structures.md_model import MDModel, ReconstructedCMPS
from cmps_tomo.structures.poles import ResidueModel
from cmps_tomo.utils.errors import (
    GridMismatchError,
    ModelOrderError,
    PipelineError,
    PoleMatchingError,
    PreconditionError,
    UnknownEntriesError,
)


def set_distance(a, b):
    """max |a_k - b_match(k)| after greedy matching."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b[PoleMatcher(np.inf)(a, b)])))


def exact_models(sd):
    rm3 = ResidueModel(sd.poles, residue_tensor(sd.M, 3), 3)
    rm2 = ResidueModel(sd.poles, residue_tensor(sd.M, 2), 2)
    return rm3, rm2


def make_cfg(**estimator):
    cfg = g_cfg.clone()
    for key, value in estimator.items():
        setattr(cfg.ESTIMATOR, key, value)
    cfg.freeze()
    return cfg


class TestMatcher(unittest.TestCase):
    def test_permutation(self):
        reference = np.array([0.0, -1.0 + 1j, -1.0 - 1j])
        candidates = np.array([-1.0 - 1j + 1e-6, 1e-7, -1.0 + 1j])
        np.testing.assert_array_equal(PoleMatcher(1e-3).permutation(reference, candidates),
                                      [1, 2, 0])

    def test_unmatched(self):
        matcher = PoleMatcher(1e-3)
        matches = matcher([0.0, -1.0], [0.0, -2.0])
        self.assertEqual(matches[1], PoleMatcher.UNMATCHED)
        with self.assertRaises(PoleMatchingError):
            matcher.permutation([0.0, -1.0], [0.0, -2.0])
        with self.assertRaises(PoleMatchingError):
            matcher.permutation([0.0, -1.0], [0.0])

    def test_pair_conjugates(self):
        pairs = pair_conjugates([1.0 + 2j, -3.0, 1.0 - 2j])
        self.assertEqual(sorted(tuple(sorted(p)) for p in pairs), [(0, 2), (1, 1)])


class TestExtractM(unittest.TestCase):
    def test_matches_forward_model(self):
        sd = spectral_data(utils.random_state(2, 4))
        rm3, rm2 = exact_models(sd)
        expected = normalize_md(sd)
        for md in (extract_M(rm3, rm2), extract_M(rm3)):
            scale = np.abs(expected.M).max()
            np.testing.assert_allclose(md.M, expected.M, atol=1e-9 * scale)
            self.assertAlmostEqual(md.Mhat11, sd.density, delta=1e-10 * sd.density)
            self.assertLess(md.get_field("symmetry_defect"), 1e-8)

    def test_shuffled_two_point_model(self):
        sd = spectral_data(utils.fixed_state())
        rm3, rm2 = exact_models(sd)
        md = extract_M(rm3, rm2.permuted([2, 0, 3, 1]))
        np.testing.assert_allclose(md.M, normalize_md(sd).M, atol=1e-9)

    def test_toy_matrix(self):
        M = np.array([[1.0, 1.0], [2.0, 3.0]])
        toy = MDModel([0.0, -1.0], M, 1.0, 2)
        md = extract_M(wick_predict(toy, 3), wick_predict(toy, 2))
        np.testing.assert_allclose(md.M, M, atol=1e-12)
        self.assertAlmostEqual(md.Mhat11, 1.0)

    def test_higher_orders(self):
        sd = spectral_data(utils.fixed_state())
        rm3, _ = exact_models(sd)
        rm4 = ResidueModel(sd.poles, residue_tensor(sd.M, 4), 4)
        md = extract_M(rm3, higher=rm4)
        np.testing.assert_allclose(md.M, normalize_md(sd).M, atol=1e-9)
        self.assertEqual(md.get_field("prescriptions"), 5)

    def test_single_dimension(self):
        sd = spectral_data(CMPS([[-0.32]], [[0.8]]))
        md = extract_M(*exact_models(sd))
        np.testing.assert_allclose(md.M, [[1.0]])
        self.assertAlmostEqual(md.Mhat11, 0.64)

    def test_unknown_entries(self):
        toy = MDModel([0.0, -1.0], np.array([[1.0, 1.0], [0.0, 0.5]]), 1.0, 2)
        rm3, rm2 = wick_predict(toy, 3), wick_predict(toy, 2)
        with self.assertRaises(UnknownEntriesError) as ctx:
            extract_M(rm3, rm2)
        self.assertEqual(ctx.exception.entries, [(1, 1)])
        md = extract_M(rm3, rm2, block_tolerant=True)
        self.assertTrue(md.has_unknown_entries())
        self.assertEqual(md.M[1, 1], 0.0)

    def test_mismatched_poles(self):
        sd = spectral_data(utils.fixed_state())
        rm3, rm2 = exact_models(sd)
        shifted = ResidueModel(sd.poles - 0.5, rm2.residues, 2)
        with self.assertRaises(PoleMatchingError):
            extract_M(rm3, shifted)

    def test_wrong_orders(self):
        sd = spectral_data(utils.fixed_state())
        rm3, rm2 = exact_models(sd)
        with self.assertRaises(PreconditionError):
            extract_M(rm2, rm3)


class TestWick(unittest.TestCase):
    def test_prediction_identity(self):
        for d in (2, 3):
            sd = spectral_data(utils.random_state(d, 7))
            md = extract_M(*exact_models(sd))
            for n in (4, 5):
                expected = residue_tensor(sd.M, n)
                scale = np.abs(expected).max()
                np.testing.assert_allclose(wick_predict(md, n).residues, expected,
                                           atol=1e-10 * scale)

    def test_consistency(self):
        sd, c4 = utils.sampled(utils.fixed_state(), 4, 8)
        md = normalize_md(sd)
        report = consistency_check(md, c4)
        self.assertTrue(report["passed"])
        self.assertLess(report["sup_deviation"], 1e-6)

        other = sample(spectral_data(utils.random_state(2, 9)), 4, 8, c4.delta_tau)
        report = consistency_check(md, other)
        self.assertFalse(report["passed"])
        self.assertGreater(report["sup_deviation"], 0.1)

    def test_amputated_observation(self):
        sd, c2 = utils.sampled(utils.fixed_state(), 2, 30)
        report = consistency_check(normalize_md(sd), amputate(c2, sd.density))
        self.assertLess(report["sup_deviation"], 1e-6)

    def test_aliased_grid(self):
        sd = spectral_data(utils.fixed_state())
        c2 = sample(sd, 2, 10, 1.5 * np.pi / np.abs(sd.poles.imag).max())
        with self.assertRaises(GridMismatchError):
            consistency_check(normalize_md(sd), c2)


class TestExtractRQ(unittest.TestCase):
    def test_r_spectrum(self):
        state = utils.random_state(2, 2)
        md = normalize_md(spectral_data(state))
        R_rec, Y, O = extract_R(md)
        r_rec = np.diag(R_rec)
        self.assertGreater(r_rec[0].real, 0)
        self.assertEqual(r_rec[0].imag, 0)
        w = np.linalg.eigvals(np.asarray(state.R))
        k = int(np.argmin(np.abs(np.abs(w) - r_rec[0].real)))
        w = w * np.exp(-1j * np.angle(w[k]))
        self.assertLess(min(set_distance(w, r_rec), set_distance(w.conj(), r_rec)), 1e-8)
        self.assertLess(pairing_mismatch(md, R_rec, Y, O), 1e-8)

    def test_transfer_spectrum(self):
        for seed in range(utils.trials(3, 20)):
            md = normalize_md(spectral_data(utils.random_state(2, seed)))
            R_rec, Y, O = extract_R(md)
            Q_rec, defect = extract_Q(md, Y, O)
            self.assertLess(defect, 1e-8)
            rebuilt = np.linalg.eigvals(transfer_from_qr(Q_rec, R_rec))
            scale = np.abs(md.poles).max()
            self.assertLess(set_distance(md.poles, rebuilt), 1e-7 * scale)
            self.assertEqual(Q_rec[0, 0].imag, 0.0)

    def test_kronecker_readout(self):
        Q = np.array([[-0.7, 0.2 + 0.1j], [0.4j, -1.1 + 0.3j]])
        Q_read = kronecker_sum_readout(kronecker_sum(Q), 2)
        np.testing.assert_allclose(Q_read, Q, atol=1e-14)
        self.assertLess(kronecker_sum_defect(kronecker_sum(Q), Q), 1e-14)
        # the diagonal gauge diag(a) of Q acts on the Kronecker sum as diag(conj(a) (x) a)
        a = np.array([1.0, 2.0 + 1.0j])
        G = np.diag(np.kron(a.conj(), a))
        S = np.linalg.solve(G, kronecker_sum(Q) @ G)
        self.assertLess(kronecker_sum_defect(S, kronecker_sum_readout(S, 2)), 1e-12)

    def test_defect_linear_in_perturbation(self):
        Q = np.array([[-0.7, 0.2 + 0.1j], [0.4j, -1.1 + 0.3j]])
        rng = np.random.default_rng(3)
        for eps in (1e-12, 1e-9):
            noise = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            S = kronecker_sum(Q) + eps * noise
            defect = kronecker_sum_defect(S, kronecker_sum_readout(S, 2))
            self.assertLess(defect, 100 * eps)
            self.assertGreater(defect, 0.01 * eps)

    def test_reference_tie_break(self):
        # |4i| = |4|: equal moduli are ordered by angle
        self.assertEqual(reference_index([4.0j, 1.0, 4.0, -4.0j]), 2)
        self.assertEqual(reference_index([4.0 * np.exp(0.3j), 4.0 * (1 - 1e-12), 3.0]), 1)
        self.assertEqual(reference_index([-4.0, 4.0 * np.exp(-2.0j)]), 1)
        self.assertEqual(reference_index([5.0j, 4.0]), 0)

    def test_reference_is_real_for_permuted_spectrum(self):
        md = normalize_md(spectral_data(utils.fixed_state()))
        m = np.linalg.eigvals(md.Mhat)
        for shift in range(m.size):
            rolled = np.roll(m, shift)
            ref = rolled[reference_index(rolled)]
            self.assertLess(abs(ref.imag), 1e-8 * abs(ref))
            self.assertGreater(ref.real, 0)

    def test_non_square_model(self):
        md = MDModel([0.0, -1.0, -2.0], np.ones((3, 3)), 1.0, 3)
        with self.assertRaises(ModelOrderError):
            extract_R(md)


class TestGauge(unittest.TestCase):
    def test_diagonal_k(self):
        K = np.diag([1.0, 2.0])
        R = np.diag([0.5, 1.0j])
        Q = -1j * K - 0.5 * R.conj().T @ R
        K_rec, defect = extract_K(ReconstructedCMPS(R, Q))
        np.testing.assert_allclose(k_differences(K_rec), [1.0], atol=1e-7)
        self.assertLess(defect, 1e-10)
        # a shift of K and an imaginary shift of Q only move K by a multiple of 1
        K_rec, _ = extract_K(ReconstructedCMPS(R, Q - 1j * 0.7 * np.eye(2)))
        np.testing.assert_allclose(k_differences(K_rec), [1.0], atol=1e-7)

    def test_without_field(self):
        K0 = np.array([[0.3, 0.1j], [-0.1j, -0.2]])
        K_rec, _ = extract_K(ReconstructedCMPS(np.zeros((2, 2)), -1j * K0))
        np.testing.assert_allclose(k_differences(K_rec), k_differences(K0), atol=1e-10)

    def test_fix_gauge(self):
        state = utils.fixed_state()
        G = np.array([[1.0, 0.4 - 0.2j], [0.1j, 0.7]])
        Ginv = np.linalg.inv(G)
        Q, R, residual = fix_gauge(Ginv @ state.Q @ G, Ginv @ state.R @ G)
        self.assertLess(residual, 1e-10)
        self.assertLess(gauge_residual(Q, R), 1e-8)
        K = 1j * (Q + 0.5 * R.conj().T @ R)
        np.testing.assert_allclose(k_differences(0.5 * (K + K.conj().T)),
                                   k_differences(state.K), atol=1e-7)

    def test_left_fixed_point(self):
        state = utils.fixed_state()
        L = left_fixed_point(np.asarray(state.Q), np.asarray(state.R))
        np.testing.assert_allclose(L, np.eye(2) / 2, atol=1e-10)


class TestPipeline(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.state = utils.fixed_state()
        cls.sd, cls.c3 = utils.sampled(cls.state, 3, 60)
        cls.c2 = sample(cls.sd, 2, 60, cls.c3.delta_tau)

    def check_model(self, rc, md):
        scale = np.abs(self.sd.poles).max()
        self.assertLess(set_distance(self.sd.poles, md.poles), 1e-7 * scale)
        rebuilt = spectral_data(rc.to_cmps())
        self.assertLess(set_distance(self.sd.poles, rebuilt.poles), 1e-7 * scale)
        self.assertLess(rc.quality["spectrum_deviation"], 1e-7)
        for n, N in ((2, 40), (3, 20), (4, 8)):
            truth = sample(self.sd, n, N, self.c3.delta_tau).values
            regenerated = sample(rebuilt, n, N, self.c3.delta_tau).values
            deviation = utils.mirror_distance(truth, regenerated) / np.abs(truth).max()
            self.assertLess(deviation, 1e-6, "n={}".format(n))

    def test_three_and_two_point(self):
        rc, md = reconstruct(self.c3, self.c2, make_cfg())
        self.check_model(rc, md)
        self.assertEqual(rc.quality["order"], 4)
        self.assertLess(rc.quality["kronecker_defect"], 1e-8)
        # for d = 2 the mirror image -conj(K) has the same eigenvalue difference
        true_k = k_differences(self.state.K)
        np.testing.assert_allclose(k_differences(rc.K_rec), true_k, rtol=1e-5)

    def test_three_point_only(self):
        rc, md = reconstruct(self.c3, None, make_cfg(NAME="mpm", ORDER=4))
        self.check_model(rc, md)
        self.assertIsNone(rc.quality["rms_fit_error_2"])

    def test_amputated_two_point(self):
        c2 = amputate(self.c2, self.sd.density)
        rc, md = reconstruct(self.c3, c2, make_cfg())
        self.check_model(rc, md)
        self.assertAlmostEqual(md.Mhat11, self.sd.density, delta=1e-8 * self.sd.density)

    def test_single_dimension(self):
        sd = spectral_data(CMPS([[-0.32]], [[0.8]]))
        c3 = sample(sd, 3, 10, 0.5)
        rc, md = reconstruct(c3, None, make_cfg())
        self.assertEqual(rc.d, 1)
        self.assertAlmostEqual(abs(rc.R_rec[0, 0]), 0.8, delta=1e-8)

    def test_wrong_order_names_stage(self):
        with self.assertRaises(PipelineError) as ctx:
            reconstruct(self.c3, None, make_cfg(ORDER=3))
        self.assertEqual(ctx.exception.stage, "extract_R")
        self.assertIsInstance(ctx.exception.cause, ModelOrderError)

    def test_grid_mismatch(self):
        c2 = sample(self.sd, 2, 60, 2 * self.c3.delta_tau)
        with self.assertRaises(PreconditionError):
            reconstruct(self.c3, c2, make_cfg())


class TestBlockStructure(unittest.TestCase):
    def setUp(self):
        self.poles = np.array([0.0, -0.7, -0.5 + 2.0j, -0.5 - 2.0j])
        self.M = np.array([
            [1.0, 0.6, 0.0, 0.0],
            [0.5, 0.3, 0.0, 0.0],
            [0.0, 0.0, 0.2, 0.1],
            [0.0, 0.0, 0.1, 0.2],
        ], dtype=complex)
        self.dt = 0.3

    def tensor(self, n, N):
        values = synthesize(self.poles, residue_tensor(self.M, n), N, self.dt)
        return CorrelationTensor(n, N, self.dt, values)

    def test_visible_block(self):
        c3, c2 = self.tensor(3, 30), self.tensor(2, 30)
        signal = project_average(c3)
        order = estimate_order(build_hankel(signal, 12), 1e-8)
        self.assertEqual(order, 2)
        poles = estimate_poles(signal, order, self.dt)
        self.assertLess(set_distance([0.0, -0.7], poles.lambdas), 1e-8)
        md = extract_M(solve_residues(poles, c3), solve_residues(poles, c2))
        self.assertIsNone(md.d)

        c4 = self.tensor(4, 10)
        predicted = synthesize(md.poles, wick_predict(md, 4).residues, 10, self.dt)
        self.assertLess(np.abs(predicted - c4.values).max() / np.abs(c4.values).max(), 1e-8)
        with self.assertRaises(ModelOrderError):
            extract_R(md)

    def test_pipeline_refuses(self):
        with self.assertRaises(PipelineError) as ctx:
            reconstruct(self.tensor(3, 30), self.tensor(2, 30), make_cfg())
        self.assertIsInstance(ctx.exception.cause, ModelOrderError)


if __name__ == "__main__":
    unittest.main()
