from yacs.config import CfgNode as CN


# -----------------------------------------------------------------------------
# Convention about tolerances
# -----------------------------------------------------------------------------
# Tolerances named *_TOL are relative to the magnitude of the quantity they are
# compared against, unless the comment next to them says otherwise.
# Indices (poles, residues, matrix entries) are 0-based everywhere in the code;
# the stationary pole is always index 0.

# -----------------------------------------------------------------------------
# Config definition
# -----------------------------------------------------------------------------

_C = CN()

# -----------------------------------------------------------------------------
# TRANSFER
# -----------------------------------------------------------------------------
_C.TRANSFER = CN()
# An eigenvalue counts as real when |Im l| <= REALNESS_TOL * (1 + |l|)
_C.TRANSFER.REALNESS_TOL = 1e-9
# Minimal pairwise eigenvalue gap (relative to max |l|) before the spectrum is
# treated as degenerate
_C.TRANSFER.DEGENERACY_TOL = 1e-8
# X with condition number above this is reported as non-diagonalizable
_C.TRANSFER.MAX_EIGENVECTOR_CONDITION = 1e12

# -----------------------------------------------------------------------------
# SAMPLING
# -----------------------------------------------------------------------------
_C.SAMPLING = CN()
# Samples per axis of a correlation tensor; 0 picks enough samples to cover
# DECAY_PERIODS decay times of the slowest non-stationary pole, at least
# 3 d^2 and at most MAX_SAMPLES
_C.SAMPLING.NUM_SAMPLES = 60
_C.SAMPLING.DECAY_PERIODS = 4.0
_C.SAMPLING.MAX_SAMPLES = 1000
# Grid spacing; 0.0 picks NYQUIST_FRACTION * pi / max|l|
_C.SAMPLING.DELTA_TAU = 0.0
_C.SAMPLING.NYQUIST_FRACTION = 0.5
# Refuse to sample tensors with more grid points than this
_C.SAMPLING.MAX_GRID_POINTS = 2000000

# -----------------------------------------------------------------------------
# ESTIMATOR
# -----------------------------------------------------------------------------
_C.ESTIMATOR = CN()
# One of "prony", "prony-kernel", "mpm", "ssmpm"
_C.ESTIMATOR.NAME = "ssmpm"
# Model order; 0 estimates it from the Hankel singular values
_C.ESTIMATOR.ORDER = 0
# Singular values above ORDER_THRESHOLD * sigma_1 count towards the order
_C.ESTIMATOR.ORDER_THRESHOLD = 1e-8
# Pencil parameter; 0 uses round(PENCIL_FRACTION * N)
_C.ESTIMATOR.PENCIL = 0
_C.ESTIMATOR.PENCIL_FRACTION = 0.4
# Estimate ceil(OVERESTIMATION * order) poles and keep the `order` ones with
# the largest residues. 1.0 disables pruning.
_C.ESTIMATOR.OVERESTIMATION = 1.5
# Prony systems with a condition number above this are rejected
_C.ESTIMATOR.MAX_CONDITION = 1e15
# Vandermonde designs with a condition number above this are rejected
_C.ESTIMATOR.RESIDUE_MAX_CONDITION = 1e13

# -----------------------------------------------------------------------------
# RECONSTRUCTION
# -----------------------------------------------------------------------------
_C.RECONSTRUCTION = CN()
# Relative tolerance when matching poles of different correlation orders
_C.RECONSTRUCTION.POLE_MATCH_TOL = 1e-3
# Residue denominators below ZERO_RESIDUE_TOL * max|rho| are treated as zero
_C.RECONSTRUCTION.ZERO_RESIDUE_TOL = 1e-10
# Fill unknown M entries with 0 instead of failing (visible-block workflows)
_C.RECONSTRUCTION.BLOCK_TOLERANT = False
# Relative mismatch allowed between spec(M) and {conj(r_i) r_j}
_C.RECONSTRUCTION.PAIRING_TOL = 1e-6
# Gauge invariant Kronecker-sum defect above which Q extraction fails
_C.RECONSTRUCTION.MAX_KRONECKER_DEFECT = 1e-6
_C.RECONSTRUCTION.SYMMETRIZE_Y = True
_C.RECONSTRUCTION.RECOVER_K = True
_C.RECONSTRUCTION.GAUGE_MAX_ITER = 200
_C.RECONSTRUCTION.GAUGE_TOL = 1e-10
# Relative sup-norm deviation accepted by consistency checks
_C.RECONSTRUCTION.CONSISTENCY_THRESHOLD = 1e-2

# -----------------------------------------------------------------------------
# ENSEMBLE
# -----------------------------------------------------------------------------
_C.ENSEMBLE = CN()
_C.ENSEMBLE.D = 2
# "naive" draws Q and R, "refined" draws K and R
_C.ENSEMBLE.MODE = "refined"
_C.ENSEMBLE.MU = 0.0
_C.ENSEMBLE.SIGMA = 0.01
_C.ENSEMBLE.ETA = 1.0

# -----------------------------------------------------------------------------
# NOISE
# -----------------------------------------------------------------------------
_C.NOISE = CN()
_C.NOISE.SNR = float("inf")

# -----------------------------------------------------------------------------
# BENCHMARK
# -----------------------------------------------------------------------------
_C.BENCHMARK = CN()
# One of "noise_snr", "perturb_M", "additional_field"
_C.BENCHMARK.KIND = "noise_snr"
# SNR values, or epsilon values for the perturbation kinds
_C.BENCHMARK.GRID = (10.0, 100.0, 1000.0, 10000.0)
_C.BENCHMARK.TRIALS = 200
# Points of the sampled 2-point function in the noise benchmark
_C.BENCHMARK.NUM_SAMPLES = 200
_C.BENCHMARK.SUCCESS_THRESHOLD = 0.1
_C.BENCHMARK.ESTIMATOR = "mpm"
# Standard deviation of the entries of Q, R (perturb_M) or K, R1, R2
# (additional_field)
_C.BENCHMARK.MATRIX_SIGMA = 1.0
# Number of worker threads; CMPS_TOMO_THREADS caps it
_C.BENCHMARK.NUM_WORKERS = 4

# -----------------------------------------------------------------------------
# Misc options
# -----------------------------------------------------------------------------
_C.SEED = 0
_C.OUTPUT_DIR = "."
