import numpy as np

from cmps_tomo.modeling.transfer import as_square_matrix, kronecker_sum
from cmps_tomo.structures.cmps import AuxiliaryHamiltonian
from cmps_tomo.structures.transfer import TransferMatrix, conjugate_symmetric, conjugation_index
from cmps_tomo.utils.errors import DimensionError, PreconditionError


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def add_noise(ct, ns, rng=None):
    """
    White Gaussian noise with std = mean(|values|) / snr. Real tensors get
    real noise; complex ones get independent real and imaginary parts with
    std / sqrt(2) each. snr = inf returns the tensor unchanged.
    """
    if np.isinf(ns.snr):
        return ct
    rng = _rng(ns.seed if rng is None else rng)
    std = float(np.mean(np.abs(ct.values))) / ns.snr
    shape = ct.values.shape
    if ct.is_real():
        noise = rng.normal(0.0, std, shape)
    else:
        part = std / np.sqrt(2)
        noise = rng.normal(0.0, part, shape) + 1j * rng.normal(0.0, part, shape)
    return ct.with_values(ct.values + noise)


def perturb_M(M, kappa, eps, seed=0):
    """
    M + eps * Delta with Delta = (Delta0 + Xi conj(Delta0) Xi) / 2, first
    row zero, and Delta0 complex Gaussian with std 2^(-1/2) mean|M| per part.
    """
    M = np.asarray(M, dtype=complex)
    if eps < 0:
        raise PreconditionError("eps should be non-negative, got {}".format(eps))
    if not np.all(M[0, :] == 1):
        raise PreconditionError("M should be normalized to a first row of ones")
    rng = _rng(seed)
    scale = float(np.mean(np.abs(M))) / np.sqrt(2)
    delta = rng.normal(0.0, scale, M.shape) + 1j * rng.normal(0.0, scale, M.shape)
    delta = 0.5 * (delta + conjugate_symmetric(delta, conjugation_index(M.shape[0], kappa)))
    delta[0, :] = 0.0
    return M + eps * delta


def dissipator(R):
    """conj(R) (x) R - conj(R^dag R) (x) 1 / 2 - 1 (x) R^dag R / 2."""
    R = as_square_matrix("R", R)
    RdR = R.conj().T @ R
    eye = np.eye(R.shape[0])
    return np.kron(R.conj(), R) - 0.5 * np.kron(RdR.conj(), eye) - 0.5 * np.kron(eye, RdR)


def additional_field_transfer(K, R1, R2, eps):
    """
    Transfer matrix of a two-field state observed through the first field,

        T = conj(-iK) (x) 1 + 1 (x) (-iK) + D(R1) + eps D(R2),

    shifted so that its largest real part is 0.
    """
    K = AuxiliaryHamiltonian(K).K
    R1 = as_square_matrix("R1", R1)
    R2 = as_square_matrix("R2", R2)
    if not K.shape == R1.shape == R2.shape:
        raise DimensionError(
            "K, R1 and R2 should have equal shapes, got {}, {} and {}".format(
                K.shape, R1.shape, R2.shape
            )
        )
    if eps < 0:
        raise PreconditionError("eps should be non-negative, got {}".format(eps))
    d = K.shape[0]
    T = TransferMatrix(kronecker_sum(-1j * K) + dissipator(R1) + eps * dissipator(R2), d)
    return T.shifted(T.max_real_part())
