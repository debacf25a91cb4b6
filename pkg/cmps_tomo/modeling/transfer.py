import logging

import numpy as np

from cmps_tomo.structures.cmps import CMPS, AuxiliaryHamiltonian
from cmps_tomo.structures.transfer import TransferMatrix
from cmps_tomo.utils.errors import DimensionError, GaugeConditionError, SingularGaugeError


def as_square_matrix(name, A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("{} should be a square matrix, got shape {}".format(name, A.shape))
    return A


def kronecker_sum(Q):
    """conj(Q) (x) 1 + 1 (x) Q."""
    Q = as_square_matrix("Q", Q)
    eye = np.eye(Q.shape[0])
    return np.kron(Q.conj(), eye) + np.kron(eye, Q)


def transfer_from_qr(Q, R):
    Q = as_square_matrix("Q", Q)
    R = as_square_matrix("R", R)
    if Q.shape != R.shape:
        raise DimensionError(
            "Q and R should have the same shape, got {} and {}".format(Q.shape, R.shape)
        )
    return kronecker_sum(Q) + np.kron(R.conj(), R)


def build_transfer(state):
    """
    T = conj(Q) (x) 1 + 1 (x) Q + conj(R) (x) R in the row-major Kronecker
    layout, where the basis vector e_i (x) e_j sits at position i * d + j.
    """
    return TransferMatrix(transfer_from_qr(state.Q, state.R), state.d)


def gauge_residual(Q, R):
    Q = np.asarray(Q, dtype=complex)
    R = np.asarray(R, dtype=complex)
    return float(np.max(np.abs(Q + Q.conj().T + R.conj().T @ R)))


def q_from_kr(K, R):
    """Q = -iK - R^dag R / 2, which satisfies Q + Q^dag + R^dag R = 0."""
    K = AuxiliaryHamiltonian(K).K
    R = as_square_matrix("R", R)
    if K.shape != R.shape:
        raise DimensionError(
            "K and R should have the same shape, got {} and {}".format(K.shape, R.shape)
        )
    return -1j * K - 0.5 * R.conj().T @ R


def k_from_qr(Q, R, tol=1e-10, project=False):
    """
    K = i (Q + R^dag R / 2).

    Only defined on the gauge manifold Q + Q^dag + R^dag R = 0. Off the
    manifold the call fails with the residual, unless `project` is set, in
    which case the Hermitian part of i (Q + R^dag R / 2) is returned.
    The tolerance is relative to max(|Q|, |R^dag R|).
    """
    Q = as_square_matrix("Q", Q)
    R = as_square_matrix("R", R)
    if Q.shape != R.shape:
        raise DimensionError(
            "Q and R should have the same shape, got {} and {}".format(Q.shape, R.shape)
        )
    RdR = R.conj().T @ R
    residual = gauge_residual(Q, R)
    scale = max(float(np.max(np.abs(Q))), float(np.max(np.abs(RdR))), 1.0)
    K = 1j * (Q + 0.5 * RdR)
    if residual > tol * scale:
        if not project:
            raise GaugeConditionError(residual, tol * scale)
        logger = logging.getLogger("cmps_tomo.transfer")
        logger.warning(
            "Projecting K onto Hermitian matrices, gauge residual {:.3e}".format(residual)
        )
    K = 0.5 * (K + K.conj().T)
    return AuxiliaryHamiltonian(K)


def gauge_transform(state, G, max_condition=1e12):
    """(G^-1 Q G, G^-1 R G). Observables and the spectrum of T are unchanged."""
    G = as_square_matrix("G", G)
    if G.shape != (state.d, state.d):
        raise DimensionError(
            "G should have shape ({0}, {0}), got {1}".format(state.d, G.shape)
        )
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularGaugeError("gauge matrix is singular, condition number {:.3e}".format(cond))
    Ginv = np.linalg.inv(G)
    return CMPS(Ginv @ state.Q @ G, Ginv @ state.R @ G, meta=state.meta)


def stationarize(state):
    """
    Shift Q by a real multiple of the identity so that the largest real part
    of the spectrum of T becomes 0. T(Q - c 1, R) = T(Q, R) - 2c 1, hence
    c = max Re l(T) / 2. A stored K is shifted along (K - ic 1 is no longer
    Hermitian), so it is dropped unless c vanishes.
    """
    c = 0.5 * build_transfer(state).max_real_part()
    if c == 0.0:
        return state
    Q = state.Q - c * np.eye(state.d)
    K = state.K if abs(c) <= 1e-12 * max(float(np.max(np.abs(state.Q))), 1e-300) else None
    return CMPS(Q, state.R, K=K, meta=state.meta)
