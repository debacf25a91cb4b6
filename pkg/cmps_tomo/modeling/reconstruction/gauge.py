import logging

import numpy as np
import scipy.linalg

from cmps_tomo.modeling.transfer import gauge_residual, stationarize, transfer_from_qr
from cmps_tomo.structures.cmps import CMPS
from cmps_tomo.utils.errors import GaugeFixingError

logger = logging.getLogger("cmps_tomo.reconstruction")


def _relative_residual(Q, R):
    scale = max(float(np.max(np.abs(Q))), float(np.max(np.abs(R))) ** 2, np.finfo(float).tiny)
    return gauge_residual(Q, R) / scale


def left_fixed_point(Q, R):
    """
    Hermitian positive definite L with Q^dag L + L Q + R^dag L R = 0, the
    left eigenvector of T at its leading eigenvalue, trace normalized to 1.
    """
    T = transfer_from_qr(Q, R)
    d = Q.shape[0]
    eigenvalues, vectors = scipy.linalg.eig(T.T)
    lead = int(np.argmax(eigenvalues.real))
    L = vectors[:, lead].reshape(d, d)
    trace = np.trace(L)
    L = L * (abs(trace) / trace)
    L = 0.5 * (L + L.conj().T)
    w, U = np.linalg.eigh(L)
    w = np.clip(w, np.finfo(float).eps * w.max(), None)
    L = (U * w) @ U.conj().T
    return L / np.trace(L).real


def fix_gauge(Q, R, tol=1e-10, max_iter=200):
    """
    Transform (Q, R) into the gauge with Q + Q^dag + R^dag R = 0.

    After stationarizing, the left fixed point L = S^2 of the transfer
    matrix gives (S Q S^-1, S R S^-1), which satisfies the condition. The step
    is repeated until the relative residual drops below `tol`.

    Returns:
        Q, R (arrays), residual (float)
    """
    state = stationarize(CMPS(Q, R))
    Q, R = np.array(state.Q), np.array(state.R)
    residual = _relative_residual(Q, R)
    for it in range(max_iter):
        if residual < tol:
            return Q, R, residual
        S = scipy.linalg.sqrtm(left_fixed_point(Q, R))
        Sinv = np.linalg.inv(S)
        state = stationarize(CMPS(S @ Q @ Sinv, S @ R @ Sinv))
        Q, R = np.array(state.Q), np.array(state.R)
        residual = _relative_residual(Q, R)
        logger.debug("Gauge iteration {}: residual {:.3e}".format(it + 1, residual))
    if residual < tol:
        return Q, R, residual
    raise GaugeFixingError(
        "gauge fixing did not converge in {} iterations, residual {:.3e}".format(
            max_iter, residual
        )
    )


def extract_K(rc, tol=1e-10, max_iter=200):
    """
    K = i (Q + R^dag R / 2) after gauge fixing the reconstructed model. Only
    differences of its eigenvalues are meaningful.

    Returns:
        K (array): Hermitian d x d
        defect (float): max |K - K^dag| / max |K| before hermitization
    """
    Q, R, _ = fix_gauge(rc.Q_rec, rc.R_rec, tol=tol, max_iter=max_iter)
    K = 1j * (Q + 0.5 * R.conj().T @ R)
    scale = max(float(np.max(np.abs(K))), np.finfo(float).tiny)
    defect = float(np.max(np.abs(K - K.conj().T))) / scale
    return 0.5 * (K + K.conj().T), defect


def k_differences(K):
    """Sorted eigenvalues of K relative to the smallest one."""
    w = np.linalg.eigvalsh(np.asarray(K, dtype=complex))
    return w[1:] - w[0]
