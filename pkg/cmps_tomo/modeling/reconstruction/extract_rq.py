"""
R and Q in the gauge where R is diagonal.

Mhat = Mhat11 M is similar to conj(R) (x) R, whose eigenvalues are
conj(r_i) r_j at Kronecker position i * d + j. Once the r's are identified,
the eigenvectors Z of Mhat ordered by Kronecker position turn D - Mhat into
the Kronecker sum conj(Q_rec) (x) 1 + 1 (x) Q_rec, up to a diagonal column
scaling that only amounts to a diagonal gauge of Q_rec.
"""
import logging

import numpy as np
import scipy.linalg

from cmps_tomo.modeling.matcher import PoleMatcher, pair_conjugates
from cmps_tomo.modeling.transfer import kronecker_sum
from cmps_tomo.structures.transfer import permutation_matrix
from cmps_tomo.utils.errors import KroneckerDefectError, ModelOrderError, PairingError

logger = logging.getLogger("cmps_tomo.reconstruction")


def _require_d(md):
    if md.d is None:
        raise ModelOrderError(
            "{} poles is not a square number, re-estimate the model order".format(md.size)
        )
    return md.d


def _consistency(c, chosen, m, scale):
    err = 0.0
    for r in chosen:
        err += np.min(np.abs(np.conj(r) * c - m)) + np.min(np.abs(np.conj(c) * r - m))
    return err / scale


def reference_index(m, rtol=1e-9):
    """
    Index of the eigenvalue of largest modulus. Moduli within rtol of the
    largest count as tied and are ordered by |angle|, so a real positive |r_0|^2 wins
    over the complex products of equally large r's.
    """
    m = np.asarray(m, dtype=complex).reshape(-1)
    modulus = np.abs(m)
    tied = np.flatnonzero(modulus >= (1.0 - rtol) * modulus.max())
    return int(tied[np.argmin(np.abs(np.angle(m[tied])), axis=0)])


def _modulus_angle_key(scale):
    return lambda r: (-round(abs(r) / scale, 9), np.angle(r))


def _identify_r(m, d):
    """The multiset r with {conj(r_i) r_j} = m, r_0 real positive."""
    scale = float(np.max(np.abs(m)))
    ref = reference_index(m)
    if scale == 0 or abs(m[ref].imag) > 1e-6 * scale or m[ref].real <= 0:
        raise PairingError(
            "largest eigenvalue of M is {}, expected a positive real |r|^2".format(m[ref])
        )
    r_ref = np.sqrt(m[ref].real)
    if d == 1:
        return np.array([r_ref], dtype=complex)

    others = np.array([a for a in range(m.size) if a != ref])
    candidates = m[others] / r_ref
    # a true r_j has |r_j|^2 among the eigenvalues
    score = np.min(np.abs(np.abs(candidates)[:, None] ** 2 - m[None, :]), axis=1) / scale
    groups = pair_conjugates(candidates)
    group_score = [max(score[a], score[b]) for a, b in groups]
    best = np.argsort(group_score, kind="stable")[:d - 1]
    if len(best) < d - 1:
        raise PairingError("spectrum of M is too small for d={}".format(d))

    chosen = []
    mirror_fixed = False
    for g in best:
        a, b = groups[g]
        c = 0.5 * (candidates[a] + np.conj(candidates[b]))
        if abs(c.imag) <= 1e-12 * max(abs(c), 1e-300):
            chosen.append(complex(c.real))
        elif not mirror_fixed:
            # the model is only determined up to complex conjugation
            chosen.append(complex(c.real, abs(c.imag)))
            mirror_fixed = True
        else:
            options = (c, np.conj(c))
            errors = [_consistency(o, chosen, m, scale) for o in options]
            chosen.append(complex(options[int(np.argmin(errors))]))
    chosen.sort(key=_modulus_angle_key(r_ref))
    return np.array([r_ref] + chosen, dtype=complex)


def _phase_fix(z, xi):
    """e^{ia} z with Xi conj(e^{ia} z) = e^{ia} z."""
    overlap = np.vdot(z, z[xi].conj())
    return z * np.exp(0.5j * np.angle(overlap))


def _symmetrize_columns(Z, d, xi):
    """Enforce Xi conj(z_(ij)) = z_(ji) on the Kronecker-ordered eigenvectors."""
    Z = Z.copy()
    for i in range(d):
        p = i * d + i
        z = _phase_fix(Z[:, p], xi)
        Z[:, p] = 0.5 * (z + z[xi].conj())
        for j in range(i + 1, d):
            p, q = i * d + j, j * d + i
            mirror = Z[:, p][xi].conj()
            alpha = np.vdot(Z[:, q], mirror) / np.vdot(Z[:, q], Z[:, q])
            zq = alpha * Z[:, q]
            Z[:, p] = 0.5 * (Z[:, p] + zq[xi].conj())
            Z[:, q] = Z[:, p][xi].conj()
    return Z


def extract_R(md, pairing_tol=1e-6, symmetrize=True):
    """
    Diagonal R_rec and the eigenbasis of Mhat that realizes it.

    r_0 = sqrt of the largest eigenvalue of Mhat (made real positive, which
    fixes the global phase of R). The other r's are found as m / r_0 for the
    eigenvalues m whose |m / r_0|^2 is again an eigenvalue; such candidates
    come in conjugate pairs and the first complex one is taken with
    Im r >= 0. The eigenvalues are then assigned to the Kronecker products
    conj(r_i) r_j.

    Arguments:
        md (MDModel): with a square number of poles
        pairing_tol (float): allowed relative mismatch between the spectrum
            of Mhat and {conj(r_i) r_j}
        symmetrize (bool): average the eigenvectors with their conjugation
            partners

    Returns:
        R_rec (array): diagonal d x d
        Y (array): eigenvectors of Mhat
        O (array): permutation matrix, Y O is ordered by Kronecker position
    """
    d = _require_d(md)
    m, Y = scipy.linalg.eig(md.Mhat)
    r = _identify_r(m, d)

    targets = np.kron(r.conj(), r)
    perm = PoleMatcher(np.inf)(targets, m)
    scale = float(np.max(np.abs(m)))
    mismatch = float(np.max(np.abs(targets - m[perm]))) / scale
    if mismatch > pairing_tol:
        raise PairingError(
            "spectrum of M is not of the form conj(r_i) r_j: relative mismatch "
            "{:.3e} exceeds {:.1e}".format(mismatch, pairing_tol)
        )
    logger.debug("Paired the spectrum of M with relative mismatch {:.3e}".format(mismatch))

    Z = Y[:, perm] / np.linalg.norm(Y[:, perm], axis=0)
    if symmetrize:
        Z = _symmetrize_columns(Z, d, md.xi_index())
    O = permutation_matrix(perm).T
    return np.diag(r), Z @ O.T, O


def pairing_mismatch(md, R_rec, Y, O):
    """Relative deviation of diag((Y O)^-1 Mhat (Y O)) from conj(r) (x) r."""
    Z = Y @ O
    diag = np.diag(np.linalg.solve(Z, md.Mhat @ Z))
    r = np.diag(R_rec)
    scale = max(float(np.max(np.abs(diag))), np.finfo(float).tiny)
    return float(np.max(np.abs(diag - np.kron(r.conj(), r)))) / scale


def kronecker_sum_readout(S, d, symmetric=True):
    """
    Q from a matrix of the form conj(Q) (x) 1 + 1 (x) Q (up to a diagonal
    similarity), read from the blocks of the reference index 0:

        S[(0, j), (0, l)] = Q[j, l] + delta_jl conj(Q[0, 0])
        S[(j, 0), (l, 0)] = conj(Q[j, l]) + delta_jl Q[0, 0]

    with Q[0, 0] taken real. `symmetric` averages both readouts.
    """
    S = np.asarray(S, dtype=complex)
    q00 = 0.5 * S[0, 0].real
    Q = np.zeros((d, d), dtype=complex)
    for j in range(d):
        for l in range(d):
            a = S[j, l]
            if symmetric:
                a = 0.5 * (a + np.conj(S[j * d, l * d]))
            Q[j, l] = a - q00 if j == l else a
    Q[0, 0] = q00
    return Q


def kronecker_sum_defect(S, Q):
    """
    Distance of S from the Kronecker-sum structure of Q, invariant under
    diagonal similarity of S. Structural zeros and the diagonal mismatch are
    taken relative to max |S|, the mismatch of the products S[a, b] S[b, a]
    relative to max |S|^2, so all three are linear in a perturbation of S.
    """
    S = np.asarray(S, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    d = Q.shape[0]
    KS = kronecker_sum(Q)
    scale = max(float(np.max(np.abs(S))), np.finfo(float).tiny)
    i, k = np.divmod(np.arange(d * d), d)
    zero = (i[:, None] != i[None, :]) & (k[:, None] != k[None, :])
    structural = float(np.max(np.abs(S[zero]), initial=0.0))
    diagonal = float(np.max(np.abs(np.diag(S) - np.diag(KS))))
    products = np.abs(S * S.T - KS * KS.T)
    products[zero] = 0.0
    pairs = float(np.max(products)) / max(scale ** 2, np.finfo(float).tiny)
    return max(structural / scale, diagonal / scale, pairs)


def extract_Q(md, Y, O, max_defect=1e-6, check=True, symmetric=True):
    """
    Q_rec in the gauge of R_rec, read from S = (Y O)^-1 (D - Mhat) (Y O).

    Returns:
        Q_rec (array): d x d, Im Q_rec[0, 0] = 0
        defect (float): kronecker_sum_defect of S
    """
    d = _require_d(md)
    Z = np.asarray(Y) @ np.asarray(O)
    S = np.linalg.solve(Z, (np.diag(md.poles) - md.Mhat) @ Z)
    Q = kronecker_sum_readout(S, d, symmetric)
    defect = kronecker_sum_defect(S, Q)
    if check and defect > max_defect:
        raise KroneckerDefectError(
            "Kronecker-sum defect {:.3e} exceeds {:.1e}; the eigenvectors of M are "
            "probably ill-determined".format(defect, max_defect)
        )
    return Q, defect
