"""
Block structure of M and the degeneracy patterns of paired cMPS spectra.

A pole k enters some density-like residue only if there is a closed walk
0 -> .. -> k -> .. -> 0 along non-vanishing entries M[b, a] (step a -> b).
Poles without one form a hidden block that no correlator reveals.
"""
import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import breadth_first_order

from cmps_tomo.modeling.correlators import spectral_data
from cmps_tomo.modeling.matcher import pair_conjugates
from cmps_tomo.structures.reports import BlockPartition
from cmps_tomo.utils.errors import DegenerateSpectrumError, NonDiagonalizableError


def _adjacency(M, tol):
    M = np.asarray(M)
    scale = max(float(np.max(np.abs(M))), np.finfo(float).tiny)
    # step a -> b when M[b, a] does not vanish
    return (np.abs(M) > tol * scale).T


def detect_blocks(M, tol=1e-10):
    """Visible poles: reachable from index 0 and reaching index 0 again."""
    A = _adjacency(M, tol)
    graph = scipy.sparse.csr_matrix(A.astype(np.int8))
    forward = breadth_first_order(graph, 0, directed=True, return_predecessors=False)
    backward = breadth_first_order(graph.T.tocsr(), 0, directed=True, return_predecessors=False)
    visible = sorted(set(forward.tolist()) & set(backward.tolist()))
    hidden = sorted(set(range(A.shape[0])) - set(visible))
    return BlockPartition(visible, hidden)


def p_number(M, tol=1e-10):
    """
    Smallest n such that the correlators of orders 2 .. n together involve
    every pole; inf when a hidden block exists.
    """
    A = _adjacency(M, tol).astype(int)
    D = A.shape[0]
    if detect_blocks(M, tol).hidden_indices:
        return float("inf")
    # reach[j][k]: k is reached from 0 in exactly j steps
    reach = [np.eye(D, dtype=int)[0]]
    back = [np.eye(D, dtype=int)[0]]
    for _ in range(2 * D):
        reach.append((A.T @ reach[-1] > 0).astype(int))
        back.append((A @ back[-1] > 0).astype(int))
    seen = np.zeros(D, dtype=bool)
    for n in range(2, 2 * D + 1):
        for j in range(1, n):
            seen |= (reach[j] > 0) & (back[n - j] > 0)
        if seen.all():
            return n
    return float("inf")


def _count_pairs(values, tol):
    """Number of genuinely complex conjugate pairs among the values."""
    values = np.asarray(values, dtype=complex)
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    count = 0
    for a, b in pair_conjugates(values):
        if a != b and abs(values[a] - np.conj(values[b])) <= tol * scale:
            if abs(values[a].imag) > tol * scale:
                count += 1
    return count


def _multiplicities(values, tol):
    """Cluster values closer than tol * max|v|; returns (centers, counts)."""
    values = np.asarray(values, dtype=complex)
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    centers, counts = [], []
    for v in values:
        for c, center in enumerate(centers):
            if abs(v - center) <= tol * scale:
                counts[c] += 1
                break
        else:
            centers.append(v)
            counts.append(1)
    return np.asarray(centers), np.asarray(counts)


def analyze_ll_structure(state, tol=1e-6):
    """
    Structure report of a (typically imported) ground-state cMPS.

    R is rotated by exp(-i phi) with phi = arg(det R) / d and Q shifted by
    -i chi with chi the mean imaginary part of spec(Q); neither changes T.
    Reports the conjugate pairs in spec(Q) and spec(R), the multiplicities of
    spec(conj(R) (x) R), the block partition of M and whether every degenerate
    eigenvalue of M splits between the two blocks.
    """
    d = state.d
    R = np.asarray(state.R)
    Q = np.asarray(state.Q)
    det = np.linalg.det(R)
    phi = float(np.angle(det) / d) if det != 0 else 0.0
    R_n = R * np.exp(-1j * phi)
    chi = float(np.mean(np.linalg.eigvals(Q).imag))
    Q_n = Q - 1j * chi * np.eye(d)

    m = np.linalg.eigvals(np.kron(R_n.conj(), R_n))
    centers, counts = _multiplicities(m, tol)
    report = {
        "d": d,
        "phi": phi,
        "chi": chi,
        "q_pairs": _count_pairs(np.linalg.eigvals(Q_n), tol),
        "r_pairs": _count_pairs(np.linalg.eigvals(R_n), tol),
        "simple_eigenvalues": int(np.count_nonzero(counts == 1)),
        "double_eigenvalues": int(np.count_nonzero(counts == 2)),
        "higher_multiplicities": int(np.count_nonzero(counts > 2)),
        "expected_pairs": d // 2,
    }
    try:
        sd = spectral_data(state)
    except (DegenerateSpectrumError, NonDiagonalizableError) as e:
        report.update(blocks=None, visible=None, hidden=None, p_number=None,
                      degenerate_pairs_split=None, note=str(e))
        return report

    partition = detect_blocks(sd.M, tol)
    report.update(
        blocks=partition.num_blocks,
        visible=partition.visible_indices,
        hidden=partition.hidden_indices,
        p_number=p_number(sd.M, tol),
    )
    doubles = centers[counts == 2]
    if partition.hidden_indices and doubles.size:
        v, h = partition.visible_indices, partition.hidden_indices
        m1 = np.linalg.eigvals(sd.M[np.ix_(v, v)])
        m2 = np.linalg.eigvals(sd.M[np.ix_(h, h)])
        scale = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
        split = [
            bool(np.min(np.abs(m1 - c)) <= tol * scale and np.min(np.abs(m2 - c)) <= tol * scale)
            for c in doubles
        ]
        report["degenerate_pairs_split"] = split
    else:
        report["degenerate_pairs_split"] = []
    return report
