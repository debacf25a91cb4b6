"""
From residues to the MD model.

With the first row of M normalized to ones, the residues of every order are
products of M entries times a power of Mhat11:

    rho^(2)_j = Mhat11^2 M[j, 0]
    rho^(3)_{j, i} = Mhat11^3 M[j, 0] M[i, j]
    rho^(n)_{.., j, i} / rho^(n)_{.., j, 0} = M[i, j]

so every entry of M is a ratio of measured residues.
"""
import logging

import numpy as np

from cmps_tomo.modeling.matcher import PoleMatcher
from cmps_tomo.structures.md_model import MDModel
from cmps_tomo.structures.transfer import sort_poles
from cmps_tomo.utils.errors import PreconditionError, UnknownEntriesError


def _as_list(higher):
    if higher is None:
        return []
    if isinstance(higher, (list, tuple)):
        return list(higher)
    return [higher]


def _density(models):
    """Mean of |Re rho^(n)_{0..0}|^(1/n) over the supplied models."""
    estimates = []
    for rm in models:
        corner = rm.residues[(0,) * (rm.n - 1)]
        estimates.append(abs(corner.real) ** (1.0 / rm.n))
    return float(np.mean(estimates))


def _prescriptions(rm, zero_tol):
    """
    Ratio prescriptions rho[a.., j, i] / rho[a.., j, 0] of one model, as a
    (numerator sum, count) pair of D x D arrays indexed [i, j].
    """
    D = rm.order
    rho = rm.residues.reshape(-1, D, D)
    threshold = zero_tol * max(float(np.max(np.abs(rho))), np.finfo(float).tiny)
    total = np.zeros((D, D), dtype=complex)
    count = np.zeros((D, D), dtype=int)
    for block in rho:
        den = block[:, 0]
        usable = np.abs(den) > threshold
        ratios = np.zeros((D, D), dtype=complex)
        ratios[usable, :] = block[usable, :] / den[usable, None]
        # block is indexed [j, i], the sums are indexed [i, j]
        total += ratios.T
        count += np.broadcast_to(usable[None, :], (D, D))
    return total, count


def extract_M(
    rm3,
    rm2=None,
    higher=None,
    match_tol=1e-3,
    zero_tol=1e-10,
    block_tolerant=False,
    realness_tol=1e-9,
):
    """
    Assemble the MD model from a 3-point residue model and optionally the
    2-point and higher-order ones.

    The poles of rm3 are put in the canonical order and the other models are
    matched to them. M[i, j] is rho3[j, i] / (rho2[j] Mhat11) when rm2 is
    given and rho3[j, i] / rho3[j, 0] otherwise; higher models add one
    prescription per leading multi-index and all prescriptions are averaged
    (unweighted). Prescriptions with |denominator| <= zero_tol * max|rho|
    are skipped.

    Arguments:
        rm3 (ResidueModel): n = 3
        rm2 (ResidueModel or None): n = 2, not amputated
        higher (ResidueModel, list or None): n > 3
        block_tolerant (bool): fill entries without any prescription with 0
            and flag them in `unknown` instead of raising

    Returns:
        MDModel with extra fields "symmetry_defect" and "prescriptions"
    """
    if rm3.n != 3:
        raise PreconditionError("rm3 should be a 3-point model, got n={}".format(rm3.n))
    if rm2 is not None and rm2.n != 2:
        raise PreconditionError("rm2 should be a 2-point model, got n={}".format(rm2.n))
    higher = _as_list(higher)
    for rm in higher:
        if rm.n <= 3:
            raise PreconditionError("higher models need n > 3, got n={}".format(rm.n))

    order, kappa = sort_poles(rm3.poles, realness_tol)
    rm3 = rm3.permuted(order)
    matcher = PoleMatcher(match_tol)
    if rm2 is not None:
        rm2 = rm2.permuted(matcher.permutation(rm3.poles, rm2.poles))
    higher = [rm.permuted(matcher.permutation(rm3.poles, rm.poles)) for rm in higher]

    models = [rm3] + ([rm2] if rm2 is not None else []) + higher
    Mhat11 = _density(models)
    if not Mhat11 > 0:
        raise PreconditionError("stationary residues vanish, the density is not positive")

    D = rm3.order
    if rm2 is not None:
        threshold = zero_tol * max(float(np.max(np.abs(rm2.residues))), np.finfo(float).tiny)
        den = rm2.residues * Mhat11
        usable = np.abs(rm2.residues) > threshold
        total = np.zeros((D, D), dtype=complex)
        total[:, usable] = rm3.residues[usable, :].T / den[None, usable]
        count = np.broadcast_to(usable[None, :], (D, D)).astype(int)
    else:
        total, count = _prescriptions(rm3, zero_tol)
    for rm in higher:
        t, c = _prescriptions(rm, zero_tol)
        total = total + t
        count = count + c

    M = np.zeros((D, D), dtype=complex)
    known = count > 0
    M[known] = total[known] / count[known]
    M[0, :] = 1.0
    unknown = ~known
    unknown[0, :] = False
    if np.any(unknown):
        entries = [tuple(int(v) for v in e) for e in np.argwhere(unknown)]
        if not block_tolerant:
            raise UnknownEntriesError(entries)
        logger = logging.getLogger("cmps_tomo.reconstruction")
        logger.warning("{} M entries are unknown and set to 0".format(len(entries)))

    md = MDModel(rm3.poles, M, Mhat11, kappa, unknown=unknown)
    md.add_field("symmetry_defect", md.symmetry_defect())
    md.add_field("prescriptions", int(count[1:, :].min()) if D > 1 else 0)
    return md


def normalize_md(sd):
    """
    MDModel of exact spectral data: M[i, j] M[0, i] / (M[0, j] M[0, 0]),
    which has a first row of ones and the same residues.
    """
    M = np.asarray(sd.M)
    M00 = M[0, 0].real
    if not M00 > 0:
        raise PreconditionError("density should be positive, got {}".format(M00))
    first = M[0, :]
    if np.any(first == 0):
        raise PreconditionError(
            "M has vanishing first-row entries at {}, the model has a hidden "
            "block".format(np.flatnonzero(first == 0).tolist())
        )
    Mn = M * first[:, None] / (first[None, :] * M00)
    Mn[0, :] = 1.0
    return MDModel(sd.poles, Mn, M00, sd.kappa)
