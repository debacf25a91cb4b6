"""
End-to-end reconstruction: sampled 3-point (and optionally 2-point)
functions to the MD model and a cMPS in a fixed gauge.
"""
import logging

import numpy as np

from cmps_tomo.modeling.spectral.hankel import (
    build_hankel,
    estimate_order,
    hankel_singular_values,
)
from cmps_tomo.modeling.spectral.pole_estimation import estimate_poles
from cmps_tomo.modeling.spectral.residues import project_average, solve_residues
from cmps_tomo.modeling.transfer import transfer_from_qr
from cmps_tomo.modeling.matcher import PoleMatcher
from cmps_tomo.structures.md_model import ReconstructedCMPS
from cmps_tomo.structures.poles import ResidueModel
from cmps_tomo.utils.errors import PipelineError, PreconditionError, TomographyError
from cmps_tomo.utils.timer import Timer

from .extract_m import extract_M
from .extract_rq import extract_Q, extract_R, pairing_mismatch
from .gauge import extract_K

GAUGE_NOTE = {
    "reference": 0,
    "phi": "R_rec[0, 0] made real positive",
    "chi": "imaginary part of Q_rec[0, 0] removed",
    "mirror": "first complex diagonal entry of R_rec has Im >= 0; "
    "(conj(Q), conj(R)) describes the same correlations",
}


class _Stage(object):
    """Labels failures of one pipeline stage and times it."""

    def __init__(self, name, logger, timings):
        self.name = name
        self.logger = logger
        self.timings = timings
        self.timer = Timer()

    def __enter__(self):
        self.timer.tic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = self.timer.toc(average=False)
        self.timings[self.name] = elapsed
        if exc is None:
            self.logger.debug("Stage {} done in {:.3f}s".format(self.name, elapsed))
            return False
        if isinstance(exc, TomographyError) and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def _check_inputs(c3, c2):
    if c3.n != 3:
        raise PreconditionError("c3 should be a 3-point tensor, got n={}".format(c3.n))
    if c2 is not None:
        if c2.n != 2:
            raise PreconditionError("c2 should be a 2-point tensor, got n={}".format(c2.n))
        if abs(c2.delta_tau - c3.delta_tau) > 1e-12 * c3.delta_tau:
            raise PreconditionError(
                "c2 and c3 should share delta_tau, got {} and {}".format(
                    c2.delta_tau, c3.delta_tau
                )
            )


def _with_density(rm2, density):
    """Put density^2 at the stationary pole of a model fitted to amputated data."""
    residues = np.array(rm2.residues)
    residues[int(np.argmax(rm2.poles.real))] = density ** 2
    out = ResidueModel(rm2.poles, residues, 2, rm2.rms_fit_error, rm2.delta_tau)
    out.extra_fields = dict(rm2.extra_fields)
    return out


def reconstruct(c3, c2, cfg):
    """
    Arguments:
        c3 (CorrelationTensor): 3-point function
        c2 (CorrelationTensor or None): 2-point function on the same grid,
            possibly amputated
        cfg (CfgNode): ESTIMATOR, RECONSTRUCTION and TRANSFER sections are used

    Returns:
        ReconstructedCMPS, MDModel
    """
    logger = logging.getLogger("cmps_tomo.reconstruction")
    _check_inputs(c3, c2)
    timings = {}
    est = cfg.ESTIMATOR
    rec = cfg.RECONSTRUCTION

    with _Stage("projection", logger, timings):
        signal = project_average(c3)

    with _Stage("order", logger, timings):
        order = est.ORDER
        N = signal.size
        P = est.PENCIL or min(max(int(round(est.PENCIL_FRACTION * N)), 1), N - 1)
        hp = build_hankel(signal, P)
        if order <= 0:
            order = estimate_order(hp, est.ORDER_THRESHOLD)
            logger.info("Estimated model order {}".format(order))
        # leading part of the spectrum the order decision is based on
        singular_values = hankel_singular_values(hp)[: order + 2]

    with _Stage("poles", logger, timings):
        poles = estimate_poles(
            signal,
            order,
            c3.delta_tau,
            estimator=est.NAME,
            pencil=est.PENCIL,
            pencil_fraction=est.PENCIL_FRACTION,
            overestimation=est.OVERESTIMATION,
            max_condition=est.MAX_CONDITION,
        )

    with _Stage("residues", logger, timings):
        rm3 = solve_residues(poles, c3, est.RESIDUE_MAX_CONDITION)
        rm2 = None
        if c2 is not None:
            rm2 = solve_residues(poles, c2, est.RESIDUE_MAX_CONDITION)
            if c2.amputated:
                stationary = int(np.argmax(rm3.poles.real))
                corner = rm3.residues[stationary, stationary]
                rm2 = _with_density(rm2, abs(corner.real) ** (1.0 / 3))

    with _Stage("extract_M", logger, timings):
        md = extract_M(
            rm3,
            rm2,
            match_tol=rec.POLE_MATCH_TOL,
            zero_tol=rec.ZERO_RESIDUE_TOL,
            block_tolerant=rec.BLOCK_TOLERANT,
            realness_tol=cfg.TRANSFER.REALNESS_TOL,
        )

    with _Stage("extract_R", logger, timings):
        R_rec, Y, O = extract_R(md, rec.PAIRING_TOL, rec.SYMMETRIZE_Y)

    with _Stage("extract_Q", logger, timings):
        Q_rec, defect = extract_Q(
            md, Y, O, rec.MAX_KRONECKER_DEFECT, check=True, symmetric=rec.SYMMETRIZE_Y
        )

    rebuilt = np.linalg.eigvals(transfer_from_qr(Q_rec, R_rec))
    matches = PoleMatcher(np.inf)(md.poles, rebuilt)
    scale = max(float(np.max(np.abs(md.poles))), np.finfo(float).tiny)
    quality = {
        "order": int(order),
        "estimator": est.NAME,
        "rms_fit_error_3": rm3.rms_fit_error,
        "rms_fit_error_2": None if rm2 is None else rm2.rms_fit_error,
        "residue_condition": rm3.get_field("condition"),
        "symmetry_defect": md.get_field("symmetry_defect"),
        "pairing_mismatch": pairing_mismatch(md, R_rec, Y, O),
        "kronecker_defect": defect,
        "spectrum_deviation": float(np.max(np.abs(md.poles - rebuilt[matches]))) / scale,
        "unknown_entries": int(np.count_nonzero(md.unknown)),
        "hankel_singular_values": [float(s) for s in singular_values],
    }
    rc = ReconstructedCMPS(R_rec, Q_rec, gauge_note=GAUGE_NOTE, quality=quality)

    if rec.RECOVER_K:
        with _Stage("extract_K", logger, timings):
            K_rec, hermiticity = extract_K(rc, rec.GAUGE_TOL, rec.GAUGE_MAX_ITER)
        rc = rc.with_k(K_rec, hermiticity)

    logger.info(
        "Reconstructed d={} model: symmetry defect {:.2e}, Kronecker defect {:.2e}, "
        "total time {:.3f}s".format(
            rc.d, quality["symmetry_defect"], defect, sum(timings.values())
        )
    )
    return rc, md
