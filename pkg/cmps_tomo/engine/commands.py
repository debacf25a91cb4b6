"""
Command line front end.

Exit codes: 0 success, 1 I/O or file format problems, 2 usage errors,
3 numerical or pipeline failures.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from cmps_tomo.config import cfg as default_cfg
from cmps_tomo.modeling.correlators import (
    amputate,
    decay_num_samples,
    nyquist_delta_tau,
    sample,
    spectral_data,
    synthesize,
)
from cmps_tomo.modeling.reconstruction.pipeline import reconstruct
from cmps_tomo.modeling.reconstruction.wick import consistency_check, wick_predict
from cmps_tomo.simulation.ensemble import random_cmps
from cmps_tomo.simulation.perturbation import add_noise
from cmps_tomo.simulation.structure import analyze_ll_structure
from cmps_tomo.structures.correlation_tensor import CorrelationTensor
from cmps_tomo.structures.specs import EnsembleSpec, NoiseSpec
from cmps_tomo.engine.benchmark import run_benchmark
from cmps_tomo.utils.collect_env import collect_env_info
from cmps_tomo.utils.errors import SchemaError, TomographyError
from cmps_tomo.utils.logger import setup_logger
from cmps_tomo.utils.miscellaneous import mkdir, output_path, save_config, sibling_path
from cmps_tomo.utils import serialization as io

ESTIMATOR_CHOICES = ("prony", "prony-kernel", "mpm", "ssmpm")


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got {!r}".format(text))
    if value < 1:
        raise argparse.ArgumentTypeError("should be positive, got {}".format(value))
    return value


def non_negative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got {!r}".format(text))
    if value < 0:
        raise argparse.ArgumentTypeError("should be non-negative, got {}".format(value))
    return value


def positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, got {!r}".format(text))
    if not value > 0:
        raise argparse.ArgumentTypeError("should be positive, got {}".format(value))
    return value


def non_negative_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, got {!r}".format(text))
    if not value >= 0:
        raise argparse.ArgumentTypeError("should be non-negative, got {}".format(value))
    return value


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=None, help="master seed (overrides SEED)")
    parser.add_argument("-o", "--out", default=None, metavar="FILE", help="output file")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument(
        "--config-file", default="", metavar="FILE", help="path to a YAML config file"
    )
    parser.add_argument(
        "--opts",
        default=[],
        nargs="+",
        metavar="KEY VALUE",
        help="modify config options, e.g. --opts ESTIMATOR.NAME mpm",
    )
    return parser


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="cmps-tomo", description="Tomography of continuous matrix product states"
    )
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("generate", parents=[common], help="draw a random cMPS")
    p.add_argument("--d", type=positive_int, default=None)
    p.add_argument("--mode", choices=("naive", "refined", "naive_QR", "refined_KR"), default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--sigma", type=positive_float, default=None)
    p.add_argument("--eta", type=positive_float, default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("correlate", parents=[common], help="sample an n-point function")
    p.add_argument("--state", required=True, metavar="FILE")
    p.add_argument("--n", type=positive_int, default=2)
    p.add_argument("--N", type=positive_int, default=None)
    p.add_argument("--delta-tau", type=positive_float, default=None)
    p.add_argument("--amputate", action="store_true", help="subtract the squared density (n=2)")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("noise", parents=[common], help="add white Gaussian noise")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--snr", type=positive_float, default=None)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruct a cMPS")
    p.add_argument("--c3", required=True, metavar="FILE", help="3-point function")
    p.add_argument("--c2", default=None, metavar="FILE", help="2-point function")
    p.add_argument("--amputated", action="store_true", help="the CSV 2-point file is amputated")
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES, default=None)
    p.add_argument("--order", type=non_negative_int, default=None)
    p.add_argument("--pencil", type=non_negative_int, default=None, help="pencil parameter")
    p.add_argument("--md-only", action="store_true", help="stop after the MD model")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("predict", parents=[common], help="predict an n-point function")
    p.add_argument("--model", required=True, metavar="FILE", help="MD model or reconstruction")
    p.add_argument("--n", type=positive_int, default=None)
    p.add_argument("--N", type=positive_int, default=None)
    p.add_argument("--delta-tau", type=positive_float, default=None)
    p.add_argument("--compare", default=None, metavar="FILE", help="observed tensor")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", parents=[common], help="run a Monte Carlo benchmark")
    p.add_argument("--kind", choices=("noise_snr", "perturb_M", "additional_field"), default=None)
    p.add_argument("--d", type=positive_int, default=None)
    p.add_argument("--grid", type=non_negative_float, nargs="+", default=None)
    p.add_argument("--trials", type=positive_int, default=None)
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES, default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("analyze", parents=[common], help="block and degeneracy structure")
    p.add_argument("--state", required=True, metavar="FILE")
    p.add_argument("--tol", type=positive_float, default=1e-6)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", parents=[common], help="check project files")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_validate)
    return parser


def _setup_cfg(args):
    cfg = default_cfg.clone()
    if args.config_file:
        cfg.merge_from_file(args.config_file)
    if args.opts:
        cfg.merge_from_list(args.opts)
    if args.seed is not None:
        cfg.SEED = args.seed
    overrides = {
        "d": ("ENSEMBLE", "D"),
        "mode": ("ENSEMBLE", "MODE"),
        "mu": ("ENSEMBLE", "MU"),
        "sigma": ("ENSEMBLE", "SIGMA"),
        "eta": ("ENSEMBLE", "ETA"),
        "snr": ("NOISE", "SNR"),
        "order": ("ESTIMATOR", "ORDER"),
        "pencil": ("ESTIMATOR", "PENCIL"),
        "kind": ("BENCHMARK", "KIND"),
        "trials": ("BENCHMARK", "TRIALS"),
    }
    for name, (section, key) in overrides.items():
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg[section], key, value)
    if getattr(args, "grid", None) is not None:
        cfg.BENCHMARK.GRID = tuple(args.grid)
    estimator = getattr(args, "estimator", None)
    if estimator is not None:
        if args.command == "benchmark":
            cfg.BENCHMARK.ESTIMATOR = estimator
        else:
            cfg.ESTIMATOR.NAME = estimator
    cfg.freeze()
    return cfg


def _pole_table(sd):
    rho = sd.M[:, 0] * sd.M[0, :]
    lines = ["{:>4} {:>14} {:>14} {:>12}".format("k", "Re", "Im", "|rho|")]
    for k, (pole, r) in enumerate(zip(sd.poles, rho)):
        lines.append("{:>4} {:>14.6e} {:>14.6e} {:>12.4e}".format(k, pole.real, pole.imag, abs(r)))
    return "\n".join(lines)


def _spectral_data(state, cfg):
    return spectral_data(
        state,
        cfg.TRANSFER.REALNESS_TOL,
        cfg.TRANSFER.DEGENERACY_TOL,
        cfg.TRANSFER.MAX_EIGENVECTOR_CONDITION,
    )


def cmd_generate(args, cfg):
    logger = logging.getLogger("cmps_tomo.cli")
    spec = EnsembleSpec.from_config(cfg)
    state = random_cmps(spec)
    state.meta.update({"ensemble": spec.as_dict(), "seed": cfg.SEED})
    path = output_path(args.out, "cmps.json", cfg.OUTPUT_DIR)
    io.save_json(io.cmps_to_dict(state), path)
    logger.info("Wrote d={} {} state to {}".format(spec.d, spec.mode, path))
    print(_pole_table(_spectral_data(state, cfg)))
    return 0


def cmd_correlate(args, cfg):
    state = io.cmps_from_dict(io.load_json(args.state))
    sd = _spectral_data(state, cfg)
    delta_tau = args.delta_tau or cfg.SAMPLING.DELTA_TAU or nyquist_delta_tau(
        sd.poles, cfg.SAMPLING.NYQUIST_FRACTION
    )
    N = args.N or cfg.SAMPLING.NUM_SAMPLES or decay_num_samples(
        sd.poles,
        delta_tau,
        cfg.SAMPLING.DECAY_PERIODS,
        3 * sd.size,
        cfg.SAMPLING.MAX_SAMPLES,
    )
    ct = sample(sd, args.n, N, delta_tau, cfg.SAMPLING.MAX_GRID_POINTS)
    if args.amputate:
        ct = amputate(ct, sd.density)
    path = output_path(args.out, "c{}.json".format(args.n), cfg.OUTPUT_DIR)
    io.save_tensor(ct, path)
    logging.getLogger("cmps_tomo.cli").info("Wrote {} to {}".format(ct, path))
    return 0


def cmd_noise(args, cfg):
    ct = io.load_tensor(args.input)
    noisy = add_noise(ct, NoiseSpec(cfg.NOISE.SNR, seed=cfg.SEED))
    path = output_path(args.out, "noisy.json", cfg.OUTPUT_DIR)
    io.save_tensor(noisy, path)
    return 0


def cmd_reconstruct(args, cfg):
    logger = logging.getLogger("cmps_tomo.cli")
    c3 = io.load_tensor(args.c3)
    c2 = io.load_tensor(args.c2, amputated=args.amputated) if args.c2 else None
    if args.md_only:
        cfg = cfg.clone()
        cfg.defrost()
        cfg.RECONSTRUCTION.RECOVER_K = False
        cfg.freeze()
    rc, md = reconstruct(c3, c2, cfg)
    default_name = "md.json" if args.md_only else "reconstruction.json"
    path = output_path(args.out, default_name, cfg.OUTPUT_DIR)
    if args.md_only:
        io.save_json(io.md_to_dict(md), path)
    else:
        io.save_json(io.reconstructed_to_dict(rc, md), path)
    quality = dict(rc.quality)
    quality["kind"] = "quality_report"
    quality["poles"] = [[float(p.real), float(p.imag)] for p in md.poles]
    quality_path = sibling_path(path, "_quality.json")
    io.save_json(quality, quality_path)
    logger.info("Wrote {} and {}".format(path, quality_path))
    return 0


def _load_md(path):
    obj = io.load_json(path)
    if io.document_kind(obj) == "cmps":
        if "md" not in obj:
            raise SchemaError("{}: reconstruction without an embedded MD model".format(path))
        obj = obj["md"]
    return io.md_from_dict(obj)


def cmd_predict(args, cfg):
    md = _load_md(args.model)
    observed = io.load_tensor(args.compare) if args.compare else None
    if observed is not None:
        report = consistency_check(
            md, observed, cfg.RECONSTRUCTION.CONSISTENCY_THRESHOLD, cfg.SAMPLING.MAX_GRID_POINTS
        )
        print("relative sup deviation: {:.3e}".format(report["sup_deviation"]))
        print("relative rms deviation: {:.3e}".format(report["rms_deviation"]))
        n, N, delta_tau = observed.n, observed.N, observed.delta_tau
    else:
        n = args.n or 2
        delta_tau = args.delta_tau or cfg.SAMPLING.DELTA_TAU or nyquist_delta_tau(
            md.poles, cfg.SAMPLING.NYQUIST_FRACTION
        )
        N = args.N or cfg.SAMPLING.NUM_SAMPLES or decay_num_samples(
            md.poles,
            delta_tau,
            cfg.SAMPLING.DECAY_PERIODS,
            3 * md.size,
            cfg.SAMPLING.MAX_SAMPLES,
        )
    if args.out:
        rm = wick_predict(md, n)
        values = synthesize(md.poles, rm.residues, N, delta_tau, cfg.SAMPLING.MAX_GRID_POINTS)
        io.save_tensor(CorrelationTensor(n, N, delta_tau, values), args.out)
    return 0


def cmd_benchmark(args, cfg):
    logger = logging.getLogger("cmps_tomo.cli")
    spec = EnsembleSpec.from_config(cfg)
    reports = run_benchmark(cfg.BENCHMARK.KIND, cfg.BENCHMARK.GRID, cfg.BENCHMARK.TRIALS, spec, cfg)
    path = output_path(args.out, "benchmark.json", cfg.OUTPUT_DIR)
    io.save_json(io.benchmark_to_dict(reports), path)
    io.save_benchmark_csv(reports, sibling_path(path, ".csv"))
    save_config(cfg, sibling_path(path, "_config.yaml"))
    for r in reports:
        print("{:>12.4g} {:>8.3f} {:>8.3f}".format(
            r.grid_value, r.success_rate_mean_criterion, r.success_rate_max_criterion))
    logger.info("Wrote {}".format(path))
    return 0


def _json_ready(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def cmd_analyze(args, cfg):
    state = io.cmps_from_dict(io.load_json(args.state))
    report = analyze_ll_structure(state, args.tol)
    pairs = report["double_eigenvalues"]
    print("blocks: {}, degenerate pairs: {}".format(report["blocks"], pairs))
    if args.out:
        out = {k: _json_ready(v) for k, v in report.items()}
        out["kind"] = "structure_report"
        io.save_json(out, args.out)
    return 0


def cmd_validate(args, cfg):
    status = 0
    for path in args.files:
        try:
            kind = io.validate_document(io.load_json(path))
            print("{}: {}".format(path, kind))
        except (OSError, json.JSONDecodeError, SchemaError) as e:
            print("{}: invalid ({})".format(path, e))
            status = 1
    return status


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        cfg = _setup_cfg(args)
    except (KeyError, ValueError, AssertionError) as e:
        print("error: invalid configuration: {}".format(e), file=sys.stderr)
        return 2
    except OSError as e:
        print("error: {}".format(e), file=sys.stderr)
        return 1

    mkdir(cfg.OUTPUT_DIR)
    logger = setup_logger("cmps_tomo", "", verbose=args.verbose)
    logger.debug("Environment:\n" + collect_env_info())
    logger.debug("Running with config:\n{}".format(cfg))

    try:
        return args.func(args, cfg)
    except (OSError, json.JSONDecodeError, SchemaError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return 1
    except TomographyError as e:
        print("error: {}".format(e), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
