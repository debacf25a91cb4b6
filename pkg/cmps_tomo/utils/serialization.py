"""
Project file formats. Complex numbers are [re, im] pairs everywhere.

matrix  {"rows", "cols", "data": [[re, im], ...]} row-major
cmps    {"d", "Q", "R", "K": matrix | null, "meta"}; reconstructed models add
        "gauge_note", "quality" and optionally "md"
tensor  {"n", "N", "delta_tau", "amputated", "values": [[re, im], ...]} with
        the last index running fastest; n = 2 may also be CSV "tau,re,im"
md      {"kind": "md_model", "poles", "M", "Mhat11", "kappa", "unknown"}
"""
import csv
import json
import os

import numpy as np

from cmps_tomo.structures.cmps import CMPS
from cmps_tomo.structures.correlation_tensor import CorrelationTensor
from cmps_tomo.structures.md_model import MDModel
from .errors import SchemaError


def _pairs(values):
    values = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in values]


def _from_pairs(data, where):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("{}: expected a list of [re, im] pairs".format(where))
    if arr.ndim != 2 or (arr.size and arr.shape[1] != 2):
        if arr.size == 0:
            return np.zeros(0, dtype=complex)
        raise SchemaError("{}: expected a list of [re, im] pairs".format(where))
    return arr[:, 0] + 1j * arr[:, 1]


def _require(obj, keys, where):
    if not isinstance(obj, dict):
        raise SchemaError("{}: expected an object".format(where))
    missing = [k for k in keys if k not in obj]
    if missing:
        raise SchemaError("{}: missing keys {}".format(where, missing))


def matrix_to_dict(A):
    A = np.asarray(A, dtype=complex)
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "data": _pairs(A)}


def matrix_from_dict(obj, where="matrix"):
    _require(obj, ("rows", "cols", "data"), where)
    rows, cols = obj["rows"], obj["cols"]
    values = _from_pairs(obj["data"], where)
    if not isinstance(rows, int) or not isinstance(cols, int) or values.size != rows * cols:
        raise SchemaError(
            "{}: {} entries do not fill a {} x {} matrix".format(where, values.size, rows, cols)
        )
    return values.reshape(rows, cols)


def cmps_to_dict(state):
    return {
        "d": state.d,
        "Q": matrix_to_dict(state.Q),
        "R": matrix_to_dict(state.R),
        "K": None if state.K is None else matrix_to_dict(state.K),
        "meta": state.meta,
    }


def cmps_from_dict(obj):
    _require(obj, ("d", "Q", "R"), "cmps")
    Q = matrix_from_dict(obj["Q"], "cmps.Q")
    R = matrix_from_dict(obj["R"], "cmps.R")
    K = obj.get("K")
    K = None if K is None else matrix_from_dict(K, "cmps.K")
    if Q.shape != (obj["d"], obj["d"]):
        raise SchemaError("cmps: Q has shape {} but d={}".format(Q.shape, obj["d"]))
    try:
        return CMPS(Q, R, K=K, meta=obj.get("meta"))
    except ValueError as e:
        raise SchemaError("cmps: {}".format(e))


def md_to_dict(md):
    return {
        "kind": "md_model",
        "d": md.d,
        "poles": _pairs(md.poles),
        "M": matrix_to_dict(md.M),
        "Mhat11": md.Mhat11,
        "kappa": md.kappa,
        "unknown": [[int(i), int(j)] for i, j in np.argwhere(md.unknown)],
    }


def md_from_dict(obj):
    _require(obj, ("poles", "M", "Mhat11", "kappa"), "md_model")
    poles = _from_pairs(obj["poles"], "md_model.poles")
    M = matrix_from_dict(obj["M"], "md_model.M")
    unknown = np.zeros(M.shape, dtype=bool)
    for entry in obj.get("unknown", []):
        unknown[tuple(entry)] = True
    try:
        return MDModel(poles, M, obj["Mhat11"], obj["kappa"], unknown=unknown)
    except ValueError as e:
        raise SchemaError("md_model: {}".format(e))


def reconstructed_to_dict(rc, md=None):
    out = cmps_to_dict(rc.to_cmps())
    out["K"] = None if rc.K_rec is None else matrix_to_dict(rc.K_rec)
    out["meta"] = {}
    out["gauge_note"] = rc.gauge_note
    out["quality"] = rc.quality
    if md is not None:
        out["md"] = md_to_dict(md)
    return out


def tensor_to_dict(ct):
    return {
        "n": ct.n,
        "N": ct.N,
        "delta_tau": ct.delta_tau,
        "amputated": ct.amputated,
        "values": _pairs(ct.values),
    }


def tensor_from_dict(obj):
    _require(obj, ("n", "N", "delta_tau", "values"), "tensor")
    n, N = obj["n"], obj["N"]
    values = _from_pairs(obj["values"], "tensor.values")
    if not isinstance(n, int) or not isinstance(N, int) or n < 2 or N < 1:
        raise SchemaError("tensor: invalid n={!r} or N={!r}".format(n, N))
    if values.size != N ** (n - 1):
        raise SchemaError(
            "tensor: expected {} values for n={}, N={}, got {}".format(
                N ** (n - 1), n, N, values.size
            )
        )
    try:
        return CorrelationTensor(
            n, N, obj["delta_tau"], values.reshape((N,) * (n - 1)), obj.get("amputated", False)
        )
    except ValueError as e:
        raise SchemaError("tensor: {}".format(e))


def save_tensor_csv(ct, path):
    if ct.n != 2:
        raise SchemaError("CSV output is only defined for 2-point functions, got n={}".format(ct.n))
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["tau", "re", "im"])
        for tau, v in zip(ct.taus(), ct.values):
            writer.writerow([repr(float(tau)), repr(float(v.real)), repr(float(v.imag))])


def load_tensor_csv(path, amputated=False):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or [c.strip() for c in rows[0]] != ["tau", "re", "im"]:
        raise SchemaError("{}: expected the header tau,re,im".format(path))
    try:
        data = np.asarray([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    except ValueError as e:
        raise SchemaError("{}: {}".format(path, e))
    if data.shape[0] < 2:
        raise SchemaError("{}: at least two samples are needed to infer delta_tau".format(path))
    taus = data[:, 0]
    delta_tau = taus[1] - taus[0]
    expected = np.arange(taus.size) * delta_tau
    if taus[0] != 0 or not np.allclose(taus, expected, rtol=1e-9, atol=1e-12 * abs(delta_tau)):
        raise SchemaError("{}: tau column is not a uniform grid starting at 0".format(path))
    return CorrelationTensor(2, taus.size, delta_tau, data[:, 1] + 1j * data[:, 2], amputated)


def benchmark_to_dict(reports):
    return {"kind": "benchmark", "reports": [r.as_dict() for r in reports]}


def save_benchmark_csv(reports, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["grid_value", "rate_mean_criterion", "rate_max_criterion", "trials"])
        for r in reports:
            writer.writerow([
                repr(r.grid_value),
                repr(r.success_rate_mean_criterion),
                repr(r.success_rate_max_criterion),
                r.trials,
            ])


def load_json(path):
    with open(path) as f:
        return json.load(f)


def save_json(obj, path):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _check_count(obj, key, where, minimum=0, nullable=False):
    value = obj[key]
    if value is None and nullable:
        return
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SchemaError("{}.{}: expected an integer >= {}, got {!r}".format(
            where, key, minimum, value))


def _check_non_negative(obj, key, where):
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value >= 0:
        raise SchemaError("{}.{}: expected a non-negative number, got {!r}".format(
            where, key, value))


def structure_report_from_dict(obj):
    _require(obj, ("d", "blocks", "double_eigenvalues"), "structure_report")
    _check_count(obj, "d", "structure_report", minimum=1)
    _check_count(obj, "blocks", "structure_report", minimum=1, nullable=True)
    _check_count(obj, "double_eigenvalues", "structure_report")
    return obj


def quality_report_from_dict(obj):
    _require(
        obj, ("order", "kronecker_defect", "spectrum_deviation", "poles"), "quality_report"
    )
    _check_count(obj, "order", "quality_report", minimum=1)
    _check_non_negative(obj, "kronecker_defect", "quality_report")
    _check_non_negative(obj, "spectrum_deviation", "quality_report")
    poles = _from_pairs(obj["poles"], "quality_report.poles")
    if poles.size != obj["order"]:
        raise SchemaError("quality_report: {} poles for order {}".format(
            poles.size, obj["order"]))
    return obj


def document_kind(obj):
    """Best guess of the kind of a parsed project file."""
    if not isinstance(obj, dict):
        raise SchemaError("a project file holds a JSON object")
    if obj.get("kind") in ("md_model", "benchmark", "structure_report", "quality_report"):
        return obj["kind"]
    if "Q" in obj and "R" in obj:
        return "cmps"
    if "values" in obj and "n" in obj:
        return "tensor"
    if "rows" in obj and "data" in obj:
        return "matrix"
    raise SchemaError("unrecognized project file with keys {}".format(sorted(obj.keys())))


def validate_document(obj):
    """Parse a project file of any kind; returns its kind or raises SchemaError."""
    kind = document_kind(obj)
    if kind == "cmps":
        cmps_from_dict(obj)
        if "md" in obj:
            md_from_dict(obj["md"])
    elif kind == "tensor":
        tensor_from_dict(obj)
    elif kind == "matrix":
        matrix_from_dict(obj)
    elif kind == "md_model":
        md_from_dict(obj)
    elif kind == "benchmark":
        _require(obj, ("reports",), "benchmark")
        for r in obj["reports"]:
            _require(r, ("grid_value", "trials", "success_rate_mean_criterion",
                         "success_rate_max_criterion"), "benchmark.reports")
    elif kind == "structure_report":
        structure_report_from_dict(obj)
    elif kind == "quality_report":
        quality_report_from_dict(obj)
    return kind


def load_tensor(path, amputated=False):
    """JSON or, by suffix, CSV correlation tensor."""
    if os.path.splitext(path)[1].lower() == ".csv":
        return load_tensor_csv(path, amputated)
    return tensor_from_dict(load_json(path))


def save_tensor(ct, path):
    if os.path.splitext(path)[1].lower() == ".csv":
        save_tensor_csv(ct, path)
    else:
        save_json(tensor_to_dict(ct), path)
