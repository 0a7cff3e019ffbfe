"""Tensor files, suite configs and report writers.

Tensor files are JSON with a fixed key order::

    {
      "order": 2,
      "dim": 2,
      "exponent": 1,
      "weights": [1.0, 2.0],
      "symmetric": false,
      "coeffs": [1.0, 0.0, 0.0, 1.0]
    }

``exponent`` is a number or ``"inf"``; ``weights`` is omitted when all equal
to 1; ``coeffs`` is the row-major flattening of the ``(dim,)*order`` array.
Files written by :func:`dumps_tensor` are canonical: loading and saving them
again gives identical bytes.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .lattice import INF, SequenceSpace, parse_exponent
from .tensor import FullTensor, SymmetricTensor, is_symmetric_array
from .theorems import CheckReport, SuiteConfig, summarize

TENSOR_KEYS = ("order", "dim", "exponent", "weights", "symmetric", "coeffs")
CONFIG_KEYS = ("checks", "exponents", "dims", "orders", "samples", "seed", "tolerances", "method", "workers")
DEFAULT_SUITE = "default_suite.json"


class TensorFileError(ValueError):
    """A tensor file or suite config could not be parsed or failed validation."""


@dataclass(frozen=True)
class TensorFile:
    tensor: FullTensor
    symmetric: bool

    def symmetric_tensor(self) -> SymmetricTensor:
        return SymmetricTensor.from_array(self.tensor.space, self.tensor.coeffs)


def _json_exponent(p: float):
    if p == INF:
        return "inf"
    return int(p) if float(p).is_integer() else float(p)


def _require(cond, msg):
    if not cond:
        raise TensorFileError(msg)


def parse_tensor(text: str) -> TensorFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"invalid JSON: {exc}") from None
    _require(isinstance(raw, dict), "tensor file must hold a JSON object")
    unknown = sorted(set(raw) - set(TENSOR_KEYS))
    _require(not unknown, f"unknown keys: {unknown}")
    for key in ("order", "dim", "exponent", "coeffs"):
        _require(key in raw, f"missing key {key!r}")
    order, dim = raw["order"], raw["dim"]
    _require(isinstance(order, int) and not isinstance(order, bool) and order >= 1,
             f"order must be a positive integer, got {order!r}")
    _require(isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1,
             f"dim must be a positive integer, got {dim!r}")
    try:
        p = parse_exponent(raw["exponent"])
    except (TypeError, ValueError) as exc:
        raise TensorFileError(f"exponent: {exc}") from None
    symmetric = raw.get("symmetric", False)
    _require(isinstance(symmetric, bool), "symmetric must be true or false")
    coeffs = raw["coeffs"]
    _require(isinstance(coeffs, list), "coeffs must be an array")
    expected = dim**order
    _require(len(coeffs) == expected,
             f"coeffs: expected {expected} values (dim^order = {dim}^{order}), got {len(coeffs)}")
    _require(all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs),
             "coeffs must be numbers")
    b = np.array(coeffs, dtype=float).reshape((dim,) * order)
    _require(bool(np.all(np.isfinite(b))), "coeffs must be finite")
    try:
        space = SequenceSpace(dim, p, raw.get("weights"))
    except (TypeError, ValueError) as exc:
        raise TensorFileError(f"weights: {exc}") from None
    if symmetric:
        _require(is_symmetric_array(b), "symmetric=true but coeffs are not permutation-invariant")
    return TensorFile(FullTensor(space, b), symmetric)


def load_tensor(path) -> TensorFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TensorFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_tensor(text)


def dumps_tensor(u, symmetric: bool | None = None) -> str:
    """Canonical text of a tensor file."""
    if isinstance(u, SymmetricTensor):
        full, symmetric = u.to_full(), True if symmetric is None else symmetric
    else:
        full = u
        symmetric = bool(symmetric)
    space = full.space
    fields = [
        ("order", full.order),
        ("dim", space.dim),
        ("exponent", _json_exponent(space.exponent)),
    ]
    if not space.unit_weights:
        fields.append(("weights", [float(w) for w in space.weights]))
    fields.append(("symmetric", symmetric))
    fields.append(("coeffs", [float(c) for c in full.coeffs.ravel()]))
    lines = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in fields]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def save_tensor(path, u, symmetric: bool | None = None) -> None:
    Path(path).write_text(dumps_tensor(u, symmetric), encoding="utf-8")


# ------------------------------------------------------------ suite config


def parse_suite_config(text: str) -> SuiteConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"invalid JSON: {exc}") from None
    _require(isinstance(raw, dict), "suite config must hold a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    _require(not unknown, f"unknown config keys: {unknown}")
    kwargs = dict(raw)
    if kwargs.get("checks") == "all":
        kwargs.pop("checks")
    for key in ("checks", "exponents", "dims", "orders"):
        if key in kwargs:
            _require(isinstance(kwargs[key], list), f"{key} must be an array")
    if "tolerances" in kwargs:
        _require(isinstance(kwargs["tolerances"], dict), "tolerances must be an object")
    seed = kwargs.get("seed")
    if seed is not None:
        _require(isinstance(seed, int) and not isinstance(seed, bool), "seed must be an integer")
    try:
        return SuiteConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise TensorFileError(f"invalid suite config: {exc}") from None


def read_suite_text(path=None) -> str:
    """Text of a suite config; ``None`` reads the shipped default."""
    if path is None:
        return resources.files("tnlab").joinpath("data", DEFAULT_SUITE).read_text(encoding="utf-8")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TensorFileError(f"cannot read {path}: {exc.strerror}") from None


def load_suite_config(path=None) -> SuiteConfig:
    return parse_suite_config(read_suite_text(path))


def config_has_seed(text: str) -> bool:
    try:
        return "seed" in json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return False


# ----------------------------------------------------------------- reports


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def report_columns(reports: Sequence[CheckReport]) -> list[str]:
    names = sorted({k for r in reports for k in r.quantities})
    return ["check_id", "p", "m", "n", "seed", *names, "passed"]


def reports_csv(reports: Sequence[CheckReport]) -> str:
    cols = report_columns(reports)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in reports:
        row = []
        for c in cols:
            if c == "check_id":
                row.append(r.check_id)
            elif c in ("p", "m", "n", "seed"):
                row.append(_cell(r.instance.get(c, "")))
            elif c == "passed":
                row.append(_cell(r.passed))
            else:
                row.append(_cell(r.quantities[c]) if c in r.quantities else "")
        w.writerow(row)
    return buf.getvalue()


def reports_json(reports: Sequence[CheckReport]) -> str:
    doc = {"summary": summarize(reports), "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2) + "\n"


def write_reports(reports: Sequence[CheckReport], out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / "report.csv", out / "witnesses.json"
    csv_path.write_text(reports_csv(reports), encoding="utf-8")
    json_path.write_text(reports_json(reports), encoding="utf-8")
    return csv_path, json_path
