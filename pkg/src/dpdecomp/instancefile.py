"""Reading and writing problem instances as JSON documents.

The document layout is published in docs/instance-schema.json (versioned;
this module accepts schema_version "1.0").  Matrices are nested row-major
integer lists reduced mod p on load; rationals are JSON strings "num/den"
(a bare integer, JSON number or string, is also accepted).  Cost tables are
indexed by the base-p little-endian state index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .dp import CostFunction, DiscountedHorizon, DPInstance, FiniteHorizon, Horizon
from .fields import PrimeField
from .linalg import DirectSumDecomposition, MatrixFp, Subspace

SCHEMA_VERSION = "1.0"


def parse_rational(value: Any) -> Fraction:
    """Accept 7, "7", or "7/3" spellings."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def _parse_matrix(field: PrimeField, data: Any, nrows: int, ncols: int, name: str) -> MatrixFp:
    if (not isinstance(data, list) or len(data) != nrows
            or any(not isinstance(row, list) or len(row) != ncols for row in data)):
        raise ValueError(f"{name} must be a {nrows}x{ncols} integer matrix")
    flat = []
    for row in data:
        for e in row:
            if not isinstance(e, int) or isinstance(e, bool):
                raise ValueError(f"{name} entries must be integers")
            flat.append(e)
    return MatrixFp(field, nrows, ncols, flat)


@dataclass(frozen=True)
class LoadedInstance:
    instance: DPInstance
    decomposition: DirectSumDecomposition | None


def _parse_horizon(data: Any) -> Horizon:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError('horizon must be {"finite": {"T": ...}} or '
                         '{"discounted": {"alpha": ...}}')
    if "finite" in data:
        T = data["finite"].get("T")
        if not isinstance(T, int) or isinstance(T, bool) or T < 1:
            raise ValueError("finite horizon needs an integer T >= 1")
        return FiniteHorizon(T)
    if "discounted" in data:
        return DiscountedHorizon(parse_rational(data["discounted"].get("alpha")))
    raise ValueError(f"unknown horizon kind {list(data)!r}")


def _parse_decomposition(field: PrimeField, n: int, data: Any) -> DirectSumDecomposition:
    if not isinstance(data, list) or len(data) < 2:
        raise ValueError("decomposition must list at least two basis matrices")
    parts = []
    for k, mat in enumerate(data):
        if not isinstance(mat, list) or any(not isinstance(row, list) for row in mat):
            raise ValueError(f"decomposition part {k} must be a matrix (list of rows)")
        if len(mat) != n:
            raise ValueError(f"decomposition part {k} must have {n} rows")
        width = len(mat[0]) if mat[0] is not None else 0
        if any(len(row) != width for row in mat):
            raise ValueError(f"decomposition part {k} has ragged rows")
        cols = [[row[j] for row in mat] for j in range(width)]
        part = Subspace(field, n, cols)
        if part.dim != width:
            raise ValueError(f"decomposition part {k} columns are dependent")
        parts.append(part)
    return DirectSumDecomposition(parts)


def _parse_cost(field: PrimeField, n: int, data: Any,
                decomp: DirectSumDecomposition | None) -> CostFunction:
    if not isinstance(data, dict):
        raise ValueError("cost must be an object")
    allow = bool(data.get("allow_vanishing", False))
    kinds = [k for k in ("table", "separable", "indicator") if k in data]
    if len(kinds) != 1:
        raise ValueError('cost needs exactly one of "table", "separable", "indicator"')
    kind = kinds[0]
    if kind == "table":
        table = data["table"]
        if not isinstance(table, list):
            raise ValueError("cost table must be a list")
        return CostFunction(field, n, [parse_rational(v) for v in table],
                            allow_vanishing=allow)
    if decomp is None:
        raise ValueError(f'cost kind "{kind}" requires a decomposition block')
    if kind == "separable":
        tables = data["separable"].get("tables")
        if not isinstance(tables, list):
            raise ValueError("separable cost needs a list of per-part tables")
        parsed = [[parse_rational(v) for v in t] for t in tables]
        return CostFunction.separable(decomp, parsed, allow_vanishing=allow)
    weights = data["indicator"].get("weights")
    if not isinstance(weights, list):
        raise ValueError("indicator cost needs a list of per-part weights")
    return CostFunction.indicator(decomp, [parse_rational(v) for v in weights])


def load_instance(data: dict[str, Any], *, horizon_override: Horizon | None = None,
                  max_states: int | None, max_inputs: int | None) -> LoadedInstance:
    """Build a control problem (and optional splitting) from a parsed JSON
    document.  Raises ValueError on any schema or validation failure."""
    if not isinstance(data, dict):
        raise ValueError("instance document must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r}")
    try:
        prime = data["field"]["prime"]
    except (KeyError, TypeError):
        raise ValueError('missing field.prime') from None
    if not isinstance(prime, int) or isinstance(prime, bool):
        raise ValueError("field.prime must be an integer")
    field = PrimeField(prime)
    try:
        n = data["dims"]["n"]
        m = data["dims"]["m"]
    except (KeyError, TypeError):
        raise ValueError("missing dims.n / dims.m") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (n, m)):
        raise ValueError("dims must be nonnegative integers")
    if n < 1:
        raise ValueError("state dimension n must be at least 1")
    A = _parse_matrix(field, data.get("A"), n, n, "A")
    B = _parse_matrix(field, data.get("B"), n, m, "B")
    decomp = None
    if "decomposition" in data:
        decomp = _parse_decomposition(field, n, data["decomposition"])
    if "cost" not in data:
        raise ValueError("missing cost")
    cost = _parse_cost(field, n, data["cost"], decomp)
    if horizon_override is not None:
        horizon = horizon_override
    else:
        if "horizon" not in data:
            raise ValueError("missing horizon (and no override given)")
        horizon = _parse_horizon(data["horizon"])
    instance = DPInstance(A, B, cost, horizon,
                          max_states=max_states, max_inputs=max_inputs)
    return LoadedInstance(instance, decomp)


def load_instance_file(path: str, **kwargs) -> LoadedInstance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"not valid JSON: {exc}") from exc
    return load_instance(data, **kwargs)


def load_lqr_block(data: dict[str, Any]) -> dict[str, Any]:
    """Extract the real-field regulator block: matrices A, B, P, horizon T,
    part bases, tolerance, and an optional start state."""
    if not isinstance(data, dict) or "lqr" not in data or not isinstance(data["lqr"], dict):
        raise ValueError('document must contain an "lqr" object')
    block = data["lqr"]
    out: dict[str, Any] = {}
    for key in ("A", "B", "P"):
        mat = block.get(key)
        if (not isinstance(mat, list) or not mat
                or any(not isinstance(row, list) for row in mat)):
            raise ValueError(f"lqr.{key} must be a matrix (list of rows)")
        out[key] = [[float(e) for e in row] for row in mat]
    T = block.get("T")
    if not isinstance(T, int) or isinstance(T, bool) or T < 1:
        raise ValueError("lqr.T must be an integer >= 1")
    out["T"] = T
    parts = block.get("parts")
    if parts is not None:
        if not isinstance(parts, list) or any(not isinstance(pmat, list) for pmat in parts):
            raise ValueError("lqr.parts must be a list of basis matrices")
        out["parts"] = [[[float(e) for e in row] for row in pmat] for pmat in parts]
    else:
        out["parts"] = None
    out["tol"] = float(block.get("tol", 1e-9))
    x0 = block.get("x0")
    out["x0"] = [float(v) for v in x0] if x0 is not None else None
    return out


def load_lqr_file(path: str) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"not valid JSON: {exc}") from exc
    return load_lqr_block(data)
