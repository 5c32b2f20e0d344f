"""JSON (de)serialization for specs and points.

Wire format:
  field      {"type": "Q"} or {"type": "GF", "p": 2}
  rationals  strings "a/b" with b > 0, gcd(a, b) = 1  (integers as "a/1")
  GF(p)      plain integers in [0, p)
  matrices   nested row-major arrays
  spec       {"field", "r", "s", "dimH": [[...]], "dimA": {"j,i": d}, ...,
              "compHA": {"l,j,i": [[...]]}, ...}  with 1-based string keys
  point      {"dims": {"m": [...], "n": [...]}, "blocks": {"l,i": [[...]]}}

Parsing rejects shape and invariant violations with positioned error
messages (SpecJsonError carries the offending path).
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd

from .matrix import Field, Mat
from .rs_spec import DimVector, PointW, RsSpec, check_point_shapes, point_from_blocks


class SpecJsonError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _parse_scalar(field: Field, v, path: str):
    if field.is_finite:
        if not isinstance(v, int) or isinstance(v, bool):
            raise SpecJsonError(path, f"GF({field.p}) entries must be integers, got {v!r}")
        if not 0 <= v < field.p:
            raise SpecJsonError(path, f"non-canonical GF({field.p}) element {v}")
        return v
    if isinstance(v, str):
        parts = v.split("/")
        if len(parts) != 2:
            raise SpecJsonError(path, f"rational must be 'a/b', got {v!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise SpecJsonError(path, f"rational must be 'a/b' with integers, got {v!r}")
        if b <= 0 or gcd(abs(a), b) != 1:
            raise SpecJsonError(path, f"non-canonical rational {v!r} (need b>0, gcd=1)")
        return Fraction(a, b)
    raise SpecJsonError(path, f"rational entries must be 'a/b' strings, got {v!r}")


def _show_scalar(field: Field, x):
    if field.is_finite:
        return int(x)
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def mat_to_json(m: Mat):
    return [[_show_scalar(m.field, m.get(i, j)) for j in range(m.cols)]
            for i in range(m.rows)]


def mat_from_json(field: Field, obj, rows: int, cols: int, path: str) -> Mat:
    if not isinstance(obj, list) or len(obj) != rows:
        raise SpecJsonError(path, f"expected {rows} rows, got {obj!r}")
    ent = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise SpecJsonError(f"{path}[{i}]", f"expected {cols} columns")
        for j, v in enumerate(row):
            ent.append(_parse_scalar(field, v, f"{path}[{i}][{j}]"))
    return Mat(field, rows, cols, tuple(ent))


def _key(indices) -> str:
    return ",".join(str(i) for i in indices)


def _parse_key(k: str, arity: int, path: str):
    parts = k.split(",")
    if len(parts) != arity:
        raise SpecJsonError(path, f"key {k!r} must have {arity} comma-separated indices")
    try:
        return tuple(int(x) for x in parts)
    except ValueError:
        raise SpecJsonError(path, f"non-integer index in key {k!r}")


def serialize_spec(spec: RsSpec) -> dict:
    return {
        "field": spec.field.to_json(),
        "r": spec.r,
        "s": spec.s,
        "dimH": [list(row) for row in spec.dimH],
        "dimA": {_key(k): v for k, v in sorted(spec.dimA.items())},
        "dimB": {_key(k): v for k, v in sorted(spec.dimB.items())},
        "compHA": {_key(k): mat_to_json(m) for k, m in sorted(spec.compHA.items())},
        "compAA": {_key(k): mat_to_json(m) for k, m in sorted(spec.compAA.items())},
        "compBH": {_key(k): mat_to_json(m) for k, m in sorted(spec.compBH.items())},
        "compBB": {_key(k): mat_to_json(m) for k, m in sorted(spec.compBB.items())},
    }


def parse_spec(obj) -> RsSpec:
    if not isinstance(obj, dict):
        raise SpecJsonError("$", "spec must be a JSON object")
    try:
        field = Field.from_json(obj["field"])
    except (KeyError, ValueError) as e:
        raise SpecJsonError("$.field", str(e))
    try:
        r, s = int(obj["r"]), int(obj["s"])
    except (KeyError, ValueError):
        raise SpecJsonError("$", "missing or bad r / s")
    if r < 1 or s < 1:
        raise SpecJsonError("$", "r and s must be positive")
    dimH_raw = obj.get("dimH")
    if (not isinstance(dimH_raw, list) or len(dimH_raw) != s
            or any(not isinstance(row, list) or len(row) != r for row in dimH_raw)):
        raise SpecJsonError("$.dimH", f"expected an s x r = {s} x {r} array")
    dimH = tuple(tuple(int(x) for x in row) for row in dimH_raw)

    def parse_dims(name, arity, pairs):
        raw = obj.get(name, {})
        out = {}
        for k, v in raw.items():
            idx = _parse_key(k, arity, f"$.{name}")
            out[idx] = int(v)
        for idx in pairs:
            if idx not in out:
                raise SpecJsonError(f"$.{name}", f"missing entry {_key(idx)!r}")
        extra = set(out) - set(pairs)
        if extra:
            raise SpecJsonError(f"$.{name}", f"unexpected keys {sorted(extra)}")
        return out

    a_pairs = [(j, i) for i in range(1, r + 1) for j in range(i, r + 1)]
    b_pairs = [(m, l) for l in range(1, s + 1) for m in range(l, s + 1)]
    dimA = parse_dims("dimA", 2, a_pairs)
    dimB = parse_dims("dimB", 2, b_pairs)
    for i in range(1, r + 1):
        if dimA[(i, i)] != 1:
            raise SpecJsonError(f"$.dimA.{i},{i}",
                                f"A_{i}{i} must be the base field (dimension 1), got {dimA[(i, i)]}")
    for l in range(1, s + 1):
        if dimB[(l, l)] != 1:
            raise SpecJsonError(f"$.dimB.{l},{l}",
                                f"B_{l}{l} must be the base field (dimension 1), got {dimB[(l, l)]}")

    def hd(l, i):
        return dimH[l - 1][i - 1]

    def parse_comps(name, keys_and_shapes):
        raw = obj.get(name, {})
        out = {}
        for key, (nr, nc) in keys_and_shapes.items():
            kstr = _key(key)
            if kstr not in raw:
                raise SpecJsonError(f"$.{name}", f"missing composition {kstr!r}")
            out[key] = mat_from_json(field, raw[kstr], nr, nc, f"$.{name}.{kstr}")
        extra = set(raw) - {_key(k) for k in keys_and_shapes}
        if extra:
            raise SpecJsonError(f"$.{name}", f"unexpected keys {sorted(extra)}")
        return out

    compHA = parse_comps("compHA", {
        (l, j, i): (hd(l, i), hd(l, j) * dimA[(j, i)])
        for l in range(1, s + 1) for i in range(1, r + 1) for j in range(i, r + 1)})
    compAA = parse_comps("compAA", {
        (k, j, i): (dimA[(k, i)], dimA[(k, j)] * dimA[(j, i)])
        for i in range(1, r + 1) for j in range(i, r + 1) for k in range(j, r + 1)})
    compBH = parse_comps("compBH", {
        (m, l, i): (hd(m, i), dimB[(m, l)] * hd(l, i))
        for i in range(1, r + 1) for l in range(1, s + 1) for m in range(l, s + 1)})
    compBB = parse_comps("compBB", {
        (n, m, l): (dimB[(n, l)], dimB[(n, m)] * dimB[(m, l)])
        for l in range(1, s + 1) for m in range(l, s + 1) for n in range(m, s + 1)})
    return RsSpec(field, r, s, dimH, dimA, dimB, compHA, compAA, compBH, compBB)


def serialize_point(spec: RsSpec, w: PointW) -> dict:
    return {
        "dims": {"m": list(w.dims.m), "n": list(w.dims.n)},
        "blocks": {_key((l, i)): mat_to_json(w.block(l, i))
                   for l in range(1, spec.s + 1) for i in range(1, spec.r + 1)},
    }


def parse_point(spec: RsSpec, obj) -> PointW:
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise SpecJsonError("$", "point must be an object with 'blocks'")
    raw = obj["blocks"]
    if "dims" in obj:
        try:
            m = tuple(int(x) for x in obj["dims"]["m"])
            n = tuple(int(x) for x in obj["dims"]["n"])
        except (KeyError, TypeError, ValueError):
            raise SpecJsonError("$.dims", "dims must carry integer lists m and n")
    else:
        # infer from block shapes
        m, n = [], []
        for i in range(1, spec.r + 1):
            k = _key((1, i))
            if k not in raw or not raw[k] or spec.hdim(1, i) == 0:
                raise SpecJsonError("$.blocks", "cannot infer dims; supply 'dims'")
            m.append(len(raw[k][0]) // spec.hdim(1, i))
        for l in range(1, spec.s + 1):
            k = _key((l, 1))
            if k not in raw:
                raise SpecJsonError("$.blocks", f"missing block {k!r}")
            n.append(len(raw[k]))
        m, n = tuple(m), tuple(n)
    if len(m) != spec.r or len(n) != spec.s:
        raise SpecJsonError("$.dims", f"dims do not match type ({spec.r},{spec.s})")
    dims = DimVector(m, n)
    blocks = []
    for l in range(1, spec.s + 1):
        row = []
        for i in range(1, spec.r + 1):
            k = _key((l, i))
            if k not in raw:
                raise SpecJsonError("$.blocks", f"missing block {k!r}")
            row.append(mat_from_json(spec.field, raw[k], dims.n[l - 1],
                                     spec.hdim(l, i) * dims.m[i - 1], f"$.blocks.{k}"))
        blocks.append(row)
    extra = set(raw) - {_key((l, i)) for l in range(1, spec.s + 1)
                        for i in range(1, spec.r + 1)}
    if extra:
        raise SpecJsonError("$.blocks", f"unexpected keys {sorted(extra)}")
    w = point_from_blocks(dims, blocks)
    check_point_shapes(spec, w)
    return w


def serialize_tri_elem(g) -> dict:
    """Group element in the same matrix conventions (census provenance)."""
    return {"diag": [mat_to_json(d) for d in g.diag],
            "low": {_key(k): mat_to_json(m) for k, m in g.low}}


def parse_tri_elem(side, obj):
    from .groups import TriElem, tri_make
    field = side.field
    diag = []
    for idx, sz in enumerate(side.sizes):
        diag.append(mat_from_json(field, obj["diag"][idx], sz, sz, f"$.diag[{idx}]"))
    low = {}
    for k, raw in obj.get("low", {}).items():
        i, j = _parse_key(k, 2, "$.low")
        low[(i, j)] = mat_from_json(field, raw, side.sizes[i - 1],
                                    side.slotdim[(i, j)] * side.sizes[j - 1],
                                    f"$.low.{k}")
    return tri_make(side, diag, low)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
