"""JSON system files.

Complex entries are ``[re, im]`` pairs (plain numbers are read as real);
matrices are row-major nested lists; index labels are strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import HScaleError, SchemaError
from .hspace import MetricSpace
from .ofamily import OFamily, build_system_from_ofamily
from .opalg import LimOperator, lift
from .poset import build_poset
from . import generators as gen
from .system import ContractiveSystem, Tolerances

SYSTEM_KINDS = ("explicit", "ofamily", "generator")
ORIGINS = ("explicit", "shift-chain", "weighted-grid", "random", "ofamily", "reconstruction")
GENERATORS = ("shift-chain", "weighted-grid", "ofamily-seed", "diamond", "random")


def _scalar(v, path: str) -> complex:
    if isinstance(v, bool):
        raise SchemaError("expected a number", path)
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        return complex(v[0], v[1])
    raise SchemaError("expected a number or [re, im]", path)


def parse_vector(v, path: str) -> np.ndarray:
    if not isinstance(v, list):
        raise SchemaError("expected a list", path)
    return np.array([_scalar(x, f"{path}[{i}]") for i, x in enumerate(v)], dtype=complex)


def parse_matrix(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise SchemaError("expected a nonempty list of rows", path)
    rows = [parse_vector(r, f"{path}[{i}]") for i, r in enumerate(v)]
    if len({len(r) for r in rows}) != 1:
        raise SchemaError("rows have different lengths", path)
    return np.array(rows)


def dump_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def dump_vector(v) -> list:
    return [dump_complex(z) for z in np.asarray(v).ravel()]


def dump_matrix(m) -> list:
    return [dump_vector(row) for row in np.asarray(m)]


def _get(obj: dict, key: str, path: str, typ=None):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    val = obj[key]
    if typ is not None and not isinstance(val, typ):
        raise SchemaError(f"field {key!r} has the wrong type", f"{path}.{key}")
    return val


def _tolerances(data: dict, tol_override: float | None) -> Tolerances:
    raw = data.get("tolerances", {})
    if not isinstance(raw, dict):
        raise SchemaError("expected an object", "$.tolerances")
    for k, v in raw.items():
        if k not in ("inj", "contr", "path", "equal"):
            raise SchemaError(f"unknown tolerance {k!r}", f"$.tolerances.{k}")
        if not isinstance(v, (int, float)) or v <= 0:
            raise SchemaError("tolerance must be a positive number", f"$.tolerances.{k}")
    return Tolerances.from_mapping({k: float(v) for k, v in raw.items()}, tol_override)


def _explicit(data: dict, tol: Tolerances) -> ContractiveSystem:
    poset_d = _get(data, "poset", "$", dict)
    elements = _get(poset_d, "elements", "$.poset", list)
    if not all(isinstance(e, str) for e in elements):
        raise SchemaError("labels must be strings", "$.poset.elements")
    covers = _get(poset_d, "covers", "$.poset", list)
    for i, c in enumerate(covers):
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(t, str) for t in c)):
            raise SchemaError("cover must be [lower, upper]", f"$.poset.covers[{i}]")
        for t in c:
            if t not in elements:
                raise SchemaError(f"unknown label {t!r}", f"$.poset.covers[{i}]")
    spaces_d = _get(data, "spaces", "$", dict)
    spaces = {}
    for e in elements:
        if e not in spaces_d:
            raise SchemaError(f"no space for {e!r}", "$.spaces")
        g = parse_matrix(_get(spaces_d[e], "gram", f"$.spaces.{e}"), f"$.spaces.{e}.gram")
        try:
            spaces[e] = MetricSpace(g)
        except HScaleError as exc:
            raise SchemaError(str(exc), f"$.spaces.{e}.gram") from None
    maps = {}
    for i, m in enumerate(_get(data, "maps", "$", list)):
        p = f"$.maps[{i}]"
        a, b = _get(m, "from", p, str), _get(m, "to", p, str)
        if a not in elements or b not in elements:
            raise SchemaError("unknown label", p)
        maps[(a, b)] = parse_matrix(_get(m, "matrix", p), f"{p}.matrix")
    poset = build_poset(elements, [tuple(c) for c in covers] + list(maps))
    origin = data.get("origin", "explicit")
    if origin not in ORIGINS:
        raise SchemaError(f"unknown origin {origin!r}", "$.origin")
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("expected an object", "$.meta")
    return ContractiveSystem(poset, spaces, maps, kind=origin, tol=tol, meta=meta)


def _ofamily(data: dict) -> OFamily:
    base = MetricSpace(parse_matrix(_get(data, "base_gram", "$"), "$.base_gram"))
    ops_d = _get(data, "ops", "$", dict)
    if not ops_d:
        raise SchemaError("no operators", "$.ops")
    return OFamily(base, {k: parse_matrix(v, f"$.ops.{k}") for k, v in ops_d.items()})


def _generator(data: dict, tol: Tolerances) -> ContractiveSystem:
    name = _get(data, "generator", "$", str)
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("expected an object", "$.params")
    try:
        if name == "shift-chain":
            return gen.gen_shift_chain(int(params.get("dim", 3)), int(params.get("levels", 4)), tol=tol)
        if name == "weighted-grid":
            kw = {k: params[k] for k in ("xmin", "xmax", "points", "alphas", "weight_form", "grid")
                  if k in params}
            return gen.gen_weighted_grid(tol=tol, **kw)
        if name == "ofamily-seed":
            return gen.gen_e1(tol=tol)
        if name == "diamond":
            return gen.gen_diamond(tol=tol)
        if name == "random":
            seed = int(params.get("seed", 0))
            poset = gen.gen_random_poset(seed, int(params.get("nodes", 4)))
            dims = params.get("dims") or gen.random_dims(seed, poset, int(params.get("max_dim", 6)))
            return gen.gen_random_system(seed, dims, poset, tol=tol)
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError(str(exc), "$.params") from None
    raise SchemaError(f"unknown generator {name!r}; expected one of {GENERATORS}", "$.generator")


def parse_operators(data: dict, s: ContractiveSystem) -> dict[str, LimOperator]:
    ops_d = data.get("operators", {})
    if not isinstance(ops_d, dict):
        raise SchemaError("expected an object", "$.operators")
    out = {}
    for name, rec in ops_d.items():
        p = f"$.operators.{name}"
        base = _get(rec, "base", p, str)
        if base not in s.labels:
            raise SchemaError(f"unknown label {base!r}", f"{p}.base")
        try:
            out[name] = lift(s, base, parse_matrix(_get(rec, "matrix", p), f"{p}.matrix"))
        except HScaleError as exc:
            raise SchemaError(str(exc), p) from None
    return out


@dataclass
class LoadedFile:
    system: ContractiveSystem
    family: OFamily | None = None
    operators: dict[str, LimOperator] = field(default_factory=dict)


def loads(text: str, tol_override: float | None = None) -> LoadedFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", "$")
    kind = _get(data, "kind", "$", str)
    tol = _tolerances(data, tol_override)
    family = None
    try:
        if kind == "explicit":
            s = _explicit(data, tol)
        elif kind == "ofamily":
            family = _ofamily(data)
            s = build_system_from_ofamily(family, tol=tol)
        elif kind == "generator":
            s = _generator(data, tol)
        else:
            raise SchemaError(f"unknown kind {kind!r}; expected one of {SYSTEM_KINDS}", "$.kind")
    except SchemaError:
        raise
    except HScaleError as exc:
        raise SchemaError(f"{type(exc).__name__}: {exc}", "$") from None
    return LoadedFile(s, family, parse_operators(data, s))


def load(path: str, tol_override: float | None = None) -> LoadedFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(str(exc), path) from None
    return loads(text, tol_override)


def system_to_dict(s: ContractiveSystem, operators: dict[str, LimOperator] | None = None) -> dict:
    """Explicit file for ``s``; the generator kind is kept as ``origin``."""
    out: dict[str, Any] = {
        "kind": "explicit",
        "origin": s.kind if s.kind in ORIGINS else "explicit",
        "poset": {"elements": list(s.labels), "covers": [list(e) for e in s.poset.edges]},
        "spaces": {e: {"gram": dump_matrix(s.space(e).gram)} for e in s.labels},
        "maps": [{"from": a, "to": b, "matrix": dump_matrix(m.matrix)}
                 for (a, b), m in s.edges.items()],
        "tolerances": {"inj": s.tol.inj, "contr": s.tol.contr, "path": s.tol.path,
                       "equal": s.tol.equal},
    }
    meta = {k: v for k, v in s.meta.items() if _jsonable(v)}
    if meta:
        out["meta"] = meta
    if operators:
        out["operators"] = {k: {"base": x.base, "matrix": dump_matrix(x.mat)}
                            for k, x in operators.items()}
    return out


def ofamily_to_dict(f: OFamily) -> dict:
    return {"kind": "ofamily", "base_gram": dump_matrix(f.base.gram),
            "ops": {k: dump_matrix(v) for k, v in f.ops.items()}}


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False
