"""Directed contractive systems {H_a, U_ba} and their dual maps V_ab = U_ba^*."""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from .errors import DimMismatch, NotComparable, UnknownLabel
from .hspace import LinMap, MetricSpace, adjoint, identity_map, min_singular_value, op_norm
from .poset import IndexPoset, build_poset, check_directed


def _default_tol() -> float:
    return float(os.environ.get("HSCALE_TOL", "1e-9"))


@dataclass(frozen=True)
class Tolerances:
    inj: float = 1e-8
    contr: float = field(default_factory=_default_tol)
    path: float = field(default_factory=_default_tol)
    equal: float = field(default_factory=_default_tol)

    @classmethod
    def from_mapping(cls, data: Mapping[str, float] | None, base: float | None = None):
        tol = cls() if base is None else cls(contr=base, path=base, equal=base)
        return replace(tol, **dict(data or {}))


class ContractiveSystem:
    """Spaces over a finite directed poset, with U maps stored on the given edges.

    Maps between non-adjacent indices are composed along the first edge path
    and memoized. Nothing here checks the axioms; see :func:`validate_system`.
    """

    def __init__(self, poset: IndexPoset, spaces: Mapping[str, MetricSpace],
                 umaps: Mapping[tuple[str, str], Any], *, kind: str = "explicit",
                 tol: Tolerances | None = None, meta: Mapping[str, Any] | None = None):
        self.poset = poset
        self.kind = kind
        self.tol = tol or Tolerances()
        self.meta = dict(meta or {})
        missing = [e for e in poset.elements if e not in spaces]
        if missing:
            raise UnknownLabel(f"no space given for {missing}")
        self.spaces = {e: spaces[e] for e in poset.elements}
        edges = {}
        for (a, b), m in umaps.items():
            if not poset.leq(a, b) or a == b:
                raise NotComparable(f"map given for non-edge {a} -> {b}")
            if not isinstance(m, LinMap):
                m = LinMap(self.spaces[a], self.spaces[b], m)
            elif m.src.dim != self.spaces[a].dim or m.dst.dim != self.spaces[b].dim:
                raise DimMismatch(f"map {a} -> {b} has wrong shape")
            edges[(a, b)] = m
        for a, b in poset.edges:
            if a != b and (a, b) not in edges:
                raise UnknownLabel(f"edge {a} -> {b} has no map")
        self.edges = edges
        self._out = {e: [(b, m) for (a, b), m in edges.items() if a == e]
                     for e in poset.elements}
        self._ucache: dict[tuple[str, str], LinMap] = {}
        self._vcache: dict[tuple[str, str], LinMap] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_matrices(cls, elements, grams: Mapping[str, Any],
                      maps: Mapping[tuple[str, str], Any], **kw) -> "ContractiveSystem":
        poset = build_poset(elements, list(maps))
        spaces = {k: g if isinstance(g, MetricSpace) else MetricSpace(np.asarray(g))
                  for k, g in grams.items()}
        return cls(poset, spaces, maps, **kw)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.poset.elements

    @property
    def top(self) -> str:
        return self.poset.top

    def space(self, a: str) -> MetricSpace:
        try:
            return self.spaces[a]
        except KeyError:
            raise UnknownLabel(a) from None

    def dim(self, a: str) -> int:
        return self.space(a).dim

    def u_map(self, a: str, b: str) -> LinMap:
        """U_ba : H_a -> H_b for a <= b."""
        if not self.poset.leq(a, b):
            raise NotComparable(f"{a!r} is not <= {b!r}")
        if a == b:
            return identity_map(self.spaces[a])
        key = (a, b)
        hit = self._ucache.get(key)
        if hit is not None:
            return hit
        for c, edge in self._out[a]:
            if self.poset.leq(c, b):
                m = self.u_map(c, b) @ edge
                break
        else:  # pragma: no cover - closure guarantees an outgoing edge
            raise NotComparable(f"no edge path {a} -> {b}")
        with self._lock:
            return self._ucache.setdefault(key, m)

    def v_map(self, a: str, b: str) -> LinMap:
        """V_ab = U_ba^* : H_b -> H_a for a <= b."""
        if a == b:
            if not self.poset.leq(a, b):
                raise NotComparable(a)
            return identity_map(self.spaces[a])
        key = (a, b)
        hit = self._vcache.get(key)
        if hit is not None:
            return hit
        m = adjoint(self.u_map(a, b))
        with self._lock:
            return self._vcache.setdefault(key, m)

    def path_discrepancy(self, a: str, b: str) -> float:
        """Worst mismatch between U_ba and U_bc U_ca over first edges a -> c."""
        ref = self.u_map(a, b)
        scale = max(1.0, op_norm(ref))
        worst = 0.0
        for c, edge in self._out[a]:
            if self.poset.leq(c, b):
                diff = LinMap(ref.src, ref.dst, (self.u_map(c, b) @ edge).matrix - ref.matrix)
                worst = max(worst, op_norm(diff) / scale)
        return worst

    def with_edge(self, a: str, b: str, matrix) -> "ContractiveSystem":
        """Copy with the edge map a -> b replaced (used to build invalid variants)."""
        edges = dict(self.edges)
        edges[(a, b)] = np.asarray(matrix, dtype=complex)
        return ContractiveSystem(self.poset, self.spaces, edges, kind=self.kind,
                                 tol=self.tol, meta=self.meta)

    def __repr__(self):
        dims = ", ".join(f"{e}:{self.spaces[e].dim}" for e in self.labels)
        return f"ContractiveSystem(kind={self.kind!r}, dims={{{dims}}})"


@dataclass
class AxiomResult:
    passed: bool
    margin: float
    witness: dict | None = None


@dataclass
class ValidationReport:
    directed: AxiomResult
    injective: AxiomResult
    contraction: AxiomResult
    identity: AxiomResult
    path_independence: AxiomResult
    marginal: list[tuple[str, str]] = field(default_factory=list)
    v_injective: bool = True

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.axioms().values())

    def axioms(self) -> dict[str, AxiomResult]:
        return {
            "directed": self.directed,
            "injective": self.injective,
            "contraction": self.contraction,
            "identity": self.identity,
            "path_independence": self.path_independence,
        }

    @property
    def margins(self) -> tuple[float, float, float]:
        return (self.injective.margin, self.contraction.margin, self.path_independence.margin)


def _contraction_witness(s: ContractiveSystem, a: str, b: str, u: LinMap) -> dict:
    w = u.whitened()
    _, sv, vh = np.linalg.svd(w)
    direction = s.space(a).inv_root @ vh[0].conj()
    ga, gb = s.space(a).gram, s.space(b).gram
    grid = s.meta.get("grid")
    coords = []
    for j in range(u.src.dim):
        col = u.matrix[:, j]
        ratio = np.sqrt((col.conj() @ gb @ col).real / ga[j, j].real)
        if ratio > 1.0 + s.tol.contr:
            entry = {"index": j, "ratio": float(ratio)}
            if grid is not None and len(grid) == u.src.dim:
                entry["x"] = float(grid[j])
            coords.append(entry)
    return {"pair": [a, b], "norm": float(sv[0]),
            "direction": [[float(z.real), float(z.imag)] for z in direction],
            "coordinates": coords}


def validate_system(s: ContractiveSystem) -> ValidationReport:
    """Check the axioms on every comparable pair and report worst margins."""
    tol = s.tol
    bad_pair = check_directed(s.poset)
    directed = AxiomResult(bad_pair is None, 0.0 if bad_pair else 1.0,
                           None if bad_pair is None else {"pair": list(bad_pair)})
    pairs = s.poset.comparable_pairs(strict=True)
    min_sv, max_norm, max_path = 1.0, 1.0, 0.0
    inj_w = contr_w = path_w = None
    marginal = []
    v_inj = True
    if pairs:
        min_sv, max_norm = np.inf, 0.0
    for a, b in pairs:
        u = s.u_map(a, b)
        sv = min_singular_value(u)
        if sv < min_sv:
            min_sv = sv
            inj_w = {"pair": [a, b], "min_singular_value": sv}
        nrm = op_norm(u)
        if nrm > max_norm:
            max_norm = nrm
            contr_w = (a, b, u)
        if 1.0 < nrm <= 1.0 + tol.contr:
            marginal.append((a, b))
        disc = s.path_discrepancy(a, b)
        if disc > max_path:
            max_path = disc
            path_w = {"pair": [a, b], "discrepancy": disc}
        if s.dim(a) != s.dim(b):
            v_inj = False
    contraction_ok = max_norm <= 1.0 + tol.contr
    cw = None
    if contr_w is not None and not contraction_ok:
        cw = _contraction_witness(s, *contr_w)
    identity = AxiomResult(True, 0.0)  # U_aa = I by construction
    return ValidationReport(
        directed=directed,
        injective=AxiomResult(min_sv > tol.inj, float(min_sv), None if min_sv > tol.inj else inj_w),
        contraction=AxiomResult(contraction_ok, float(max_norm), cw),
        identity=identity,
        path_independence=AxiomResult(max_path <= tol.path, float(max_path),
                                      None if max_path <= tol.path else path_w),
        marginal=marginal,
        v_injective=v_inj,
    )


def u_map(s: ContractiveSystem, a: str, b: str) -> LinMap:
    return s.u_map(a, b)


def v_map(s: ContractiveSystem, a: str, b: str) -> LinMap:
    return s.v_map(a, b)


def projections_injective(s: ContractiveSystem) -> bool:
    """Whether every Pi_a = V_{a,top} : D -> H_a is injective."""
    top = s.top
    return all(min_singular_value(s.v_map(e, top)) > s.tol.inj for e in s.labels)
