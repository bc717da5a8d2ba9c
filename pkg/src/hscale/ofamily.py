"""Contractive systems generated by a directed family of operators.

Each operator A on a base space (H, G) defines the graph-norm space H_A with
Gram ``G + A^H G A``; for A ⪯ B the linking map is ``S_B^{-1} S_A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimMismatch, OrderViolation
from .hspace import MetricSpace, as_complex_matrix, hermitian_part, inner, psd_sqrt
from .jtl import DxElement, pair, pi, theta
from .poset import build_poset, transitive_closure
from .system import ContractiveSystem, Tolerances

FORMULA_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OFamily:
    base: MetricSpace
    ops: Mapping[str, np.ndarray]

    def __post_init__(self):
        ops = {}
        for name, a in self.ops.items():
            m = as_complex_matrix(a)
            if m.shape != (self.base.dim, self.base.dim):
                raise DimMismatch(f"operator {name!r} has shape {m.shape}")
            ops[str(name)] = m
        object.__setattr__(self, "ops", ops)

    @property
    def names(self) -> list[str]:
        return list(self.ops)

    def graph_gram(self, name: str) -> np.ndarray:
        """G + A^H G A, the Gram of ||x||^2 + ||Ax||^2."""
        a, g = self.ops[name], self.base.gram
        return hermitian_part(g + a.conj().T @ g @ a)

    def _tol(self) -> float:
        scale = max(np.linalg.norm(self.graph_gram(n), 2) for n in self.names) if self.ops else 1.0
        return 1e-10 * scale

    def precedes(self, a: str, b: str) -> bool:
        """a ⪯ b, i.e. ||A x|| <= ||B x|| for all x."""
        diff = self.graph_gram(b) - self.graph_gram(a)
        return bool(np.linalg.eigvalsh(hermitian_part(diff)).min() >= -self._tol())


@dataclass
class OFamilyReport:
    names: list[str]
    order: np.ndarray
    directed: bool
    ties: dict[str, list[str]] = field(default_factory=dict)
    unbounded_pairs: list[tuple[str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.directed


def validate_ofamily(f: OFamily) -> OFamilyReport:
    names = f.names
    n = len(names)
    order = np.array([[f.precedes(a, b) for b in names] for a in names], dtype=bool).reshape(n, n)
    ties: dict[str, list[str]] = {}
    rep = {}
    for i, a in enumerate(names):
        for j in range(i):
            if order[i, j] and order[j, i]:
                rep[a] = rep.get(names[j], names[j])
                ties.setdefault(rep[a], []).append(a)
                break
        else:
            rep[a] = a
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            if not (order[i] & order[j]).any():
                bad.append((names[i], names[j]))
    return OFamilyReport(names, order, not bad, ties, bad)


def u_formula(f: OFamily, a: str, b: str) -> np.ndarray:
    """S_B^{-1/2} (S_A^{1/2} S_B^{-1/2})^* S_A^{1/2}, evaluated term by term.

    Operators on (H, G) are handled in an orthonormal frame, where adjoints are
    conjugate transposes and S_A becomes I + Ã^H Ã.
    """
    w, winv = f.base.root, f.base.inv_root

    def frame_s(name):
        t = w @ f.ops[name] @ winv
        return hermitian_part(np.eye(f.base.dim) + t.conj().T @ t)

    sa, sb = frame_s(a), frame_s(b)
    sa_half = psd_sqrt(sa)
    sb_inv_half = psd_sqrt(sb, inverse=True)
    core = sb_inv_half @ (sa_half @ sb_inv_half).conj().T @ sa_half
    return winv @ core @ w


def u_simplified(f: OFamily, a: str, b: str) -> np.ndarray:
    return np.linalg.solve(f.graph_gram(b), f.graph_gram(a))


def build_system_from_ofamily(f: OFamily, tol: Tolerances | None = None) -> ContractiveSystem:
    report = validate_ofamily(f)
    if not report.directed:
        raise OrderViolation(f"operator family is not directed: {report.unbounded_pairs}")
    merged = {t for group in report.ties.values() for t in group}
    labels = [n for n in f.names if n not in merged]
    idx = {n: report.names.index(n) for n in labels}
    rel = np.array([[report.order[idx[a], idx[b]] for b in labels] for a in labels], dtype=bool)
    rel = transitive_closure(rel.reshape(len(labels), len(labels)))
    full = build_poset(labels, [(a, b) for i, a in enumerate(labels)
                                for j, b in enumerate(labels) if i != j and rel[i, j]])
    poset = build_poset(labels, full.covering_pairs())
    spaces = {n: MetricSpace(f.graph_gram(n)) for n in labels}
    maps = {}
    for a, b in poset.edges:
        if np.linalg.eigvalsh(hermitian_part(f.graph_gram(b) - f.graph_gram(a))).min() < -f._tol():
            raise OrderViolation(f"S_{a} <= S_{b} fails")
        lit, simp = u_formula(f, a, b), u_simplified(f, a, b)
        gap = np.linalg.norm(lit - simp, 2)
        if gap > FORMULA_TOL * max(1.0, np.linalg.norm(simp, 2)):
            raise ArithmeticError(f"closed form for U_{b}{a} disagrees by {gap:.3e}")
        maps[(a, b)] = simp
    s = ContractiveSystem(poset, spaces, maps, kind="ofamily", tol=tol,
                          meta={"ties": report.ties})
    for a, b in poset.comparable_pairs(strict=True):
        v = s.v_map(a, b).matrix
        if np.linalg.norm(v - np.eye(f.base.dim), 2) > 1e-10:
            raise ArithmeticError(f"V_{a}{b} is not the identity")
    return s


def theta_ofamily(f: OFamily, s: ContractiveSystem, name: str, xi,
                  probes: list | None = None) -> DxElement:
    """theta(name, xi), after checking it factors as (S^{1/2})^x S^{1/2} on ``probes``."""
    x = theta(s, name, xi)
    if probes:
        w, winv = f.base.root, f.base.inv_root
        t = w @ f.ops[name] @ winv
        s_half = winv @ psd_sqrt(np.eye(f.base.dim) + t.conj().T @ t) @ w
        for d in probes:
            lhs = pair(s, x, d)
            rhs = inner(f.base, s_half @ pi(s, name, d), s_half @ x.vec)
            if abs(lhs - rhs) > 1e-10 * (1.0 + abs(lhs)):
                raise ArithmeticError(f"factorization of theta_{name} off by {abs(lhs - rhs):.3e}")
    return x
