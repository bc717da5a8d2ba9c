"""Inductive limits of bounded operators, as elements of L(D, D^x).

An operator is stored by a base index and its component there; components at
higher indices are ``U_b,base X V_base,b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, NotComparable
from .hspace import LinMap, adjoint, as_complex_matrix, op_norm
from .jtl import DElement, DxElement, d_basis, pair, pi, theta
from .poset import upper_bound
from .system import ContractiveSystem

EQUAL_TOL = 1e-9


@dataclass(eq=False)
class LimOperator:
    base: str
    mat: np.ndarray
    dagger: "LimOperator | None" = field(default=None, repr=False)

    def to_json(self):
        return {"base": self.base,
                "matrix": [[[z.real, z.imag] for z in row] for row in self.mat]}


def lift(s: ContractiveSystem, a: str, m) -> LimOperator:
    """Phi_a: the operator in L(D, D^x) whose component at a is ``m``."""
    m = as_complex_matrix(m)
    n = s.dim(a)
    if m.shape != (n, n):
        raise DimMismatch(f"operator on H_{a} must be {n}x{n}, got {m.shape}")
    return LimOperator(a, m)


def component_at(s: ContractiveSystem, x: LimOperator, b: str) -> np.ndarray:
    if not s.poset.leq(x.base, b):
        raise NotComparable(f"{b!r} is not above base {x.base!r}")
    if b == x.base:
        return x.mat
    return s.u_map(x.base, b).matrix @ x.mat @ s.v_map(x.base, b).matrix


def as_map(s: ContractiveSystem, a: str, m: np.ndarray) -> LinMap:
    sp = s.space(a)
    return LinMap(sp, sp, m)


def apply(s: ContractiveSystem, x: LimOperator, d: DElement, at: str | None = None) -> DxElement:
    b = x.base if at is None else at
    return theta(s, b, component_at(s, x, b) @ pi(s, b, d))


def form_matrix(s: ContractiveSystem, x: LimOperator) -> np.ndarray:
    """F[i, j] = B(X d_j, d_i) over the anchor basis of D."""
    basis = d_basis(s)
    images = [apply(s, x, d) for d in basis]
    return np.array([[pair(s, img, d) for img in images] for d in basis])


@dataclass
class Extraction:
    matrix: np.ndarray | None
    residual: float

    @property
    def bounded(self) -> bool:
        return self.matrix is not None


def extract_component(s: ContractiveSystem, x: LimOperator, g: str,
                      rel_tol: float = 1e-9) -> Extraction:
    """Recover X_g from the form F(xi, eta) = B(X eta, xi) through Pi_g.

    Returns ``matrix=None`` when the form does not factor through Pi_g, which
    is how an index falls outside d(X) here.
    """
    f = form_matrix(s, x)
    p = s.v_map(g, s.top).matrix  # Pi_g in anchor coordinates
    pinv = np.linalg.pinv(p)
    # F = P^T conj(G X_g) conj(P)  ->  K = conj(G X_g) on the range of Pi_g
    k = pinv.T @ f @ pinv.conj()
    back = p.T @ k @ p.conj()
    resid = np.linalg.norm(back - f, 2) / max(1.0, np.linalg.norm(f, 2))
    if resid > rel_tol:
        return Extraction(None, float(resid))
    g_gram = s.space(g).gram
    return Extraction(np.linalg.solve(g_gram, k.conj()), float(resid))


def bound_constant(s: ContractiveSystem, x: LimOperator, g: str) -> float:
    """Best C in |B(X eta, xi)| <= C ||xi_g|| ||eta_g||; inf if none exists."""
    if s.poset.leq(x.base, g):
        return op_norm(as_map(s, g, component_at(s, x, g)))
    ext = extract_component(s, x, g)
    if not ext.bounded:
        return float("inf")
    return op_norm(as_map(s, g, ext.matrix))


def support_set(s: ContractiveSystem, x: LimOperator) -> dict[str, float]:
    """d(X) with its per-index constants."""
    out = {}
    for g in s.labels:
        c = bound_constant(s, x, g)
        if np.isfinite(c):
            out[g] = c
    return out


def involution(s: ContractiveSystem, x: LimOperator) -> LimOperator:
    """X^dagger, with component the metric adjoint of X's at the same base.

    The result remembers ``x`` as its own dagger, so applying the involution
    twice returns the original object.
    """
    if x.dagger is not None:
        return x.dagger
    adj = adjoint(as_map(s, x.base, x.mat)).matrix
    y = LimOperator(x.base, adj, dagger=x)
    x.dagger = y
    return y


def combine(s: ContractiveSystem, x: LimOperator, y: LimOperator, a=1.0, b=1.0) -> LimOperator:
    g = upper_bound(s.poset, x.base, y.base)
    return LimOperator(g, a * component_at(s, x, g) + b * component_at(s, y, g))


def scale(x: LimOperator, c) -> LimOperator:
    return LimOperator(x.base, c * x.mat)


@dataclass
class Undefined:
    residual: float
    witness: tuple[str, str]

    def __bool__(self):
        return False


def partial_product(s: ContractiveSystem, x: LimOperator, y: LimOperator,
                    rel_tol: float = 1e-9):
    """X . Y if the product components form an inductive-limit family, else Undefined."""
    g0 = upper_bound(s.poset, x.base, y.base)
    worst, where = 0.0, None
    for a, b in s.poset.comparable_pairs(strict=True):
        if not s.poset.leq(g0, a):
            continue
        xa, ya = component_at(s, x, a), component_at(s, y, a)
        vu = s.v_map(a, b).matrix @ s.u_map(a, b).matrix
        r = op_norm(as_map(s, a, xa @ (vu - np.eye(s.dim(a))) @ ya))
        bound = rel_tol * (1.0 + op_norm(as_map(s, a, xa)) * op_norm(as_map(s, a, ya)))
        if r > bound and (where is None or r > worst):
            worst, where = r, (a, b)
    if where is not None:
        return Undefined(float(worst), where)
    return LimOperator(g0, component_at(s, x, g0) @ component_at(s, y, g0))


def op_distance(s: ContractiveSystem, x: LimOperator, y: LimOperator) -> float:
    """Relative component distance at every index above both bases."""
    g0 = upper_bound(s.poset, x.base, y.base)
    worst = 0.0
    for g in s.labels:
        if s.poset.leq(g0, g):
            cx, cy = component_at(s, x, g), component_at(s, y, g)
            diff = op_norm(as_map(s, g, cx - cy))
            worst = max(worst, diff / (1.0 + max(op_norm(as_map(s, g, cx)),
                                                 op_norm(as_map(s, g, cy)))))
    return worst


def op_equal(s: ContractiveSystem, x: LimOperator, y: LimOperator, tol: float = EQUAL_TOL) -> bool:
    return op_distance(s, x, y) <= tol
