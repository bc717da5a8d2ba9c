"""The joint topological limit (D, D^x) of a contractive system.

Elements of D are coherent families; since a finite directed poset has a
greatest element, a family is fixed by its component at the top, which is
what :class:`DElement` stores. Elements of D^x are classes of tagged vectors
``(base, vec)``; two tags are equivalent when they agree after lifting to a
common upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotComparable
from .hspace import inner, min_singular_value, norm, riesz_vector
from .poset import upper_bound
from .system import ContractiveSystem


@dataclass(frozen=True, eq=False)
class DElement:
    anchor: str
    vec: np.ndarray

    def to_json(self):
        return {"anchor": self.anchor, "vector": [[z.real, z.imag] for z in self.vec]}


@dataclass(frozen=True, eq=False)
class DxElement:
    base: str
    vec: np.ndarray

    def to_json(self):
        return {"base": self.base, "vector": [[z.real, z.imag] for z in self.vec]}


def d_element(s: ContractiveSystem, vec) -> DElement:
    top = s.top
    return DElement(top, s.space(top).check_vector(vec))


def d_basis(s: ContractiveSystem) -> list[DElement]:
    n = s.dim(s.top)
    return [d_element(s, np.eye(n)[k]) for k in range(n)]


def component(s: ContractiveSystem, d: DElement, a: str) -> np.ndarray:
    return s.v_map(a, d.anchor)(d.vec)


def pi(s: ContractiveSystem, a: str, d: DElement) -> np.ndarray:
    """Projection of D onto H_a."""
    if not s.poset.leq(a, d.anchor):
        raise NotComparable(f"{a!r} is not below anchor {d.anchor!r}")
    return component(s, d, a)


def theta(s: ContractiveSystem, a: str, xi) -> DxElement:
    return DxElement(a, s.space(a).check_vector(xi))


def lift(s: ContractiveSystem, x: DxElement, b: str) -> np.ndarray:
    """Representative of ``x`` at an index b above its base."""
    return s.u_map(x.base, b)(x.vec)


def dx_equal(s: ContractiveSystem, x: DxElement, y: DxElement, tol: float | None = None) -> bool:
    return dx_distance(s, x, y) <= (s.tol.equal if tol is None else tol)


def dx_distance(s: ContractiveSystem, x: DxElement, y: DxElement) -> float:
    """Relative distance of the lifts to the common upper bound of the bases."""
    g = upper_bound(s.poset, x.base, y.base)
    sp = s.space(g)
    lx, ly = lift(s, x, g), lift(s, y, g)
    return norm(sp, lx - ly) / (1.0 + max(norm(sp, lx), norm(sp, ly)))


def is_zero(s: ContractiveSystem, x: DxElement, tol: float | None = None) -> bool:
    return dx_equal(s, x, theta(s, x.base, np.zeros_like(x.vec)), tol)


def pair(s: ContractiveSystem, x: DxElement, d: DElement) -> complex:
    """B(x, d): conjugate-linear in x, linear in d."""
    return inner(s.space(x.base), pi(s, x.base, d), x.vec)


def pair_at(s: ContractiveSystem, x: DxElement, d: DElement, b: str) -> complex:
    """The net value <d_b, x_b>_b at an index b above x.base."""
    return inner(s.space(b), pi(s, b, d), lift(s, x, b))


def lambda_embed(s: ContractiveSystem, a: str, d: DElement) -> DxElement:
    return theta(s, a, pi(s, a, d))


def rebase(s: ContractiveSystem, x: DxElement, b: str) -> DxElement:
    return theta(s, b, lift(s, x, b))


def riesz_dual(s: ContractiveSystem, b: str, coeffs) -> DxElement:
    """theta(b, eta) where <xi, eta>_b = sum_k coeffs[k] xi[k]."""
    return theta(s, b, riesz_vector(s.space(b), coeffs))


def projection_matrix(s: ContractiveSystem, a: str) -> np.ndarray:
    return s.v_map(a, s.top).matrix


@dataclass
class PairVerdict:
    a: str
    b: str
    isometry: bool
    lambda_equal: bool

    @property
    def consistent(self) -> bool:
        return self.isometry == self.lambda_equal


@dataclass
class IsometryReport:
    pairs: list[PairVerdict]

    @property
    def passed(self) -> bool:
        return all(p.consistent for p in self.pairs)

    @property
    def mixed(self) -> list[PairVerdict]:
        return [p for p in self.pairs if not p.consistent]


def is_isometry(s: ContractiveSystem, a: str, b: str, tol: float = 1e-9) -> bool:
    v = s.v_map(a, b)
    if v.src.dim > v.dst.dim:
        return False
    sv = v.singular_values()
    return bool(abs(sv[0] - 1.0) <= tol and abs(sv[-1] - 1.0) <= tol)


def check_isometry_equiv(s: ContractiveSystem) -> IsometryReport:
    """For each a < b, compare "V_ab isometric" with "Lambda_a == Lambda_b on D"."""
    basis = d_basis(s)
    out = []
    for a, b in s.poset.comparable_pairs(strict=True):
        iso = is_isometry(s, a, b)
        leq = all(dx_equal(s, lambda_embed(s, a, d), lambda_embed(s, b, d)) for d in basis)
        out.append(PairVerdict(a, b, iso, leq))
    return IsometryReport(out)


@dataclass
class SeparatingReport:
    passed: bool
    margin: float
    witness: dict | None = None


def pairing_matrix(s: ContractiveSystem, a: str) -> np.ndarray:
    """P[i, j] = pair(theta(a, f_j), d_i) over the standard bases."""
    basis = d_basis(s)
    fs = np.eye(s.dim(a))
    return np.array([[pair(s, theta(s, a, f), d) for f in fs] for d in basis])


def separating_check(s: ContractiveSystem, rel_tol: float = 1e-8) -> SeparatingReport:
    """Rank test of the pairing between D and each theta_a(H_a).

    Column rank dim H_a means no nonzero theta_a(f) pairs to zero with all of D;
    at the top the matrix is square, and full row rank means no nonzero d pairs
    to zero with all of D^x.
    """
    worst, witness = np.inf, None
    top = s.top
    for a in s.labels:
        p = pairing_matrix(s, a)
        sv = np.linalg.svd(p, compute_uv=False)
        scale = sv[0] if sv.size and sv[0] > 0 else 1.0
        need = min(p.shape) if a == top else p.shape[1]
        rel = sv[need - 1] / scale if need <= sv.size else 0.0
        if rel < worst:
            worst, witness = rel, {"index": a, "relative_min_singular_value": float(rel)}
    return SeparatingReport(bool(worst > rel_tol), float(worst), witness)


def projection_ranks(s: ContractiveSystem) -> dict[str, tuple[int, int]]:
    """Rank of Pi_a against dim H_a (dense range means full row rank)."""
    out = {}
    for a in s.labels:
        m = s.v_map(a, s.top)
        sv = m.singular_values()
        out[a] = (int(np.sum(sv > s.tol.inj * max(sv[0], 1.0))), s.dim(a))
    return out


def pi_injective(s: ContractiveSystem, a: str) -> bool:
    return min_singular_value(s.v_map(a, s.top)) > s.tol.inj
