"""Rigged Hilbert space data built on the joint limit.

The central norm is ``||d||_0 = min_a ||pi(a, d)||_a`` over the finite index
set. When it is Hilbertian, H_0 is D (in anchor coordinates) with Gram G_0,
and each H_a is recovered as the graph-norm space of an operator A_a on H_0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConditionAViolation, IndexMismatch, NotInjective, NotPSD,
                     ParallelogramViolation)
from .hspace import LinMap, MetricSpace, hermitian_part, norm, psd_sqrt
from .jtl import DElement, DxElement, d_element, dx_distance, pair, pi, theta
from .ofamily import OFamily, build_system_from_ofamily
from .report import FAIL, INCONCLUSIVE, PASS, PASS_EMPIRICAL, PASS_PROVED, CheckResult
from .system import ContractiveSystem, validate_system

GENERATOR_CHAINS = ("shift-chain", "weighted-grid")
PARALLELOGRAM_TOL = 1e-8


def norm0(s: ContractiveSystem, d: DElement) -> float:
    return min(norm(s.space(a), pi(s, a, d)) for a in s.labels)


def _random_vec(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def pi_kernel_witness(s: ContractiveSystem) -> dict | None:
    """A nonzero d with pi(a, d) = 0 for some a, if one exists."""
    top = s.top
    for a in s.labels:
        w = s.v_map(a, top).whitened()
        _, sv, vh = np.linalg.svd(w)
        full = np.zeros(w.shape[1])
        full[: sv.size] = sv
        if full.min() <= s.tol.inj * max(1.0, full.max()):
            k = int(np.argmin(full))
            vec = s.space(top).inv_root @ vh[k].conj()
            return {"index": a, "d": d_element(s, vec).to_json()}
    return None


def _chain_labels(s: ContractiveSystem) -> list[str]:
    """Labels sorted bottom-up by the number of elements below them."""
    m = s.poset.leq_matrix
    return [s.labels[i] for i in np.argsort(m.sum(axis=0), kind="stable")]


def check_condition_A(s: ContractiveSystem, sample_count: int = 200, seed: int = 42) -> CheckResult:
    rep = validate_system(s)
    if not rep.ok:
        bad = [k for k, r in rep.axioms().items() if not r.passed]
        return CheckResult(FAIL, 0.0, {"upstream_axioms": bad})
    kernel = pi_kernel_witness(s)
    if kernel is not None:
        return CheckResult(FAIL, 0.0, kernel)
    if s.kind not in GENERATOR_CHAINS:
        return CheckResult(PASS_PROVED, 1.0)
    if sample_count <= 0:
        return CheckResult(INCONCLUSIVE, 0.0, {"reason": "no samples"})
    rng = np.random.default_rng(seed)
    order = _chain_labels(s)
    low, high = order[0], order[-1]
    worst = np.inf
    for _ in range(sample_count):
        d = d_element(s, _random_vec(rng, s.dim(s.top)))
        ratio = norm(s.space(low), pi(s, low, d)) / norm(s.space(high), pi(s, high, d))
        worst = min(worst, ratio)
    if worst <= 1e-8:
        return CheckResult(INCONCLUSIVE, float(worst), {"reason": "norm ratio trends to 0"})
    return CheckResult(PASS_EMPIRICAL, float(worst))


def check_condition_C(s: ContractiveSystem, sample_count: int = 200, seed: int = 42,
                      steps: int = 60) -> CheckResult:
    """Norm compatibility. Empirical runs use d_n = 2^-n (d + e_n), ||d_n||_0 -> 0."""
    rep = validate_system(s)
    if not rep.ok:
        bad = [k for k, r in rep.axioms().items() if not r.passed]
        return CheckResult(FAIL, 0.0, {"upstream_axioms": bad})
    if pi_kernel_witness(s) is not None:
        return CheckResult(FAIL, 0.0, {"reason": "condition (A) fails; ||.||_0 is not a norm"})
    if s.kind not in GENERATOR_CHAINS:
        return CheckResult(PASS_PROVED, 0.0)
    if sample_count <= 0:
        return CheckResult(INCONCLUSIVE, 0.0, {"reason": "no samples"})
    rng = np.random.default_rng(seed)
    n = s.dim(s.top)
    worst = 0.0
    for _ in range(sample_count):
        base = _random_vec(rng, n)
        seq = [d_element(s, 2.0 ** -k * (base + 0.1 * 2.0 ** -k * _random_vec(rng, n)))
               for k in range(steps)]
        if norm0(s, seq[-1]) > 1e-12 * norm0(s, seq[0]):
            return CheckResult(INCONCLUSIVE, 0.0, {"reason": "sequence not ||.||_0-null"})
        for a in s.labels:
            sp = s.space(a)
            comps = [pi(s, a, d) for d in seq]
            scale = norm(sp, comps[0])
            worst = max(worst, norm(sp, comps[-1]) / scale)
    verdict = PASS_EMPIRICAL if worst <= 1e-9 else FAIL
    return CheckResult(verdict, float(worst))


@dataclass
class ParallelogramResult:
    violation: float
    witness: tuple[np.ndarray, np.ndarray] | None


def parallelogram_defect(s: ContractiveSystem, d: DElement, e: DElement) -> float:
    plus = d_element(s, d.vec + e.vec)
    minus = d_element(s, d.vec - e.vec)
    return abs(norm0(s, plus) ** 2 + norm0(s, minus) ** 2
               - 2 * norm0(s, d) ** 2 - 2 * norm0(s, e) ** 2)


def _normalized(s: ContractiveSystem, vec: np.ndarray) -> DElement:
    d = d_element(s, vec)
    n0 = norm0(s, d)
    return d_element(s, vec / n0) if n0 > 1e-300 else d


def check_parallelogram(s: ContractiveSystem, sample_count: int = 200,
                        seed: int = 42) -> ParallelogramResult:
    """Largest defect over pairs scaled to ||.||_0 = 1: basis pairs, then seeded samples."""
    n = s.dim(s.top)
    eye = np.eye(n, dtype=complex)
    cands = [(eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)]
    rng = np.random.default_rng(seed)
    cands += [(_random_vec(rng, n), _random_vec(rng, n)) for _ in range(sample_count)]
    worst, witness = 0.0, None
    for u, v in cands:
        d, e = _normalized(s, u), _normalized(s, v)
        defect = parallelogram_defect(s, d, e)
        if defect > worst:
            worst, witness = defect, (d.vec, e.vec)
    return ParallelogramResult(worst, witness)


@dataclass(frozen=True, eq=False)
class CentralSpace:
    space: MetricSpace
    provenance: str  # "minimum-element" or "polarization"

    @property
    def gram(self) -> np.ndarray:
        return self.space.gram


def inner0(h0: CentralSpace, x, y) -> complex:
    return complex(np.asarray(y).conj() @ h0.gram @ np.asarray(x))


def pulled_back_gram(s: ContractiveSystem, a: str) -> np.ndarray:
    """Gram of ||pi(a, .)||_a in anchor coordinates."""
    v = s.v_map(a, s.top).matrix
    return hermitian_part(v.conj().T @ s.space(a).gram @ v)


def build_h0(s: ContractiveSystem, sample_count: int = 200, seed: int = 42) -> CentralSpace:
    kernel = pi_kernel_witness(s)
    if kernel is not None:
        raise ConditionAViolation("some Pi_a has a kernel, ||.||_0 is degenerate", kernel)
    par = check_parallelogram(s, sample_count, seed)
    if par.violation > PARALLELOGRAM_TOL:
        raise ParallelogramViolation(par.violation, par.witness)
    m = s.poset.minimum
    if m is not None:
        return CentralSpace(MetricSpace(pulled_back_gram(s, m)), "minimum-element")
    n = s.dim(s.top)
    eye = np.eye(n, dtype=complex)
    g0 = np.zeros((n, n), dtype=complex)
    phases = (1, 1j, -1, -1j)
    for i in range(n):
        for j in range(n):
            # <e_i, e_j>_0 = 1/4 sum_k i^k ||e_i + i^k e_j||_0^2
            g0[j, i] = 0.25 * sum(p * norm0(s, d_element(s, eye[i] + p * eye[j])) ** 2
                                  for p in phases)
    h0 = CentralSpace(MetricSpace(hermitian_part(g0)), "polarization")
    rng = np.random.default_rng(seed + 1)
    for _ in range(max(sample_count, 1)):
        d = d_element(s, _random_vec(rng, n))
        direct = norm0(s, d)
        via = np.sqrt(max(inner0(h0, d.vec, d.vec).real, 0.0))
        if abs(direct - via) > 1e-9 * max(direct, 1.0):
            raise ParallelogramViolation(abs(direct - via) ** 2, (d.vec, d.vec))
    return h0


def sigma(s: ContractiveSystem, h0: CentralSpace, a: str) -> LinMap:
    """sigma_a : H_a -> H_0, the inverse of pi(a, .) in anchor coordinates."""
    v = s.v_map(a, s.top).matrix
    if v.shape[0] != v.shape[1]:
        raise NotInjective(f"pi({a}, .) is not bijective")
    return LinMap(s.space(a), h0.space, np.linalg.inv(v))


def j_embed(s: ContractiveSystem, h0: CentralSpace, eta) -> DxElement:
    """The class x with pair(x, d) = <d, eta>_0 for every d."""
    eta = h0.space.check_vector(eta)
    base = s.poset.minimum or s.top
    v = s.v_map(base, s.top).matrix
    lhs = v.conj().T @ s.space(base).gram
    return theta(s, base, np.linalg.solve(lhs, h0.gram @ eta))


@dataclass
class ReconstructedFamily:
    h0: CentralSpace
    grams: dict[str, np.ndarray]  # pulled-back Grams in H_0 coordinates
    B: dict[str, np.ndarray]
    A: dict[str, np.ndarray]
    max_gram_error: float

    def ofamily(self) -> OFamily:
        return OFamily(self.h0.space, self.A)


def metric_sqrt(h0: CentralSpace, target: np.ndarray) -> np.ndarray:
    """The G_0-selfadjoint positive B with B^H G_0 B = target."""
    w, winv = h0.space.root, h0.space.inv_root
    return winv @ psd_sqrt(hermitian_part(winv @ target @ winv)) @ w


def graph_operator(h0: CentralSpace, b: np.ndarray, tol_pd: float = 1e-10) -> np.ndarray:
    """(B^2 - I)^{1/2}, taken G_0-selfadjoint."""
    w, winv = h0.space.root, h0.space.inv_root
    bt = hermitian_part(w @ b @ winv)
    inside = hermitian_part(bt @ bt - np.eye(bt.shape[0]))
    tol = tol_pd * max(1.0, np.linalg.norm(inside, 2))
    vals, vecs = np.linalg.eigh(inside)
    if vals.min() < -tol:
        raise NotPSD("B^2 - I is not positive: H_0 is not below every H_a")
    # rounding-level eigenvalues are zeros; their square roots would be ~1e-8 noise
    roots = np.sqrt(np.where(vals <= 1e-12 * max(1.0, vals.max()), 0.0, vals))
    return winv @ ((vecs * roots) @ vecs.conj().T) @ w


def reconstruct_ofamily(s: ContractiveSystem, h0: CentralSpace) -> ReconstructedFamily:
    grams, bs, as_ = {}, {}, {}
    worst = 0.0
    g0 = h0.gram
    for a in s.labels:
        target = pulled_back_gram(s, a)
        b = metric_sqrt(h0, target)
        op = graph_operator(h0, b)
        rebuilt = g0 + op.conj().T @ g0 @ op
        err = np.linalg.norm(rebuilt - target, 2) / np.linalg.norm(target, 2)
        worst = max(worst, err)
        grams[a], bs[a], as_[a] = target, b, op
    return ReconstructedFamily(h0, grams, bs, as_, float(worst))


def family_from_B(h0: CentralSpace, bs: dict[str, np.ndarray]) -> ReconstructedFamily:
    """Family with the given B operators (A recomputed), e.g. after perturbing one."""
    g0 = h0.gram
    grams, as_ = {}, {}
    for a, b in bs.items():
        as_[a] = graph_operator(h0, b)
        grams[a] = hermitian_part(b.conj().T @ g0 @ b)
    return ReconstructedFamily(h0, grams, dict(bs), as_, 0.0)


def system_from_family(rec: ReconstructedFamily, tol=None, poset=None) -> ContractiveSystem:
    """Graph-norm system of the family, ordered by the operators or by ``poset``.

    Passing the original poset keeps indices whose operators tie (equal
    graph norms) apart instead of merging them.
    """
    if poset is None:
        s = build_system_from_ofamily(rec.ofamily(), tol=tol)
        s.kind = "reconstruction"
        return s
    f = rec.ofamily()
    spaces = {a: MetricSpace(f.graph_gram(a)) for a in poset.elements}
    maps = {(a, b): np.linalg.solve(spaces[b].gram, spaces[a].gram) for a, b in poset.edges}
    return ContractiveSystem(poset, spaces, maps, kind="reconstruction", tol=tol)


def operator_order_matches(s: ContractiveSystem, rec: ReconstructedFamily) -> bool:
    """a <= b in the poset exactly when A_a^H G_0 A_a <= A_b^H G_0 A_b."""
    g0 = rec.h0.gram
    forms = {a: op.conj().T @ g0 @ op for a, op in rec.A.items()}
    scale = max(np.linalg.norm(f, 2) for f in forms.values()) or 1.0
    for a in s.labels:
        for b in s.labels:
            psd = np.linalg.eigvalsh(hermitian_part(forms[b] - forms[a])).min() >= -1e-9 * scale
            if psd != s.poset.leq(a, b):
                return False
    return True


def intertwiner(s: ContractiveSystem, s2: ContractiveSystem) -> CheckResult:
    """Build T on D^x piecewise from Gamma_a o Theta_a^{-1} and test consistency.

    Both systems must share labels and anchor coordinates for D. The second
    system's H_a is identified with the first's through D, by
    phi_a = Pi'_a o Pi_a^{-1}; Gamma_a = Theta'_a o phi_a.
    """
    if set(s.labels) != set(s2.labels):
        raise IndexMismatch(f"{sorted(s.labels)} vs {sorted(s2.labels)}")
    top, top2 = s.top, s2.top
    if top != top2 or s.dim(top) != s2.dim(top2):
        raise IndexMismatch("systems disagree on the top index or dim D")
    phi = {}
    for a in s.labels:
        v = s.v_map(a, top).matrix
        if v.shape[0] != v.shape[1]:
            raise NotInjective(f"pi({a}, .) is not bijective")
        phi[a] = s2.v_map(a, top2).matrix @ np.linalg.inv(v)

    worst, where = 0.0, None

    def note(val, tag):
        nonlocal worst, where
        if val > worst:
            worst, where = float(val), tag

    # extension consistency: T_b restricted to Theta_a(H_a) equals T_a
    for a, b in s.poset.comparable_pairs(strict=True):
        lhs = phi[b] @ s.u_map(a, b).matrix
        rhs = s2.u_map(a, b).matrix @ phi[a]
        note(np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2)), ["extension", a, b])
    # Gamma_a = T o Theta_a, with T evaluated by lifting to the top
    for a in s.labels:
        for xi in np.eye(s.dim(a), dtype=complex):
            t_x = theta(s2, top2, phi[top] @ s.u_map(a, top)(xi))
            gamma_x = theta(s2, a, phi[a] @ xi)
            note(dx_distance(s2, t_x, gamma_x), ["gamma", a])
    # second pair satisfies the pairing identity: B'(Gamma_a eta, d) = <Delta_a d, eta>_a
    # with Delta_a = phi_a^{-1} Pi'_a; and Delta_a = Pi_a o T^x
    g_top, g2_top = s.space(top).gram, s2.space(top2).gram
    t_cross = np.linalg.solve(g_top, phi[top].conj().T @ g2_top)
    for a in s.labels:
        ga, g2a = s.space(a).gram, s2.space(a).gram
        lhs = phi[a].conj().T @ g2a
        rhs = ga @ np.linalg.inv(phi[a])
        note(np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2)), ["pairing", a])
        delta = np.linalg.solve(phi[a], s2.v_map(a, top2).matrix)
        via_t = s.v_map(a, top).matrix @ t_cross
        note(np.linalg.norm(delta - via_t, 2) / max(1.0, np.linalg.norm(delta, 2)), ["delta", a])
    verdict = PASS if worst <= 1e-8 else FAIL
    return CheckResult(verdict, worst, {"worst_at": where})


def central_norm_is_norm(s: ContractiveSystem, samples: int = 50, seed: int = 0) -> float:
    """Largest triangle/homogeneity defect of ||.||_0 over seeded samples."""
    rng = np.random.default_rng(seed)
    n = s.dim(s.top)
    worst = 0.0
    for _ in range(samples):
        d = d_element(s, _random_vec(rng, n))
        e = d_element(s, _random_vec(rng, n))
        c = complex(*rng.standard_normal(2))
        tri = norm0(s, d_element(s, d.vec + e.vec)) - norm0(s, d) - norm0(s, e)
        hom = abs(norm0(s, d_element(s, c * d.vec)) - abs(c) * norm0(s, d))
        worst = max(worst, tri, hom)
    return worst


def j_bound_ok(s: ContractiveSystem, h0: CentralSpace, eta, d: DElement) -> bool:
    """|<d, eta>_0| <= ||pi(a, d)||_a ||eta||_0 for every a."""
    val = abs(pair(s, j_embed(s, h0, eta), d))
    n_eta = np.sqrt(inner0(h0, eta, eta).real)
    return all(val <= norm(s.space(a), pi(s, a, d)) * n_eta * (1 + 1e-10) + 1e-12
               for a in s.labels)

