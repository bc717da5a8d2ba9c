"""Built-in systems: shift chains, weighted grids, operator families, random fuzz."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimOrderViolation
from .hspace import MetricSpace, hermitian_part, psd_sqrt
from .ofamily import OFamily, build_system_from_ofamily
from .poset import IndexPoset, build_poset, check_directed
from .system import ContractiveSystem, Tolerances

WEIGHT_FORMS = ("one-plus-abs-pow", "paper-literal")


def _chain(levels: int) -> tuple[list[str], list[tuple[str, str]]]:
    labels = [str(k) for k in range(levels)]
    return labels, list(zip(labels, labels[1:]))


def gen_shift_chain(dim: int, levels: int, tol: Tolerances | None = None) -> ContractiveSystem:
    """``levels`` copies of C^dim linked by the cyclic shift (a unitary)."""
    if dim < 1 or levels < 1:
        raise ValueError("dim and levels must be >= 1")
    labels, covers = _chain(levels)
    shift = np.roll(np.eye(dim), 1, axis=0)
    sp = MetricSpace.euclidean(dim)
    return ContractiveSystem(build_poset(labels, covers), {e: sp for e in labels},
                             {c: shift for c in covers}, kind="shift-chain", tol=tol,
                             meta={"dim": dim, "levels": levels})


def grid_weight(x: np.ndarray, alpha: float, form: str = "one-plus-abs-pow") -> np.ndarray:
    ax = np.abs(x)
    if form == "one-plus-abs-pow":
        return (1.0 + ax) ** alpha
    if form == "paper-literal":
        return 1.0 + ax ** alpha  # 0**0 == 1
    raise ValueError(f"unknown weight form {form!r}; expected one of {WEIGHT_FORMS}")


def alpha_label(a: float) -> str:
    return f"{a:g}"


def gen_weighted_grid(xmin: float = -1.0, xmax: float = 1.0, points: int = 21,
                      alphas: Sequence[float] = (0, 1, 2, 3, 4),
                      weight_form: str = "one-plus-abs-pow", grid: Sequence[float] | None = None,
                      tol: Tolerances | None = None) -> ContractiveSystem:
    """Counting-measure L^2 spaces on a grid with weights w_a; U_ba = diag(w_a / w_b)."""
    alphas = [float(a) for a in alphas]
    if not alphas or any(a < 0 for a in alphas) or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be nonempty, nonnegative and strictly increasing")
    if grid is None:
        if points < 1:
            raise ValueError("points must be >= 1")
        x = np.linspace(xmin, xmax, points)
    else:
        x = np.asarray(grid, dtype=float)
    labels = [alpha_label(a) for a in alphas]
    weights = {lab: grid_weight(x, a, weight_form) for lab, a in zip(labels, alphas)}
    spaces = {lab: MetricSpace(np.diag(w)) for lab, w in weights.items()}
    covers = list(zip(labels, labels[1:]))
    maps = {(a, b): np.diag(weights[a] / weights[b]) for a, b in covers}
    return ContractiveSystem(build_poset(labels, covers), spaces, maps, kind="weighted-grid",
                             tol=tol, meta={"grid": x.tolist(), "weight_form": weight_form})


def e1_ofamily() -> OFamily:
    return OFamily(MetricSpace.euclidean(2), {"1": np.diag([1.0, 2.0]), "2": np.diag([2.0, 3.0])})


def gen_e1(tol: Tolerances | None = None) -> ContractiveSystem:
    """The two-level system from A_1 = diag(1,2) <= A_2 = diag(2,3)."""
    return build_system_from_ofamily(e1_ofamily(), tol=tol)


def gen_diamond(tol: Tolerances | None = None) -> ContractiveSystem:
    """Two minimal indices under one top, where the infimum norm is not Hilbertian."""
    ga, gb, gc = np.diag([1.0, 4.0]), np.diag([4.0, 1.0]), np.diag([4.0, 4.0])
    return ContractiveSystem.from_matrices(
        ["a", "b", "c"], {"a": ga, "b": gb, "c": gc},
        {("a", "c"): np.linalg.solve(gc, ga), ("b", "c"): np.linalg.solve(gc, gb)},
        kind="explicit", tol=tol)


def gen_single(gram=None, tol: Tolerances | None = None) -> ContractiveSystem:
    g = np.eye(1) if gram is None else np.asarray(gram)
    return ContractiveSystem.from_matrices(["0"], {"0": g}, {}, tol=tol)


def _random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    r = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    return r @ r.conj().T


def random_gram(rng: np.random.Generator, n: int) -> np.ndarray:
    """I + R R^H with R R^H normalized to unit spectral norm."""
    p = _random_psd(rng, n)
    return hermitian_part(np.eye(n) + p / np.linalg.norm(p, 2))


def _random_invertible(rng: np.random.Generator, n: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q @ np.diag(rng.uniform(0.5, 1.5, n))


def gen_random_poset(seed: int, n: int, p: float = 0.4) -> IndexPoset:
    """Random directed poset on labels p0..p{n-1}; p{n-1} is the top."""
    rng = np.random.default_rng(seed)
    labels = [f"p{k}" for k in range(n)]
    covers = []
    for i in range(n - 1):
        outs = [j for j in range(i + 1, n) if rng.random() < p]
        if not outs:
            outs = [n - 1]
        covers += [(labels[i], labels[j]) for j in outs]
    full = build_poset(labels, covers)
    return build_poset(labels, full.covering_pairs())


def gen_random_system(seed: int, dims: dict[str, int] | Sequence[int],
                      poset: IndexPoset, tol: Tolerances | None = None) -> ContractiveSystem:
    """Random valid system on ``poset``.

    Built in whitened form: nested coordinate subspaces R_a of C^N (N = dim at
    the top) carry forms q_a = q_top + sum of increments P_g over g >= a, g != top,
    so q_b <= q_a on R_a whenever a <= b. All increments vanish on one shared
    direction, which makes every linking map have whitened norm exactly 1 and
    whitened singular values at least 1/2. Local coordinates are then scrambled
    by random invertible matrices.
    """
    if check_directed(poset) is not None:
        raise ValueError("poset is not directed")
    labels = list(poset.elements)
    if not isinstance(dims, dict):
        dims = dict(zip(labels, dims))
    for a, b in poset.comparable_pairs(strict=True):
        if dims[a] > dims[b]:
            raise DimOrderViolation(f"dim {a}={dims[a]} exceeds dim {b}={dims[b]}")
    rng = np.random.default_rng(seed)
    top = poset.top
    n = dims[top]
    if any(d < 1 for d in dims.values()):
        raise ValueError("dimensions must be positive")
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    shared = basis[:, 0]
    rest = basis[:, 1:]
    proj = rest @ rest.conj().T  # exactly zero when n == 1
    q_top = hermitian_part(proj @ random_gram(rng, n) @ proj + np.outer(shared, shared.conj()))
    k = max(1, len(labels) - 1)
    incr = {}
    for g in labels:
        if g == top:
            continue
        p = _random_psd(rng, n)
        p = proj @ p @ proj
        scale = np.linalg.norm(p, 2)
        incr[g] = hermitian_part(p * rng.uniform(0.2, 1.0) / (k * scale)) if scale > 0 else p
    forms = {}
    for a in labels:
        q = q_top.copy()
        for g, p in incr.items():
            if poset.leq(a, g):
                q = q + p
        forms[a] = q
    embed = {a: basis[:, : dims[a]] @ _random_invertible(rng, dims[a]) for a in labels}
    grams = {a: hermitian_part(embed[a].conj().T @ forms[a] @ embed[a]) for a in labels}
    maps = {}
    for a, b in poset.edges:
        maps[(a, b)] = np.linalg.lstsq(embed[b], embed[a], rcond=None)[0]
    spaces = {a: MetricSpace(grams[a]) for a in labels}
    return ContractiveSystem(poset, spaces, maps, kind="random", tol=tol,
                             meta={"seed": seed, "dims": dict(dims)})


def random_dims(seed: int, poset: IndexPoset, max_dim: int = 8, equal: bool = False) -> dict[str, int]:
    """Dimensions that never decrease along the order."""
    rng = np.random.default_rng(seed)
    if equal:
        d = int(rng.integers(1, max_dim + 1))
        return {e: d for e in poset.elements}
    m = poset.leq_matrix
    depth = m.sum(axis=0)  # number of elements below, plus one
    out = {}
    for i in np.argsort(depth, kind="stable"):
        e = poset.elements[i]
        below = [out[poset.elements[j]] for j in range(len(poset)) if m[j, i] and j != i]
        lo = max(below, default=1)
        out[e] = int(rng.integers(lo, max_dim + 1))
    return out


def random_ordered_pair(seed: int, dim: int, base_gram: np.ndarray | None = None) -> OFamily:
    """Two non-commuting operators A <= B on a random base space."""
    rng = np.random.default_rng(seed)
    g = random_gram(rng, dim) if base_gram is None else base_gram
    base = MetricSpace(g)
    return OFamily(base, _pair_ops(rng, base))


def _operator_with_form(rng, base: MetricSpace, form: np.ndarray) -> np.ndarray:
    """Some A with A^H G A = form: a random unitary times G^{-1/2} form^{1/2}."""
    n = base.dim
    u, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return base.inv_root @ u @ psd_sqrt(hermitian_part(form))


def _pair_ops(rng, base: MetricSpace) -> dict[str, np.ndarray]:
    n = base.dim
    fa = _random_psd(rng, n)
    fb = fa + _random_psd(rng, n, max(1, n // 2))
    return {"A": _operator_with_form(rng, base, fa), "B": _operator_with_form(rng, base, fb)}


def gen_random_ofamily(seed: int, dim: int, shape: str = "diamond") -> OFamily:
    """Random directed operator family with a minimum (``chain`` or ``diamond`` shaped)."""
    rng = np.random.default_rng(seed)
    base = MetricSpace(random_gram(rng, dim))
    f0 = _random_psd(rng, dim) * 0.5
    if shape == "chain":
        forms = {"a0": f0}
        acc = f0
        for k in range(1, 4):
            acc = acc + _random_psd(rng, dim, max(1, dim // 2))
            forms[f"a{k}"] = acc
    elif shape == "diamond":
        p1 = _random_psd(rng, dim, max(1, dim // 2))
        p2 = _random_psd(rng, dim, max(1, dim // 2))
        forms = {"bot": f0, "left": f0 + p1, "right": f0 + p2,
                 "top": f0 + p1 + p2 + _random_psd(rng, dim, 1)}
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return OFamily(base, {k: _operator_with_form(rng, base, v) for k, v in forms.items()})
