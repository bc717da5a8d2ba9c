"""Finite-dimensional Hilbert spaces given by Gram matrices.

Inner products are linear in the first slot: ``inner(sp, x, y) = y^H G x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPSD, SingularGram

TOL_REL = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimMismatch(f"expected a matrix, got shape {m.shape}")
    return m


def as_complex_vector(a) -> np.ndarray:
    v = np.array(a, dtype=complex)
    if v.ndim != 1:
        raise DimMismatch(f"expected a vector, got shape {v.shape}")
    return v


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def psd_sqrt(h, tol_pd: float | None = None, inverse: bool = False) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in ``[-tol_pd, 0]`` are clamped to zero. With ``inverse`` the
    inverse root is returned instead (all eigenvalues must then be positive).
    """
    h = as_complex_matrix(h)
    scale = max(np.linalg.norm(h, 2), 1.0)
    if tol_pd is None:
        tol_pd = TOL_REL * scale
    if np.linalg.norm(h - h.conj().T, 2) > TOL_REL * scale:
        raise NotHermitian("matrix is not Hermitian")
    w, q = np.linalg.eigh(hermitian_part(h))
    if w.min(initial=0.0) < -tol_pd:
        raise NotPSD(f"eigenvalue {w.min():.3e} below -{tol_pd:.1e}")
    w = np.clip(w, 0.0, None)
    if inverse:
        if w.min(initial=1.0) <= 0.0:
            raise SingularGram("inverse square root of a singular matrix")
        d = 1.0 / np.sqrt(w)
    else:
        d = np.sqrt(w)
    return (q * d) @ q.conj().T


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """ℂ^dim with inner product ``y^H G x``."""

    gram: np.ndarray
    tol_herm: float | None = None
    tol_pd: float | None = None
    _root: np.ndarray = field(init=False, repr=False)
    _inv_root: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = as_complex_matrix(self.gram)
        if g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise DimMismatch(f"Gram matrix must be square and nonempty, got {g.shape}")
        scale = np.linalg.norm(g, 2)
        tol_herm = TOL_REL * scale if self.tol_herm is None else self.tol_herm
        tol_pd = TOL_REL * scale if self.tol_pd is None else self.tol_pd
        if np.linalg.norm(g - g.conj().T, 2) > tol_herm:
            raise NotHermitian("Gram matrix is not Hermitian")
        g = hermitian_part(g)
        w, q = np.linalg.eigh(g)
        if w[0] <= tol_pd:
            raise NotPSD(f"Gram matrix not positive definite (min eigenvalue {w[0]:.3e})")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_root", (q * np.sqrt(w)) @ q.conj().T)
        object.__setattr__(self, "_inv_root", (q / np.sqrt(w)) @ q.conj().T)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def root(self) -> np.ndarray:
        """G^{1/2}; maps coordinates to an orthonormal frame."""
        return self._root

    @property
    def inv_root(self) -> np.ndarray:
        return self._inv_root

    def check_vector(self, x) -> np.ndarray:
        x = as_complex_vector(x)
        if x.shape[0] != self.dim:
            raise DimMismatch(f"vector of length {x.shape[0]} in a space of dim {self.dim}")
        return x

    @classmethod
    def euclidean(cls, dim: int) -> "MetricSpace":
        return cls(np.eye(dim))


def inner(sp: MetricSpace, x, y) -> complex:
    x = sp.check_vector(x)
    y = sp.check_vector(y)
    return complex(y.conj() @ sp.gram @ x)


def norm(sp: MetricSpace, x) -> float:
    return float(np.sqrt(max(inner(sp, x, x).real, 0.0)))


@dataclass(frozen=True, eq=False)
class LinMap:
    src: MetricSpace
    dst: MetricSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape != (self.dst.dim, self.src.dim):
            raise DimMismatch(
                f"map matrix {m.shape} does not fit {self.src.dim} -> {self.dst.dim}")
        object.__setattr__(self, "matrix", m)

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ self.src.check_vector(x)

    def __matmul__(self, other: "LinMap") -> "LinMap":
        if other.dst is not self.src and other.dst.dim != self.src.dim:
            raise DimMismatch("cannot compose maps with mismatched spaces")
        return LinMap(other.src, self.dst, self.matrix @ other.matrix)

    def whitened(self) -> np.ndarray:
        """Matrix of the map between orthonormal frames: G_dst^{1/2} M G_src^{-1/2}."""
        return self.dst.root @ self.matrix @ self.src.inv_root

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.whitened(), compute_uv=False)


def adjoint(m: LinMap) -> LinMap:
    """The metric adjoint ``G_src^{-1} M^H G_dst``."""
    try:
        core = np.linalg.solve(m.src.gram, m.matrix.conj().T @ m.dst.gram)
    except np.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
    return LinMap(m.dst, m.src, core)


def op_norm(m: LinMap) -> float:
    sv = m.singular_values()
    return float(sv[0]) if sv.size else 0.0


def min_singular_value(m: LinMap) -> float:
    """Smallest whitened singular value over the source dimension (0 if not injective)."""
    if m.src.dim > m.dst.dim:
        return 0.0
    sv = m.singular_values()
    return float(sv[-1]) if sv.size else 0.0


def identity_map(sp: MetricSpace) -> LinMap:
    return LinMap(sp, sp, np.eye(sp.dim, dtype=complex))


def riesz_vector(sp: MetricSpace, coeffs) -> np.ndarray:
    """Vector eta with inner(sp, x, eta) = sum_k coeffs[k] x[k] for all x."""
    c = sp.check_vector(coeffs)
    try:
        return np.linalg.solve(sp.gram, c.conj())
    except np.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
