"""Finite directed index sets.

A poset is stored as its element list plus the reflexive-transitive closure of
the user supplied cover relation, as a boolean matrix ``leq[i, j] <=> e_i <= e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleError, NotComparable, NotDirected, UnknownLabel


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a square boolean relation (Warshall)."""
    closed = np.array(rel, dtype=bool, copy=True)
    np.fill_diagonal(closed, True)
    for k in range(closed.shape[0]):
        closed |= np.outer(closed[:, k], closed[k, :])
    return closed


@dataclass(frozen=True, eq=False)
class IndexPoset:
    elements: tuple[str, ...]
    leq_matrix: np.ndarray = field(repr=False)
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        self.leq_matrix.setflags(write=False)

    def index(self, label: str) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise UnknownLabel(label) from None

    @property
    def _positions(self) -> dict[str, int]:
        pos = self.__dict__.get("_pos")
        if pos is None:
            pos = {e: i for i, e in enumerate(self.elements)}
            object.__setattr__(self, "_pos", pos)
        return pos

    def __len__(self):
        return len(self.elements)

    def __contains__(self, label):
        return label in self._positions

    def leq(self, a: str, b: str) -> bool:
        return bool(self.leq_matrix[self.index(a), self.index(b)])

    def comparable(self, a: str, b: str) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def upper_bounds(self, a: str, b: str) -> list[str]:
        col = self.leq_matrix[self.index(a)] & self.leq_matrix[self.index(b)]
        return [e for e, flag in zip(self.elements, col) if flag]

    def comparable_pairs(self, strict: bool = True) -> list[tuple[str, str]]:
        """All (a, b) with a <= b, in element-list order."""
        out = []
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                if self.leq_matrix[i, j] and not (strict and i == j):
                    out.append((a, b))
        return out

    def covering_pairs(self) -> list[tuple[str, str]]:
        """Hasse diagram: a < b with nothing strictly between."""
        m = self.leq_matrix
        n = len(self)
        strict = m & ~np.eye(n, dtype=bool)
        out = []
        for i in range(n):
            for j in range(n):
                if strict[i, j] and not np.any(strict[i] & strict[:, j]):
                    out.append((self.elements[i], self.elements[j]))
        return out

    def minimal_elements(self) -> list[str]:
        strict = self.leq_matrix & ~np.eye(len(self), dtype=bool)
        return [e for j, e in enumerate(self.elements) if not strict[:, j].any()]

    def maximal_elements(self) -> list[str]:
        strict = self.leq_matrix & ~np.eye(len(self), dtype=bool)
        return [e for i, e in enumerate(self.elements) if not strict[i].any()]

    @property
    def minimum(self) -> str | None:
        """The least element, if there is one."""
        for i, e in enumerate(self.elements):
            if self.leq_matrix[i].all():
                return e
        return None

    @property
    def top(self) -> str:
        """Greatest element. A finite directed poset always has one."""
        for j, e in enumerate(self.elements):
            if self.leq_matrix[:, j].all():
                return e
        witness = check_directed(self)
        raise NotDirected(f"no greatest element; {witness} has no upper bound")

    def chain_between(self, a: str, b: str) -> list[str]:
        """Some maximal chain of covers a = c0 < c1 < ... < ck = b."""
        if not self.leq(a, b):
            raise NotComparable(f"{a!r} is not <= {b!r}")
        path = [a]
        cur = a
        covers = self.covering_pairs()
        while cur != b:
            for lo, hi in covers:
                if lo == cur and self.leq(hi, b):
                    cur = hi
                    break
            path.append(cur)
        return path


def build_poset(elements: Sequence[str], covers: Iterable[Sequence[str]]) -> IndexPoset:
    """Close ``covers`` reflexively and transitively; reject cycles."""
    labels = tuple(str(e) for e in elements)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate labels in {labels!r}")
    pos = {e: i for i, e in enumerate(labels)}
    n = len(labels)
    rel = np.zeros((n, n), dtype=bool)
    edges = []
    for pair in covers:
        a, b = (str(x) for x in pair)
        for x in (a, b):
            if x not in pos:
                raise UnknownLabel(x)
        rel[pos[a], pos[b]] = True
        edges.append((a, b))
    closed = transitive_closure(rel)
    both = closed & closed.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = np.argwhere(both)[0]
        raise CycleError(f"{labels[i]} <= {labels[j]} <= {labels[i]}")
    return IndexPoset(labels, closed, tuple(edges))


def check_directed(p: IndexPoset) -> tuple[str, str] | None:
    """None if directed, else the first pair lacking a common upper bound."""
    m = p.leq_matrix
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if not (m[i] & m[j]).any():
                return (p.elements[i], p.elements[j])
    return None


def upper_bound(p: IndexPoset, a: str, b: str) -> str:
    """Least upper bound if unique, else the earliest minimal upper bound."""
    ubs = p.upper_bounds(a, b)
    if not ubs:
        raise NotDirected(f"{a!r} and {b!r} have no common upper bound")
    minimal = [u for u in ubs if not any(v != u and p.leq(v, u) for v in ubs)]
    return minimal[0]
