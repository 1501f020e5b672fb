"""Logarithmic root polytopes of type A.

For an integer point ``p`` with all coordinates > 1 put
``a_i = log((p_i + 1)/p_i)`` and ``b_j = log(p_j/(p_j - 1))``. The polytope is
the convex hull of the ``n(n-1)`` points

    v_ij = (a_i e_i - b_j e_j - (a_i - b_j)/n * 1) / (b_j p_j - a_i p_i),

and its polar (about the origin of the sum-zero hyperplane), translated by
``p``, is the logarithmic Voronoi cell of ``p`` in the grid model.

Indices are 0-based throughout this module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .polytope import HPolytope, VPolytope, dual_of


class CoordinateTooSmall(ValueError):
    pass


class TrivialFace(ValueError):
    pass


@dataclass(frozen=True)
class OrderedPartitionPair:
    """Two disjoint nonempty index sets ``I`` and ``J``."""

    I: frozenset
    J: frozenset

    def __init__(self, I: Iterable[int], J: Iterable[int]):
        I, J = frozenset(int(i) for i in I), frozenset(int(j) for j in J)
        if not I or not J:
            raise ValueError("both blocks must be nonempty")
        if I & J:
            raise ValueError("blocks must be disjoint")
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "J", J)

    @property
    def face_dim(self) -> int:
        return len(self.I) + len(self.J) - 2

    def __repr__(self):
        return f"({sorted(self.I)}, {sorted(self.J)})"


def partition_pairs(n: int):
    """All ordered pairs of disjoint nonempty subsets of range(n)."""
    # each index goes to I, J or neither
    for labels in itertools.product((0, 1, 2), repeat=n):
        I = [k for k, s in enumerate(labels) if s == 1]
        J = [k for k, s in enumerate(labels) if s == 2]
        if I and J:
            yield OrderedPartitionPair(I, J)


@dataclass(frozen=True, eq=False)
class LogRootPolytope:
    p: np.ndarray
    a: np.ndarray
    b: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    vertices: np.ndarray

    @property
    def n(self) -> int:
        return self.p.size

    @property
    def d(self) -> int:
        return int(self.p.sum())

    def vertex(self, i: int, j: int) -> np.ndarray:
        return self.vertices[self.pairs.index((i, j))]

    def as_vpolytope(self) -> VPolytope:
        return VPolytope(self.vertices)


def _vertex(a, b, p, i, j):
    n = p.size
    w = np.full(n, -(a[i] - b[j]) / n)
    w[i] += a[i]
    w[j] -= b[j]
    return w / (b[j] * p[j] - a[i] * p[i])


def build(p) -> LogRootPolytope:
    """Logarithmic root polytope of the grid point ``p``.

    Raises
    ------
    CoordinateTooSmall
        When some ``p_i <= 1``.
    """
    p_int = np.asarray(p)
    if not np.allclose(p_int, np.round(p_int)):
        raise ValueError("p must be an integer vector")
    p = np.round(p_int).astype(float)
    if p.size < 2:
        raise ValueError("need n >= 2")
    if np.any(p <= 1):
        raise CoordinateTooSmall(f"all coordinates must exceed 1, got {p.astype(int).tolist()}")
    a = np.log((p + 1) / p)
    b = np.log(p / (p - 1))
    pairs = tuple((i, j) for i in range(p.size) for j in range(p.size) if i != j)
    V = np.array([_vertex(a, b, p, i, j) for i, j in pairs])
    return LogRootPolytope(p, a, b, pairs, V)


def _mono(x, S) -> float:
    return math.prod(x[k] for k in S)


def face_functional(poly: LogRootPolytope, part: OrderedPartitionPair) -> np.ndarray:
    """The linear functional ``g_IJ`` maximized exactly on the face of (I, J)."""
    a, b, p = poly.a, poly.b, poly.p
    I, J = part.I, part.J
    g = np.zeros(poly.n)
    for l in range(poly.n):
        if l in I:
            g[l] = sum(
                _mono(a, I - {l, i}) * _mono(b, J) * (a[i] * p[i] - a[l] * p[l]) for i in I if i != l
            ) + sum(_mono(a, I - {l}) * _mono(b, J - {j}) * (b[j] * p[j] - a[l] * p[l]) for j in J)
        elif l in J:
            g[l] = sum(
                _mono(a, I - {i}) * _mono(b, J - {l}) * (a[i] * p[i] - b[l] * p[l]) for i in I
            ) + sum(_mono(a, I) * _mono(b, J - {l, j}) * (b[j] * p[j] - b[l] * p[l]) for j in J if j != l)
    return g


def face_value(poly: LogRootPolytope, part: OrderedPartitionPair) -> float:
    """Closed-form common value of ``g_IJ`` on the face vertices."""
    a, b = poly.a, poly.b
    I, J = part.I, part.J
    return sum(_mono(a, I - {i}) * _mono(b, J) for i in I) + sum(_mono(a, I) * _mono(b, J - {j}) for j in J)


@dataclass
class FaceCertificate:
    """Values of ``g_IJ`` on every vertex; ``on_face`` masks the face vertices."""

    pairs: list[tuple[int, int]]
    values: np.ndarray
    on_face: np.ndarray
    common_value: float
    best_other: float

    @property
    def spread(self) -> float:
        on = self.values[self.on_face]
        return float(on.max() - on.min())

    @property
    def gap(self) -> float:
        return self.common_value - self.best_other


def face_vertices(poly: LogRootPolytope, part: OrderedPartitionPair) -> FaceCertificate:
    """Vertices ``v_ij`` (i in I, j in J) with the values of ``g_IJ`` on all vertices."""
    g = face_functional(poly, part)
    vals = poly.vertices @ g
    on = np.array([i in part.I and j in part.J for i, j in poly.pairs])
    others = vals[~on]
    return FaceCertificate(
        pairs=[pr for pr, o in zip(poly.pairs, on) if o],
        values=vals,
        common_value=face_value(poly, part),
        best_other=float(others.max()) if others.size else -np.inf,
        on_face=on,
    )


def partition_from_functional(poly: LogRootPolytope, f, rtol: float = 1e-12) -> OrderedPartitionPair:
    """The pair (I, J) whose face is the argmax of ``f`` over the polytope.

    Raises
    ------
    TrivialFace
        If ``f`` is maximized by every vertex.
    """
    f = np.asarray(f, dtype=float)
    vals = poly.vertices @ f
    scale = max(np.abs(f).max() * np.abs(poly.vertices).max(), 1e-300)
    top = vals >= vals.max() - rtol * scale
    if top.all():
        raise TrivialFace("functional is constant on the polytope")
    hit = [pr for pr, t in zip(poly.pairs, top) if t]
    part = OrderedPartitionPair({i for i, _ in hit}, {j for _, j in hit})
    if len(hit) != len(part.I) * len(part.J):
        raise ArithmeticError("argmax set is not a product I x J; increase precision")
    return part


def partition_by_ratios(poly: LogRootPolytope, f) -> OrderedPartitionPair:
    """Sign-and-ratio recovery of (I', J') from a functional.

    Indices with ``f_l >= 0`` form ``I``, the rest ``J``; the ratios
    ``f_l / g_l`` against ``g_IJ`` then select the extreme indices.
    Only meaningful when every coordinate of ``g_IJ`` is nonzero.
    """
    f = np.asarray(f, dtype=float)
    f = f - f.mean()
    I = {k for k in range(poly.n) if f[k] >= 0}
    J = set(range(poly.n)) - I
    if not I or not J:
        raise TrivialFace("functional has a single sign after centering")
    g = face_functional(poly, OrderedPartitionPair(I, J))
    ratio = f / g
    ri = max(ratio[k] for k in I)
    rj = max(ratio[k] for k in J)
    close = lambda x, y: abs(x - y) <= 1e-12 * max(1.0, abs(y))  # noqa: E731
    return OrderedPartitionPair({k for k in I if close(ratio[k], ri)}, {k for k in J if close(ratio[k], rj)})


def f_vector_combinatorial(n: int) -> tuple[int, ...]:
    """Face counts of the root polytope of type A_{n-1}, padded with 1s."""
    if n < 2:
        raise ValueError("need n >= 2")
    counts = [
        sum(math.comb(n, s) * math.comb(n - s, m + 2 - s) for s in range(1, m + 2))
        for m in range(n - 1)
    ]
    return (1, *counts, 1)


def dual_cell(poly: LogRootPolytope) -> VPolytope:
    """Logarithmic Voronoi cell of ``p`` in the scaled simplex ``sum(u) = d``."""
    polar = dual_of(poly.as_vpolytope(), np.zeros(poly.n))
    return VPolytope(polar.vertices + poly.p)


@dataclass(frozen=True)
class RootHalfspace:
    """``H_delta(u) = coefficients . u >= 0`` for the root ``delta = e_i - e_j``."""

    i: int
    j: int
    coefficients: np.ndarray

    def __call__(self, u) -> float:
        return float(np.asarray(u, dtype=float) @ self.coefficients)


def sufficient_halfspaces(p) -> list[RootHalfspace]:
    """Halfspaces for the neighbours ``q = p + e_i - e_j``.

    There are ``n(n-1)`` of them when every ``p_j > 1``. A neighbour with
    ``q_j = 0`` has likelihood -inf on positive data, so pairs with
    ``p_j = 1`` are skipped.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 1):
        raise CoordinateTooSmall("all coordinates must be at least 1")
    out = []
    for i in range(p.size):
        for j in range(p.size):
            if i != j and p[j] > 1:
                c = np.zeros(p.size)
                c[i] = np.log(p[i] / (p[i] + 1))
                c[j] = np.log(p[j] / (p[j] - 1))
                out.append(RootHalfspace(i, j, c))
    return out


def sufficient_cell(p) -> HPolytope:
    """H-description of the cell from the root halfspaces and ``sum(u) = d``."""
    p = np.asarray(p, dtype=float)
    hs = sufficient_halfspaces(p)
    n = p.size
    A = np.vstack([-h.coefficients for h in hs] + [-np.eye(n)]).reshape(-1, n)
    b = np.zeros(A.shape[0])
    return HPolytope(A, b, np.ones((1, n)), [p.sum()])


def affine_identity_check(poly: LogRootPolytope, i: int, j: int, i1: int, j1: int) -> tuple[float, float]:
    """Residual of ``v_ij`` against its affine expression in
    ``v_{i,j1}``, ``v_{i1,j1}``, ``v_{i1,j}``; also returns the coefficient sum.

    Requires ``i, i1`` distinct from ``j, j1``.
    """
    a, b, p = poly.a, poly.b, poly.p
    den = b[j] * p[j] - a[i] * p[i]
    c1 = (b[j1] * p[j1] - a[i] * p[i]) / den
    c2 = -(b[j1] * p[j1] - a[i1] * p[i1]) / den
    c3 = (b[j] * p[j] - a[i1] * p[i1]) / den
    v = lambda r, s: _vertex(a, b, p, r, s)  # noqa: E731
    combo = c1 * v(i, j1) + c2 * v(i1, j1) + c3 * v(i1, j)
    return float(np.max(np.abs(v(i, j) - combo))), c1 + c2 + c3
