"""Log-normal spaces and polytopes, Voronoi cells and cell sampling.

For a smooth model point ``p`` the log-normal space is
``diag(p) @ N_p`` where ``N_p`` is the normal space of the model at ``p``
(it contains the all-ones direction). Its intersection with the closed
scaled simplex is the log-normal polytope, which always contains the
logarithmic Voronoi cell of ``p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles
from scipy.optimize import linprog

from . import linalg
from .mle import (
    Tie,
    build_critical_system,
    find_critical_points_many,
    log_likelihood,
    mle_finite,
    mle_linear,
    mle_toric,
)
from .model import FiniteGridModel, ImplicitModel, LinearModel, ToricModel
from .polytope import HPolytope, VPolytope, affine_hull, contains, irredundant, vertices_of

IN, OUT, BOUNDARY, UNDETERMINED = "in", "out", "boundary", "undetermined"
LABELS = (IN, OUT, BOUNDARY, UNDETERMINED)


class SingularPoint(ValueError):
    pass


class RejectionStalled(RuntimeError):
    pass


# -- log-normal spaces ----------------------------------------------------------


def _check_point(model, p, tol: float = 1e-8) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size != model.n:
        raise ValueError(f"point has length {p.size}, model has n = {model.n}")
    if np.any(p <= 0):
        raise ValueError("point must have positive coordinates")
    if abs(p.sum() - 1) > tol:
        raise ValueError("point must lie in the simplex")
    return p


def normal_basis(model, p, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal rows spanning the normal space of the model at ``p``.

    Raises
    ------
    SingularPoint
        When the Jacobian of an implicit model drops rank at ``p``.
    """
    p = _check_point(model, p)
    n = model.n
    if isinstance(model, ImplicitModel):
        if np.max(np.abs(model.evaluate(p))) > 1e-8:
            raise ValueError("point is not on the model")
        J = model.jacobian(p)
        r = linalg.rank(J, tol)
        if r < model.codim:
            raise SingularPoint(f"Jacobian rank {r} below codimension {model.codim}")
        return linalg.row_space_basis(J, tol)
    if isinstance(model, ToricModel):
        A = model.A.astype(float)
        # tangent directions diag(p) (A_k - (A_k . p) 1)
        T = (A - (A @ p)[:, None]) * p
        return linalg.orth_complement(linalg.row_space_basis(T, tol), n)
    if isinstance(model, LinearModel):
        return linalg.orth_complement(linalg.row_space_basis(model.coefficients.T, tol), n)
    raise TypeError(f"no log-normal space for {type(model).__name__}")


@dataclass(frozen=True, eq=False)
class LogNormalSpace:
    """Linear subspace of R^n spanned by the orthonormal rows of ``basis``."""

    p: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def n(self) -> int:
        return self.p.size

    def complement(self) -> np.ndarray:
        return linalg.orth_complement(self.basis, self.n)

    def distance(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(np.linalg.norm(u - (u @ self.basis.T) @ self.basis))

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        return self.distance(u) <= tol * max(1.0, np.linalg.norm(u))


def log_normal_space(model, p, tol: float = 1e-8) -> LogNormalSpace:
    """``diag(p)`` applied to the normal space at ``p``, orthonormalized."""
    p = _check_point(model, p)
    N = normal_basis(model, p, tol)
    return LogNormalSpace(p, linalg.row_space_basis(N * p, 1e-12))


def minor_equations(model, p, tol: float = 1e-8) -> np.ndarray:
    """Linear equations for the log-normal space from maximal minors.

    Stack a normal basis (c rows) with the row ``u / p``; every
    ``(c+1) x (c+1)`` minor is linear in ``u``. Row ``k`` of the result holds
    the coefficients of one minor.
    """
    p = _check_point(model, p)
    N = normal_basis(model, p, tol)
    c, n = N.shape
    rows = []
    for S in itertools.combinations(range(n), c + 1):
        coef = np.zeros(n)
        for pos, k in enumerate(S):
            rest = [s for s in S if s != k]
            cof = (-1) ** (pos + c) * (np.linalg.det(N[:, rest]) if c else 1.0)
            coef[k] = cof / p[k]
        rows.append(coef)
    return np.array(rows)


def log_normal_space_by_minors(model, p, tol: float = 1e-8) -> LogNormalSpace:
    """Kernel of :func:`minor_equations`, an independent construction."""
    p = _check_point(model, p)
    M = minor_equations(model, p, tol)
    M = M / np.maximum(np.linalg.norm(M, axis=1, keepdims=True), 1e-300)
    return LogNormalSpace(p, linalg.null_space_basis(M, 1e-9))


def space_gap(S: LogNormalSpace | np.ndarray, T: LogNormalSpace | np.ndarray) -> float:
    """Largest principal angle between two subspaces (inf if dims differ)."""
    A = S.basis if isinstance(S, LogNormalSpace) else np.atleast_2d(S)
    B = T.basis if isinstance(T, LogNormalSpace) else np.atleast_2d(T)
    if A.shape[0] != B.shape[0]:
        return np.inf
    return float(np.max(subspace_angles(A.T, B.T)))


# -- polytopes ------------------------------------------------------------------


def log_normal_polytope_h(model, p, scale: float = 1.0, tol: float = 1e-8) -> HPolytope:
    """``{u : u in log N_p, sum(u) = scale, u >= 0}`` as an H-polytope."""
    L = log_normal_space(model, p, tol)
    n = L.n
    E = np.vstack([L.complement(), np.ones(n)])
    g = np.r_[np.zeros(E.shape[0] - 1), scale]
    return HPolytope(-np.eye(n), np.zeros(n), E, g)


def log_normal_polytope(model, p, scale: float = 1.0, tol: float = 1e-8) -> VPolytope:
    """Vertices of the log-normal polytope of ``p``."""
    return vertices_of(log_normal_polytope_h(model, p, scale, tol))


def finite_voronoi_cell(model: FiniteGridModel, p, tol: float = 1e-9) -> tuple[HPolytope, VPolytope]:
    """Logarithmic Voronoi cell of a grid point in ``{sum(u) = d}``.

    Every other grid point q with positive coordinates contributes
    ``sum(u_i log(p_i / q_i)) >= 0``; points with a zero coordinate have
    likelihood -inf on positive data and are ignored.
    """
    p = np.asarray(p)
    model.index(p)
    if np.any(p < 1):
        raise ValueError("grid point must have all coordinates >= 1")
    Q = model.interior_points(1)
    Q = Q[np.any(Q != p, axis=1)]
    n = model.n
    A = np.vstack([np.log(Q / p), -np.eye(n)])
    h = HPolytope(A, np.zeros(A.shape[0]), np.ones((1, n)), [float(model.d)])
    v = vertices_of(h, tol)
    return irredundant(h, v), v


# -- classification -------------------------------------------------------------


def _label(own: float, others: list[float], boundary_tol: float) -> str:
    if not others:
        return IN
    diff = own - max(others)
    if abs(diff) <= boundary_tol:
        return BOUNDARY
    return IN if diff > 0 else OUT


def classify_many(model, p, U, starts: int = 60, seed: int = 2019, tol: float = 1e-10,
                  boundary_tol: float = 1e-10, chunk: int = 64) -> list[str]:
    """Labels of the rows of ``U`` with respect to the cell of ``p``.

    Finite, toric and linear models use their exact estimators. For implicit
    models each ``u`` is compared at ``p`` against every certified positive
    critical point found from ``starts`` random starts plus ``p`` and ``u``;
    the label is ``undetermined`` when nothing at all is certified. Points
    whose best competitor is within ``boundary_tol`` in log-likelihood are
    ``boundary``.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if isinstance(model, FiniteGridModel):
        return [_classify_finite(model, p, u) for u in U]
    p = np.asarray(p, dtype=float)
    if isinstance(model, (ToricModel, LinearModel)):
        solve = mle_toric if isinstance(model, ToricModel) else mle_linear
        return [IN if np.max(np.abs(solve(model, u) - p)) <= 1e-8 else OUT for u in U]
    if not isinstance(model, ImplicitModel):
        raise TypeError(f"cannot classify for {type(model).__name__}")
    Un = U / U.sum(axis=1, keepdims=True)
    sys = build_critical_system(model, p, seed)
    labels = []
    for lo in range(0, len(Un), chunk):
        part = Un[lo : lo + chunk]
        found = find_critical_points_many(sys, part, starts, seed, tol, positive_only=True,
                                          extra_starts=lambda k: np.array([p, part[k]]))
        for u, fs in zip(part, found):
            if not fs.points:
                labels.append(UNDETERMINED)
                continue
            others = [q.loglik for q in fs.points if np.max(np.abs(q.x - p)) > 1e-6]
            labels.append(_label(log_likelihood(u, p), others, boundary_tol))
    return labels


def _classify_finite(model: FiniteGridModel, p, u) -> str:
    try:
        q = mle_finite(model, u)
    except Tie as tie:
        return BOUNDARY if np.any(np.all(tie.points == np.asarray(p), axis=1)) else OUT
    return IN if np.array_equal(q, np.asarray(p)) else OUT


def classify(model, p, u, starts: int = 60, seed: int = 2019, tol: float = 1e-10, boundary_tol: float = 1e-10) -> str:
    """Label ``u`` as in/out of the cell of ``p`` (or boundary/undetermined).

    See :func:`classify_many`.
    """
    return classify_many(model, p, [u], starts, seed, tol, boundary_tol)[0]


# -- sampling -------------------------------------------------------------------


def projection_basis(n: int) -> np.ndarray:
    """Orthonormal basis of ``{sum = 0}`` by Gram-Schmidt on ``e_i - e_n``."""
    out: list[np.ndarray] = []
    for i in range(n - 1):
        v = -np.eye(n)[n - 1] + np.eye(n)[i]
        for w in out:
            v = v - (v @ w) * w
        out.append(v / np.linalg.norm(v))
    return np.array(out).reshape(n - 1, n)


@dataclass
class CellSample:
    points: np.ndarray
    labels: list[str]
    seed: int
    header: dict = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        return {lab: self.labels.count(lab) for lab in LABELS}

    def to_csv(self) -> str:
        lines = [f"# seed={self.seed}"]
        lines += [f"# {k}={v}" for k, v in sorted(self.header.items())]
        for x, lab in zip(self.points, self.labels):
            lines.append(",".join(format(float(v), ".17g") for v in x) + "," + lab)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "CellSample":
        seed, header, pts, labels = 0, {}, [], []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                if k == "seed":
                    seed = int(v)
                else:
                    header[k] = v
            elif line.strip():
                *xs, lab = line.split(",")
                pts.append([float(x) for x in xs])
                labels.append(lab)
        return cls(np.array(pts), labels, seed, header)


def sample_polytope(h: HPolytope, v: VPolytope, count: int, seed: int, center=None, radius=None,
                    min_rate: float = 1e-4) -> np.ndarray:
    """Uniform points of ``conv(v)`` by rejection from the affine bounding box.

    With ``radius`` only points within that Euclidean distance of ``center``
    are kept. Candidate ``i`` is drawn from ``default_rng([seed, i])``.
    """
    c, B, _ = affine_hull(v.vertices)
    if B.shape[0] == 0:
        raise ValueError("polytope is a single point")
    Z = (v.vertices - c) @ B.T
    lo, hi = Z.min(axis=0), Z.max(axis=0)
    zc = None
    if radius is not None:
        center = np.asarray(center, dtype=float)
        zc = (center - c) @ B.T
        if np.linalg.norm(c + zc @ B - center) > 1e-9 * max(1.0, np.linalg.norm(center)):
            raise ValueError("center is not in the affine hull of the polytope")
        lo, hi = np.maximum(lo, zc - radius), np.minimum(hi, zc + radius)
        if np.any(lo > hi):
            raise RejectionStalled("the ball around center misses the polytope")
    out, i = [], 0
    while len(out) < count:
        z = np.random.default_rng([seed, i]).uniform(lo, hi)
        i += 1
        x = c + z @ B
        if (zc is None or np.linalg.norm(z - zc) <= radius) and contains(h, x, 1e-12):
            out.append(x)
        if i >= 1000 and len(out) < min_rate * i:
            raise RejectionStalled(f"acceptance rate {len(out) / i:.2e} after {i} draws")
    return np.array(out).reshape(-1, v.ambient_dim)


def sample_cell(model, p, count: int, seed: int = 2019, radius=None, starts: int = 60,
                classify_points: bool = True) -> CellSample:
    """Sample the log-normal polytope of ``p`` and classify each point."""
    h = log_normal_polytope_h(model, p)
    v = vertices_of(h)
    pts = sample_polytope(h, v, count, seed, center=p, radius=radius)
    labels = classify_many(model, p, pts, starts=starts, seed=seed) if classify_points else [UNDETERMINED] * len(pts)
    hdr = {"count": count, "radius": radius if radius is not None else "none", "starts": starts}
    return CellSample(pts, labels, seed, hdr)


# -- disjointness -----------------------------------------------------------------


@dataclass
class DisjointnessReport:
    """``gaps[k]`` is the LP distance between the polytopes of ``pairs[k]``."""

    points: np.ndarray
    pairs: list[tuple[int, int]]
    gaps: np.ndarray
    tol: float

    @property
    def intersecting(self) -> list[tuple[int, int]]:
        return [pr for pr, g in zip(self.pairs, self.gaps) if g <= self.tol]

    @property
    def all_disjoint(self) -> bool:
        return not self.intersecting


def _polytope_gap(h1: HPolytope, h2: HPolytope) -> float:
    """``min t`` with ``u`` in polytope 1 and ``|E2 u - g2| <= t``."""
    n = h1.ambient_dim
    E2, g2 = h2.E, h2.g
    k = E2.shape[0]
    A_ub = np.vstack([np.hstack([E2, -np.ones((k, 1))]), np.hstack([-E2, -np.ones((k, 1))])])
    b_ub = np.r_[g2, -g2]
    A_eq = np.hstack([h1.E, np.zeros((h1.E.shape[0], 1))])
    res = linprog(np.r_[np.zeros(n), 1.0], A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=h1.g,
                  bounds=[(0, None)] * n + [(0, None)], method="highs")
    if not res.success:
        raise RuntimeError(f"intersection LP failed: {res.message}")
    return float(res.x[-1])


def disjointness_probe(model, points, tol: float = 1e-9) -> DisjointnessReport:
    """Pairwise intersection test of the log-normal polytopes of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    H = [log_normal_polytope_h(model, p) for p in P]
    pairs = list(itertools.combinations(range(len(P)), 2))
    gaps = np.array([_polytope_gap(H[i], H[j]) for i, j in pairs])
    return DisjointnessReport(P, pairs, gaps, tol)
