"""Low-dimensional polytopes in H- and V-representation.

Vertex enumeration uses the double description method on the homogenized
cone, after the equality constraints have been eliminated. Facets of a
V-polytope are obtained as vertices of its polar, so the same routine serves
both conversions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg

TOL = 1e-9


class Unbounded(ValueError):
    pass


class Empty(ValueError):
    pass


class CenterNotInterior(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HPolytope:
    """``{x : A x <= b, E x = g}``."""

    A: np.ndarray
    b: np.ndarray
    E: np.ndarray | None = None
    g: np.ndarray | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        n = A.shape[1]
        if A.shape[0] != b.size:
            raise ValueError("A and b have inconsistent row counts")
        E = np.zeros((0, n)) if self.E is None else np.asarray(self.E, dtype=float).reshape(-1, n)
        g = np.zeros(0) if self.g is None else np.asarray(self.g, dtype=float).ravel()
        if E.shape[0] != g.size:
            raise ValueError("E and g have inconsistent row counts")
        for name, val in (("A", A), ("b", b), ("E", E), ("g", g)):
            object.__setattr__(self, name, val)

    @property
    def ambient_dim(self) -> int:
        return self.A.shape[1]

    def slack(self, x) -> np.ndarray:
        return self.b - np.asarray(x, dtype=float) @ self.A.T


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a finite point set (assumed irredundant)."""

    vertices: np.ndarray

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "vertices", V)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def dim(self) -> int:
        return affine_hull(self.vertices)[1].shape[0]

    def __len__(self):
        return self.vertices.shape[0]


@dataclass
class FaceLattice:
    """Faces as ``(dimension, frozenset of vertex indices)``.

    Includes the empty face (dimension -1) and the polytope itself.
    ``facets`` holds the vertex sets of the facets.
    """

    faces: list[tuple[int, frozenset]]
    dim: int
    facets: list[frozenset] = field(default_factory=list)

    @property
    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 2)
        for d, _ in self.faces:
            counts[d + 1] += 1
        return tuple(counts)

    def faces_of_dim(self, d: int) -> list[frozenset]:
        return [f for k, f in self.faces if k == d]

    def contains(self, small: frozenset, big: frozenset) -> bool:
        return small <= big


# -- affine hulls -------------------------------------------------------------


def affine_hull(points, tol: float = TOL):
    """Return ``(center, basis, complement)`` of the affine span.

    ``basis`` rows are an orthonormal basis of the direction space and
    ``complement`` rows span its orthogonal complement.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    c = P.mean(axis=0)
    D = P - c
    n = P.shape[1]
    if P.shape[0] == 1 or not np.any(D):
        return c, np.zeros((0, n)), np.eye(n)
    _, s, vt = np.linalg.svd(D, full_matrices=True)
    scale = max(1.0, np.abs(P).max())
    r = int(np.sum(s > tol * scale * max(1.0, np.sqrt(P.shape[0]))))
    return c, vt[:r], vt[r:]


def affine_rank(points, tol: float = 1e-8) -> int:
    return affine_hull(points, tol)[1].shape[0]


# -- double description -------------------------------------------------------


class _NotPointed(Exception):
    pass


def _extreme_rays(M: np.ndarray, eps: float = TOL) -> np.ndarray:
    """Extreme rays of the pointed cone ``{y : M y >= 0}`` (rows of result)."""
    H, D = M.shape
    order: list[int] = []
    basis = np.zeros((0, D))
    for i in range(H):
        trial = np.vstack([basis, M[i]])
        if np.linalg.matrix_rank(trial, tol=1e-10) > basis.shape[0]:
            basis, order = trial, order + [i]
            if len(order) == D:
                break
    if len(order) < D:
        raise _NotPointed
    R = np.linalg.inv(M[order]).T
    R /= np.abs(R).max(axis=1, keepdims=True)
    Z = np.zeros((D, H), dtype=bool)
    for k in range(D):
        Z[k, order] = True
        Z[k, order[k]] = False
    in_basis = set(order)
    for i in range(H):
        if i in in_basis:
            continue
        s = R @ M[i]
        pos, neg = s > eps, s < -eps
        zer = ~pos & ~neg
        if not neg.any():
            Z[zer, i] = True
            continue
        P, N = np.flatnonzero(pos), np.flatnonzero(neg)
        notZ = (~Z).astype(np.float32)
        new_rays, new_Z = [], []
        if P.size and N.size:
            pp, nn = np.meshgrid(P, N, indexing="ij")
            pp, nn = pp.ravel(), nn.ravel()
            chunk = 4096
            for start in range(0, pp.size, chunk):
                a, b = pp[start:start + chunk], nn[start:start + chunk]
                common = Z[a] & Z[b]
                ok = common.sum(axis=1) >= D - 2
                if not ok.any():
                    continue
                a, b, common = a[ok], b[ok], common[ok]
                # adjacent iff only the two rays themselves are tight on `common`
                outside = common.astype(np.float32) @ notZ.T
                adj = (outside < 0.5).sum(axis=1) == 2
                for ia, ib, cm in zip(a[adj], b[adj], common[adj]):
                    r = s[ia] * R[ib] - s[ib] * R[ia]
                    new_rays.append(r / np.abs(r).max())
                    cm = cm.copy()
                    cm[i] = True
                    new_Z.append(cm)
        Zz = Z[zer].copy()
        Zz[:, i] = True
        parts_R = [R[pos], R[zer]] + ([np.array(new_rays)] if new_rays else [])
        parts_Z = [Z[pos], Zz] + ([np.array(new_Z)] if new_Z else [])
        R = np.vstack(parts_R) if parts_R else np.zeros((0, D))
        Z = np.vstack(parts_Z) if parts_Z else np.zeros((0, H), dtype=bool)
        if R.shape[0] == 0:
            break
    return R


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for x in points:
        if not any(np.max(np.abs(x - y)) <= tol for y in out):
            out.append(x)
    return np.array(out).reshape(-1, points.shape[1])


def _normalize_rows(A, b):
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-14
    if np.any(~keep & (b < -1e-12)):
        raise Empty("a constraint 0 <= b with b < 0 is infeasible")
    A, b, norms = A[keep], b[keep], norms[keep]
    return A / norms[:, None], b / norms


def enumerate_vertices(A, b, tol: float = TOL) -> np.ndarray:
    """Vertices of ``{z : A z <= b}`` in its own coordinates (double description)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    k = A.shape[1]
    A, b = _normalize_rows(A, b)
    if k == 0:
        if np.all(b >= -tol):
            return np.zeros((1, 0))
        raise Empty("infeasible")
    if A.shape[0] == 0:
        raise Unbounded("no inequality constraints")
    scale = max(1.0, np.abs(b).max())
    M = np.vstack([np.hstack([b[:, None] / scale, -A]), np.eye(k + 1)[:1]])
    try:
        R = _extreme_rays(M, tol)
    except _NotPointed:
        # lineality space present: nonempty means unbounded
        rs = linalg.row_space_basis(A)
        if rs.shape[0]:
            enumerate_vertices(A @ rs.T, b, tol)  # raises Empty when infeasible
        raise Unbounded("constraint matrix is rank deficient") from None
    t = R[:, 0]
    if np.any(np.abs(t) <= tol):
        if np.any(t > tol):
            raise Unbounded("feasible region has a recession direction")
        raise Empty("infeasible")
    if not np.any(t > tol):
        raise Empty("infeasible")
    V = R[:, 1:] / t[:, None] * scale
    return _dedupe(V, 1e-9 * scale)


def enumerate_vertices_bruteforce(A, b, tol: float = 1e-9) -> np.ndarray:
    """Test oracle: solve every k-subset of constraints and keep feasible points."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    A, b = _normalize_rows(A, b)
    k = A.shape[1]
    pts = []
    for S in itertools.combinations(range(A.shape[0]), k):
        S = list(S)
        if abs(np.linalg.det(A[S])) < 1e-12:
            continue
        x = np.linalg.solve(A[S], b[S])
        if np.all(A @ x <= b + tol * max(1.0, np.abs(b).max())):
            pts.append(x)
    if not pts:
        raise Empty("no feasible basic solution")
    return _dedupe(np.array(pts), 1e-8 * max(1.0, np.abs(b).max()))


def _reduce_equalities(h: HPolytope, tol: float):
    """Parametrize ``E x = g`` as ``x = x0 + N.T z``; returns x0, N."""
    n = h.ambient_dim
    if h.E.shape[0] == 0:
        return np.zeros(n), np.eye(n)
    x0, *_ = np.linalg.lstsq(h.E, h.g, rcond=None)
    if np.max(np.abs(h.E @ x0 - h.g), initial=0.0) > 1e-8 * max(1.0, np.abs(h.g).max()):
        raise Empty("inconsistent equalities")
    return x0, linalg.null_space_basis(h.E, 1e-12)


def vertices_of(h: HPolytope, tol: float = TOL) -> VPolytope:
    """Vertex set of a bounded H-polytope.

    Raises
    ------
    Unbounded, Empty
    """
    x0, N = _reduce_equalities(h, tol)
    Az = h.A @ N.T
    bz = h.b - h.A @ x0
    if N.shape[0] == 0:
        if np.all(bz >= -tol * max(1.0, np.abs(h.b).max(initial=0))):
            return VPolytope(x0[None, :])
        raise Empty("infeasible")
    Z = enumerate_vertices(Az, bz, tol)
    V = x0 + Z @ N
    # snap rounding dust to exact zeros
    V[np.abs(V) <= 1e-13 * max(1.0, np.abs(V).max())] = 0.0
    return VPolytope(V)


def contains(h: HPolytope, x, tol: float = TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != h.ambient_dim:
        raise ValueError("dimension mismatch")
    eq = np.all(np.abs(h.E @ x - h.g) <= tol) if h.E.shape[0] else True
    return bool(eq and np.all(h.A @ x <= h.b + tol))


# -- hulls, duals, faces ------------------------------------------------------


def _polar_vertices(Z: np.ndarray, tol: float) -> np.ndarray:
    """Vertices of ``{y : Z y <= 1}``; Z has one point per row."""
    try:
        return enumerate_vertices(Z, np.ones(Z.shape[0]), tol)
    except (Unbounded, Empty) as exc:
        raise CenterNotInterior(str(exc)) from None


def hull_of(v: VPolytope, tol: float = TOL) -> HPolytope:
    """Irredundant facet description of conv(v) inside its affine hull."""
    V = v.vertices
    c, B, C = affine_hull(V, tol)
    if B.shape[0] == 0:
        return HPolytope(np.zeros((0, V.shape[1])), np.zeros(0), np.eye(V.shape[1]), V[0])
    Z = (V - c) @ B.T
    s = np.abs(Z).max()
    Y = _polar_vertices(Z / s, tol)
    A = Y @ B
    b = 1.0 * s + A @ c
    norms = np.linalg.norm(A, axis=1)
    return HPolytope(A / norms[:, None], b / norms, C, C @ c)


def dual_of(p: VPolytope, center, tol: float = TOL) -> VPolytope:
    """Polar dual of ``p`` about ``center``, computed inside the affine hull.

    Returns ``center + {y : y . (v - center) <= 1 for all vertices v}``.
    """
    V = p.vertices
    center = np.asarray(center, dtype=float)
    _, B, C = affine_hull(V, tol)
    if C.shape[0] and np.max(np.abs((V[0] - center) @ C.T)) > 1e-8 * max(1.0, np.abs(V).max()):
        raise CenterNotInterior("center is not in the affine hull")
    if B.shape[0] == 0:
        raise CenterNotInterior("0-dimensional polytope has no interior dual")
    Z = (V - center) @ B.T
    Y = _polar_vertices(Z, tol)
    return VPolytope(center + Y @ B)


def facet_incidence(v: VPolytope, tol: float = 1e-8) -> list[frozenset]:
    """Vertex sets of the facets of conv(v)."""
    V = v.vertices
    c, B, _ = affine_hull(V, TOL)
    if B.shape[0] == 0:
        return []
    Z = (V - c) @ B.T
    Z = Z / np.abs(Z).max()
    Y = _polar_vertices(Z, TOL)
    vals = Y @ Z.T
    scale = np.maximum(1.0, np.abs(vals).max(axis=1, keepdims=True))
    tight = np.abs(vals - 1.0) <= tol * scale
    return [frozenset(np.flatnonzero(row).tolist()) for row in tight]


def face_lattice_of(p: VPolytope, tol: float = 1e-8) -> FaceLattice:
    """Face lattice from the vertex-facet incidences.

    Facets of a face ``F`` are the inclusion-maximal proper intersections
    ``F & G`` with facets ``G`` of the polytope.
    """
    nv = len(p)
    dim = p.dim
    top = frozenset(range(nv))
    if dim == 0:
        return FaceLattice([(-1, frozenset()), (0, top)], 0, [frozenset()])
    facets = list(dict.fromkeys(facet_incidence(p, tol)))
    faces = [(dim, top)]
    level = [top]
    for d in range(dim - 1, -1, -1):
        nxt: dict[frozenset, None] = {}
        for F in level:
            cands = {F & G for G in facets}
            cands.discard(F)
            cands.discard(frozenset())
            for X in cands:
                if not any(X < Y for Y in cands):
                    nxt[X] = None
        level = list(nxt)
        faces.extend((d, F) for F in level)
    faces.append((-1, frozenset()))
    return FaceLattice(faces, dim, facets)


def f_vector(p: VPolytope, tol: float = 1e-8) -> tuple[int, ...]:
    """``(1, f_0, ..., f_{dim-1}, 1)``."""
    return face_lattice_of(p, tol).f_vector


def irredundant(h: HPolytope, v: VPolytope | None = None, tol: float = 1e-8) -> HPolytope:
    """Keep only facet-defining inequalities (one per facet)."""
    v = v if v is not None else vertices_of(h)
    dim = v.dim
    V = v.vertices
    norms = np.linalg.norm(h.A, axis=1)
    keep, seen = [], set()
    for i in range(h.A.shape[0]):
        if norms[i] < 1e-14:
            continue
        on = np.abs(V @ h.A[i] - h.b[i]) <= tol * max(1.0, abs(h.b[i]), norms[i] * np.abs(V).max())
        key = frozenset(np.flatnonzero(on).tolist())
        if key in seen or len(key) < dim:
            continue
        if affine_rank(V[sorted(key)]) == dim - 1:
            seen.add(key)
            keep.append(i)
    return HPolytope(h.A[keep], h.b[keep], h.E, h.g)


def same_vertex_sets(U, V, tol: float = 1e-7) -> tuple[bool, float]:
    """Greedy nearest-neighbour matching; returns (match, max deviation)."""
    U, V = np.atleast_2d(U), np.atleast_2d(V)
    if U.shape != V.shape:
        return False, np.inf
    free = list(range(V.shape[0]))
    worst = 0.0
    for x in U:
        d = [np.max(np.abs(x - V[j])) for j in free]
        k = int(np.argmin(d))
        if d[k] > tol:
            return False, float(d[k])
        worst = max(worst, d[k])
        free.pop(k)
    return True, float(worst)


# -- file format --------------------------------------------------------------


def polytope_to_dict(v: VPolytope | None = None, h: HPolytope | None = None) -> dict:
    out: dict = {}
    if v is not None:
        out["vertices"] = v.vertices.tolist()
    if h is not None:
        out["h"] = {"A": h.A.tolist(), "b": h.b.tolist(), "E": h.E.tolist(), "g": h.g.tolist()}
    return out


def polytope_from_dict(d: dict):
    v = VPolytope(np.array(d["vertices"], dtype=float)) if "vertices" in d else None
    h = None
    if "h" in d:
        hd = d["h"]
        A = np.array(hd["A"], dtype=float)
        n = A.shape[1] if A.ndim == 2 and A.size else (v.ambient_dim if v is not None else len(hd.get("E", [[0]])[0]))
        h = HPolytope(A.reshape(-1, n), hd["b"], np.array(hd.get("E", []), dtype=float).reshape(-1, n), hd.get("g", []))
    return v, h


def dumps(v: VPolytope | None = None, h: HPolytope | None = None) -> str:
    return json.dumps(polytope_to_dict(v, h), indent=1)


def loads(text: str):
    return polytope_from_dict(json.loads(text))
