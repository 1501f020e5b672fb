"""Maximum likelihood estimation for the supported model classes.

``mle_finite``, ``mle_toric`` and ``mle_linear`` are exact (up to solver
tolerance). For implicit models the critical points of the log-likelihood
are found by multi-start Newton on a randomized square Lagrange system; the
search is not guaranteed to find every critical point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import linalg
from .linalg import NoConvergence
from .model import FiniteGridModel, ImplicitModel, LinearModel, ToricModel


class NonpositiveCoordinate(ValueError):
    pass


class Tie(ValueError):
    """The maximum is attained by several model points (carried in ``points``)."""

    def __init__(self, points):
        self.points = np.asarray(points)
        super().__init__(f"likelihood tie between {len(self.points)} points")


class LeftDomain(RuntimeError):
    pass


class RankDeficient(RuntimeError):
    pass


class NoCriticalPointFound(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DataPoint:
    """Strictly positive data vector ``u`` summing to ``scale``."""

    u: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        if np.any(u <= 0):
            raise NonpositiveCoordinate("data must be strictly positive")
        if abs(u.sum() - self.scale) > 1e-10 * max(1.0, self.scale):
            raise ValueError(f"data sums to {u.sum()!r}, expected {self.scale!r}")
        object.__setattr__(self, "u", u)

    @classmethod
    def of(cls, u) -> "DataPoint":
        if isinstance(u, DataPoint):
            return u
        u = np.asarray(u, dtype=float)
        return cls(u, float(u.sum()))

    @property
    def normalized(self) -> np.ndarray:
        return self.u / self.scale


def log_likelihood(u, p) -> float:
    """``sum(u_i log p_i)``."""
    u = u.u if isinstance(u, DataPoint) else np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise NonpositiveCoordinate("log-likelihood needs p > 0")
    return float(np.dot(u, np.log(p)))


# -- finite models ------------------------------------------------------------


def mle_finite(model: FiniteGridModel, u, tie_tol: float = 1e-12) -> np.ndarray:
    """Grid point maximizing ``sum(u_i log q_i)``.

    Points with a zero coordinate have likelihood -inf and never win.
    """
    data = DataPoint.of(u)
    Q = model.interior_points(1)
    if Q.shape[0] == 0:
        raise ValueError(f"{model.name} has no point with all coordinates positive")
    ll = np.log(Q) @ data.u
    best = ll.max()
    winners = np.flatnonzero(ll >= best - tie_tol * max(1.0, abs(best)))
    if winners.size > 1:
        raise Tie(Q[winners])
    return Q[winners[0]].copy()


# -- toric models ---------------------------------------------------------------


def moment_map(model: ToricModel, u) -> np.ndarray:
    """``A u / sum(u)``: a convex combination of the columns of A."""
    u = np.asarray(u.u if isinstance(u, DataPoint) else u, dtype=float)
    return model.A @ np.abs(u) / np.abs(u).sum()


def mle_toric(model: ToricModel, u, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Unique model point ``p`` with ``A p = A u`` (u normalized to sum 1).

    Newton's method on the convex dual ``sum(exp(Q^T theta)) - theta . Q u``
    where Q is an orthonormal basis of rowspan(A); falls back to iterative
    scaling if Newton stalls.
    """
    data = DataPoint.of(u)
    un = data.normalized
    A = model.A.astype(float)
    w = model.weights
    Q = linalg.row_space_basis(A)
    target = Q @ un
    theta = Q @ np.log(un / w)

    def dual(th):
        return (w * np.exp(Q.T @ th)).sum() - th @ target

    for _ in range(max_iter):
        p = w * np.exp(Q.T @ theta)
        grad = Q @ p - target
        if np.max(np.abs(A @ p - A @ un)) <= tol:
            return p
        H = (Q * p) @ Q.T
        step = np.linalg.solve(H, grad)
        t, f0, slope = 1.0, dual(theta), grad @ step
        while dual(theta - t * step) > f0 - 1e-4 * t * slope and t > 1e-12:
            t *= 0.5
        if t <= 1e-12:
            break
        theta = theta - t * step
    p = w * np.exp(Q.T @ theta)
    if np.max(np.abs(A @ p - A @ un)) <= tol:
        return p
    return _ips(A, A @ un, w, tol)


def _ips(A: np.ndarray, target: np.ndarray, weights: np.ndarray, tol: float, max_iter: int = 100000) -> np.ndarray:
    """Generalized iterative proportional scaling (requires A >= 0)."""
    if np.any(A < 0):
        raise NoConvergence("Newton stalled and iterative scaling needs A >= 0")
    colsum = A.sum(axis=0)
    s = colsum.max()
    # slack row equalizes the column sums; its target follows from sum(p) = 1
    Aa = np.vstack([A, s - colsum])
    ta = np.append(target, s - target.sum())
    live = ta > 0
    p = weights / weights.sum()
    for _ in range(max_iter):
        cur = Aa @ p
        logr = np.zeros_like(cur)
        logr[live] = np.log(ta[live] / cur[live])
        p = p * np.exp(Aa.T @ logr / s)
        p /= p.sum()
        if np.max(np.abs(A @ p - target)) <= tol:
            return p
    raise NoConvergence("iterative proportional scaling did not converge")


# -- linear models ---------------------------------------------------------------


def _interior_parameter(model: LinearModel) -> np.ndarray:
    C, c0 = model.coefficients, model.offsets
    if model.bounds is not None:
        mid = model.bounds.mean(axis=1)
        if np.all(C @ mid + c0 > 0):
            return mid
    # Chebyshev-style centre of {theta : C theta + c0 >= t}, maximizing t
    k = C.shape[1]
    res = linprog(
        np.r_[np.zeros(k), -1.0],
        A_ub=np.hstack([-C, np.ones((C.shape[0], 1))]),
        b_ub=c0,
        bounds=[(None, None)] * k + [(None, 1.0)],
    )
    if not res.success or res.x[-1] <= 0:
        raise LeftDomain("parameter region is empty")
    return res.x[:k]


def mle_linear(model: LinearModel, u, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Maximizer of the log-likelihood over the affine model (damped Newton)."""
    data = DataPoint.of(u)
    un = data.normalized
    C, c0 = model.coefficients, model.offsets
    # reduce to an identifiable parametrization
    basis = linalg.row_space_basis(C)
    Cr = C @ basis.T
    theta = basis @ _interior_parameter(model)
    for _ in range(max_iter):
        f = Cr @ theta + c0
        grad = Cr.T @ (un / f)
        if np.linalg.norm(grad) <= tol:
            return f
        H = -(Cr.T * (un / f**2)) @ Cr
        step = np.linalg.solve(H, grad)
        t = 1.0
        L0 = un @ np.log(f)
        while True:
            ft = Cr @ (theta - t * step) + c0
            if np.all(ft > 0) and un @ np.log(ft) >= L0 - 1e-15 * abs(L0):
                break
            t *= 0.5
            if t < 1e-14:
                raise LeftDomain("iterates left the parameter region")
        theta = theta - t * step
    f = Cr @ theta + c0
    if np.linalg.norm(Cr.T @ (un / f)) <= tol * 100:
        return f
    raise NoConvergence("linear-model Newton did not converge")


# -- implicit models: randomized Lagrange system -----------------------------------


@dataclass(frozen=True, eq=False)
class CriticalSystem:
    """Square system in ``(x, lam)`` whose solutions contain the critical points.

    With ``G = lam @ A_rand @ df(x) - u / x`` (length n) and ``F = f(x)``
    (length m), the residual is ``E = [G, F][:n+c] + [G, F][n+c:] @ B_rand``.
    """

    model: ImplicitModel
    u: np.ndarray
    A_rand: np.ndarray
    B_rand: np.ndarray
    seed: int = 0

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def c(self) -> int:
        return self.model.codim

    @property
    def size(self) -> int:
        return self.n + self.c

    def split(self, Z):
        Z = np.asarray(Z)
        return Z[..., : self.n], Z[..., self.n :]

    def _full(self, Z, u):
        x, lam = self.split(Z)
        J = self.model.jacobian(x)
        G = np.einsum("...k,km,...mj->...j", lam, self.A_rand, J) - u / x
        return np.concatenate([G, self.model.evaluate(x)], axis=-1)

    def residual(self, Z, u=None) -> np.ndarray:
        """Residual at ``Z``; ``u`` (one row per point) overrides the data."""
        R = self._full(Z, self.u if u is None else u)
        k = self.size
        return R[..., :k] + R[..., k:] @ self.B_rand

    def jacobian(self, Z, u=None) -> np.ndarray:
        u = self.u if u is None else u
        x, lam = self.split(Z)
        n, c = self.n, self.c
        J = self.model.jacobian(x)
        H = self.model.hessians(x)
        AJ = np.einsum("km,...mj->...kj", self.A_rand, J)
        w = lam @ self.A_rand
        top = np.einsum("...m,...mij->...ij", w, H) + np.einsum("...i,ij->...ij", u / x**2, np.eye(n))
        full = np.zeros(x.shape[:-1] + (n + self.model.m, n + c), dtype=np.result_type(x, lam, float))
        full[..., :n, :n] = top
        full[..., :n, n:] = np.swapaxes(AJ, -1, -2)
        full[..., n:, :n] = J
        k = self.size
        return full[..., :k, :] + np.einsum("...rj,rk->...kj", full[..., k:, :], self.B_rand)

    def multipliers(self, X, u=None) -> np.ndarray:
        """Least-squares ``lam`` with ``lam @ A_rand @ df(x) = u / x``."""
        X = np.atleast_2d(X)
        AJ = np.einsum("km,bmj->bkj", self.A_rand, self.model.jacobian(X))
        rhs = (self.u if u is None else u) / X
        return np.stack([np.linalg.lstsq(M.T, r, rcond=None)[0] for M, r in zip(AJ, rhs)])

    def lagrange_residual(self, x, u=None) -> float:
        """Distance of ``u / x`` from rowspan(df(x)) and of f(x) from zero."""
        x = np.asarray(x)
        J = self.model.jacobian(x)
        g = (self.u if u is None else u) / x
        coef, *_ = np.linalg.lstsq(J.T, g, rcond=None)
        return float(max(np.max(np.abs(J.T @ coef - g)), np.max(np.abs(self.model.evaluate(x)))))


def build_critical_system(model: ImplicitModel, u, seed: int = 2019, max_resample: int = 10) -> CriticalSystem:
    """Draw ``A_rand`` (c x m) and ``B_rand`` ((m-c) x (n+c)) standard normal.

    A draw is rejected when ``A_rand @ df`` loses rank at a random model
    point; up to ``max_resample`` fresh draws are tried.
    """
    data = DataPoint.of(u)
    n, m, c = model.n, model.m, model.codim
    if data.u.size != n:
        raise ValueError(f"data has length {data.u.size}, model has n = {n}")
    probe = model.sample_points(1, np.random.default_rng([seed, 0, 1]))[0]
    J = model.jacobian(probe)
    for attempt in range(max_resample):
        rng = np.random.default_rng([seed, 0, 0, attempt])
        A_rand = rng.standard_normal((c, m))
        B_rand = rng.standard_normal((m - c, n + c))
        if linalg.rank(A_rand @ J, 1e-8) == c:
            return CriticalSystem(model, data.normalized, A_rand, B_rand, seed)
    raise RankDeficient(f"A_rand @ df stayed rank deficient after {max_resample} draws")


@dataclass
class CriticalPoint:
    """A certified solution; ``x`` and ``lam`` are complex for nonreal points."""

    x: np.ndarray
    lam: np.ndarray
    residual: float
    loglik: float

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.x)

    @property
    def is_positive(self) -> bool:
        return self.is_real and bool(np.all(self.x > 0))


@dataclass
class CriticalPointSet:
    """Deduplicated certified solutions.

    Positive points come first by decreasing log-likelihood, then other real
    points, then nonreal ones.
    """

    points: list[CriticalPoint] = field(default_factory=list)
    starts: int = 0
    seed: int = 0

    def __len__(self) -> int:
        return len(self.points)

    @property
    def likelihoods(self) -> np.ndarray:
        return np.array([q.loglik for q in self.points])

    @property
    def real(self) -> list[CriticalPoint]:
        return [q for q in self.points if q.is_real]

    @property
    def positive(self) -> list[CriticalPoint]:
        return [q for q in self.points if q.is_positive]

    def best(self) -> CriticalPoint:
        pos = self.positive
        if not pos:
            raise NoCriticalPointFound("no positive critical point")
        return max(pos, key=lambda q: q.loglik)


def _loglik_or_inf(u, x) -> float:
    if not np.iscomplexobj(x) and np.all(x > 0):
        return float(u @ np.log(x))
    return -np.inf


def _start_points(sys: CriticalSystem, starts: int, seed: int, domain: str = "real") -> np.ndarray:
    """Deterministic start points x: the i-th depends only on ``(seed, i)``.

    Starts cycle through four kinds: Dirichlet(1), Dirichlet(1/2) and
    Dirichlet(1/4) points of the simplex (the sparse ones reach solutions
    near the boundary), and Dirichlet(1) points with a Gaussian perturbation
    in the hyperplane ``sum(x) = 1`` so that solutions with negative
    coordinates are reachable. For ``domain="complex"`` every start also
    gets a random imaginary part summing to zero. Points are then projected
    onto the model.
    """
    n = sys.n
    cplx = domain == "complex"
    X = np.empty((starts, n), dtype=complex if cplx else float)
    alphas = (1.0, 0.5, 0.25, 1.0)
    for i in range(starts):
        rng = np.random.default_rng([seed, i])
        x = rng.dirichlet(np.full(n, alphas[i % 4]))
        if i % 4 == 3:
            e = rng.standard_normal(n) / n
            x = x + e - e.mean()
        if cplx:
            e = rng.standard_normal(n) / n
            x = x + 1j * (e - e.mean())
        X[i] = x
    with np.errstate(all="ignore"):
        X, _ = sys.model.project(X, max_iter=20)
    bad = ~np.all(np.isfinite(X), axis=1) | np.any(np.abs(X) < 1e-8, axis=1)
    X[bad] = np.full(n, 1.0 / n)
    return X


def starting_points(sys: CriticalSystem, starts: int, seed: int, domain: str = "real") -> np.ndarray:
    """Start points ``(x, lam)``; multipliers come from least squares."""
    X = _start_points(sys, starts, seed, domain)
    with np.errstate(all="ignore"):
        L = sys.multipliers(X)
    return np.hstack([X, L])


def _certify(sys: CriticalSystem, z, u, tol: float):
    """Polish ``z``; return (z, residual) or None when it fails certification."""
    z = np.asarray(z)
    fun = lambda Z: sys.residual(Z, u)  # noqa: E731
    jac = lambda Z: sys.jacobian(Z, u)  # noqa: E731
    if np.iscomplexobj(z) and np.max(np.abs(z.imag)) <= 1e-7 * max(1.0, np.max(np.abs(z.real))):
        zr, rr, _ = linalg.newton_batch(fun, jac, z.real[None], tol=1e-13, max_iter=8)
        if np.isfinite(rr[0]) and rr[0] <= tol:
            z = zr[0]
    x, _ = sys.split(z)
    r = float(np.max(np.abs(fun(z))))
    if not np.all(np.isfinite(z)) or r > tol or np.min(np.abs(x)) < 1e-12:
        return None
    if sys.lagrange_residual(x, u) > tol:
        return None
    return z, r


def find_critical_points_many(
    sys: CriticalSystem,
    U,
    starts: int = 500,
    seed: int = 2019,
    tol: float = 1e-10,
    positive_only: bool = True,
    dedup: float = 1e-6,
    extra_starts=None,
    domain: str = "real",
) -> list[CriticalPointSet]:
    """:func:`find_critical_points` for several data vectors in one batch.

    The random matrices of ``sys`` are shared; row ``k`` of ``U`` (normalized
    to sum 1) replaces the data. ``extra_starts`` is either a list of point
    arrays shared by all rows or a callable ``k -> points``.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    if domain not in ("real", "complex"):
        raise ValueError("domain must be 'real' or 'complex'")
    U = np.atleast_2d(np.asarray(U, dtype=float))
    U = U / U.sum(axis=1, keepdims=True)
    X0 = _start_points(sys, starts, seed, domain)
    blocks, owner = [], []
    for k, u in enumerate(U):
        X = X0
        extra = extra_starts(k) if callable(extra_starts) else extra_starts
        if extra is not None:
            X = np.vstack([np.atleast_2d(np.asarray(extra, dtype=float)).astype(X0.dtype), X0])
        with np.errstate(all="ignore"):
            L = sys.multipliers(X, u)
        blocks.append(np.hstack([X, L]))
        owner.append(np.full(X.shape[0], k))
    Z0, owner = np.vstack(blocks), np.concatenate(owner)
    P = U[owner]
    Z, res, _ = linalg.newton_batch(sys.residual, sys.jacobian, Z0, tol=1e-12, max_iter=60, params=P)
    # accept near-converged rows, then polish
    ok = np.isfinite(res) & (res <= 1e-8)
    Z, owner = Z[ok], owner[ok]
    Z, _, _ = linalg.newton_batch(sys.residual, sys.jacobian, Z, tol=1e-13, max_iter=5, params=U[owner])
    if np.iscomplexobj(Z):
        # the system has real coefficients, so solutions come in conjugate pairs
        Z, owner = np.vstack([Z, Z.conj()]), np.r_[owner, owner]
    outs = [CriticalPointSet(starts=starts, seed=seed) for _ in U]
    for z, k in zip(Z, owner):
        cert = _certify(sys, z, U[k], tol)
        if cert is None:
            continue
        z, r = cert
        x, lam = sys.split(z)
        real = not np.iscomplexobj(x)
        if positive_only and not (real and np.all(x > 0)):
            continue
        out = outs[k]
        if any(q.is_real == real and np.max(np.abs(np.r_[q.x - x, q.lam - lam])) <= dedup for q in out.points):
            continue
        out.points.append(CriticalPoint(x.copy(), lam.copy(), r, _loglik_or_inf(U[k], x)))

    def order(q):
        xr = np.real(q.x)
        return (not q.is_positive, not q.is_real, -q.loglik if q.is_positive else 0.0, tuple(xr), tuple(np.imag(q.x)))

    for out in outs:
        out.points.sort(key=order)
    return outs


def find_critical_points(
    sys: CriticalSystem,
    starts: int = 500,
    seed: int = 2019,
    tol: float = 1e-10,
    positive_only: bool = True,
    dedup: float = 1e-6,
    extra_starts=None,
    domain: str = "real",
) -> CriticalPointSet:
    """Multi-start Newton on the randomized system.

    Each converged solution is polished, then certified against the original
    equations: ``f(x) = 0`` and ``u / x`` in rowspan(df(x)), both within
    ``tol``. Completeness is not guaranteed. ``extra_starts`` (points x, e.g.
    a known model point) are tried first.

    ``domain="complex"`` runs Newton in complex arithmetic, which also finds
    nonreal critical points (those counted by the ML degree); nearly real
    solutions are snapped to real ones. ``positive_only`` keeps only real
    points with all coordinates positive.
    """
    return find_critical_points_many(
        sys, sys.u[None], starts, seed, tol, positive_only, dedup, extra_starts, domain
    )[0]


@dataclass
class ImplicitEstimate:
    point: np.ndarray
    loglik: float
    candidates: int
    best_effort: bool = True


def mle_implicit(model: ImplicitModel, u, starts: int = 200, seed: int = 2019, tol: float = 1e-10,
                 extra_starts=None) -> ImplicitEstimate:
    """Largest-likelihood positive critical point found by multi-start Newton.

    The result is best effort: a better critical point may have been missed.
    """
    data = DataPoint.of(u)
    sys = build_critical_system(model, data, seed)
    seeds = [data.normalized]
    if extra_starts is not None:
        seeds.extend(np.atleast_2d(extra_starts))
    found = find_critical_points(sys, starts, seed, tol, positive_only=True, extra_starts=np.array(seeds))
    if not found.points:
        raise NoCriticalPointFound("no positive critical point found")
    q = found.best()
    return ImplicitEstimate(q.x * data.scale, q.loglik, len(found))


@dataclass
class Estimate:
    """Result of :func:`mle`: the point, the solver route and diagnostics."""

    point: np.ndarray
    route: str
    loglik: float
    residual: float
    candidates: int = 1
    best_effort: bool = False


def mle(model, u, starts: int = 200, seed: int = 2019, tol: float = 1e-10) -> Estimate:
    """Dispatch to the solver matching the model class."""
    data = DataPoint.of(u)
    if isinstance(model, FiniteGridModel):
        p = mle_finite(model, data)
        return Estimate(p, "finite", log_likelihood(data, p), 0.0)
    if isinstance(model, ToricModel):
        p = mle_toric(model, data) * data.scale
        res = float(np.max(np.abs(model.A @ p - model.A @ data.u)))
        return Estimate(p, "toric", log_likelihood(data, p), res)
    if isinstance(model, LinearModel):
        p = mle_linear(model, data)
        C = model.coefficients
        res = float(np.linalg.norm(C.T @ (data.normalized / p)))
        return Estimate(p * data.scale, "linear", log_likelihood(data, p), res)
    if isinstance(model, ImplicitModel):
        est = mle_implicit(model, data, starts=starts, seed=seed, tol=tol)
        res = float(np.max(np.abs(model.evaluate(est.point / data.scale))))
        return Estimate(est.point, "implicit", log_likelihood(data, est.point / data.scale), res,
                        est.candidates, True)
    raise TypeError(f"no estimator for {type(model).__name__}")
