"""Dense linear algebra helpers: numerical rank, kernels, Newton iteration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-10


class NoConvergence(RuntimeError):
    """Raised when an iteration exhausts its budget without meeting tol."""


class SingularJacobian(RuntimeError):
    """Raised when the Newton linear solve fails."""


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = DEFAULT_TOL
    max_iter: int = 100
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D float array."""
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.ndim != 2:
        raise ValueError("expected a 2-D array")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def rank(m, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``tol * sigma_max``."""
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def null_space_basis(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal rows spanning the kernel of ``m``.

    The result has ``cols - rank(m, tol)`` rows.
    """
    a = as_matrix(m)
    ncols = a.shape[1]
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    r = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > tol * s[0]))
    return vt[r:].copy().reshape(ncols - r, ncols)


def row_space_basis(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``m``."""
    a = as_matrix(m)
    _, s, vt = np.linalg.svd(a, full_matrices=False)
    r = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > tol * s[0]))
    return vt[:r].copy()


def orth_complement(rows, n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the complement of span(rows) in R^n."""
    rows = np.asarray(rows, dtype=float).reshape(-1, n)
    if rows.shape[0] == 0:
        return np.eye(n)
    return null_space_basis(rows, tol)


def newton_solve(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    x0,
    cfg: NewtonConfig | None = None,
) -> np.ndarray:
    """Damped Newton iteration for a square system ``fun(x) = 0``.

    A full (damped) step is tried first; if the residual max-norm does not
    decrease, the step is halved up to 30 times. The returned point always
    satisfies ``max|fun(x)| <= cfg.tol``.

    Raises
    ------
    NoConvergence
        If ``cfg.max_iter`` iterations do not reach the tolerance.
    SingularJacobian
        If the Jacobian is singular or not square.
    """
    cfg = cfg or NewtonConfig()
    x = np.array(x0, dtype=float).ravel()
    f = np.asarray(fun(x), dtype=float).ravel()
    if f.shape != x.shape:
        raise ValueError("system is not square")
    res = np.max(np.abs(f)) if f.size else 0.0
    for _ in range(cfg.max_iter):
        if res <= cfg.tol:
            return x
        J = np.asarray(jac(x), dtype=float)
        try:
            dx = np.linalg.solve(J, f)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian("non-finite Newton step")
        step = cfg.damping
        for _ in range(30):
            xt = x - step * dx
            with np.errstate(all="ignore"):
                ft = np.asarray(fun(xt), dtype=float).ravel()
            rt = np.max(np.abs(ft))
            if np.isfinite(rt) and rt < res:
                break
            step *= 0.5
        else:
            raise NoConvergence(f"line search stalled at residual {res:.3e}")
        x, f, res = xt, ft, rt
    if res <= cfg.tol:
        return x
    raise NoConvergence(f"residual {res:.3e} after {cfg.max_iter} iterations")


def newton_batch(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    X0,
    tol: float = DEFAULT_TOL,
    max_iter: int = 100,
    backtracks: int = 12,
    params=None,
):
    """Run damped Newton on many starting points at once.

    ``fun`` maps a ``(B, N)`` batch to ``(B, N)`` residuals and ``jac`` to
    ``(B, N, N)`` Jacobians; complex batches are supported. With ``params``
    (one row per start) both are called as ``fun(X, params)`` on matching
    subsets of rows. Returns ``(X, residual, converged)``; rows whose
    iteration diverged or hit a singular Jacobian are marked not converged.
    """
    X = np.array(X0)
    if not np.iscomplexobj(X):
        X = X.astype(float)
    if params is not None:
        P = np.asarray(params)
        f_, j_ = fun, jac
        fun = lambda Y, rows=slice(None): f_(Y, P[rows])  # noqa: E731
        jac = lambda Y, rows=slice(None): j_(Y, P[rows])  # noqa: E731
    else:
        f0, j0 = fun, jac
        fun = lambda Y, rows=None: f0(Y)  # noqa: E731
        jac = lambda Y, rows=None: j0(Y)  # noqa: E731
    with np.errstate(all="ignore"):
        F = fun(X)
    res = np.max(np.abs(F), axis=1)
    res[~np.isfinite(res)] = np.inf
    alive = np.isfinite(res)
    for _ in range(max_iter):
        active = alive & (res > tol)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        with np.errstate(all="ignore"):
            J = jac(X[idx], idx)
        dX = np.full((idx.size, X.shape[1]), np.nan, dtype=X.dtype)
        ok = np.all(np.isfinite(J), axis=(1, 2))
        if ok.any():
            try:
                dX[ok] = np.linalg.solve(J[ok], F[idx[ok]][..., None])[..., 0]
            except np.linalg.LinAlgError:
                for k in np.flatnonzero(ok):
                    try:
                        dX[k] = np.linalg.solve(J[k], F[idx[k]])
                    except np.linalg.LinAlgError:
                        pass
        good = np.all(np.isfinite(dX), axis=1)
        alive[idx[~good]] = False
        idx, dX = idx[good], dX[good]
        step = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        for _ in range(backtracks):
            if not pending.any():
                break
            k = np.flatnonzero(pending)
            Xt = X[idx[k]] - step[k, None] * dX[k]
            with np.errstate(all="ignore"):
                Ft = fun(Xt, idx[k])
            rt = np.max(np.abs(Ft), axis=1)
            better = np.isfinite(rt) & (rt < res[idx[k]])
            acc = k[better]
            X[idx[acc]] = Xt[better]
            F[idx[acc]] = Ft[better]
            res[idx[acc]] = rt[better]
            pending[acc] = False
            step[k[~better]] *= 0.5
        alive[idx[pending]] = False
    converged = alive & (res <= tol)
    return X, res, converged
