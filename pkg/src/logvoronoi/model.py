"""Discrete statistical models: implicit, toric, linear, finite and parametric.

Every model lives in the probability simplex of R^n. Implicit models carry
the simplex polynomial ``sum(x) - 1`` as their first equation.

Builtin catalog (see :func:`builtin`)::

    twisted_cubic             toric, A = [[3,2,1,0],[0,1,2,3]], weights (1,3,3,1)
    twisted_cubic_implicit    implicit, simplex + three 2x2 minors
    twisted_cubic_param       parametric, t -> (t^3, 3t^2(1-t), 3t(1-t)^2, (1-t)^3)
    segre                     toric 2x2 independence model
    segre_implicit            implicit, simplex + x1*x4 - x2*x3
    segre_param               parametric, (s, t) -> (st, s(1-t), (1-s)t, (1-s)(1-t))
    cousin_hardy_weinberg     implicit, simplex + x2^2 - x1*x3
    mixture_binomial_5        implicit, simplex + four Hankel-type cubics
    mixture_binomial_5_param  parametric mixture of two Binomial(5, .) laws
    linear_example            linear, theta -> (theta/2, theta/2, 1 - theta)
    grid(n,d)                 finite, all integer vectors of length n summing to d
"""

from __future__ import annotations

import itertools
import json
import math
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg


class UnknownModel(KeyError):
    pass


class InvalidModel(ValueError):
    pass


class Polynomial:
    """Sparse real polynomial in ``nvars`` variables.

    Stored as a coefficient vector and an integer exponent matrix with one
    row per term. Calling it on an array of shape ``(..., nvars)`` evaluates
    all leading positions at once.
    """

    def __init__(self, terms, nvars: int | None = None):
        terms = [(float(c), tuple(int(e) for e in exps)) for c, exps in terms]
        if nvars is None:
            if not terms:
                raise ValueError("nvars required for the zero polynomial")
            nvars = len(terms[0][1])
        merged: dict[tuple, float] = {}
        for c, exps in terms:
            if len(exps) != nvars:
                raise ValueError("exponent vector length differs from nvars")
            if min(exps, default=0) < 0:
                raise ValueError("negative exponent")
            merged[exps] = merged.get(exps, 0.0) + c
        items = [(e, c) for e, c in merged.items() if c != 0.0]
        self.nvars = nvars
        self.exponents = np.array([e for e, _ in items], dtype=int).reshape(-1, nvars)
        self.coeffs = np.array([c for _, c in items], dtype=float)
        self._deriv: list[Polynomial] | None = None

    @classmethod
    def linear(cls, coeffs, const: float = 0.0) -> "Polynomial":
        n = len(coeffs)
        terms = [(c, tuple(int(i == k) for i in range(n))) for k, c in enumerate(coeffs)]
        terms.append((const, (0,) * n))
        return cls(terms, n)

    @property
    def terms(self) -> list[tuple[float, tuple[int, ...]]]:
        return [(float(c), tuple(int(v) for v in e)) for c, e in zip(self.coeffs, self.exponents)]

    @property
    def degree(self) -> int:
        return int(self.exponents.sum(axis=1).max()) if len(self.coeffs) else 0

    def __call__(self, x):
        x = _as_field(x)
        if not len(self.coeffs):
            return np.zeros(x.shape[:-1])
        mons = np.prod(x[..., None, :] ** self.exponents, axis=-1)
        return mons @ self.coeffs

    def derivative(self, k: int) -> "Polynomial":
        if self._deriv is None:
            self._deriv = []
            for j in range(self.nvars):
                terms = []
                for c, e in zip(self.coeffs, self.exponents):
                    if e[j] > 0:
                        e2 = e.copy()
                        e2[j] -= 1
                        terms.append((c * e[j], tuple(e2)))
                self._deriv.append(Polynomial(terms, self.nvars))
        return self._deriv[k]

    def gradient(self, x) -> np.ndarray:
        return np.stack([self.derivative(k)(x) for k in range(self.nvars)], axis=-1)

    def hessian(self, x) -> np.ndarray:
        rows = [
            np.stack([self.derivative(i).derivative(j)(x) for j in range(self.nvars)], axis=-1)
            for i in range(self.nvars)
        ]
        return np.stack(rows, axis=-2)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and sorted(self.terms, key=lambda t: t[1]) == sorted(
            other.terms, key=lambda t: t[1]
        )

    def __repr__(self):
        return f"Polynomial({self.terms!r}, nvars={self.nvars})"


def _as_field(x) -> np.ndarray:
    """Float array, or complex when the input is complex."""
    x = np.asarray(x)
    return x if np.iscomplexobj(x) else x.astype(float)


def simplex_polynomial(n: int) -> Polynomial:
    return Polynomial.linear([1.0] * n, -1.0)


def _poly_from_dict(n: int, spec: dict[tuple, float]) -> Polynomial:
    return Polynomial([(c, e) for e, c in spec.items()], n)


def _random_simplex(rng, size, n):
    return rng.dirichlet(np.ones(n), size=size)


class ImplicitModel:
    """Model cut out of the simplex by polynomial equations.

    Parameters
    ----------
    polynomials : sequence of Polynomial
        The first one must be ``sum(x) - 1``.
    codim : int, optional
        Codimension of the variety in R^n. When omitted it is computed as the
        Jacobian rank at a (seeded) random model point.
    """

    kind = "implicit"

    def __init__(self, polynomials: Sequence[Polynomial], codim: int | None = None, name: str = ""):
        polys = tuple(polynomials)
        if not polys:
            raise InvalidModel("need at least the simplex polynomial")
        n = polys[0].nvars
        if any(f.nvars != n for f in polys):
            raise InvalidModel("polynomials disagree on the number of variables")
        if polys[0] != simplex_polynomial(n):
            raise InvalidModel("first polynomial must be sum(x) - 1")
        self.n = n
        self.polynomials = polys
        self.name = name
        if codim is None:
            # projection is occasionally drawn towards the singular locus,
            # so take the most frequent rank over several points
            X = self.sample_points(15, np.random.default_rng(0))
            ranks = [linalg.rank(J, 1e-8) for J in self.jacobian(X)]
            codim = max(set(ranks), key=lambda r: (ranks.count(r), r))
        self.codim = int(codim)

    @property
    def m(self) -> int:
        return len(self.polynomials)

    def _compile(self):
        # one monomial table shared by f, df and the Hessians
        n, m = self.n, self.m
        parts = {"f": [], "j": [], "h": []}
        for r, f in enumerate(self.polynomials):
            parts["f"].append(((r,), f))
            for i in range(n):
                parts["j"].append(((r, i), f.derivative(i)))
                for k in range(n):
                    parts["h"].append(((r, i, k), f.derivative(i).derivative(k)))
        index: dict[tuple, int] = {}
        for group in parts.values():
            for _, g in group:
                for e in g.exponents:
                    index.setdefault(tuple(e), len(index))
        E = np.array(list(index), dtype=int).reshape(-1, n)
        shapes = {"f": (m,), "j": (m, n), "h": (m, n, n)}
        mats = {}
        for key, group in parts.items():
            C = np.zeros((len(index), int(np.prod(shapes[key]))))
            for pos, (_, g) in enumerate(group):
                for c, e in zip(g.coeffs, g.exponents):
                    C[index[tuple(e)], pos] += c
            mats[key] = C
        self._table = (E, mats, shapes)

    def _eval(self, x, key: str) -> np.ndarray:
        if getattr(self, "_table", None) is None:
            self._compile()
        E, mats, shapes = self._table
        x = _as_field(x)
        deg = int(E.max(initial=0))
        P = x[..., None, :] ** np.arange(deg + 1)[:, None]
        mons = np.ones(x.shape[:-1] + (E.shape[0],), dtype=x.dtype)
        for j in range(self.n):
            mons = mons * P[..., E[:, j], j]
        return (mons @ mats[key]).reshape(x.shape[:-1] + shapes[key])

    def evaluate(self, x) -> np.ndarray:
        return self._eval(x, "f")

    def jacobian(self, x) -> np.ndarray:
        return self._eval(x, "j")

    def hessians(self, x) -> np.ndarray:
        return self._eval(x, "h")

    def project(self, X, max_iter: int = 60, tol: float = 1e-13):
        """Gauss-Newton projection of points onto the variety.

        Returns the projected batch and a mask of rows that converged.
        """
        X = np.array(_as_field(X), ndmin=2)
        for _ in range(max_iter):
            F = self.evaluate(X)
            if np.all(np.max(np.abs(F), axis=1) <= tol):
                break
            J = self.jacobian(X)
            step = np.einsum("bij,bj->bi", np.linalg.pinv(J, rcond=1e-12), F)
            X = X - step
            X[~np.isfinite(X)] = np.nan
        res = np.max(np.abs(self.evaluate(X)), axis=1)
        return X, np.isfinite(res) & (res <= 1e-11)

    def sample_points(self, k: int, rng, positive: bool = True, max_rounds: int = 50) -> np.ndarray:
        """Random smooth model points obtained by projecting Dirichlet samples."""
        out = []
        for _ in range(max_rounds):
            X, ok = self.project(_random_simplex(rng, 4 * k, self.n))
            if positive:
                ok &= np.all(X > 1e-6, axis=1)
            if hasattr(self, "codim"):
                # drop points of the singular locus
                ok[ok] = [linalg.rank(J, 1e-8) == self.codim for J in self.jacobian(X[ok])]
            out.extend(X[ok])
            if len(out) >= k:
                return np.array(out[:k])
        raise RuntimeError("could not sample points on the model")

    def to_dict(self) -> dict:
        return {
            "kind": "implicit",
            "n": self.n,
            "codim": self.codim,
            "polynomials": [_poly_to_json(f) for f in self.polynomials],
        }


@dataclass(frozen=True, eq=False)
class ToricModel:
    """Log-linear model ``{p in simplex : log(p / weights) in rowspan(A)}``.

    ``weights`` defaults to all ones; the binomial twisted cubic uses
    (1, 3, 3, 1).
    """

    A: np.ndarray
    weights: np.ndarray | None = None
    name: str = ""
    kind = "toric"

    def __post_init__(self):
        A = np.asarray(self.A)
        if not np.issubdtype(A.dtype, np.integer):
            if not np.allclose(A, np.round(A)):
                raise InvalidModel("toric matrix must be integer")
            A = np.round(A).astype(int)
        A = np.atleast_2d(A)
        if np.any(np.all(A == 0, axis=0)):
            raise InvalidModel("toric matrix has a zero column")
        ones = np.ones(A.shape[1])
        y, *_ = np.linalg.lstsq(A.T.astype(float), ones, rcond=None)
        if np.max(np.abs(A.T @ y - ones)) > 1e-10:
            raise InvalidModel("all-ones vector is not in the row span of A")
        object.__setattr__(self, "A", A)
        w = np.ones(A.shape[1]) if self.weights is None else np.asarray(self.weights, dtype=float).ravel()
        if w.size != A.shape[1] or np.any(w <= 0):
            raise InvalidModel("weights must be positive, one per column")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def codim(self) -> int:
        return self.n - linalg.rank(self.A) + 1

    def point(self, theta) -> np.ndarray:
        q = self.weights * np.exp(np.asarray(theta, dtype=float) @ self.A)
        return q / q.sum(axis=-1, keepdims=True)

    def sample_points(self, k: int, rng, scale: float = 1.0) -> np.ndarray:
        return self.point(rng.normal(scale=scale, size=(k, self.A.shape[0])))

    def to_dict(self) -> dict:
        d = {"kind": "toric", "matrix": self.A.tolist()}
        if np.any(self.weights != 1):
            d["weights"] = self.weights.tolist()
        return d


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Affine-linear model ``theta -> coefficients @ theta + offsets``.

    ``bounds`` is a box of parameter values used for sampling; cell
    computations only use the affine hull of the model.
    """

    coefficients: np.ndarray
    offsets: np.ndarray
    bounds: np.ndarray | None = None
    name: str = ""
    kind = "linear"

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        c0 = np.asarray(self.offsets, dtype=float).ravel()
        if C.shape[0] != c0.size:
            raise InvalidModel("coefficients and offsets disagree on n")
        if np.max(np.abs(C.sum(axis=0))) > 1e-12 or abs(c0.sum() - 1) > 1e-12:
            raise InvalidModel("affine maps must sum identically to 1")
        if np.any(np.all(C == 0, axis=1) & (c0 == 0)):
            raise InvalidModel("an affine map is identically zero")
        object.__setattr__(self, "coefficients", C)
        object.__setattr__(self, "offsets", c0)
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float).reshape(C.shape[1], 2)
            object.__setattr__(self, "bounds", b)

    @property
    def n(self) -> int:
        return self.coefficients.shape[0]

    @property
    def dim(self) -> int:
        return self.coefficients.shape[1]

    def point(self, theta) -> np.ndarray:
        return np.asarray(theta, dtype=float) @ self.coefficients.T + self.offsets

    def sample_points(self, k: int, rng) -> np.ndarray:
        if self.bounds is None:
            raise ValueError("sampling a linear model requires parameter bounds")
        out = []
        while len(out) < k:
            th = rng.uniform(self.bounds[:, 0], self.bounds[:, 1], size=(4 * k, self.dim))
            P = self.point(th)
            out.extend(P[np.all(P > 1e-6, axis=1)])
        return np.array(out[:k])

    def to_dict(self) -> dict:
        d = {
            "kind": "linear",
            "n": self.n,
            "params": self.dim,
            "coefficients": self.coefficients.tolist(),
            "offsets": self.offsets.tolist(),
        }
        if self.bounds is not None:
            d["bounds"] = self.bounds.tolist()
        return d


def grid_points(n: int, d: int) -> np.ndarray:
    """All nonnegative integer vectors of length n summing to d, colex order."""
    pts = []
    for bars in itertools.combinations(range(d + n - 1), n - 1):
        prev, comp = -1, []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(d + n - 2 - prev)
        pts.append(tuple(comp))
    pts.sort(key=lambda c: c[::-1])
    return np.array(pts, dtype=int).reshape(-1, n)


@dataclass(frozen=True, eq=False)
class FiniteGridModel:
    """The finite model of all empirical distributions with sample size d."""

    n: int
    d: int
    points: np.ndarray = field(init=False, repr=False)
    kind = "finite"

    def __post_init__(self):
        if self.n < 1 or self.d < 0:
            raise InvalidModel("need n >= 1 and d >= 0")
        object.__setattr__(self, "points", grid_points(self.n, self.d))

    @property
    def name(self) -> str:
        return f"grid({self.n},{self.d})"

    def interior_points(self, min_coord: int = 1) -> np.ndarray:
        return self.points[np.all(self.points >= min_coord, axis=1)]

    def index(self, p) -> int:
        hits = np.flatnonzero(np.all(self.points == np.asarray(p), axis=1))
        if not hits.size:
            raise ValueError(f"{p} is not a point of {self.name}")
        return int(hits[0])

    def to_dict(self) -> dict:
        return {"kind": "finite", "n": self.n, "d": self.d}


class ParametricModel:
    """Polynomial parametrization ``theta -> (f_1(theta), ..., f_n(theta))``."""

    kind = "parametric"

    def __init__(self, components: Sequence[Polynomial], bounds=None, name: str = "", check: bool = True):
        comps = tuple(components)
        self.n = len(comps)
        self.params = comps[0].nvars
        if any(f.nvars != self.params for f in comps):
            raise InvalidModel("components disagree on the parameter count")
        self.components = comps
        self.bounds = None if bounds is None else np.asarray(bounds, dtype=float).reshape(self.params, 2)
        self.name = name
        if check:
            rng = np.random.default_rng(12345)
            lo, hi = (self.bounds[:, 0], self.bounds[:, 1]) if self.bounds is not None else (0.0, 1.0)
            th = rng.uniform(lo, hi, size=(100, self.params))
            if np.max(np.abs(self.point(th).sum(axis=1) - 1)) > 1e-12:
                raise InvalidModel("parametrization does not sum to 1")

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.stack([f(theta) for f in self.components], axis=-1)

    def jacobian(self, theta) -> np.ndarray:
        return np.stack([f.gradient(theta) for f in self.components], axis=-2)

    def sample_points(self, k: int, rng) -> np.ndarray:
        lo, hi = (self.bounds[:, 0], self.bounds[:, 1]) if self.bounds is not None else (0.0, 1.0)
        out = []
        while len(out) < k:
            P = self.point(rng.uniform(lo, hi, size=(4 * k, self.params)))
            out.extend(P[np.all(P > 1e-6, axis=1)])
        return np.array(out[:k])

    def to_dict(self) -> dict:
        d = {
            "kind": "parametric",
            "n": self.n,
            "params": self.params,
            "map": [_poly_to_json(f) for f in self.components],
        }
        if self.bounds is not None:
            d["bounds"] = self.bounds.tolist()
        return d


# -- builtins -----------------------------------------------------------------


def _monomial(n, **powers):
    e = [0] * n
    for k, v in powers.items():
        e[int(k[1:]) - 1] = v
    return tuple(e)


def _poly(n, *terms):
    """Terms as (coeff, {"x1": 1, ...})."""
    return Polynomial([(c, _monomial(n, **mon)) for c, mon in terms], n)


def _twisted_cubic_implicit():
    n = 4
    return ImplicitModel(
        [
            simplex_polynomial(n),
            _poly(n, (3, {"x1": 1, "x3": 1}), (-1, {"x2": 2})),
            _poly(n, (3, {"x2": 1, "x4": 1}), (-1, {"x3": 2})),
            _poly(n, (9, {"x1": 1, "x4": 1}), (-1, {"x2": 1, "x3": 1})),
        ],
        name="twisted_cubic_implicit",
    )


def _binom_poly(k: int, trials: int, var: int, nvars: int) -> list[tuple[float, tuple]]:
    """Terms of C(trials,k) z^k (1-z)^(trials-k) in variable ``var``."""
    terms = []
    for j in range(trials - k + 1):
        e = [0] * nvars
        e[var] = k + j
        terms.append((math.comb(trials, k) * math.comb(trials - k, j) * (-1) ** j, tuple(e)))
    return terms


def _mixture_param(trials: int = 5):
    # theta = (w, b, c): w * Bin(trials, b) + (1 - w) * Bin(trials, c)
    comps = []
    for k in range(trials + 1):
        terms = []
        for c, e in _binom_poly(k, trials, 1, 3):
            terms.append((c, (1, e[1], 0)))
        for c, e in _binom_poly(k, trials, 2, 3):
            terms.append((c, (0, 0, e[2])))
            terms.append((-c, (1, 0, e[2])))
        comps.append(Polynomial(terms, 3))
    return ParametricModel(comps, bounds=[[0, 1], [0, 1], [0, 1]], name="mixture_binomial_5_param")


def _mixture_implicit():
    n = 6
    cubics = [
        _poly(n, (20, {"x1": 1, "x3": 1, "x5": 1}), (-10, {"x1": 1, "x4": 2}), (-8, {"x2": 2, "x5": 1}),
              (4, {"x2": 1, "x3": 1, "x4": 1}), (-1, {"x3": 3})),
        _poly(n, (100, {"x1": 1, "x3": 1, "x6": 1}), (-20, {"x1": 1, "x4": 1, "x5": 1}),
              (-40, {"x2": 2, "x6": 1}), (4, {"x2": 1, "x3": 1, "x5": 1}), (2, {"x2": 1, "x4": 2}),
              (-1, {"x3": 2, "x4": 1})),
        _poly(n, (100, {"x1": 1, "x4": 1, "x6": 1}), (-40, {"x1": 1, "x5": 2}),
              (-20, {"x2": 1, "x3": 1, "x6": 1}), (4, {"x2": 1, "x4": 1, "x5": 1}),
              (2, {"x3": 2, "x5": 1}), (-1, {"x3": 1, "x4": 2})),
        _poly(n, (20, {"x2": 1, "x4": 1, "x6": 1}), (-8, {"x2": 1, "x5": 2}), (-10, {"x3": 2, "x6": 1}),
              (4, {"x3": 1, "x4": 1, "x5": 1}), (-1, {"x4": 3})),
    ]
    return ImplicitModel([simplex_polynomial(n), *cubics], name="mixture_binomial_5")


SEGRE_A = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]

# Point on the binomial mixture used throughout the examples.
MIXTURE_POINT = (518 / 9375, 124 / 625, 192 / 625, 168 / 625, 86 / 625, 307 / 9375)


def _builtin_factories():
    return {
        "twisted_cubic": lambda: ToricModel(
            np.array([[3, 2, 1, 0], [0, 1, 2, 3]]), weights=[1, 3, 3, 1], name="twisted_cubic"
        ),
        "twisted_cubic_implicit": _twisted_cubic_implicit,
        "twisted_cubic_param": lambda: ParametricModel(
            [
                _poly(1, (1, {"x1": 3})),
                _poly(1, (3, {"x1": 2}), (-3, {"x1": 3})),
                _poly(1, (3, {"x1": 1}), (-6, {"x1": 2}), (3, {"x1": 3})),
                Polynomial([(1, (0,)), (-3, (1,)), (3, (2,)), (-1, (3,))], 1),
            ],
            bounds=[[0, 1]],
            name="twisted_cubic_param",
        ),
        "segre": lambda: ToricModel(np.array(SEGRE_A), name="segre"),
        "segre_implicit": lambda: ImplicitModel(
            [simplex_polynomial(4), _poly(4, (1, {"x1": 1, "x4": 1}), (-1, {"x2": 1, "x3": 1}))],
            name="segre_implicit",
        ),
        "segre_param": lambda: ParametricModel(
            [
                _poly(2, (1, {"x1": 1, "x2": 1})),
                _poly(2, (1, {"x1": 1}), (-1, {"x1": 1, "x2": 1})),
                _poly(2, (1, {"x2": 1}), (-1, {"x1": 1, "x2": 1})),
                Polynomial([(1, (0, 0)), (-1, (1, 0)), (-1, (0, 1)), (1, (1, 1))], 2),
            ],
            bounds=[[0, 1], [0, 1]],
            name="segre_param",
        ),
        "cousin_hardy_weinberg": lambda: ImplicitModel(
            [simplex_polynomial(3), _poly(3, (1, {"x2": 2}), (-1, {"x1": 1, "x3": 1}))],
            name="cousin_hardy_weinberg",
        ),
        "mixture_binomial_5": _mixture_implicit,
        "mixture_binomial_5_param": _mixture_param,
        "linear_example": lambda: LinearModel(
            [[0.5], [0.5], [-1.0]], [0.0, 0.0, 1.0], bounds=[[0, 1]], name="linear_example"
        ),
    }


BUILTIN_NAMES = tuple(_builtin_factories()) + ("grid(n,d)",)

_GRID_RE = re.compile(r"^grid\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


def builtin(name: str):
    """Construct a model from the builtin catalog."""
    m = _GRID_RE.match(name.strip())
    if m:
        return FiniteGridModel(int(m.group(1)), int(m.group(2)))
    try:
        return _builtin_factories()[name]()
    except KeyError:
        raise UnknownModel(f"unknown model {name!r}; known: {', '.join(BUILTIN_NAMES)}") from None


# -- file format --------------------------------------------------------------


def _poly_to_json(f: Polynomial) -> list[dict]:
    return [{"coeff": c, "exponents": list(e)} for c, e in f.terms]


def _poly_from_json(terms: list[dict], nvars: int) -> Polynomial:
    return Polynomial([(t["coeff"], t["exponents"]) for t in terms], nvars)


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "implicit":
        n = int(d["n"])
        return ImplicitModel([_poly_from_json(t, n) for t in d["polynomials"]], codim=d.get("codim"))
    if kind == "toric":
        return ToricModel(np.array(d["matrix"]), weights=d.get("weights"))
    if kind == "linear":
        return LinearModel(d["coefficients"], d["offsets"], bounds=d.get("bounds"))
    if kind == "finite":
        return FiniteGridModel(int(d["n"]), int(d["d"]))
    if kind == "parametric":
        k = int(d["params"])
        return ParametricModel([_poly_from_json(t, k) for t in d["map"]], bounds=d.get("bounds"))
    raise InvalidModel(f"unknown model kind {kind!r}")


def model_to_dict(model) -> dict:
    return model.to_dict()


def dumps(model) -> str:
    return json.dumps(model.to_dict(), indent=1, sort_keys=True)


def loads(text: str):
    return model_from_dict(json.loads(text))


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def save(model, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(model) + "\n")


def resolve(source: str):
    """Builtin name or path to a model file."""
    try:
        return builtin(source)
    except UnknownModel:
        if not os.path.exists(source):
            raise UnknownModel(f"{source!r} is neither a builtin model nor a file") from None
        return load(source)
