import json
import math
from fractions import Fraction

import numpy as np
import pytest

from logvoronoi import model
from logvoronoi.model import (
    MIXTURE_POINT,
    FiniteGridModel,
    ImplicitModel,
    InvalidModel,
    LinearModel,
    ParametricModel,
    Polynomial,
    ToricModel,
    UnknownModel,
    builtin,
    simplex_polynomial,
)


def test_twisted_cubic_vanishes_at_half():
    m = builtin("twisted_cubic_implicit")
    assert np.max(np.abs(m.evaluate(np.array([1, 3, 3, 1]) / 8))) < 1e-14


def test_mixture_vanishes_at_reference_point(mixture):
    assert np.max(np.abs(mixture.evaluate(np.array(MIXTURE_POINT)))) < 1e-12


def test_mixture_point_is_exact_mixture():
    # the reference point is 1/3 Bin(5, 3/5) + 2/3 Bin(5, 2/5), in exact arithmetic
    def binom(q):
        return [math.comb(5, k) * q**k * (1 - q) ** (5 - k) for k in range(6)]

    mix = [Fraction(1, 3) * a + Fraction(2, 3) * b for a, b in zip(binom(Fraction(3, 5)), binom(Fraction(2, 5)))]
    assert mix == [Fraction(518, 9375), Fraction(124, 625), Fraction(192, 625), Fraction(168, 625),
                   Fraction(86, 625), Fraction(307, 9375)]


def test_simplex_polynomial_at_vertex():
    assert simplex_polynomial(4)(np.array([1.0, 0, 0, 0])) == 0.0


def test_simplex_row_of_jacobian():
    m = builtin("segre_implicit")
    x = np.random.default_rng(0).random(4)
    assert np.array_equal(m.jacobian(x)[0], np.ones(4))


def test_segre_jacobian_row():
    m = builtin("segre_implicit")
    x = np.random.default_rng(1).random(4)
    assert np.allclose(m.jacobian(x)[1], [x[3], -x[2], -x[1], x[0]])


@pytest.mark.parametrize("name", ["twisted_cubic_implicit", "segre_implicit", "cousin_hardy_weinberg",
                                  "mixture_binomial_5"])
def test_jacobian_finite_differences(name):
    m = builtin(name)
    rng = np.random.default_rng(5)
    h = 1e-6
    worst = 0.0
    for x in rng.random((20, m.n)):
        J = m.jacobian(x)
        for k in range(m.n):
            e = np.zeros(m.n)
            e[k] = h
            fd = (m.evaluate(x + e) - m.evaluate(x - e)) / (2 * h)
            worst = max(worst, np.max(np.abs(fd - J[:, k])))
    assert worst < 1e-6


def test_hessians_finite_differences(mixture):
    x = np.random.default_rng(2).random(6)
    h = 1e-6
    H = mixture.hessians(x)
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        fd = (mixture.jacobian(x + e) - mixture.jacobian(x - e)) / (2 * h)
        assert np.max(np.abs(fd - H[:, :, k])) < 1e-6


def test_compiled_evaluation_matches_polynomials(mixture):
    X = np.random.default_rng(3).normal(size=(5, 6)) + 1j * np.random.default_rng(4).normal(size=(5, 6))
    direct = np.stack([f(X) for f in mixture.polynomials], axis=-1)
    assert np.max(np.abs(mixture.evaluate(X) - direct)) < 1e-12
    grads = np.stack([f.gradient(X) for f in mixture.polynomials], axis=-2)
    assert np.max(np.abs(mixture.jacobian(X) - grads)) < 1e-12


def test_builtin_twisted_cubic():
    m = builtin("twisted_cubic")
    assert isinstance(m, ToricModel)
    assert m.A.tolist() == [[3, 2, 1, 0], [0, 1, 2, 3]]
    assert m.weights.tolist() == [1, 3, 3, 1]
    t = 0.3
    assert np.allclose(m.point([np.log(t), np.log(1 - t)]),
                       [t**3, 3 * t**2 * (1 - t), 3 * t * (1 - t) ** 2, (1 - t) ** 3])


def test_builtin_grid():
    m = builtin("grid(4,9)")
    assert isinstance(m, FiniteGridModel)
    assert len(m.points) == 220


def test_builtin_mixture(mixture):
    assert isinstance(mixture, ImplicitModel)
    assert mixture.m == 5
    assert mixture.codim == 3
    assert mixture.polynomials[0] == simplex_polynomial(6)
    # first cubic verbatim: 20x1x3x5 - 10x1x4^2 - 8x2^2x5 + 4x2x3x4 - x3^3
    expected = Polynomial([(20, (1, 0, 1, 0, 1, 0)), (-10, (1, 0, 0, 2, 0, 0)), (-8, (0, 2, 0, 0, 1, 0)),
                           (4, (0, 1, 1, 1, 0, 0)), (-1, (0, 0, 3, 0, 0, 0))], 6)
    assert mixture.polynomials[1] == expected


def test_codimensions():
    assert builtin("twisted_cubic_implicit").codim == 3
    assert builtin("segre_implicit").codim == 2
    assert builtin("cousin_hardy_weinberg").codim == 2
    assert builtin("twisted_cubic").codim == 3
    assert builtin("segre").codim == 2


def test_unknown_model():
    with pytest.raises(UnknownModel):
        builtin("nope")


@pytest.mark.parametrize("pair", [("twisted_cubic_param", "twisted_cubic_implicit"),
                                  ("segre_param", "segre_implicit"),
                                  ("mixture_binomial_5_param", "mixture_binomial_5")])
def test_parametrizations_satisfy_implicit_equations(pair):
    param, implicit = builtin(pair[0]), builtin(pair[1])
    P = param.sample_points(200, np.random.default_rng(11))
    assert np.max(np.abs(implicit.evaluate(P))) < 1e-10


def test_toric_points_satisfy_implicit_equations():
    P = builtin("twisted_cubic").sample_points(50, np.random.default_rng(1))
    assert np.max(np.abs(builtin("twisted_cubic_implicit").evaluate(P))) < 1e-12
    P = builtin("segre").sample_points(50, np.random.default_rng(1))
    assert np.max(np.abs(builtin("segre_implicit").evaluate(P))) < 1e-12


@pytest.mark.parametrize("n", range(1, 8))
def test_grid_counts(n):
    for d in range(0, 13):
        pts = model.grid_points(n, d)
        assert len(pts) == math.comb(n + d - 1, d)
        assert np.all(pts.sum(axis=1) == d)
        assert len({tuple(p) for p in pts}) == len(pts)


def test_grid_colex_order():
    pts = model.grid_points(3, 2).tolist()
    assert pts == sorted(pts, key=lambda c: c[::-1])


def test_toric_rejects_bad_matrices():
    with pytest.raises(InvalidModel):
        ToricModel(np.array([[1, 0, 0], [0, 1, 0]]))  # all-ones not in row span
    with pytest.raises(InvalidModel):
        ToricModel(np.array([[1, 0, 1], [0, 0, 0]]))  # zero column
    with pytest.raises(InvalidModel):
        ToricModel(np.array([[1, 1]]), weights=[1, -1])


def test_linear_model_validation():
    with pytest.raises(InvalidModel):
        LinearModel([[1.0], [1.0]], [0.0, 1.0])
    with pytest.raises(InvalidModel):
        LinearModel([[0.0], [0.0], [0.0]], [0.0, 0.5, 0.5])


def test_parametric_sum_check():
    with pytest.raises(InvalidModel):
        ParametricModel([Polynomial([(1, (1,))], 1), Polynomial([(1, (1,))], 1)])


def test_implicit_requires_simplex_first():
    with pytest.raises(InvalidModel):
        ImplicitModel([Polynomial([(1, (2, 0, 0)), (-1, (0, 1, 1))], 3), simplex_polynomial(3)])


def test_sample_points_are_smooth(mixture):
    from logvoronoi import linalg

    P = mixture.sample_points(10, np.random.default_rng(4))
    assert np.all(P > 0)
    assert all(linalg.rank(mixture.jacobian(x), 1e-8) == 3 for x in P)


@pytest.mark.parametrize("name", ["twisted_cubic", "twisted_cubic_implicit", "segre", "mixture_binomial_5",
                                  "mixture_binomial_5_param", "linear_example", "grid(3,5)", "cousin_hardy_weinberg"])
def test_round_trip(name, tmp_path):
    m = builtin(name)
    text = model.dumps(m)
    again = model.loads(text)
    assert model.dumps(again) == text
    assert json.loads(text)["kind"] == m.kind
    path = tmp_path / "m.json"
    model.save(m, path)
    assert model.dumps(model.resolve(str(path))) == text


def test_polynomial_basics():
    f = Polynomial([(2, (1, 1)), (3, (1, 1)), (0, (2, 0))], 2)
    assert f.terms == [(5.0, (1, 1))]
    assert f.degree == 2
    assert f(np.array([2.0, 3.0])) == 30.0
    assert np.allclose(f.gradient(np.array([2.0, 3.0])), [15, 10])
    assert np.allclose(f.hessian(np.array([2.0, 3.0])), [[0, 5], [5, 0]])
