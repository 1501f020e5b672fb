import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from logvoronoi import mle as M
from logvoronoi.model import FiniteGridModel, LinearModel, builtin


def test_data_point_validation():
    with pytest.raises(M.NonpositiveCoordinate):
        M.DataPoint([1.0, 0.0])
    with pytest.raises(ValueError):
        M.DataPoint([0.5, 0.6])
    d = M.DataPoint.of([2.0, 6.0])
    assert d.scale == 8.0 and np.allclose(d.normalized, [0.25, 0.75])


def test_log_likelihood():
    assert M.log_likelihood([1, 2], [0.5, 0.5]) == pytest.approx(3 * np.log(0.5))
    with pytest.raises(M.NonpositiveCoordinate):
        M.log_likelihood([1, 2], [1.0, 0.0])


def test_mle_finite_matches_enumeration():
    model = FiniteGridModel(3, 7)
    rng = np.random.default_rng(1)
    for u in rng.dirichlet(np.ones(3), 200):
        best = max((q for q in itertools.product(range(1, 8), repeat=3) if sum(q) == 7),
                   key=lambda q: float(np.dot(u, np.log(q))))
        assert tuple(M.mle_finite(model, u)) == best


def test_mle_finite_tie():
    with pytest.raises(M.Tie):
        M.mle_finite(FiniteGridModel(2, 3), [1.0, 1.0])


def test_moment_map():
    m = builtin("twisted_cubic")
    assert np.allclose(M.moment_map(m, [1, 1, 1, 1]), [1.5, 1.5])


def test_twisted_cubic_closed_form():
    m = builtin("twisted_cubic")
    for u in np.random.default_rng(2).dirichlet(np.ones(4), 50):
        t = (3 * u[0] + 2 * u[1] + u[2]) / 3
        expected = [t**3, 3 * t**2 * (1 - t), 3 * t * (1 - t) ** 2, (1 - t) ** 3]
        assert np.max(np.abs(M.mle_toric(m, u) - expected)) < 1e-10


def test_segre_closed_form():
    m = builtin("segre")
    for u in np.random.default_rng(3).dirichlet(np.ones(4), 50):
        r, c = u[0] + u[1], u[0] + u[2]
        expected = [r * c, r * (1 - c), (1 - r) * c, (1 - r) * (1 - c)]
        assert np.max(np.abs(M.mle_toric(m, u) - expected)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 10.0), min_size=4, max_size=4))
def test_birch_property(raw):
    m = builtin("twisted_cubic")
    u = np.array(raw)
    p = M.mle_toric(m, u)
    assert abs(p.sum() - 1) < 1e-12
    assert np.max(np.abs(m.A @ p - m.A @ u / u.sum())) < 1e-9
    # p is a model point
    assert np.max(np.abs(builtin("twisted_cubic_implicit").evaluate(p))) < 1e-10


def test_iterative_scaling_agrees_with_newton():
    m = builtin("twisted_cubic")
    u = np.array([0.1, 0.2, 0.3, 0.4])
    p_ips = M._ips(m.A.astype(float), m.A @ u, m.weights, 1e-12)
    assert np.max(np.abs(p_ips - M.mle_toric(m, u))) < 1e-10


def test_linear_closed_form():
    m = builtin("linear_example")
    u = np.array([0.2, 0.5, 0.3])
    t = u[0] + u[1]
    assert np.allclose(M.mle_linear(m, u), [t / 2, t / 2, 1 - t], atol=1e-12)


def test_linear_against_scalar_optimizer():
    # two-component mixture of fixed distributions
    a, b = np.array([0.6, 0.3, 0.1]), np.array([0.1, 0.2, 0.7])
    m = LinearModel((a - b)[:, None], b)
    u = np.array([3.0, 5.0, 2.0])
    res = minimize_scalar(lambda t: -u @ np.log(t * a + (1 - t) * b), bounds=(0, 1), method="bounded",
                          options={"xatol": 1e-12})
    assert np.allclose(M.mle_linear(m, u), res.x * a + (1 - res.x) * b, atol=1e-7)


def test_critical_system_jacobian_finite_differences(mixture):
    sys = M.build_critical_system(mixture, np.arange(1, 7, dtype=float))
    rng = np.random.default_rng(0)
    z = np.r_[rng.dirichlet(np.ones(6)), rng.normal(size=3)]
    J = sys.jacobian(z)
    h = 1e-6
    fd = np.column_stack([(sys.residual(z + h * e) - sys.residual(z - h * e)) / (2 * h) for e in np.eye(z.size)])
    assert np.max(np.abs(fd - J)) < 1e-5 * max(1.0, np.abs(J).max())


def test_critical_system_is_deterministic(mixture):
    a = M.build_critical_system(mixture, np.ones(6), seed=7)
    b = M.build_critical_system(mixture, np.ones(6), seed=7)
    assert np.array_equal(a.A_rand, b.A_rand) and np.array_equal(a.B_rand, b.B_rand)


def test_start_points_do_not_depend_on_count(mixture):
    sys = M.build_critical_system(mixture, np.ones(6))
    X10 = M.starting_points(sys, 10, 5)
    X4 = M.starting_points(sys, 4, 5)
    assert np.array_equal(X10[:4], X4)


def test_cousin_hardy_weinberg_two_critical_points():
    m = builtin("cousin_hardy_weinberg")
    u = np.array([0.3, 0.25, 0.45])
    sys = M.build_critical_system(m, u)
    found = M.find_critical_points(sys, starts=200, positive_only=False)
    assert len(found.real) == 2
    assert len(found.positive) == 1
    for q in found.points:
        assert sys.lagrange_residual(q.x) < 1e-10
        assert np.max(np.abs(m.evaluate(q.x))) < 1e-10


def test_implicit_matches_toric_estimates():
    u = np.array([0.1, 0.35, 0.2, 0.35])
    for implicit, toric in (("segre_implicit", "segre"), ("twisted_cubic_implicit", "twisted_cubic")):
        est = M.mle_implicit(builtin(implicit), u)
        assert np.max(np.abs(est.point - M.mle_toric(builtin(toric), u))) < 1e-9


def test_dispatch_routes():
    u = np.array([2.0, 3.0, 4.0, 1.0])
    assert M.mle(builtin("grid(4,10)"), u).route == "finite"
    e = M.mle(builtin("segre"), u)
    assert e.route == "toric" and abs(e.point.sum() - 10) < 1e-9 and e.residual < 1e-9
    e = M.mle(builtin("segre_implicit"), u)
    assert e.route == "implicit" and e.best_effort
    assert M.mle(builtin("linear_example"), u[:3]).route == "linear"
    with pytest.raises(TypeError):
        M.mle(builtin("segre_param"), u)


def test_complex_mode_finds_conjugate_pairs(mixture):
    u = np.array([3.0, 5.0, 8.0, 6.0, 4.0, 2.0])
    sys = M.build_critical_system(mixture, u)
    found = M.find_critical_points(sys, starts=300, positive_only=False, domain="complex")
    nonreal = [q for q in found.points if not q.is_real]
    assert nonreal
    for q in nonreal:
        assert any(np.max(np.abs(r.x - q.x.conj())) < 1e-6 for r in nonreal)
    # positives first, sorted by likelihood
    ll = [q.loglik for q in found.positive]
    assert ll == sorted(ll, reverse=True)


def test_no_positive_critical_point_raises():
    with pytest.raises(M.NoCriticalPointFound):
        M.CriticalPointSet().best()
