"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[acceptance N] PASS/FAIL`` line (shown even
without ``-s``) before asserting.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from logvoronoi import logcell, logroot, mle, polytope
from logvoronoi.cli import main
from logvoronoi.model import MIXTURE_POINT, FiniteGridModel, builtin


@pytest.fixture
def verdict(capsys):
    def report(num, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {num}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return report


def test_01_f_vector_table(verdict):
    table = {
        2: (1, 2, 1),
        3: (1, 6, 6, 1),
        4: (1, 14, 24, 12, 1),
        5: (1, 30, 70, 60, 20, 1),
        6: (1, 62, 180, 210, 120, 30, 1),
    }
    t0 = time.perf_counter()
    got = {}
    for n in table:
        for p in (np.full(n, 2), np.arange(2, n + 2)):
            got[(n, tuple(p))] = polytope.f_vector(logroot.dual_cell(logroot.build(p)))
    elapsed = time.perf_counter() - t0
    ok = all(fv == table[n] for (n, _), fv in got.items()) and elapsed < 120
    verdict(1, ok, f"f-vectors {sorted(set(got.values()), key=len)} in {elapsed:.1f}s")


@pytest.mark.slow
def test_01_f_vector_n7(verdict):
    t0 = time.perf_counter()
    fv = polytope.f_vector(logroot.dual_cell(logroot.build(np.full(7, 2))))
    elapsed = time.perf_counter() - t0
    verdict("1 (n=7)", fv == (1, 126, 434, 630, 490, 210, 42, 1) and elapsed < 1800, f"{fv} in {elapsed:.1f}s")


def sig3(x):
    return 0.0 if x == 0 else float(f"{x:.2e}")


def test_02_face_functional_regression(verdict):
    t0 = time.perf_counter()
    poly = logroot.build([2, 15, 3, 5, 9, 6])
    part = logroot.OrderedPartitionPair([0, 3], [1, 2, 4])  # I = {1,4}, J = {2,3,5}, 1-based
    g = logroot.face_functional(poly, part)
    cert = logroot.face_vertices(poly, part)
    elapsed = time.perf_counter() - t0
    expected = [0.00415, -0.00200, -0.00398, 0.00474, -0.00291, 0.0]
    g_ok = all(sig3(a) == b and (b != 0 or abs(a) < 1e-12) for a, b in zip(g, expected))
    on = cert.values[cert.on_face]
    value_ok = np.max(np.abs(on - 0.008135843945)) <= 5e-9 * 0.008135843945
    others_ok = cert.on_face.sum() == 6 and np.all(cert.values[~cert.on_face] < on.min())
    ok = g_ok and value_ok and others_ok and elapsed < 1
    verdict(2, ok, f"g = {np.round(g, 7).tolist()}, common value {cert.common_value:.12g}, "
                   f"gap {cert.gap:.3e}, {elapsed * 1000:.0f} ms")


def test_03_duality(verdict):
    t0 = time.perf_counter()
    devs = []
    for n, d, p in ((3, 7, (3, 2, 2)), (4, 10, (3, 3, 2, 2))):
        _, brute = logcell.finite_voronoi_cell(FiniteGridModel(n, d), np.array(p))
        same, dev = polytope.same_vertex_sets(logroot.dual_cell(logroot.build(p)).vertices, brute.vertices, 1e-9)
        devs.append(dev if same else np.inf)
    elapsed = time.perf_counter() - t0
    verdict(3, max(devs) <= 1e-9 and elapsed < 10, f"max deviations {devs} in {elapsed:.2f}s")


def test_04_sufficiency(verdict):
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for n, d in ((3, 6), (3, 7), (4, 8)):
        model = FiniteGridModel(n, d)
        for p in model.interior_points(1):
            _, brute = logcell.finite_voronoi_cell(model, p)
            cell = polytope.vertices_of(logroot.sufficient_cell(p))
            same, dev = polytope.same_vertex_sets(cell.vertices, brute.vertices, 1e-9)
            worst = max(worst, dev if same else np.inf)
            count += 1
    elapsed = time.perf_counter() - t0
    verdict(4, worst <= 1e-9 and elapsed < 60, f"{count} interior points, max deviation {worst:.1e}, {elapsed:.1f}s")


HEXAGON = [
    ("0", "651/1625", "0", "30569/58500", "43/2250", "3377/58500"),
    ("0", "124/375", "88/375", "77/375", "86/375", "0"),
    ("8288/76875", "0", "3176/5125", "0", "1376/5125", "307/76875"),
    ("259/1875", "0", "52/125", "91/250", "0", "307/3750"),
    ("518/76875", "1984/5125", "0", "2779/5125", "0", "4912/76875"),
    ("2849/29250", "31/1125", "8734/14625", "0", "903/3250", "0"),
]


def test_05_mixture_hexagon(verdict):
    t0 = time.perf_counter()
    v = logcell.log_normal_polytope(builtin("mixture_binomial_5"), np.array(MIXTURE_POINT))
    elapsed = time.perf_counter() - t0
    expected = np.array([[float(Fraction(x)) for x in row] for row in HEXAGON])
    same, dev = polytope.same_vertex_sets(v.vertices, expected, 1e-9)
    ok = len(v) == 6 and same and elapsed < 5
    verdict(5, ok, f"{len(v)} vertices, max deviation {dev:.1e}, {elapsed:.2f}s")


def test_06_birch_and_closed_forms(verdict):
    t0 = time.perf_counter()
    tc, segre = builtin("twisted_cubic"), builtin("segre")
    U = np.random.default_rng(2019).dirichlet(np.ones(4), 100)
    birch = t_err = segre_err = 0.0
    for u in U:
        p = mle.mle_toric(tc, u)
        birch = max(birch, np.max(np.abs(tc.A @ p - tc.A @ u)))
        t = (3 * u[0] + 2 * u[1] + u[2]) / 3
        t_err = max(t_err, abs(p[0] ** (1 / 3) - t))
        q = mle.mle_toric(segre, u)
        r, c = u[0] + u[1], u[0] + u[2]
        segre_err = max(segre_err, np.max(np.abs(q - [r * c, r * (1 - c), (1 - r) * c, (1 - r) * (1 - c)])))
    elapsed = time.perf_counter() - t0
    ok = birch < 1e-9 and t_err < 1e-9 and segre_err < 1e-10 and elapsed < 5
    verdict(6, ok, f"|Ap-Au| {birch:.1e}, t error {t_err:.1e}, Segre error {segre_err:.1e}, {elapsed:.2f}s")


def test_07_ml_degree_properties(verdict):
    t0 = time.perf_counter()
    # (a) cousin Hardy-Weinberg: ML degree 2, both solutions real
    cousin = builtin("cousin_hardy_weinberg")
    twos = 0
    for k in range(20):
        u = np.random.default_rng([2019, 7, k]).dirichlet(np.ones(3))
        found = mle.find_critical_points(mle.build_critical_system(cousin, u), 500, positive_only=False)
        twos += len(found.real) == 2
    # (b) p is recovered without seeding it
    mix = builtin("mixture_binomial_5")
    p = np.array(MIXTURE_POINT)
    h = logcell.log_normal_polytope_h(mix, p)
    u = logcell.sample_polytope(h, polytope.vertices_of(h), 1, seed=2019, center=p, radius=0.02)[0]
    sys_b = mle.build_critical_system(mix, u)
    found = mle.find_critical_points(sys_b, 1000)
    hits = [q for q in found.points if np.max(np.abs(q.x - p)) < 1e-8]
    b_ok = bool(hits) and hits[0].residual < 1e-8
    # (c) lower bound on the number of critical points for generic data
    uc = np.random.default_rng([2019, 9]).dirichlet(np.ones(6))
    sys_c = mle.build_critical_system(mix, uc)
    found_c = mle.find_critical_points(sys_c, 5000, positive_only=False, domain="complex")
    elapsed = time.perf_counter() - t0
    ok = twos >= 19 and b_ok and len(found_c) >= 10 and elapsed < 600
    verdict(7, ok, f"(a) 2 real in {twos}/20, (b) p recovered: {b_ok}, "
                   f"(c) {len(found_c)} certified critical points ({len(found_c.real)} real) of at most 39, "
                   f"{elapsed:.0f}s")


def segre_minors(x, u):
    # the four 3x3 minors of [df; 1; u/x] written out by hand
    x1, x2, x3, x4 = x
    u1, u2, u3, u4 = u
    return np.array([
        u2 - u3 - u1 * x2 / x1 + u1 * x3 / x1 + u2 * x4 / x2 - u3 * x4 / x3,
        u1 - u4 - u2 * x1 / x2 + u1 * x3 / x1 - u4 * x3 / x4 + u2 * x4 / x2,
        u1 - u4 + u1 * x2 / x1 - u3 * x1 / x3 - u4 * x2 / x4 + u3 * x4 / x3,
        u2 - u3 + u2 * x1 / x2 - u3 * x1 / x3 - u4 * x2 / x4 + u4 * x3 / x4,
    ])


def test_08_log_normal_geometry(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2019)
    cousin = builtin("cousin_hardy_weinberg")
    d = np.array([1.0, -2.0, 1.0]) / np.sqrt(6)
    cross = 0.0
    for p in cousin.sample_points(50, rng):
        direction = np.cross(logcell.log_normal_space(cousin, p).complement()[0], np.ones(3))
        cross = max(cross, np.linalg.norm(np.cross(direction / np.linalg.norm(direction), d)))
    segre = builtin("segre_implicit")
    minors = 0.0
    for p in segre.sample_points(20, rng):
        for b in logcell.log_normal_space(segre, p).basis:
            minors = max(minors, np.max(np.abs(segre_minors(p, b))))
    names = ["twisted_cubic", "twisted_cubic_implicit", "segre", "segre_implicit", "cousin_hardy_weinberg",
             "mixture_binomial_5", "linear_example"]
    gap = 0.0
    for name in names:
        m = builtin(name)
        for p in m.sample_points(20, rng):
            gap = max(gap, logcell.space_gap(logcell.log_normal_space(m, p), logcell.log_normal_space_by_minors(m, p)))
    elapsed = time.perf_counter() - t0
    ok = cross < 1e-9 and minors < 1e-9 and gap < 1e-9 and elapsed < 10
    verdict(8, ok, f"(a) cross residual {cross:.1e}, (b) minors {minors:.1e}, (c) angle gap {gap:.1e}, {elapsed:.1f}s")


def test_09_classification_oracle(verdict):
    t0 = time.perf_counter()
    model = FiniteGridModel(3, 6)
    cells = {tuple(p): logcell.finite_voronoi_cell(model, p)[0] for p in model.interior_points(1)}
    mismatches = checked = 0
    for u in np.random.default_rng(2019).dirichlet(np.ones(3), 1000) * 6:
        q = tuple(mle.mle_finite(model, u))
        for p, h in cells.items():
            s = np.min(h.slack(u) / np.linalg.norm(h.A, axis=1))
            if abs(s) <= 1e-8:
                continue
            checked += 1
            mismatches += (s > 0) != (p == q)
    # convexity audit on the mixture cell
    mix = builtin("mixture_binomial_5")
    p = np.array(MIXTURE_POINT)
    h = logcell.log_normal_polytope_h(mix, p)
    ends = logcell.sample_polytope(h, polytope.vertices_of(h), 40, seed=2019, center=p, radius=0.05)
    inside = ends[np.array(logcell.classify_many(mix, p, ends, starts=200)) == logcell.IN]
    pick = np.random.default_rng([2019, 9]).integers(0, len(inside), size=(500, 2))
    pick = pick[pick[:, 0] != pick[:, 1]][:500]
    while len(pick) < 500:
        pick = np.vstack([pick, [[0, len(inside) - 1]]])
    mids = (inside[pick[:, 0]] + inside[pick[:, 1]]) / 2
    labels = logcell.classify_many(mix, p, mids, starts=60)
    violations = labels.count(logcell.OUT)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and violations == 0 and elapsed < 120
    verdict(9, ok, f"{mismatches} mismatches over {checked} checks; {len(inside)} in-cell endpoints, "
                   f"{violations} convexity violations in {len(mids)} midpoints; {elapsed:.0f}s")


DETERMINISM = [
    ["cell", "--model", "mixture_binomial_5", "--point", "518/9375,124/625,192/625,168/625,86/625,307/9375", "--svg"],
    ["cell", "--model", "twisted_cubic", "--params", "0.3", "--svg"],
    ["sample", "--model", "mixture_binomial_5", "--params", "1/3,3/5,2/5", "--samples", "20", "--starts", "30",
     "--radius", "0.05", "--svg"],
    ["sample", "--model", "segre", "--params", "0.3,0.6", "--samples", "50", "--svg"],
    ["logroot", "--point", "2,15,3,5,9,6", "--functional", "1,4:2,3,5"],
    ["logroot", "--point", "3,3,2,2", "--svg"],
    ["tessellate", "--n", "3", "--d", "7"],
    ["critical", "--model", "mixture_binomial_5", "--data", "3,5,8,6,4,2", "--starts", "200", "--complex"],
    ["mle", "--model", "mixture_binomial_5", "--data", "3,5,8,6,4,2", "--starts", "100"],
]


def test_10_determinism(verdict, tmp_path, capsys):
    differing = []
    for k, argv in enumerate(DETERMINISM):
        runs = []
        for rep in range(2):
            d = tmp_path / f"{k}_{rep}"
            code = main(argv + ["--out", str(d)])
            out = capsys.readouterr().out
            files = {f.name: f.read_bytes() for f in sorted(d.iterdir())} if d.exists() else {}
            runs.append((code, out, files))
        if runs[0] != runs[1] or runs[0][0] != 0:
            differing.append(argv[0])
    verdict(10, not differing, f"{len(DETERMINISM)} commands rerun, differing: {differing or 'none'}")
