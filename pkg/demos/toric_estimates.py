"""Maximum likelihood on toric models and their exact Voronoi cells.

For a toric model the estimate is the unique model point with the same
sufficient statistics A p = A u, and the Voronoi cell of p is the whole
fibre {u >= 0 : A u = A p}. The twisted cubic has a closed form for the
estimate, which we compare against.
"""

import argparse
from pathlib import Path

import numpy as np

from logvoronoi import logcell, mle, polytope, svg
from logvoronoi.model import builtin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output")
    ap.add_argument("--seed", type=int, default=2019)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)

    tc = builtin("twisted_cubic")
    rng = np.random.default_rng(args.seed)
    print("twisted cubic estimates against the closed form t = (3u1 + 2u2 + u3)/3:")
    for u in rng.dirichlet(np.ones(4), 5):
        p = mle.mle_toric(tc, u)
        t = (3 * u[0] + 2 * u[1] + u[2]) / 3
        print(f"  u={np.round(u, 3)}  t_hat={p[0] ** (1 / 3):.12f}  closed form={t:.12f}")

    t = 0.5
    p = np.array([t**3, 3 * t**2 * (1 - t), 3 * t * (1 - t) ** 2, (1 - t) ** 3])
    v = logcell.log_normal_polytope(tc, p)
    print(f"\ncell of p(1/2): {len(v)} vertices")
    for row in v.vertices:
        print("  ", row)
    S = logcell.sample_cell(tc, p, 200, seed=args.seed)
    print("labels of 200 samples from the cell:", S.counts())
    (out / "twisted_cubic_cell.svg").write_text(svg.polytope_svg(v, S.points, S.labels, "twisted cubic cell"))

    segre = builtin("segre")
    u = np.array([10.0, 20.0, 30.0, 40.0])
    print("\nSegre estimate (row sums times column sums):", mle.mle(segre, u).point)


if __name__ == "__main__":
    main()
