"""A Voronoi cell that is not a polytope: the binomial mixture model.

The model of mixtures of two Bin(5, .) distributions is cut out by four
cubics. Its log-normal polytope at the point p = 1/3 Bin(5, 3/5) +
2/3 Bin(5, 2/5) is a hexagon, and the Voronoi cell is a curved region
inside it. We find critical points of the likelihood by multi-start Newton
on a randomized square system, then label sample points in the hexagon by
whether p beats every critical point found.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from logvoronoi import logcell, mle, svg
from logvoronoi.model import MIXTURE_POINT, builtin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2019)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)

    model = builtin("mixture_binomial_5")
    p = np.array(MIXTURE_POINT)
    v = logcell.log_normal_polytope(model, p)
    print(f"log-normal polytope at p: {len(v)} vertices")

    u = np.random.default_rng(args.seed).dirichlet(np.ones(6))
    sys = mle.build_critical_system(model, u, args.seed)
    t0 = time.perf_counter()
    found = mle.find_critical_points(sys, 2000, args.seed, positive_only=False, domain="complex")
    print(f"generic u: {len(found)} certified critical points ({len(found.real)} real, "
          f"{len(found.positive)} positive) in {time.perf_counter() - t0:.1f}s; the ML degree is 39")

    t0 = time.perf_counter()
    S = logcell.sample_cell(model, p, args.samples, seed=args.seed, radius=0.1, starts=60)
    print(f"{args.samples} samples within 0.1 of p labelled in {time.perf_counter() - t0:.1f}s:", S.counts())
    (out / "mixture_samples.csv").write_text(S.to_csv())
    (out / "mixture_cell.svg").write_text(svg.polytope_svg(v, S.points, S.labels, "mixture model cell"))
    print(f"wrote {out / 'mixture_cell.svg'}")


if __name__ == "__main__":
    main()
