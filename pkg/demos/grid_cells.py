"""Voronoi cells of a finite grid model and their dual root polytopes.

Every data vector u with sum(u) = d is assigned to the grid point p that
maximizes sum(u_i log p_i). The cells of interior points are polytopes; here
we compute them two ways (all competitors, and only the neighbours
p + e_i - e_j), compare them with the polar of the log root polytope, and
draw the whole tessellation.
"""

import argparse
from pathlib import Path

import numpy as np

from logvoronoi import logcell, logroot, polytope, svg
from logvoronoi.cli import tessellation_cells
from logvoronoi.model import FiniteGridModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)

    model = FiniteGridModel(4, 10)
    p = np.array([3, 3, 2, 2])
    _, brute = logcell.finite_voronoi_cell(model, p)
    short = polytope.vertices_of(logroot.sufficient_cell(p))
    dual = logroot.dual_cell(logroot.build(p))
    print(f"cell of {p.tolist()} in grid(4,10): {len(brute)} vertices, f-vector {polytope.f_vector(brute)}")
    print("neighbour halfspaces suffice:", polytope.same_vertex_sets(short.vertices, brute.vertices, 1e-9))
    print("polar of the root polytope:  ", polytope.same_vertex_sets(dual.vertices, brute.vertices, 1e-9))

    print("\nf-vectors of dual cells for p = (2, ..., 2):")
    for n in range(2, 7):
        fv = polytope.f_vector(logroot.dual_cell(logroot.build(np.full(n, 2))))
        print(f"  n={n}: {fv}  reversed root polytope count: {logroot.f_vector_combinatorial(n)[::-1]}")

    cells = tessellation_cells(3, 9)
    frame = (np.full(3, 3.0), logcell.projection_basis(3))
    (out / "grid_3_9.svg").write_text(svg.tessellation_svg([v for _, v in cells], frame, "cells of grid(3,9)"))
    print(f"\nwrote {out / 'grid_3_9.svg'} with {len(cells)} cells")


if __name__ == "__main__":
    main()
