"""Faces of a logarithmic root polytope from ordered partition pairs.

Each pair (I, J) of disjoint nonempty index sets gives a linear functional
g_IJ that is maximized exactly on the vertices v_ij with i in I, j in J.
Conversely, the argmax of a functional recovers its pair.
"""

import numpy as np

from logvoronoi import logroot


def main():
    p = [2, 15, 3, 5, 9, 6]
    poly = logroot.build(p)
    part = logroot.OrderedPartitionPair([0, 3], [1, 2, 4])
    cert = logroot.face_vertices(poly, part)
    print(f"p = {p}, I = {{1,4}}, J = {{2,3,5}} (1-based)")
    print("g_IJ =", np.round(logroot.face_functional(poly, part), 7))
    print(f"value on the face: {cert.common_value:.12g}; best other vertex: {cert.best_other:.12g}")
    print("face vertices:", [(i + 1, j + 1) for i, j in cert.pairs])

    rng = np.random.default_rng(0)
    f = rng.normal(size=len(p))
    print("\na random functional picks out the vertex of pair", logroot.partition_from_functional(poly, f))
    counts = {}
    for pr in logroot.partition_pairs(len(p)):
        counts[pr.face_dim] = counts.get(pr.face_dim, 0) + 1
    print("faces by dimension:", dict(sorted(counts.items())))
    print("combinatorial f-vector:", logroot.f_vector_combinatorial(len(p)))


if __name__ == "__main__":
    main()
