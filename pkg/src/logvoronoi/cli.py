"""Command-line interface.

Subcommands: ``cell``, ``sample``, ``logroot``, ``tessellate``, ``mle`` and
``critical``. Every randomized step is driven by ``--seed`` (default 2019),
and the seed is written into the header of every output file, so repeated
runs produce identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import logcell, logroot, mle, model, polytope, svg
from .io import critical_report, format_vector, parse_vector, read_points

DEFAULT_SEED = 2019


class UsageError(ValueError):
    pass


# -- argument helpers ---------------------------------------------------------------


def _load_model(args):
    name = args.model
    if name == "grid":
        if args.n is None or args.d is None:
            raise UsageError("--model grid needs --n and --d")
        return model.FiniteGridModel(args.n, args.d)
    if name is None:
        raise UsageError("--model is required")
    return model.resolve(name)


def _model_point(args, m) -> np.ndarray:
    """Point from --point, or from --params through the model's parametrization."""
    if args.point is not None:
        p = parse_vector(args.point)
        if isinstance(m, model.FiniteGridModel):
            return np.round(p).astype(int)
        return p / p.sum()
    if args.params is None:
        raise UsageError("give --point or --params")
    theta = parse_vector(args.params)
    if isinstance(m, (model.ToricModel, model.LinearModel)) and not _has_param(args.model):
        return m.point(theta)
    if args.model and _has_param(args.model):
        return model.builtin(args.model.removesuffix("_implicit") + "_param").point(theta)
    raise UsageError(f"--params is not supported for {args.model}")


def _has_param(name) -> bool:
    return bool(name) and name.removesuffix("_implicit") + "_param" in model.BUILTIN_NAMES


def _data(args) -> np.ndarray:
    if args.data is None:
        raise UsageError("--data is required")
    if os.path.exists(args.data):
        return read_points(args.data)
    return parse_vector(args.data)[None, :]


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _write(path: Path, text: str) -> None:
    # write once, atomically
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _polytope_text(v, h=None, header: dict | None = None) -> str:
    d = polytope.polytope_to_dict(v, h)
    if header:
        d["meta"] = header
    return json.dumps(d, indent=1, sort_keys=True) + "\n"


def _frame(v: polytope.VPolytope, n: int):
    """Drawing frame: affine hull up to dimension 2, otherwise the fixed basis."""
    if v.dim <= 2:
        return polytope.affine_hull(v.vertices)[:2]
    B = logcell.projection_basis(n)
    return v.vertices.mean(axis=0), B[: min(3, n - 1)]


# -- subcommands ----------------------------------------------------------------------


def cmd_cell(args) -> int:
    m = _load_model(args)
    p = _model_point(args, m)
    if isinstance(m, model.FiniteGridModel):
        h, v = logcell.finite_voronoi_cell(m, p)
        exact = True
    else:
        h = logcell.log_normal_polytope_h(m, p)
        v = polytope.vertices_of(h)
        exact = isinstance(m, (model.ToricModel, model.LinearModel))
    fv = polytope.f_vector(v)
    header = {"model": args.model, "point": format_vector(p), "exact_cell": exact, "f_vector": list(fv)}
    _write(_out(args, "cell.json"), _polytope_text(v, h, header))
    print(f"model: {args.model}")
    print(f"point: {format_vector(p)}")
    print(f"vertices: {len(v)}")
    print(f"dimension: {v.dim}")
    print(f"f-vector: {fv}")
    print("log-normal polytope equals the Voronoi cell" if exact else "log-normal polytope (contains the Voronoi cell)")
    for row in v.vertices:
        print("  " + format_vector(row))
    if args.svg:
        _write(_out(args, "cell.svg"), svg.polytope_svg(v, points=np.atleast_2d(p), title=f"cell of {args.model}",
                                                       frame=_frame(v, len(p))))
    return 0


def cmd_sample(args) -> int:
    m = _load_model(args)
    p = _model_point(args, m)
    S = logcell.sample_cell(m, p, args.samples, seed=args.seed, radius=args.radius, starts=args.starts)
    S.header.update({"model": args.model, "point": format_vector(p)})
    _write(_out(args, "samples.csv"), S.to_csv())
    for lab, k in S.counts().items():
        print(f"{lab}: {k}")
    if args.svg:
        v = logcell.log_normal_polytope(m, p)
        _write(_out(args, "samples.svg"), svg.polytope_svg(v, S.points, S.labels, title=f"samples for {args.model}"))
    return 0


def _parse_partition(text: str, n: int) -> logroot.OrderedPartitionPair:
    left, sep, right = text.partition(":")
    if not sep:
        raise UsageError("--functional expects I:J, e.g. 1,4:2,3,5")
    I = [int(t) - 1 for t in left.split(",") if t.strip()]
    J = [int(t) - 1 for t in right.split(",") if t.strip()]
    if any(not 0 <= k < n for k in I + J):
        raise UsageError("indices in --functional are 1-based and must be <= n")
    return logroot.OrderedPartitionPair(I, J)


def cmd_logroot(args) -> int:
    if args.point is None:
        raise UsageError("--point is required")
    p = np.round(parse_vector(args.point)).astype(int)
    if args.n is not None and args.n != p.size:
        raise UsageError("--n disagrees with the length of --point")
    if args.d is not None and args.d != int(p.sum()):
        raise UsageError("--d disagrees with the sum of --point")
    poly = logroot.build(p)
    cell = logroot.dual_cell(poly)
    fv_cell = polytope.f_vector(cell)
    fv_root = logroot.f_vector_combinatorial(p.size)
    print(f"point: {p.tolist()}  n={p.size}  d={int(p.sum())}")
    print(f"log root polytope vertices: {len(poly.vertices)}")
    print(f"f-vector of the root polytope (combinatorial): {fv_root}")
    print(f"f-vector of the dual cell: {fv_cell}")
    dual_ok = fv_cell == tuple(reversed(fv_root))
    if p.size <= 4 and p.sum() <= 12:
        _, brute = logcell.finite_voronoi_cell(model.FiniteGridModel(p.size, int(p.sum())), p)
        same, dev = polytope.same_vertex_sets(cell.vertices, brute.vertices, 1e-9)
        print(f"dual cell equals brute-force cell: {same} (max deviation {dev:.2e})")
        dual_ok &= same
    print(f"duality check: {'ok' if dual_ok else 'FAILED'}")
    lines = [f"# point={','.join(map(str, p.tolist()))}"]
    if p.size <= 6:
        for part in logroot.partition_pairs(p.size):
            cert = logroot.face_vertices(poly, part)
            I = ",".join(str(i + 1) for i in sorted(part.I))
            J = ",".join(str(j + 1) for j in sorted(part.J))
            verts = " ".join(f"v({i + 1},{j + 1})" for i, j in cert.pairs)
            lines.append(f"({I}|{J}) dim={part.face_dim} value={cert.common_value:.12g} gap={cert.gap:.3e} {verts}")
    _write(_out(args, "logroot_faces.txt"), "\n".join(lines) + "\n")
    _write(_out(args, "logroot.json"), _polytope_text(poly.as_vpolytope(), header={"point": p.tolist()}))
    _write(_out(args, "dual_cell.json"), _polytope_text(cell, header={"point": p.tolist(), "f_vector": list(fv_cell)}))
    if args.functional:
        part = _parse_partition(args.functional, p.size)
        g = logroot.face_functional(poly, part)
        cert = logroot.face_vertices(poly, part)
        print(f"g_IJ: ({', '.join(f'{x:.5g}' for x in g)})")
        print(f"common value: {cert.common_value:.12g}")
        print("face vertices: " + " ".join(f"v({i + 1},{j + 1})" for i, j in cert.pairs))
        print(f"best other vertex: {cert.best_other:.12g} (gap {cert.gap:.3e})")
    if args.svg and p.size in (3, 4):
        _write(_out(args, "dual_cell.svg"), svg.polytope_svg(cell, title="dual cell", frame=_frame(cell, p.size)))
    return 0 if dual_ok else 1


def tessellation_cells(n: int, d: int) -> list[tuple[np.ndarray, polytope.VPolytope]]:
    """Cells of every grid point with all coordinates >= 1."""
    grid = model.FiniteGridModel(n, d)
    out = []
    for p in grid.interior_points(1):
        if np.all(p > 1):
            out.append((p, logroot.dual_cell(logroot.build(p))))
        else:
            out.append((p, logcell.finite_voronoi_cell(grid, p)[1]))
    return out


def cmd_tessellate(args) -> int:
    if args.n not in (3, 4) or args.d is None:
        raise UsageError("tessellate needs --n 3 or 4 and --d")
    cells = tessellation_cells(args.n, args.d)
    B = logcell.projection_basis(args.n)
    frame = (np.full(args.n, args.d / args.n), B)
    _write(_out(args, "tessellation.json"),
           json.dumps({"n": args.n, "d": args.d, "cells": [{"point": p.tolist(), "vertices": v.vertices.tolist()}
                                                            for p, v in cells]}, indent=1) + "\n")
    _write(_out(args, "tessellation.svg"), svg.tessellation_svg([v for _, v in cells], frame,
                                                                 title=f"cells of grid({args.n},{args.d})"))
    print(f"cells drawn: {len(cells)}")
    return 0


def cmd_mle(args) -> int:
    m = _load_model(args)
    status = 0
    for u in _data(args):
        try:
            est = mle.mle(m, u, starts=args.starts, seed=args.seed, tol=args.tol)
        except mle.Tie as tie:
            print(f"tie between {len(tie.points)} points:")
            for q in tie.points:
                print("  " + format_vector(q))
            status = 1
            continue
        print(f"u: {format_vector(u)}")
        print(f"estimate: {format_vector(est.point)}")
        print(f"route: {est.route}")
        print(f"loglik: {est.loglik:.17g}")
        print(f"residual: {est.residual:.3e}")
        print(f"candidates: {est.candidates}{' (best effort)' if est.best_effort else ''}")
        status |= int(est.residual > max(args.tol, 1e-9) * 10)
    return status


def cmd_critical(args) -> int:
    m = _load_model(args)
    if not isinstance(m, model.ImplicitModel):
        raise UsageError("critical needs an implicit model")
    blocks = []
    for u in _data(args):
        sys_ = mle.build_critical_system(m, u, args.seed)
        found = mle.find_critical_points(sys_, args.starts, args.seed, args.tol, positive_only=False,
                                         domain="complex" if args.complex else "real")
        blocks.append(critical_report(found, u / u.sum(), {"model": args.model, "system_size": sys_.size}))
        print(f"u: {format_vector(u)}  solutions: {len(found)}  real: {len(found.real)}  "
              f"positive: {len(found.positive)}")
    _write(_out(args, "critical.txt"), "\n".join(blocks))
    return 0


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="builtin name, 'grid' (with --n/--d) or a model file")
    common.add_argument("--point", help="model point, comma-separated (fractions allowed)")
    common.add_argument("--data", help="data vector or a file with one vector per line")
    common.add_argument("--n", type=int, help="number of states of a grid model")
    common.add_argument("--d", type=int, help="sample size of a grid model")
    common.add_argument("--params", help="parameter values mapped to a model point")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default %(default)s)")
    common.add_argument("--samples", type=int, default=1000, help="number of samples")
    common.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    common.add_argument("--starts", type=int, default=200, help="Newton starts for implicit models")
    common.add_argument("--svg", action="store_true", help="also write an SVG figure")
    common.add_argument("--out", default=".", help="output directory")

    parser = argparse.ArgumentParser(
        prog="logvoronoi", description="Logarithmic Voronoi cells, log-normal polytopes and log root polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cell", parents=[common], help="log-normal polytope or exact cell of a point").set_defaults(
        func=cmd_cell)
    sp = sub.add_parser("sample", parents=[common], help="sample and classify the log-normal polytope")
    sp.add_argument("--radius", type=float, help="only sample within this distance of the point")
    sp.set_defaults(func=cmd_sample)
    sp = sub.add_parser("logroot", parents=[common], help="log root polytope, faces and dual cell")
    sp.add_argument("--functional", help="face functional for I:J, 1-based, e.g. 1,4:2,3,5")
    sp.set_defaults(func=cmd_logroot)
    sub.add_parser("tessellate", parents=[common], help="draw all cells of a grid model").set_defaults(
        func=cmd_tessellate)
    sub.add_parser("mle", parents=[common], help="maximum likelihood estimate").set_defaults(func=cmd_mle)
    sp = sub.add_parser("critical", parents=[common], help="critical points of the log-likelihood")
    sp.add_argument("--complex", action="store_true", help="also search for nonreal critical points")
    sp.set_defaults(func=cmd_critical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except (UsageError, model.UnknownModel, model.InvalidModel) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
