"""Plain-text formats: data points and critical-point reports."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .mle import CriticalPointSet


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated numbers; entries like ``518/9375`` are allowed."""
    parts = [t.strip() for t in text.split(",") if t.strip()]
    if not parts:
        raise ValueError("empty vector")
    return np.array([float(Fraction(t)) for t in parts])


def read_points(path) -> np.ndarray:
    """One point per line, comma-separated; blank lines and ``#`` comments skipped."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append(parse_vector(line))
    if not rows:
        raise ValueError(f"{path} contains no points")
    if len({r.size for r in rows}) != 1:
        raise ValueError(f"{path}: points have different lengths")
    return np.array(rows)


def format_vector(x) -> str:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return ",".join(f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j" for v in x)
    return ",".join(format(float(v), ".17g") for v in x)


def write_points(path, points) -> None:
    with open(path, "w") as fh:
        for row in np.atleast_2d(points):
            fh.write(format_vector(row) + "\n")


def critical_report(found: CriticalPointSet, u, header: dict | None = None) -> str:
    """Structured text: one block per solution with x, lambda, residual, loglik."""
    lines = [f"# seed={found.seed}", f"# starts={found.starts}", f"u = {format_vector(u)}"]
    lines += [f"# {k}={v}" for k, v in sorted((header or {}).items())]
    lines.append(f"solutions = {len(found)}")
    lines.append(f"real = {len(found.real)}")
    lines.append(f"positive = {len(found.positive)}")
    for k, q in enumerate(found.points):
        kind = "positive" if q.is_positive else ("real" if q.is_real else "complex")
        lines += [
            "",
            f"[solution {k + 1}]",
            f"kind = {kind}",
            f"x = {format_vector(q.x)}",
            f"lambda = {format_vector(q.lam)}",
            f"residual = {q.residual:.3e}",
            f"loglik = {q.loglik:.17g}" if np.isfinite(q.loglik) else "loglik = -inf",
        ]
    return "\n".join(lines) + "\n"
