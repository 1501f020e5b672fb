"""Standalone SVG figures for polytopes and labelled point clouds.

Polytopes of dimension 1 and 2 are drawn in coordinates of their affine
hull; 3-dimensional ones as wireframes under a fixed isometric camera.
Output is a pure function of the input, so figures are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polytope import VPolytope, affine_hull, face_lattice_of

LABEL_COLORS = {"in": "#2e9e4f", "out": "#e0609e", "boundary": "#333333", "undetermined": "#999999"}


def isometric(P) -> np.ndarray:
    """Fixed isometric camera R^3 -> R^2."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    return np.column_stack([(x - y) / np.sqrt(2), (x + y - 2 * z) / np.sqrt(6)])


def ordered_polygon(Z) -> np.ndarray:
    """Vertices of a convex polygon sorted counterclockwise."""
    Z = np.asarray(Z, dtype=float)
    c = Z.mean(axis=0)
    ang = np.arctan2(Z[:, 1] - c[1], Z[:, 0] - c[0])
    return Z[np.argsort(ang, kind="stable")]


def polytope_edges(v: VPolytope) -> list[tuple[int, int]]:
    lattice = face_lattice_of(v)
    return sorted(tuple(sorted(f)) for f in lattice.faces_of_dim(1))


@dataclass
class Figure:
    """Accumulates primitives in data coordinates; ``to_svg`` fits them."""

    width: int = 480
    height: int = 480
    title: str = ""
    items: list = field(default_factory=list)

    def polygon(self, Z, stroke="#1f4e8c", fill="#cfe0f5", width=1.5):
        self.items.append(("polygon", np.asarray(Z, dtype=float), stroke, fill, width))

    def segment(self, a, b, stroke="#1f4e8c", width=1.0):
        self.items.append(("line", np.array([a, b], dtype=float), stroke, "none", width))

    def points(self, Z, color="#000000", radius=2.0):
        self.items.append(("points", np.atleast_2d(np.asarray(Z, dtype=float)), color, color, radius))

    def _bounds(self):
        allpts = np.vstack([it[1] for it in self.items]) if self.items else np.zeros((1, 2))
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
        span = max(float(np.max(hi - lo)), 1e-12)
        return lo, span

    def to_svg(self) -> str:
        pad = 20
        lo, span = self._bounds()
        s = (min(self.width, self.height) - 2 * pad) / span

        def tx(P):
            # SVG y axis points down
            return [(pad + (x - lo[0]) * s, self.height - pad - (y - lo[1]) * s) for x, y in P]

        fmt = lambda v: f"{v:.3f}"  # noqa: E731
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>',
        ]
        if self.title:
            out.append(f"<title>{_escape(self.title)}</title>")
        for kind, P, stroke, fill, w in self.items:
            pts = tx(P)
            if kind == "polygon":
                path = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)
                out.append(f'<polygon points="{path}" fill="{fill}" stroke="{stroke}" stroke-width="{w}"/>')
            elif kind == "line":
                (x1, y1), (x2, y2) = pts
                out.append(
                    f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
                    f'stroke="{stroke}" stroke-width="{w}"/>'
                )
            else:
                for x, y in pts:
                    out.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="{w}" fill="{fill}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def draw_polytope(fig: Figure, v: VPolytope, frame=None, **style) -> None:
    """Add ``v`` to ``fig``.

    ``frame`` is ``(center, basis)`` mapping R^n to drawing coordinates; by
    default the affine hull of ``v`` is used (dimension 1 or 2) and for
    3-dimensional hulls the isometric camera is applied afterwards.
    """
    c, B = frame if frame is not None else affine_hull(v.vertices)[:2]
    Z = (v.vertices - c) @ np.asarray(B).T
    k = Z.shape[1]
    if k == 1:
        Z = np.column_stack([Z[:, 0], np.zeros(len(Z))])
        fig.segment(Z[np.argmin(Z[:, 0])], Z[np.argmax(Z[:, 0])], stroke=style.get("stroke", "#1f4e8c"))
    elif k == 2:
        fig.polygon(ordered_polygon(Z), **style)
    elif k == 3:
        W = isometric(Z)
        for i, j in polytope_edges(v):
            fig.segment(W[i], W[j], stroke=style.get("stroke", "#1f4e8c"))
    else:
        raise ValueError(f"cannot draw a {k}-dimensional frame")


def project(points, frame) -> np.ndarray:
    """Drawing coordinates of ``points`` under ``frame``."""
    c, B = frame
    Z = (np.atleast_2d(points) - c) @ np.asarray(B).T
    if Z.shape[1] == 1:
        return np.column_stack([Z[:, 0], np.zeros(len(Z))])
    if Z.shape[1] == 3:
        return isometric(Z)
    return Z


def polytope_svg(v: VPolytope, points=None, labels=None, title: str = "", frame=None) -> str:
    """Figure of one polytope with optional labelled points."""
    fig = Figure(title=title)
    frame = frame if frame is not None else affine_hull(v.vertices)[:2]
    draw_polytope(fig, v, frame)
    if points is not None and len(points):
        W = project(points, frame)
        labels = labels if labels is not None else ["in"] * len(W)
        for lab in sorted(set(labels)):
            sel = [k for k, lb in enumerate(labels) if lb == lab]
            fig.points(W[sel], LABEL_COLORS.get(lab, "#000000"), radius=1.5)
    return fig.to_svg()


def tessellation_svg(cells: list[VPolytope], frame, title: str = "") -> str:
    """All cells drawn in one shared frame."""
    fig = Figure(width=640, height=640, title=title)
    for v in cells:
        draw_polytope(fig, v, frame, fill="none")
    return fig.to_svg()
