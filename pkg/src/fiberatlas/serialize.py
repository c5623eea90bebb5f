"""Deterministic JSON emission, input file loaders and SVG export.

Reports must be byte-identical across runs, so floats are always
formatted %.12e (negative zero normalized) and key order is the
construction order of the dicts.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import ParseError, ValidationError
from .fibers import GeometricSample, GridSpec


def _format_float(x: float) -> str:
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.12e}"


def _canonical(obj):
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_canonical(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + _format_float(float(obj.real)) + "," + _format_float(float(obj.imag)) + "]"
    if isinstance(obj, Fraction):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _canonical(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    return _canonical(obj) + "\n"


def _parse_number(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {v!r}") from exc
    if isinstance(v, (int, float)):
        return v
    raise ParseError(f"expected a number or 'p/q' string, got {v!r}")


def load_polygon(data) -> list[complex]:
    """Polygon JSON: list of [re, im]; rationals may be strings 'p/q'."""
    if not isinstance(data, list) or len(data) < 3:
        raise ParseError("polygon file must be a JSON list of at least 3 [re, im] pairs")
    out = []
    for item in data:
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"bad polygon vertex {item!r}")
        re = _parse_number(item[0])
        im = _parse_number(item[1])
        out.append((re, im))
    return out


def load_sample(data) -> GeometricSample:
    """Sample JSON: {grid: {x0,x1,y0,y1,nx,ny}, J: nx*ny*n pairs, J0: nx*ny pairs}."""
    try:
        g = data["grid"]
        grid = GridSpec(
            x0=float(g["x0"]),
            x1=float(g["x1"]),
            y0=float(g["y0"]),
            y1=float(g["y1"]),
            nx=int(g["nx"]),
            ny=int(g["ny"]),
        )
        Jraw = np.asarray(data["J"], dtype=float)
        J0raw = np.asarray(data["J0"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed sample file: {exc}") from exc
    if Jraw.ndim != 4 or Jraw.shape[:2] != (grid.nx, grid.ny) or Jraw.shape[3] != 2:
        raise ParseError(f"J must have shape (nx, ny, n, 2), got {Jraw.shape}")
    J = Jraw[..., 0] + 1j * Jraw[..., 1]
    if J0raw.ndim == 4 and J0raw.shape[2] == 1:
        J0raw = J0raw[:, :, 0, :]
    if J0raw.ndim != 3 or J0raw.shape != (grid.nx, grid.ny, 2):
        raise ParseError(f"J0 must have shape (nx, ny, 2), got {J0raw.shape}")
    J0 = J0raw[..., 0] + 1j * J0raw[..., 1]
    try:
        return GeometricSample(grid=grid, J=J, J0=J0)
    except ValidationError:
        raise


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
]


def svg_fiber(fiber, path: str) -> None:
    """Draw the fiber polygon with letter-paired sides in matching colors."""
    pts = fiber.chain.vertices
    m = len(pts)
    xs = pts.real
    ys = pts.imag
    pad = 0.08 * max(xs.max() - xs.min(), ys.max() - ys.min(), 1e-9)
    x0, x1 = xs.min() - pad, xs.max() + pad
    y0, y1 = ys.min() - pad, ys.max() + pad
    scale = 480.0 / max(x1 - x0, y1 - y0)

    def sx(x):
        return (x - x0) * scale

    def sy(y):
        return (y1 - y) * scale

    side_color = {}
    for k, (a, b, _t) in fiber.pairing.items():
        side_color[a] = _PALETTE[(k - 1) % len(_PALETTE)]
        side_color[b] = _PALETTE[(k - 1) % len(_PALETTE)]

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{(x1 - x0) * scale:.1f}" '
        f'height="{(y1 - y0) * scale:.1f}" viewBox="0 0 {(x1 - x0) * scale:.1f} {(y1 - y0) * scale:.1f}">'
    ]
    for j in range(m):
        a = pts[j]
        b = pts[(j + 1) % m]
        color = side_color.get(j, "#000000")
        lines.append(
            f'<line x1="{sx(a.real):.2f}" y1="{sy(a.imag):.2f}" x2="{sx(b.real):.2f}" '
            f'y2="{sy(b.imag):.2f}" stroke="{color}" stroke-width="2.5"/>'
        )
    for j in range(m):
        a = pts[j]
        lines.append(f'<circle cx="{sx(a.real):.2f}" cy="{sy(a.imag):.2f}" r="3" fill="#222"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def svg_lattice_polygon(poly, path: str) -> None:
    """Draw a Newton polygon with its boundary and interior lattice points."""
    verts = list(poly.vertices)
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    x1, y1 = max(xs) + 1, max(ys) + 1
    cell = 40.0

    def sx(x):
        return (x + 0.5) * cell

    def sy(y):
        return (y1 - y + 0.5) * cell

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{(x1 + 1) * cell:.0f}" '
        f'height="{(y1 + 1) * cell:.0f}">'
    ]
    pts_attr = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in verts)
    lines.append(f'<polygon points="{pts_attr}" fill="#cfe8ff" stroke="#1f77b4" stroke-width="2"/>')
    for x in range(0, x1 + 1):
        for y in range(0, y1 + 1):
            lines.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2" fill="#bbb"/>')
    for x, y in poly.boundary_points:
        lines.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="4" fill="#d62728"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
