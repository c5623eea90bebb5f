"""Periods of the time form over fibers, tabulated on a parameter grid.

The time form dual to the Hamiltonian field of f is dt = -dz / (df/dw)
on the fiber f = xi.  For w-degree-2 polynomials the cycles are loops
around pairs of branch points of the double cover; contours are ellipses
around the pair, integrated by Gauss-Legendre panels with the sheet
chosen by continuity.  Periods over a grid of xi feed finite-difference
Cauchy-Riemann and closedness residuals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .fibers import GridSpec, curl_residual
from .monodromy import _poly_roots, _SheetTracker, _squarefree_part, critical_values
from .newton import BivarPolynomial


def _branch_points(f: BivarPolynomial, xi: complex):
    """Branch points of the degree-2 cover: roots of the w-discriminant."""
    h = f.shifted_by_constant(xi)
    wp = h.as_w_poly()
    if len(wp) - 1 != 2:
        raise ValidationError("automatic cycles need w-degree exactly 2")
    a, b, c = wp[2], wp[1], wp[0]
    disc = b * b - a * c * 4
    if disc.is_zero():
        raise ValidationError("discriminant vanishes identically")
    return _poly_roots(_squarefree_part(disc)), wp


@dataclass(frozen=True)
class Cycle:
    """Closed contour around a pair of branch points."""

    center: complex
    half_span: complex  # from center to one focus
    rho: float  # minor semi-axis padding

    def path(self, t: float) -> complex:
        a = abs(self.half_span) + self.rho
        b = self.rho
        phase = self.half_span / abs(self.half_span) if self.half_span != 0 else 1.0
        return self.center + phase * complex(a * math.cos(2 * math.pi * t), b * math.sin(2 * math.pi * t))

    def dpath(self, t: float) -> complex:
        a = abs(self.half_span) + self.rho
        b = self.rho
        phase = self.half_span / abs(self.half_span) if self.half_span != 0 else 1.0
        return phase * complex(-a * math.sin(2 * math.pi * t), b * math.cos(2 * math.pi * t)) * 2 * math.pi


def _auto_cycles(branch, min_clearance: float):
    """Ellipses around consecutive pairs of branch points.

    Branch points are sorted and paired (b0,b1), (b1,b2), ...; each
    ellipse must clear every other branch point or an error is raised.
    """
    pts = sorted(branch, key=lambda z: (z.real, z.imag))
    if len(pts) < 2:
        raise ValidationError("need at least two branch points for a cycle")
    cycles = []
    for i in range(len(pts) - 1):
        b0, b1 = pts[i], pts[i + 1]
        center = (b0 + b1) / 2
        half = (b1 - b0) / 2
        others = [p for p in pts if p not in (b0, b1)]
        if others:
            # distance from the segment to the nearest other branch point
            clearance = min(_seg_dist(b0, b1, p) for p in others)
        else:
            clearance = abs(half) if half else 1.0
        rho = clearance / 3.0
        if rho < min_clearance:
            raise NumericalError(
                f"cycle around ({b0:.4g}, {b1:.4g}) collides with a branch point "
                f"(clearance {clearance:.3g})"
            )
        cycles.append(Cycle(center=center, half_span=half, rho=rho))
    return cycles


def _seg_dist(a, b, p):
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _contour_period(f: BivarPolynomial, xi: complex, cycle: Cycle, panels: int = 48,
                    sheet_tol: float = 1e-9) -> complex:
    """Integrate dt = -dz/f_w once around the cycle, sheet-consistently."""
    h = f.shifted_by_constant(xi)
    tracker = _SheetTracker(h)
    fw = f.partial_w()

    total = 0j
    w_cur = None
    z0 = cycle.path(0.0)
    roots = tracker.roots_at(z0)
    w_cur = roots[0]
    w_start = w_cur
    for p in range(panels):
        t0 = p / panels
        t1 = (p + 1) / panels
        # Gauss-Legendre nodes on [t0, t1]
        mid = (t0 + t1) / 2
        half = (t1 - t0) / 2
        for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
            t = mid + half * node
            z = cycle.path(t)
            w_cur = _nearest_sheet(tracker, z, w_cur)
            dz = cycle.dpath(t)
            den = fw.eval_complex(z, w_cur)
            if den == 0:
                raise NumericalError("df/dw vanishes on the contour")
            total += weight * half * (-dz / den)
        # hard re-anchor at panel ends to keep continuity honest
        w_cur = _nearest_sheet(tracker, cycle.path(t1), w_cur)
    w_end = _nearest_sheet(tracker, cycle.path(1.0), w_cur)
    scale = max(abs(w_start), 1.0)
    if abs(w_end - w_start) > 1e-6 * scale:
        raise NumericalError(
            f"cycle is not closed on the curve (sheet drift {abs(w_end - w_start):.3g})"
        )
    return total


def _nearest_sheet(tracker, z, w_prev):
    roots = tracker.roots_at(z)
    best = min(roots, key=lambda r: abs(r - w_prev))
    others = sorted(abs(r - w_prev) for r in roots)
    if len(others) > 1 and others[0] > others[1] / 3.0:
        raise NumericalError("sheet continuation became ambiguous on the contour")
    return best


@dataclass(frozen=True)
class PeriodSample:
    grid: GridSpec
    values: np.ndarray  # (ncycles, nx, ny) complex periods
    ncycles: int


def periods(f: BivarPolynomial, grid: GridSpec, cycles: str | list = "auto",
            crit_tol: float = 1e-6, panels: int = 48) -> PeriodSample:
    """Periods of the time form over every grid node.

    ``cycles='auto'`` builds branch-pair ellipses for w-degree-2 inputs,
    with the pairs matched by continuity across nodes; otherwise pass a
    list of Cycle objects used verbatim at every node.  Nodes too close
    to a critical value are rejected.
    """
    cv = critical_values(f)
    nodes = grid.nodes()
    if cv:
        dmin = min(float(np.min(np.abs(nodes - c))) for c in cv)
        if dmin <= crit_tol:
            raise ValidationError(
                f"grid reaches a critical value (distance {dmin:.3g} <= {crit_tol})"
            )

    if cycles == "auto":
        base_branch, _ = _branch_points(f, complex(nodes[0, 0]))
        ncyc = max(1, len(base_branch) - 1)
    else:
        ncyc = len(cycles)

    out = np.zeros((ncyc, grid.nx, grid.ny), dtype=complex)
    prev_branch = None
    for i in range(grid.nx):
        cols = range(grid.ny) if i % 2 == 0 else range(grid.ny - 1, -1, -1)
        for j in cols:
            xi = complex(nodes[i, j])
            if cycles == "auto":
                branch, _ = _branch_points(f, xi)
                if prev_branch is not None:
                    branch = _match_order(prev_branch, branch)
                prev_branch = branch
                cyc_list = _auto_cycles(branch, min_clearance=1e-9)
            else:
                cyc_list = cycles
            for c, cyc in enumerate(cyc_list[:ncyc]):
                out[c, i, j] = _contour_period(f, xi, cyc, panels=panels)
    return PeriodSample(grid=grid, values=out, ncycles=ncyc)


def _match_order(prev, new):
    """Order `new` so entry i continues prev[i] (nearest, injective)."""
    new = list(new)
    out = []
    used = set()
    for p in prev:
        best = min((i for i in range(len(new)) if i not in used), key=lambda i: abs(new[i] - p))
        used.add(best)
        out.append(new[best])
    return out


@dataclass(frozen=True)
class CRReport:
    cr_residual: float  # max |dJ/dx + i dJ/dy| over interior nodes, all cycles
    closedness_residual: float  # max curl defect of Re(J dxi)
    cr_order: float | None
    closedness_order: float | None
    per_cycle_cr: tuple[float, ...]
    per_cycle_closedness: tuple[float, ...]


def cauchy_riemann_check(sample: PeriodSample) -> CRReport:
    """Finite-difference holomorphy and closedness residuals of the periods.

    The reported Cauchy-Riemann residual is |d_x J + i d_y J| (twice the
    Wirtinger dbar derivative); the closedness residual is the discrete
    curl of Re(J dxi).  Orders are Richardson estimates against the
    every-second-node subgrid when available.
    """
    grid = sample.grid
    if grid.nx < 3 or grid.ny < 3:
        raise ValidationError("grid too small for finite differences")

    def residuals(vals, hx, hy):
        cr = []
        cl = []
        for c in range(vals.shape[0]):
            J = vals[c]
            dx = (J[2:, 1:-1] - J[:-2, 1:-1]) / (2 * hx)
            dy = (J[1:-1, 2:] - J[1:-1, :-2]) / (2 * hy)
            cr.append(float(np.max(np.abs(dx + 1j * dy))) if dx.size else 0.0)
            cl.append(curl_residual(J.real, J.imag, hx, hy))
        return cr, cl

    cr_f, cl_f = residuals(sample.values, grid.hx, grid.hy)
    cr_order = closed_order = None
    try:
        coarse = grid.coarse()
        vals_c = sample.values[:, ::2, ::2]
        cr_c, cl_c = residuals(vals_c, coarse.hx, coarse.hy)
        fmax, cmax = max(cr_f), max(cr_c)
        if fmax > 1e-13 and cmax > 1e-13:
            cr_order = math.log2(cmax / fmax)
        fmax, cmax = max(cl_f), max(cl_c)
        if fmax > 1e-13 and cmax > 1e-13:
            closed_order = math.log2(cmax / fmax)
    except ValidationError:
        pass
    return CRReport(
        cr_residual=max(cr_f),
        closedness_residual=max(cl_f),
        cr_order=cr_order,
        closedness_order=closed_order,
        per_cycle_cr=tuple(cr_f),
        per_cycle_closedness=tuple(cl_f),
    )


def synthetic_sample(grid: GridSpec, func) -> PeriodSample:
    """Tabulate an arbitrary function as a one-cycle period sample."""
    vals = np.vectorize(func)(grid.nodes()).astype(complex)[None, :, :]
    return PeriodSample(grid=grid, values=vals, ncycles=1)


def agm(a: float, b: float, tol: float = 1e-15) -> float:
    while abs(a - b) > tol * max(abs(a), abs(b)):
        a, b = (a + b) / 2.0, math.sqrt(a * b)
    return (a + b) / 2.0
