"""Critical values, branch data and sheet permutations of plane-curve fibers.

The fiber f(z, w) = xi is projected to the z-line.  Special base points
(root collisions of the w-polynomial and zeros of its leading
coefficient) are located through an exact resultant; sheet permutations
come from adaptive predictor-corrector continuation around each special
point and around a circle enclosing all of them.  Sheet counts at the
special points and at infinity give the compactified Euler
characteristic, hence observed genus and puncture count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContinuationError,
    NonIsolatedCriticalError,
    SizeLimitError,
    ValidationError,
)
from .newton import BivarPolynomial
from .rationals import QIPoly, poly_gcd, sylvester_resultant

MAX_W_DEGREE = 6
_ROOT_TOL = 1e-8


def _squarefree_part(p: QIPoly) -> QIPoly:
    """Exact squarefree part over Q(i); keeps simple roots accurate."""
    if p.degree <= 1:
        return p
    g = poly_gcd(p, p.deriv())
    if g.degree <= 0:
        return p
    return p.divexact(g)


def _dedupe(values, rel_tol):
    out = []
    scale = max([abs(v) for v in values], default=0.0)
    eps = rel_tol * max(scale, 1.0)
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if not any(abs(v - u) <= eps for u in out):
            out.append(v)
    return out


def _poly_roots(p: QIPoly):
    cs = p.to_complex_coeffs()
    if len(cs) <= 1:
        return []
    return [complex(r) for r in np.roots(cs)]


def critical_values(f: BivarPolynomial, rel_tol: float = _ROOT_TOL):
    """Values of f at the common zeros of both partial derivatives.

    Elimination of w runs through an exact Sylvester resultant; the
    resulting univariate polynomial is solved by companion-matrix
    eigenvalues and candidate points are verified before their values
    are collected.  A vanishing resultant (positive-dimensional critical
    locus) raises NonIsolatedCriticalError.
    """
    if f.is_constant():
        raise ValidationError("constant polynomial")
    fz = f.partial_z()
    fw = f.partial_w()
    if not fz.coeffs and not fw.coeffs:
        raise ValidationError("constant polynomial")
    if not fz.coeffs or not fw.coeffs:
        # one derivative vanishes identically: critical set is a curve
        # unless the other derivative never vanishes
        other = fw if not fz.coeffs else fz
        if other.degree_w() == 0 and other.degree_z() == 0:
            return []
        raise NonIsolatedCriticalError("one partial derivative vanishes identically")

    dzw, dww = fz.degree_w(), fw.degree_w()
    if dzw == 0 and dww == 0:
        pz = QIPoly([dict(fz.coeffs).get((l, 0), 0) for l in range(fz.degree_z() + 1)])
        pw = QIPoly([dict(fw.coeffs).get((l, 0), 0) for l in range(fw.degree_z() + 1)])
        rz = _poly_roots(pz)
        rw = _poly_roots(pw)
        scale = max([abs(r) for r in rz + rw], default=1.0)
        if any(abs(a - b) <= rel_tol * max(scale, 1.0) for a in rz for b in rw):
            raise NonIsolatedCriticalError("both derivatives vanish on a common vertical line")
        return []

    if dzw > 0 and dww > 0:
        res = sylvester_resultant(fz.as_w_poly(), fw.as_w_poly())
        if res.is_zero():
            raise NonIsolatedCriticalError("resultant of the partial derivatives vanishes identically")
        candidates = _dedupe(_poly_roots(_squarefree_part(res)), rel_tol)
    else:
        univ = fz if dzw == 0 else fw
        pz = QIPoly([dict(univ.coeffs).get((l, 0), 0) for l in range(univ.degree_z() + 1)])
        if pz.degree <= 0:
            return []
        candidates = _dedupe(_poly_roots(pz), rel_tol)

    values = []
    for z0 in candidates:
        ws = _common_w_roots(fz, fw, z0, rel_tol)
        if ws is None:
            raise NonIsolatedCriticalError(f"critical locus contains the line z = {z0:.6g}")
        for w0 in ws:
            values.append(f.eval_complex(z0, w0))
    return _dedupe(values, rel_tol)


def _eval_wpoly(f: BivarPolynomial, z0: complex):
    return [p.eval_complex(z0) for p in f.as_w_poly()]


def _eval_wpolys(wpolys, z: complex, w: complex) -> complex:
    acc = 0j
    for p in reversed(wpolys):
        acc = acc * w + p.eval_complex(z)
    return acc


def _common_w_roots(fz, fw, z0, rel_tol):
    """Common w-roots of both derivatives above z0, or None if non-isolated."""
    cz = _eval_wpoly(fz, z0)
    cw = _eval_wpoly(fw, z0)
    scale_z = max(abs(c) for c in cz)
    scale_w = max(abs(c) for c in cw)
    zero_z = scale_z <= 1e-12
    zero_w = scale_w <= 1e-12
    if zero_z and zero_w:
        return None
    if zero_z:
        return _roots_trimmed(cw, rel_tol)
    if zero_w:
        return _roots_trimmed(cz, rel_tol)
    rz = _roots_trimmed(cz, rel_tol)
    rw = _roots_trimmed(cw, rel_tol)
    scale = max([abs(r) for r in rz + rw], default=1.0)
    eps = 1e-6 * max(scale, 1.0)
    out = []
    for a in rz:
        if any(abs(a - b) <= eps for b in rw):
            out.append(a)
    if not rz and not rw:
        # both derivatives are nonzero constants in w above z0
        return []
    return out


def _roots_trimmed(coeffs, rel_tol):
    cs = list(coeffs)
    scale = max(abs(c) for c in cs)
    while cs and abs(cs[-1]) <= 1e-13 * max(scale, 1.0):
        cs.pop()
    if len(cs) <= 1:
        return []
    return [complex(r) for r in np.roots(cs[::-1])]


# -- sheet tracking -------------------------------------------------------------

class _SheetTracker:
    """Continuation of all w-roots of h(z, w) = 0 along paths in z.

    Predictor-corrector: each sheet is advanced by its velocity
    dw/dz = -h_z/h_w and the recomputed fiber is matched against the
    predictions.  A step is accepted only when the predicted motion stays
    under a sixth of the current minimal root separation and every root
    lands near its prediction, so nearest matching cannot alias even for
    rigid rotations of symmetric fibers; otherwise the step is halved.
    """

    def __init__(self, h: BivarPolynomial):
        self.wpoly = h.as_w_poly()
        self.hz = h.partial_z().as_w_poly()
        self.hw = h.partial_w().as_w_poly()
        self.deg = len(self.wpoly) - 1

    def roots_at(self, z: complex):
        cs = [p.eval_complex(z) for p in self.wpoly][::-1]
        lead = abs(cs[0])
        scale = max(abs(c) for c in cs)
        if lead <= 1e-13 * max(scale, 1.0):
            raise ContinuationError(f"leading coefficient vanishes on the path at z = {z:.6g}")
        return [complex(r) for r in np.roots(cs)]

    def _velocity(self, z, w):
        num = _eval_wpolys(self.hz, z, w)
        den = _eval_wpolys(self.hw, z, w)
        if den == 0:
            return None
        return -num / den

    @staticmethod
    def _min_sep(ws):
        m = math.inf
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                m = min(m, abs(ws[i] - ws[j]))
        return m

    @staticmethod
    def _match(prev, new, limit):
        """Nearest matching; None unless it is injective and within limit."""
        taken = [False] * len(new)
        perm = []
        for w in prev:
            best, bd = -1, math.inf
            for i, x in enumerate(new):
                d = abs(w - x)
                if d < bd:
                    best, bd = i, d
            if bd >= limit or taken[best]:
                return None
            taken[best] = True
            perm.append(best)
        return perm

    def track(self, zpath, start=None, max_halvings=60):
        """Follow the root vector along a parametrized path.

        ``zpath`` maps [0, 1] to z values; ``start`` optionally fixes the
        initial root ordering.  Returns the root vector at t=1 ordered so
        that entry i continues start root i.
        """
        t = 0.0
        zc = zpath(0.0)
        cur = list(start) if start is not None else self.roots_at(zc)
        step = 1.0 / 32.0
        halvings = 0

        def reject():
            nonlocal step, halvings
            step /= 2.0
            halvings += 1
            if halvings > max_halvings:
                raise ContinuationError(f"continuation stalled near t = {t:.6g}")

        while t < 1.0:
            nt = min(1.0, t + step)
            zn = zpath(nt)
            dz = zn - zc
            sep = self._min_sep(cur)
            if sep <= 0:
                raise ContinuationError("sheets collided on the path")
            vels = [self._velocity(zc, w) for w in cur]
            if any(v is None for v in vels):
                reject()
                continue
            if max(abs(v) for v in vels) * abs(dz) > sep / 6.0:
                reject()
                continue
            pred = [w + v * dz for w, v in zip(cur, vels)]
            new = self.roots_at(zn)
            perm = self._match(pred, new, sep / 6.0)
            if perm is None:
                reject()
                continue
            cur = [new[i] for i in perm]
            zc = zn
            t = nt
            halvings = 0
            step = min(step * 1.5, 1.0 / 8.0)
        return cur

    def loop_permutation(self, zpath):
        """Permutation p with p[i] = final slot of start sheet i."""
        start = self.roots_at(zpath(0.0))
        end = self.track(zpath, start=start)
        sep = self._min_sep(start)
        perm = self._match(end, start, sep / 2.0)
        if perm is None:
            raise ContinuationError("loop did not return to the initial fiber cleanly")
        # end[i] == start[perm[i]]: start sheet i ends at slot perm[i]
        return tuple(perm)


def _circle_path(center, radius, ccw=True):
    s = 1.0 if ccw else -1.0
    return lambda t: center + radius * cmath.exp(2j * math.pi * s * t)


def _loop_path(base, center, radius, corridor_angle):
    """Arc along the big circle, radial descent, full small circle, return."""
    R = abs(base)
    theta0 = cmath.phase(base)
    approach = center + radius * cmath.exp(1j * corridor_angle)
    outer = R * cmath.exp(1j * corridor_angle)

    def path(t):
        if t < 0.2:
            u = t / 0.2
            ang = theta0 + (corridor_angle - theta0) * u
            return R * cmath.exp(1j * ang)
        if t < 0.4:
            u = (t - 0.2) / 0.2
            return outer + (approach - outer) * u
        if t < 0.6:
            u = (t - 0.4) / 0.2
            return center + (approach - center) * cmath.exp(2j * math.pi * u)
        if t < 0.8:
            u = (t - 0.6) / 0.2
            return approach + (outer - approach) * u
        u = (t - 0.8) / 0.2
        ang = corridor_angle + (theta0 - corridor_angle) * u
        return R * cmath.exp(1j * ang)

    return path


def perm_compose(p, q):
    """Apply p first, then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inverse(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def perm_cycles(p):
    seen = [False] * len(p)
    cycles = []
    for i in range(len(p)):
        if seen[i]:
            continue
        c = []
        j = i
        while not seen[j]:
            seen[j] = True
            c.append(j)
            j = p[j]
        cycles.append(tuple(c))
    return cycles


@dataclass(frozen=True)
class SpecialPoint:
    z: complex
    kind: str  # "branch" | "escape"
    permutation: tuple[int, ...]
    diverging: tuple[int, ...]  # sheet slots that blow up at this point
    corridor_angle: float


@dataclass(frozen=True)
class MonodromyData:
    f: BivarPolynomial
    xi: complex
    degree: int
    base_point: complex
    base_sheets: tuple[complex, ...]
    special_points: tuple[SpecialPoint, ...]
    big_circle: tuple[int, ...]
    infinity_perm: tuple[int, ...]
    product_ok: bool

    def transitive(self) -> bool:
        n = self.degree
        reach = {0}
        frontier = [0]
        gens = [sp.permutation for sp in self.special_points] + [self.infinity_perm]
        while frontier:
            i = frontier.pop()
            for g in gens:
                j = g[i]
                if j not in reach:
                    reach.add(j)
                    frontier.append(j)
        return len(reach) == n


def monodromy(f: BivarPolynomial, xi: complex, max_degree: int = MAX_W_DEGREE) -> MonodromyData:
    """Sheet permutations of f(z, w) = xi around every special base point.

    Loops are lassos from a common base point on a circle enclosing all
    special points, visited in increasing corridor angle; their
    composition in that order must reproduce the big-circle permutation
    (checked, reported as product_ok).
    """
    d = f.degree_w()
    if d < 2:
        raise ValidationError("projection needs w-degree >= 2")
    if d > max_degree:
        raise SizeLimitError(f"w-degree {d} exceeds the profile limit {max_degree}")
    xi = complex(xi)
    cv = critical_values(f)
    if cv:
        scale = max(1.0, max(abs(c) for c in cv))
        dmin = min(abs(xi - c) for c in cv)
        if dmin <= 1e-8 * scale:
            raise ValidationError(f"xi = {xi:.6g} is a critical value of the map")
    h = f.shifted_by_constant(xi)
    hw = h.partial_w()
    wpolys = h.as_w_poly()
    lead = wpolys[-1]

    res = sylvester_resultant(h.as_w_poly(), hw.as_w_poly())
    if res.is_zero():
        raise ValidationError(f"xi = {xi:.6g} is a critical (non-reduced) value of the projection")
    special = _dedupe(_poly_roots(_squarefree_part(res)), _ROOT_TOL)
    lead_roots = _poly_roots(_squarefree_part(lead)) if lead.degree >= 1 else []

    tracker = _SheetTracker(h)
    if not special:
        base = 1.0 + 0j
        sheets = tuple(tracker.roots_at(base))
        ident = tuple(range(d))
        return MonodromyData(
            f=f,
            xi=xi,
            degree=d,
            base_point=base,
            base_sheets=sheets,
            special_points=(),
            big_circle=ident,
            infinity_perm=ident,
            product_ok=True,
        )

    R = 2.0 * max(abs(z) for z in special) + 1.0
    base = R + 0j

    min_gap = min(
        [abs(a - b) for i, a in enumerate(special) for b in special[i + 1 :]] or [R]
    )
    radii = {}
    for z0 in special:
        radii[z0] = min(min_gap / 3.0, (R - abs(z0)) / 3.0, max(abs(z0), 1.0) / 5.0 + 1e-3)

    # corridor angles: start from each point's own argument, perturb until the
    # radial segment clears every other special point
    corridors = {}
    for z0 in special:
        ang = cmath.phase(z0) % (2 * math.pi)
        for attempt in range(720):
            cand = (ang + attempt * (2 * math.pi / 720.0)) % (2 * math.pi)
            outer = R * cmath.exp(1j * cand)
            approach = z0 + radii[z0] * cmath.exp(1j * cand)
            ok = True
            for z1 in special:
                if z1 == z0:
                    continue
                dist = _seg_dist(outer, approach, z1)
                if dist < radii[z1] + radii[z0] * 0.5:
                    ok = False
                    break
            if ok and all(abs(cand - c) > 1e-6 for c in corridors.values()):
                corridors[z0] = cand
                break
        else:
            raise ContinuationError("could not route a corridor to a special point")

    scale = max(abs(z) for z in special)
    sps = []
    for z0 in sorted(special, key=lambda z: corridors[z]):
        path = _loop_path(base, z0, radii[z0], corridors[z0])
        perm = tracker.loop_permutation(path)
        is_escape = any(abs(z0 - r) <= 1e-6 * max(scale, 1.0) for r in lead_roots)
        kind = "escape" if is_escape else "branch"
        diverging = ()
        if kind == "escape":
            diverging = _diverging_sheets(tracker, z0, radii[z0], h)
            if diverging:
                moved = set(diverging)
                img = {perm[i] for i in moved}
                if img != moved:
                    raise ContinuationError("divergent sheets are not permuted among themselves")
        sps.append(
            SpecialPoint(
                z=z0,
                kind=kind,
                permutation=perm,
                diverging=diverging,
                corridor_angle=corridors[z0],
            )
        )

    big = tracker.loop_permutation(_circle_path(0j, R))
    prod = tuple(range(d))
    for sp in sps:
        prod = perm_compose(prod, sp.permutation)
    product_ok = prod == big
    return MonodromyData(
        f=f,
        xi=xi,
        degree=d,
        base_point=base,
        base_sheets=tuple(tracker.roots_at(base)),
        special_points=tuple(sps),
        big_circle=big,
        infinity_perm=perm_inverse(big),
        product_ok=product_ok,
    )


def _seg_dist(a, b, p):
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def _diverging_sheets(tracker, z0, radius, h):
    """Sheet slots over the small circle whose |w| blows up toward z0.

    The number of diverging roots is the drop of the w-degree at z0;
    they are identified as the largest-magnitude roots on the circle.
    """
    wpolys = h.as_w_poly()
    vals = [p.eval_complex(z0) for p in wpolys]
    scale = max(abs(v) for v in vals) or 1.0
    d = len(wpolys) - 1
    d0 = d
    while d0 >= 0 and abs(vals[d0]) <= 1e-8 * scale:
        d0 -= 1
    count = d - d0
    if count <= 0:
        return ()
    ws = tracker.roots_at(z0 + radius)
    order = sorted(range(len(ws)), key=lambda i: -abs(ws[i]))
    big = order[:count]
    small = order[count:]
    if small and abs(ws[big[-1]]) < 5.0 * abs(ws[small[0]]):
        raise ContinuationError("cannot separate diverging sheets by magnitude")
    return tuple(sorted(big))


@dataclass(frozen=True)
class TopologicalInvariants:
    g_obs: int
    s_obs: int
    chi_affine: int
    transitive: bool
    euler_consistent: bool


def topological_invariants(f: BivarPolynomial, xi: complex, data: MonodromyData | None = None) -> TopologicalInvariants:
    """Observed genus and end count via the compactified covering.

    chi = 2d - sum over special points and infinity of (d - #cycles);
    ends come from cycles over infinity plus diverging cycles at the
    leading-coefficient zeros.  An independent affine Euler count checks
    the bookkeeping.
    """
    if data is None:
        data = monodromy(f, xi)
    d = data.degree
    defect = 0
    for sp in data.special_points:
        defect += d - len(perm_cycles(sp.permutation))
    defect += d - len(perm_cycles(data.infinity_perm))
    chi_compact = 2 * d - defect
    if chi_compact % 2:
        raise AssertionError("compact Euler characteristic must be even")
    g_obs = (2 - chi_compact) // 2

    s_obs = len(perm_cycles(data.infinity_perm))
    for sp in data.special_points:
        if sp.kind == "escape" and sp.diverging:
            div = set(sp.diverging)
            s_obs += sum(1 for c in perm_cycles(sp.permutation) if set(c) <= div)

    # affine cross-check: cover of the plane branched over the finite points
    chi_affine_cover = d
    for sp in data.special_points:
        cycles = perm_cycles(sp.permutation)
        div = set(sp.diverging)
        affine_fiber = sum(1 for c in cycles if not (set(c) <= div and sp.kind == "escape"))
        chi_affine_cover -= d - affine_fiber
    euler_consistent = chi_affine_cover == 2 - 2 * g_obs - s_obs

    return TopologicalInvariants(
        g_obs=g_obs,
        s_obs=s_obs,
        chi_affine=chi_affine_cover,
        transitive=data.transitive(),
        euler_consistent=euler_consistent,
    )
