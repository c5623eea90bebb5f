"""Exact planar primitives on points with Fraction coordinates."""

from __future__ import annotations

from fractions import Fraction

from .errors import GenericityError

Pt = tuple[Fraction, Fraction]

SNAP_DENOMINATOR = 1 << 40


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def snap(x) -> Fraction:
    """Exact for ints/Fractions/strings; floats snapped to denominator <= 2**40."""
    if isinstance(x, float):
        return Fraction(x).limit_denominator(SNAP_DENOMINATOR)
    return to_fraction(x)


def pt(x, y) -> Pt:
    return (to_fraction(x), to_fraction(y))


def sub(a: Pt, b: Pt) -> Pt:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Pt, b: Pt) -> Pt:
    return (a[0] + b[0], a[1] + b[1])


def cross(u: Pt, v: Pt) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Pt, v: Pt) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def orient(a: Pt, b: Pt, c: Pt) -> int:
    d = cross(sub(b, a), sub(c, a))
    return (d > 0) - (d < 0)


def dist2(a: Pt, b: Pt) -> Fraction:
    d = sub(a, b)
    return d[0] * d[0] + d[1] * d[1]


def on_segment_closed(p: Pt, a: Pt, b: Pt) -> bool:
    if orient(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def on_segment_open(p: Pt, a: Pt, b: Pt) -> bool:
    return on_segment_closed(p, a, b) and p != a and p != b


def segments_cross_properly(a: Pt, b: Pt, c: Pt, d: Pt) -> bool:
    """Interiors intersect in a single point (strict transversal crossing)."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def segments_touch(a: Pt, b: Pt, c: Pt, d: Pt) -> bool:
    """Any contact at all, including endpoints and collinear overlap."""
    if segments_cross_properly(a, b, c, d):
        return True
    for p, (u, v) in ((c, (a, b)), (d, (a, b)), (a, (c, d)), (b, (c, d))):
        if on_segment_closed(p, u, v):
            return True
    return False


def proper_intersection_point(a: Pt, b: Pt, c: Pt, d: Pt) -> tuple[Pt, Fraction, Fraction]:
    """Exact crossing point of properly crossing segments, with both parameters."""
    r = sub(b, a)
    s = sub(d, c)
    den = cross(r, s)
    t = cross(sub(c, a), s) / den
    u = cross(sub(c, a), r) / den
    p = (a[0] + t * r[0], a[1] + t * r[1])
    return p, t, u


def seg_point_dist2(p: Pt, a: Pt, b: Pt) -> Fraction:
    """Exact squared distance from p to segment [a, b]."""
    ab = sub(b, a)
    denom = dot(ab, ab)
    if denom == 0:
        return dist2(p, a)
    t = dot(sub(p, a), ab) / denom
    if t <= 0:
        return dist2(p, a)
    if t >= 1:
        return dist2(p, b)
    proj = (a[0] + t * ab[0], a[1] + t * ab[1])
    return dist2(p, proj)


# -- direction comparators (exact angular order around a base direction) -----

def ang_class(u: Pt, v: Pt) -> int:
    """0: same direction; 1: ccw angle in (0,pi); 2: opposite; 3: in (pi,2pi)."""
    c = cross(u, v)
    if c > 0:
        return 1
    if c < 0:
        return 3
    return 0 if dot(u, v) > 0 else 2


def ccw_lt(u: Pt, a: Pt, b: Pt) -> bool:
    """ccw angle from u to a strictly less than ccw angle from u to b."""
    ca, cb = ang_class(u, a), ang_class(u, b)
    if ca != cb:
        return ca < cb
    if ca in (0, 2):
        return False
    return cross(a, b) > 0


def compose_carry(u: Pt, x: Pt, v: Pt) -> int:
    """Wrap count of ccw(u->x) + ccw(x->v) relative to ccw(u->v): 0 or 1."""
    if ang_class(u, x) == 0 or ang_class(x, v) == 0:
        return 0
    return 0 if ccw_lt(u, x, v) else 1


def strictly_inside_sector(u: Pt, w: Pt, x: Pt) -> bool:
    """x strictly inside the ccw sector swept from direction u to direction w."""
    if ang_class(u, x) == 0 or ang_class(x, w) == 0:
        return False
    return ccw_lt(u, x, w)


# -- polygon-level helpers ----------------------------------------------------

def signed_area2(vertices: list[Pt]) -> Fraction:
    """Twice the signed area."""
    n = len(vertices)
    acc = Fraction(0)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        acc += a[0] * b[1] - b[0] * a[1]
    return acc


def check_vertices_generic(vertices: list[Pt]) -> None:
    n = len(vertices)
    if n < 3:
        raise GenericityError("polygon needs at least 3 vertices")
    for i in range(n):
        if vertices[i] == vertices[(i + 1) % n]:
            raise GenericityError(f"coincident consecutive vertices at index {i}")
    for i in range(n):
        a, b, c = vertices[(i - 1) % n], vertices[i], vertices[(i + 1) % n]
        if orient(a, b, c) == 0:
            raise GenericityError(f"three consecutive collinear vertices at index {i}")
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        for j in range(n):
            if j in (i, (i + 1) % n):
                continue
            if on_segment_closed(vertices[j], a, b):
                raise GenericityError(f"vertex {j} lies on non-adjacent edge {i}")


def is_simple_polygon(vertices: list[Pt]) -> bool:
    """Exact: no two non-adjacent edges touch, adjacent edges meet only at the shared vertex."""
    n = len(vertices)
    if n < 3:
        return False
    for i in range(n):
        if vertices[i] == vertices[(i + 1) % n]:
            return False
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        for j in range(i + 1, n):
            c, d = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                shared = b if j == i + 1 else a
                other_pairs = [(p, (c, d)) for p in (a, b) if p != shared] + [
                    (p, (a, b)) for p in (c, d) if p != shared
                ]
                if segments_cross_properly(a, b, c, d):
                    return False
                for p, (u, v) in other_pairs:
                    if on_segment_closed(p, u, v):
                        return False
            else:
                if segments_touch(a, b, c, d):
                    return False
    return True
