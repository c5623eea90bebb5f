"""Exact planar arrangement of a closed polygonal curve.

Vertices, crossing points and face walks are computed over Fraction
coordinates; winding numbers come from crossing the curve (left face =
right face + 1) rather than from any floating-point ray test.  Each
bounded face also receives an exact interior sample point whose vertical
upward ray misses every arrangement vertex, which is what the extension
word construction needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GenericityError
from .planar import (
    Pt,
    add,
    ang_class,
    check_vertices_generic,
    cross,
    dist2,
    proper_intersection_point,
    seg_point_dist2,
    segments_cross_properly,
    segments_touch,
    sub,
)


def _dir_sort_key_factory(vecs):
    """Exact ccw angular order of direction vectors, starting at +x axis."""
    import functools

    def halfplane(v):
        if v[1] > 0 or (v[1] == 0 and v[0] > 0):
            return 0
        return 1

    def cmp(i, j):
        a, b = vecs[i], vecs[j]
        ha, hb = halfplane(a), halfplane(b)
        if ha != hb:
            return -1 if ha < hb else 1
        c = cross(a, b)
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    return functools.cmp_to_key(cmp)


@dataclass
class HalfEdge:
    origin: int
    target: int
    edge_index: int  # original polygon edge
    aligned: bool  # direction agrees with the curve direction
    twin: int = -1
    nxt: int = -1
    face: int = -1


@dataclass
class Face:
    walk: list[int]  # half-edge indices, interior on the left
    area2: Fraction
    winding: int = 0
    is_outer: bool = False
    sample: Pt | None = None


@dataclass
class Arrangement:
    curve: list[Pt]  # original polygon vertices
    points: list[Pt]  # arrangement vertices (corners + crossings)
    half_edges: list[HalfEdge]
    faces: list[Face]
    crossings_per_edge: list[list[tuple[Fraction, int]]]  # (parameter, point index)

    @property
    def outer_face(self) -> int:
        return next(i for i, f in enumerate(self.faces) if f.is_outer)

    def bounded_faces(self):
        return [i for i, f in enumerate(self.faces) if not f.is_outer]


def build_arrangement(vertices: list[Pt]) -> Arrangement:
    check_vertices_generic(vertices)
    n = len(vertices)
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]

    crossings: list[list[tuple[Fraction, Pt]]] = [[] for _ in range(n)]
    seen_points: dict[Pt, tuple[int, int]] = {}
    for i in range(n):
        a, b = edges[i]
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                continue
            c, d = edges[j]
            if segments_cross_properly(a, b, c, d):
                p, t, u = proper_intersection_point(a, b, c, d)
                if p in seen_points:
                    raise GenericityError(f"triple point at {p}")
                seen_points[p] = (i, j)
                crossings[i].append((t, p))
                crossings[j].append((u, p))
            elif segments_touch(a, b, c, d):
                raise GenericityError(
                    f"edges {i} and {j} touch without crossing transversally"
                )

    points: list[Pt] = list(vertices)
    point_index: dict[Pt, int] = {p: i for i, p in enumerate(points)}
    crossings_per_edge: list[list[tuple[Fraction, int]]] = [[] for _ in range(n)]
    for i in range(n):
        for t, p in sorted(crossings[i]):
            if p not in point_index:
                point_index[p] = len(points)
                points.append(p)
            crossings_per_edge[i].append((t, point_index[p]))

    hes: list[HalfEdge] = []
    for i in range(n):
        chain = [point_index[edges[i][0]]] + [pi for _, pi in crossings_per_edge[i]] + [
            point_index[edges[i][1]]
        ]
        for a, b in zip(chain[:-1], chain[1:]):
            h = HalfEdge(origin=a, target=b, edge_index=i, aligned=True)
            g = HalfEdge(origin=b, target=a, edge_index=i, aligned=False)
            h.twin = len(hes) + 1
            g.twin = len(hes)
            hes.append(h)
            hes.append(g)

    outgoing: dict[int, list[int]] = {}
    for idx, h in enumerate(hes):
        outgoing.setdefault(h.origin, []).append(idx)
    for v, idxs in outgoing.items():
        vecs = {i: sub(points[hes[i].target], points[v]) for i in idxs}
        for i1 in idxs:
            for i2 in idxs:
                if i1 < i2 and ang_class(vecs[i1], vecs[i2]) == 0:
                    raise GenericityError("coincident directions at an arrangement vertex")
        idxs.sort(key=_dir_sort_key_factory(vecs))

    pos_in_ring = {}
    for v, idxs in outgoing.items():
        for pos, i in enumerate(idxs):
            pos_in_ring[i] = (v, pos)
    for idx, h in enumerate(hes):
        v, pos = pos_in_ring[h.twin]
        ring = outgoing[v]
        h.nxt = ring[(pos - 1) % len(ring)]

    faces: list[Face] = []
    assigned = [False] * len(hes)
    for start in range(len(hes)):
        if assigned[start]:
            continue
        walk = []
        cur = start
        while not assigned[cur]:
            assigned[cur] = True
            hes[cur].face = len(faces)
            walk.append(cur)
            cur = hes[cur].nxt
        if cur != start:
            raise AssertionError("face walk did not close")
        area2 = Fraction(0)
        for h in walk:
            a = points[hes[h].origin]
            b = points[hes[h].target]
            area2 += a[0] * b[1] - b[0] * a[1]
        faces.append(Face(walk=walk, area2=area2))

    negs = [i for i, f in enumerate(faces) if f.area2 < 0]
    if len(negs) != 1:
        raise AssertionError(f"expected exactly one outer face, found {len(negs)}")
    faces[negs[0]].is_outer = True

    _assign_windings(hes, faces, negs[0])

    arr = Arrangement(
        curve=list(vertices),
        points=points,
        half_edges=hes,
        faces=faces,
        crossings_per_edge=crossings_per_edge,
    )
    _assign_samples(arr)
    return arr


def _assign_windings(hes, faces, outer):
    for f in faces:
        f.winding = None
    faces[outer].winding = 0
    stack = [outer]
    while stack:
        fi = stack.pop()
        for h in faces[fi].walk:
            tw = hes[hes[h].twin]
            other = tw.face
            # the twin half-edge runs along the curve; its face sits left of
            # the curve iff the twin is aligned
            delta = 1 if tw.aligned else -1
            w = faces[fi].winding + delta
            if faces[other].winding is None:
                faces[other].winding = w
                stack.append(other)
            elif faces[other].winding != w:
                raise AssertionError("inconsistent winding propagation")


def _assign_samples(arr: Arrangement) -> None:
    used_x = {p[0] for p in arr.points}
    for fi, face in enumerate(arr.faces):
        if face.is_outer:
            continue
        face.sample = _face_sample(arr, fi, used_x)
        used_x.add(face.sample[0])


def _face_sample(arr: Arrangement, fi: int, forbidden_x) -> Pt:
    face = arr.faces[fi]
    h = face.walk[0]
    he = arr.half_edges[h]
    a = arr.points[he.origin]
    b = arr.points[he.target]
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    # exact clearance: nothing but this sub-segment within distance sqrt(c2)
    c2 = None
    for idx in range(0, len(arr.half_edges), 2):
        g = arr.half_edges[idx]
        if idx == (h // 2) * 2:
            continue
        d2 = seg_point_dist2(mid, arr.points[g.origin], arr.points[g.target])
        c2 = d2 if c2 is None else min(c2, d2)
    for p in arr.points:
        d2 = dist2(mid, p)
        c2 = d2 if c2 is None else min(c2, d2)
    if c2 is None or c2 == 0:
        raise GenericityError("cannot place a face sample point")
    d = sub(b, a)
    nrm = (-d[1], d[0])  # left normal: the face lies left of the half-edge
    n2 = nrm[0] * nrm[0] + nrm[1] * nrm[1]
    d2len = d[0] * d[0] + d[1] * d[1]
    r = Fraction(1)
    while r * r * n2 * 4 > c2:
        r /= 2
    base = add(mid, (r * nrm[0], r * nrm[1]))
    if base[0] not in forbidden_x:
        return base
    # slide tangentially (keeps the normal offset, stays in the clearance disk)
    rt = Fraction(1)
    while rt * rt * d2len * 8 > c2:
        rt /= 2
    k = 1
    while True:
        for sgn in (1, -1):
            shift = rt * Fraction(sgn, k)
            cand = add(base, (shift * d[0], shift * d[1]))
            if cand[0] not in forbidden_x:
                return cand
        k += 1
        if k > 10000:
            raise GenericityError("could not find a generic sample abscissa")


# -- vertical ray crossings for the extension word -----------------------------

@dataclass(frozen=True)
class RayCrossing:
    face: int
    edge_index: int
    t: Fraction  # parameter along the polygon edge
    y: Fraction  # height of the crossing point on the ray
    sign: int  # +1 when the edge runs leftward across the upward ray


def ray_crossings(arr: Arrangement, fi: int) -> list[RayCrossing]:
    """Crossings of face fi's upward ray with the original curve."""
    face = arr.faces[fi]
    px, py = face.sample
    out = []
    n = len(arr.curve)
    for i in range(n):
        a = arr.curve[i]
        b = arr.curve[(i + 1) % n]
        if a[0] == b[0]:
            continue
        lo, hi = (a, b) if a[0] < b[0] else (b, a)
        if not (lo[0] < px < hi[0]):
            continue
        t = (px - a[0]) / (b[0] - a[0])
        y = a[1] + t * (b[1] - a[1])
        if y <= py:
            continue
        sign = 1 if b[0] < a[0] else -1
        out.append(RayCrossing(face=fi, edge_index=i, t=t, y=y, sign=sign))
    return out


def face_report(arr: Arrangement) -> list[dict]:
    """JSON-ready faces: winding, area and sample point (None for outer)."""
    out = []
    for i, f in enumerate(arr.faces):
        out.append(
            {
                "winding": f.winding,
                "area": float(abs(f.area2)) / 2.0,
                "outer": f.is_outer,
                "sample": None if f.sample is None else [float(f.sample[0]), float(f.sample[1])],
            }
        )
    out.sort(key=lambda d: (d["outer"], -d["area"], d["winding"]))
    return out
