"""Disk extensions of closed polygonal lines.

A closed polygonal line bounds a disk extension when some map of the
disk restricts to it on the boundary and is an orientation-preserving
immersion away from the corners.  Corners may wrap: the wedge angle used
at corner l is its interior angle plus 2*pi*(m_l - 1) for an integer
multiplicity m_l >= 1, and the total excess sum(m_l - 1) always equals
turning_number - 1.  The classical self-overlapping case is turning
number 1 with every multiplicity equal to 1.

Two decision procedures are provided and cross-validated:

* an exact interval dynamic program over chains of the polygon;
  splitting a chain at a middle vertex must produce a positively
  oriented triangle whose wedge fits the corner angles, with 2*pi
  carries charged against the excess budget;
* the crossing-word construction for the immersed (turning 1) case:
  words are read off vertical rays from every bounded face and a
  noncrossing pairing of negative with positive crossings of the same
  face certifies an extension; cutting along the paired ray segments
  decomposes the disk into embedded pieces.

Certificates report per-corner multiplicities.  Distinct multiplicity
vectors are honest invariants (a homeomorphism of the disk fixing the
boundary preserves every corner's wrap count), so certificate counts are
lower bounds for the number of inequivalent extensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arrangement import Arrangement, RayCrossing, build_arrangement, ray_crossings
from .errors import GenericityError, SizeLimitError, ValidationError
from .planar import (
    Pt,
    ang_class,
    check_vertices_generic,
    compose_carry,
    cross,
    dot,
    is_simple_polygon,
    snap,
    sub,
)

BLANK_CORNER_LIMIT = 16
MAX_EXCESS = 8


@dataclass(frozen=True)
class OrientedPolygon:
    """Closed polygonal line with exact rational vertices, as traversed."""

    vertices: tuple[Pt, ...]

    @classmethod
    def from_points(cls, pts) -> "OrientedPolygon":
        vs = []
        for p in pts:
            if isinstance(p, complex):
                vs.append((snap(p.real), snap(p.imag)))
            else:
                x, y = p
                vs.append((snap(x), snap(y)))
        if len(vs) < 3:
            raise ValidationError("polygon needs at least 3 vertices")
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if a == b:
                raise GenericityError("coincident consecutive vertices")
        return cls(vertices=tuple(vs))

    def reversed(self) -> "OrientedPolygon":
        return OrientedPolygon(vertices=self.vertices[::-1])

    def __len__(self):
        return len(self.vertices)


def _edge_dirs(p: OrientedPolygon):
    v = p.vertices
    n = len(v)
    return [sub(v[(i + 1) % n], v[i]) for i in range(n)]


def turning_number(p: OrientedPolygon) -> int:
    """Signed exterior angle sum divided by 2*pi (exactly an integer)."""
    dirs = _edge_dirs(p)
    n = len(dirs)
    total = 0.0
    for i in range(n):
        u = dirs[i]
        w = dirs[(i + 1) % n]
        cls = ang_class(u, w)
        if cls == 2:
            raise GenericityError(f"degenerate corner {(i + 1) % n}: consecutive edges antiparallel")
        total += math.atan2(float(cross(u, w)), float(dot(u, w)))
    t = total / (2 * math.pi)
    r = round(t)
    if abs(t - r) > 1e-9:
        raise AssertionError(f"turning number {t} is not an integer")
    return int(r)


def winding_faces(p: OrientedPolygon) -> list[dict]:
    """Arrangement faces with winding numbers (outer face winding 0)."""
    from .arrangement import face_report

    arr = build_arrangement(list(p.vertices))
    return face_report(arr)


# -- dynamic program over boundary chains --------------------------------------

class _ChainTable:
    """Reachable (a, b, e) wrap triples for every chain (i..j) of the polygon.

    a / b are 2*pi wraps consumed at the chain's two chord corners, e is
    the total wrap count at interior chain corners.  The polygon must be
    positively oriented with excess budget E = turning - 1.
    """

    def __init__(self, poly: OrientedPolygon, budget: int):
        self.v = poly.vertices
        self.m = len(self.v)
        self.E = budget
        self.memo: dict[tuple[int, int], set[tuple[int, int, int]]] = {}

    def d(self, i, j) -> Pt:
        return sub(self.v[j], self.v[i])

    def _tri_positive(self, i, k, j) -> bool:
        return cross(self.d(i, k), self.d(i, j)) > 0

    def splits(self, i, j):
        """Yield (k, carries...) for all admissible single-triangle splits."""
        m = self.m
        k = (i + 1) % m
        while k != j:
            if self._tri_positive(i, k, j):
                u0 = self.d(i, (i + 1) % m)
                ci = compose_carry(u0, self.d(i, k), self.d(i, j))
                w0 = self.d(j, (j - 1) % m)
                cj = compose_carry(self.d(j, i), self.d(j, k), w0)
                d0 = self.d(k, (k + 1) % m)
                d1 = self.d(k, j)
                d2 = self.d(k, i)
                d3 = self.d(k, (k - 1) % m)
                ck = compose_carry(d0, d1, d2) + compose_carry(d0, d2, d3)
                yield k, ci, cj, ck
            k = (k + 1) % m

    def table(self, i, j) -> set[tuple[int, int, int]]:
        key = (i, j)
        got = self.memo.get(key)
        if got is not None:
            return got
        out: set[tuple[int, int, int]] = set()
        self.memo[key] = out
        if (i + 1) % self.m == j:
            out.add((0, 0, 0))
            return out
        E = self.E
        for k, ci, cj, ck in self.splits(i, j):
            left = self.table(i, k)
            right = self.table(k, j)
            for a1, c1, e1 in left:
                for c2, b2, e2 in right:
                    wk = c1 + c2 + ck
                    a = a1 + ci
                    b = b2 + cj
                    e = e1 + e2 + wk
                    if a <= E and b <= E and e <= E and a + b + e <= E + 0:
                        out.add((a, b, e))
        return out

    def assemblies(self, i, j, target, budget_nodes):
        """Yield (wrapdict, triangles) for chains matching a target (a,b,e)."""
        m = self.m
        if (i + 1) % m == j:
            if target == (0, 0, 0):
                yield {}, []
            return
        ta, tb, te = target
        for k, ci, cj, ck in self.splits(i, j):
            a1t = ta - ci
            b2t = tb - cj
            if a1t < 0 or b2t < 0:
                continue
            for a1, c1, e1 in self.table(i, k):
                if a1 != a1t:
                    continue
                for c2, b2, e2 in self.table(k, j):
                    if b2 != b2t:
                        continue
                    wk = c1 + c2 + ck
                    if e1 + e2 + wk != te:
                        continue
                    budget_nodes[0] -= 1
                    if budget_nodes[0] < 0:
                        raise SizeLimitError("extension assembly enumeration budget exceeded")
                    for wl, tl in self.assemblies(i, k, (a1, c1, e1), budget_nodes):
                        for wr, tr in self.assemblies(k, j, (c2, b2, e2), budget_nodes):
                            wrap = dict(wl)
                            for idx, w in wr.items():
                                wrap[idx] = wrap.get(idx, 0) + w
                            if wk:
                                wrap[k] = wrap.get(k, 0) + wk
                            yield wrap, tl + tr + [(i, k, j)]


@dataclass(frozen=True)
class ExtensionCertificate:
    """A disk extension witness.

    ``corner_multiplicities`` are indexed like the polygon the caller
    supplied.  ``pieces`` are the boundaries of the embedded sub-disks of
    the decomposition; for crossing-word certificates the ``cuts`` list
    the paired ray segments, for triangulated certificates it lists the
    chords.
    """

    kind: str  # "embedded" | "blank-cuts" | "triangulated"
    corner_multiplicities: tuple[int, ...]
    excess: int
    pieces: tuple[tuple[complex, ...], ...]
    cuts: tuple = ()
    matching: tuple = ()
    reversed_input: bool = False

    def multiplicity_of(self, corner: int) -> int:
        return self.corner_multiplicities[corner]


def _normalize_orientation(p: OrientedPolygon):
    t = turning_number(p)
    if t < 0:
        return p.reversed(), -t, True
    return p, t, False


def _restore_indices(values, m, was_reversed):
    # reversed()[t] is the original vertex m-1-t
    if not was_reversed:
        return tuple(values)
    out = [0] * m
    for t, val in enumerate(values):
        out[m - 1 - t] = val
    return tuple(out)


def _triangulated_certificate(poly, wrap, triangles, a, b, was_reversed) -> ExtensionCertificate:
    m = len(poly)
    mult = [1] * m
    for idx, w in wrap.items():
        mult[idx] += w
    mult[1] += a
    mult[0] += b
    verts = poly.vertices
    pieces = tuple(
        tuple(complex(float(verts[i][0]), float(verts[i][1])) for i in tri) for tri in triangles
    )
    cuts = tuple(
        (i, j)
        for tri in triangles
        for (i, j) in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))
        if (j - i) % m not in (1,) and (i - j) % m not in (1,)
    )
    excess = sum(mult) - m
    return ExtensionCertificate(
        kind="triangulated",
        corner_multiplicities=_restore_indices(mult, m, was_reversed),
        excess=excess,
        pieces=pieces,
        cuts=tuple(sorted(set(cuts))),
        reversed_input=was_reversed,
    )


def _dp_certificates(poly: OrientedPolygon, excess: int, was_reversed: bool, limit: int):
    """Distinct-multiplicity-vector certificates from the chain table."""
    table = _ChainTable(poly, excess)
    full = table.table(1, 0)
    targets = sorted(t for t in full if sum(t) == excess)
    certs: list[ExtensionCertificate] = []
    seen_vectors = set()
    budget = [500_000]
    for target in targets:
        for wrap, tris in table.assemblies(1, 0, target, budget):
            a, b, _ = target
            cert = _triangulated_certificate(poly, wrap, tris, a, b, was_reversed)
            if cert.corner_multiplicities not in seen_vectors:
                seen_vectors.add(cert.corner_multiplicities)
                certs.append(cert)
                if len(certs) >= limit:
                    return certs
    return certs


def _dp_decides(poly: OrientedPolygon, excess: int) -> bool:
    table = _ChainTable(poly, excess)
    return any(sum(t) == excess for t in table.table(1, 0))


# -- crossing words (immersed regime) ------------------------------------------

@dataclass(frozen=True)
class CrossingWord:
    """Ray-crossing events in curve order, one ray per bounded face."""

    events: tuple[RayCrossing, ...]

    def letters(self):
        return [(e.face, e.sign) for e in self.events]


def crossing_word(p: OrientedPolygon, arr: Arrangement | None = None) -> CrossingWord:
    if arr is None:
        arr = build_arrangement(list(p.vertices))
    events = []
    for fi in arr.bounded_faces():
        events.extend(ray_crossings(arr, fi))
    events.sort(key=lambda e: (e.edge_index, e.t))
    return CrossingWord(events=tuple(events))


def _noncrossing(pair, chosen, L):
    i1, j1 = pair
    for i2, j2 in chosen:
        a, b = sorted((i1, j1))
        inside = lambda x: a < x < b
        if inside(i2) != inside(j2):
            return False
    return True


def groupings(word: CrossingWord, limit: int | None = None):
    """Noncrossing pairings of every negative crossing with a positive one.

    Pairs join crossings of the same face ray with the negative crossing
    strictly closer to the ray base, which is forced for arcs of an
    actual extension.  Returns matchings as tuples of event index pairs
    (negative, positive).
    """
    events = word.events
    L = len(events)
    negatives = [i for i, e in enumerate(events) if e.sign < 0]
    positives_by_face: dict[int, list[int]] = {}
    for i, e in enumerate(events):
        if e.sign > 0:
            positives_by_face.setdefault(e.face, []).append(i)
    out = []

    def rec(rem, chosen, used):
        if limit is not None and len(out) >= limit:
            return
        if not rem:
            out.append(tuple(sorted(chosen)))
            return
        neg = rem[0]
        e = events[neg]
        for pos in positives_by_face.get(e.face, ()):
            if pos in used:
                continue
            if events[pos].y <= e.y:
                continue
            pair = (neg, pos)
            if not _noncrossing(pair, chosen, L):
                continue
            rec(rem[1:], chosen + [pair], used | {pos})

    rec(negatives, [], set())
    return out


def _splice_pieces(p: OrientedPolygon, word: CrossingWord, matching):
    """Cut the curve along the matched ray segments; return closed pieces.

    Every piece is a closed polyline of exact points; the construction
    consumes each curve arc exactly once and each cut twice (once per
    side).
    """
    events = word.events
    L = len(events)
    verts = p.vertices
    n = len(verts)
    partner = {}
    for a, b in matching:
        partner[a] = b
        partner[b] = a

    def event_point(e: RayCrossing) -> Pt:
        a = verts[e.edge_index]
        b = verts[(e.edge_index + 1) % n]
        return (a[0] + e.t * (b[0] - a[0]), a[1] + e.t * (b[1] - a[1]))

    def arc_points(i):
        """Points strictly after event i up to and including event i+1.

        Events are sorted along the curve, so only the pair (L-1, 0)
        wraps through the curve start; with a single event the arc is
        the whole curve.
        """
        e0 = events[i]
        e1 = events[(i + 1) % L]
        wrapped = i + 1 == L
        if not wrapped and e1.edge_index == e0.edge_index:
            return [event_point(e1)]
        pts = []
        edge = (e0.edge_index + 1) % n
        while True:
            pts.append(verts[edge])
            if edge == e1.edge_index:
                break
            edge = (edge + 1) % n
        pts.append(event_point(e1))
        return pts

    if L == 0:
        return [tuple(verts)], []

    arcs = {i: arc_points(i) for i in range(L)}
    pieces = []
    cuts_used = []
    visited = set()
    for start in range(L):
        if start in visited:
            continue
        pts: list[Pt] = [event_point(events[start])]
        i = start
        while True:
            visited.add(i)
            pts.extend(arcs[i])
            j = (i + 1) % L
            if j in partner:
                cuts_used.append(tuple(sorted((j, partner[j]))))
                pts.append(event_point(events[partner[j]]))
                i = partner[j]
            else:
                i = j
            if i == start:
                break
        if pts[-1] == pts[0]:
            pts.pop()
        pieces.append(tuple(pts))
    return pieces, cuts_used


def _verify_pieces(pieces) -> bool:
    for piece in pieces:
        if len(piece) < 3:
            return False
        if not is_simple_polygon(list(piece)):
            return False
    return True


def _blank_certificate(p, word, matching, was_reversed):
    pieces, _ = _splice_pieces(p, word, matching)
    if not _verify_pieces(pieces):
        return None
    m = len(p)
    events = word.events
    cuts = tuple(
        (
            events[a].edge_index,
            float(events[a].t),
            events[b].edge_index,
            float(events[b].t),
            events[a].face,
        )
        for a, b in matching
    )
    return ExtensionCertificate(
        kind="blank-cuts" if matching else "embedded",
        corner_multiplicities=_restore_indices([1] * m, m, was_reversed),
        excess=0,
        pieces=tuple(tuple(complex(float(x), float(y)) for x, y in piece) for piece in pieces),
        cuts=cuts,
        matching=tuple(matching),
        reversed_input=was_reversed,
    )


# -- public decision operations -------------------------------------------------

def is_self_overlapping(p: OrientedPolygon, method: str = "auto"):
    """Decide extendability; return (bool, certificate-or-None).

    ``method='blank'`` restricts to the crossing-word search (turning
    number 1, at most 16 corners); ``method='dp'`` uses only the chain
    dynamic program; ``auto`` decides by the dynamic program and attaches
    a crossing-word certificate in the immersed regime when available.
    """
    if method not in ("auto", "blank", "dp"):
        raise ValidationError(f"unknown method {method!r}")
    check_vertices_generic(list(p.vertices))
    poly, t, was_reversed = _normalize_orientation(p)
    if t < 1:
        return False, None
    excess = t - 1
    if excess > MAX_EXCESS:
        raise SizeLimitError(f"turning number {t} exceeds the excess budget {MAX_EXCESS + 1}")

    if method == "blank":
        if excess != 0:
            raise ValidationError("crossing-word decision applies only to turning number 1")
        if len(poly) > BLANK_CORNER_LIMIT:
            raise SizeLimitError(
                f"crossing-word search limited to {BLANK_CORNER_LIMIT} corners, got {len(poly)}"
            )
        word = crossing_word(poly)
        for matching in groupings(word):
            cert = _blank_certificate(poly, word, matching, was_reversed)
            if cert is not None:
                return True, cert
        return False, None

    ok = _dp_decides(poly, excess)
    if not ok:
        return False, None
    if method == "auto" and excess == 0 and len(poly) <= BLANK_CORNER_LIMIT:
        word = crossing_word(poly)
        for matching in groupings(word):
            cert = _blank_certificate(poly, word, matching, was_reversed)
            if cert is not None:
                return True, cert
    certs = _dp_certificates(poly, excess, was_reversed, limit=1)
    if not certs:
        raise AssertionError("decision table nonempty but no assembly found")
    return True, certs[0]


def enumerate_extensions(p: OrientedPolygon, limit: int = 64):
    """Pairwise inequivalent extension certificates (a lower bound).

    In the immersed regime these are distinct noncrossing cut systems of
    the crossing word; with positive excess they are distinct corner
    multiplicity vectors, which genuinely distinguish extension classes.
    """
    check_vertices_generic(list(p.vertices))
    poly, t, was_reversed = _normalize_orientation(p)
    if t < 1:
        return []
    excess = t - 1
    if excess > MAX_EXCESS:
        raise SizeLimitError(f"turning number {t} exceeds the excess budget {MAX_EXCESS + 1}")
    if excess == 0:
        if len(poly) > BLANK_CORNER_LIMIT:
            raise SizeLimitError(
                f"extension enumeration limited to {BLANK_CORNER_LIMIT} corners, got {len(poly)}"
            )
        word = crossing_word(poly)
        certs = []
        for matching in groupings(word):
            cert = _blank_certificate(poly, word, matching, was_reversed)
            if cert is not None:
                certs.append(cert)
                if len(certs) >= limit:
                    break
        return certs
    if not _dp_decides(poly, excess):
        return []
    return _dp_certificates(poly, excess, was_reversed, limit)


def extension_report(p: OrientedPolygon, limit: int = 64) -> dict:
    """JSON-ready decision summary for one polygon."""
    t = turning_number(p)
    certs = enumerate_extensions(p, limit=limit)
    ok = bool(certs)
    return {
        "turning": t,
        "self_overlapping": ok,
        "extensions_found": len(certs),
        "certificates": [
            {
                "kind": c.kind,
                "corner_multiplicities": list(c.corner_multiplicities),
                "excess": c.excess,
                "cuts": [list(cut) for cut in c.cuts],
                "pieces": [[[z.real, z.imag] for z in piece] for piece in c.pieces],
            }
            for c in certs
        ],
    }
