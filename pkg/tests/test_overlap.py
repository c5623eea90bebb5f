import math
import random
from fractions import Fraction as F

import pytest

from fiberatlas.errors import GenericityError, SizeLimitError, ValidationError
from fiberatlas.overlap import (
    OrientedPolygon,
    crossing_word,
    enumerate_extensions,
    groupings,
    is_self_overlapping,
    turning_number,
    winding_faces,
    _blank_certificate,
    _normalize_orientation,
    _splice_pieces,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
BOWTIE = [(0, 0), (2, 2), (2, 0), (0, 2)]
OCTAGON = [(-2, -1), (0, 1), (2, -1), (F(-1, 2), 0), (2, 1), (0, -1), (-2, 1), (F(1, 2), 0)]


def poly(pts):
    return OrientedPolygon.from_points(pts)


def random_generic_polygon(rng, nmax=8):
    while True:
        n = rng.randint(4, nmax)
        pts = [(F(rng.randint(-6, 6)), F(rng.randint(-6, 6))) for _ in range(n)]
        try:
            p = poly(pts)
            turning_number(p)
            crossing_word(_normalize_orientation(p)[0])
            return p
        except (GenericityError, ValidationError):
            continue


class TestTurningNumber:
    def test_square(self):
        assert turning_number(poly(SQUARE)) == 1

    def test_bowtie(self):
        assert turning_number(poly(BOWTIE)) == 0

    def test_octagon(self):
        # as listed the traversal is negatively oriented with three full turns
        assert turning_number(poly(OCTAGON)) == -3
        assert turning_number(poly(OCTAGON[::-1])) == 3

    def test_reversal_negates(self, rng):
        for _ in range(30):
            p = random_generic_polygon(rng)
            assert turning_number(p.reversed()) == -turning_number(p)

    def test_similarity_invariance(self, rng):
        for _ in range(20):
            p = random_generic_polygon(rng)
            t = turning_number(p)
            a, b = F(rng.randint(1, 5)), F(rng.randint(-3, 3))
            # rotation by a rational rotation-like map (x,y) -> (3x-4y, 4x+3y)/5
            moved = [
                ((3 * x - 4 * y) / 5 * a + b, (4 * x + 3 * y) / 5 * a - b)
                for x, y in p.vertices
            ]
            assert turning_number(poly(moved)) == t

    def test_antiparallel_corner_rejected(self):
        with pytest.raises(GenericityError):
            turning_number(poly([(0, 0), (2, 0), (1, 0)]))


class TestWindingFaces:
    def test_square_single_face(self):
        faces = winding_faces(poly(SQUARE))
        inner = [f for f in faces if not f["outer"]]
        assert len(inner) == 1 and inner[0]["winding"] == 1
        outer = [f for f in faces if f["outer"]]
        assert len(outer) == 1 and outer[0]["winding"] == 0

    def test_bowtie_pm_one(self):
        faces = winding_faces(poly(BOWTIE))
        ws = sorted(f["winding"] for f in faces if not f["outer"])
        assert ws == [-1, 1]

    def test_octagon_reversed_all_nonnegative(self):
        faces = winding_faces(poly(OCTAGON[::-1]))
        assert all(f["winding"] >= 0 for f in faces)
        assert max(f["winding"] for f in faces) == 3

    def test_winding_matches_ray_count(self, rng):
        """BFS windings equal signed ray-crossing counts (internal cross-check)."""
        from fiberatlas.arrangement import build_arrangement, ray_crossings

        for _ in range(25):
            p = random_generic_polygon(rng)
            arr = build_arrangement(list(p.vertices))
            for fi in arr.bounded_faces():
                rc = ray_crossings(arr, fi)
                assert sum(c.sign for c in rc) == arr.faces[fi].winding


class TestDecision:
    def test_convex_true_single_piece(self):
        ok, cert = is_self_overlapping(poly(SQUARE))
        assert ok
        assert cert.kind == "embedded"
        assert cert.corner_multiplicities == (1, 1, 1, 1)
        assert len(cert.pieces) == 1

    def test_bowtie_false(self):
        ok, cert = is_self_overlapping(poly(BOWTIE))
        assert not ok and cert is None

    def test_octagon_true(self):
        ok, cert = is_self_overlapping(poly(OCTAGON))
        assert ok
        assert cert.excess == 2
        assert sum(cert.corner_multiplicities) == len(OCTAGON) + 2

    def test_lshape_true(self):
        ok, cert = is_self_overlapping(
            poly([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        )
        assert ok and cert.kind == "embedded"

    def test_negative_winding_face_blocks(self, rng):
        """No extension whenever some face winds negatively (positively turned input)."""
        found = 0
        for _ in range(300):
            p = random_generic_polygon(rng)
            p, t, _rev = _normalize_orientation(p)
            if t != 1:
                continue
            faces = winding_faces(p)
            if min(f["winding"] for f in faces) >= 0:
                continue
            found += 1
            ok, _ = is_self_overlapping(p)
            assert not ok
            if found >= 10:
                break
        assert found >= 3

    def test_dp_agrees_with_grouping_search(self, rng):
        """The two decision procedures agree on turning-1 generic polygons."""
        tested = 0
        while tested < 120:
            p = random_generic_polygon(rng)
            pn, t, rev = _normalize_orientation(p)
            if t != 1:
                continue
            tested += 1
            ok_dp, _ = is_self_overlapping(pn, method="dp")
            ok_blank, cert = is_self_overlapping(pn, method="blank")
            assert ok_dp == ok_blank
            if ok_blank:
                assert cert is not None and all(m == 1 for m in cert.corner_multiplicities)

    def test_blank_method_limits(self):
        with pytest.raises(ValidationError):
            is_self_overlapping(poly(OCTAGON), method="blank")  # turning != 1

    def test_method_validation(self):
        with pytest.raises(ValidationError):
            is_self_overlapping(poly(SQUARE), method="magic")


class TestEnumerate:
    def test_convex_exactly_one(self):
        assert len(enumerate_extensions(poly(SQUARE))) == 1

    def test_bowtie_empty(self):
        assert enumerate_extensions(poly(BOWTIE)) == []

    def test_octagon_at_least_two(self):
        certs = enumerate_extensions(poly(OCTAGON))
        assert len(certs) >= 2
        vectors = {c.corner_multiplicities for c in certs}
        assert len(vectors) == len(certs)  # pairwise inequivalent by invariant
        for c in certs:
            assert c.excess == 2
            assert all(m >= 1 for m in c.corner_multiplicities)

    def test_octagon_vectors_concentrate_on_spikes(self):
        # excess lives on the two inner spike corners -1/2 and 1/2
        certs = enumerate_extensions(poly(OCTAGON))
        spikes = {3, 7}
        for c in certs:
            extra = {i for i, m in enumerate(c.corner_multiplicities) if m > 1}
            assert extra <= spikes


class TestCertificates:
    def test_pieces_simple_and_arcs_covered(self, rng):
        from fiberatlas.planar import is_simple_polygon

        checked = 0
        while checked < 40:
            p = random_generic_polygon(rng)
            pn, t, rev = _normalize_orientation(p)
            if t != 1:
                continue
            word = crossing_word(pn)
            ms = groupings(word)
            if not ms:
                checked += 1
                continue
            for matching in ms[:3]:
                pieces, cuts = _splice_pieces(pn, word, matching)
                for piece in pieces:
                    assert is_simple_polygon(list(piece))
                assert len(cuts) == 2 * len(matching)  # each cut used once per side
            checked += 1

    def test_angle_sum_closes_disk(self, rng):
        """Corner angles with multiplicities always total (M-2)pi (disk Gauss-Bonnet),
        and the certificate excess equals turning - 1."""
        import cmath

        for pts in (SQUARE, OCTAGON, [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]):
            p = poly(pts)
            certs = enumerate_extensions(p)
            for cert in certs:
                pn, t, rev = _normalize_orientation(p)
                verts = [complex(float(x), float(y)) for x, y in pn.vertices]
                m = len(verts)
                mult = list(cert.corner_multiplicities)
                if rev:
                    mult = [mult[m - 1 - t_] for t_ in range(m)]
                total = 0.0
                for j in range(m):
                    ang = cmath.phase(
                        (verts[(j - 1) % m] - verts[j]) / (verts[(j + 1) % m] - verts[j])
                    ) % (2 * math.pi)
                    total += ang + 2 * math.pi * (mult[j] - 1)
                defect = (total - (m - 2) * math.pi) / (2 * math.pi)
                assert abs(defect - round(defect)) < 1e-9
                assert round(defect) == 0
                assert cert.excess == t - 1 == sum(mult) - m

    def test_grouping_ray_order_constraint(self, rng):
        """Matched pairs join a lower crossing to a higher one on the same ray."""
        found = 0
        while found < 8:
            p = random_generic_polygon(rng)
            pn, t, rev = _normalize_orientation(p)
            if t != 1:
                continue
            word = crossing_word(pn)
            ms = groupings(word)
            if not ms or not ms[0]:
                continue
            found += 1
            for matching in ms:
                for a, b in matching:
                    ea, eb = word.events[a], word.events[b]
                    assert ea.face == eb.face
                    assert ea.sign < 0 < eb.sign
                    assert ea.y < eb.y


class TestSizeLimits:
    def test_enumerate_corner_limit(self):
        pts = []
        n = 18
        for i in range(n):
            a = 2 * math.pi * i / n
            pts.append((F(round(10000 * math.cos(a)), 1000), F(round(10000 * math.sin(a)), 1000)))
        with pytest.raises(SizeLimitError):
            enumerate_extensions(poly(pts))

    def test_dp_still_decides_large(self):
        pts = []
        n = 18
        for i in range(n):
            a = 2 * math.pi * i / n
            pts.append((F(round(10000 * math.cos(a)), 1000), F(round(10000 * math.sin(a)), 1000)))
        ok, cert = is_self_overlapping(poly(pts), method="dp")
        assert ok and cert.kind == "triangulated"


class TestGenericity:
    def test_vertex_on_edge_rejected(self):
        with pytest.raises(GenericityError):
            is_self_overlapping(poly([(0, 0), (2, 0), (1, 0 + 0), (1, 2)]))

    def test_collinear_consecutive_rejected(self):
        with pytest.raises(GenericityError):
            is_self_overlapping(poly([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)]))

    def test_float_snapping(self):
        p = OrientedPolygon.from_points([0j, complex(1.0, 0.0), complex(1.0, 1.0), complex(0.0, 1.0)])
        assert turning_number(p) == 1
