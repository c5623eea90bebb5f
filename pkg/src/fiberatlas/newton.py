"""Bivariate polynomials, exact Newton polygons and lattice fiber invariants.

All hull and lattice computations run over exact integers/rationals.
Coefficients are Gaussian rationals; polynomials built from inexact
floats are flagged so the edge nondegeneracy test can fall back to a
numeric root-clustering criterion.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParseError, ValidationError
from .rationals import QI, QIPoly, is_squarefree, poly_gcd


@dataclass(frozen=True)
class BivarPolynomial:
    """Finite support map (l, m) -> nonzero Gaussian rational coefficient."""

    coeffs: tuple[tuple[tuple[int, int], QI], ...]
    exact: bool = True

    @classmethod
    def from_dict(cls, d, exact=True) -> "BivarPolynomial":
        items = []
        for (l, m), c in d.items():
            if l < 0 or m < 0:
                raise ValidationError("negative exponents are not allowed")
            q = QI.from_complex(c)
            if q:
                items.append(((int(l), int(m)), q))
        items.sort(key=lambda t: t[0])
        return cls(coeffs=tuple(items), exact=exact)

    def as_dict(self) -> dict:
        return {k: v for k, v in self.coeffs}

    @property
    def support(self):
        return [k for k, _ in self.coeffs]

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k, _ in self.coeffs)

    def degree_z(self) -> int:
        return max((l for (l, _), _ in self.coeffs), default=0)

    def degree_w(self) -> int:
        return max((m for (_, m), _ in self.coeffs), default=0)

    def eval_complex(self, z: complex, w: complex) -> complex:
        return sum(c.to_complex() * z**l * w**m for (l, m), c in self.coeffs)

    def partial_z(self) -> "BivarPolynomial":
        d = {}
        for (l, m), c in self.coeffs:
            if l:
                d[(l - 1, m)] = c * QI(l)
        return BivarPolynomial.from_dict(d, exact=self.exact)

    def partial_w(self) -> "BivarPolynomial":
        d = {}
        for (l, m), c in self.coeffs:
            if m:
                d[(l, m - 1)] = c * QI(m)
        return BivarPolynomial.from_dict(d, exact=self.exact)

    def as_w_poly(self) -> list[QIPoly]:
        """Coefficients as polynomials in z, indexed by w-degree."""
        dw = self.degree_w()
        dz = self.degree_z()
        rows = [[QI(0)] * (dz + 1) for _ in range(dw + 1)]
        for (l, m), c in self.coeffs:
            rows[m][l] = c
        return [QIPoly(r) for r in rows]

    def shifted_by_constant(self, c) -> "BivarPolynomial":
        """f - c, used to pass from f to the fiber equation f = c."""
        d = dict(self.coeffs)
        q = d.get((0, 0), QI(0)) - QI.from_complex(c)
        d[(0, 0)] = q
        return BivarPolynomial.from_dict(d, exact=False if isinstance(c, complex) else self.exact)

    def text(self) -> str:
        parts = []
        for (l, m), c in sorted(self.coeffs, key=lambda t: (t[0][0] + t[0][1], t[0])):
            mono = "*".join(
                ([f"z^{l}" if l > 1 else "z"] if l else []) + ([f"w^{m}" if m > 1 else "w"] if m else [])
            )
            if c.im == 0:
                cs = str(c.re)
            else:
                cs = f"({c.re}+{c.im}i)"
            parts.append(cs if not mono else (mono if c == QI(1) else f"{cs}*{mono}"))
        return " + ".join(parts) if parts else "0"


_NUM = r"(?:\d+/\d+|\d+\.\d+|\.\d+|\d+)"
_TOKEN = re.compile(
    r"\s*(?:(?P<complex>\(\s*[+-]?" + _NUM + r"\s*[+-]\s*" + _NUM + r"\s*i\s*\))"
    r"|(?P<num>" + _NUM + r")"
    r"|(?P<var>[zw])(?:\^(?P<exp>-?\d+))?"
    r"|(?P<op>[+\-*])"
    r"|(?P<other>\S))"
)
_COMPLEX = re.compile(
    r"^\(\s*(?P<re>[+-]?" + _NUM + r")\s*(?P<sg>[+-])\s*(?P<im>" + _NUM + r")\s*i\s*\)$"
)


def _parse_number(tok: str) -> Fraction:
    return Fraction(tok)


def parse_poly(text: str) -> BivarPolynomial:
    """Parse an expanded sum of terms like ``2/3*z^2*w - (0+1i)*w + 1``.

    Products of parenthesised factors are rejected; input must already be
    expanded.  Coefficients may be decimals, rationals p/q or complex
    literals ``(re+im i)``.
    """
    toks = []
    pos = 0
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"cannot tokenize near {text[pos:pos+10]!r}")
        pos = m.end()
        if m.group("other"):
            raise ParseError(f"unexpected character {m.group('other')!r}; expanded input required")
        toks.append(m)

    coeffs: dict[tuple[int, int], QI] = {}
    i = 0
    nt = len(toks)

    def add(term_coeff: QI, lz: int, lw: int):
        key = (lz, lw)
        coeffs[key] = coeffs.get(key, QI(0)) + term_coeff

    sign = 1
    expect_term = True
    while i < nt:
        t = toks[i]
        if t.group("op") in ("+", "-") and expect_term is False:
            sign = 1 if t.group("op") == "+" else -1
            expect_term = True
            i += 1
            continue
        if t.group("op") in ("+", "-") and expect_term:
            # leading or repeated sign
            sign *= 1 if t.group("op") == "+" else -1
            i += 1
            continue
        # parse one term: factors joined by explicit '*'
        coeff = QI(sign)
        lz = lw = 0
        saw_factor = False
        pending_star = False
        while i < nt:
            t = toks[i]
            if t.group("op") == "*":
                if not saw_factor or pending_star:
                    raise ParseError("misplaced '*'")
                pending_star = True
                i += 1
                continue
            if t.group("op") in ("+", "-"):
                break
            if saw_factor and not pending_star:
                raise ParseError("factors must be joined with '*'")
            if t.group("complex"):
                m = _COMPLEX.match(t.group("complex"))
                if not m:
                    raise ParseError(f"bad complex literal {t.group('complex')!r}")
                re_part = _parse_number(m.group("re"))
                im_part = _parse_number(m.group("im"))
                if m.group("sg") == "-":
                    im_part = -im_part
                coeff = coeff * QI(re_part, im_part)
            elif t.group("num"):
                coeff = coeff * QI(_parse_number(t.group("num")))
            elif t.group("var"):
                e = 1 if t.group("exp") is None else int(t.group("exp"))
                if e < 0:
                    raise ParseError("negative exponents are not allowed")
                if t.group("var") == "z":
                    lz += e
                else:
                    lw += e
            i += 1
            saw_factor = True
            pending_star = False
        if not saw_factor:
            raise ParseError("empty term")
        if pending_star:
            raise ParseError("trailing '*' in term")
        add(coeff, lz, lw)
        sign = 1
        expect_term = False
    if expect_term:
        raise ParseError("trailing operator")
    return BivarPolynomial.from_dict(coeffs, exact=True)


def poly_from_complex_dict(d) -> BivarPolynomial:
    """Programmatic constructor; floats/complex mark the result inexact."""
    inexact = any(isinstance(c, (float, complex)) and c != int(getattr(c, "real", c)) for c in d.values())
    return BivarPolynomial.from_dict(d, exact=not inexact)


# -- lattice polygon ----------------------------------------------------------

IPoint = tuple[int, int]


@dataclass(frozen=True)
class LatticeEdge:
    start: IPoint
    end: IPoint
    primitive: IPoint
    lattice_points: tuple[IPoint, ...]  # including both endpoints

    def on_coordinate_axis(self) -> bool:
        return (self.start[0] == 0 and self.end[0] == 0) or (self.start[1] == 0 and self.end[1] == 0)


@dataclass(frozen=True)
class LatticePolygon:
    vertices: tuple[IPoint, ...]  # CCW, starting at the lexicographically smallest
    boundary_points: tuple[IPoint, ...]  # cyclic CCW, no repeats
    interior_count: int
    edges: tuple[LatticeEdge, ...]
    area2: int  # twice the area

    @property
    def degenerate(self) -> bool:
        return self.area2 == 0


def _convex_hull(points: list[IPoint]) -> list[IPoint]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(pref):
        out = []
        for p in pref:
            while len(out) >= 2 and _cross_i(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return lower[:-1] + upper[:-1]


def _cross_i(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(f: BivarPolynomial) -> LatticePolygon:
    """Exact convex hull of the support with boundary/interior lattice data."""
    if not f.coeffs:
        raise ValidationError("zero polynomial has no Newton polygon")
    if f.is_constant():
        raise ValidationError("constant polynomial has a degenerate Newton polygon")
    hull = _convex_hull(f.support)
    if len(hull) == 1:
        raise ValidationError("constant polynomial has a degenerate Newton polygon")

    edges = []
    boundary: list[IPoint] = []
    m = len(hull)
    if m == 2:
        cyc = [hull[0], hull[1], hull[0]]
    else:
        cyc = hull + [hull[0]]
    for a, b in zip(cyc[:-1], cyc[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        gcd = math.gcd(abs(dx), abs(dy))
        prim = (dx // gcd, dy // gcd)
        pts = tuple((a[0] + i * prim[0], a[1] + i * prim[1]) for i in range(gcd + 1))
        edges.append(LatticeEdge(start=a, end=b, primitive=prim, lattice_points=pts))
        boundary.extend(pts[:-1])
    # deduplicate (degenerate segment hulls traverse twice)
    seen = set()
    boundary_unique = []
    for p in boundary:
        if p not in seen:
            seen.add(p)
            boundary_unique.append(p)
    area2 = abs(sum(cyc[i][0] * cyc[i + 1][1] - cyc[i + 1][0] * cyc[i][1] for i in range(len(cyc) - 1)))

    interior = _count_interior(hull, boundary_unique, area2)
    poly = LatticePolygon(
        vertices=tuple(hull),
        boundary_points=tuple(boundary_unique),
        interior_count=interior,
        edges=tuple(edges),
        area2=area2,
    )
    _assert_pick(poly)
    return poly


def _count_interior(hull, boundary, area2) -> int:
    """Direct enumeration over the bounding box with exact inclusion tests."""
    if area2 == 0:
        return 0
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    bset = set(boundary)
    count = 0
    m = len(hull)
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if (x, y) in bset:
                continue
            inside = True
            for i in range(m):
                if _cross_i(hull[i], hull[(i + 1) % m], (x, y)) <= 0:
                    inside = False
                    break
            if inside:
                count += 1
    return count


def _assert_pick(poly: LatticePolygon) -> None:
    if poly.degenerate:
        return
    lhs = Fraction(poly.area2, 2)
    rhs = poly.interior_count + Fraction(len(poly.boundary_points), 2) - 1
    if lhs != rhs:
        raise AssertionError(f"Pick identity violated: area {lhs} vs I + B/2 - 1 = {rhs}")


# -- admissibility and nondegeneracy ------------------------------------------

@dataclass(frozen=True)
class SandwichReport:
    l: int
    m: int
    ok: bool
    missing: tuple[IPoint, ...]


def hypothesis_check(f: BivarPolynomial) -> SandwichReport:
    """Triangle (0,0),(l,0),(0,m) inside the hull inside the [0,l]x[0,m] box."""
    poly = newton_polygon(f)
    l, m = f.degree_z(), f.degree_w()
    if l < 1 or m < 1:
        return SandwichReport(l=l, m=m, ok=False, missing=((0, 0), (l, 0), (0, m)))
    missing = []
    hull = poly.vertices
    for p in ((0, 0), (l, 0), (0, m)):
        if not _hull_contains(hull, p):
            missing.append(p)
    # hull subset of the box holds by the definition of l and m
    return SandwichReport(l=l, m=m, ok=not missing, missing=tuple(missing))


def _hull_contains(hull, p) -> bool:
    m = len(hull)
    if m == 1:
        return hull[0] == p
    if m == 2:
        a, b = hull
        if _cross_i(a, b, p) != 0:
            return False
        return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    return all(_cross_i(hull[i], hull[(i + 1) % m], p) >= 0 for i in range(m))


@dataclass(frozen=True)
class EdgeWitness:
    edge_start: IPoint
    edge_end: IPoint
    repeated_root: complex


def weak_nondegeneracy(f: BivarPolynomial):
    """Check every non-axis hull edge polynomial for repeated nonzero roots.

    Each non-axis edge e gives f_e = z^a w^b G(u) in the primitive edge
    monomial u; the test is squarefreeness of G.  Exact coefficients use
    a gcd over Q(i); inexact ones fall back to clustering numeric roots
    at relative tolerance 1e-9.  Returns (ok, witness-or-None).
    """
    poly = newton_polygon(f)
    support = f.as_dict()
    for edge in poly.edges:
        if edge.on_coordinate_axis():
            continue
        coeffs = []
        for p in edge.lattice_points:
            coeffs.append(support.get(p, QI(0)))
        G = QIPoly(coeffs)
        # hull vertices carry nonzero coefficients, so G(0) != 0 and lc != 0
        if f.exact:
            if not is_squarefree(G):
                gg = poly_gcd(G, G.deriv())
                roots = np.roots(gg.to_complex_coeffs())
                root = complex(roots[0]) if len(roots) else 0j
                return False, EdgeWitness(edge.start, edge.end, root)
        else:
            if _numeric_repeated_root(G):
                roots = sorted(
                    (complex(r) for r in np.roots(G.to_complex_coeffs())),
                    key=lambda r: (r.real, r.imag),
                )
                pairs = [(abs(a - b), (a + b) / 2) for a, b in zip(roots, roots[1:])]
                witness_root = min(pairs)[1] if pairs else 0j
                return False, EdgeWitness(edge.start, edge.end, complex(witness_root))
    return True, None


def _numeric_repeated_root(G: QIPoly, rel_tol: float = 1e-9) -> bool:
    """Numerical gcd(G, G') test: the Sylvester matrix of a squarefree
    polynomial has full rank, so a relative singular-value collapse below
    rel_tol flags a (near-)repeated root.  Raw companion-matrix roots split
    multiple roots by ~1e-8, which is why clustering them directly at the
    1e-9 tolerance would miss genuine degeneracies."""
    g = [c for c in G.to_complex_coeffs()]
    dg = [c * (len(g) - 1 - i) for i, c in enumerate(g[:-1])]
    m = len(g) - 1
    n = len(dg) - 1
    if m < 2:
        return False
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    for i in range(n):
        S[i, i : i + m + 1] = g
    for i in range(m):
        S[n + i, i : i + n + 1] = dg
    sv = np.linalg.svd(S, compute_uv=False)
    return bool(sv[-1] <= rel_tol * sv[0])


# -- fiber prediction ----------------------------------------------------------

@dataclass(frozen=True)
class PuncturePair:
    a: IPoint
    b: IPoint
    angle_over_2pi: int  # cone angle divided by 2*pi


@dataclass(frozen=True)
class FiberPrediction:
    g: int
    s: int
    pairs: tuple[PuncturePair, ...]
    gauss_bonnet_ok: bool


def boundary_pair_spectrum(poly: LatticePolygon) -> list[tuple[IPoint, IPoint, Fraction]]:
    """Neighbouring boundary lattice pairs off a common axis, with triangle areas.

    The area is of the triangle (A, B, (1,1)); the cone angle attached to
    the pair is 4*pi*area.
    """
    pts = poly.boundary_points
    nb = len(pts)
    out = []
    for i in range(nb):
        a = pts[i]
        b = pts[(i + 1) % nb]
        same_x_axis = a[1] == 0 and b[1] == 0
        same_y_axis = a[0] == 0 and b[0] == 0
        if same_x_axis or same_y_axis:
            continue
        det = (b[0] - a[0]) * (1 - a[1]) - (b[1] - a[1]) * (1 - a[0])
        out.append((a, b, Fraction(abs(det), 2)))
    return out


def fiber_prediction(f: BivarPolynomial) -> FiberPrediction:
    """Genus, puncture count and cone-angle spectrum from the lattice polygon."""
    sandwich = hypothesis_check(f)
    if not sandwich.ok:
        raise ValidationError(
            f"polygon sandwich fails: triangle corners {list(sandwich.missing)} missing from the hull"
        )
    ok, witness = weak_nondegeneracy(f)
    if not ok:
        raise ValidationError(
            f"weakly degenerate edge {witness.edge_start}-{witness.edge_end} "
            f"(repeated root near {witness.repeated_root:.6g})"
        )
    poly = newton_polygon(f)
    g = poly.interior_count
    if g <= 0:
        raise ValidationError("no interior lattice points: the prediction requires positive genus")
    off_axis = [p for p in poly.boundary_points if p[0] > 0 and p[1] > 0]
    s = 1 + len(off_axis)
    spectrum = boundary_pair_spectrum(poly)
    if len(spectrum) != s:
        raise AssertionError(f"pair count {len(spectrum)} differs from s = {s}")
    pairs = []
    for a, b, area in spectrum:
        ratio = 2 * area  # cone angle / (2*pi)
        if ratio.denominator != 1 or ratio <= 0:
            raise AssertionError(
                f"cone angle 4*pi*{area} at pair {a},{b} is not a positive multiple of 2*pi"
            )
        pairs.append(PuncturePair(a=a, b=b, angle_over_2pi=int(ratio)))
    total = sum(p.angle_over_2pi for p in pairs)
    gb_ok = total == s + 2 * g - 2
    if not gb_ok:
        raise AssertionError(
            f"Gauss-Bonnet violated: spectrum total {total} != s + 2g - 2 = {s + 2 * g - 2}"
        )
    return FiberPrediction(g=g, s=s, pairs=tuple(pairs), gauss_bonnet_ok=gb_ok)


def poly_report(f: BivarPolynomial) -> dict:
    """JSON-ready analysis: hull, sandwich, nondegeneracy and prediction."""
    poly = newton_polygon(f)
    sandwich = hypothesis_check(f)
    nondeg, witness = weak_nondegeneracy(f)
    report = {
        "hull": [list(v) for v in poly.vertices],
        "interior_count": poly.interior_count,
        "boundary_points": [list(p) for p in poly.boundary_points],
        "l": sandwich.l,
        "m": sandwich.m,
        "hypothesis_ok": sandwich.ok,
        "nondegenerate": nondeg,
        "witness": None
        if witness is None
        else {
            "edge": [list(witness.edge_start), list(witness.edge_end)],
            "repeated_root": [witness.repeated_root.real, witness.repeated_root.imag],
        },
    }
    if sandwich.ok and nondeg and poly.interior_count > 0:
        pred = fiber_prediction(f)
        report.update(
            {
                "g": pred.g,
                "s": pred.s,
                "punctures": [
                    {"A": list(p.a), "B": list(p.b), "angle_over_2pi": p.angle_over_2pi}
                    for p in pred.pairs
                ],
                "gauss_bonnet_ok": pred.gauss_bonnet_ok,
            }
        )
    else:
        report.update({"g": None, "s": None, "punctures": [], "gauss_bonnet_ok": None})
    return report
