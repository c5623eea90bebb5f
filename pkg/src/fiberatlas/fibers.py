"""Polygon families over a parameter grid: fibers, cone angles, exactness.

A word together with side vectors z and an offset builds one flat
polygon fiber; a tabulated family (J, J0) over a rectangular grid feeds
the closedness checks of the pairing forms Re(T_k(J) dxi), the action
integrals and the data-equivalence predicate.  Chain vertices are kept
as exact rationals so closure and side-pairing identities hold exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NeedsExtensionError, ValidationError
from .planar import Pt, is_simple_polygon, signed_area2
from .words import IntersectionData, QuadraticWord, glue, matrices

TWO_PI = 2.0 * math.pi


# -- grids and samples ---------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValidationError("grid needs nx, ny >= 3")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValidationError("grid needs x1 > x0 and y1 > y0")

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def axes(self):
        return (
            np.linspace(self.x0, self.x1, self.nx),
            np.linspace(self.y0, self.y1, self.ny),
        )

    def nodes(self) -> np.ndarray:
        xs, ys = self.axes()
        return xs[:, None] + 1j * ys[None, :]

    def coarse(self) -> "GridSpec":
        """Every second node; requires odd nx, ny >= 5."""
        if self.nx < 5 or self.ny < 5 or self.nx % 2 == 0 or self.ny % 2 == 0:
            raise ValidationError("coarse subgrid needs odd nx, ny >= 5")
        return GridSpec(self.x0, self.x1, self.y0, self.y1, (self.nx + 1) // 2, (self.ny + 1) // 2)


@dataclass(frozen=True)
class GeometricSample:
    """Tabulated side-vector family J (nonvanishing) and offset J0."""

    grid: GridSpec
    J: np.ndarray  # complex, shape (nx, ny, n)
    J0: np.ndarray  # complex, shape (nx, ny)

    def __post_init__(self):
        J = np.asarray(self.J, dtype=complex)
        J0 = np.asarray(self.J0, dtype=complex)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J0", J0)
        if J.shape[:2] != (self.grid.nx, self.grid.ny) or J.ndim != 3:
            raise ValidationError(f"J must have shape (nx, ny, n), got {J.shape}")
        if J0.shape != (self.grid.nx, self.grid.ny):
            raise ValidationError(f"J0 must have shape (nx, ny), got {J0.shape}")
        if np.any(J == 0):
            raise ValidationError("J must be nonvanishing on the grid")

    @property
    def n(self) -> int:
        return self.J.shape[2]

    @classmethod
    def from_callables(cls, grid: GridSpec, j_funcs, j0_func) -> "GeometricSample":
        xi = grid.nodes()
        J = np.stack([np.vectorize(f)(xi) for f in j_funcs], axis=-1).astype(complex)
        J0 = np.vectorize(j0_func)(xi).astype(complex)
        return cls(grid=grid, J=J, J0=J0)

    def subsample(self) -> "GeometricSample":
        return GeometricSample(grid=self.grid.coarse(), J=self.J[::2, ::2, :], J0=self.J0[::2, ::2])


# -- polygon fibers -------------------------------------------------------------

@dataclass(frozen=True)
class PolygonChain:
    """Closed 2n-gon chain with exact rational vertices."""

    word: QuadraticWord
    z: tuple[complex, ...]
    j0: complex
    vertices_exact: tuple[Pt, ...]

    @property
    def vertices(self) -> np.ndarray:
        return np.array([complex(float(x), float(y)) for x, y in self.vertices_exact])

    def edge_vector_exact(self, j: int) -> Pt:
        m = len(self.vertices_exact)
        a = self.vertices_exact[j]
        b = self.vertices_exact[(j + 1) % m]
        return (b[0] - a[0], b[1] - a[1])


def build_chain(word: QuadraticWord, z, j0: complex = 0j) -> PolygonChain:
    z = tuple(complex(v) for v in z)
    if len(z) != word.n:
        raise ValidationError(f"need {word.n} side vectors, got {len(z)}")
    if any(v == 0 for v in z):
        raise ValidationError("zero side vector")
    j0 = complex(j0)
    zx = [Fraction(v.real) for v in z]
    zy = [Fraction(v.imag) for v in z]
    px, py = Fraction(j0.real), Fraction(j0.imag)
    verts = []
    for k, sgn in word.letters:
        verts.append((px, py))
        px += sgn * zx[k - 1]
        py += sgn * zy[k - 1]
    if (px, py) != verts[0]:
        raise AssertionError("chain failed to close")
    return PolygonChain(word=word, z=z, j0=j0, vertices_exact=tuple(verts))


def interior_angle(prev_pt: complex, corner: complex, next_pt: complex) -> float:
    """Angle on the left of the traversal at the corner, in (0, 2*pi)."""
    a = cmath.phase((prev_pt - corner) / (next_pt - corner)) % TWO_PI
    if a == 0.0:
        a = TWO_PI
    return a


@dataclass(frozen=True)
class TranslationFiber:
    """One polygon fiber with side pairing and cone angles per vertex class."""

    chain: PolygonChain
    pairing: dict  # letter k -> (side index of alpha_k, side index of hat-alpha_k, translation)
    cone_angles: tuple[float, ...]  # per vertex class of the glued surface
    class_members: tuple[tuple[int, ...], ...]  # disk vertex numbers (1-based)
    multiplicities: tuple[int, ...]
    embedded: bool
    orientation: int  # +1 ccw, -1 cw


def build_fiber(word: QuadraticWord, z, j0: complex = 0j, certificate=None) -> TranslationFiber:
    """Assemble the fiber and its cone angles.

    The chain must either be embedded (a simple polygon, either
    orientation) or come with an extension certificate supplying corner
    multiplicities; absent that, NeedsExtensionError is raised.  Corner
    angles are measured on the side of the disk, so clockwise chains use
    the complement angles.
    """
    chain = build_chain(word, z, j0)
    data = matrices(word)
    surf = glue(word)
    n = word.n
    m = 2 * n

    pairing = {}
    for k in range(1, n + 1):
        a = word.tau[2 * k - 2] - 1
        b = word.tau[2 * k - 1] - 1
        tz = sum(data.T[k - 1][l] * chain.z[l] for l in range(n))
        pairing[k] = (a, b, tz)

    verts = list(chain.vertices_exact)
    simple = is_simple_polygon(verts)
    mult = (1,) * m
    if simple:
        ccw = signed_area2(verts) > 0
        orientation = 1 if ccw else -1
    else:
        if certificate is None:
            raise NeedsExtensionError(
                "chain is not embedded; supply an extension certificate for cone angles"
            )
        mult = tuple(certificate.corner_multiplicities)
        if len(mult) != m:
            raise ValidationError("certificate multiplicities do not match the chain size")
        # the extension lives on the positively-turning traversal
        orientation = -1 if certificate.reversed_input else 1

    pts = chain.vertices
    angles = np.empty(m)
    for j in range(m):
        prev_pt = pts[(j - 1) % m]
        nxt_pt = pts[(j + 1) % m]
        if simple:
            ang = interior_angle(prev_pt, pts[j], nxt_pt)
            if orientation < 0:
                ang = TWO_PI - ang
        else:
            ang = interior_angle(prev_pt, pts[j], nxt_pt)
            if certificate.reversed_input:
                ang = TWO_PI - ang
        angles[j] = ang + TWO_PI * (mult[j] - 1)

    cone = [0.0] * surf.s
    for j in range(m):
        cone[surf.class_of[j]] += angles[j]
    return TranslationFiber(
        chain=chain,
        pairing=pairing,
        cone_angles=tuple(cone),
        class_members=surf.vertex_classes,
        multiplicities=mult,
        embedded=simple,
        orientation=orientation,
    )


def cone_angle_defect(fiber: TranslationFiber) -> float:
    """Largest distance of a class cone angle from a positive 2*pi multiple."""
    worst = 0.0
    for ang in fiber.cone_angles:
        k = max(1, round(ang / TWO_PI))
        worst = max(worst, abs(ang - k * TWO_PI))
    return worst


# -- discrete one-form machinery -------------------------------------------------

def curl_residual(u: np.ndarray, v: np.ndarray, hx: float, hy: float):
    """Max |d_y u + d_x v| over interior nodes and the full interior field.

    This is the closedness defect of the one-form u dxi1 - v dxi2 under
    central differences.
    """
    du_dy = (u[:, 2:] - u[:, :-2]) / (2 * hy)
    dv_dx = (v[2:, :] - v[:-2, :]) / (2 * hx)
    fld = du_dy[1:-1, :] + dv_dx[:, 1:-1]
    return float(np.max(np.abs(fld))) if fld.size else 0.0


def t_values(word: QuadraticWord, sample: GeometricSample) -> np.ndarray:
    """Pairing translations T_k(J(xi)) tabulated over the grid, shape (n, nx, ny)."""
    if sample.n != word.n:
        raise ValidationError(f"sample has {sample.n} components, word needs {word.n}")
    data = matrices(word)
    T = np.array(data.T, dtype=float)  # (n, n): row k = coefficients of T_k
    return np.einsum("kl,xyl->kxy", T, sample.J)


@dataclass(frozen=True)
class ExactnessReport:
    per_k_residual: tuple[float, ...]
    per_k_coarse_residual: tuple[float, ...] | None
    per_k_order: tuple[float | None, ...] | None
    residual: float
    order: float | None
    tol: float
    passed: bool


def check_exactness(word: QuadraticWord, sample: GeometricSample, tol: float = 1e-6) -> ExactnessReport:
    """Closedness of every Re(T_k(J(xi)) dxi) by discrete curl residuals.

    Also estimates a convergence order by repeating the residual on the
    every-second-node subgrid when the grid permits.
    """
    F = t_values(word, sample)
    hx, hy = sample.grid.hx, sample.grid.hy
    fine = tuple(curl_residual(F[k].real, F[k].imag, hx, hy) for k in range(word.n))
    coarse = None
    orders = None
    order = None
    try:
        sub = sample.subsample()
    except ValidationError:
        sub = None
    if sub is not None:
        Fc = t_values(word, sub)
        coarse = tuple(
            curl_residual(Fc[k].real, Fc[k].imag, sub.grid.hx, sub.grid.hy) for k in range(word.n)
        )
        orders = tuple(
            math.log2(c / f) if f > 1e-14 and c > 1e-14 else None for f, c in zip(fine, coarse)
        )
        lead = max(range(word.n), key=lambda k: fine[k])
        order = orders[lead]
    residual = max(fine) if fine else 0.0
    return ExactnessReport(
        per_k_residual=fine,
        per_k_coarse_residual=coarse,
        per_k_order=orders,
        residual=residual,
        order=order,
        tol=tol,
        passed=residual <= tol,
    )


def _cumtrapz(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    f = np.moveaxis(f, axis, 0)
    out = np.zeros_like(f)
    out[1:] = np.cumsum((f[:-1] + f[1:]) * (h / 2.0), axis=0)
    return np.moveaxis(out, 0, axis)


@dataclass(frozen=True)
class ActionData:
    I: np.ndarray  # (n, nx, ny), horizontal-then-vertical path values / 2*pi
    path_residual: float
    basepoint: tuple[int, int]


def action_integrals(
    word: QuadraticWord,
    sample: GeometricSample,
    basepoint: tuple[int, int] = (0, 0),
    tol: float = 1e-6,
) -> ActionData:
    """Primitives of Re(T_k(J) dxi)/(2*pi) along axis-aligned grid paths.

    Requires the exactness check to pass at the given tolerance.  The
    reported residual is the largest disagreement between the
    horizontal-then-vertical and vertical-then-horizontal paths.
    """
    report = check_exactness(word, sample, tol)
    if not report.passed:
        raise ValidationError(
            f"one-forms are not closed at tolerance {tol}: residual {report.residual}"
        )
    bi, bj = basepoint
    if not (0 <= bi < sample.grid.nx and 0 <= bj < sample.grid.ny):
        raise ValidationError("basepoint outside the grid")
    F = t_values(word, sample)
    ux = F.real  # x-integrand of Re(T dxi) = u dxi1 - v dxi2
    uy = -F.imag  # y-integrand
    hx, hy = sample.grid.hx, sample.grid.hy

    Ix = _cumtrapz(ux, hx, axis=1)  # integral along x from column 0
    Iy = _cumtrapz(uy, hy, axis=2)  # integral along y from row 0

    # horizontal first: along the basepoint row, then vertically
    hv = (Ix[:, :, bj] - Ix[:, bi, bj][:, None])[:, :, None] + (Iy - Iy[:, :, bj][:, :, None])
    # vertical first: along the basepoint column, then horizontally
    vh = (Iy[:, bi, :] - Iy[:, bi, bj][:, None])[:, None, :] + (Ix - Ix[:, bi, :][:, None, :])

    gap = np.max(np.abs(hv - vh)) if hv.size else 0.0
    return ActionData(I=hv / TWO_PI, path_residual=float(gap), basepoint=(bi, bj))


def _fd_gradient(I: np.ndarray, hx: float, hy: float):
    gx = (I[:, 2:, :] - I[:, :-2, :]) / (2 * hx)
    gy = (I[:, :, 2:] - I[:, :, :-2]) / (2 * hy)
    return gx[:, :, 1:-1], gy[:, 1:-1, :]


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    dI_residual: float
    K_residual: float
    offset_curl: float
    tol: float


def data_equivalent(
    d1: tuple[QuadraticWord, GeometricSample, ActionData],
    d2: tuple[QuadraticWord, GeometricSample, ActionData],
    tol: float = 1e-6,
) -> EquivalenceReport:
    """Same canonical fibration test: dI, K and closedness of the offset form.

    Compares finite-difference gradients of the action maps on the modes
    k <= 2g, the tail components K = (J_{2g+1}, ..., J_n) nodewise, and
    the discrete curl of Re((J0 - J0*) dxi).
    """
    w1, s1, a1 = d1
    w2, s2, a2 = d2
    if w1 != w2:
        raise ValidationError("data sets use different words")
    if s1.grid != s2.grid:
        raise ValidationError("data sets use different grids")
    g = glue(w1).g
    hx, hy = s1.grid.hx, s1.grid.hy

    if 2 * g:
        gx1, gy1 = _fd_gradient(a1.I[: 2 * g], hx, hy)
        gx2, gy2 = _fd_gradient(a2.I[: 2 * g], hx, hy)
        dI_res = max(
            float(np.max(np.abs(gx1 - gx2))) if gx1.size else 0.0,
            float(np.max(np.abs(gy1 - gy2))) if gy1.size else 0.0,
        )
    else:
        dI_res = 0.0

    if w1.n > 2 * g:
        K_res = float(np.max(np.abs(s1.J[:, :, 2 * g :] - s2.J[:, :, 2 * g :])))
    else:
        K_res = 0.0

    diff = s1.J0 - s2.J0
    curl = curl_residual(diff.real, diff.imag, hx, hy)

    return EquivalenceReport(
        equivalent=dI_res <= tol and K_res <= tol and curl <= tol,
        dI_residual=dI_res,
        K_residual=K_res,
        offset_curl=curl,
        tol=tol,
    )
