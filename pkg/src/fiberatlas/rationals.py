"""Exact arithmetic over the Gaussian rationals Q(i) and polynomials above it.

Floats convert exactly (every IEEE double is a rational), so the exact
layer can also serve inputs that were produced numerically.
"""

from __future__ import annotations

from fractions import Fraction


class QI:
    """A Gaussian rational re + im*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def from_complex(cls, z) -> "QI":
        if isinstance(z, QI):
            return z
        if isinstance(z, complex):
            return cls(Fraction(z.real), Fraction(z.imag))
        return cls(Fraction(z))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = QI.from_complex(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, o):
        o = QI.from_complex(o)
        return QI(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = QI.from_complex(o)
        return QI(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __mul__(self, o):
        o = QI.from_complex(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        o = QI.from_complex(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QI((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, o):
        return QI.from_complex(o) - self

    def conj(self):
        return QI(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"QI({self.re}, {self.im})"


QI_ZERO = QI(0)
QI_ONE = QI(1)


def _trim(cs):
    while cs and not cs[-1]:
        cs.pop()
    return cs


class QIPoly:
    """Univariate polynomial over Q(i), coefficients in increasing degree."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        self.c = _trim([QI.from_complex(x) for x in coeffs])

    @property
    def degree(self) -> int:
        return len(self.c) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        return isinstance(other, QIPoly) and self.c == other.c

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        a = self.c + [QI_ZERO] * (n - len(self.c))
        b = o.c + [QI_ZERO] * (n - len(o.c))
        return QIPoly([x + y for x, y in zip(a, b)])

    def __sub__(self, o):
        n = max(len(self.c), len(o.c))
        a = self.c + [QI_ZERO] * (n - len(self.c))
        b = o.c + [QI_ZERO] * (n - len(o.c))
        return QIPoly([x - y for x, y in zip(a, b)])

    def __neg__(self):
        return QIPoly([-x for x in self.c])

    def __mul__(self, o):
        if not isinstance(o, QIPoly):
            return QIPoly([x * QI.from_complex(o) for x in self.c])
        if self.is_zero() or o.is_zero():
            return QIPoly()
        out = [QI_ZERO] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if b:
                    out[i + j] = out[i + j] + a * b
        return QIPoly(out)

    def scale(self, q: QI) -> "QIPoly":
        return QIPoly([x * q for x in self.c])

    def divmod(self, o: "QIPoly"):
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        q = [QI_ZERO] * max(0, len(rem) - len(o.c) + 1)
        dlead = o.c[-1]
        while len(rem) >= len(o.c):
            f = rem[-1] / dlead
            k = len(rem) - len(o.c)
            q[k] = f
            for j, b in enumerate(o.c):
                rem[k + j] = rem[k + j] - f * b
            rem = _trim(rem)
            if not rem:
                break
        return QIPoly(q), QIPoly(rem)

    def divexact(self, o: "QIPoly") -> "QIPoly":
        q, r = self.divmod(o)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def deriv(self) -> "QIPoly":
        return QIPoly([c * QI(k) for k, c in enumerate(self.c)][1:])

    def monic(self) -> "QIPoly":
        if self.is_zero():
            return self
        lead = self.c[-1]
        return QIPoly([x / lead for x in self.c])

    def shift_valuation(self):
        """Return (u-adic valuation, polynomial with the factor u^v removed)."""
        v = 0
        while v < len(self.c) and not self.c[v]:
            v += 1
        return v, QIPoly(self.c[v:])

    def eval_qi(self, x: QI) -> QI:
        acc = QI_ZERO
        for c in reversed(self.c):
            acc = acc * x + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.c):
            acc = acc * z + c.to_complex()
        return acc

    def to_complex_coeffs(self):
        """Coefficients in decreasing degree, as used by numpy.roots."""
        return [c.to_complex() for c in reversed(self.c)] or [0j]

    def __repr__(self):
        return f"QIPoly({self.c!r})"


def poly_gcd(a: QIPoly, b: QIPoly) -> QIPoly:
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


def is_squarefree(p: QIPoly) -> bool:
    if p.degree <= 1:
        return True
    return poly_gcd(p, p.deriv()).degree <= 0


def sylvester_resultant(fw, gw):
    """Resultant of two polynomials in w whose coefficients are QIPoly in z.

    ``fw``/``gw`` are lists of QIPoly (increasing w-degree).  Returns a
    QIPoly in z.  Uses fraction-free (Bareiss) elimination so every
    intermediate division is exact.
    """
    fw = list(fw)
    gw = list(gw)
    while fw and fw[-1].is_zero():
        fw.pop()
    while gw and gw[-1].is_zero():
        gw.pop()
    m = len(fw) - 1
    n = len(gw) - 1
    if m < 0 or n < 0:
        return QIPoly()
    if m == 0 and n == 0:
        return QIPoly([QI_ONE])
    size = m + n
    if size == 0:
        return QIPoly([QI_ONE])
    zero = QIPoly()
    rows = []
    frow = list(reversed(fw))
    grow = list(reversed(gw))
    for i in range(n):
        rows.append([zero] * i + frow + [zero] * (size - i - m - 1))
    for i in range(m):
        rows.append([zero] * i + grow + [zero] * (size - i - n - 1))
    # Bareiss determinant
    sign = 1
    prev = QIPoly([QI_ONE])
    for k in range(size - 1):
        if rows[k][k].is_zero():
            for r in range(k + 1, size):
                if not rows[r][k].is_zero():
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return QIPoly()
        piv = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = rows[i][j] * piv - rows[i][k] * rows[k][j]
                rows[i][j] = num.divexact(prev)
            rows[i][k] = zero
        prev = piv
    det = rows[size - 1][size - 1]
    if sign < 0:
        det = -det
    return det
