"""Scalar arithmetic for the two tensor modes.

Tensors carry entries either as machine complex numbers ("float" mode)
or as exact complex rationals ("rational" mode).  The rational mode
exists so that sign decisions on traces never depend on rounding; its
entries are :class:`RationalComplex` values, pairs of arbitrary
precision :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

_ZERO = Fraction(0)


class RationalComplex:
    """Exact complex number with rational real and imaginary parts.

    Supports mixed arithmetic with ints and Fractions.  Multiplication
    keeps a fast path for purely real operands because long products of
    real matrices dominate the exact-mode workload.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("RationalComplex is immutable")

    # -- arithmetic -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, RationalComplex):
            return RationalComplex(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return RationalComplex(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RationalComplex):
            return RationalComplex(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return RationalComplex(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalComplex(other - self.re, -self.im)
        return NotImplemented

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, RationalComplex):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return RationalComplex(a * c, _ZERO)
            return RationalComplex(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return RationalComplex(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return RationalComplex(self.re / other, self.im / other)
        if isinstance(other, RationalComplex):
            n = other.abs2()
            if not n:
                raise ZeroDivisionError("division by zero")
            return (self * other.conjugate()) / n
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalComplex(other) / self
        return NotImplemented

    # -- structure --------------------------------------------------

    def conjugate(self) -> "RationalComplex":
        return RationalComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return not self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if not self.im:
            return f"qc({self.re})"
        return f"qc({self.re}, {self.im})"


QC_ZERO = RationalComplex(0)
QC_ONE = RationalComplex(1)


def qc(re=0, im=0) -> RationalComplex:
    """Shorthand constructor: ``qc(1, 2)`` is ``1 + 2i`` exactly."""
    return RationalComplex(re, im)


def to_rational_complex(x) -> RationalComplex:
    """Coerce an int, Fraction, float, complex or pair into an exact scalar.

    Floats convert exactly (every float is a dyadic rational), which is
    what mode conversion of a tensor relies on.
    """
    if isinstance(x, RationalComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalComplex(x)
    if isinstance(x, float):
        return RationalComplex(Fraction(x))
    if isinstance(x, complex):
        return RationalComplex(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, tuple) and len(x) == 2:
        return RationalComplex(Fraction(x[0]), Fraction(x[1]))
    raise TypeError(f"cannot interpret {x!r} as an exact complex scalar")
