"""Exact complex-rational scalars.

CQ is a complex number with Fraction real and imaginary parts.  Arithmetic
between CQ, int and Fraction stays exact; any operation touching a float or
a complex silently falls back to Python complex, which is the intended
behaviour for experiments that inject floating-point data.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral

_EXACT = (Integral, Fraction)


class CQ:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- constructors -------------------------------------------------

    @staticmethod
    def i():
        return CQ(0, 1)

    @staticmethod
    def coerce(value) -> "CQ":
        if isinstance(value, CQ):
            return value
        if isinstance(value, _EXACT):
            return CQ(value)
        raise TypeError(f"cannot coerce {value!r} to CQ exactly")

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, CQ):
            return CQ(self.re + other.re, self.im + other.im)
        if isinstance(other, _EXACT):
            return CQ(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other if isinstance(other, CQ) else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CQ):
            return CQ(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)
        if isinstance(other, _EXACT):
            return CQ(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _EXACT):
            return CQ(self.re / other, self.im / other)
        if isinstance(other, CQ):
            den = other.re * other.re + other.im * other.im
            if not den:
                raise ZeroDivisionError("division by zero CQ")
            num = self * other.conjugate()
            return CQ(num.re / den, num.im / den)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (CQ, *_EXACT)):
            return CQ.coerce(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, Integral) or n < 0:
            raise ValueError("CQ powers must be nonnegative integers")
        out = CQ(1)
        base = self
        n = int(n)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "CQ":
        return CQ(self.re, -self.im)

    # -- conversions & comparisons -----------------------------------

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __eq__(self, other):
        if isinstance(other, CQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _EXACT):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return f"CQ({self.re})"
        return f"CQ({self.re}, {self.im})"


def conj_scalar(c):
    """Conjugate for any supported coefficient type."""
    if isinstance(c, CQ):
        return c.conjugate()
    if isinstance(c, _EXACT):
        return c
    return c.conjugate() if hasattr(c, "conjugate") else complex(c).conjugate()


def is_exact_scalar(c) -> bool:
    return isinstance(c, (CQ, *_EXACT))


def scalar_is_zero(c) -> bool:
    if isinstance(c, CQ):
        return c.is_zero()
    return c == 0
