"""Polynomials in the semiclassical parameter h.

Coefficients may be scalars (CQ/complex), PolySymbols, or matrices
(numpy arrays, possibly object arrays of exact scalars).  All series in
this package terminate for polynomial symbols, so HPolynomial is a plain
finite list indexed by the power of h, with trailing zeros trimmed.
"""

from __future__ import annotations

import numpy as np

from .exact import CQ, scalar_is_zero


def coeff_is_zero(c) -> bool:
    if c is None:
        return True
    if isinstance(c, np.ndarray):
        return all(coeff_is_zero(x) for x in c.reshape(-1)) if c.dtype == object \
            else not np.any(c)
    if hasattr(c, "is_zero"):
        z = c.is_zero
        return z() if callable(z) else bool(z)
    return c == 0


def coeff_close(a, b, tol) -> bool:
    """Approximate equality across the supported coefficient kinds."""
    if a is None or b is None:
        return coeff_is_zero(a if b is None else b)
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        A = np.asarray([[complex(x) for x in row] for row in a]) \
            if getattr(a, "dtype", None) == object else np.asarray(a, dtype=complex)
        B = np.asarray([[complex(x) for x in row] for row in b]) \
            if getattr(b, "dtype", None) == object else np.asarray(b, dtype=complex)
        return bool(np.max(np.abs(A - B)) <= tol) if A.size else True
    if hasattr(a, "allclose"):
        return a.allclose(b, tol)
    return abs(complex(a) - complex(b)) <= tol


class HPolynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and coeff_is_zero(cs[-1]):
            cs.pop()
        self.coeffs = cs

    @classmethod
    def zero(cls):
        return cls([])

    @classmethod
    def monomial(cls, power: int, coeff):
        return cls([None] * power + [coeff]) if power else cls([coeff])

    def coeff(self, p: int):
        if p < len(self.coeffs) and self.coeffs[p] is not None:
            return self.coeffs[p]
        return None

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _pairwise(self, other, fn):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for p in range(n):
            a = self.coeff(p)
            b = other.coeff(p)
            if a is None:
                out.append(fn(None, b))
            elif b is None:
                out.append(a)
            else:
                out.append(fn(a, b))
        return HPolynomial(out)

    def __add__(self, other):
        if not isinstance(other, HPolynomial):
            return NotImplemented
        return self._pairwise(other, lambda a, b: b if a is None else a + b)

    def __sub__(self, other):
        if not isinstance(other, HPolynomial):
            return NotImplemented
        return self._pairwise(
            other, lambda a, b: _negate(b) if a is None else a - b)

    def __mul__(self, other):
        if isinstance(other, HPolynomial):
            out = [None] * (len(self.coeffs) + len(other.coeffs))
            for i, a in enumerate(self.coeffs):
                if a is None or coeff_is_zero(a):
                    continue
                for j, b in enumerate(other.coeffs):
                    if b is None or coeff_is_zero(b):
                        continue
                    prod = a * b
                    cur = out[i + j]
                    out[i + j] = prod if cur is None else cur + prod
            return HPolynomial(out)
        return HPolynomial(
            None if c is None else c * other for c in self.coeffs)

    __rmul__ = __mul__

    def shift(self, power: int) -> "HPolynomial":
        """Multiply by h^power."""
        return HPolynomial([None] * power + list(self.coeffs))

    def map(self, fn) -> "HPolynomial":
        return HPolynomial(None if c is None else fn(c) for c in self.coeffs)

    def eval(self, h):
        """Evaluate at a numeric h (exact if h and coefficients are exact)."""
        total = None
        hp = 1
        for c in self.coeffs:
            if c is not None and not coeff_is_zero(c):
                term = c * hp
                total = term if total is None else total + term
            hp = hp * h
        return total

    def allclose(self, other, tol=0.0) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        return all(coeff_close(self.coeff(p), other.coeff(p), tol)
                   for p in range(n))

    def __eq__(self, other):
        if not isinstance(other, HPolynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        for p in range(n):
            a, b = self.coeff(p), other.coeff(p)
            if a is None or b is None:
                if coeff_is_zero(a) and coeff_is_zero(b):
                    continue
                return False
            eq = (a == b)
            if isinstance(eq, np.ndarray):
                eq = bool(np.all(eq))
            if not eq:
                return False
        return True

    def __repr__(self):
        return f"HPolynomial(deg={self.degree()}, {self.coeffs!r})"


def _negate(c):
    if c is None:
        return None
    return -c


def from_power_dict(d: dict) -> HPolynomial:
    if not d:
        return HPolynomial.zero()
    top = max(d)
    coeffs = [None] * (top + 1)
    for p, v in d.items():
        coeffs[p] = v
    return HPolynomial(coeffs)
