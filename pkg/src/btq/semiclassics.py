"""Semiclassical expansion coefficients and the truncated star product.

For polynomial symbols every expansion here terminates, so all identities
are exact polynomial identities in h:

  * l_r f = (1/r!) (Delta^r f)_flat reproduces the exact heat transform;
  * m_r(f, g) are the composition coefficients: the coupled-Gaussian
    transform of T_{f#} T_{g#} equals sum_r h^r m_r(f,g)# identically;
  * g_r solves m_r = sum_n Delta^n g_{r-n} / n! recursively, giving the
    unique spectral expansion of the product transform;
  * the star product f * g = sum_r h^r g_r(f, g).

Orientation of the mixed coupling.  Completing the square in the coupled
kernel integral pairs the antiholomorphic derivative of the first symbol
with the holomorphic derivative of the second: the cross term in m_1 is
(df/ddbar_1)(dg/de_1), not its mirror image.  The mirrored operator (the
form familiar from displayed cochain formulas) fails the exact operator
oracle T_{zbar#} T_{z#} = T_{|z|^2 #}; consequently, for spectral pairs
the recursion returns (-1)^r C_r(v, w) rather than C_r(v, w), and the
closed form below carries the matching (-1)^r.  See the comparison
helpers at the bottom.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exact import CQ
from .hseries import HPolynomial, from_power_dict
from .randmat import GaussianSpec, wick_moment_series
from .symcalc import (MatrixPoly, PolySymbol, SymmetricSymbol, cochain_C,
                      m_operator, restrict_pair_diagonal)

__all__ = [
    "l_r", "m_r", "full_order", "g_sequence", "g_sequence_closed_form",
    "scalar_heat_expansion", "scalar_heat_series", "heat_of_gsequence",
    "star_product", "star_on_series", "star_associativity_defect",
    "expansion_at_zero_direct", "expansion_at_zero_orbit",
]


def l_r(f: SymmetricSymbol, r: int) -> PolySymbol:
    """(1/r!) (Delta^r f)(z; 0, ..., 0)."""
    if r < 0:
        raise ValueError("order must be >= 0")
    return f.laplacian(power=r).flat() * Fraction(1, math.factorial(r))


def m_r(f: SymmetricSymbol, g: SymmetricSymbol, r: int) -> PolySymbol:
    """r-th composition coefficient of T_{f#} T_{g#}, restricted to the
    diagonal d = e = (z, 0, .., 0).

    Realized through the general coupled operator with the arguments in
    the order that matches the kernel-chain orientation (the coupling
    differentiates f antiholomorphically and g holomorphically).
    """
    raw = m_operator(r, 1, 1, g, f)
    swapped = _swap_blocks(raw, f.N)
    return restrict_pair_diagonal(swapped, f.N) * Fraction(1, math.factorial(r))


def _swap_blocks(p: PolySymbol, N: int) -> PolySymbol:
    """Exchange the d-block and e-block of a polynomial in 2N variables."""
    perm = list(range(N, 2 * N)) + list(range(N))
    return p.permute_variables(perm)


def full_order(f: SymmetricSymbol, g: SymmetricSymbol) -> int:
    """All m_r and g_r vanish beyond (deg f + deg g) // 2."""
    return (f.degree() + g.degree()) // 2


def g_sequence(f: SymmetricSymbol, g: SymmetricSymbol, R=None) -> list:
    """g_r = m_r - sum_{n=1}^{r} Delta^n g_{r-n} / n!, r = 0..R.

    With R=None the entire (terminating) sequence is returned.
    """
    if R is None:
        R = full_order(f, g)
    out = []
    for r in range(R + 1):
        gr = m_r(f, g, r)
        for n in range(1, r + 1):
            gr = gr - out[r - n].laplacian(power=n) * Fraction(1, math.factorial(n))
        out.append(gr)
    return out


def g_sequence_closed_form(f: SymmetricSymbol, g: SymmetricSymbol, R=None) -> list:
    """g_m = sum_{j+k+r=m} (-1)^r/(j! k! r!) d^r(Delta'^j f)_flat
    * dbar^r(Delta'^k g)_flat.

    The (-1)^r is forced by the exact operator oracle (see module note);
    term by term this equals the recursion output.
    """
    if R is None:
        R = full_order(f, g)
    fparts = _tail_laplacians(f, R)
    gparts = _tail_laplacians(g, R)
    out = []
    for m in range(R + 1):
        acc = PolySymbol.zero(1)
        for j in range(m + 1):
            for k in range(m - j + 1):
                r = m - j - k
                if j >= len(fparts) or k >= len(gparts):
                    continue
                a = fparts[j]
                b = gparts[k]
                for _ in range(r):
                    a = a.wirtinger(0)
                if a.is_zero():
                    continue
                for _ in range(r):
                    b = b.wirtinger(0, conjugate=True)
                if b.is_zero():
                    continue
                sign = -1 if r % 2 else 1
                w = Fraction(sign, math.factorial(j) * math.factorial(k)
                             * math.factorial(r))
                acc = acc + (a * b) * w
        out.append(acc)
    return out


def _tail_laplacians(f: SymmetricSymbol, R: int) -> list:
    """[(Delta'^j f)_flat for j = 0..] until the tail Laplacian dies."""
    parts = []
    cur = f
    for _ in range(R + 1):
        parts.append(cur.flat())
        cur = cur.laplacian_tail()
        if cur.base.is_zero():
            break
    return parts


# ---------------------------------------------------------------------------
# scalar heat expansion
# ---------------------------------------------------------------------------


def scalar_heat_series(phi: PolySymbol) -> HPolynomial:
    """sum_j h^j Delta^j phi / j! as an HPolynomial of one-variable symbols."""
    if phi.nvars != 1:
        raise ValueError("expected a one-variable symbol")
    out = {}
    cur = phi
    j = 0
    while not cur.is_zero():
        out[j] = cur * Fraction(1, math.factorial(j)) if j else cur
        cur = cur.laplacian()
        j += 1
    return from_power_dict(out)


def scalar_heat_expansion(phi: PolySymbol, x) -> HPolynomial:
    """The heat series evaluated at the point x: an HPolynomial of scalars.

    Equals the Gaussian convolution E[phi(x + w)] with variance-h noise,
    exactly, since the series terminates for polynomials.
    """
    series = scalar_heat_series(phi)
    return HPolynomial([None if c is None else c.eval([x]) for c in series.coeffs])


def heat_of_gsequence(gs: list) -> HPolynomial:
    """sum_m h^m (heat series of g_m), flattened to one HPolynomial of
    one-variable symbols; this is the reconstruction of the product
    transform from its spectral expansion."""
    total = HPolynomial.zero()
    for m, gm in enumerate(gs):
        total = total + scalar_heat_series(gm).shift(m)
    return total


# ---------------------------------------------------------------------------
# star product
# ---------------------------------------------------------------------------


def star_product(f: SymmetricSymbol, g: SymmetricSymbol, R=None) -> HPolynomial:
    """f * g = sum_r h^r g_r(f, g), truncated at order R (full if None)."""
    return HPolynomial(g_sequence(f, g, R))


def star_on_series(a: HPolynomial, b: HPolynomial, N: int, R: int) -> HPolynomial:
    """Extend the star product C[[h]]-bilinearly to series of one-variable
    symbols, truncating at order R."""
    out = {}
    for i, ai in enumerate(a.coeffs):
        if ai is None or i > R:
            continue
        fa = SymmetricSymbol.spectral(ai, N)
        for j, bj in enumerate(b.coeffs):
            if bj is None or i + j > R:
                continue
            gb = SymmetricSymbol.spectral(bj, N)
            prod = g_sequence(fa, gb, R - i - j)
            for r, gr in enumerate(prod):
                key = i + j + r
                if key > R or gr.is_zero():
                    continue
                cur = out.get(key)
                out[key] = gr if cur is None else cur + gr
    return from_power_dict(out)


def star_associativity_defect(f: SymmetricSymbol, g: SymmetricSymbol,
                              k: SymmetricSymbol, R: int = 2) -> HPolynomial:
    """(f*g)*k - f*(g*k) through order R; vanishes identically."""
    N = f.N
    fg = star_product(f, g, R)
    gk = star_product(g, k, R)
    left = _star_series_with_symbol(fg, k, N, R, symbol_first=False)
    right = _star_series_with_symbol(gk, f, N, R, symbol_first=True)
    return left - right


def _star_series_with_symbol(series: HPolynomial, sym: SymmetricSymbol,
                             N: int, R: int, symbol_first: bool) -> HPolynomial:
    out = {}
    for i, ci in enumerate(series.coeffs):
        if ci is None or i > R:
            continue
        spectral = SymmetricSymbol.spectral(ci, N)
        pair = (sym, spectral) if symbol_first else (spectral, sym)
        for r, gr in enumerate(g_sequence(pair[0], pair[1], R - i)):
            key = i + r
            if key > R or gr.is_zero():
                continue
            cur = out.get(key)
            out[key] = gr if cur is None else cur + gr
    return from_power_dict(out)


# ---------------------------------------------------------------------------
# the two inequivalent zero-point expansions
# ---------------------------------------------------------------------------


def expansion_at_zero_direct(f: SymmetricSymbol, R: int) -> list:
    """Coefficients (1/r!)(Delta^r f)(0;0..0), r = 0..R: the expansion of
    the exact transform at a zero eigenvalue."""
    out = []
    for r in range(R + 1):
        out.append(l_r(f, r).eval([CQ(0)]))
    return out


def expansion_at_zero_orbit(f: SymmetricSymbol, R: int) -> list:
    """Coefficients obtained by instead specializing the orbit formula for
    nonzero coinciding eigenvalues to zero: (1/r!) Delta^r of
    (f + sum of its slot rotations)(0) / (N+1), on the diagonal.

    Differs from expansion_at_zero_direct in general: the two formulas do
    not glue at the zero eigenvalue, and the direct one is the exact
    limit.  Reported side by side by the experiments.
    """
    N = f.N
    total = f.base
    for l in range(1, N):
        # rotation placing slot l first: f(d_l; d_others)
        perm = _slot_rotation(N, l)
        total = total + f.base.permute_variables(perm)
    out = []
    cur = total
    for r in range(R + 1):
        val = cur.eval([CQ(0)] * N) * Fraction(1, math.factorial(r) * (N + 1))
        out.append(val)
        cur = cur.laplacian()
    return out


def _slot_rotation(N: int, l: int) -> list:
    """Permutation sending variable l to slot 0 and keeping the rest."""
    order = [l] + [i for i in range(N) if i != l]
    perm = [0] * N
    for new_pos, old in enumerate(order):
        perm[old] = new_pos
    return perm
