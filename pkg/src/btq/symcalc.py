"""Sparse polynomials in complex variables and their conjugates.

A PolySymbol stores terms keyed by a pair of multi-indices (alpha, beta):
alpha counts powers of z_1..z_n, beta counts powers of zbar_1..zbar_n.
Coefficients are exact CQ rationals whenever possible and fall back to
Python complex when floats are injected.  On top of the polynomial ring
this module provides the Wirtinger derivatives, the Laplacian
Delta = sum_j d^2/dz_j dzbar_j (no factor 4), matrix-valued polynomials,
symbols symmetric in the trailing variables, and the bidifferential
operators used by the semiclassical layer.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .exact import CQ, conj_scalar, is_exact_scalar, scalar_is_zero


def _add_coeff(a, b):
    return a + b


def _zeros(n):
    return (0,) * n


class PolySymbol:
    """Sparse polynomial in n complex variables and their conjugates."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = int(nvars)
        clean = {}
        if terms:
            for (alpha, beta), c in terms.items():
                if len(alpha) != self.nvars or len(beta) != self.nvars:
                    raise ValueError("multi-index length must equal nvars")
                if scalar_is_zero(c):
                    continue
                clean[(tuple(alpha), tuple(beta))] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(_zeros(nvars), _zeros(nvars)): value})

    @classmethod
    def one(cls, nvars):
        return cls.constant(nvars, CQ(1))

    @classmethod
    def variable(cls, nvars, i):
        alpha = [0] * nvars
        alpha[i] = 1
        return cls(nvars, {(tuple(alpha), _zeros(nvars)): CQ(1)})

    @classmethod
    def conj_variable(cls, nvars, i):
        beta = [0] * nvars
        beta[i] = 1
        return cls(nvars, {(_zeros(nvars), tuple(beta)): CQ(1)})

    @classmethod
    def monomial(cls, nvars, alpha, beta, coeff=CQ(1)):
        return cls(nvars, {(tuple(alpha), tuple(beta)): coeff})

    # -- basic predicates -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(a) + sum(b) for a, b in self.terms)

    def constant_term(self):
        return self.terms.get((_zeros(self.nvars), _zeros(self.nvars)), CQ(0))

    def __len__(self):
        return len(self.terms)

    # -- ring operations ---------------------------------------------------

    def _check_compatible(self, other):
        if self.nvars != other.nvars:
            raise ValueError("polynomials live over different variable sets")

    def __add__(self, other):
        if isinstance(other, PolySymbol):
            self._check_compatible(other)
            out = dict(self.terms)
            for key, c in other.terms.items():
                s = _add_coeff(out.get(key, CQ(0)), c)
                if scalar_is_zero(s):
                    out.pop(key, None)
                else:
                    out[key] = s
            return PolySymbol(self.nvars, out)
        return self + PolySymbol.constant(self.nvars, other)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, PolySymbol):
            return self + (-other)
        return self + PolySymbol.constant(self.nvars, -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolySymbol):
            if scalar_is_zero(other):
                return PolySymbol.zero(self.nvars)
            return PolySymbol(
                self.nvars, {k: c * other for k, c in self.terms.items()})
        self._check_compatible(other)
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)))
                s = _add_coeff(out.get(key, CQ(0)), c1 * c2)
                if scalar_is_zero(s):
                    out.pop(key, None)
                else:
                    out[key] = s
        return PolySymbol(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = PolySymbol.one(self.nvars)
        for _ in range(int(n)):
            out = out * self
        return out

    def conj(self) -> "PolySymbol":
        """Complex conjugation: swaps alpha and beta, conjugates coefficients."""
        return PolySymbol(
            self.nvars,
            {(b, a): conj_scalar(c) for (a, b), c in self.terms.items()})

    def map_coefficients(self, fn) -> "PolySymbol":
        return PolySymbol(self.nvars, {k: fn(c) for k, c in self.terms.items()})

    # -- calculus ---------------------------------------------------------

    def wirtinger(self, var: int, conjugate: bool = False) -> "PolySymbol":
        """Formal d/dz_var (or d/dzbar_var when conjugate=True)."""
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range")
        out = {}
        for (a, b), c in self.terms.items():
            exps = b if conjugate else a
            p = exps[var]
            if p == 0:
                continue
            lowered = list(exps)
            lowered[var] = p - 1
            key = (a, tuple(lowered)) if conjugate else (tuple(lowered), b)
            s = _add_coeff(out.get(key, CQ(0)), c * p)
            if scalar_is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
        return PolySymbol(self.nvars, out)

    def laplacian(self, variables=None, power: int = 1) -> "PolySymbol":
        """Delta^power over the given variable subset (default: all)."""
        if power < 0:
            raise ValueError("power must be >= 0")
        if variables is None:
            variables = range(self.nvars)
        variables = list(variables)
        for v in variables:
            if not 0 <= v < self.nvars:
                raise IndexError(f"variable index {v} out of range")
        out = self
        for _ in range(power):
            acc = PolySymbol.zero(self.nvars)
            for v in variables:
                acc = acc + out.wirtinger(v).wirtinger(v, conjugate=True)
            out = acc
        return out

    # -- substitution and evaluation --------------------------------------

    def eval(self, zs, zbars=None):
        """Evaluate at the point zs; zbars defaults to the conjugates.

        Passing an independent zbars implements the analytic continuation
        used by Gaussian functionals with non-conjugate critical points.
        """
        if zbars is None:
            zbars = [conj_scalar(z) for z in zs]
        total = CQ(0)
        for (a, b), c in self.terms.items():
            val = c
            for i, p in enumerate(a):
                for _ in range(p):
                    val = val * zs[i]
            for i, p in enumerate(b):
                for _ in range(p):
                    val = val * zbars[i]
            total = total + val
        return total

    def subs_zero(self, variables) -> "PolySymbol":
        """Set z_i = zbar_i = 0 for every i in variables."""
        kill = set(variables)
        out = {}
        for (a, b), c in self.terms.items():
            if any(a[i] or b[i] for i in kill):
                continue
            s = _add_coeff(out.get((a, b), CQ(0)), c)
            if not scalar_is_zero(s):
                out[(a, b)] = s
        return PolySymbol(self.nvars, out)

    def subs_affine(self, hol_shift, anti_shift=None) -> "PolySymbol":
        """Substitute z_i -> hol_shift[i] + z_i, zbar_i -> anti_shift[i] + zbar_i."""
        if anti_shift is None:
            anti_shift = [conj_scalar(s) for s in hol_shift]
        acc = {}
        for (a, b), c in self.terms.items():
            pieces = {((), ()): c}
            for i in range(self.nvars):
                pieces = _expand_var(pieces, a[i], b[i],
                                     hol_shift[i], anti_shift[i])
            for key, cc in pieces.items():
                s = _add_coeff(acc.get(key, CQ(0)), cc)
                if scalar_is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        return PolySymbol(self.nvars, acc)

    def subs_value(self, var: int, value, anti_value=None) -> "PolySymbol":
        """Substitute z_var = value (and zbar_var = its conjugate), returning
        a polynomial over the remaining nvars - 1 variables."""
        if anti_value is None:
            anti_value = conj_scalar(value)
        out = {}
        for (a, b), c in self.terms.items():
            factor = c
            for _ in range(a[var]):
                factor = factor * value
            for _ in range(b[var]):
                factor = factor * anti_value
            key = (a[:var] + a[var + 1:], b[:var] + b[var + 1:])
            s = _add_coeff(out.get(key, CQ(0)), factor)
            if scalar_is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
        return PolySymbol(self.nvars - 1, out)

    def embed(self, nvars: int, offset: int) -> "PolySymbol":
        """View this polynomial inside a larger variable space at offset."""
        if offset + self.nvars > nvars:
            raise ValueError("embedding does not fit")
        pad_l, pad_r = offset, nvars - offset - self.nvars
        out = {}
        for (a, b), c in self.terms.items():
            key = ((0,) * pad_l + a + (0,) * pad_r,
                   (0,) * pad_l + b + (0,) * pad_r)
            out[key] = c
        return PolySymbol(nvars, out)

    def collapse(self, var_map, nvars_out: int) -> "PolySymbol":
        """Rename variable i -> var_map[i] (None drops terms using i)."""
        out = {}
        for (a, b), c in self.terms.items():
            na, nb = [0] * nvars_out, [0] * nvars_out
            dead = False
            for i, (pa, pb) in enumerate(zip(a, b)):
                if pa == 0 and pb == 0:
                    continue
                target = var_map[i]
                if target is None:
                    dead = True
                    break
                na[target] += pa
                nb[target] += pb
            if dead:
                continue
            key = (tuple(na), tuple(nb))
            s = _add_coeff(out.get(key, CQ(0)), c)
            if scalar_is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
        return PolySymbol(nvars_out, out)

    def permute_variables(self, perm) -> "PolySymbol":
        """Apply z_i -> z_{perm[i]} simultaneously with the conjugates."""
        out = {}
        for (a, b), c in self.terms.items():
            na, nb = [0] * self.nvars, [0] * self.nvars
            for i in range(self.nvars):
                na[perm[i]] = a[i]
                nb[perm[i]] = b[i]
            out[(tuple(na), tuple(nb))] = c
        return PolySymbol(self.nvars, out)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def allclose(self, other, tol=1e-12) -> bool:
        diff = self - other
        return all(abs(complex(c)) <= tol for c in diff.terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def __repr__(self):
        if not self.terms:
            return "PolySymbol(0)"
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            mono = "".join(f"z{i}^{p}" for i, p in enumerate(a) if p)
            mono += "".join(f"~z{i}^{p}" for i, p in enumerate(b) if p)
            bits.append(f"({c!r}){mono or ''}")
        return "PolySymbol[" + " + ".join(bits) + "]"


def _expand_var(pieces, apow, bpow, shift, anti):
    """Binomially expand one variable (both exponents) of every piece."""
    hol_opts = _binomial_options(apow, shift)
    anti_opts = _binomial_options(bpow, anti)
    out = {}
    for (a, b), c in pieces.items():
        for p, fh in hol_opts:
            for q, fa in anti_opts:
                key = (a + (p,), b + (q,))
                factor = c * fh * fa
                s = out.get(key)
                out[key] = factor if s is None else s + factor
    return out


def _binomial_options(power, shift):
    """[(kept_power, binomial * shift^(power-kept)) ...] for one exponent."""
    if scalar_is_zero(shift):
        return [(power, CQ(1))]
    opts = []
    for p in range(power + 1):
        factor = CQ(math.comb(power, p))
        for _ in range(power - p):
            factor = factor * shift
        opts.append((p, factor))
    return opts


# ---------------------------------------------------------------------------
# module-level operator spellings
# ---------------------------------------------------------------------------


def wirtinger(p: PolySymbol, var: int, conjugate: bool = False) -> PolySymbol:
    return p.wirtinger(var, conjugate)


def laplacian(p, variables=None, power: int = 1):
    """Delta^power of a PolySymbol or (entrywise) of a MatrixPoly."""
    if isinstance(p, MatrixPoly):
        return p.map(lambda q: q.laplacian(variables, power))
    return p.laplacian(variables, power)


def cochain_C(r: int, f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """(1/r!) d^r f * dbar^r g for one-variable symbols."""
    if f.nvars != 1 or g.nvars != 1:
        raise ValueError("cochain_C expects one-variable symbols")
    df, dg = f, g
    for _ in range(r):
        df = df.wirtinger(0)
        dg = dg.wirtinger(0, conjugate=True)
    return (df * dg) * Fraction(1, math.factorial(r))


def poisson_reduced(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """df*dbar(g) - dg*dbar(f): the bracket stripped of its 2*pi/i factor."""
    return (f.wirtinger(0) * g.wirtinger(0, conjugate=True)
            - g.wirtinger(0) * f.wirtinger(0, conjugate=True))


def poisson_1d(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """{f,g} = (2*pi/i)(df*dbar(g) - dg*dbar(f)).

    The normalization is the one that makes C_1(f,g) - C_1(g,f) equal to
    (i/2*pi){f,g} identically.  The 2*pi factor forces float coefficients;
    use poisson_reduced for exact work.
    """
    factor = 2 * math.pi / 1j
    return poisson_reduced(f, g).map_coefficients(lambda c: complex(c) * factor)


# ---------------------------------------------------------------------------
# matrix-valued polynomials
# ---------------------------------------------------------------------------


class MatrixPoly:
    """Dense matrix of PolySymbols over a shared variable set."""

    __slots__ = ("n", "nvars", "entries")

    def __init__(self, entries):
        self.entries = [list(row) for row in entries]
        self.n = len(self.entries)
        if any(len(row) != self.n for row in self.entries):
            raise ValueError("matrix must be square")
        self.nvars = self.entries[0][0].nvars
        for row in self.entries:
            for p in row:
                if p.nvars != self.nvars:
                    raise ValueError("inconsistent variable counts")

    @classmethod
    def zero(cls, n, nvars):
        return cls([[PolySymbol.zero(nvars) for _ in range(n)] for _ in range(n)])

    @classmethod
    def identity(cls, n, nvars):
        return cls([[PolySymbol.one(nvars) if i == j else PolySymbol.zero(nvars)
                     for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n, p: PolySymbol):
        return cls([[p if i == j else PolySymbol.zero(p.nvars)
                     for j in range(n)] for i in range(n)])

    @classmethod
    def from_constant(cls, A, nvars):
        n = len(A)
        return cls([[PolySymbol.constant(nvars, A[i][j]) for j in range(n)]
                    for i in range(n)])

    @classmethod
    def matrix_variable(cls, n):
        """The tautological matrix Y with [Y]_{ij} = y_{ij}; vars flattened row-major."""
        nv = n * n
        return cls([[PolySymbol.variable(nv, i * n + j) for j in range(n)]
                    for i in range(n)])

    def map(self, fn) -> "MatrixPoly":
        return MatrixPoly([[fn(p) for p in row] for row in self.entries])

    def __add__(self, other):
        if isinstance(other, MatrixPoly):
            return MatrixPoly([[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.entries, other.entries)])
        return NotImplemented

    def __sub__(self, other):
        return self + other.map(lambda p: -p)

    def __mul__(self, other):
        if isinstance(other, (PolySymbol, int, float, complex, CQ, Fraction)):
            return self.map(lambda p: p * other)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        n, nv = self.n, self.nvars
        out = MatrixPoly.zero(n, nv)
        for i in range(n):
            for j in range(n):
                acc = PolySymbol.zero(nv)
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                out.entries[i][j] = acc
        return out

    def adjoint(self) -> "MatrixPoly":
        return MatrixPoly([[self.entries[j][i].conj() for j in range(self.n)]
                           for i in range(self.n)])

    def trace(self) -> PolySymbol:
        acc = PolySymbol.zero(self.nvars)
        for i in range(self.n):
            acc = acc + self.entries[i][i]
        return acc

    def eval(self, zs, zbars=None):
        return np.array([[complex(p.eval(zs, zbars)) for p in row]
                         for row in self.entries])

    def eval_exact(self, zs, zbars=None):
        return [[p.eval(zs, zbars) for p in row] for row in self.entries]

    def at_zero(self):
        nv = self.nvars
        return [[p.constant_term() for p in row] for row in self.entries]

    def is_zero(self):
        return all(p.is_zero() for row in self.entries for p in row)

    def allclose(self, other, tol=1e-12):
        return all(a.allclose(b, tol) for r1, r2 in zip(self.entries, other.entries)
                   for a, b in zip(r1, r2))

    def __eq__(self, other):
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        return f"MatrixPoly({self.n}x{self.n}, nvars={self.nvars})"


def matrix_unit(i: int, j: int, n: int) -> np.ndarray:
    """E_{ij} with [E_{ij}]_{ab} = delta_{ia} delta_{jb}."""
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def double_bracket(phi: MatrixPoly, psi: MatrixPoly) -> MatrixPoly:
    """(1/2) sum_{i,j,k} dphi/dybar_{ij} E_{ik} dpsi/dy_{kj}.

    Both arguments must be matrix polynomials over the same n x n entry
    variables, flattened row-major as in MatrixPoly.matrix_variable.  The
    1/2 weight matches the two-dimensional matrix domain where this
    bracket enters the order-h coefficient of the double transform.
    """
    if phi.n != psi.n or phi.nvars != psi.nvars:
        raise ValueError("shape mismatch")
    n = phi.n
    if phi.nvars != n * n:
        raise ValueError("entries must be polynomials in the n*n matrix variables")
    nv = phi.nvars
    out = MatrixPoly.zero(n, nv)
    half = Fraction(1, 2)
    for i in range(n):
        for j in range(n):
            dphi = phi.map(lambda p: p.wirtinger(i * n + j, conjugate=True))
            if dphi.is_zero():
                continue
            for k in range(n):
                dpsi = psi.map(lambda p: p.wirtinger(k * n + j))
                if dpsi.is_zero():
                    continue
                E = MatrixPoly.from_constant(
                    [[CQ(1) if (a == i and b == k) else CQ(0) for b in range(n)]
                     for a in range(n)], nv)
                out = out + (dphi @ E @ dpsi) * half
    return out


# ---------------------------------------------------------------------------
# symbols symmetric in the trailing variables
# ---------------------------------------------------------------------------


class SymmetricSymbol:
    """Polynomial f(d_1; d_2..d_N) symmetric under permutations of d_2..d_N."""

    __slots__ = ("base", "N")

    def __init__(self, base: PolySymbol, check: bool = True):
        self.base = base
        self.N = base.nvars
        if check and not self._is_symmetric():
            raise ValueError("not symmetric in the trailing variables")

    def _is_symmetric(self) -> bool:
        for i in range(1, self.N - 1):
            perm = list(range(self.N))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.base.permute_variables(perm) != self.base:
                return False
        return True

    @classmethod
    def symmetrize(cls, p: PolySymbol) -> "SymmetricSymbol":
        """Average p over all permutations of variables 2..N."""
        N = p.nvars
        if N <= 2:
            return cls(p, check=False)
        acc = PolySymbol.zero(N)
        perms = list(itertools.permutations(range(1, N)))
        for sigma in perms:
            perm = [0] + list(sigma)
            acc = acc + p.permute_variables(perm)
        return cls(acc * Fraction(1, len(perms)), check=False)

    @classmethod
    def spectral(cls, u: PolySymbol, N: int) -> "SymmetricSymbol":
        """Lift a one-variable symbol to f(d_1;...) = u(d_1)."""
        if u.nvars != 1:
            raise ValueError("spectral lift expects a one-variable symbol")
        return cls(u.embed(N, 0), check=False)

    def is_spectral(self) -> bool:
        return all(all(p == 0 for p in a[1:]) and all(p == 0 for p in b[1:])
                   for a, b in self.base.terms)

    def degree(self) -> int:
        return self.base.degree()

    def __add__(self, other):
        if isinstance(other, SymmetricSymbol):
            return SymmetricSymbol(self.base + other.base, check=False)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, SymmetricSymbol):
            return SymmetricSymbol(self.base * other.base, check=False)
        return SymmetricSymbol(self.base * other, check=False)

    __rmul__ = __mul__

    def laplacian(self, power: int = 1) -> "SymmetricSymbol":
        return SymmetricSymbol(self.base.laplacian(power=power), check=False)

    def laplacian_tail(self, power: int = 1) -> "SymmetricSymbol":
        """Delta' = Laplacian in the trailing N-1 variables only."""
        return SymmetricSymbol(
            self.base.laplacian(range(1, self.N), power), check=False)

    def flat(self) -> PolySymbol:
        """f_flat(z) = f(z; 0, ..., 0) as a one-variable polynomial."""
        killed = self.base.subs_zero(range(1, self.N))
        return killed.collapse([0] + [None] * (self.N - 1), 1)

    def sharp_eval(self, U: np.ndarray, D, tol: float = 1e-10) -> np.ndarray:
        """U diag_j f(d_j; d_1,..,^d_j,..,d_N) U* for unitary U, diagonal D."""
        U = np.asarray(U, dtype=complex)
        if unitarity_defect(U) > tol:
            raise ValueError("U is not unitary within tolerance")
        d = np.asarray(D, dtype=complex).reshape(-1)
        if d.shape[0] != self.N:
            raise ValueError("diagonal length must equal N")
        vals = []
        for j in range(self.N):
            point = [d[j]] + [d[i] for i in range(self.N) if i != j]
            vals.append(complex(self.base.eval(point)))
        return U @ np.diag(vals) @ U.conj().T

    def __eq__(self, other):
        if not isinstance(other, SymmetricSymbol):
            return NotImplemented
        return self.base == other.base

    def __repr__(self):
        return f"SymmetricSymbol(N={self.N}, deg={self.degree()})"


def unitarity_defect(U: np.ndarray) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))


def flat(f: SymmetricSymbol) -> PolySymbol:
    return f.flat()


def sharp_eval(f: SymmetricSymbol, U, D, tol: float = 1e-10) -> np.ndarray:
    return f.sharp_eval(U, D, tol)


def m_operator(r: int, m: int, q: int, f: SymmetricSymbol,
               g: SymmetricSymbol) -> PolySymbol:
    """(Delta_(d) + Delta_(e) + d^2/dd_m debar_q)^r applied to f(d) g(e).

    Indices m, q are 1-based.  The result is a polynomial in 2N variables,
    d = vars 0..N-1 and e = vars N..2N-1.
    """
    if r < 0:
        raise ValueError("order must be >= 0")
    N = f.N
    if g.N != N:
        raise ValueError("both symbols must share the dimension N")
    if not (1 <= m <= N and 1 <= q <= N):
        raise ValueError("indices m, q must lie in 1..N")
    F = f.base.embed(2 * N, 0) * g.base.embed(2 * N, N)
    for _ in range(r):
        F = (F.laplacian(range(N)) + F.laplacian(range(N, 2 * N))
             + F.wirtinger(m - 1).wirtinger(N + q - 1, conjugate=True))
    return F


def restrict_pair_diagonal(p: PolySymbol, N: int) -> PolySymbol:
    """Restrict a polynomial in (d, e) to d = e = (z, 0, ..., 0)."""
    if p.nvars != 2 * N:
        raise ValueError("expected a polynomial in 2N variables")
    var_map = [None] * (2 * N)
    var_map[0] = 0
    var_map[N] = 0
    keep = p.subs_zero([i for i in range(2 * N) if i not in (0, N)])
    return keep.collapse(var_map, 1)
