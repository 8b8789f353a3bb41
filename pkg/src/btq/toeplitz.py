"""Truncated Toeplitz operators and exact Berezin transforms.

Operators are represented in the orthonormal basis Z^k chi_j / sqrt(coef_k
h^k) truncated at degree K, giving matrices of size N(K+1).  The Berezin
transform of a truncated operator is assembled from coherent vectors and
normalized by the inverse square root of the truncated K(X, X).

On the normal-matrix domain, U-invariant symbols admit exact transforms:
the frame integral collapses by Schur orthogonality and what remains is a
Gaussian (or coupled-Gaussian) moment centered at each eigenvalue, which
the Wick engine evaluates as a terminating polynomial in h.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np

from .exact import CQ, conj_scalar, is_exact_scalar, scalar_is_zero
from .hseries import HPolynomial, from_power_dict
from .kernels import c_k_formula
from .randmat import GaussianSpec, wick_moment, wick_moment_series
from .symcalc import MatrixPoly, PolySymbol, SymmetricSymbol

__all__ = [
    "basis_size", "gauss_moment_1d", "scalar_toeplitz",
    "p_h_projection", "p_h_projection_series",
    "toeplitz_u_invariant", "lift_u_invariant",
    "coherent_matrix", "berezin_of_operator", "truncation_adequate",
    "multiplication_operator",
    "berezin_heat_exact", "berezin_product_exact", "chain_berezin_exact",
    "assemble_matrix_series", "berezin_full_domain",
    "berezin_full_domain_product", "lemma43_exact", "normal_spectral",
    "norm_example_eigenvalues",
]


def basis_size(N: int, K: int) -> int:
    return N * (K + 1)


def _domain_coefficient(domain: str, k: int, N: int) -> int:
    if domain == "normal":
        return math.factorial(k)
    if domain == "full":
        return c_k_formula(N, k)
    raise ValueError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# scalar (one-variable) Toeplitz matrices
# ---------------------------------------------------------------------------


def gauss_moment_1d(p: int, q: int, h, s=0):
    """integral of z^p zbar^q e^{-s|z|^2} d mu_h(z); exact for exact h, s."""
    if p != q:
        return CQ(0) if is_exact_scalar(h) else 0.0
    tau = h / (1 + s * h) if s else h
    val = math.factorial(p) * tau ** (p + 1) / h
    return val


def scalar_toeplitz(symbol: PolySymbol, h, K: int, gauss_s=0):
    """Matrix of T_phi on span{z^k, k <= K} for phi = symbol * e^{-s|z|^2}.

    Entries [l, k] = <phi z^k, z^l> / sqrt(k! l! h^{k+l}).  When h, s and
    the coefficients are exact and the symbol is radial (every term has
    equal powers of z and zbar), the matrix is diagonal with exact
    rational-in-h entries and is returned as a list of lists; otherwise a
    complex ndarray.
    """
    if symbol.nvars != 1:
        raise ValueError("scalar_toeplitz expects a one-variable symbol")
    if K > 200:
        raise ValueError("cutoff too large")
    radial = all(a[0] == b[0] for (a, b) in symbol.terms)
    exact = (is_exact_scalar(h) and is_exact_scalar(gauss_s) and radial
             and all(is_exact_scalar(c) for c in symbol.terms.values()))
    n = K + 1
    M = [[CQ(0)] * n for _ in range(n)] if exact \
        else np.zeros((n, n), dtype=complex)
    for (a, b), c in symbol.terms.items():
        p, q = a[0], b[0]
        for k in range(n):
            l = p + k - q
            if not 0 <= l <= K:
                continue
            mom = gauss_moment_1d(p + k, q + l, h, gauss_s)
            if scalar_is_zero(mom):
                continue
            if exact:
                # radial: l == k, so the normalizer k! h^k is rational
                M[l][k] = M[l][k] + c * mom / (math.factorial(k) * h ** k)
            else:
                norm = math.sqrt(math.factorial(k) * math.factorial(l)
                                 * float(h) ** (k + l))
                M[l][k] += complex(c * mom) / norm
    return M


# ---------------------------------------------------------------------------
# the projection P_h and lifts of U-invariant symbols
# ---------------------------------------------------------------------------


def p_h_projection_series(f: SymmetricSymbol) -> HPolynomial:
    """P_h f as sum_j h^j / j! (Delta'^j f)_flat: terminating HPolynomial
    of one-variable symbols."""
    out = {}
    j = 0
    cur = f
    while True:
        piece = cur.flat() * Fraction(1, math.factorial(j))
        if not piece.is_zero():
            out[j] = piece
        nxt = cur.laplacian_tail()
        if nxt.base.is_zero():
            break
        cur = nxt
        j += 1
    return from_power_dict(out)


def p_h_projection(f: SymmetricSymbol, h) -> PolySymbol:
    """Gaussian integral of f over the trailing N-1 variables at width h."""
    series = p_h_projection_series(f)
    acc = PolySymbol.zero(1)
    hp = 1
    for j, coeff in enumerate(series.coeffs):
        if coeff is not None:
            acc = acc + coeff * hp
        hp = hp * h
    return acc


def toeplitz_u_invariant(f: SymmetricSymbol, h, K: int):
    """Matrix of the Toeplitz operator with U-invariant symbol f^sharp.

    Computed directly from the spectral moments: the element between basis
    vectors Z^k chi_j and Z^l chi_i is delta_ij E[dbar_1^l d_1^k f(d)] under
    the product Gaussian of width h, normalized by sqrt(k! l! h^{k+l}).
    The product measure factorizes, so each term of f contributes the 1-D
    moments (k + a_1)! h^{k+a_1} * prod_{j>=2} delta a_j! h^{a_j}.
    """
    N = f.N
    n = K + 1
    scalar = np.zeros((n, n), dtype=complex)
    hf = float(h)
    for (a, bt), c in f.base.terms.items():
        tail = 1.0
        if any(a[j] != bt[j] for j in range(1, N)):
            continue
        for j in range(1, N):
            tail *= math.factorial(a[j]) * hf ** a[j]
        for k in range(n):
            l = k + a[0] - bt[0]
            if not 0 <= l <= K:
                continue
            lead = math.factorial(k + a[0]) * hf ** (k + a[0])
            norm = math.sqrt(math.factorial(k) * math.factorial(l)
                             * hf ** (k + l))
            scalar[l, k] += complex(c) * lead * tail / norm
    return np.kron(scalar, np.eye(N))


def lift_u_invariant(f: SymmetricSymbol, h, K: int):
    """T_{P_h f} tensor I_N: the scalar reduction of the same operator."""
    sym = p_h_projection(f, h)
    T = scalar_toeplitz(sym, h, K)
    if not isinstance(T, np.ndarray):
        T = np.array([[complex(x) for x in row] for row in T])
    return np.kron(T, np.eye(f.N))


# ---------------------------------------------------------------------------
# Berezin transform of truncated operators
# ---------------------------------------------------------------------------


def coherent_matrix(domain: str, N: int, h: float, K: int, X) -> np.ndarray:
    """Columns are the basis coefficients of K(., X) chi_a, a = 1..N."""
    X = np.asarray(X, dtype=complex)
    dim = basis_size(N, K)
    V = np.zeros((dim, N), dtype=complex)
    Xsk = np.eye(N, dtype=complex)
    for k in range(K + 1):
        w = 1.0 / math.sqrt(_domain_coefficient(domain, k, N) * float(h) ** k)
        V[k * N:(k + 1) * N, :] = Xsk * w
        Xsk = X.conj().T @ Xsk
    return V


def truncation_adequate(K: int, X, h: float) -> bool:
    """Coherent-state mass rule: K >= m/h + 10 sqrt(m/h) + 10, m = sup |spec|^2."""
    X = np.asarray(X, dtype=complex)
    m = float(np.max(np.linalg.svd(X, compute_uv=False)) ** 2) if X.size else 0.0
    need = m / h + 10.0 * math.sqrt(m / h) + 10.0
    return K >= need


def berezin_of_operator(T: np.ndarray, domain: str, N: int, h: float, K: int,
                        X, strict: bool = False) -> np.ndarray:
    """K(X,X)^{-1/2} <T K_{X,.}, K_{X,.}> K(X,X)^{-1/2} on the truncation."""
    if not truncation_adequate(K, X, h):
        msg = f"cutoff K={K} below the coherent-mass rule for this X, h={h}"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg)
    V = coherent_matrix(domain, N, h, K, X)
    wtt = V.conj().T @ np.asarray(T, dtype=complex) @ V
    G = V.conj().T @ V
    vals, vecs = np.linalg.eigh((G + G.conj().T) / 2)
    if np.min(vals) <= 0:
        raise ValueError("truncated K(X,X) is not positive definite")
    G_inv_half = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
    return G_inv_half @ wtt @ G_inv_half


def multiplication_operator(coeffs, domain: str, N: int, h: float,
                            K: int) -> np.ndarray:
    """Matrix of f -> p(Z) f for p(Z) = sum_m coeffs[m] Z^m (a multiplier)."""
    dim = basis_size(N, K)
    M = np.zeros((dim, dim), dtype=complex)
    for m, a in enumerate(coeffs):
        if a == 0:
            continue
        for k in range(K + 1 - m):
            ck = _domain_coefficient(domain, k, N)
            ckm = _domain_coefficient(domain, k + m, N)
            w = a * math.sqrt(ckm / ck * float(h) ** m)
            for j in range(N):
                M[(k + m) * N + j, k * N + j] += w
    return M


# ---------------------------------------------------------------------------
# exact transforms of U-invariant symbols (normal domain)
# ---------------------------------------------------------------------------


def chain_berezin_exact(symbols, eigenvalue) -> HPolynomial:
    """Diagonal entry of the exact transform of T_{f1}..T_{fs} at one
    eigenvalue: a terminating h-polynomial via the coupled Wick moment."""
    symbols = list(symbols)
    if not symbols:
        raise ValueError("need at least one symbol")
    N = symbols[0].N
    if any(f.N != N for f in symbols):
        raise ValueError("all symbols must share N")
    s = len(symbols)
    spec = GaussianSpec.kernel_chain(N, s, eigenvalue)
    poly = PolySymbol.one(s * N)
    for t, f in enumerate(symbols):
        poly = poly * f.base.embed(s * N, t * N)
    return wick_moment_series(spec, poly)


def berezin_heat_exact(f: SymmetricSymbol, eigenvalues, V=None) -> HPolynomial:
    """Exact transform of T_{f^sharp} at X = V diag(eigenvalues) V*."""
    return assemble_matrix_series(
        [chain_berezin_exact([f], c) for c in eigenvalues], V)


def berezin_product_exact(f: SymmetricSymbol, g: SymmetricSymbol,
                          eigenvalues, V=None) -> HPolynomial:
    """Exact transform of T_{f^sharp} T_{g^sharp} at X = V diag(eigs) V*."""
    return assemble_matrix_series(
        [chain_berezin_exact([f, g], c) for c in eigenvalues], V)


def assemble_matrix_series(diag_series, V=None) -> HPolynomial:
    """diag(HPolynomial entries) conjugated by V; matrix-valued HPolynomial."""
    n = len(diag_series)
    top = max((s.degree() for s in diag_series), default=-1)
    coeffs = []
    for p in range(top + 1):
        entries = [s.coeff(p) for s in diag_series]
        if all(e is None for e in entries):
            coeffs.append(None)
            continue
        if V is None and all(e is None or is_exact_scalar(e) for e in entries):
            D = np.empty((n, n), dtype=object)
            for i in range(n):
                for j in range(n):
                    D[i, j] = CQ(0)
            for i, e in enumerate(entries):
                D[i, i] = CQ(0) if e is None else e
            coeffs.append(D)
        else:
            D = np.diag([0j if e is None else complex(e) for e in entries])
            if V is not None:
                Vm = np.asarray(V, dtype=complex)
                D = Vm @ D @ Vm.conj().T
            coeffs.append(D)
    return HPolynomial(coeffs)


def normal_spectral(X, tol: float = 1e-10):
    """(V, eigenvalues) with X = V diag(eigs) V*, V unitary; X must be normal."""
    X = np.asarray(X, dtype=complex)
    if np.linalg.norm(X @ X.conj().T - X.conj().T @ X) > tol:
        raise ValueError("matrix is not normal within tolerance")
    # simultaneous diagonalization of the commuting Hermitian parts
    A = (X + X.conj().T) / 2
    B = (X - X.conj().T) / (2j)
    rng = np.random.default_rng(12345)
    for _ in range(8):
        t = rng.uniform(0.2, 1.0)
        _, V = np.linalg.eigh(A + t * B)
        D = V.conj().T @ X @ V
        if np.linalg.norm(D - np.diag(np.diag(D))) <= 10 * tol * max(
                1.0, np.linalg.norm(X)):
            return V, np.diag(D).copy()
    raise ValueError("failed to diagonalize the normal matrix")


# ---------------------------------------------------------------------------
# exact transforms on the full matrix domain (nilpotent points)
# ---------------------------------------------------------------------------


def _matrix_gaussian_integral(mp: MatrixPoly, h) -> list:
    """Entrywise expectation under iid entries of variance h (exact)."""
    spec = GaussianSpec.iid(mp.nvars, h)
    return [[wick_moment(spec, p) for p in row] for row in mp.entries]


def _nilpotent_power_bound(X: np.ndarray, tol: float = 1e-12) -> int:
    N = X.shape[0]
    P = np.eye(N, dtype=complex)
    for m in range(N + 1):
        if np.max(np.abs(P)) < tol:
            return m
        P = P @ X
    raise ValueError("matrix is not nilpotent; only nilpotent points are exact here")


def _kxx_inv_half(X: np.ndarray, h, domain: str = "full") -> np.ndarray:
    N = X.shape[0]
    nu = _nilpotent_power_bound(X)
    K = np.zeros((N, N), dtype=complex)
    Xk = np.eye(N, dtype=complex)
    for k in range(nu):
        K += Xk @ Xk.conj().T / (_domain_coefficient(domain, k, N) * float(h) ** k)
        Xk = Xk @ X
    vals, vecs = np.linalg.eigh((K + K.conj().T) / 2)
    return vecs @ np.diag(vals ** -0.5) @ vecs.conj().T


def berezin_full_domain(phi: MatrixPoly, X, h) -> np.ndarray:
    """Exact transform of T_phi at a nilpotent point of the full domain."""
    X = np.asarray(X, dtype=complex)
    N = phi.n
    nu = _nilpotent_power_bound(X)
    Y = MatrixPoly.matrix_variable(N)
    Ys = Y.adjoint()
    wtt = np.zeros((N, N), dtype=complex)
    Xm = [np.linalg.matrix_power(X, m) for m in range(nu)]
    for m in range(nu):
        left = _mp_power(Ys, m) @ phi
        for l in range(nu):
            A = _matrix_gaussian_integral(left @ _mp_power(Y, l), h)
            Anum = np.array([[complex(x) for x in row] for row in A])
            denom = (c_k_formula(N, m) * c_k_formula(N, l)
                     * float(h) ** (m + l))
            wtt += Xm[m] @ Anum @ Xm[l].conj().T / denom
    S = _kxx_inv_half(X, h)
    return S @ wtt @ S


def berezin_full_domain_product(phi: MatrixPoly, psi: MatrixPoly,
                                X, h) -> np.ndarray:
    """Exact transform of T_phi T_psi at a nilpotent point."""
    X = np.asarray(X, dtype=complex)
    N = phi.n
    nu = _nilpotent_power_bound(X)
    Y = MatrixPoly.matrix_variable(N)
    Ys = Y.adjoint()
    degree_bound = max(phi.entries[i][j].degree() for i in range(N)
                       for j in range(N)) + nu
    degree_bound = max(degree_bound,
                       max(psi.entries[i][j].degree() for i in range(N)
                           for j in range(N)) + nu)
    Xm = [np.linalg.matrix_power(X, m) for m in range(nu)]
    wtt = np.zeros((N, N), dtype=complex)
    for r in range(degree_bound + 1):
        cr = c_k_formula(N, r) * float(h) ** r
        lefts = []
        rights = []
        for m in range(nu):
            Aml = _matrix_gaussian_integral(
                _mp_power(Ys, m) @ phi @ _mp_power(Y, r), h)
            lefts.append(np.array([[complex(x) for x in row] for row in Aml])
                         / (c_k_formula(N, m) * float(h) ** m))
            Bl = _matrix_gaussian_integral(
                _mp_power(Ys, r) @ psi @ _mp_power(Y, m), h)
            rights.append(np.array([[complex(x) for x in row] for row in Bl])
                          / (c_k_formula(N, m) * float(h) ** m))
        for m in range(nu):
            for l in range(nu):
                wtt += Xm[m] @ lefts[m] @ rights[l] @ Xm[l].conj().T / cr
    S = _kxx_inv_half(X, h)
    return S @ wtt @ S


def _mp_power(mp: MatrixPoly, m: int) -> MatrixPoly:
    out = MatrixPoly.identity(mp.n, mp.nvars)
    for _ in range(m):
        out = out @ mp
    return out


# ---------------------------------------------------------------------------
# the coupled expansion behind the order-h bracket identity
# ---------------------------------------------------------------------------


def lemma43_exact(phi: MatrixPoly, psi: MatrixPoly) -> dict:
    """Exact half-integer-power expansion of the coupled double integral

        int int phi(sqrt(h) Y) K_1(Y, Z) psi(sqrt(h) Z) d mu_1(Y) d mu_1(Z)

    as {power_of_sqrt_h: exact matrix}.  Odd powers cancel identically.
    """
    N = phi.n
    phi_parts = _homogeneous_parts(phi)
    psi_parts = _homogeneous_parts(psi)
    Y = MatrixPoly.matrix_variable(N)
    out = {}
    max_m = max(phi_parts) if phi_parts else 0
    for m in range(max_m + 1):
        Ym = _mp_power(Y, m)
        Zsm = Ym.adjoint()
        for da, A in phi_parts.items():
            left = _matrix_gaussian_integral(A @ Ym, 1)
            if all(scalar_is_zero(x) for row in left for x in row):
                continue
            for db, B in psi_parts.items():
                right = _matrix_gaussian_integral(Zsm @ B, 1)
                if all(scalar_is_zero(x) for row in right for x in row):
                    continue
                prod = _exact_matmul(left, right)
                weight = Fraction(1, c_k_formula(N, m))
                key = da + db
                cur = out.get(key)
                add = [[prod[i][j] * weight for j in range(N)] for i in range(N)]
                if cur is None:
                    out[key] = add
                else:
                    out[key] = [[cur[i][j] + add[i][j] for j in range(N)]
                                for i in range(N)]
    return {k: v for k, v in out.items()
            if not all(scalar_is_zero(x) for row in v for x in row)}


def _homogeneous_parts(mp: MatrixPoly) -> dict:
    N, nv = mp.n, mp.nvars
    parts = {}
    for i in range(N):
        for j in range(N):
            for (a, b), c in mp.entries[i][j].terms.items():
                d = sum(a) + sum(b)
                if d not in parts:
                    parts[d] = MatrixPoly.zero(N, nv)
                parts[d].entries[i][j] = parts[d].entries[i][j] + \
                    PolySymbol.monomial(nv, a, b, c)
    return parts


def _exact_matmul(A, B):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), start=CQ(0))
             for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# the diagonal operator of the norm example
# ---------------------------------------------------------------------------


def norm_example_eigenvalues(N: int, h, kmax: int) -> list:
    """Eigenvalues of the Toeplitz operator with symbol |det Z|^2 e^{-Tr Z*Z} I.

    Computed from the spectral moment integrals: entry k is
    E[|d_1|^{2k+2} e^{-|d_1|^2 ...}] * prod of trailing factors, normalized;
    exact in h.  The closed form (k+1) h^N / (h+1)^{2N+k} is what tests
    compare against.
    """
    tau = h / (1 + h)  # width of the Gaussian tilted by e^{-|d|^2}
    out = []
    trailing = (tau * tau / h) ** (N - 1)
    for k in range(kmax + 1):
        lead = math.factorial(k + 1) * tau ** (k + 2) / h
        norm = math.factorial(k) * h ** k
        out.append(lead * trailing / norm)
    return out
