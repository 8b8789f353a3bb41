"""Reproducing kernels and the moment coefficients c_k.

The full matrix domain carries the kernel sum_k X^k Y*^k / (c_k h^k) with

    c_k = [prod_{j=1}^{k+1}(N+j) - prod_{j=1}^{k+1}(N-j)] / ((k+1)(k+2)),

always an integer; the normal-matrix domain replaces c_k by k!.  Besides
the closed formula this module carries the combinatorial counting oracle
for c_k (triples (mu, i, j) with the cyclic compatibility constraints) and
the moment identity for the density nu_N that shows c_k is not a moment
sequence for N > 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "c_k_formula", "c_k_combinatorial", "KernelEval", "kernel",
    "normal_kernel_identity_arg", "nu_N_moment_check", "nu_N_moment_lhs",
    "moment_product_formula", "trh_tail_sequence",
]


def c_k_formula(N: int, k: int) -> int:
    """Exact value of the k-th moment coefficient on the full domain."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    plus = math.prod(N + j for j in range(1, k + 2))
    minus = math.prod(N - j for j in range(1, k + 2))
    value = Fraction(plus - minus, (k + 1) * (k + 2))
    assert value.denominator == 1
    return int(value)


def c_k_large_branch(N: int, k: int) -> Fraction:
    """Single-product branch (k+N+1)!/(N!(k+1)(k+2)), valid for k >= N-1."""
    return Fraction(math.factorial(k + N + 1),
                    math.factorial(N) * (k + 1) * (k + 2))


def c_k_combinatorial(N: int, k: int) -> int:
    """Count triples (mu, i, j), mu in S_k, i, j in {1..N}^k, with
    j = (a, i_1..i_{k-1}), j o mu = (i_{mu(2)}..i_{mu(k)}, b), i_k = i_{mu(1)},
    for a = b = 1.  Equals c_k_formula for every N, k.
    """
    if k > 7 or N > 4:
        raise ValueError("enumeration limited to k <= 7, N <= 4")
    if math.factorial(k) * N ** k > 10 ** 9:
        raise ValueError("enumeration would exceed the resource guard")
    if k == 0:
        return 1
    a = b = 0  # one-based index 1, zero-based 0
    grid = np.stack(np.meshgrid(*([np.arange(N)] * k), indexing="ij"),
                    axis=-1).reshape(-1, k)
    total = 0
    for mu in itertools.permutations(range(k)):
        # j is determined by i and a: j_1 = a, j_{t} = i_{t-1}  (1-based)
        # constraints: j_{mu(t)} = i_{mu(t+1)} for t=1..k-1, j_{mu(k)} = b,
        # and i_k = i_{mu(1)}
        ok = np.ones(len(grid), dtype=bool)
        j_of = lambda s: (np.full(len(grid), a) if s == 0 else grid[:, s - 1])
        for t in range(k - 1):
            ok &= j_of(mu[t]) == grid[:, mu[t + 1]]
        ok &= j_of(mu[k - 1]) == b
        ok &= grid[:, k - 1] == grid[:, mu[0]]
        total += int(ok.sum())
    return total


@dataclass
class KernelEval:
    domain: str          # "full" | "normal"
    N: int
    h: float
    terms_used: int
    value: np.ndarray


def _coefficient(domain: str, k: int, N: int) -> int:
    if domain == "normal":
        return math.factorial(k)
    if domain == "full":
        return c_k_formula(N, k)
    raise ValueError(f"unknown domain {domain!r}")


def kernel(domain: str, X, Y, h: float, tol: float = 1e-14,
           max_terms: int = 500) -> KernelEval:
    """K_h(X, Y) = sum_k X^k Y*^k / (coeff_k h^k).

    Dispatches to closed forms when X is nilpotent (finite sum) or, on the
    normal domain, idempotent (projection identity); otherwise sums until
    the term norm stays below tol for three consecutive k.
    """
    if h <= 0 or tol <= 0:
        raise ValueError("h and tol must be positive")
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    N = X.shape[0]
    Ys = Y.conj().T

    # nilpotency: X^m = 0 for some m <= N makes the series a finite sum
    nil_order = _nilpotency_order(X)
    if nil_order is not None:
        acc = np.zeros((N, N), dtype=complex)
        Xk = np.eye(N, dtype=complex)
        Yk = np.eye(N, dtype=complex)
        for k in range(nil_order):
            acc += Xk @ Yk / (_coefficient(domain, k, N) * h ** k)
            Xk = Xk @ X
            Yk = Yk @ Ys
        return KernelEval(domain, N, h, nil_order, acc)

    if domain == "normal" and np.linalg.norm(X @ X - X) < 1e-12:
        # projection: K(X, Y) = (I - X) + X K(I, Y) and K(I, Y) = exp(Y*/h)
        KI = normal_kernel_identity_arg(Y, h)
        return KernelEval(domain, N, h, -1, (np.eye(N) - X) + X @ KI)

    acc = np.zeros((N, N), dtype=complex)
    Xk = np.eye(N, dtype=complex)
    Yk = np.eye(N, dtype=complex)
    small = 0
    for k in range(max_terms):
        term = Xk @ Yk / (_coefficient(domain, k, N) * h ** k)
        acc += term
        small = small + 1 if np.max(np.abs(term)) < tol else 0
        if small >= 3:
            return KernelEval(domain, N, h, k + 1, acc)
        Xk = Xk @ X
        Yk = Yk @ Ys
    raise RuntimeError("kernel series did not converge within 500 terms")


def _nilpotency_order(X: np.ndarray, tol: float = 1e-12):
    N = X.shape[0]
    P = np.eye(N, dtype=complex)
    for m in range(N + 1):
        if np.max(np.abs(P)) < tol:
            return m
        P = P @ X
    return None


def normal_kernel_identity_arg(Y: np.ndarray, h: float) -> np.ndarray:
    """K_h(I, Y) on the normal domain = exp(Y*/h) (entire series in Y*)."""
    Y = np.asarray(Y, dtype=complex)
    N = Y.shape[0]
    acc = np.zeros((N, N), dtype=complex)
    term = np.eye(N, dtype=complex)
    Ys = Y.conj().T / h
    for k in range(500):
        acc += term
        term = term @ Ys / (k + 1)
        if np.max(np.abs(term)) < 1e-16 * max(1.0, np.max(np.abs(acc))):
            acc += term
            return acc
    raise RuntimeError("matrix exponential series did not converge")


# ---------------------------------------------------------------------------
# the nu_N moment identity
# ---------------------------------------------------------------------------


def nu_N_moment_lhs(N: int, k: int) -> Fraction:
    """integral of |z|^{2k} against (1/pi) sum_j (N-1)!(N-j)/j! |z|^{2j} e^{-|z|^2}.

    Each summand integrates by the Gamma identity
    (1/pi) integral |z|^{2m} e^{-|z|^2} dz = m!, so the value is exact.
    """
    return Fraction(sum(
        math.factorial(N - 1) * (N - j) * math.factorial(k + j) // math.factorial(j)
        for j in range(N)))


def moment_product_formula(N: int, k: int) -> Fraction:
    """(1/((k+1)(k+2))) prod_{j=1}^{k+1} (N+j)."""
    return Fraction(math.prod(N + j for j in range(1, k + 2)),
                    (k + 1) * (k + 2))


def nu_N_moment_check(N: int, k: int):
    """Both sides of the displayed moment identity for nu_N.

    Returns (lhs, rhs) exactly.  For N > 1 the two sides differ by the
    constant factor N!: the displayed density is N! times the one whose
    moments match the product formula.  Callers should compare and report.
    """
    if N > 4 or k > 10:
        raise ValueError("exact check limited to N <= 4, k <= 10")
    return nu_N_moment_lhs(N, k), moment_product_formula(N, k)


def trh_tail_sequence(N: int, kmax: int) -> list:
    """[prod_{j=1}^{k+1}(N-j)/((k+1)(k+2)) for k = 1..kmax]; finitely many
    nonzero terms (k <= N-2), which is what blocks c_k from being a moment
    sequence for N > 1."""
    out = []
    for k in range(1, kmax + 1):
        out.append(Fraction(math.prod(N - j for j in range(1, k + 2)),
                            (k + 1) * (k + 2)))
    return out
