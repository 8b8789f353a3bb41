"""Measures on matrix domains and exact complex-Gaussian moments.

Samplers: the Gaussian measure on all N x N complex matrices (iid entries
of variance h), the normalized Haar measure on U(N) via phase-corrected QR,
and the induced measure on normal matrices (independent Haar frame and
Gaussian spectrum).

The exact side is a Wick engine: moments of polynomials under a complex
Gaussian with arbitrary mean and pairing matrix, enumerated by matchings
of holomorphic with antiholomorphic factors.  Pairing matrices need not be
Hermitian; the chain specs produced by coupled kernel integrals have
strictly triangular couplings and positive-definite real part, for which
the matching sum still reproduces the integral (analytic continuation in
the quadratic form).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import CQ, conj_scalar, scalar_is_zero
from .hseries import HPolynomial, from_power_dict
from .symcalc import PolySymbol

__all__ = [
    "GaussianSpec", "wick_moment", "wick_moment_series",
    "sample_ginibre", "sample_ginibre_batch",
    "sample_haar", "sample_haar_batch",
    "sample_normal_mu_h", "sample_normal_mu_h_batch",
    "sample_gaussian", "mc_integrate", "derive_rng",
    "haar_conjugation_mean", "haar_pair_moment", "haar_column4_moment",
    "haar_kappa", "unitarity_defect",
]

MAX_WICK_DEGREE = 40


# ---------------------------------------------------------------------------
# Gaussian specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSpec:
    """Complex Gaussian data: mean vector and pairing matrix.

    pairing[i][j] is the second moment E[(z_i - mu_i)(conj(z_j) - conj(nu_j))].
    For an ordinary Gaussian the pairing is Hermitian positive definite and
    nu = mu.  Specs built by completing the square in coupled kernel
    integrals may carry a non-Hermitian pairing and independent
    antiholomorphic means; they are validated through the positivity of the
    real part of the inverse pairing instead of a Cholesky factorization.
    """

    dim: int
    mean: tuple
    pairing: tuple
    anti_mean: tuple = None
    hermitian: bool = True

    def __post_init__(self):
        if len(self.mean) != self.dim or len(self.pairing) != self.dim:
            raise ValueError("dimension mismatch in GaussianSpec")
        C = self.pairing_matrix()
        if self.hermitian:
            if np.max(np.abs(C - C.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(C))):
                raise ValueError("covariance is not Hermitian within 1e-12")
            try:
                np.linalg.cholesky(C)
            except np.linalg.LinAlgError as exc:
                raise ValueError("covariance is not positive definite") from exc
        else:
            M = np.linalg.inv(C)
            lo = np.linalg.eigvalsh((M + M.conj().T) / 2).min()
            if lo <= 0:
                raise ValueError("inverse pairing lacks positive real part")

    @classmethod
    def iid(cls, dim: int, variance=1, mean=None):
        mean = tuple(mean) if mean is not None else (CQ(0),) * dim
        pairing = tuple(tuple(variance if i == j else CQ(0) for j in range(dim))
                        for i in range(dim))
        return cls(dim, mean, pairing)

    @classmethod
    def kernel_chain(cls, N: int, length: int, center, variance=1):
        """Coupled Gaussian for a chain of kernel factors around one point.

        Variables are `length` blocks of N coordinates.  Every block has
        mean center * chi_1; the first coordinates of the blocks carry the
        extra pairings E[x^(t)_1 conj(x^(u)_1)] = variance for t > u that
        encode the kernel couplings between consecutive factors.
        """
        dim = length * N
        mean = [CQ(0)] * dim
        for t in range(length):
            mean[t * N] = center
        pairing = [[CQ(0)] * dim for _ in range(dim)]
        for i in range(dim):
            pairing[i][i] = variance
        for t in range(length):
            for u in range(t):
                pairing[t * N][u * N] = variance
        return cls(dim, tuple(mean), tuple(tuple(r) for r in pairing),
                   hermitian=(length == 1))

    def pairing_matrix(self) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in self.pairing])

    def anti_mean_vector(self):
        if self.anti_mean is not None:
            return list(self.anti_mean)
        return [conj_scalar(m) for m in self.mean]

    def has_mean(self) -> bool:
        return any(not scalar_is_zero(m) for m in self.mean) or (
            self.anti_mean is not None
            and any(not scalar_is_zero(m) for m in self.anti_mean))


# ---------------------------------------------------------------------------
# exact Wick moments
# ---------------------------------------------------------------------------


def _coupling_components(pairing, dim):
    """Partition variables into components joined by off-diagonal pairings."""
    parent = list(range(dim))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(dim):
        for j in range(dim):
            if i != j and not scalar_is_zero(pairing[i][j]):
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    comps = {}
    for v in range(dim):
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def _matchings(pairing, variables, hol_counts, anti_counts):
    """Sum over matchings of hol with anti factors inside one component.

    Returns {number_of_pairs: value}; value is exact when the pairing is.
    """
    memo = {}

    def rec(hc, ac):
        if not any(hc):
            return {0: CQ(1)} if not any(ac) else {}
        key = (hc, ac)
        hit = memo.get(key)
        if hit is not None:
            return hit
        u = next(i for i, c in enumerate(hc) if c)
        hc2 = list(hc)
        hc2[u] -= 1
        total = {}
        for t, cnt in enumerate(ac):
            if not cnt:
                continue
            w = pairing[variables[u]][variables[t]]
            if scalar_is_zero(w):
                continue
            ac2 = list(ac)
            ac2[t] -= 1
            sub = rec(tuple(hc2), tuple(ac2))
            for p, v in sub.items():
                add = v * w * cnt
                cur = total.get(p + 1)
                total[p + 1] = add if cur is None else cur + add
        memo[key] = total
        return total

    return rec(tuple(hol_counts), tuple(anti_counts))


def _central_monomial(pairing, components, alpha, beta):
    """Moment of a centered monomial as {pairs: value}."""
    if sum(alpha) != sum(beta):
        return {}
    result = {0: CQ(1)}
    for comp in components:
        hc = [alpha[v] for v in comp]
        ac = [beta[v] for v in comp]
        if not any(hc) and not any(ac):
            continue
        if len(comp) == 1:
            a, b = hc[0], ac[0]
            if a != b:
                return {}
            sigma = pairing[comp[0]][comp[0]]
            val = CQ(math.factorial(a))
            for _ in range(a):
                val = val * sigma
            part = {a: val}
        else:
            part = _matchings(pairing, comp, hc, ac)
            if not part:
                return {}
        merged = {}
        for p1, v1 in result.items():
            for p2, v2 in part.items():
                key = p1 + p2
                add = v1 * v2
                cur = merged.get(key)
                merged[key] = add if cur is None else cur + add
        result = merged
    return result


def _moment_table(spec: GaussianSpec, poly: PolySymbol) -> dict:
    if poly.nvars != spec.dim:
        raise ValueError("polynomial and Gaussian dimensions differ")
    if spec.has_mean():
        poly = poly.subs_affine(list(spec.mean), spec.anti_mean_vector())
    if poly.degree() > MAX_WICK_DEGREE:
        raise ValueError(f"monomial degree exceeds {MAX_WICK_DEGREE}")
    components = _coupling_components(spec.pairing, spec.dim)
    table = {}
    for (alpha, beta), c in poly.terms.items():
        for p, v in _central_monomial(spec.pairing, components, alpha, beta).items():
            add = c * v
            cur = table.get(p)
            table[p] = add if cur is None else cur + add
    return {p: v for p, v in table.items() if not scalar_is_zero(v)}


def wick_moment(spec: GaussianSpec, poly: PolySymbol):
    """Exact expectation of poly under the Gaussian spec."""
    table = _moment_table(spec, poly)
    total = CQ(0)
    for v in table.values():
        total = total + v
    return total


def wick_moment_series(spec: GaussianSpec, poly: PolySymbol) -> HPolynomial:
    """Expectation organized by the number of pairings.

    With the spec's pairing understood as `scale * pairing`, coefficient p
    multiplies scale^p; this is the exact h-expansion when pairing entries
    are the unit-variance data.
    """
    return from_power_dict(_moment_table(spec, poly))


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def derive_rng(seed: int, label: str = "") -> np.random.Generator:
    """Deterministic per-experiment generator from (seed, label)."""
    tag = zlib.crc32(label.encode("utf8")) & 0xFFFFFFFF
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), tag]))


def _complex_normal(rng, shape, variance):
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_ginibre(N: int, h: float, rng) -> np.ndarray:
    """One draw with iid entries, E[z_ij conj(z_kl)] = h delta delta."""
    if h <= 0:
        raise ValueError("h must be positive")
    return _complex_normal(rng, (N, N), h)


def sample_ginibre_batch(N: int, h: float, count: int, rng) -> np.ndarray:
    if h <= 0:
        raise ValueError("h must be positive")
    return _complex_normal(rng, (count, N, N), h)


def sample_haar(N: int, rng) -> np.ndarray:
    return sample_haar_batch(N, 1, rng)[0]


def sample_haar_batch(N: int, count: int, rng) -> np.ndarray:
    """Haar unitaries via QR of Ginibre with the R-diagonal phases removed."""
    z = _complex_normal(rng, (count, N, N), 1.0)
    q, r = np.linalg.qr(z)
    d = np.einsum("...ii->...i", r)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return q * phase[:, None, :]


def sample_normal_mu_h(N: int, h: float, rng):
    """(U, d): frame and spectrum of one draw Z = U diag(d) U*."""
    U, d = sample_normal_mu_h_batch(N, h, 1, rng)
    return U[0], d[0]


def sample_normal_mu_h_batch(N: int, h: float, count: int, rng):
    if h <= 0:
        raise ValueError("h must be positive")
    U = sample_haar_batch(N, count, rng)
    d = _complex_normal(rng, (count, N), h)
    return U, d


def sample_gaussian(spec: GaussianSpec, count: int, rng) -> np.ndarray:
    """Draws from a Hermitian GaussianSpec, shape (count, dim)."""
    if not spec.hermitian:
        raise ValueError("can only sample Hermitian specs")
    L = np.linalg.cholesky(spec.pairing_matrix())
    w = _complex_normal(rng, (count, spec.dim), 1.0)
    mu = np.array([complex(m) for m in spec.mean])
    return mu + w @ L.T


def unitarity_defect(U: np.ndarray) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[-1])))


# ---------------------------------------------------------------------------
# Monte Carlo integration
# ---------------------------------------------------------------------------


def mc_integrate(evaluate, n_samples: int, rng, batch_size: int = 20000):
    """Mean and standard error of a batch evaluator.

    evaluate(rng, m) must return an array whose leading axis has length m
    (values may be complex and of any trailing shape).  Estimates are
    deterministic for a given generator state.
    """
    if n_samples < 1000:
        raise ValueError("need at least 10^3 samples")
    done = 0
    total = None
    total_sq = None
    while done < n_samples:
        m = min(batch_size, n_samples - done)
        vals = np.asarray(evaluate(rng, m))
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError(
                f"non-finite Monte Carlo values after {done} samples")
        s = vals.sum(axis=0)
        sq = (vals.real ** 2 + vals.imag ** 2).sum(axis=0) if np.iscomplexobj(vals) \
            else (vals ** 2).sum(axis=0)
        total = s if total is None else total + s
        total_sq = sq if total_sq is None else total_sq + sq
        done += m
    mean = total / n_samples
    second = total_sq / n_samples
    var = np.maximum(second - (np.abs(mean) ** 2 if np.iscomplexobj(mean)
                               else mean ** 2), 0.0)
    stderr = np.sqrt(var / n_samples)
    return mean, stderr


# ---------------------------------------------------------------------------
# closed-form Haar moments (degree <= 4)
# ---------------------------------------------------------------------------


def haar_conjugation_mean(X: np.ndarray) -> np.ndarray:
    """integral of U X U* dU = Tr(X)/N * I."""
    X = np.asarray(X, dtype=complex)
    N = X.shape[0]
    return np.trace(X) / N * np.eye(N)


def haar_pair_moment(N: int, i: int, j: int, k: int, l: int) -> Fraction:
    """E[u_ij conj(u_kl)] = delta_ik delta_jl / N."""
    return Fraction(1, N) if (i == k and j == l) else Fraction(0)


def haar_column4_moment(N: int, a: int, j: int, k: int, b: int) -> Fraction:
    """E[u_al conj(u_jl) u_kl conj(u_bl)] for any fixed column l."""
    num = (1 if (a == j and k == b) else 0) + (1 if (a == b and k == j) else 0)
    return Fraction(num, N * (N + 1))


def haar_kappa(N: int, a: int, j: int, k: int, b: int) -> Fraction:
    """Column-summed fourth moment: (delta_aj delta_kb + delta_ab delta_kj)/(N+1)."""
    num = (1 if (a == j and k == b) else 0) + (1 if (a == b and k == j) else 0)
    return Fraction(num, N + 1)
