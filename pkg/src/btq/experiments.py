"""Named, seeded experiments exercising every quantization result.

Each experiment is a pure function ExperimentConfig -> ExperimentResult.
Assertions within a result check the operator-exact identities; whenever a
commonly displayed formula disagrees with the exact computation (three
known cases: the orientation of the mixed composition coupling, the sign
of the order-one antisymmetrization, and the normalization of the moment
density), the experiment reports the discrepancy in its payload under a
``display_mismatch`` key instead of failing, and the acceptance tests
carry the literal statements.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels, semiclassics, toeplitz
from .exact import CQ
from .hseries import HPolynomial
from .models import (Assertion, ExperimentConfig, ExperimentResult, FitReport,
                     cmat, cnum, cseries)
from .randmat import (GaussianSpec, derive_rng, haar_column4_moment,
                      haar_kappa, mc_integrate, sample_ginibre_batch,
                      sample_haar_batch, sample_normal_mu_h_batch,
                      wick_moment, wick_moment_series)
from .symcalc import (MatrixPoly, PolySymbol, SymmetricSymbol, cochain_C,
                      poisson_reduced)

# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def exact_grid(grid) -> list[Fraction]:
    """The h grid as exact rationals (geometric grids stay exact)."""
    h0 = Fraction(str(grid.h0)).limit_denominator(10 ** 12)
    ratio = Fraction(str(grid.ratio)).limit_denominator(10 ** 12)
    return [h0 * ratio ** m for m in range(grid.count)]


def random_cq(rng, span: int = 3) -> CQ:
    re = int(rng.integers(-span, span + 1))
    im = int(rng.integers(-span, span + 1))
    return CQ(re, im)


def random_one_var(rng, deg: int = 2, terms: int = 3) -> PolySymbol:
    p = PolySymbol.zero(1)
    for _ in range(terms):
        a = int(rng.integers(0, deg + 1))
        b = int(rng.integers(0, deg + 1))
        p = p + PolySymbol.monomial(1, (a,), (b,), random_cq(rng))
    return p


def random_symmetric(rng, N: int, deg: int = 2, terms: int = 4) -> SymmetricSymbol:
    base = PolySymbol.zero(N)
    for _ in range(terms):
        a = [int(rng.integers(0, 2)) for _ in range(N)]
        b = [int(rng.integers(0, 2)) for _ in range(N)]
        if sum(a) + sum(b) > deg:
            a, b = [1] + [0] * (N - 1), [1] + [0] * (N - 1)
        base = base + PolySymbol.monomial(N, a, b, random_cq(rng))
    return SymmetricSymbol.symmetrize(base)


def random_matrix_poly(rng, N: int, deg: int = 2, terms: int = 3) -> MatrixPoly:
    nv = N * N
    entries = []
    for i in range(N):
        row = []
        for j in range(N):
            p = PolySymbol.constant(nv, random_cq(rng))
            for _ in range(terms - 1):
                alpha = [0] * nv
                beta = [0] * nv
                for _ in range(int(rng.integers(1, deg + 1))):
                    if rng.integers(0, 2):
                        alpha[int(rng.integers(0, nv))] += 1
                    else:
                        beta[int(rng.integers(0, nv))] += 1
                p = p + PolySymbol.monomial(nv, alpha, beta, random_cq(rng, 2))
            row.append(p)
        entries.append(row)
    return MatrixPoly(entries)


def random_normal_point(rng, N: int, span: int = 2):
    """(V, eigenvalues): Haar-ish frame (float) and exact rational spectrum."""
    V = sample_haar_batch(N, 1, rng)[0]
    cs = [CQ(Fraction(int(rng.integers(-span, span + 1)), 2),
             Fraction(int(rng.integers(-span, span + 1)), 2)) for _ in range(N)]
    return V, cs


def batch_eval_matrix_poly(mp: MatrixPoly, Y: np.ndarray) -> np.ndarray:
    """Evaluate a MatrixPoly at a batch of matrices, shape (B, N, N)."""
    B = Y.shape[0]
    N = mp.n
    flat = Y.reshape(B, N * N)
    conj = flat.conj()
    out = np.zeros((B, N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            acc = np.zeros(B, dtype=complex)
            for (a, b), c in mp.entries[i][j].terms.items():
                term = np.full(B, complex(c))
                for v, p in enumerate(a):
                    if p:
                        term = term * flat[:, v] ** p
                for v, p in enumerate(b):
                    if p:
                        term = term * conj[:, v] ** p
                acc += term
            out[:, i, j] = acc
    return out


def fit_power_law(hs, ys) -> FitReport:
    """Least-squares fit log|y| = slope log h + log coeff."""
    hs = np.asarray(hs, dtype=float)
    ys = np.abs(np.asarray(ys, dtype=complex))
    mask = ys > 0
    x = np.log(hs[mask])
    y = np.log(ys[mask])
    A = np.stack([x, np.ones_like(x)], axis=1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ sol
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return FitReport(slope=float(sol[0]), coefficient=float(np.exp(sol[1])),
                     r_squared=r2)


def extrapolate_sqrt_series(hs, values, n_orders: int = 7) -> complex:
    """Fit values ~ sum_k a_k h^{k/2} and return a_0."""
    hs = np.asarray(hs, dtype=float)
    V = np.asarray(values, dtype=complex)
    n_orders = min(n_orders, len(hs) - 2)
    A = np.stack([hs ** (k / 2.0) for k in range(n_orders)], axis=1)
    sol, *_ = np.linalg.lstsq(A, V, rcond=None)
    return complex(sol[0])


def check(name: str, ok: bool, detail: str = "", observed=None,
          bound=None) -> Assertion:
    return Assertion(name=name, status="pass" if ok else "fail", detail=detail,
                     observed=None if observed is None else float(observed),
                     bound=None if bound is None else float(bound))


def mc_check(name: str, diff: float, sigma: float, samples: int,
             recommended: int, nsig: float = 4.0) -> Assertion:
    """4-sigma verdict; small sample counts degrade to inconclusive."""
    ok = diff <= nsig * max(sigma, 1e-300)
    status = "pass" if ok else ("inconclusive" if samples < recommended else "fail")
    return Assertion(name=name, status=status,
                     detail=f"|diff|={diff:.3e}, 4*stderr={4 * sigma:.3e}, "
                            f"samples={samples}",
                     observed=float(diff), bound=float(nsig * sigma))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def exp_ck_check(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    table = {}
    ok_all = True
    for N in range(1, min(cfg.N, 4) + 1):
        for k in range(0, 7):
            formula = kernels.c_k_formula(N, k)
            count = kernels.c_k_combinatorial(N, k)
            table[f"N{N}_k{k}"] = {"formula": formula, "combinatorial": count}
            ok_all = ok_all and formula == count
    res.values["coefficients"] = table
    res.assertions.append(check(
        "formula equals combinatorial count (N<=4, k<=6)", ok_all))
    spot = all(kernels.c_k_formula(N, 0) == 1 and kernels.c_k_formula(N, 1) == N
               and kernels.c_k_formula(N, 2) == N * N + 1 for N in range(1, 5))
    res.assertions.append(check("spot values 1, N, N^2+1", spot))

    # independent Laplacian route: Delta^k (Y*^k Y^k)(0) = k! c_k I at N=2
    N = 2
    Y = MatrixPoly.matrix_variable(N)
    Ys = Y.adjoint()
    lap_ok = True
    P = MatrixPoly.identity(N, N * N)
    Q = MatrixPoly.identity(N, N * N)
    for k in range(1, 4):
        P = Ys @ P @ Y  # builds Y*^k ... Y^k inside-out; same product
        M = (P).map(lambda p: p.laplacian(power=k))
        at0 = M.at_zero()
        want = math.factorial(k) * kernels.c_k_formula(N, k)
        for i in range(N):
            for j in range(N):
                expect = want if i == j else 0
                lap_ok = lap_ok and at0[i][j] == expect
    res.assertions.append(check(
        "Delta^k of the degree-2k matrix moment at 0 equals k! c_k I (N=2, k<=3)",
        lap_ok))

    # third route: Gaussian moment of Y*^k Y^k equals c_k h^k I
    h = Fraction(1, 2)
    mom_ok = True
    P = MatrixPoly.identity(N, N * N)
    for k in range(1, 4):
        P = Ys @ P @ Y
        vals = toeplitz._matrix_gaussian_integral(P, h)
        want = kernels.c_k_formula(N, k) * h ** k
        for i in range(N):
            for j in range(N):
                expect = want if i == j else 0
                mom_ok = mom_ok and vals[i][j] == expect
    res.assertions.append(check(
        "Gaussian matrix moment equals c_k h^k I (N=2, k<=3, exact)", mom_ok))
    return res.finalize()


def exp_schur_haar(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    samples = cfg.samples or 1_000_000
    rec = 200_000
    for N in (2, 3):
        Xfix = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))

        def conj_batch(r, m, N=N, X=Xfix):
            U = sample_haar_batch(N, m, r)
            return np.einsum("bij,jk,blk->bil", U, X, U.conj())

        mean, err = mc_integrate(conj_batch, samples, rng)
        target = np.trace(Xfix) / N * np.eye(N)
        diff = float(np.max(np.abs(mean - target)))
        sig = float(np.max(err))
        res.assertions.append(mc_check(
            f"frame average of U X U* equals Tr(X)/N I (N={N})",
            diff, sig, samples, rec))
        res.values[f"conjugation_mean_N{N}"] = cmat(mean)

        # degree-4 single-column moments and their column sums
        tuples = [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 1, 0), (0, 1, 0, 1)]

        def col4_batch(r, m, N=N):
            U = sample_haar_batch(N, m, r)
            cols = U[:, :, 0]
            out = np.empty((m, len(tuples)), dtype=complex)
            for t, (a, j, k, b) in enumerate(tuples):
                out[:, t] = (cols[:, a] * cols[:, j].conj()
                             * cols[:, k] * cols[:, b].conj())
            return out

        mean4, err4 = mc_integrate(col4_batch, samples, rng)
        worst = 0.0
        sig4 = float(np.max(err4))
        for t, (a, j, k, b) in enumerate(tuples):
            closed = float(haar_column4_moment(N, a, j, k, b))
            worst = max(worst, abs(mean4[t] - closed))
        res.assertions.append(mc_check(
            f"degree-4 column moments match the orthogonality closed form (N={N})",
            worst, sig4, samples, rec))

        def kappa_batch(r, m, N=N):
            U = sample_haar_batch(N, m, r)
            out = np.empty((m, len(tuples)), dtype=complex)
            for t, (a, j, k, b) in enumerate(tuples):
                out[:, t] = np.sum(U[:, a, :] * U[:, j, :].conj()
                                   * U[:, k, :] * U[:, b, :].conj(), axis=1)
            return out

        meank, errk = mc_integrate(kappa_batch, samples, rng)
        worstk = 0.0
        sigk = float(np.max(errk))
        for t, (a, j, k, b) in enumerate(tuples):
            closed = float(haar_kappa(N, a, j, k, b))
            worstk = max(worstk, abs(meank[t] - closed))
        res.assertions.append(mc_check(
            f"column-summed fourth moments match the /(N+1) closed form (N={N})",
            worstk, sigk, samples, rec))
    return res.finalize()


def _nilpotent_X() -> np.ndarray:
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def exp_thm_4_1(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    X = _nilpotent_X()
    hs = exact_grid(cfg.grid)
    hs_f = [float(h) for h in hs]
    worst = 0.0
    sweeps = {}
    for trial in range(5):
        phi = random_matrix_poly(rng, 2, deg=2)
        vals = [toeplitz.berezin_full_domain(phi, X, h) for h in hs]
        phi0 = np.array([[complex(x) for x in row] for row in phi.at_zero()])
        limit = np.array([[(phi0[0, 0] + phi0[1, 1]) / 2, 0], [0, phi0[1, 1]]])
        est = np.array([[extrapolate_sqrt_series(hs_f, [v[i, j] for v in vals])
                         for j in range(2)] for i in range(2)])
        worst = max(worst, float(np.max(np.abs(est - limit))))
        sweeps[f"trial{trial}"] = {
            "limit": cmat(limit), "extrapolated": cmat(est),
            "sweep": [[float(h), cmat(v)] for h, v in zip(hs_f, vals)]}
    res.values["sweeps"] = sweeps
    res.assertions.append(check(
        "extrapolated transform matches the value-at-zero limit matrix",
        worst <= 1e-3, observed=worst, bound=1e-3))

    # sqrt(h) leading order for the rank-one symbol sqrt(2) y_22 I
    s2 = math.sqrt(2.0)
    y22 = PolySymbol.variable(4, 3) * s2
    phi_half = MatrixPoly.scalar(2, y22)
    entries = [toeplitz.berezin_full_domain(phi_half, X, h)[0, 1] for h in hs]
    fit = fit_power_law(hs_f, entries)
    res.exponents["offdiag_entry"] = fit
    coeff_at_min = complex(entries[-1]) / math.sqrt(hs_f[-1])
    res.values["half_power_entry"] = [[float(h), cnum(v)]
                                      for h, v in zip(hs_f, entries)]
    res.assertions.append(check(
        "fitted exponent of the off-diagonal entry is 1/2 within 0.02",
        abs(fit.slope - 0.5) <= 0.02, observed=fit.slope))
    res.assertions.append(check(
        "leading sqrt(h) coefficient tends to 1 within 1e-3",
        abs(coeff_at_min - 1.0) <= 1e-3, observed=abs(coeff_at_min - 1.0),
        bound=1e-3))
    return res.finalize()


def exp_thm_4_2(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    X = _nilpotent_X()
    hs = exact_grid(cfg.grid)
    hs_f = [float(h) for h in hs]
    worst = 0.0
    payload = {}
    for trial in range(3):
        phi = random_matrix_poly(rng, 2, deg=2)
        psi = random_matrix_poly(rng, 2, deg=2)
        vals = [toeplitz.berezin_full_domain_product(phi, psi, X, h) for h in hs]
        phi0 = np.array([[complex(x) for x in row] for row in phi.at_zero()])
        psi0 = np.array([[complex(x) for x in row] for row in psi.at_zero()])
        limit = np.array([
            [np.trace(phi0) / 2 * np.trace(psi0) / 2, 0],
            [0, (phi0 @ psi0)[1, 1]]])
        est = np.array([[extrapolate_sqrt_series(hs_f, [v[i, j] for v in vals])
                         for j in range(2)] for i in range(2)])
        worst = max(worst, float(np.max(np.abs(est - limit))))
        payload[f"trial{trial}"] = {"limit": cmat(limit),
                                    "extrapolated": cmat(est)}
    res.values["product_limits"] = payload
    res.assertions.append(check(
        "product transform extrapolates to the trace-product limit",
        worst <= 1e-3, observed=worst, bound=1e-3))
    return res.finalize()


def exp_lemma_4_3(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    from .symcalc import double_bracket
    ok_half = True
    worst0 = worst1 = 0.0
    for _ in range(10):
        phi = random_matrix_poly(rng, 2, deg=2)
        psi = random_matrix_poly(rng, 2, deg=2)
        layers = toeplitz.lemma43_exact(phi, psi)
        ok_half = ok_half and all(k % 2 == 0 for k in layers)
        phi0 = np.array([[complex(x) for x in row] for row in phi.at_zero()])
        psi0 = np.array([[complex(x) for x in row] for row in psi.at_zero()])
        got0 = np.array([[complex(x) for x in row] for row in layers[0]])
        worst0 = max(worst0, float(np.max(np.abs(got0 - phi0 @ psi0))))
        lap_phi = phi.map(lambda p: p.laplacian())
        lap_psi = psi.map(lambda p: p.laplacian())
        bb = double_bracket(phi, psi)
        expect1 = (np.array([[complex(x) for x in row] for row in lap_phi.at_zero()]) @ psi0
                   + phi0 @ np.array([[complex(x) for x in row] for row in lap_psi.at_zero()])
                   + np.array([[complex(x) for x in row] for row in bb.at_zero()]))
        got1 = layers.get(2)
        got1 = np.zeros((2, 2), complex) if got1 is None else \
            np.array([[complex(x) for x in row] for row in got1])
        worst1 = max(worst1, float(np.max(np.abs(got1 - expect1))))
    res.assertions.append(check(
        "half-integer powers cancel in the coupled expansion", ok_half))
    res.assertions.append(check(
        "order h^0 coefficient equals phi(0) psi(0)", worst0 <= 1e-12,
        observed=worst0, bound=1e-12))
    res.assertions.append(check(
        "order h^1 coefficient equals Lap(phi) psi + phi Lap(psi) + bracket",
        worst1 <= 1e-12, observed=worst1, bound=1e-12))
    return res.finalize()


def _theorem5_entries(cfg: ExperimentConfig, product: bool):
    """Shared-sample estimates of the normalized transform at the rank-one
    projection, at the identity, and at zero.

    The projection route assembles the kernel decomposition K(P, Y) =
    (I - P) + P K(I, Y) as a full matrix product; the identity and zero
    routes evaluate their own kernels.  Every exponential is folded with
    the e^{-1/(2h)} normalization before exponentiating, keeping factors
    bounded for the whole default grid.
    """
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = 2
    phi = random_matrix_poly(rng, N, deg=2)
    psi = random_matrix_poly(rng, N, deg=2) if product else None
    hs = [float(h) for h in exact_grid(cfg.grid)[:3]]
    samples = cfg.samples or 100_000
    if min(hs) < 2e-4:
        raise ValueError("grid too fine for stable kernel exponentials")
    P = np.diag([1.0, 0.0]).astype(complex)
    Q = np.eye(N, dtype=complex) - P
    out = []
    for h in hs:
        U, d = sample_normal_mu_h_batch(N, h, samples, rng)
        Y = np.einsum("bij,bj,bkj->bik", U, d, U.conj())
        phiY = batch_eval_matrix_poly(phi, Y)
        # identity route: A = e^{-1/(2h)} K(I, Y), folded symmetrically
        A = np.einsum("bij,bj,bkj->bik", U, np.exp((d.conj() - 0.5) / h),
                      U.conj())
        Ah = A.conj().transpose(0, 2, 1)
        # projection route: fold only e^{-0.3/h} into the kernel and apply
        # the remaining e^{-0.2/h} outside, so the float paths differ
        A2 = np.einsum("bij,bj,bkj->bik", U, np.exp((d.conj() - 0.3) / h),
                       U.conj())
        rest = math.exp(-0.2 / h)
        left = Q[None] + rest * np.einsum("ij,bjk->bik", P, A2)
        if product:
            Uw, e = sample_normal_mu_h_batch(N, h, samples, rng)
            Z = np.einsum("bij,bj,bkj->bik", Uw, e, Uw.conj())
            psiZ = batch_eval_matrix_poly(psi, Z)
            M = np.einsum("bji,bjk->bik", U.conj(), Uw)
            Kyz = np.einsum("bij,bjk,blk->bil", U,
                            M * np.exp(d[:, :, None] * e.conj()[:, None, :] / h),
                            Uw.conj())
            B = np.einsum("bij,bj,bkj->bik", Uw, np.exp((e - 0.5) / h),
                          Uw.conj())
            B2 = np.einsum("bij,bj,bkj->bik", Uw, np.exp((e - 0.3) / h),
                           Uw.conj())
            right = Q[None] + rest * np.einsum("bij,jk->bik", B2, P)
            proj = np.einsum("bij,bjk,bkl,blm,bmn->bin",
                             left, phiY, Kyz, psiZ, right)
            ident = np.einsum("bij,bjk,bkl,blm,bmn->bin",
                              A, phiY, Kyz, psiZ, B)
            zero = np.einsum("bij,bjk,bkl->bil", phiY, Kyz, psiZ)
        else:
            right = Q[None] + rest * np.einsum("bij,jk->bik",
                                               A2.conj().transpose(0, 2, 1), P)
            proj = np.einsum("bij,bjk,bkl->bil", left, phiY, right)
            ident = np.einsum("bij,bjk,bkl->bil", A, phiY, Ah)
            zero = phiY
        out.append({"h": h,
                    "proj_11": complex(proj[:, 0, 0].mean()),
                    "ident_11": complex(ident[:, 0, 0].mean()),
                    "proj_22": complex(proj[:, 1, 1].mean()),
                    "zero_22": complex(zero[:, 1, 1].mean())})
    return out


def exp_thm_5_1(cfg: ExperimentConfig) -> ExperimentResult:
    return _theorem5_result(cfg, product=False)


def exp_thm_5_2(cfg: ExperimentConfig) -> ExperimentResult:
    return _theorem5_result(cfg, product=True)


def _theorem5_result(cfg: ExperimentConfig, product: bool) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rows = _theorem5_entries(cfg, product)
    worst = 0.0
    for row in rows:
        d11 = abs(row["proj_11"] - row["ident_11"]) / max(abs(row["ident_11"]), 1e-300)
        d22 = abs(row["proj_22"] - row["zero_22"]) / max(abs(row["zero_22"]), 1e-300)
        worst = max(worst, d11, d22)
    res.values["entries"] = [
        {k: (cnum(v) if isinstance(v, complex) else v) for k, v in row.items()}
        for row in rows]
    label = "product transform" if product else "transform"
    res.assertions.append(check(
        f"projection-point {label} entries equal the identity/zero-point "
        "entries with shared samples", worst <= 1e-12,
        observed=worst, bound=1e-12))
    return res.finalize()


def exp_nulo_6_2(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    worst = 0.0
    for N in (2, 3):
        base = PolySymbol.one(N)
        for j in range(N):
            v = PolySymbol.variable(N, j)
            base = base * v * v.conj()
        f = SymmetricSymbol(base)
        for _ in range(5):
            V, cs = random_normal_point(rng, N)
            series = toeplitz.berezin_heat_exact(f, cs, V)
            X = V @ np.diag([complex(c) for c in cs]) @ V.conj().T
            expect = HPolynomial(
                [None] * (N - 1) + [X.conj().T @ X, np.eye(N, dtype=complex)])
            n = max(series.degree(), expect.degree()) + 1
            for p in range(n):
                a = series.coeff(p)
                a = np.zeros((N, N), complex) if a is None else np.asarray(
                    [[complex(x) for x in row] for row in a])
                b = expect.coeff(p)
                b = np.zeros((N, N), complex) if b is None else b
                worst = max(worst, float(np.max(np.abs(a - b))))
    res.assertions.append(check(
        "transform of |det|^2 equals h^{N-1} X*X + h^N I exactly (N=2,3)",
        worst <= 1e-12, observed=worst, bound=1e-12))

    # the two zero-point expansions do not agree: report both
    N = 2
    base = PolySymbol.one(N)
    for j in range(N):
        v = PolySymbol.variable(N, j)
        base = base * v * v.conj()
    f = SymmetricSymbol(base)
    direct = semiclassics.expansion_at_zero_direct(f, 3)
    orbit = semiclassics.expansion_at_zero_orbit(f, 3)
    res.values["zero_point_direct"] = [cnum(x) for x in direct]
    res.values["zero_point_orbit_formula"] = [cnum(x) for x in orbit]
    res.values["display_mismatch"] = {
        "zero_point_expansions": "the orbit formula specialized to a zero "
        "eigenvalue differs from the direct expansion; the direct one is "
        "the exact limit"}
    res.assertions.append(check(
        "the two zero-point expansion formulas disagree as expected",
        any(abs(complex(a) - complex(b)) > 1e-12 for a, b in zip(direct, orbit))))
    return res.finalize()


def exp_norm_example(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    ok = True
    for N in (1, 2):
        h = Fraction(1, 7)
        eigs = toeplitz.norm_example_eigenvalues(N, h, 10)
        for k, e in enumerate(eigs):
            closed = Fraction(k + 1) * h ** N / (1 + h) ** (2 * N + k)
            ok = ok and e == closed
    res.assertions.append(check(
        "diagonal matrix elements equal (k+1) h^N/(h+1)^{2N+k} exactly "
        "(N=1,2, k<=10)", ok))

    # N=1 cross-check against the generic Gaussian-symbol Toeplitz matrix
    z = PolySymbol.variable(1, 0)
    sym = z * z.conj()
    T = toeplitz.scalar_toeplitz(sym, Fraction(1, 7), 10, gauss_s=1)
    eigs1 = toeplitz.norm_example_eigenvalues(1, Fraction(1, 7), 10)
    cross = all(T[k][k] == eigs1[k] for k in range(11))
    res.assertions.append(check(
        "independent scalar-Toeplitz route agrees entrywise (N=1)", cross))

    sup_ok = True
    ratios = {}
    for N in (1, 2):
        h = 1e-3
        kmax = 8000
        ks = np.arange(kmax + 1, dtype=float)
        vals = (ks + 1) * h ** N / (1 + h) ** (2 * N + ks)
        sup = float(vals.max())
        scale = math.exp(-1.0) * h ** (N - 1)
        ratios[f"N{N}"] = sup / scale
        sup_ok = sup_ok and abs(sup / scale - 1.0) <= 0.02
    res.values["sup_ratio_to_scaling"] = ratios
    res.assertions.append(check(
        "operator norm reproduces the e^{-1} h^{N-1} scaling within 2% at "
        "h=1e-3", sup_ok))
    return res.finalize()


def exp_spectral_7_1(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = cfg.N
    K = cfg.cutoff
    worst_mat = 0.0
    for h in (0.5, 0.25):
        for _ in range(5):
            v = random_one_var(rng, 2)
            w = random_one_var(rng, 2)
            fv = SymmetricSymbol.spectral(v, N)
            gw = SymmetricSymbol.spectral(w, N)
            left = toeplitz.toeplitz_u_invariant(fv, h, K) @ \
                toeplitz.toeplitz_u_invariant(gw, h, K)
            Tv = toeplitz.scalar_toeplitz(v, h, K)
            Tw = toeplitz.scalar_toeplitz(w, h, K)
            right = np.kron(np.asarray(Tv) @ np.asarray(Tw), np.eye(N))
            worst_mat = max(worst_mat, float(np.max(np.abs(left - right))))
    res.assertions.append(check(
        "truncated product of spectral Toeplitz operators equals the scalar "
        "product tensor identity within 1e-10", worst_mat <= 1e-10,
        observed=worst_mat, bound=1e-10))

    # expansion coefficients for spectral pairs
    v = random_one_var(rng, 2)
    w = random_one_var(rng, 2)
    fv = SymmetricSymbol.spectral(v, N)
    gw = SymmetricSymbol.spectral(w, N)
    gs = semiclassics.g_sequence(fv, gw)
    signed_ok = all(
        gr == cochain_C(r, v, w) * (-1 if r % 2 else 1)
        for r, gr in enumerate(gs))
    displayed_ok = all(gr == cochain_C(r, v, w) for r, gr in enumerate(gs))
    res.assertions.append(check(
        "spectral expansion coefficients equal (-1)^r C_r(v, w) exactly",
        signed_ok))
    res.values["display_mismatch"] = {
        "spectral_cochains": "the unsigned display C_r(v, w) matches only at "
        "even orders; the operator-exact coefficients carry (-1)^r",
        "displayed_form_holds": displayed_ok}
    return res.finalize()


def exp_sber_7_2(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = cfg.N
    v = random_one_var(rng, 2)
    f = SymmetricSymbol.spectral(v, N)
    worst_sym = 0.0
    x = CQ(Fraction(1, 2), Fraction(-1, 3))
    series = toeplitz.berezin_heat_exact(f, [x] * N)  # exact object path
    scalar = semiclassics.scalar_heat_expansion(v, x)
    for p in range(max(series.degree(), scalar.degree()) + 1):
        M = series.coeff(p)
        s = scalar.coeff(p)
        s = 0 if s is None else s
        for i in range(N):
            for j in range(N):
                want = complex(s) if i == j else 0.0
                got = 0.0 if M is None else complex(M[i, j])
                worst_sym = max(worst_sym, abs(got - want))
    res.assertions.append(check(
        "transform of a spectral symbol at a scalar point is the scalar "
        "heat transform times I (exact in h)", worst_sym <= 1e-13,
        observed=worst_sym))

    # truncated-operator pipeline agrees within 1e-9
    worst_op = 0.0
    for h in (1.0, 0.5, 0.25):
        K = cfg.cutoff
        T = toeplitz.toeplitz_u_invariant(f, h, K)
        xf = complex(x)
        W = toeplitz.berezin_of_operator(
            T, "normal", N, h, K, xf * np.eye(N), strict=False)
        heat_val = complex(sum(
            (0 if scalar.coeff(p) is None else complex(scalar.coeff(p))) * h ** p
            for p in range(scalar.degree() + 1)))
        worst_op = max(worst_op, float(np.max(np.abs(W - heat_val * np.eye(N)))))
    res.assertions.append(check(
        "coherent-state pipeline matches the exact transform within 1e-9 "
        "at K=40", worst_op <= 1e-9, observed=worst_op, bound=1e-9))
    return res.finalize()


def exp_moment_remark_7(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    table = {}
    corrected_ok = True
    displayed_ok = True
    for N in (1, 2, 3):
        for k in range(0, 9):
            lhs, rhs = kernels.nu_N_moment_check(N, k)
            table[f"N{N}_k{k}"] = {"integral": str(lhs), "product_formula": str(rhs),
                                   "ratio": str(lhs / rhs)}
            displayed_ok = displayed_ok and lhs == rhs
            corrected_ok = corrected_ok and lhs == math.factorial(N) * rhs
    res.values["moments"] = table
    res.values["display_mismatch"] = {
        "nu_moment_density": "the displayed density integrates to N! times "
        "the product formula; the N!-corrected identity holds exactly",
        "displayed_identity_holds": displayed_ok}
    res.assertions.append(check(
        "moment identity holds exactly after the N! normalization", corrected_ok))
    tail_ok = True
    for N in (2, 3, 4):
        tail = kernels.trh_tail_sequence(N, 10)
        nonzero = sum(1 for t in tail if t != 0)
        tail_ok = tail_ok and nonzero <= N - 2
    res.assertions.append(check(
        "the obstruction tail sequence has at most N-2 nonzero terms", tail_ok))
    return res.finalize()


def exp_expansion_8_1(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    exact_ok = True
    for N in (2, 3):
        for _ in range(5):
            f = random_symmetric(rng, N)
            g = random_symmetric(rng, N)
            c = CQ(Fraction(int(rng.integers(-2, 3)), 2),
                   Fraction(int(rng.integers(-2, 3)), 3))
            heat = toeplitz.chain_berezin_exact([f], c)
            lr = HPolynomial([semiclassics.l_r(f, r).eval([c])
                              for r in range(f.degree() // 2 + 2)])
            exact_ok = exact_ok and heat == lr
            prod = toeplitz.chain_berezin_exact([f, g], c)
            R = semiclassics.full_order(f, g)
            mr = HPolynomial([semiclassics.m_r(f, g, r).eval([c])
                              for r in range(R + 1)])
            exact_ok = exact_ok and prod == mr
            rec = semiclassics.heat_of_gsequence(semiclassics.g_sequence(f, g))
            recv = HPolynomial([None if u is None else u.eval([c])
                                for u in rec.coeffs])
            exact_ok = exact_ok and prod == recv
    res.assertions.append(check(
        "heat, product and reconstruction expansions hold coefficientwise "
        "exactly (rational path, N=2,3)", exact_ok))
    return res.finalize()


def exp_quantize_8_3(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = cfg.N
    f = random_symmetric(rng, N)
    g = random_symmetric(rng, N)
    gs = semiclassics.g_sequence(f, g)
    closed = semiclassics.g_sequence_closed_form(f, g)
    same = all((gs[r] if r < len(gs) else PolySymbol.zero(1))
               == (closed[r] if r < len(closed) else PolySymbol.zero(1))
               for r in range(max(len(gs), len(closed))))
    res.assertions.append(check(
        "recursion output equals the closed form term by term", same))

    c = CQ(Fraction(1, 2), Fraction(1, 3))
    prod = toeplitz.chain_berezin_exact([f, g], c)
    rec = semiclassics.heat_of_gsequence(gs)
    recv = HPolynomial([None if u is None else u.eval([c]) for u in rec.coeffs])
    res.assertions.append(check(
        "spectral reconstruction reproduces the product transform exactly",
        prod == recv))

    # uniqueness: zeroing any one coefficient breaks the identity at its order
    unique_ok = True
    for m in range(len(gs)):
        if gs[m].is_zero():
            continue
        mutated = list(gs)
        mutated[m] = PolySymbol.zero(1)
        broken = semiclassics.heat_of_gsequence(mutated)
        brokenv = HPolynomial([None if u is None else u.eval([c])
                               for u in broken.coeffs])
        diff = prod - brokenv
        first_bad = next((p for p in range(diff.degree() + 1)
                          if diff.coeff(p) is not None
                          and abs(complex(diff.coeff(p))) > 0), None)
        unique_ok = unique_ok and first_bad == m
    res.assertions.append(check(
        "zeroing any order-m coefficient first breaks the identity at "
        "order m (uniqueness)", unique_ok))

    g1_fg = semiclassics.g_sequence(f, g, 1)[1]
    g1_gf = semiclassics.g_sequence(g, f, 1)[1]
    bracket = poisson_reduced(f.flat(), g.flat())
    antisym = g1_fg - g1_gf
    res.assertions.append(check(
        "order-one antisymmetrization equals -(i/2pi){f_flat, g_flat} exactly",
        antisym == -1 * bracket))
    res.values["display_mismatch"] = {
        "poisson_identity_sign": "the displayed identity carries +(i/2pi); "
        "the operator-exact antisymmetrization has the opposite sign",
        "displayed_form_holds": antisym == bracket}
    return res.finalize()


def exp_projection_8_5(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = cfg.N
    K = cfg.cutoff
    worst = 0.0
    for h in (0.5, 0.25):
        for _ in range(5):
            f = random_symmetric(rng, N)
            g = random_symmetric(rng, N)
            left = toeplitz.toeplitz_u_invariant(f, h, K) @ \
                toeplitz.toeplitz_u_invariant(g, h, K)
            hfrac = Fraction(str(h))
            right = toeplitz.lift_u_invariant(f, hfrac, K) @ \
                toeplitz.lift_u_invariant(g, hfrac, K)
            worst = max(worst, float(np.max(np.abs(left - right))))
    res.assertions.append(check(
        "truncated product reduces to the projected scalar product tensor "
        "identity within 1e-10 (K=40, h=1/2,1/4)", worst <= 1e-10,
        observed=worst, bound=1e-10))

    # projection expansion against a pointwise Gaussian-integral oracle
    proj_ok = True
    h = Fraction(1, 3)
    for _ in range(5):
        f = random_symmetric(rng, N)
        z0 = CQ(Fraction(1, 2), Fraction(-1, 4))
        via_series = toeplitz.p_h_projection(f, h).eval([z0])
        tail = f.base.subs_value(0, z0)
        spec = GaussianSpec.iid(N - 1, h)
        via_wick = wick_moment(spec, tail)
        proj_ok = proj_ok and via_series == via_wick
    res.assertions.append(check(
        "trailing-variable projection matches the direct Gaussian moment "
        "exactly", proj_ok))
    return res.finalize()


def exp_star_assoc(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(experiment=cfg.experiment, config=cfg)
    rng = derive_rng(cfg.seed, cfg.experiment)
    N = cfg.N
    worst = 0.0
    oracle_ok = True
    for _ in range(10):
        f = random_symmetric(rng, N, terms=3)
        g = random_symmetric(rng, N, terms=3)
        k = random_symmetric(rng, N, terms=3)
        defect = semiclassics.star_associativity_defect(f, g, k, R=2)
        for p in range(defect.degree() + 1):
            cdef = defect.coeff(p)
            if cdef is not None:
                worst = max(worst, cdef.max_abs_coeff())
    res.assertions.append(check(
        "associativity defect coefficients vanish through h^2 (<= 1e-10)",
        worst <= 1e-10, observed=worst, bound=1e-10))

    # independent oracle: the full star series of either association order
    # reconstructs the exact triple-chain transform
    f = random_symmetric(rng, N, terms=2)
    g = random_symmetric(rng, N, terms=2)
    k = random_symmetric(rng, N, terms=2)
    c = CQ(Fraction(1, 2), Fraction(1, 5))
    Rfull = (f.degree() + g.degree() + k.degree()) // 2 + 1
    chain = toeplitz.chain_berezin_exact([f, g, k], c)
    for first in (True, False):
        if first:
            inner = semiclassics.star_product(f, g, Rfull)
            series = _assoc_series(inner, k, N, Rfull, symbol_first=False)
        else:
            inner = semiclassics.star_product(g, k, Rfull)
            series = _assoc_series(inner, f, N, Rfull, symbol_first=True)
        rec = HPolynomial.zero()
        for m, um in enumerate(series.coeffs):
            if um is None:
                continue
            rec = rec + semiclassics.scalar_heat_series(um).shift(m)
        recv = HPolynomial([None if u is None else u.eval([c])
                            for u in rec.coeffs])
        oracle_ok = oracle_ok and recv == chain
    res.assertions.append(check(
        "both association orders reconstruct the exact triple-factor "
        "transform (operator-composition oracle)", oracle_ok))

    # numeric truncated-operator cross-check at one point
    h = 0.5
    K = cfg.cutoff
    T = (toeplitz.toeplitz_u_invariant(f, h, K)
         @ toeplitz.toeplitz_u_invariant(g, h, K)
         @ toeplitz.toeplitz_u_invariant(k, h, K))
    x = 0.4 + 0.2j
    W = toeplitz.berezin_of_operator(T, "normal", N, h, K, x * np.eye(N))
    chain_x = toeplitz.chain_berezin_exact(
        [f, g, k], CQ(Fraction(2, 5), Fraction(1, 5)))
    val = chain_x.eval(Fraction(1, 2))
    val = 0 if val is None else complex(val)
    worst_op = float(np.max(np.abs(W - val * np.eye(N))))
    res.assertions.append(check(
        "truncated triple composition matches the exact transform within "
        "1e-8 at K=40", worst_op <= 1e-8, observed=worst_op, bound=1e-8))
    return res.finalize()


def _assoc_series(inner: HPolynomial, sym: SymmetricSymbol, N: int, R: int,
                  symbol_first: bool) -> HPolynomial:
    from .hseries import from_power_dict
    out = {}
    for i, ci in enumerate(inner.coeffs):
        if ci is None or i > R:
            continue
        spectral = SymmetricSymbol.spectral(ci, N)
        pair = (sym, spectral) if symbol_first else (spectral, sym)
        for r, gr in enumerate(semiclassics.g_sequence(pair[0], pair[1],
                                                       R - i)):
            if gr.is_zero():
                continue
            key = i + r
            cur = out.get(key)
            out[key] = gr if cur is None else cur + gr
    return from_power_dict(out)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentEntry:
    id: str
    summary: str
    fn: object
    defaults: dict


REGISTRY = {e.id: e for e in [
    ExperimentEntry(
        "ck-check",
        "moment coefficients: closed formula vs combinatorial count vs "
        "Laplacian and Gaussian-moment routes",
        exp_ck_check, {"N": 4}),
    ExperimentEntry(
        "schur-haar",
        "Monte Carlo frame averages against the degree-2/4 unitary-group "
        "closed forms at N=2,3",
        exp_schur_haar, {"samples": 1_000_000}),
    ExperimentEntry(
        "thm-4-1",
        "full matrix domain, nilpotent point: value-at-zero limit and the "
        "sqrt(h) off-diagonal order",
        exp_thm_4_1, {}),
    ExperimentEntry(
        "thm-4-2",
        "full matrix domain, nilpotent point: trace-product limit of the "
        "double transform",
        exp_thm_4_2, {}),
    ExperimentEntry(
        "lemma-4-3",
        "exact h^0/h^1 coefficients of the coupled double integral, "
        "including the matrix bracket term",
        exp_lemma_4_3, {}),
    ExperimentEntry(
        "thm-5-1",
        "projection point on the normal domain: shared-sample entry "
        "identities with the identity and zero points",
        exp_thm_5_1, {"samples": 100_000}),
    ExperimentEntry(
        "thm-5-2",
        "projection point, double transform: shared-sample entry identities",
        exp_thm_5_2, {"samples": 50_000}),
    ExperimentEntry(
        "nulo-6-2",
        "transform of |det|^2 equals h^{N-1} X*X + h^N I exactly; zero-point "
        "expansion comparison",
        exp_nulo_6_2, {}),
    ExperimentEntry(
        "norm-example-6",
        "diagonal Gaussian-symbol operator: exact eigenvalues and the "
        "e^{-1} h^{N-1} norm scaling",
        exp_norm_example, {}),
    ExperimentEntry(
        "spectral-7-1",
        "spectral symbols: tensor reduction of products and the signed "
        "cochain expansion",
        exp_spectral_7_1, {}),
    ExperimentEntry(
        "sber-7-2",
        "spectral symbol at scalar points: scalar heat transform times the "
        "identity, exact and truncated-operator routes",
        exp_sber_7_2, {}),
    ExperimentEntry(
        "moment-remark-7",
        "moment identity for the comparison density and the finite "
        "obstruction tail",
        exp_moment_remark_7, {}),
    ExperimentEntry(
        "expansion-8-1",
        "heat, product and reconstruction expansions as exact h-polynomial "
        "identities (N=2,3)",
        exp_expansion_8_1, {}),
    ExperimentEntry(
        "quantize-8-3",
        "recursion vs closed form, reconstruction, uniqueness, and the "
        "order-one antisymmetrization",
        exp_quantize_8_3, {}),
    ExperimentEntry(
        "projection-8-5",
        "trailing-variable projection: tensor reduction at K=40 and the "
        "Gaussian-moment oracle",
        exp_projection_8_5, {}),
    ExperimentEntry(
        "star-assoc",
        "star-product associativity through h^2 with the operator-"
        "composition oracle",
        exp_star_assoc, {}),
]}


def apply_defaults(cfg: ExperimentConfig) -> ExperimentConfig:
    entry = REGISTRY.get(cfg.experiment)
    if entry is None:
        raise KeyError(f"unknown experiment id: {cfg.experiment!r}")
    model_defaults = ExperimentConfig()
    overrides = {}
    for key, value in entry.defaults.items():
        if getattr(cfg, key) == getattr(model_defaults, key):
            overrides[key] = value
    return cfg.override(**overrides) if overrides else cfg


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg = apply_defaults(cfg)
    entry = REGISTRY[cfg.experiment]
    t0 = time.perf_counter()
    result = entry.fn(cfg)
    result.wall_clock_s = time.perf_counter() - t0
    return result


def run_all(base: ExperimentConfig, jobs: int = 1) -> list[ExperimentResult]:
    ids = sorted(REGISTRY)
    configs = [base.override(experiment=i) for i in ids]
    if jobs <= 1:
        return [run_experiment(c) for c in configs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_experiment, configs))
