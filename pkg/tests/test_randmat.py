"""Samplers, Monte Carlo integration, and the exact Wick engine."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from btq.exact import CQ
from btq.randmat import (GaussianSpec, derive_rng, haar_column4_moment,
                         haar_conjugation_mean, haar_kappa, haar_pair_moment,
                         mc_integrate, sample_gaussian, sample_ginibre,
                         sample_ginibre_batch, sample_haar, sample_haar_batch,
                         sample_normal_mu_h_batch, unitarity_defect,
                         wick_moment, wick_moment_series)
from btq.symcalc import MatrixPoly, PolySymbol


def rand_monomial(rng, nvars, maxdeg):
    a = [0] * nvars
    b = [0] * nvars
    for _ in range(rng.randint(0, maxdeg)):
        a[rng.randrange(nvars)] += 1
    for _ in range(rng.randint(0, maxdeg)):
        b[rng.randrange(nvars)] += 1
    return PolySymbol.monomial(nvars, a, b, CQ(1))


class TestGaussianSpec:
    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            GaussianSpec(2, (CQ(0), CQ(0)),
                         ((1, 1j), (0.5j, 1)))

    def test_non_pd_rejected(self):
        with pytest.raises(ValueError):
            GaussianSpec(1, (CQ(0),), ((-1,),))

    def test_chain_spec_passes_real_part_check(self):
        spec = GaussianSpec.kernel_chain(2, 3, CQ(1))
        assert not spec.hermitian
        assert spec.pairing[2][0] == 1 and spec.pairing[0][2] == CQ(0)


class TestWickMoments:
    def test_pair_moment_matches_1d_oracle(self):
        # E[y_ij ybar_kl] = h delta delta; oracle: the 1-D Gaussian integral
        h = Fraction(1, 3)
        spec = GaussianSpec.iid(4, h)
        for i in range(4):
            for j in range(4):
                p = PolySymbol.variable(4, i) * PolySymbol.conj_variable(4, j)
                assert wick_moment(spec, p) == (h if i == j else 0)

    def test_fourth_moment(self):
        spec = GaussianSpec.iid(1, Fraction(1, 2))
        zz = PolySymbol.variable(1, 0) * PolySymbol.conj_variable(1, 0)
        assert wick_moment(spec, zz * zz) == 2 * Fraction(1, 2) ** 2

    def test_odd_degree_vanishes_exactly(self):
        rng = random.Random(17)
        spec = GaussianSpec.iid(3, 1)
        for _ in range(30):
            p = rand_monomial(rng, 3, 4)
            (a, b), = p.terms.keys()
            if sum(a) != sum(b):
                assert wick_moment(spec, p) == CQ(0)

    def test_change_of_variable_identity(self):
        # integral of f d mu_h = sum_j h^j Delta^j f(0) / j!, both exact
        rng = random.Random(18)
        h = Fraction(2, 7)
        spec = GaussianSpec.iid(2, h)
        for _ in range(10):
            f = PolySymbol.zero(2)
            for _ in range(4):
                f = f + rand_monomial(rng, 2, 3) * CQ(rng.randint(-3, 3))
            lhs = wick_moment(spec, f)
            rhs = CQ(0)
            cur = f
            j = 0
            while not cur.is_zero():
                rhs = rhs + cur.eval([CQ(0)] * 2) * Fraction(h ** j,
                                                             math.factorial(j))
                cur = cur.laplacian()
                j += 1
            assert lhs == rhs

    def test_constant_under_chain_spec_is_one(self):
        # normalization of the coupled kernel Gaussian: critical value zero
        for length in (1, 2, 3):
            spec = GaussianSpec.kernel_chain(2, length, CQ(1, 2))
            one = PolySymbol.one(2 * length)
            assert wick_moment(spec, one) == CQ(1)

    def test_series_mode_tracks_pairings(self):
        spec = GaussianSpec.iid(1, 1)
        zz = PolySymbol.variable(1, 0) * PolySymbol.conj_variable(1, 0)
        s = wick_moment_series(spec, zz * zz)
        assert s.coeff(2) == CQ(2) and s.coeff(1) is None

    def test_mean_shift(self):
        spec = GaussianSpec.iid(1, Fraction(1, 4), mean=(CQ(2, 1),))
        zz = PolySymbol.variable(1, 0) * PolySymbol.conj_variable(1, 0)
        assert wick_moment(spec, zz) == CQ(5) + Fraction(1, 4)  # |2+i|^2 + h

    def test_degree_guard(self):
        spec = GaussianSpec.iid(1, 1)
        z = PolySymbol.variable(1, 0)
        big = PolySymbol.monomial(1, (21,), (21,), CQ(1))
        with pytest.raises(ValueError):
            wick_moment(spec, big)

    def test_contraction_operator_oracle(self):
        # independent route: exp(sum C_ij d^2/dz_i dzbar_j) at the mean
        rng = random.Random(19)
        spec = GaussianSpec.kernel_chain(1, 2, CQ(1))
        for _ in range(10):
            f = PolySymbol.zero(2)
            for _ in range(3):
                f = f + rand_monomial(rng, 2, 2) * CQ(rng.randint(-2, 2))
            got = wick_moment(spec, f)
            # contraction: pairings (0,0), (1,1) weight 1 and (1,0) weight 1
            cur = f
            total = CQ(0)
            fact = 1
            order = 0
            while not cur.is_zero():
                total = total + cur.eval([CQ(1), CQ(1)]) * Fraction(1, fact)
                cur = (cur.wirtinger(0).wirtinger(0, True)
                       + cur.wirtinger(1).wirtinger(1, True)
                       + cur.wirtinger(1).wirtinger(0, True))
                order += 1
                fact *= order
            assert got == total


class TestSamplers:
    def test_ginibre_covariance(self):
        rng = derive_rng(1, "ginibre")
        n = 200_000
        Z = sample_ginibre_batch(2, 0.5, n, rng)
        # E[Z* Z] = h N I  (second moment of the matrix measure)
        M = np.einsum("bji,bjk->ik", Z.conj(), Z) / n
        assert np.max(np.abs(M - 0.5 * 2 * np.eye(2))) < 0.02
        # E|z_11|^4 = 2 h^2
        m4 = np.mean(np.abs(Z[:, 0, 0]) ** 4)
        assert abs(m4 - 2 * 0.25) < 0.02

    def test_ginibre_rejects_bad_h(self):
        with pytest.raises(ValueError):
            sample_ginibre(2, 0.0, derive_rng(0, "x"))

    def test_haar_unitarity_and_determinism(self):
        U = sample_haar(3, derive_rng(7, "haar"))
        assert unitarity_defect(U) < 1e-10
        V = sample_haar(3, derive_rng(7, "haar"))
        assert np.array_equal(U, V)

    def test_haar_pair_moment(self):
        rng = derive_rng(2, "haar-m2")
        n = 100_000
        U = sample_haar_batch(2, n, rng)
        est = np.mean(np.abs(U[:, 0, 0]) ** 2)
        assert abs(est - 0.5) < 4 / math.sqrt(n)
        assert haar_pair_moment(2, 0, 0, 0, 0) == Fraction(1, 2)

    def test_haar_conjugation_invariant(self):
        rng = derive_rng(3, "haar-conj")
        n = 100_000
        for _ in range(3):
            X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            U = sample_haar_batch(2, n, rng)
            est = np.einsum("bij,jk,blk->il", U, X, U.conj()) / n
            se = np.abs(X).max() / math.sqrt(n)
            assert np.max(np.abs(est - haar_conjugation_mean(X))) < 5 * se

    def test_normal_measure_moments(self):
        rng = derive_rng(4, "normal-mu")
        n = 150_000
        h = 0.5
        U, d = sample_normal_mu_h_batch(2, h, n, rng)
        Z = np.einsum("bij,bj,bkj->bik", U, d, U.conj())
        # E[Z] = 0 by sign symmetry
        assert np.max(np.abs(Z.mean(axis=0))) < 0.02
        # E[Z* Z] = 1! h I and E[Z*^2 Z^2] = 2 h^2 I
        M1 = np.einsum("bji,bjk->ik", Z.conj(), Z) / n
        assert np.max(np.abs(M1 - h * np.eye(2))) < 0.02
        Z2 = np.einsum("bij,bjk->bik", Z, Z)
        M2 = np.einsum("bji,bjk->ik", Z2.conj(), Z2) / n
        assert np.max(np.abs(M2 - 2 * h * h * np.eye(2))) < 0.05

    def test_gaussian_spec_sampler(self):
        spec = GaussianSpec(2, (CQ(1), CQ(0)),
                            ((Fraction(2), Fraction(1, 2)),
                             (Fraction(1, 2), Fraction(1),)))
        rng = derive_rng(5, "spec-sample")
        z = sample_gaussian(spec, 200_000, rng)
        mu = z.mean(axis=0)
        assert np.max(np.abs(mu - np.array([1, 0]))) < 0.02
        zc = z - np.array([1.0, 0.0])
        C = np.einsum("bi,bj->ij", zc, zc.conj()) / len(z)
        assert np.max(np.abs(C - spec.pairing_matrix())) < 0.03


class TestMonteCarlo:
    def test_constant(self):
        mean, err = mc_integrate(lambda r, m: np.ones(m), 2000,
                                 derive_rng(0, "const"))
        assert mean == 1.0 and err == 0.0

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            mc_integrate(lambda r, m: np.ones(m), 10, derive_rng(0, "few"))

    def test_nan_guard(self):
        def bad(r, m):
            out = np.ones(m)
            out[0] = np.nan
            return out
        with pytest.raises(FloatingPointError):
            mc_integrate(bad, 2000, derive_rng(0, "nan"))

    def test_haar_degree4_value(self):
        # N=2, a=j=k=b=l=1: closed form 2/(N(N+1)) = 1/3
        rng = derive_rng(6, "mc-col4")

        def f(r, m):
            U = sample_haar_batch(2, m, r)
            c = U[:, 0, 0]
            return np.abs(c) ** 4

        mean, err = mc_integrate(f, 200_000, rng)
        assert abs(mean - 1 / 3) <= 4 * err
        assert haar_column4_moment(2, 0, 0, 0, 0) == Fraction(1, 3)
        assert haar_kappa(2, 0, 0, 0, 0) == Fraction(2, 3)

    def test_seeded_determinism_bit_identical(self):
        def f(r, m):
            return r.standard_normal(m)
        a = mc_integrate(f, 5000, derive_rng(42, "det"))
        b = mc_integrate(f, 5000, derive_rng(42, "det"))
        assert a[0] == b[0] and a[1] == b[1]

    def test_wick_vs_mc_random_monomials(self):
        # 20 random monomials of degree <= 6 under a correlated Gaussian
        pyrng = random.Random(20)
        spec = GaussianSpec(2, (CQ(0), CQ(0)),
                            ((Fraction(1), Fraction(1, 3)),
                             (Fraction(1, 3), Fraction(1))))
        checked = 0
        attempts = 0
        while checked < 20 and attempts < 200:
            attempts += 1
            p = rand_monomial(pyrng, 2, 3)
            (a, b), = p.terms.keys()
            if sum(a) + sum(b) > 6 or sum(a) != sum(b):
                continue
            exact = complex(wick_moment(spec, p))
            rng = derive_rng(100 + checked, "wick-mc")

            def f(r, m, p=p):
                z = sample_gaussian(spec, m, r)
                val = np.ones(m, dtype=complex)
                for v, q in enumerate(p_alpha):
                    val = val * z[:, v] ** q
                for v, q in enumerate(p_beta):
                    val = val * z[:, v].conj() ** q
                return val

            p_alpha, p_beta = a, b
            mean, err = mc_integrate(f, 120_000, rng)
            tol = 4 * max(float(err), 1e-4)
            assert abs(mean - exact) <= tol, (p, mean, exact)
            checked += 1
        assert checked == 20
