"""Moment coefficients, reproducing kernels, and the moment-density remark."""

import math
from fractions import Fraction

import numpy as np
import pytest

from btq.exact import CQ
from btq.kernels import (c_k_combinatorial, c_k_formula, c_k_large_branch,
                         kernel, moment_product_formula, nu_N_moment_check,
                         nu_N_moment_lhs, trh_tail_sequence)
from btq.randmat import GaussianSpec, derive_rng, sample_ginibre_batch, wick_moment
from btq.symcalc import MatrixPoly


class TestCoefficients:
    def test_spot_values(self):
        for N in range(1, 5):
            assert c_k_formula(N, 0) == 1
            assert c_k_formula(N, 1) == N
            assert c_k_formula(N, 2) == N * N + 1

    def test_combinatorial_matches_formula(self):
        for N in (1, 2, 3, 4):
            for k in range(0, 7):
                assert c_k_combinatorial(N, k) == c_k_formula(N, k), (N, k)

    def test_specific_count(self):
        assert c_k_combinatorial(2, 2) == 5

    def test_large_branch_equality(self):
        for N in (1, 2, 3, 4):
            for k in range(N - 1, 8):
                assert c_k_large_branch(N, k) == c_k_formula(N, k)

    def test_resource_guard(self):
        with pytest.raises(ValueError):
            c_k_combinatorial(4, 8)

    def test_always_integer(self):
        for N in range(1, 5):
            for k in range(0, 12):
                assert isinstance(c_k_formula(N, k), int)


class TestKernel:
    def test_nilpotent_closed_form(self):
        X = np.array([[0, 1], [0, 0]], dtype=complex)
        rng = derive_rng(0, "kern")
        Y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = 0.3
        ke = kernel("full", X, Y, h)
        assert np.allclose(ke.value, np.eye(2) + X @ Y.conj().T / (2 * h))
        assert ke.terms_used == 2

    def test_projection_decomposition(self):
        X = np.diag([1.0, 0.0]).astype(complex)
        rng = derive_rng(1, "kern")
        Y = 0.5 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        Y = Y @ Y.conj().T  # normal (Hermitian) test point
        h = 0.4
        ke = kernel("normal", X, Y, h)
        KI = kernel("normal", np.eye(2, dtype=complex), Y, h).value
        assert np.allclose(ke.value, (np.eye(2) - X) + X @ KI)

    def test_projection_self_kernel(self):
        X = np.diag([1.0, 0.0]).astype(complex)
        h = 0.25
        ke = kernel("normal", X, X, h)
        assert np.allclose(ke.value, np.diag([math.exp(1 / h), 1.0]))

    def test_hermitian_symmetry_and_psd(self):
        rng = derive_rng(2, "kern-sym")
        for domain in ("full", "normal"):
            for _ in range(10):
                X = 0.6 * (rng.standard_normal((2, 2))
                           + 1j * rng.standard_normal((2, 2)))
                Y = 0.6 * (rng.standard_normal((2, 2))
                           + 1j * rng.standard_normal((2, 2)))
                KXY = kernel(domain, X, Y, 0.7).value
                KYX = kernel(domain, Y, X, 0.7).value
                assert np.allclose(KXY.conj().T, KYX, atol=1e-10)
                KXX = kernel(domain, X, X, 0.7).value
                assert np.min(np.linalg.eigvalsh(
                    (KXX + KXX.conj().T) / 2)) >= -1e-12

    def test_bad_arguments(self):
        X = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            kernel("full", X, X, -1.0)
        with pytest.raises(ValueError):
            kernel("weird", X, X, 1.0)


class TestReproducingProperty:
    def test_full_domain_termwise(self):
        # integral of K_h(X, Y) Y^k chi d mu_h(Y) = X^k chi, evaluated
        # termwise with the exact Gaussian engine on the truncated series
        N = 2
        h = Fraction(1, 2)
        Y = MatrixPoly.matrix_variable(N)
        spec = GaussianSpec.iid(N * N, h)
        Xn = np.array([[0.3 + 0.2j, -0.1], [0.4j, -0.25]], dtype=complex)
        powers = [np.linalg.matrix_power(Xn, m) for m in range(8)]
        for k in range(0, 4):
            # sum_m X^m [int Y*^m Y^k dmu] / (c_m h^m); only m = k survives
            acc = np.zeros((N, N), dtype=complex)
            Ym = MatrixPoly.identity(N, N * N)
            Yk = MatrixPoly.identity(N, N * N)
            for _ in range(k):
                Yk = Yk @ Y
            for m in range(0, 7):
                mom = (Ym.adjoint() @ Yk)
                vals = np.array([[complex(wick_moment(spec, p)) for p in row]
                                 for row in mom.entries])
                acc += powers[m] @ vals / (c_k_formula(N, m) * float(h) ** m)
                Ym = Ym @ Y
            expect = powers[k]
            assert np.max(np.abs(acc - expect)) < 1e-10, k

    def test_basis_gram_identity(self):
        # Gram matrix of Z^k chi_j under both domains is the identity
        N = 2
        h = Fraction(1, 3)
        Y = MatrixPoly.matrix_variable(N)
        spec = GaussianSpec.iid(N * N, h)
        for k in range(0, 5):
            for l in range(0, 5):
                Yk = MatrixPoly.identity(N, N * N)
                for _ in range(k):
                    Yk = Yk @ Y
                Yl = MatrixPoly.identity(N, N * N)
                for _ in range(l):
                    Yl = Yl @ Y
                mom = Yl.adjoint() @ Yk
                vals = [[wick_moment(spec, p) for p in row]
                        for row in mom.entries]
                want = c_k_formula(N, k) * h ** k if k == l else 0
                for i in range(N):
                    for j in range(N):
                        assert vals[i][j] == (want if i == j else 0)


class TestMomentDensity:
    def test_displayed_density_off_by_factorial(self):
        for N in (1, 2, 3):
            for k in range(0, 9):
                lhs, rhs = nu_N_moment_check(N, k)
                assert lhs == math.factorial(N) * rhs, (N, k)

    def test_product_formula_values(self):
        assert moment_product_formula(1, 0) == 1
        assert moment_product_formula(2, 1) == 2
        assert nu_N_moment_lhs(1, 3) == 6  # plain Gaussian moments at N=1

    def test_tail_sequence_support(self):
        for N in (2, 3, 4):
            tail = trh_tail_sequence(N, 10)
            nonzero = [k + 1 for k, t in enumerate(tail) if t != 0]
            assert len(nonzero) <= N - 2
            assert all(k <= N - 2 for k in nonzero)
