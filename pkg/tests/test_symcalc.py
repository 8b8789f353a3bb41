"""Polynomial ring, Wirtinger calculus, and the bidifferential operators."""

import random
from fractions import Fraction

import numpy as np
import pytest

from btq.exact import CQ
from btq.randmat import derive_rng, sample_haar
from btq.symcalc import (MatrixPoly, PolySymbol, SymmetricSymbol, cochain_C,
                         double_bracket, m_operator, poisson_1d,
                         poisson_reduced, restrict_pair_diagonal)

Z = PolySymbol.variable(1, 0)
ZB = PolySymbol.conj_variable(1, 0)


def rand_poly(rng, nvars, deg=2, terms=4):
    p = PolySymbol.zero(nvars)
    for _ in range(terms):
        a = [rng.randint(0, deg) for _ in range(nvars)]
        b = [rng.randint(0, deg) for _ in range(nvars)]
        p = p + PolySymbol.monomial(nvars, a, b,
                                    CQ(rng.randint(-4, 4), rng.randint(-4, 4)))
    return p


class TestRing:
    def test_ring_axioms_random_triples(self):
        rng = random.Random(11)
        for _ in range(25):
            a, b, c = (rand_poly(rng, 2) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + b == b + a

    def test_no_zero_coefficients_stored(self):
        p = Z - Z
        assert p.is_zero() and not p.terms
        q = Z * ZB + (-1) * (ZB * Z)
        assert not q.terms

    def test_conj_is_involution(self):
        rng = random.Random(3)
        for _ in range(10):
            p = rand_poly(rng, 3)
            assert p.conj().conj() == p

    def test_conj_swaps_indices(self):
        p = PolySymbol.monomial(2, (1, 0), (0, 2), CQ(1, 2))
        q = p.conj()
        assert q.terms == {((0, 2), (1, 0)): CQ(1, -2)}


class TestWirtinger:
    def test_product_monomial(self):
        assert (Z * ZB).wirtinger(0) == ZB

    def test_holomorphic_killed_by_dbar(self):
        assert (Z * Z).wirtinger(0, conjugate=True).is_zero()

    def test_power_rule(self):
        assert (Z * Z * ZB).wirtinger(0) == 2 * (Z * ZB)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            Z.wirtinger(1)

    def test_commutes_with_addition(self):
        rng = random.Random(5)
        for _ in range(10):
            p, q = rand_poly(rng, 2), rand_poly(rng, 2)
            assert (p + q).wirtinger(1) == p.wirtinger(1) + q.wirtinger(1)


class TestLaplacian:
    def test_single_variable(self):
        assert (Z * ZB).laplacian() == PolySymbol.one(1)

    def test_subset_additivity(self):
        rng = random.Random(7)
        for _ in range(10):
            p = rand_poly(rng, 3)
            full = p.laplacian([0, 1, 2])
            split = p.laplacian([0]) + p.laplacian([1, 2])
            assert full == split

    def test_det_squared_full_laplacian_is_factorial(self):
        import math
        for N in (2, 3):
            prod = PolySymbol.one(N)
            for j in range(N):
                v = PolySymbol.variable(N, j)
                prod = prod * v * v.conj()
            out = prod.laplacian(power=N)
            assert out == PolySymbol.constant(N, CQ(math.factorial(N)))

    def test_matrix_moment_identity(self):
        # Delta^k (Y*^k Y^k)(0) = k! c_k I
        from btq.kernels import c_k_formula
        import math
        N = 2
        Y = MatrixPoly.matrix_variable(N)
        Ys = Y.adjoint()
        P = MatrixPoly.identity(N, N * N)
        for k in range(1, 4):
            P = Ys @ P @ Y
            got = P.map(lambda p: p.laplacian(power=k)).at_zero()
            want = math.factorial(k) * c_k_formula(N, k)
            for i in range(N):
                for j in range(N):
                    assert got[i][j] == (want if i == j else 0)


class TestSymmetricSymbol:
    def test_rejects_asymmetric(self):
        p = PolySymbol.variable(3, 1)  # d_2 alone is not symmetric in d_2, d_3
        with pytest.raises(ValueError):
            SymmetricSymbol(p)

    def test_symmetrize_then_valid(self):
        rng = random.Random(1)
        f = SymmetricSymbol.symmetrize(rand_poly(rng, 3))
        SymmetricSymbol(f.base)  # re-validates

    def test_operations_preserve_symmetry(self):
        rng = random.Random(2)
        f = SymmetricSymbol.symmetrize(rand_poly(rng, 3))
        g = SymmetricSymbol.symmetrize(rand_poly(rng, 3))
        for out in (f + g, f * g, f.laplacian(), f.laplacian_tail()):
            SymmetricSymbol(out.base)

    def test_flat_examples(self):
        N = 3
        d = [PolySymbol.variable(N, j) for j in range(N)]
        f = SymmetricSymbol(d[0] + d[1] + d[2])
        assert f.flat() == PolySymbol.variable(1, 0)
        g = SymmetricSymbol.symmetrize(
            (d[0] * d[1]) * (d[0] * d[1]).conj())
        assert g.flat().is_zero()
        h = SymmetricSymbol(d[0] * d[0].conj() + PolySymbol.one(N))
        assert h.flat() == Z * ZB + PolySymbol.one(1)

    def test_flat_degree_bound(self):
        rng = random.Random(9)
        for _ in range(10):
            f = SymmetricSymbol.symmetrize(rand_poly(rng, 3))
            assert f.flat().degree() <= f.degree()


class TestSharpEval:
    def test_identity_frame_diagonal(self):
        f = SymmetricSymbol(PolySymbol.variable(2, 0))
        out = f.sharp_eval(np.eye(2), [2.0, 3.0])
        assert np.allclose(out, np.diag([2.0, 3.0]))

    def test_projection_symbol(self):
        # f = d_1 dbar_1 at D = diag(1, 0) gives the rank-one projection
        v = PolySymbol.variable(2, 0)
        f = SymmetricSymbol(v * v.conj())
        rng = derive_rng(4, "sharp")
        U = sample_haar(2, rng)
        out = f.sharp_eval(U, [1.0, 0.0])
        P = U @ np.diag([1.0, 0.0]) @ U.conj().T
        assert np.allclose(out, P)
        assert np.allclose(out @ out, out)

    def test_invariant_under_simultaneous_permutation(self):
        rng = random.Random(12)
        nprng = derive_rng(13, "sharp-perm")
        f = SymmetricSymbol.symmetrize(rand_poly(rng, 2))
        U = sample_haar(2, nprng)
        D = np.array([0.3 + 0.1j, -1.2 + 0.5j])
        P = np.array([[0, 1], [1, 0]], dtype=complex)
        base = f.sharp_eval(U, D)
        permuted = f.sharp_eval(U @ P, [D[1], D[0]])
        assert np.allclose(base, permuted)

    def test_non_unitary_rejected(self):
        f = SymmetricSymbol(PolySymbol.variable(2, 0))
        with pytest.raises(ValueError):
            f.sharp_eval(np.array([[1, 1], [0, 1]], dtype=complex), [1, 2])


class TestCochainsAndBracket:
    def test_order_zero_is_product(self):
        rng = random.Random(21)
        f, g = rand_poly(rng, 1), rand_poly(rng, 1)
        assert cochain_C(0, f, g) == f * g

    def test_order_one_values(self):
        assert cochain_C(1, Z, ZB) == PolySymbol.one(1)
        assert cochain_C(1, ZB, Z).is_zero()

    def test_antisymmetrization_identity(self):
        # C_1(f,g) - C_1(g,f) = (i/2pi){f,g} with the fixed convention,
        # checked exactly through the reduced bracket on 50 random pairs
        rng = random.Random(22)
        for _ in range(50):
            f, g = rand_poly(rng, 1), rand_poly(rng, 1)
            lhs = cochain_C(1, f, g) - cochain_C(1, g, f)
            assert lhs == poisson_reduced(f, g)

    def test_poisson_of_z_zbar(self):
        out = poisson_1d(Z, ZB)
        val = complex(out.constant_term())
        assert abs(val - (-2j * np.pi)) < 1e-12

    def test_poisson_antisymmetry(self):
        rng = random.Random(23)
        f = rand_poly(rng, 1)
        assert poisson_reduced(f, f).is_zero()

    def test_double_bracket_single_term(self):
        phi = MatrixPoly.scalar(2, PolySymbol.conj_variable(4, 0))
        psi = MatrixPoly.scalar(2, PolySymbol.variable(4, 0))
        bb = double_bracket(phi, psi)
        assert bb.entries[0][0] == PolySymbol.constant(4, CQ(Fraction(1, 2)))
        assert bb.entries[0][1].is_zero()
        assert bb.entries[1][1].is_zero()

    def test_double_bracket_constant_first_argument(self):
        phi = MatrixPoly.identity(2, 4)
        rng = random.Random(24)
        psi = MatrixPoly.scalar(2, rand_poly(rng, 4))
        assert double_bracket(phi, psi).is_zero()

    def test_double_bracket_trace_structure(self):
        # <<Y* phi(Y), psi(Z) Z>> at 0 equals (1/2) Tr phi(0) Tr psi(0) I.
        # The 1/2 (not 1/4) is what the exact coupled integral requires;
        # see the order-h oracle in the toeplitz tests.
        rng = random.Random(25)
        N = 2
        Y = MatrixPoly.matrix_variable(N)
        Ys = Y.adjoint()
        for _ in range(5):
            phi = MatrixPoly([[rand_poly(rng, 4, deg=1, terms=2)
                               for _ in range(N)] for _ in range(N)])
            psi = MatrixPoly([[rand_poly(rng, 4, deg=1, terms=2)
                               for _ in range(N)] for _ in range(N)])
            bb = double_bracket(Ys @ phi, psi @ Y).at_zero()
            tr_phi = sum(phi.entries[i][i].constant_term() for i in range(N))
            tr_psi = sum(psi.entries[i][i].constant_term() for i in range(N))
            want = tr_phi * tr_psi * Fraction(1, 2)
            for i in range(N):
                for j in range(N):
                    assert bb[i][j] == (want if i == j else 0)

    def test_shape_mismatch_rejected(self):
        phi = MatrixPoly.identity(2, 4)
        psi = MatrixPoly.identity(3, 9)
        with pytest.raises(ValueError):
            double_bracket(phi, psi)


class TestMOperator:
    def test_order_zero(self):
        rng = random.Random(31)
        f = SymmetricSymbol.symmetrize(rand_poly(rng, 2))
        g = SymmetricSymbol.symmetrize(rand_poly(rng, 2))
        out = m_operator(0, 1, 1, f, g)
        assert out == f.base.embed(4, 0) * g.base.embed(4, 2)

    def test_mixed_term_example(self):
        f = SymmetricSymbol(PolySymbol.variable(1, 0))
        g = SymmetricSymbol(PolySymbol.conj_variable(1, 0))
        out = m_operator(1, 1, 1, f, g)
        assert out == PolySymbol.one(2)

    def test_restriction_reproduces_one_variable(self):
        f = SymmetricSymbol(PolySymbol.variable(2, 0))
        g = SymmetricSymbol(PolySymbol.conj_variable(2, 0))
        out = restrict_pair_diagonal(m_operator(0, 1, 1, f, g), 2)
        assert out == Z * ZB

    def test_bad_indices(self):
        f = SymmetricSymbol(PolySymbol.variable(2, 0))
        with pytest.raises(ValueError):
            m_operator(1, 0, 1, f, f)
        with pytest.raises(ValueError):
            m_operator(1, 1, 3, f, f)
