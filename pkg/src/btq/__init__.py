"""Symbolic-numeric toolkit for coherent-state quantization over matrix
domains: exact Wick calculus, reproducing kernels, truncated Toeplitz
operators, semiclassical expansions, and a reproducible experiment runner.
"""

from .exact import CQ
from .hseries import HPolynomial
from .symcalc import (MatrixPoly, PolySymbol, SymmetricSymbol, cochain_C,
                      double_bracket, flat, laplacian, m_operator,
                      poisson_1d, poisson_reduced, sharp_eval, wirtinger)
from .randmat import (GaussianSpec, derive_rng, mc_integrate, sample_ginibre,
                      sample_haar, sample_normal_mu_h, wick_moment,
                      wick_moment_series)
from .kernels import c_k_combinatorial, c_k_formula, kernel, nu_N_moment_check

__all__ = [
    "CQ", "HPolynomial", "MatrixPoly", "PolySymbol", "SymmetricSymbol",
    "cochain_C", "double_bracket", "flat", "laplacian", "m_operator",
    "poisson_1d", "poisson_reduced", "sharp_eval", "wirtinger",
    "GaussianSpec", "derive_rng", "mc_integrate", "sample_ginibre",
    "sample_haar", "sample_normal_mu_h", "wick_moment", "wick_moment_series",
    "c_k_combinatorial", "c_k_formula", "kernel", "nu_N_moment_check",
]

__version__ = "0.1.0"
