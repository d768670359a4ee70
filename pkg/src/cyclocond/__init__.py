"""Exact cyclotomic polynomials and conditioning of (quasi-)Vandermonde matrices.

The submodules are

* :mod:`cyclocond.intpoly` exact integer polynomials (Phi_n, Phi_n^+, Chebyshev families);
* :mod:`cyclocond.mpnum` extended-precision matrices, inversion and condition numbers;
* :mod:`cyclocond.construct` nodes, matrix builders and the K_{4p}^+ factorization;
* :mod:`cyclocond.lwe` PLWE samples and the noise-amplification experiment;
* :mod:`cyclocond.cli` the ``cyclocond`` command.
"""

from .construct import (
    Factorization,
    conditioning_table,
    cond_vandermonde_cyclotomic,
    cond_vandermonde_real,
    factorize,
    kuian_reference,
    psi_nodes,
    verify_bounds,
)
from .intpoly import IntPolynomial, cyclotomic, real_cyclotomic
from .mpnum import CondReport, PrecMatrix, cond, invert

__version__ = "0.1.0"

__all__ = [
    "IntPolynomial",
    "cyclotomic",
    "real_cyclotomic",
    "PrecMatrix",
    "CondReport",
    "cond",
    "invert",
    "Factorization",
    "factorize",
    "verify_bounds",
    "psi_nodes",
    "cond_vandermonde_real",
    "cond_vandermonde_cyclotomic",
    "kuian_reference",
    "conditioning_table",
]
