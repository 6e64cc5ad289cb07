"""Exact arithmetic for pencils of cyclic norm equations over Q.

Modules: ``arith`` (rationals, valuations, CRT, primality), ``characters``
(Dirichlet characters and local invariants), ``hilbert`` (Hilbert symbols),
``constellation`` (prime values of linear forms), ``tau`` (parameters with
prescribed local behaviour), ``norms`` (quadratic norm equations) and
``pipeline`` (the end-to-end solver and certificate checker).
"""

from .arith import valuation, crt_lift, is_prime, factorize
from .characters import CyclicExtension, DirichletCharacter, local_invariant, quadratic_field, reciprocity_sum
from .hilbert import REAL, hilbert_symbol, local_norm_test
from .pipeline import Instance, LocalData, SolutionCertificate, solve, verify_certificate

__all__ = [
    "REAL",
    "CyclicExtension",
    "DirichletCharacter",
    "Instance",
    "LocalData",
    "SolutionCertificate",
    "crt_lift",
    "factorize",
    "hilbert_symbol",
    "is_prime",
    "local_invariant",
    "local_norm_test",
    "quadratic_field",
    "reciprocity_sum",
    "solve",
    "valuation",
    "verify_certificate",
]
