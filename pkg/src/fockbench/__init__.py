"""Exact workbench for semigroup operator-algebra combinatorics.

Constructible right ideals with brute-force oracles, truncated Fock
matrices, covariance checkers (projection conditions, Nica alignment,
Wick ordering, asymptotic core conditions) and finite-group crossed
products — all over exact Gaussian-rational or tolerant float scalars,
driven by JSON scenarios.
"""

__version__ = "0.1.0"
