"""Desk-scale numerical checks: zeta and Dirichlet L zeros on the critical
line, Chebyshev sums in progressions, linear-sieve bounds, and Goldbach and
twin-prime counts against a claimed lower bound."""

__version__ = "0.1.0"
