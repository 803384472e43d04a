"""Exact and high-precision tools for two-variable Hecke-Mahler series over
real quadratic fields: quadratic numbers, complete modules, torus actions,
closed-form cone sums, series evaluation and the semi-freeness decision."""

__version__ = "0.1.0"
