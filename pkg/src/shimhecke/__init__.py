"""Exact computation of Hecke-operator matrices on genus-zero Shimura curves.

The pipeline works entirely in exact arithmetic (rationals, cyclotomic fields,
formal radicals, truncated Puiseux series) and verifies its outputs against
shipped fixture tables; a small floating-point module handles the analytic
continuations used to pin discrete root-of-unity choices and to verify the
hypergeometric special-value identities.
"""

__version__ = "0.1.0"
