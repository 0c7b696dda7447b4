"""Exact-arithmetic models of Poisson structures on flag configuration spaces.

The package computes, over the rationals, Bruhat-type factorizations in
SL(r+1), canonical forms for twisted products of flag varieties, the
configuration groupoids living over them, their symplectic-leaf data, and
first/second order jet checks of the Poisson-geometric identities tying all
of these together.
"""

__version__ = "0.1.0"
