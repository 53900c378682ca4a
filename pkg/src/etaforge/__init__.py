"""Exact q-series computer algebra for eta-quotients and class invariants.

Submodules:
  cyclotomic   exact arithmetic in Q(zeta_f)
  qseries      sparse truncated Puiseux series over cyclotomic rationals
  etaq         eta expansions, quotients, modularity and cusp orders
  elliptic     Siegel functions, Weierstrass series/values, the h_n tower
  decompose    eta-quotient decompositions and the j(4 tau) relation
  cm           arbitrary-precision evaluation at CM points
  reciprocity  Galois orbits and minimal polynomials of special values
  cli          batch front end (console script: etaforge)
"""

__version__ = "1.0.0"
