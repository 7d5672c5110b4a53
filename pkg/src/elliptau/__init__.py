"""Rank-one irregular isomonodromic systems on a genus-one curve.

Subpackages by concern:

* :mod:`elliptau.elliptic` -- theta functions with characteristics and the
  Weierstrass sigma/zeta/wp family for arbitrary lattices.
* :mod:`elliptau.curve` -- branch points to periods, Abel map and inverse,
  and the branch-point derivative identities.
* :mod:`elliptau.isomono` -- the explicit fundamental solution, its
  monodromy data, and the rational system coefficients.
* :mod:`elliptau.tau` -- Hamiltonians, residue formulas, the closed-form
  tau function and its degenerate-lattice-free special case.
* :mod:`elliptau.checks`, :mod:`elliptau.cli` -- scenario-driven numerical
  verification (oracle comparisons, ODE monodromy continuation, reports).
"""

__version__ = "0.1.0"
