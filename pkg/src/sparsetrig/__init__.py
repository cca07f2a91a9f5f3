"""Recovery of sparse trigonometric polynomials from random samples.

The package bundles the four pillars of the method: domain types and random
instance generation (``model``), the equality-constrained complex l1 solver
with dual-certificate verification (``solver``), exact set-partition rank
censuses (``partitions``), and the failure-probability bounds built on top
of them (``bounds``), plus a Monte Carlo experiment harness and CLI
(``harness``, ``cli``).
"""

from . import bounds, harness, model, partitions, solver

__all__ = ["bounds", "harness", "model", "partitions", "solver"]

__version__ = "0.1.0"
