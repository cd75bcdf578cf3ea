"""Closed-form Gaussian heat-flow laboratory.

Exact algebra for polynomial-times-Gaussian sums, dyadic divergence-free
initial data built from them, coefficient-side Besov-Morrey norms, and
numerical evidence that the time integral of the correlation pairing
grows like a harmonic series under truncation.
"""

__version__ = "0.1.0"
