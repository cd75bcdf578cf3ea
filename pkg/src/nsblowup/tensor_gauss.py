"""n-dimensional Gaussian sums as tensor products of 1-D factors.

Everything the construction needs lives on axis-separable functions, so the
n-dimensional operations reduce to per-axis calls into :mod:`gauss1d`.
Dimension must be at least 3.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gauss1d import PolyGauss1D, heat_evolve, moment_integral, multiply
from .numutil import pairwise_sum


@dataclass(frozen=True)
class TensorTerm:
    amplitude: float
    factors: tuple[PolyGauss1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 3:
            raise ValueError("tensor terms need dimension >= 3")
        object.__setattr__(self, "amplitude", float(self.amplitude))

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __call__(self, point):
        if len(point) != self.dim:
            raise ValueError("point dimension mismatch")
        out = self.amplitude
        for fac, xi in zip(self.factors, point):
            out = out * fac(xi)
        return out


@dataclass(frozen=True)
class GaussSumNd:
    terms: tuple[TensorTerm, ...]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.dim < 3:
            raise ValueError("dimension must be >= 3")
        for t in self.terms:
            if t.dim != self.dim:
                raise ValueError("all terms must share the ambient dimension")

    def __call__(self, point):
        if not self.terms:
            return 0.0
        return pairwise_sum(t(point) for t in self.terms)


def multiply_nd(f: TensorTerm, g: TensorTerm) -> TensorTerm:
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    return TensorTerm(
        f.amplitude * g.amplitude,
        tuple(multiply(a, b) for a, b in zip(f.factors, g.factors)),
    )


def heat_evolve_nd(f, tau: float):
    """Axis-wise heat evolution; accepts a TensorTerm or a GaussSumNd."""
    if isinstance(f, TensorTerm):
        return TensorTerm(f.amplitude, tuple(heat_evolve(fac, tau) for fac in f.factors))
    return GaussSumNd(tuple(heat_evolve_nd(t, tau) for t in f.terms), f.dim)


def integrate_full(f) -> float:
    """Exact full-space integral: per-term product of per-axis moments."""
    if isinstance(f, TensorTerm):
        out = f.amplitude
        for fac in f.factors:
            out *= moment_integral(fac)
        return out
    return pairwise_sum(integrate_full(t) for t in f.terms)
