"""Exact calculus for one-dimensional polynomial-times-Gaussian functions.

A term is ``amplitude * P(x - center) * exp(-width * (x - center)^2)`` with
``width > 0`` and ``P`` stored as ascending coefficients in powers of
``x - center``.  Products, derivatives, heat evolution and full-line
integrals all stay inside this class of functions and are computed by
coefficient arithmetic; no discretisation anywhere.

Conventions fixed here and used by every downstream module:

* heat kernel ``(4 pi tau)^{-1/2} exp(-(x - y)^2 / (4 tau))``, so evolving a
  pure Gaussian ``exp(-a (y - mu)^2)`` for time ``tau`` yields
  ``(1 + 4 a tau)^{-1/2} exp(-a (x - mu)^2 / (1 + 4 a tau))``;
* even Gaussian moments ``∫ u^{2m} e^{-a u^2} du = (2m-1)!! / (2a)^m *
  sqrt(pi / a)``, odd moments vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly

from .numutil import double_factorial, pairwise_sum

# Degree cap: the construction needs degree 2; anything near the cap means a
# runaway expansion upstream, so reject instead of accumulating noise.
MAX_DEGREE = 16


def _as_poly(coeffs) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("poly must be a non-empty 1-D coefficient sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("poly coefficients must be finite")
    trimmed = np.trim_zeros(arr, "b")
    if trimmed.size == 0:
        return (0.0,)
    if trimmed.size - 1 > MAX_DEGREE:
        raise ValueError(f"polynomial degree {trimmed.size - 1} exceeds cap {MAX_DEGREE}")
    return tuple(float(c) for c in trimmed)


def _shift_poly(coeffs, delta: float) -> np.ndarray:
    """Coefficients of P(u + delta) given those of P(u)."""
    if delta == 0.0:
        return np.asarray(coeffs, dtype=float)
    return Polynomial(np.asarray(coeffs, dtype=float))(Polynomial([delta, 1.0])).coef


@dataclass(frozen=True)
class PolyGauss1D:
    """One canonical polynomial-times-Gaussian term."""

    amplitude: float
    center: float
    width: float
    poly: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError("width must be > 0")
        if not (math.isfinite(self.amplitude) and math.isfinite(self.center)):
            raise ValueError("amplitude and center must be finite")
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "poly", _as_poly(self.poly))

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def __call__(self, x):
        u = np.asarray(x, dtype=float) - self.center
        out = self.amplitude * npoly.polyval(u, self.poly) * np.exp(-self.width * u * u)
        return float(out) if np.ndim(x) == 0 else out


def multiply(f: PolyGauss1D, g: PolyGauss1D) -> PolyGauss1D:
    """Exact product; the completed square is absorbed into the amplitude."""
    a = f.width + g.width
    mu = (f.width * f.center + g.width * g.center) / a
    damp = math.exp(-f.width * g.width * (f.center - g.center) ** 2 / a)
    pf = _shift_poly(f.poly, mu - f.center)
    pg = _shift_poly(g.poly, mu - g.center)
    return PolyGauss1D(f.amplitude * g.amplitude * damp, mu, a, npoly.polymul(pf, pg))


def differentiate(f: PolyGauss1D) -> "GaussSum1D":
    """Exact d/dx, returned as a (single-term) sum; degree grows by one."""
    if f.degree == 0:
        dp = np.zeros(1)
    else:
        dp = npoly.polyder(np.asarray(f.poly))
    u_poly = np.concatenate([[0.0], np.asarray(f.poly)])
    combined = npoly.polyadd(dp, -2.0 * f.width * u_poly)
    return GaussSum1D((PolyGauss1D(f.amplitude, f.center, f.width, combined),))


def heat_evolve(f: PolyGauss1D, tau: float) -> PolyGauss1D:
    """Exact heat evolution of a term.

    The Gaussian part follows the ``(1 + 4 a tau)`` rule; the polynomial part
    evolves through the even-moment recurrence: with ``sigma = 1/(1+4 a tau)``
    and ``A = a + 1/(4 tau)``,

        Q(w) = sum_{r even} (r-1)!! (2A)^{-r/2} * [P^{(r)}/r!](sigma w).

    ``tau = 0`` returns ``f`` unchanged; negative ``tau`` is rejected.
    """
    if not (math.isfinite(tau) and tau >= 0.0):
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return f
    a = f.width
    grow = 1.0 + 4.0 * a * tau
    sigma = 1.0 / grow
    two_a_big = grow / (2.0 * tau)  # 2A
    deg = f.degree
    total = np.zeros(deg + 1)
    dr = np.asarray(f.poly, dtype=float)  # holds P^{(r)} / r!
    r = 0
    while True:
        mom = double_factorial(r - 1) / two_a_big ** (r // 2)
        scaled = dr * sigma ** np.arange(dr.size)
        total[: scaled.size] += mom * scaled
        r += 2
        if r > deg:
            break
        dr = npoly.polyder(dr, 2) / (r * (r - 1))
    return PolyGauss1D(f.amplitude / math.sqrt(grow), f.center, a * sigma, total)


def moment_integral(f: PolyGauss1D) -> float:
    """Exact ∫_R f(x) dx via even Gaussian moments."""
    a = f.width
    total = 0.0
    for m, c in enumerate(f.poly):
        if m % 2 == 0 and c != 0.0:
            total += c * double_factorial(m - 1) / (2.0 * a) ** (m // 2)
    return f.amplitude * total * math.sqrt(math.pi / a)


def raw_moment(f: PolyGauss1D, m: int) -> float:
    """Exact ∫_R x^m f(x) dx."""
    if m < 0:
        raise ValueError("moment order must be >= 0")
    if m == 0:
        return moment_integral(f)
    mono = np.zeros(m + 1)
    mono[m] = 1.0
    ext = npoly.polymul(np.asarray(f.poly), _shift_poly(mono, f.center))
    return moment_integral(PolyGauss1D(f.amplitude, f.center, f.width, ext))


def scale_shift(f: PolyGauss1D, lam: float, shift: float) -> PolyGauss1D:
    """Exact representation of x -> f(lam * x - shift)."""
    if lam == 0.0 or not math.isfinite(lam):
        raise ValueError("lambda must be nonzero and finite")
    scaled = tuple(c * lam**m for m, c in enumerate(f.poly))
    return PolyGauss1D(f.amplitude, (f.center + shift) / lam, f.width * lam * lam, scaled)


@dataclass(frozen=True)
class GaussSum1D:
    """A finite sum of PolyGauss1D terms; evaluation is the plain term sum."""

    terms: tuple[PolyGauss1D, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, x):
        if not self.terms:
            return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
        vals = [t(x) for t in self.terms]
        return pairwise_sum(vals)

    def differentiate(self) -> "GaussSum1D":
        out = []
        for t in self.terms:
            out.extend(differentiate(t).terms)
        return GaussSum1D(tuple(out))

    def heat_evolve(self, tau: float) -> "GaussSum1D":
        return GaussSum1D(tuple(heat_evolve(t, tau) for t in self.terms))

    def integral(self) -> float:
        return pairwise_sum(moment_integral(t) for t in self.terms)

    def scaled(self, factor: float) -> "GaussSum1D":
        return GaussSum1D(
            tuple(
                PolyGauss1D(factor * t.amplitude, t.center, t.width, t.poly)
                for t in self.terms
            )
        )
