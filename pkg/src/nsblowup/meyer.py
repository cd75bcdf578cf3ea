"""Frequency-side construction of the compactly supported wavelet pair.

The low-pass symbol equals 1 on |xi| <= 2pi/3, falls to 0 by |xi| = 4pi/3
through a C-infinity transition, and the band symbol is
Omega(xi) = sqrt(Psi0(xi/2)^2 - Psi0(xi)^2) with the half-sample phase
e^{-i xi / 2}.  Fourier convention: fhat(xi) = int f(x) e^{-i x xi} dx,
inversion carries 1/(2 pi).  Spatial values come from quadrature of the
inverse transform over the compact support; only 1-D evaluations are ever
needed (tensor indices reduce axis by axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_THIRDS_PI = 2.0 * math.pi / 3.0
FOUR_THIRDS_PI = 4.0 * math.pi / 3.0
EIGHT_THIRDS_PI = 8.0 * math.pi / 3.0


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly increasing between.

    Built from f(u) = exp(-1/u); satisfies smooth_step(u) + smooth_step(1-u) = 1,
    which is what forces the quadrature-mirror identities below to hold exactly.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    inside = (u > 0.0) & (u < 1.0)
    ui = u[inside]
    with np.errstate(over="ignore"):
        f = np.exp(-1.0 / ui)
        g = np.exp(-1.0 / (1.0 - ui))
    out[inside] = f / (f + g)
    return out


def psi0_hat(xi):
    """Low-pass symbol: even, 1 on the core, 0 beyond 4pi/3, values in [0, 1]."""
    xi = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros_like(xi)
    out[xi <= TWO_THIRDS_PI] = 1.0
    band = (xi > TWO_THIRDS_PI) & (xi < FOUR_THIRDS_PI)
    out[band] = np.cos(0.5 * math.pi * smooth_step(3.0 * xi[band] / (2.0 * math.pi) - 1.0))
    return out


def omega(xi):
    """Band amplitude sqrt(Psi0(xi/2)^2 - Psi0(xi)^2); supported on an annulus."""
    xi = np.asarray(xi, dtype=float)
    low_half = psi0_hat(0.5 * xi)
    low = psi0_hat(xi)
    diff = low_half * low_half - low * low
    return np.sqrt(np.maximum(diff, 0.0))


@dataclass(frozen=True)
class MeyerProfile:
    """Transition function plus a dense sample grid of the low-pass symbol."""

    xi_grid: np.ndarray
    psi0_samples: np.ndarray

    @staticmethod
    def build(num_samples: int = 4097) -> "MeyerProfile":
        grid = np.linspace(-FOUR_THIRDS_PI, FOUR_THIRDS_PI, num_samples)
        return MeyerProfile(xi_grid=grid, psi0_samples=psi0_hat(grid))

    def nu(self, u):
        return smooth_step(u)

    def psi0(self, xi):
        return psi0_hat(xi)

    def omega(self, xi):
        return omega(xi)

    def psi1(self, xi):
        xi = np.asarray(xi, dtype=float)
        return omega(xi) * np.exp(-0.5j * xi)


def psi_hat(kind: int, xi, profile: MeyerProfile | None = None):
    """Frequency-side symbol of the scaling function (0) or wavelet (1)."""
    if kind == 0:
        out = psi0_hat(xi) + 0.0j
    elif kind == 1:
        out = omega(xi) * np.exp(-0.5j * np.asarray(xi, dtype=float))
    else:
        raise ValueError("kind must be 0 or 1")
    return complex(out) if np.ndim(xi) == 0 else out


def _cosine_transform(kind: int, shift: float, x, panels: int, order: int = 16):
    """(1/pi) * int_0^cut amplitude(xi) cos((x - shift) xi) dxi, vectorized in x."""
    if kind == 0:
        lo, hi = 0.0, FOUR_THIRDS_PI
        amp = psi0_hat
    else:
        lo, hi = TWO_THIRDS_PI, EIGHT_THIRDS_PI
        amp = omega
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    xi = (mids[:, None] + halves[:, None] * nodes[None, :]).ravel()
    w = (halves[:, None] * weights[None, :]).ravel() * amp(xi)
    xa = np.asarray(x, dtype=float)
    vals = np.cos(np.multiply.outer(xa - shift, xi)) @ w / math.pi
    return vals


def phi_spatial(kind: int, x, tol: float = 1e-10):
    """Spatial value(s) by quadrature of the inverse transform.

    Real for both kinds under the chosen phase convention.  Panel count
    scales with max |x| so the oscillatory factor stays resolved; panels are
    doubled until two passes agree within ``tol``.
    """
    if kind not in (0, 1):
        raise ValueError("kind must be 0 or 1")
    shift = 0.0 if kind == 0 else 0.5
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    max_arg = float(np.max(np.abs(xa - shift))) if xa.size else 0.0
    panels = max(16, int(math.ceil(1.2 * max_arg)) + 8)
    prev = _cosine_transform(kind, shift, xa, panels)
    for _ in range(4):
        panels *= 2
        cur = _cosine_transform(kind, shift, xa, panels)
        if float(np.max(np.abs(cur - prev))) <= tol:
            return float(cur[0]) if np.ndim(x) == 0 else cur
        prev = cur
    raise RuntimeError(f"phi_spatial did not reach tol={tol}")


@dataclass(frozen=True)
class WaveletIndex:
    epsilon: tuple[int, ...]
    j: int
    k: tuple[int, ...]

    def __post_init__(self):
        eps = tuple(int(e) for e in self.epsilon)
        kk = tuple(int(v) for v in self.k)
        if len(eps) != len(kk):
            raise ValueError("epsilon and k must share length")
        if any(e not in (0, 1) for e in eps):
            raise ValueError("epsilon entries must be 0 or 1")
        if not any(eps):
            raise ValueError("wavelet indices exclude epsilon == 0")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "k", kk)
        object.__setattr__(self, "j", int(self.j))

    @property
    def dim(self) -> int:
        return len(self.epsilon)


def fourier_partition_deviation(kind: int, xi_points) -> float:
    """Max deviation of sum_m |symbol(xi + 2 pi m)|^2 from 1 on the grid."""
    xi = np.asarray(xi_points, dtype=float)
    acc = np.zeros_like(xi)
    for m in range(-4, 5):
        shifted = xi + 2.0 * math.pi * m
        acc += np.abs(psi_hat(kind, shifted)) ** 2
    return float(np.max(np.abs(acc - 1.0)))


def _inner_product_1d(kind_a, j_a, k_a, kind_b, j_b, k_b, halfwidth: float = 40.0) -> float:
    """<phi^a_{j,k}, phi^b_{j',k'}> by spatial quadrature; needs |j - j'| <= 1."""
    if abs(j_a - j_b) > 1:
        raise ValueError("spatial check supports |j - j'| <= 1 only")
    fine = max(j_a, j_b)
    centers = (k_a / 2.0**j_a, k_b / 2.0**j_b)
    lo = min(centers) - halfwidth / 2.0**fine
    hi = max(centers) + halfwidth / 2.0**fine
    panels = max(64, int(math.ceil((hi - lo) * 2.0**fine * 1.2)))
    nodes, weights = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    x = (mids[:, None] + halves[:, None] * nodes[None, :]).ravel()
    w = (halves[:, None] * weights[None, :]).ravel()
    fa = 2.0 ** (j_a / 2.0) * phi_spatial(kind_a, 2.0**j_a * x - k_a)
    fb = 2.0 ** (j_b / 2.0) * phi_spatial(kind_b, 2.0**j_b * x - k_b)
    return float(np.dot(w, fa * fb))


def orthonormality_check(pairs, xi_points=None) -> float:
    """Max deviation over Fourier partition grids and spatial tensor products.

    ``pairs`` holds (WaveletIndex, WaveletIndex) tuples; tensor inner
    products factor into per-axis 1-D quadratures (|j - j'| <= 1).  The
    expected value is 1 for identical indices and 0 otherwise.
    """
    if xi_points is None:
        xi_points = np.linspace(-math.pi, math.pi, 50)
    worst = max(
        fourier_partition_deviation(0, xi_points),
        fourier_partition_deviation(1, xi_points),
    )
    for idx_a, idx_b in pairs:
        if idx_a.dim != idx_b.dim:
            raise ValueError("indices must share dimension")
        prod = 1.0
        for eps_a, ka, eps_b, kb in zip(idx_a.epsilon, idx_a.k, idx_b.epsilon, idx_b.k):
            prod *= _inner_product_1d(eps_a, idx_a.j, ka, eps_b, idx_b.j, kb)
        expected = 1.0 if idx_a == idx_b else 0.0
        worst = max(worst, abs(prod - expected))
    return worst
