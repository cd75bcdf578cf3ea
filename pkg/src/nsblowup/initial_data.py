"""Divergence-free two-component initial data in closed Gaussian form.

The two active components are dyadic sums of the bumps
psi1(x) = x2 x3 exp(-x^2) and psi2(x) = -x1 x3 exp(-x^2); both have all
moments of order <= 1 equal to zero, and the pair cancels exactly under
d/dx1 + d/dx2.  Components are stored factorized per axis (one Gaussian sum
per axis and level), which keeps deep truncations cheap; the full tensor
sum can be materialized level by level for cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .besov import CoeffField, h_level_coefficient
from .flows import LevelFlow, build_level_flow, eval_level_partial, level_indices
from .gauss1d import PolyGauss1D, scale_shift
from .meyer import WaveletIndex, smooth_step
from .numutil import pairwise_sum
from .tensor_gauss import GaussSumNd, TensorTerm, integrate_full

# zero-indexed axes carrying the linear polynomial factor of each bump
PSI1_LINEAR_AXES = (1, 2)
PSI2_LINEAR_AXES = (0, 2)


@dataclass(frozen=True)
class VagueletteSystem:
    dim: int
    psi1: TensorTerm
    psi2: TensorTerm


def _bump(dim: int, linear_axes, sign: float) -> TensorTerm:
    factors = []
    for i in range(dim):
        poly = (0.0, 1.0) if i in linear_axes else (1.0,)
        factors.append(PolyGauss1D(1.0, 0.0, 1.0, poly))
    return TensorTerm(sign, tuple(factors))


def build_vaguelettes(dim: int = 3) -> VagueletteSystem:
    if dim < 3:
        raise ValueError("construction needs dimension >= 3")
    return VagueletteSystem(
        dim=dim,
        psi1=_bump(dim, PSI1_LINEAR_AXES, 1.0),
        psi2=_bump(dim, PSI2_LINEAR_AXES, -1.0),
    )


def vanishing_moments_check(system: VagueletteSystem) -> float:
    """Max |moment| of both bumps over all multi-indices of order <= 1."""
    worst = 0.0
    for term in (system.psi1, system.psi2):
        worst = max(worst, abs(integrate_full(term)))
        for axis in range(system.dim):
            # multiply one axis factor by x: raises the polynomial degree there
            factors = list(term.factors)
            base = factors[axis]
            lifted = PolyGauss1D(
                base.amplitude,
                base.center,
                base.width,
                _poly_times_x(base.poly, base.center),
            )
            factors[axis] = lifted
            worst = max(worst, abs(integrate_full(TensorTerm(term.amplitude, tuple(factors)))))
    return worst


def _poly_times_x(poly, center: float):
    # multiply P(u) by x = u + center
    shifted = [0.0] + list(poly)
    out = list(np.polynomial.polynomial.polyadd(shifted, np.asarray(poly) * center))
    return tuple(out)


@dataclass(frozen=True)
class InitialData:
    delta: float
    dim: int
    levels: tuple[int, ...]
    u1: tuple[LevelFlow, ...]
    u2: tuple[LevelFlow, ...]

    def component(self, index: int) -> tuple[LevelFlow, ...]:
        if index == 1:
            return self.u1
        if index == 2:
            return self.u2
        raise ValueError("components 3..n are identically zero")


def build_u0(delta: float, J: int, dim: int = 3) -> InitialData:
    """Two active components over levels 1..J; the rest vanish identically."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if J < 1:
        raise ValueError("J must be >= 1")
    if dim < 3:
        raise ValueError("construction needs dimension >= 3")
    levels = tuple(range(1, J + 1))
    u1 = tuple(
        build_level_flow(j, 0.0, dim, PSI1_LINEAR_AXES, amplitude=delta) for j in levels
    )
    u2 = tuple(
        build_level_flow(j, 0.0, dim, PSI2_LINEAR_AXES, amplitude=-delta) for j in levels
    )
    return InitialData(delta=delta, dim=dim, levels=levels, u1=u1, u2=u2)


def component_tensor_level(data: InitialData, index: int, j: int) -> GaussSumNd:
    """Materialized tensor sum of one level of one component (small j only)."""
    base = build_vaguelettes(data.dim)
    proto = base.psi1 if index == 1 else base.psi2
    sign = 1.0 if index == 1 else -1.0
    weight = data.delta * 2.0**j / math.sqrt(j)
    terms = []
    for k in _index_box(j, data.dim):
        factors = tuple(
            scale_shift(proto.factors[i], 2.0**j, float(k[i])) for i in range(data.dim)
        )
        terms.append(TensorTerm(sign * weight, factors))
    return GaussSumNd(tuple(terms), data.dim)


def _index_box(j: int, dim: int):
    box = list(level_indices(j))
    idx = [0] * dim
    while True:
        yield tuple(box[i] for i in idx)
        d = dim - 1
        while d >= 0:
            idx[d] += 1
            if idx[d] < len(box):
                break
            idx[d] = 0
            d -= 1
        if d < 0:
            return


def evaluate_component(data: InitialData, index: int, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    beta = (0,) * data.dim
    vals = [eval_level_partial(lf, beta, pts) for lf in data.component(index)]
    return pairwise_sum(vals)


def divergence_check(data: InitialData, points) -> float:
    """Max |d1 u1 + d2 u2| over the points; zero in exact arithmetic."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    b1 = tuple(1 if i == 0 else 0 for i in range(data.dim))
    b2 = tuple(1 if i == 1 else 0 for i in range(data.dim))
    d1 = pairwise_sum([eval_level_partial(lf, b1, pts) for lf in data.u1])
    d2 = pairwise_sum([eval_level_partial(lf, b2, pts) for lf in data.u2])
    return float(np.max(np.abs(d1 + d2)))


def phi_bump(point, dim: int) -> float:
    """Smooth radial cutoff: 1 inside radius 2 sqrt(n), 0 outside radius 2n."""
    r = float(np.linalg.norm(np.asarray(point, dtype=float)))
    inner = 2.0 * math.sqrt(dim)
    outer = 2.0 * dim
    if r <= inner:
        return 1.0
    if r >= outer:
        return 0.0
    return float(1.0 - smooth_step((r - inner) / (outer - inner)))


def default_tail_grid(dim: int, r_max: float = 50.0, n_radii: int = 12, seed: int = 7):
    """Radial shells outside the cutoff plateau, centered at 1.5 * (1,..,1)."""
    center = 1.5 * np.ones(dim)
    r_min = 2.0 * math.sqrt(dim) * 1.01
    radii = np.geomspace(r_min, r_max, n_radii)
    dirs = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        dirs.extend([e, -e])
    for signs in ((1, 1, 1), (1, -1, 1), (-1, 1, 1), (1, 1, -1)):
        v = np.ones(dim)
        v[: len(signs)] = signs
        dirs.append(v / np.linalg.norm(v))
    rng = np.random.default_rng(seed)
    for _ in range(12):
        v = rng.normal(size=dim)
        dirs.append(v / np.linalg.norm(v))
    dirs = np.asarray(dirs)
    pts = (center[None, None, :] + radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
    rads = np.repeat(radii, dirs.shape[0])
    return pts, rads


def schwartz_tail_check(
    data: InitialData,
    N_max: int = 3,
    beta_max: int = 2,
    grid=None,
) -> list[dict]:
    """Weighted-derivative sups on the exterior grid for truncations J and 2J.

    Rows carry sup over the grid of |x - 1.5 e|^{2N} |d^beta u_i(x)| for each
    component, at the data's truncation and at the doubled one, plus their
    ratio; bounded ratios certify that deeper truncations add nothing outside
    the core cube.
    """
    if grid is None:
        pts, rads = default_tail_grid(data.dim)
    else:
        pts, rads = grid
    deep = build_u0(data.delta, 2 * max(data.levels), data.dim)
    betas = _multi_indices(data.dim, beta_max)
    rows = []
    for N in range(N_max + 1):
        weight = rads ** (2 * N)
        for beta in betas:
            sup_j = _weighted_sup(data, beta, pts, weight)
            sup_2j = _weighted_sup(deep, beta, pts, weight)
            ratio = sup_2j / sup_j if sup_j > 0 else math.inf
            rows.append(
                {
                    "N": N,
                    "beta": beta,
                    "sup_J": sup_j,
                    "sup_2J": sup_2j,
                    "ratio": ratio,
                }
            )
    return rows


def _weighted_sup(data: InitialData, beta, pts, weight) -> float:
    worst = 0.0
    for index in (1, 2):
        vals = pairwise_sum(
            [eval_level_partial(lf, beta, pts) for lf in data.component(index)]
        )
        worst = max(worst, float(np.max(weight * np.abs(vals))))
    return worst


def _multi_indices(dim: int, order_max: int):
    out = []
    def rec(prefix, remaining, depth):
        if depth == dim:
            out.append(tuple(prefix))
            return
        for v in range(remaining + 1):
            prefix.append(v)
            rec(prefix, remaining - v, depth + 1)
            prefix.pop()
    rec([], order_max, 0)
    return sorted(out, key=lambda b: (sum(b), b))


def coeff_field(data: InitialData) -> CoeffField:
    """Bump-side coefficient field of u1/delta on the normalized basis.

    Identical to the coefficient field of the dyadic test function, so every
    coefficient-side norm of the data scales linearly in delta.
    """
    eps = (1,) * data.dim
    entries = {}
    for j in data.levels:
        val = h_level_coefficient(j, data.dim)
        for k in _index_box(j, data.dim):
            entries[WaveletIndex(eps, j, k)] = val
    return CoeffField(data.dim, entries)


def calibrate_delta(target: float, J: int, dim: int = 3, norms=None) -> float:
    """Amplitude making the worst coefficient-side norm equal the target."""
    from .besov import BesovMorreyParams, norm_besov_inf, norm_besov_morrey, coeff_field_of_h

    if not target > 0:
        raise ValueError("target must be > 0")
    field = coeff_field_of_h(J, dim)
    if norms is None:
        norms = [
            ("Binf", (-1.0, 3.0)),
            ("BM", BesovMorreyParams(p=2.0, q=3.0, gamma1=-1.0, gamma2=0.0)),
            ("BM", BesovMorreyParams(p=3.0, q=1.0, gamma1=-1.0, gamma2=0.0)),
        ]
    worst = 0.0
    for kind, params in norms:
        if kind == "Binf":
            worst = max(worst, norm_besov_inf(field, *params))
        else:
            worst = max(worst, norm_besov_morrey(field, params))
    return target / worst


def export_json(data: InitialData) -> str:
    """Reproducibility record: amplitude, levels and per-level metadata."""
    payload = {
        "delta": data.delta,
        "dim": data.dim,
        "levels": list(data.levels),
        "components": [
            {
                "name": "u1",
                "sign": 1,
                "linear_axes": list(PSI1_LINEAR_AXES),
                "levels": [
                    {
                        "j": lf.level,
                        "prefactor": lf.prefactor,
                        "terms_per_axis": len(lf.axes[0].terms.terms),
                    }
                    for lf in data.u1
                ],
            },
            {
                "name": "u2",
                "sign": -1,
                "linear_axes": list(PSI2_LINEAR_AXES),
                "levels": [
                    {
                        "j": lf.level,
                        "prefactor": lf.prefactor,
                        "terms_per_axis": len(lf.axes[0].terms.terms),
                    }
                    for lf in data.u2
                ],
            },
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
