"""The two explicit heat flows and their factorized evaluation.

Both flows are axis-separable, so a level of the dyadic flow is stored as
one Gaussian sum per axis (``2^j + 1`` translates each, the index box being
inclusive at both ends) rather than as the full ``(2^j+1)^n`` tensor sum.
The product of the axis sums, times the level weight ``2^j j^{-1/2}``,
reproduces the tensor sum exactly; tests compare both routes.

Sign convention for the gradient flow: with the normalized heat kernel the
closed form of ``d/dx_1 e^{tau Lap} exp(-x^2/(4 t))`` is negative on
``x_1 > 0``.  ``flow_Ag`` returns the positive-magnitude version
``kappa * x_1 * (2t-s)^{-(n+2)/2} * exp(-x^2/(4(2t-s)))`` with
``kappa = t^{n/2} / 2``, i.e. exactly minus the raw gradient flow.  All
positivity statements downstream are stated for this convention; magnitudes
and divergence of the time integral are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gauss1d import GaussSum1D, PolyGauss1D, heat_evolve, scale_shift
from .numutil import pairwise_sum
from .tensor_gauss import TensorTerm

# Prototype 1-D factors of the bump psi(x) = x_2 x_3 exp(-x^2).
PROTO_PLAIN = PolyGauss1D(1.0, 0.0, 1.0, (1.0,))
PROTO_LINEAR = PolyGauss1D(1.0, 0.0, 1.0, (0.0, 1.0))

# Zero-indexed axes that carry the linear factor of the first bump
# (paper-style coordinates x_2, x_3).
V1_LINEAR_AXES = (1, 2)


@dataclass(frozen=True)
class FlowSpec:
    """Ambient dimension, dyadic truncation levels and data amplitude."""

    dim: int = 3
    levels: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    delta: float = 1.0

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("dimension must be >= 3")
        lv = tuple(sorted(set(int(j) for j in self.levels)))
        if not lv or lv[0] < 1:
            raise ValueError("levels must be a non-empty set of integers >= 1")
        object.__setattr__(self, "levels", lv)
        if not self.delta > 0:
            raise ValueError("delta must be > 0")


@dataclass(frozen=True)
class AxisFactorSum:
    """One axis of one level: sum over the inclusive dyadic index box."""

    level: int
    axis: int
    terms: GaussSum1D

    def __call__(self, x):
        return self.terms(x)


@dataclass(frozen=True)
class LevelFlow:
    """prefactor * prod_i axes[i](x_i); the factorized form of one level."""

    level: int
    prefactor: float
    axes: tuple[AxisFactorSum, ...]

    def __call__(self, point):
        out = self.prefactor
        for ax, xi in zip(self.axes, point):
            out = out * ax(xi)
        return out


def level_indices(j: int) -> range:
    """Inclusive dyadic index box 2^j .. 2^(j+1)."""
    return range(2**j, 2 ** (j + 1) + 1)


def level_prefactor(j: int) -> float:
    """Weight 2^j / sqrt(j); requires j >= 1."""
    if j < 1:
        raise ValueError("levels start at 1")
    return 2.0**j / math.sqrt(j)


def axis_factor_sum(j: int, axis: int, s: float, linear_axes=V1_LINEAR_AXES) -> AxisFactorSum:
    """Heat-evolved translates 2^j x - k over the level-j box on one axis."""
    if s < 0:
        raise ValueError("time must be >= 0")
    proto = PROTO_LINEAR if axis in linear_axes else PROTO_PLAIN
    terms = tuple(
        heat_evolve(scale_shift(proto, 2.0**j, float(k)), s) for k in level_indices(j)
    )
    return AxisFactorSum(level=j, axis=axis, terms=GaussSum1D(terms))


def build_level_flow(
    j: int, s: float, dim: int, linear_axes=V1_LINEAR_AXES, amplitude: float = 1.0
) -> LevelFlow:
    axes = tuple(axis_factor_sum(j, i, s, linear_axes) for i in range(dim))
    return LevelFlow(level=j, prefactor=amplitude * level_prefactor(j), axes=axes)


def Ag_amplitude(t: float, s: float, dim: int) -> float:
    """Positive prefactor t^{n/2} / (2 (2t-s)^{(n+2)/2}) of the gradient flow."""
    return t ** (dim / 2.0) / (2.0 * (2.0 * t - s) ** ((dim + 2.0) / 2.0))


def flow_Ag(t: float, s: float, dim: int = 3) -> TensorTerm:
    """Positive-magnitude gradient heat flow of the Gaussian observable.

    Returns kappa * x_1 * (2t-s)^{-(n+2)/2} * exp(-x^2/(4(2t-s))) with
    kappa = t^{n/2}/2, which equals the magnitude (and minus the value) of
    the raw gradient flow under the normalized kernel.
    """
    if not (0.0 < s < t):
        raise ValueError("need 0 < s < t")
    q = 1.0 / (4.0 * (2.0 * t - s))
    factors = [PolyGauss1D(1.0, 0.0, q, (0.0, 1.0))]
    factors.extend(PolyGauss1D(1.0, 0.0, q, (1.0,)) for _ in range(dim - 1))
    return TensorTerm(Ag_amplitude(t, s, dim), tuple(factors))


def flow_v1_level(spec: FlowSpec, j: int, s: float) -> list[AxisFactorSum]:
    """Per-axis factor sums of one level of the smoothed dyadic field."""
    if j not in spec.levels:
        raise ValueError(f"level {j} not in spec.levels")
    return [axis_factor_sum(j, i, s) for i in range(spec.dim)]


def flow_v1(spec: FlowSpec, s: float) -> tuple[LevelFlow, ...]:
    """All levels of the smoothed dyadic field, factorized per axis."""
    return tuple(build_level_flow(j, s, spec.dim) for j in spec.levels)


def eval_v1(spec: FlowSpec, s: float, point) -> float:
    return pairwise_sum(lf(point) for lf in flow_v1(spec, s))


def eval_V(spec: FlowSpec, s: float, point) -> float:
    """Square of the smoothed dyadic field; nonnegative by construction."""
    v = eval_v1(spec, s, point)
    return v * v


def eval_levels(level_flows, point) -> float:
    return pairwise_sum(lf(point) for lf in level_flows)


def eval_level_partial(level_flow: LevelFlow, beta, points: np.ndarray) -> np.ndarray:
    """Evaluate a mixed partial derivative of one factorized level.

    ``beta`` is a multi-index; ``points`` has shape (P, dim).  Differentiation
    acts per axis on the 1-D factor sums, keeping everything closed-form.
    """
    points = np.asarray(points, dtype=float)
    out = np.full(points.shape[0], level_flow.prefactor)
    for i, ax in enumerate(level_flow.axes):
        sum_i = ax.terms
        for _ in range(int(beta[i])):
            sum_i = sum_i.differentiate()
        out = out * sum_i(points[:, i])
    return out


def v1_grid(spec: FlowSpec, s: float, axis_arrays) -> np.ndarray:
    """Smoothed dyadic field on a tensor grid given broadcast-ready axis arrays.

    Each entry of ``axis_arrays`` is an ndarray shaped so that plain
    multiplication broadcasts to the full grid (meshgrid-style); the per-axis
    Gaussian sums are evaluated on the flattened nodes and reshaped back.
    """
    total = None
    for lf in flow_v1(spec, s):
        level_val = lf.prefactor
        for ax, arr in zip(lf.axes, axis_arrays):
            flat = np.asarray(arr, dtype=float)
            vals = ax.terms(flat.ravel()).reshape(flat.shape)
            level_val = level_val * vals
        total = level_val if total is None else total + level_val
    return total


def Ag_grid(t: float, s: float, dim: int, axis_arrays) -> np.ndarray:
    term = flow_Ag(t, s, dim)
    out = term.amplitude
    for fac, arr in zip(term.factors, axis_arrays):
        flat = np.asarray(arr, dtype=float)
        out = out * fac(flat.ravel()).reshape(flat.shape)
    return out


def _eval_term_at(term, pts: np.ndarray) -> np.ndarray:
    out = np.full(pts.shape[0], term.amplitude)
    for i, fac in enumerate(term.factors):
        out = out * fac(pts[:, i])
    return out


def _eval_level_at(level_flow: LevelFlow, pts: np.ndarray) -> np.ndarray:
    out = np.full(pts.shape[0], level_flow.prefactor)
    for i, ax in enumerate(level_flow.axes):
        out = out * ax.terms(pts[:, i])
    return out


def _mirror(pts: np.ndarray, axis: int, about: float) -> np.ndarray:
    out = pts.copy()
    out[:, axis] = about - out[:, axis]
    return out


def symmetry_suite(spec: FlowSpec, s: float = 0.1, n_points: int = 100, seed: int = 0,
                   tol: float = 1e-12):
    """Sampled identity battery for both flows.

    Returns rows (name, points, max_deviation, passed).  Deviations are
    normalized by max(1, |a|, |b|); sign checks are restricted to a region
    where the flow magnitude is healthy.
    """
    rng = np.random.default_rng(seed)
    rows = []

    def rel_dev(a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))))

    # gradient flow: odd in the first axis, even in every other axis
    t_obs, s_obs = 0.5, 0.25
    ag = flow_Ag(t_obs, s_obs, spec.dim)
    pts = rng.uniform(-2.0, 3.0, size=(n_points, spec.dim))
    vals = _eval_term_at(ag, pts)
    dev = rel_dev(vals, -_eval_term_at(ag, _mirror(pts, 0, 0.0)))
    rows.append(("grad_flow_odd_axis1", n_points, dev, dev <= tol))
    for axis in range(1, spec.dim):
        dev = rel_dev(vals, _eval_term_at(ag, _mirror(pts, axis, 0.0)))
        rows.append((f"grad_flow_even_axis{axis + 1}", n_points, dev, dev <= tol))

    level_flows = flow_v1(spec, s)
    pts = rng.uniform(-0.5, 3.5, size=(n_points, spec.dim))
    for lf in level_flows:
        vals = _eval_level_at(lf, pts)
        for axis in V1_LINEAR_AXES:
            dev = rel_dev(vals, -_eval_level_at(lf, _mirror(pts, axis, 3.0)))
            rows.append((f"dyadic_j{lf.level}_antisym_axis{axis + 1}", n_points, dev, dev <= tol))
        for axis in [0] + list(range(3, spec.dim)):
            dev = rel_dev(vals, _eval_level_at(lf, _mirror(pts, axis, 3.0)))
            rows.append((f"dyadic_j{lf.level}_sym_axis{axis + 1}", n_points, dev, dev <= tol))
        for axis in V1_LINEAR_AXES:
            zpts = pts.copy()
            zpts[:, axis] = 1.5
            dev = float(np.max(np.abs(_eval_level_at(lf, zpts))))
            rows.append((f"dyadic_j{lf.level}_zero_axis{axis + 1}", n_points, dev, dev <= tol))

    # sign pattern of the summed flow away from the zero set
    spts = rng.uniform(0.5, 2.5, size=(n_points, spec.dim))
    off = (np.abs(spts[:, 1] - 1.5) > 0.2) & (np.abs(spts[:, 2] - 1.5) > 0.2)
    spts = spts[off]
    total = np.zeros(spts.shape[0])
    for lf in level_flows:
        total = total + _eval_level_at(lf, spts)
    expected = np.sign((spts[:, 1] - 1.5) * (spts[:, 2] - 1.5))
    live = np.abs(total) > 1e-15
    violations = int(np.sum(np.sign(total[live]) != expected[live]))
    rows.append(("dyadic_sign_pattern", int(np.sum(live)), float(violations), violations == 0))

    # per-level monotonicity along the first axis
    mpts = rng.uniform(0.0, 3.0, size=(n_points, spec.dim))
    mpts[:, 0] = rng.uniform(0.01, 3.0, size=n_points)
    far = mpts.copy()
    far[:, 0] += 3.0
    for lf in level_flows:
        near_abs = np.abs(_eval_level_at(lf, mpts))
        far_abs = np.abs(_eval_level_at(lf, far))
        dev = float(np.max((far_abs - near_abs) / np.maximum(1.0, near_abs)))
        rows.append((f"dyadic_j{lf.level}_monotone_axis1", n_points, max(dev, 0.0),
                     dev <= tol))
    return rows
