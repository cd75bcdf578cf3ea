"""Sparse wavelet-coefficient fields and coefficient-side norms.

Norms are evaluated purely on coefficients of the L2-normalized basis.  Two
expressions are implemented:

* the sup-over-translates form: [ sum_j 2^{j q (g1 + n/2)} (sup_k |a_jk|)^q ]^{1/q};
* the cube form: sup over dyadic cubes Q of
  |Q|^{g2/n - 1/p} { sum_{j: cube level <= j} 2^{j q (g1 + n/2 - n/p)}
  ( sum_{k: Q_{jk} in Q} |a_jk|^p )^{q/p} }^{1/q}.

Cube enumeration is finite and exact: candidates are the dyadic ancestors of
every occupied cube down to a margin below the coarsest occupied level.  For
g2 < n/p the prefactor 2^{J (n/p - g2)} decays as cubes grow while the inner
sum is bounded by its value on the all-entries aggregate, so cubes coarser
than the margin cannot achieve the sup; for g2 = n/p the value is constant
once a cube swallows an entire quadrant cluster, which the margin reaches by
construction (it adapts to the largest translate index).
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .meyer import WaveletIndex

COARSE_MARGIN = 8


@dataclass(frozen=True)
class BesovMorreyParams:
    p: float
    q: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        if not 1.0 <= self.p:
            raise ValueError("p must be >= 1")
        if not 1.0 <= self.q:
            raise ValueError("q must be >= 1")
        if not 0.0 <= self.gamma2:
            raise ValueError("gamma2 must be >= 0")
        if math.isfinite(self.p) and self.gamma2 > 0.0:
            # upper limit n/p is checked against the field dimension at use time
            pass

    def is_critical(self, tol: float = 1e-12) -> bool:
        return abs(self.gamma1 - self.gamma2 + 1.0) <= tol


@dataclass(frozen=True)
class CoeffField:
    dim: int
    entries: Mapping[WaveletIndex, float]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        data = {}
        for idx, val in dict(self.entries).items():
            if idx.dim != self.dim:
                raise ValueError("index dimension mismatch")
            data[idx] = float(val)
        object.__setattr__(self, "entries", MappingProxyType(data))

    def levels(self) -> list[int]:
        return sorted({idx.j for idx in self.entries})

    def scaled(self, factor: float) -> "CoeffField":
        return CoeffField(self.dim, {idx: factor * v for idx, v in self.entries.items()})


def h_level_coefficient(j: int, dim: int) -> float:
    """Normalized-basis coefficient shared by every translate of level j."""
    if j < 1:
        raise ValueError("levels start at 1")
    return 2.0 ** (j * (1.0 - dim / 2.0)) / math.sqrt(j)


def coeff_field_of_h(J: int, dim: int = 3) -> CoeffField:
    """Materialized coefficient field of the dyadic test function.

    Levels 1..J, full epsilon = (1,..,1), translates over the inclusive box
    [2^j, 2^{j+1}]^n.  Entry counts grow like 2^{nJ}; deep truncations should
    use :func:`besov_inf_norm_of_h`, which never materializes translates.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if J > 8:
        raise ValueError("materialized field capped at J = 8; use the level-sup form")
    eps = (1,) * dim
    entries: dict[WaveletIndex, float] = {}
    for j in range(1, J + 1):
        value = h_level_coefficient(j, dim)
        box = range(2**j, 2 ** (j + 1) + 1)
        def fill(prefix, depth):
            if depth == dim:
                entries[WaveletIndex(eps, j, tuple(prefix))] = value
                return
            for k in box:
                prefix.append(k)
                fill(prefix, depth + 1)
                prefix.pop()
        fill([], 0)
    return CoeffField(dim, entries)


def norm_besov_inf(field: CoeffField, gamma1: float, q: float) -> float:
    """Sup-over-translates norm; q = inf takes the sup over levels."""
    sups: dict[int, float] = defaultdict(float)
    for idx, val in field.entries.items():
        sups[idx.j] = max(sups[idx.j], abs(val))
    if not sups:
        return 0.0
    n = field.dim
    if math.isinf(q):
        return max(2.0 ** (j * (gamma1 + n / 2.0)) * s for j, s in sups.items())
    acc = 0.0
    for j in sorted(sups):
        acc += 2.0 ** (j * q * (gamma1 + n / 2.0)) * sups[j] ** q
    return acc ** (1.0 / q)


def besov_inf_norm_of_h(J: int, q: float, gamma1: float = -1.0, dim: int = 3) -> float:
    """Exact truncated sup-norm of the dyadic test function, O(J) work.

    The level sup is 2^{j (1 - n/2)} / sqrt(j), so the level term reduces to
    2^{j q (gamma1 + 1)} j^{-q/2}; no translate enumeration is needed.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if math.isinf(q):
        return max(2.0 ** (j * (gamma1 + 1.0)) / math.sqrt(j) for j in range(1, J + 1))
    acc = 0.0
    for j in range(1, J + 1):
        acc += 2.0 ** (j * q * (gamma1 + 1.0)) * j ** (-q / 2.0)
    return acc ** (1.0 / q)


def _cube_candidates(level_sums, floor_level):
    """All dyadic ancestors (J, K) of occupied cubes down to floor_level."""
    box_sums = defaultdict(lambda: defaultdict(float))
    for (j, k), sjk in level_sums.items():
        for J in range(j, floor_level - 1, -1):
            shift = j - J
            K = tuple(ki >> shift for ki in k)
            box_sums[(J, K)][j] += sjk
    return box_sums


def norm_besov_morrey(field: CoeffField, params: BesovMorreyParams) -> float:
    """Cube-form norm: exact finite sup over candidate dyadic cubes."""
    p, q = params.p, params.q
    if math.isinf(p):
        raise ValueError("p = inf is handled by norm_besov_inf")
    n = field.dim
    if params.gamma2 > n / p + 1e-12:
        raise ValueError("gamma2 must lie in [0, n/p]")
    if not field.entries:
        return 0.0
    level_sums: dict[tuple[int, tuple[int, ...]], float] = defaultdict(float)
    max_abs_k = 1
    for idx, val in field.entries.items():
        level_sums[(idx.j, idx.k)] += abs(val) ** p
        max_abs_k = max(max_abs_k, max(abs(ki) for ki in idx.k) if idx.k else 1)
    jmin = min(j for j, _ in level_sums)
    floor_level = jmin - max(COARSE_MARGIN, max_abs_k.bit_length() + 1)
    box_sums = _cube_candidates(level_sums, floor_level)
    inner_exp = params.gamma1 + n / 2.0 - n / p
    best = 0.0
    for (J, _K), per_level in box_sums.items():
        pref = 2.0 ** (J * (n / p - params.gamma2))
        if math.isinf(q):
            inner = max(
                2.0 ** (j * inner_exp) * bj ** (1.0 / p) for j, bj in per_level.items()
            )
            best = max(best, pref * inner)
        else:
            acc = 0.0
            for j in sorted(per_level):
                acc += 2.0 ** (j * q * inner_exp) * per_level[j] ** (q / p)
            best = max(best, pref * acc ** (1.0 / q))
    return best


def scaling_reindex(field: CoeffField, m: int) -> CoeffField:
    """Coefficient law of f -> 2^m f(2^m .): shift levels, rescale values."""
    factor = 2.0 ** (m * (1.0 - field.dim / 2.0))
    entries = {
        WaveletIndex(idx.epsilon, idx.j + m, idx.k): factor * val
        for idx, val in field.entries.items()
    }
    return CoeffField(field.dim, entries)


def embedding_experiment(fields, param_pairs) -> list[dict]:
    """Norm ratios across parameter pairs; exploratory output, never gated."""
    rows = []
    for fid, field in enumerate(fields):
        for pa, pb in param_pairs:
            na = _norm_dispatch(field, pa)
            nb = _norm_dispatch(field, pb)
            ratio = na / nb if nb != 0.0 else math.inf
            rows.append(
                {
                    "field": fid,
                    "params_a": _param_label(pa),
                    "params_b": _param_label(pb),
                    "norm_a": na,
                    "norm_b": nb,
                    "ratio": ratio,
                }
            )
    return rows


def _norm_dispatch(field: CoeffField, params):
    if isinstance(params, BesovMorreyParams):
        if math.isinf(params.p):
            return norm_besov_inf(field, params.gamma1, params.q)
        return norm_besov_morrey(field, params)
    gamma1, q = params
    return norm_besov_inf(field, gamma1, q)


def _param_label(params) -> str:
    if isinstance(params, BesovMorreyParams):
        return f"BM(p={params.p},q={params.q},g1={params.gamma1},g2={params.gamma2})"
    return f"Binf(g1={params[0]},q={params[1]})"


def field_to_jsonl(field: CoeffField) -> str:
    """One JSON object per entry: {epsilon, j, k, a}; key-sorted and stable."""
    lines = []
    for idx in sorted(field.entries, key=lambda i: (i.j, i.k, i.epsilon)):
        lines.append(
            json.dumps(
                {
                    "epsilon": list(idx.epsilon),
                    "j": idx.j,
                    "k": list(idx.k),
                    "a": field.entries[idx],
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def field_from_jsonl(text: str, dim: int | None = None) -> CoeffField:
    entries = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        idx = WaveletIndex(tuple(obj["epsilon"]), int(obj["j"]), tuple(obj["k"]))
        entries[idx] = float(obj["a"])
    if not entries:
        if dim is None:
            raise ValueError("cannot infer dimension of an empty field")
        return CoeffField(dim, {})
    inferred = next(iter(entries)).dim
    return CoeffField(dim if dim is not None else inferred, entries)
