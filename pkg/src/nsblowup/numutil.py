"""Small shared numeric helpers."""

from __future__ import annotations

import numpy as np


def pairwise_sum(values):
    """Sum with a fixed pairwise association tree.

    The reduction order depends only on the input order, never on worker
    count or chunking, so results are bitwise reproducible.
    """
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def double_factorial(n: int) -> float:
    """(n)!! with the empty-product convention for n <= 0."""
    out = 1.0
    k = n
    while k > 1:
        out *= k
        k -= 2
    return out


def linear_fit(x, y):
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def close(a: float, b: float, rtol: float, atol: float = 0.0) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))
