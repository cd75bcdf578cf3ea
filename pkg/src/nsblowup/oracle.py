"""Independent numerical integration used to cross-check every closed form.

Deliberately simple and self-contained: plain panel quadrature over
Gauss-Legendre nodes, plus Gauss-Hermite rules for weighted polynomial
exactness checks.  Nothing here shares code with the exact-algebra modules;
independence is the point.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

_G7 = np.polynomial.legendre.leggauss(7)
_G15 = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True


class BudgetExceeded(RuntimeError):
    """Raised by callers that refuse to use a non-converged estimate."""

    def __init__(self, message: str, result: QuadratureResult):
        super().__init__(message)
        self.result = result


def _panel(f, a: float, b: float):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x7, w7 = _G7
    x15, w15 = _G15
    i7 = half * float(np.dot(w7, f(mid + half * x7)))
    i15 = half * float(np.dot(w15, f(mid + half * x15)))
    return i15, abs(i15 - i7)


def integrate_1d(f, interval, tol: float = 1e-10, max_panels: int = 4000) -> QuadratureResult:
    """Adaptive 1-D quadrature with an embedded low/high order error estimate.

    The panel with the largest local estimate is bisected until the summed
    estimate drops below ``tol`` (absolute) or the panel budget runs out.
    ``f`` must accept a 1-D ndarray of nodes.
    """
    a, b = float(interval[0]), float(interval[1])
    if not tol > 0:
        raise ValueError("tol must be > 0")
    val, err = _panel(f, a, b)
    evals = 30
    counter = 0
    heap = [(-err, counter, a, b, val, err)]
    total_err = err
    while total_err > tol and len(heap) < max_panels:
        neg_err, _, pa, pb, pval, perr = heapq.heappop(heap)
        total_err -= perr
        mid = 0.5 * (pa + pb)
        lv, le = _panel(f, pa, mid)
        rv, re = _panel(f, mid, pb)
        evals += 60
        for seg in ((lv, le, pa, mid), (rv, re, mid, pb)):
            counter += 1
            heapq.heappush(heap, (-seg[1], counter, seg[2], seg[3], seg[0], seg[1]))
        total_err += le + re
    # accumulate panel values left to right for a reproducible total
    value = 0.0
    for _, v in sorted((item[2], item[4]) for item in heap):
        value += v
    return QuadratureResult(value, total_err, evals, converged=total_err <= tol)


def _axis_rule(lo: float, hi: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    weights = (halves[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tensor_pass(f, box, panels: int, order: int, chunk: int) -> float:
    n = len(box)
    rules = [_axis_rule(lo, hi, panels, order) for lo, hi in box]
    shapes = []
    for i in range(1, n):
        shape = [1] * n
        shape[i] = rules[i][0].size
        shapes.append(tuple(shape))
    total = 0.0
    nodes0, weights0 = rules[0]
    for start in range(0, nodes0.size, chunk):
        stop = min(start + chunk, nodes0.size)
        args = [nodes0[start:stop].reshape((-1,) + (1,) * (n - 1))]
        for i in range(1, n):
            args.append(rules[i][0].reshape(shapes[i - 1]))
        block = np.asarray(f(*args), dtype=float)
        block = np.broadcast_to(block, (stop - start,) + tuple(r[0].size for r in rules[1:]))
        # contract trailing axes first, then the chunked axis
        acc = block
        for i in range(n - 1, 0, -1):
            acc = acc @ rules[i][1]
        total += float(np.dot(acc, weights0[start:stop]))
    return total


def integrate_nd(
    f,
    box,
    tol: float = 1e-8,
    order: int = 14,
    panel_schedule=(3, 6, 12, 20),
    chunk: int = 24,
) -> QuadratureResult:
    """Tensorized quadrature with per-axis panel refinement.

    ``f`` receives one broadcast-ready array per axis (meshgrid-style shapes)
    and must return the integrand on the implied grid.  ``tol`` is relative
    to max(1, |integral|).  Non-convergence is reported through the
    ``converged`` flag, never silently dropped.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    n = len(box)
    prev = None
    err = np.inf
    evals = 0
    value = 0.0
    for panels in panel_schedule:
        value = _tensor_pass(f, box, panels, order, chunk)
        evals += (panels * order) ** n
        if prev is not None:
            err = abs(value - prev)
            if err <= tol * max(1.0, abs(value)):
                return QuadratureResult(value, err, evals, converged=True)
        prev = value
    return QuadratureResult(value, err, evals, converged=False)


def gauss_hermite(order: int):
    """Nodes and weights for ∫ f(x) e^{-x^2} dx ≈ Σ w_i f(x_i)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return np.polynomial.hermite.hermgauss(order)
