"""Fixed output schemas for the experiment runner.

Single source of truth for CSV column layouts; the CLI writers import these
so files and documentation cannot drift apart.  Floats are printed with 17
significant digits, which round-trips double precision exactly.
"""

from __future__ import annotations

SCHEMA_VERSION = 1

COLUMNS = {
    "lemma31": [
        "identity",
        "t",
        "s",
        "j",
        "k",
        "x",
        "closed",
        "quadrature",
        "rel_err",
        "tol",
        "passed",
    ],
    "flows": ["check", "points", "max_dev", "tol", "passed"],
    "norms": ["space", "p", "q", "gamma1", "gamma2", "J", "value", "delta_rel", "passed"],
    "blowup_windows": ["J", "window", "I_J", "H_J", "window_error_bound"],
    "blowup_ratios": ["j", "s_j", "h_value", "h_error_bound", "r_j"],
    "blowup_summary": ["slope", "intercept", "r_squared", "min_ratio", "median_ratio", "passed"],
    "wavelets": ["check", "value", "deviation", "tol", "passed"],
    "initialdata": ["check", "N", "beta", "value", "ratio", "tol", "passed"],
}


def float_repr(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)
