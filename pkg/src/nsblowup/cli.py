"""Experiment runner: one subcommand per verification family.

Every subcommand recomputes its checks from the configuration, writes a
machine-readable artifact (CSV or JSON) whose header echoes the full
configuration and code version, and exits 0 only if all gated checks pass
(2 on a failed gate, 3 on an exhausted numeric budget).  Identical
configurations produce byte-identical files; the worker-count flag is
accepted for symmetry but results never depend on it because all
reductions run in a fixed order.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .besov import (
    BesovMorreyParams,
    besov_inf_norm_of_h,
    coeff_field_of_h,
    norm_besov_morrey,
)
from .correlation import (
    dyadic_lower_bound,
    h_st_closed,
    partial_blowup_integral,
)
from .flows import FlowSpec, symmetry_suite
from .gauss1d import PolyGauss1D, moment_integral, multiply, scale_shift
from .initial_data import (
    build_u0,
    build_vaguelettes,
    divergence_check,
    export_json,
    schwartz_tail_check,
    vanishing_moments_check,
)
from .meyer import (
    FOUR_THIRDS_PI,
    TWO_THIRDS_PI,
    WaveletIndex,
    fourier_partition_deviation,
    omega,
    orthonormality_check,
    phi_spatial,
    psi0_hat,
)
from .numutil import linear_fit
from .oracle import BudgetExceeded, integrate_1d
from .schemas import COLUMNS, SCHEMA_VERSION, float_repr


@dataclass
class ExperimentConfig:
    dim: int = 3
    levels: int = 6
    t: float = 0.25
    delta: float = 1.0
    prune_radius: int = 6
    tol: float = 1e-8
    seed: int = 0
    output: str | None = None
    format: str = "csv"
    workers: int = 1


def _out_path(config: ExperimentConfig, command: str) -> str:
    if config.output:
        return config.output
    outdir = os.environ.get("NSBLOWUP_OUTDIR", ".")
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, f"{command}.{config.format}")


def _write_rows(config: ExperimentConfig, command: str, schema: str, rows) -> str:
    path = _out_path(config, command)
    cols = COLUMNS[schema]
    cfg_items = " ".join(
        f"{k}={float_repr(v)}" for k, v in sorted(asdict(config).items())
    )
    if config.format == "csv":
        lines = [
            f"# nsblowup {__version__} schema={schema} v{SCHEMA_VERSION}",
            f"# config: {cfg_items}",
            ",".join(cols),
        ]
        for row in rows:
            lines.append(",".join(float_repr(row[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "version": __version__,
            "schema": {"name": schema, "version": SCHEMA_VERSION},
            "config": asdict(config),
            "rows": list(rows),
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _finish(config, command, schema, rows, failures) -> int:
    path = _write_rows(config, command, schema, rows)
    if failures:
        print(f"{command}: FAIL ({len(failures)} gated check(s)) -> {path}")
        for name in failures:
            print(f"  failed: {name}")
        return 2
    print(f"{command}: ok -> {path}")
    return 0


# ---------------------------------------------------------------- lemma31

def _reference_identities(t: float, s: float, j: int, k: int, x: float):
    """Closed-form vs quadrature values of the four convolution integrals."""
    out = []
    tau = t - s
    half_t = PolyGauss1D(1.0, 0.0, 1.0 / (4.0 * t), (1.0,))
    # kernel-side Gaussian factors as functions of the integration variable y
    ker0 = PolyGauss1D(1.0, x, 1.0 / (4.0 * tau), (1.0,))
    ker1 = PolyGauss1D(1.0, x, 1.0 / (4.0 * tau), (0.0, -1.0))  # (x - y)
    ident1 = tau**-0.5 * moment_integral(multiply(ker0, half_t))
    ident2 = tau**-1.5 * moment_integral(multiply(ker1, half_t))
    kert = PolyGauss1D(1.0, x, 1.0 / (4.0 * t), (1.0,))
    bump0 = scale_shift(PolyGauss1D(1.0, 0.0, 1.0, (1.0,)), 2.0**j, float(k))
    bump1 = scale_shift(PolyGauss1D(1.0, 0.0, 1.0, (0.0, 1.0)), 2.0**j, float(k))
    ident3 = t**-0.5 * moment_integral(multiply(kert, bump0))
    ident4 = t**-0.5 * moment_integral(multiply(kert, bump1))

    def q1(y):
        return np.exp(-((x - y) ** 2) / (4.0 * tau)) * np.exp(-(y**2) / (4.0 * t))

    def q2(y):
        return (x - y) * q1(y)

    def q3(y):
        return np.exp(-((x - y) ** 2) / (4.0 * t)) * np.exp(-((2.0**j * y - k) ** 2))

    def q4(y):
        return (2.0**j * y - k) * q3(y)

    span = (x - 40.0 * math.sqrt(t), x + 40.0 * math.sqrt(t))
    out.append(("conv_plain", ident1, tau**-0.5 * integrate_1d(q1, span, 1e-13).value))
    out.append(("conv_grad", ident2, tau**-1.5 * integrate_1d(q2, span, 1e-13).value))
    out.append(("conv_dyadic", ident3, t**-0.5 * integrate_1d(q3, span, 1e-13).value))
    out.append(("conv_dyadic_grad", ident4, t**-0.5 * integrate_1d(q4, span, 1e-13).value))
    return out


def cmd_lemma31(config: ExperimentConfig) -> int:
    tol = 1e-10
    rows = []
    failures = []
    for t, s in ((0.5, 0.25), (1.0, 0.5), (0.25, 0.1)):
        for j in (0, 1, 2):
            for k in (0, 3):
                for x in (-1.0, 0.0, 1.0, 2.0):
                    for name, closed, quad in _reference_identities(t, s, j, k, x):
                        rel = abs(closed - quad) / max(1.0, abs(closed), abs(quad))
                        ok = rel <= tol
                        rows.append(
                            {
                                "identity": name,
                                "t": t,
                                "s": s,
                                "j": j,
                                "k": k,
                                "x": x,
                                "closed": closed,
                                "quadrature": quad,
                                "rel_err": rel,
                                "tol": tol,
                                "passed": ok,
                            }
                        )
                        if not ok:
                            failures.append(f"{name} t={t} s={s} j={j} k={k} x={x}")
    return _finish(config, "lemma31", "lemma31", rows, failures)


# ------------------------------------------------------------------ flows

def cmd_flows(config: ExperimentConfig, check: str = "symmetry") -> int:
    if check != "symmetry":
        raise SystemExit(f"unknown flows check: {check}")
    tol = 1e-12
    spec = FlowSpec(dim=config.dim, levels=tuple(range(1, min(config.levels, 3) + 1)),
                    delta=config.delta)
    results = symmetry_suite(spec, s=0.1, n_points=100, seed=config.seed, tol=tol)
    rows = []
    failures = []
    for name, n_pts, dev, ok in results:
        rows.append({"check": name, "points": n_pts, "max_dev": dev, "tol": tol, "passed": ok})
        if not ok:
            failures.append(name)
    return _finish(config, "flows", "flows", rows, failures)


# ------------------------------------------------------------------ norms

def cmd_norms(config: ExperimentConfig, space: str = "Binf", q: float = 3.0,
              p: float = 2.0, gamma2: float = 0.0) -> int:
    rows = []
    failures = []
    J = config.levels
    half = max(1, J // 2)
    if space == "Binf":
        n_j = besov_inf_norm_of_h(J, q, -1.0, config.dim)
        n_half = besov_inf_norm_of_h(half, q, -1.0, config.dim)
        if q > 2.0:
            delta_rel = abs(n_j - n_half) / n_j
            ok = delta_rel <= 0.01
            label = f"Binf q={q} stabilization J={half}->{J}"
        else:
            growth = n_j**q - n_half**q
            delta_rel = abs(growth - math.log(2.0)) / math.log(2.0)
            ok = delta_rel <= 0.10
            label = f"Binf q={q} harmonic growth J={half}->{J}"
        for jj, val in ((half, n_half), (J, n_j)):
            rows.append(
                {
                    "space": "Binf",
                    "p": math.inf,
                    "q": q,
                    "gamma1": -1.0,
                    "gamma2": 0.0,
                    "J": jj,
                    "value": val,
                    "delta_rel": delta_rel,
                    "passed": ok,
                }
            )
        if not ok:
            failures.append(label)
    elif space == "BM":
        params = BesovMorreyParams(p=p, q=q, gamma1=-1.0, gamma2=gamma2)
        for jj in sorted({half, J}):
            field = coeff_field_of_h(jj, config.dim)
            val = norm_besov_morrey(field, params)
            rows.append(
                {
                    "space": "BM",
                    "p": p,
                    "q": q,
                    "gamma1": -1.0,
                    "gamma2": gamma2,
                    "J": jj,
                    "value": val,
                    "delta_rel": 0.0,
                    "passed": math.isfinite(val),
                }
            )
            if not math.isfinite(val):
                failures.append(f"BM p={p} q={q} J={jj} not finite")
    else:
        raise SystemExit(f"unknown space: {space}")
    return _finish(config, "norms", "norms", rows, failures)


# ----------------------------------------------------------------- blowup

def cmd_blowup(config: ExperimentConfig) -> int:
    spec = FlowSpec(dim=config.dim, levels=tuple(range(1, config.levels + 1)),
                    delta=config.delta)
    t = config.t
    report = partial_blowup_integral(spec, t, config.levels, config.prune_radius)
    ratio_js = [j for j in spec.levels if j > report.j_t]
    ratios = dyadic_lower_bound(spec, t, ratio_js, config.prune_radius)

    window_rows = []
    for J, w, i_j, h_j, err in zip(
        report.J_values,
        report.window_integrals,
        report.partial_integrals,
        report.harmonic,
        report.window_error_bounds,
    ):
        window_rows.append({"J": J, "window": w, "I_J": i_j, "H_J": h_j,
                            "window_error_bound": err})
    ratio_rows = []
    for (j, r), smp in zip(ratios.ratios, ratios.samples):
        ratio_rows.append({"j": j, "s_j": smp.s, "h_value": smp.value,
                           "h_error_bound": smp.error_bound, "r_j": r})

    live = [i for i, J in enumerate(report.J_values) if J > report.j_t]
    i_vals = [report.partial_integrals[i] for i in live]
    h_vals = [report.harmonic[i] for i in live]
    slope, intercept, r2 = linear_fit(h_vals, i_vals)
    r_list = [r for _, r in ratios.ratios]
    med = float(np.median(r_list))
    failures = []
    increasing = all(b > a for a, b in zip(i_vals, i_vals[1:]))
    gates = {
        "I(J) strictly increasing": increasing,
        "positive regression slope": slope > 0,
        "R^2 >= 0.99": r2 >= 0.99,
        "all ratios positive": all(r > 0 for r in r_list),
        "min ratio >= 0.2 * median": min(r_list) >= 0.2 * med,
    }
    failures = [name for name, ok in gates.items() if not ok]
    summary = [{"slope": slope, "intercept": intercept, "r_squared": r2,
                "min_ratio": min(r_list), "median_ratio": med,
                "passed": not failures}]

    _write_rows(config, "blowup_windows", "blowup_windows", window_rows)
    _write_rows(config, "blowup_ratios", "blowup_ratios", ratio_rows)
    return _finish(config, "blowup", "blowup_summary", summary, failures)


# --------------------------------------------------------------- wavelets

def cmd_wavelets(config: ExperimentConfig) -> int:
    rows = []
    failures = []

    def gate(name, value, deviation, tol):
        ok = deviation <= tol
        rows.append({"check": name, "value": value, "deviation": deviation,
                     "tol": tol, "passed": ok})
        if not ok:
            failures.append(name)

    core = np.linspace(-TWO_THIRDS_PI, TWO_THIRDS_PI, 101)
    gate("psi0_core_plateau", 1.0, float(np.max(np.abs(psi0_hat(core) - 1.0))), 1e-15)
    outside = np.linspace(FOUR_THIRDS_PI, 3.0 * FOUR_THIRDS_PI, 101)
    gate("psi0_outside_support", 0.0, float(np.max(np.abs(psi0_hat(outside)))), 0.0)
    band = np.linspace(TWO_THIRDS_PI, FOUR_THIRDS_PI, 101)
    gate(
        "omega_partition",
        1.0,
        float(np.max(np.abs(omega(band) ** 2 + omega(2.0 * band) ** 2 - 1.0))),
        1e-12,
    )
    gate(
        "omega_mirror",
        1.0,
        float(np.max(np.abs(omega(band) ** 2 + omega(2.0 * math.pi - band) ** 2 - 1.0))),
        1e-12,
    )
    grid = np.linspace(-math.pi, math.pi, 50)
    gate("fourier_partition_low", 1.0, fourier_partition_deviation(0, grid), 1e-10)
    gate("fourier_partition_band", 1.0, fourier_partition_deviation(1, grid), 1e-10)

    span = np.linspace(-40.0, 40.0, 16001)
    w = np.full(span.size, span[1] - span[0])
    w[0] = w[-1] = 0.5 * (span[1] - span[0])
    phi0 = phi_spatial(0, span)
    gate("phi0_integral", 1.0, abs(float(np.dot(w, phi0)) - 1.0), 1e-6)
    phi1 = phi_spatial(1, span)
    for m in (0, 1, 2):
        gate(f"phi1_moment_{m}", 0.0, abs(float(np.dot(w, span**m * phi1))), 1e-8)

    one = (1,)
    idx = lambda j, k: WaveletIndex(one, j, (k,))
    gate("orthonormality_same", 1.0,
         abs(orthonormality_check([(idx(0, 0), idx(0, 0))]) - 0.0), 1e-6)
    gate("orthonormality_shift", 0.0,
         orthonormality_check([(idx(0, 0), idx(0, 1))]), 1e-6)
    return _finish(config, "wavelets", "wavelets", rows, failures)


# ------------------------------------------------------------ initialdata

def cmd_initialdata(config: ExperimentConfig) -> int:
    rows = []
    failures = []
    J = min(config.levels, 4)
    data = build_u0(config.delta, J, config.dim)
    rng = np.random.default_rng(config.seed)
    pts = rng.uniform(0.0, 3.0, size=(50, config.dim))
    div = divergence_check(data, pts)
    ok = div <= 1e-12
    rows.append({"check": "divergence", "N": 0, "beta": "-", "value": div,
                 "ratio": 0.0, "tol": 1e-12, "passed": ok})
    if not ok:
        failures.append("divergence")
    mom = vanishing_moments_check(build_vaguelettes(config.dim))
    ok = mom <= 1e-12
    rows.append({"check": "vanishing_moments", "N": 0, "beta": "-", "value": mom,
                 "ratio": 0.0, "tol": 1e-12, "passed": ok})
    if not ok:
        failures.append("vanishing_moments")
    for row in schwartz_tail_check(data, N_max=3, beta_max=2):
        ok = row["ratio"] <= 1.1
        rows.append(
            {
                "check": "tail_sup",
                "N": row["N"],
                "beta": "".join(str(b) for b in row["beta"]),
                "value": row["sup_J"],
                "ratio": row["ratio"],
                "tol": 1.1,
                "passed": ok,
            }
        )
        if not ok:
            failures.append(f"tail N={row['N']} beta={row['beta']}")
    export_path = _out_path(config, "initialdata_export").rsplit(".", 1)[0] + ".json"
    with open(export_path, "w", newline="\n") as fh:
        fh.write(export_json(data) + "\n")
    return _finish(config, "initialdata", "initialdata", rows, failures)


# ------------------------------------------------------------------- main

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--levels", type=int, default=6)
    parser.add_argument("--t", type=float, default=0.25)
    parser.add_argument("--delta", type=float, default=1.0)
    parser.add_argument("--prune-radius", type=int, default=6)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", type=str, default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, default=1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nsblowup",
        description="Reproducible verification experiments for the Gaussian "
        "heat-flow construction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("lemma31", "flows", "norms", "blowup", "wavelets", "initialdata"):
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "flows":
            sp.add_argument("--check", type=str, default="symmetry")
        if name == "norms":
            sp.add_argument("--space", choices=("Binf", "BM"), default="Binf")
            sp.add_argument("--q", type=float, default=3.0)
            sp.add_argument("--p", type=float, default=2.0)
            sp.add_argument("--gamma2", type=float, default=0.0)
    args = parser.parse_args(argv)
    config = ExperimentConfig(
        dim=args.dim,
        levels=args.levels,
        t=args.t,
        delta=args.delta,
        prune_radius=args.prune_radius,
        tol=args.tol,
        seed=args.seed,
        output=args.output,
        format=args.format,
        workers=args.workers,
    )
    try:
        if args.command == "lemma31":
            return cmd_lemma31(config)
        if args.command == "flows":
            return cmd_flows(config, args.check)
        if args.command == "norms":
            return cmd_norms(config, args.space, args.q, args.p, args.gamma2)
        if args.command == "blowup":
            return cmd_blowup(config)
        if args.command == "wavelets":
            return cmd_wavelets(config)
        if args.command == "initialdata":
            return cmd_initialdata(config)
    except BudgetExceeded as exc:
        print(f"{args.command}: numeric budget exhausted: {exc}", file=sys.stderr)
        return 3
    raise SystemExit(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
