"""Command-line interface for solves, sweeps, limits, verification, two-asset runs.

Single-asset commands share one CSV schema (26 columns, exact order):

    theta1, theta_eps, Gamma, status, Lambda1, Lambda21, Lambda22, A,
    beta1, beta21, beta22, beta23, role, pi_IT, pi_HFT, pi_HFT_holding,
    pi_HFT_impact, penalty, err_p1, err_p2, loss_NT1, loss_NT2,
    soc1, soc2, soc3, residual

Floats are serialized with 17 significant digits so files round-trip
losslessly; unavailable fields are empty.  Two-asset runs use a superset
schema with per-asset/per-entry suffixes (``lambda22_12`` is the row-1,
column-2 entry, ``asset2_role`` the direction taxonomy of asset 2).

Exit codes: 0 success, 1 invalid input, 2 no equilibrium / no
convergence, 3 verification failure.  Identical arguments and seed
produce byte-identical output files; ``--output`` paths that are bare
file names are placed under ``$HFTKYLE_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .core import (Equilibrium, check_A_consistency, classify_role,
                   compute_outcomes)
from .errors import (HftKyleError, NoConvergence, NoRoot, NotBestResponse,
                     OnlySOCViolating, PDViolation)
from .limits import (duopoly_outcomes, duopoly_role, find_gamma_tilde,
                     gamma_inf_thresholds, solve_duopoly, solve_gamma_inf,
                     solve_theta1_zero)
from .montecarlo import ESTIMANDS, SimConfig, best_response_check, simulate
from .multiasset import (MultiParams, baseline_full_params,
                         baseline_spillover_params, classify_multi_roles,
                         multi_moment_objectives, solve_multi_full,
                         solve_multi_spillover)
from .params import ModelParams
from .solver import STATUS_FOUND, solve
from .sweeps import STATUS_FOUND_DUOPOLY, SweepSpec, run_sweep

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_EQUILIBRIUM = 2
EXIT_VERIFICATION = 3

CSV_COLUMNS = [
    "theta1", "theta_eps", "Gamma", "status",
    "Lambda1", "Lambda21", "Lambda22", "A",
    "beta1", "beta21", "beta22", "beta23", "role",
    "pi_IT", "pi_HFT", "pi_HFT_holding", "pi_HFT_impact", "penalty",
    "err_p1", "err_p2", "loss_NT1", "loss_NT2",
    "soc1", "soc2", "soc3", "residual",
]

_BLOCKS = ("lambda1", "lambda21", "lambda22", "alpha",
           "beta1", "beta21", "beta22", "beta23")
MULTI_COLUMNS = (
    ["variant", "gamma1", "gamma3", "rho", "status"]
    + [f"{b}_{i}{j}" for b in _BLOCKS for i in (1, 2) for j in (1, 2)]
    + ["asset1_role", "asset2_role", "pd1", "pd2", "pd3",
       "pi_IT", "pi_HFT", "penalty", "block_diag", "residual"]
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(value, ".17g")
    return str(value)


def _resolve_output(path):
    if path is None:
        return None
    base = os.environ.get("HFTKYLE_OUTPUT_DIR")
    if base and not os.path.dirname(path):
        return os.path.join(base, path)
    return path


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(records, columns, fmt, path):
    """Serialize records (list of dicts) as CSV or JSON, to path or stdout."""
    if fmt == "json":
        payload = records[0] if len(records) == 1 else records
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    else:
        lines = [",".join(columns)]
        for rec in records:
            lines.append(",".join(_fmt(rec.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    path = _resolve_output(path)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _blank_record(params=None, status=""):
    rec = dict.fromkeys(CSV_COLUMNS)
    rec["status"] = status
    if params is not None:
        rec["theta1"] = params.theta1
        rec["theta_eps"] = params.theta_eps
        rec["Gamma"] = params.Gamma
    return rec


def _equilibrium_record(params, eq, outcomes, role, status=STATUS_FOUND):
    rec = _blank_record(params, status)
    for name in ("Lambda1", "Lambda21", "Lambda22", "A",
                 "beta1", "beta21", "beta22", "beta23"):
        rec[name] = getattr(eq, name)
    socs = tuple(eq.soc_ok) + (None,) * (3 - len(eq.soc_ok))
    rec["soc1"], rec["soc2"], rec["soc3"] = socs
    rec["residual"] = eq.residual_norm
    if role is not None:
        rec["role"] = role.variant
    if outcomes is not None:
        for name in ("pi_IT", "pi_HFT", "pi_HFT_holding", "pi_HFT_impact",
                     "penalty", "err_p1", "err_p2", "loss_NT1", "loss_NT2"):
            rec[name] = getattr(outcomes, name)
    return rec


def _sweep_records(rows):
    out = []
    for row in rows:
        params = ModelParams(row.theta1, row.theta_eps, row.Gamma)
        if row.eq is not None:
            out.append(_equilibrium_record(params, row.eq, row.outcomes,
                                           row.role, row.status))
        elif row.duopoly is not None:
            out.append(_equilibrium_record(params, row.duopoly, row.outcomes,
                                           row.role, row.status))
        else:
            out.append(_blank_record(params, row.status))
    return out


# -- solve -------------------------------------------------------------------

def cmd_solve(args) -> int:
    params = ModelParams(args.theta1, args.theta_eps, args.gamma,
                         sigma_v=args.sigma_v, sigma_2=args.sigma_2)
    report = solve(params)
    if report.status != STATUS_FOUND:
        msg = (f"no linear equilibrium found at theta1={params.theta1}, "
               f"theta_eps={params.theta_eps}, Gamma={params.Gamma} "
               f"(status {report.status}).")
        if params.theta_eps == 0.0:
            msg += (" With a perfectly observed order the duopolistic regime"
                    " may apply below the existence threshold; try"
                    f" `hftkyle limits duopoly --theta1 {params.theta1}"
                    f" --gamma {params.Gamma}`.")
        print(msg, file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    eq = report.roots[0]
    rec = _equilibrium_record(params, eq, compute_outcomes(eq, params),
                              classify_role(eq))
    _emit([rec], CSV_COLUMNS, args.format, args.output)
    return EXIT_OK


# -- sweep -------------------------------------------------------------------

def _parse_grid(text):
    return np.array([float(tok) for tok in text.split(",") if tok.strip()])


def cmd_sweep(args) -> int:
    kwargs = {}
    if args.theta_eps_grid:
        kwargs["theta_eps_grid"] = _parse_grid(args.theta_eps_grid)
    if args.gamma_grid:
        kwargs["Gamma_grid"] = _parse_grid(args.gamma_grid)
    spec = SweepSpec(theta1=args.theta1,
                     continuation=not args.no_continuation, **kwargs)
    rows = run_sweep(spec, jobs=args.jobs)
    _emit(_sweep_records(rows), CSV_COLUMNS, args.format, args.output)
    return EXIT_OK


# -- limits ------------------------------------------------------------------

def cmd_limits(args) -> int:
    if args.regime == "theta1-zero":
        lim = solve_theta1_zero(args.theta_eps, args.gamma,
                                sigma_v=args.sigma_v, sigma_2=args.sigma_2)
        rec = _blank_record(status="LimitTheta1Zero")
        rec.update(theta1=0.0, theta_eps=args.theta_eps, Gamma=args.gamma,
                   A=lim.alpha_norm, Lambda22=lim.Lambda22, beta1=0.0,
                   beta21=lim.beta21, pi_IT=lim.pi_IT, pi_HFT=lim.pi_HFT,
                   penalty=lim.penalty)
        _emit([rec], CSV_COLUMNS, args.format, args.output)
        return EXIT_OK

    if args.regime == "gamma-inf":
        if args.thresholds:
            tilde, hat = gamma_inf_thresholds(args.theta1)
            rec = {"theta1": args.theta1, "theta_tilde": tilde,
                   "theta_hat": hat}
            _emit([rec], list(rec), args.format, args.output)
            return EXIT_OK
        lim = solve_gamma_inf(args.theta1, args.theta_eps,
                              sigma_v=args.sigma_v, sigma_2=args.sigma_2)
        rec = _blank_record(status="LimitGammaInf")
        rec.update(theta1=args.theta1, theta_eps=args.theta_eps,
                   Lambda1=lim.Lambda1, Lambda21=lim.Lambda21,
                   Lambda22=lim.Lambda22, A=lim.A, beta1=lim.beta,
                   beta21=0.0, beta22=0.0, beta23=-1.0, role="RoundTripper",
                   pi_IT=lim.pi_IT, pi_HFT=lim.pi_HFT, penalty=lim.penalty,
                   soc1=lim.soc_ok)
        _emit([rec], CSV_COLUMNS, args.format, args.output)
        return EXIT_OK

    if args.regime == "duopoly":
        params = ModelParams(args.theta1, 0.0, args.gamma,
                             sigma_v=args.sigma_v, sigma_2=args.sigma_2)
        duo = solve_duopoly(args.theta1, args.gamma)
        rec = _equilibrium_record(params, duo,
                                  duopoly_outcomes(duo, params),
                                  duopoly_role(duo),
                                  status=STATUS_FOUND_DUOPOLY)
        _emit([rec], CSV_COLUMNS, args.format, args.output)
        return EXIT_OK

    # gamma-tilde
    value = find_gamma_tilde(args.theta1, width=args.width)
    rec = {"theta1": args.theta1, "gamma_tilde": value, "width": args.width}
    _emit([rec], list(rec), args.format, args.output)
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def _load_equilibrium(path) -> Equilibrium:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        data = data[0]
    fields = ("Lambda1", "Lambda21", "Lambda22", "A",
              "beta1", "beta21", "beta22", "beta23")
    missing = [f for f in fields if data.get(f) is None]
    if missing:
        raise ValueError(f"equilibrium file {path} lacks fields {missing}")
    return Equilibrium(**{f: float(data[f]) for f in fields})


def cmd_verify(args) -> int:
    params = ModelParams(args.theta1, args.theta_eps, args.gamma,
                         sigma_v=args.sigma_v, sigma_2=args.sigma_2)
    sim = SimConfig(n_paths=args.paths, seed=args.seed,
                    antithetic=not args.no_antithetic,
                    n_batches=args.batches)
    if args.eq_file:
        eq = _load_equilibrium(args.eq_file)
    else:
        report = solve(params)
        if report.status != STATUS_FOUND:
            print(f"no equilibrium to verify (status {report.status})",
                  file=sys.stderr)
            return EXIT_NO_EQUILIBRIUM
        eq = report.roots[0]

    closed = compute_outcomes(eq, params)
    estimates = simulate(eq, params, sim).as_dict()
    lines = []
    failures = []
    for name in ESTIMANDS:
        if name == "inventory_second_moment":
            continue
        mean, se = estimates[name]
        target = getattr(closed, name)
        z = (mean - target) / se if se > 0.0 else float("inf") \
            if mean != target else 0.0
        ok = abs(z) <= 4.0
        if not ok:
            failures.append(f"{name}: z={z:.2f}")
        lines.append({"estimand": name, "closed_form": target,
                      "mc_mean": mean, "mc_se": se, "z": z, "ok": ok})

    drift = abs(check_A_consistency(eq, params))
    deviations_ok = True
    deviation_msg = ""
    try:
        best_response_check(eq, params, sim)
    except NotBestResponse as exc:
        deviations_ok = False
        deviation_msg = str(exc)

    report = {
        "params": {"theta1": params.theta1, "theta_eps": params.theta_eps,
                   "Gamma": params.Gamma},
        "n_paths": sim.n_paths, "seed": sim.seed,
        "moments": lines,
        "A_consistency_drift": drift,
        "deviations_ok": deviations_ok,
    }
    if deviation_msg:
        report["deviation_failure"] = deviation_msg
    if args.format == "json":
        _emit([report], list(report), "json", args.output)
    else:
        cols = ["estimand", "closed_form", "mc_mean", "mc_se", "z", "ok"]
        _emit(lines, cols, "csv", args.output)
    if failures or not deviations_ok:
        detail = "; ".join(failures) or deviation_msg
        print(f"verification FAILED: {detail}", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


# -- multi -------------------------------------------------------------------

def _load_multi_params(path) -> MultiParams:
    with open(path) as fh:
        data = json.load(fh)
    return MultiParams(**{k: np.asarray(v, dtype=float)
                          for k, v in data.items()})


def _as_matrix(block, variant):
    """2x2 view of a coefficient block (vectors become first columns)."""
    arr = np.asarray(block, dtype=float)
    if arr.ndim == 0:
        out = np.zeros((2, 2))
        out[0, 0] = float(arr)
        return out
    if arr.ndim == 1:
        out = np.zeros((2, 2))
        out[:, 0] = arr
        return out
    return arr


def _multi_record(mp, eq=None, status="Found", error=""):
    rec = dict.fromkeys(MULTI_COLUMNS)
    rec.update(gamma1=float(mp.gamma_mat[0, 0]),
               gamma3=float(mp.gamma_mat[0, 1]), rho=mp.rho,
               status=status if not error else error)
    if eq is None:
        return rec
    rec["variant"] = eq.variant
    off = 0.0
    for name in _BLOCKS:
        mat = _as_matrix(getattr(eq, name), eq.variant)
        for i in (0, 1):
            for j in (0, 1):
                rec[f"{name}_{i + 1}{j + 1}"] = float(mat[i, j])
        off = max(off, abs(mat[0, 1]), abs(mat[1, 0]))
    if eq.variant == "spillover":
        r1, r2 = classify_multi_roles(eq, mp.rho)
        rec["asset1_role"], rec["asset2_role"] = r1.variant, r2.variant
        off = max(off, abs(eq.beta1[1]), abs(eq.beta21[1]))
    rec["pd1"], rec["pd2"], rec["pd3"] = eq.pd_ok
    obj = multi_moment_objectives(eq, mp)
    rec.update(pi_IT=obj["pi_IT"], pi_HFT=obj["pi_HFT"],
               penalty=obj["penalty"])
    rec["block_diag"] = bool(off < 1e-8)
    rec["residual"] = eq.fixed_point_residual
    return rec


def cmd_multi(args) -> int:
    solver = solve_multi_full if args.variant == "full" \
        else solve_multi_spillover
    if args.params_file:
        grids = [_load_multi_params(args.params_file)]
    else:
        make = baseline_full_params if args.variant == "full" \
            else baseline_spillover_params
        gammas = (_parse_grid(args.gamma1_grid) if args.gamma1_grid
                  else np.round(np.arange(0.0, 0.51, 0.1), 10))
        grids = [make(float(g)) for g in gammas]

    records = []
    any_failed = False
    start = None
    for mp in grids:
        try:
            eq = solver(mp, start=start)
        except (NoConvergence, PDViolation) as exc:
            any_failed = True
            start = None
            records.append(_multi_record(mp, error=type(exc).__name__))
            continue
        start = eq
        records.append(_multi_record(mp, eq))
    _emit(records, MULTI_COLUMNS, args.format, args.output)
    return EXIT_NO_EQUILIBRIUM if any_failed else EXIT_OK


# -- parser ------------------------------------------------------------------

def _add_output_flags(p):
    p.add_argument("--output", default=None,
                   help="output file (default: stdout); bare names go "
                        "under $HFTKYLE_OUTPUT_DIR when set")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_scale_flags(p):
    p.add_argument("--sigma-v", type=float, default=1.0)
    p.add_argument("--sigma-2", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hftkyle",
        description="Equilibria of a two-period market with an "
                    "order-anticipating fast trader.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one parameter point")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta-eps", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    _add_scale_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="grid sweep at fixed theta1")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta-eps-grid", default=None,
                   help="comma-separated values (default: built-in grid)")
    p.add_argument("--gamma-grid", default=None)
    p.add_argument("--no-continuation", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    _add_output_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("limits", help="closed-form limit regimes")
    p.add_argument("regime", choices=("theta1-zero", "gamma-inf",
                                      "duopoly", "gamma-tilde"))
    p.add_argument("--theta1", type=float, default=1.0)
    p.add_argument("--theta-eps", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--thresholds", action="store_true",
                   help="gamma-inf: emit profit-threshold noise levels")
    p.add_argument("--width", type=float, default=1e-4,
                   help="gamma-tilde: bracket width")
    _add_scale_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("verify", help="Monte Carlo verification of a solve")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta-eps", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--paths", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batches", type=int, default=100)
    p.add_argument("--no-antithetic", action="store_true")
    p.add_argument("--eq-file", default=None,
                   help="JSON equilibrium record to verify instead of "
                        "solving (e.g. the output of `solve --format json`)")
    _add_scale_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("multi", help="two-asset fixed points")
    p.add_argument("--variant", choices=("full", "spillover"), required=True)
    p.add_argument("--params-file", default=None,
                   help="JSON file with p0, Sigma_v, Sigma_eps, Sigma_1, "
                        "Sigma_2, gamma_mat")
    p.add_argument("--gamma1-grid", default=None,
                   help="comma-separated gamma1 values for the baseline "
                        "calibration (default 0,0.1,...,0.5)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_multi)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NoRoot, OnlySOCViolating, NoConvergence, PDViolation) as exc:
        print(f"no equilibrium: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    except NotBestResponse as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except HftKyleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM


if __name__ == "__main__":
    sys.exit(main())
