"""Command-line front end.

Subcommands: simulate (one PDMP path to CSV plus a JSON report), lyapunov
(top-exponent estimates), sweep (exponent vs switching-speed curve), and
verify-all (the full acceptance suite).  The PDMP_THREADS environment
variable caps Monte-Carlo parallelism (default 1).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import lyapunov, scenarios


def _resolve_scenario(args):
    if args.config:
        return scenarios.load_scenario(args.config)
    if args.scenario:
        return scenarios.get(args.scenario)
    raise SystemExit("one of --scenario or --config is required")


def _add_scenario_args(p):
    p.add_argument("--scenario", help="built-in scenario name")
    p.add_argument("--config", help="JSON scenario file")
    p.add_argument("--beta", type=float, default=None,
                   help="switching-speed multiplier (default: scenario's)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")


def cmd_simulate(args):
    scen = _resolve_scenario(args)
    if args.seed is not None:
        scen.seed = args.seed
    report = scenarios.run(scen, args.out, beta=args.beta)
    print(f"wrote {', '.join(report.artifacts)}")
    for band in report.bands:
        mark = "pass" if band["passed"] else "FAIL"
        print(f"  [{mark}] {band['name']} ({band['provenance']})")
    return 0 if report.all_passed() else 1


def cmd_lyapunov(args):
    scen = _resolve_scenario(args)
    seed = scen.seed if args.seed is None else args.seed
    lin = scen.linear_system(args.beta)
    ests = []
    if args.estimator in ("angular", "both"):
        ests.append(lyapunov.estimate_lambda_angular(
            lin, args.T, args.N, seed=seed))
    if args.estimator in ("lognorm", "both"):
        ests.append(lyapunov.estimate_lambda_lognorm(
            lin, args.T, args.N, seed=seed))
    for est in ests:
        print(f"{est.estimator}: lambda1 = {est.value:.6f} "
              f"+/- {est.stderr:.6f}  (T={est.T:g}, N={est.replicates})")
    if len(ests) == 2 and not ests[0].agrees_with(ests[1]):
        print("warning: estimators disagree beyond 3 combined sigma")
        return 1
    return 0


def cmd_sweep(args):
    scen = _resolve_scenario(args)
    seed = scen.seed if args.seed is None else args.seed
    betas = [float(b) for b in args.betas.split(",")]
    As = scen.matrices()
    sweep = lyapunov.lambda_beta_sweep(As, scen.base_rates, betas,
                                       args.T, args.N, seed=seed)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"fig_lambda_beta_{scen.name}.csv")
    with open(path, "w") as fh:
        lyapunov.sweep_to_csv(sweep, args.T, args.N, seed, fh)
    for beta, est in sweep:
        print(f"beta={beta:g}: lambda1 = {est.value:.6f} "
              f"+/- {est.stderr:.6f}")
    print(f"wrote {path}")
    return 0


def cmd_verify_all(args):
    from . import acceptance
    summary = acceptance.verify_all(args.out, stream=sys.stdout)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "acceptance_summary.json")
        with open(path, "w") as fh:
            json.dump(summary, fh, indent=2, default=_json_default)
            fh.write("\n")
        print(f"wrote {path}")
    return 0 if all(c["passed"] for c in summary["criteria"]) else 1


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="randswitch",
        description="simulate randomly switched ODE systems and estimate "
                    "their stability")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a scenario, write CSV + report")
    _add_scenario_args(ps)
    ps.add_argument("--out", default="out", help="output directory")
    ps.set_defaults(fn=cmd_simulate)

    pl = sub.add_parser("lyapunov", help="estimate the top exponent")
    _add_scenario_args(pl)
    pl.add_argument("--estimator", choices=("angular", "lognorm", "both"),
                    default="both")
    pl.add_argument("--T", type=float, default=200.0, help="horizon")
    pl.add_argument("--N", type=int, default=100, help="replicates")
    pl.set_defaults(fn=cmd_lyapunov)

    pw = sub.add_parser("sweep", help="exponent vs switching speed")
    _add_scenario_args(pw)
    pw.add_argument("--betas", default="1,3,10,30,100",
                    help="comma-separated multipliers")
    pw.add_argument("--T", type=float, default=200.0)
    pw.add_argument("--N", type=int, default=100)
    pw.add_argument("--out", default="out")
    pw.set_defaults(fn=cmd_sweep)

    pv = sub.add_parser("verify-all", help="run the acceptance suite")
    pv.add_argument("--out", default=None,
                    help="directory for the JSON summary")
    pv.set_defaults(fn=cmd_verify_all)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
