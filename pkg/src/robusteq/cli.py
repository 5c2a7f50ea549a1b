"""Command-line entry points.

Subcommands: certify, simulate, sweep, perturb, rate.  Every experiment is
driven by a JSON config (see config.SCHEMA); --set key=value patches any
config entry before validation.

Exit codes (stable contract for scripting):
    0   success; for certify: verdict Robust; for sweep: thresholds met
    1   certify: stationary but not robust
    2   certify: not stationary
    3   sweep: configured thresholds not met
    64  configuration error (schema, dimensions, infeasible settings)
    65  runtime artifact error (construction preconditions, schedules, ...)
"""

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import (
    ConvergenceCriterion,
    Experiment,
    MonteCarloSummary,
    fit_rate,
    sweep_map,
    wilson_interval,
)
from .config import load_config
from .domains import (
    VERDICT_NOT_STATIONARY,
    VERDICT_ROBUST,
    classify_equilibrium,
)
from .dynamics import run, write_trajectory_csv
from .errors import ConfigError, RobustEqError
from .games import game_distance, perturb_collapse1, perturb_collapse2, uniform_payoff_distance


def _parse_set(values):
    out = []
    for item in values or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got '{item}'", key=item)
        key, _, raw = item.partition("=")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        out.append((key, val))
    return out


def _outdir(cfg, args):
    path = args.out or cfg.output_dir
    os.makedirs(path, exist_ok=True)
    return path


def _dump_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _need_reference(cfg):
    if cfg.reference is None:
        raise ConfigError("this command needs a reference point", key="reference")
    return cfg.reference


def cmd_certify(cfg, args):
    x = _need_reference(cfg)
    cert = classify_equilibrium(cfg.game, x, cfg.tolerances)
    payload = cert.to_dict()
    payload["game"] = cfg.game.label
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        _dump_json(os.path.join(_outdir(cfg, args), "certificate.json"), payload)
    if cert.verdict == VERDICT_ROBUST:
        return 0
    if cert.verdict == VERDICT_NOT_STATIONARY:
        return 2
    return 1


def cmd_simulate(cfg, args):
    run_cfg = cfg.run if args.seed is None else replace(cfg.run, seed=args.seed)
    traj = run(cfg.game, cfg.reg, cfg.domain, cfg.oracle, run_cfg)
    out = _outdir(cfg, args)
    csv_path = os.path.join(out, "trajectory.csv")
    write_trajectory_csv(csv_path, traj, cfg.oracle)
    summary = traj.summary_dict()
    summary["game"] = cfg.game.label
    if cfg.reference is not None:
        crit = ConvergenceCriterion(
            x_ref=cfg.reference, eps=cfg.eps_conv, window_frac=cfg.analysis_window_frac
        )
        from .analysis import classify_convergence

        summary["converged"] = classify_convergence(traj, crit)
    else:
        summary["converged"] = None
    _dump_json(os.path.join(out, "summary.json"), summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_sweep(cfg, args):
    x = _need_reference(cfg)
    M = args.seeds or cfg.seeds
    jobs = args.jobs
    exp = Experiment(
        game=cfg.game, reg=cfg.reg, domain=cfg.domain, oracle=cfg.oracle,
        run_template=replace(cfg.run, x_ref=x, window_frac=cfg.analysis_window_frac,
                             thinning=0),
    )
    rows = sweep_map(
        exp,
        M,
        lambda t: (t.config.seed, t.window_max_dist, t.saturated),
        jobs=jobs,
        base_seed=cfg.base_seed,
    )
    out = _outdir(cfg, args)
    converged = 0
    aborted = 0
    with open(os.path.join(out, "sweep.csv"), "w") as fh:
        fh.write("run,seed,window_max_dist,converged,saturated\n")
        for i, (seed, wmax, sat) in enumerate(rows):
            conv = (not sat) and wmax <= cfg.eps_conv
            converged += int(conv)
            aborted += int(sat)
            fh.write(f"{i},{seed},{wmax!r},{int(conv)},{int(sat)}\n")
    lo, hi = wilson_interval(converged, M)
    summary = MonteCarloSummary(
        runs=M, converged=converged, aborted=aborted,
        estimate=converged / M, wilson_low=lo, wilson_high=hi,
    )
    payload = summary.to_dict()
    payload["eps_conv"] = cfg.eps_conv
    payload["thresholds"] = cfg.thresholds
    _dump_json(os.path.join(out, "sweep_summary.json"), payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    ok = True
    if "min_fraction" in cfg.thresholds:
        ok = ok and summary.estimate >= cfg.thresholds["min_fraction"]
    if "max_fraction" in cfg.thresholds:
        ok = ok and summary.estimate <= cfg.thresholds["max_fraction"]
    return 0 if ok else 3


def cmd_perturb(cfg, args):
    x = _need_reference(cfg)
    eps = args.eps if args.eps is not None else 0.1
    before = classify_equilibrium(cfg.game, x, cfg.tolerances)
    if args.kind == "collapse1":
        perturbed = perturb_collapse1(cfg.game, cfg.perturb_player, x, eps)
    else:
        perturbed = perturb_collapse2(cfg.game, cfg.perturb_player, x, eps, cfg.perturb_y)
    after = classify_equilibrium(perturbed, x, cfg.tolerances)
    payload = {
        "kind": args.kind,
        "eps": eps,
        "uniform_payoff_distance": uniform_payoff_distance(cfg.game, perturbed),
        "gradient_distance": game_distance(cfg.game, perturbed),
        "certificate_before": before.to_dict(),
        "certificate_after": after.to_dict(),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        _dump_json(os.path.join(_outdir(cfg, args), "perturb_report.json"), payload)
    return 0


def cmd_rate(cfg, args):
    x = _need_reference(cfg)
    run_cfg = cfg.run if args.seed is None else replace(cfg.run, seed=args.seed)
    if run_cfg.thinning == 0:
        run_cfg = replace(run_cfg, thinning=1)
    traj = run(cfg.game, cfg.reg, cfg.domain, cfg.oracle, run_cfg)
    model = args.model
    fit = fit_rate(traj, x, model=model, burn_in_frac=args.burn_in)
    out = _outdir(cfg, args)
    with open(os.path.join(out, "distances.csv"), "w") as fh:
        fh.write("n,dist\n")
        ref = np.asarray(x, dtype=float)
        for k in range(traj.ns.shape[0]):
            d = float(np.linalg.norm(traj.xs[k] - ref))
            fh.write(f"{int(traj.ns[k])},{d!r}\n")
    payload = fit.to_dict()
    _dump_json(os.path.join(out, "rate_fit.json"), payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="robusteq",
        description="certify strategic robustness and simulate regularized learning",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    jobs_default = int(os.environ.get("ROBUST_EQ_THREADS", "1"))

    def common(p):
        p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry (dotted path, JSON value)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="override run.seed")

    p = sub.add_parser("certify", help="classify the reference point")
    common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("simulate", help="one seeded run; trajectory CSV + summary")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="Monte Carlo convergence fraction")
    common(p)
    p.add_argument("--seeds", type=int, help="number of seeded runs")
    p.add_argument("--jobs", type=int, default=jobs_default,
                   help="concurrent runs (default: ROBUST_EQ_THREADS or 1)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("perturb", help="apply a metric-collapse construction")
    common(p)
    p.add_argument("--kind", choices=["collapse1", "collapse2"], required=True)
    p.add_argument("--eps", type=float, help="perturbation size (default 0.1)")
    p.set_defaults(fn=cmd_perturb)

    p = sub.add_parser("rate", help="run once and fit a convergence rate")
    common(p)
    p.add_argument("--model", choices=["GeometricLog", "PowerLog"], default="GeometricLog")
    p.add_argument("--burn-in", type=float, default=0.2, dest="burn_in")
    p.set_defaults(fn=cmd_rate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=_parse_set(getattr(args, "set", None)))
        return args.fn(cfg, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 64
    except RobustEqError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 65


if __name__ == "__main__":
    sys.exit(main())
