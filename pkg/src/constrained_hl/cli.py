"""Command line entry point: ``constrained-hl <command> [flags]``.

Commands: grow, envelope, verify, loewner, disc, ensemble. A ``--config``
JSON file supplies defaults for any flag; flags given explicitly win.
Exit status is 0 on success, 2 on a configuration problem and 3 when
``verify`` finds a failing check.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .checks import run_checks
from .disc import disc_run, tau_alpha_prediction
from .ensemble import ReplicaFailed, ensemble
from .geometry import diameter, envelope, hcap_estimate, max_height
from .growth import replay, run
from .loewner import discrepancy_report, halving_ratios, point_mass_error
from .svg import write_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3

# flag -> RunConfig field
_FLAG_FIELDS = {
    "n": "n", "t": "T", "delta": "delta", "eps_window": "epsilon", "seed": "seed",
    "replicas": "replicas", "envelope_eps": "envelope_eps",
    "grid_points": "envelope_points", "out": "out_dir",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--n", type=int, help="particles per unit time")
    p.add_argument("--t", type=float, help="final time T (steps = ceil(n T))")
    p.add_argument("--delta", type=float, help="doubling factor for stopping times")
    p.add_argument("--eps-window", type=float, help="slack of the doubling-time windows")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--replicas", type=int, help="number of replicas")
    p.add_argument("--envelope-eps", type=float, help="height of the pushed-forward line")
    p.add_argument("--grid-points", type=int, help="envelope / discrepancy grid size")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON file with defaults for the flags above")


def build_parser():
    parser = _Parser(prog="constrained-hl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("grow", help="single run: trace.csv, summary.json, scales.csv")
    _common(p)
    p = sub.add_parser("envelope", help="trace file -> envelope.csv and envelope.svg")
    _common(p)
    p.add_argument("--trace", help="trace CSV (default: <out>/trace.csv)")
    p = sub.add_parser("verify", help="run the property checks")
    _common(p)
    p = sub.add_parser("loewner", help="point-mass oracle and discrepancy report")
    _common(p)
    p = sub.add_parser("disc", help="tau_alpha experiment in the disc picture")
    _common(p)
    p.add_argument("--alpha", type=float, default=0.5, help="target arc half-width / pi")
    p = sub.add_parser("ensemble", help="replicated runs -> summary.json, scaling.csv")
    _common(p)
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--geometry", action="store_true", help="also summarise envelopes")
    return parser


def resolve_config(args):
    base = io.load_config(args.config) if args.config else {}
    for flag, key in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            base[key] = v
    return io.RunConfig.from_dict(base)


def _say(msg):
    print(msg, flush=True)


def cmd_grow(cfg, args):
    out = io.ensure_out_dir(cfg.out_dir)
    trace = run(cfg.n, cfg.steps, cfg.seed, T=cfg.T)
    io.write_trace_csv(trace, out / "trace.csv")
    io.write_scales_csv(trace, out / "scales.csv")
    io.write_json({"config": cfg.to_dict(), "run": io.trace_summary(trace, cfg)},
                  out / "summary.json")
    write_svg({"R_k": (trace.k, trace.R), "-L_k": (trace.k, -trace.L)}, out / "interval.svg",
              title="allowed interval", xlabel="k", ylabel="endpoint")
    _say(f"k = {trace.steps}  lambda = {trace.L[-1] + trace.R[-1]:.6g}  -> {out}")
    return EXIT_OK


def cmd_envelope(cfg, args):
    out = io.ensure_out_dir(cfg.out_dir)
    path = Path(args.trace) if args.trace else out / "trace.csv"
    xs = io.attachments_from_trace_csv(path)
    env = envelope(xs, cfg.n, eps=cfg.envelope_eps, m=cfg.envelope_points)
    io.write_envelope_csv(env, out / "envelope.csv")
    write_svg(env, out / "envelope.svg", title=f"envelope, k = {env.k}", xlabel="Re",
              ylabel="Im", equal_aspect=True)
    _say(f"diameter = {diameter(env):.6g}  max height = {max_height(env):.6g}  -> {out}")
    return EXIT_OK


def cmd_verify(cfg, args):
    results = run_checks(seed=cfg.seed)
    for r in results:
        _say(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


def cmd_loewner(cfg, args):
    out = io.ensure_out_dir(cfg.out_dir)
    errs, ratios = halving_ratios()
    grid_err = point_mass_error(dt=1e-3)
    trace = run(cfg.n, cfg.steps, cfg.seed, T=cfg.T)
    m = max(2, int(round(math.sqrt(min(cfg.envelope_points, 400)))))
    grid = [complex(a, b) for b in np.linspace(0.5, 2.0, m) for a in np.linspace(-2, 2, m)]
    rows = discrepancy_report(trace.attachments, cfg.n, trace.steps / cfg.n, grid)
    io.write_discrepancy_csv(rows, out / "discrepancy.csv")
    io.write_json({"config": cfg.to_dict(),
                   "oracle": {"max_rel_error_dt_1e-3": grid_err, "halving_errors": errs,
                              "halving_ratios": ratios},
                   "discrepancy": {"sup_phi_minus_f": max(r[1] for r in rows),
                                   "sup_f_minus_id": max(r[2] for r in rows)}},
                  out / "summary.json")
    _say(f"halving ratios {ratios[0]:.2f}, {ratios[1]:.2f}  -> {out}")
    return EXIT_OK


def cmd_disc(cfg, args):
    if not 0 < args.alpha < 1:
        raise io.ConfigError("alpha must lie in (0, 1)")
    out = io.ensure_out_dir(cfg.out_dir)
    taus = []
    for r in range(cfg.replicas):
        res = disc_run(cfg.n, cfg.seed, args.alpha, replica=r)
        if r == 0:
            io.write_disc_csv(res, out / "disc.csv")
        taus.append(res.tau)
    reached = [t for t in taus if t is not None]
    io.write_json({"config": cfg.to_dict(), "alpha": args.alpha, "tau": taus,
                   "median_tau_over_n": float(np.median(reached)) / cfg.n if reached else None,
                   "prediction": tau_alpha_prediction(cfg.n, args.alpha) if cfg.n >= 2 else None},
                  out / "summary.json")
    _say(f"tau = {taus}  -> {out}")
    return EXIT_OK


def cmd_ensemble(cfg, args):
    out = io.ensure_out_dir(cfg.out_dir)
    summ = ensemble(cfg, workers=args.workers, geometry=args.geometry)
    io.write_json({"config": cfg.to_dict(), "summary": summ.to_dict()}, out / "summary.json")
    rows = summ.curve()
    io.write_curve_csv(("t", "lambda_q10", "lambda_median", "lambda_q90", "R_median",
                        "L_median"), rows, out / "scaling.csv")
    ts = [r[0] for r in rows]
    write_svg([("q10", ts, [r[1] for r in rows]), ("median", ts, [r[2] for r in rows]),
               ("q90", ts, [r[3] for r in rows])], out / "scaling.svg",
              title="lambda / sqrt(t log n)", xlabel="t", ylabel="ratio")
    _say(f"median lambda ratio = {summ.to_dict()['median_lambda_ratio']}  -> {out}")
    return EXIT_OK


COMMANDS = {"grow": cmd_grow, "envelope": cmd_envelope, "verify": cmd_verify,
            "loewner": cmd_loewner, "disc": cmd_disc, "ensemble": cmd_ensemble}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except io.ConfigError as exc:
        print(f"constrained-hl: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReplicaFailed as exc:
        print(f"constrained-hl: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
