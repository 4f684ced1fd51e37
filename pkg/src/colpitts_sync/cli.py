"""``colpitts-sync`` command line: simulate | sync | optimize | table.

Exit status: 0 success, 1 configuration error, 2 numerical divergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, config as C
from .backstepping import lyapunov_values, transform_error
from .experiments import ALGORITHMS, matched_pso_iters, run_optimizer, run_table
from .io import (
    CONVERGENCE_COLUMNS,
    SIMULATE_COLUMNS,
    SUMMARY_COLUMNS,
    SYNC_COLUMNS,
    TABLE_COLUMNS,
    write_csv,
    write_manifest,
)
from .sim import DivergenceError, simulate_pair, simulate_single

log = logging.getLogger("colpitts_sync")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2

# which config section the time flags act on, per command
_TIME_SECTION = {"simulate": "simulate", "sync": "sync", "optimize": "objective", "table": "objective"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file or a run manifest (.json)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--dt", type=float)
    common.add_argument("--t-final", type=float)
    common.add_argument("--t-activate", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--algo", choices=ALGORITHMS)
    algo.add_argument("--repeats", type=int)
    algo.add_argument("--workers", type=int, help="threads for concurrent runs")
    algo.add_argument(
        "--match-budget",
        action="store_true",
        help="give PSO as many objective evaluations as the configured SSO run",
    )

    parser = _Parser(prog="colpitts-sync", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="uncontrolled single oscillator run")
    sub.add_parser("sync", parents=[common], help="master/slave synchronisation run")
    sub.add_parser("optimize", parents=[common, algo], help="tune (k1, k3) with SSO or PSO")
    sub.add_parser("table", parents=[common, algo], help="repeated seeded tuning runs")
    return parser


def resolve(args) -> dict:
    cfg = C.load_config(args.config)
    section = _TIME_SECTION[args.command]
    overrides: dict[str, dict] = {section: {}, "optimize": {}}
    for flag, key in (("dt", "dt"), ("t_final", "t_final"), ("t_activate", "t_activate")):
        value = getattr(args, flag)
        if value is not None:
            if key not in cfg[section]:
                raise C.ConfigError(f"--{flag.replace('_', '-')} does not apply to {args.command}")
            overrides[section][key] = value
    for key in ("seed", "algo", "repeats", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            overrides["optimize"][key] = value
    cfg = C.merge(cfg, overrides)
    if getattr(args, "match_budget", False):
        sso = C.sso_config(cfg, 0)
        cfg["pso"]["iters"] = matched_pso_iters(sso, cfg["pso"]["swarm"])
    return cfg


def _manifest(command, cfg, outputs, results, started):
    return {
        "command": command,
        "version": __version__,
        "seed": cfg["optimize"]["seed"],
        "config": cfg,
        "outputs": [p.name for p in outputs],
        "results": results,
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
    }


def cmd_simulate(cfg, out: Path, started):
    s = cfg["simulate"]
    params = C.oscillator(cfg)
    times, states = C.guarded(simulate_single, params, s["ic"], s["dt"], s["t_final"], s["record_stride"])
    csv = write_csv(out / "simulate.csv", SIMULATE_COLUMNS, ([t, *x] for t, x in zip(times, states)))
    peak = float(abs(states).max())
    write_manifest(out / "simulate.manifest.json", _manifest("simulate", cfg, [csv], {"max_abs_state": peak}, started))
    print(f"wrote {csv} ({len(times)} samples, max |state| = {peak:.6g})")


def cmd_sync(cfg, out: Path, started):
    params, g, sim = C.oscillator(cfg), C.gains(cfg), C.sync_sim(cfg)
    traj = simulate_pair(params, g, sim, C.variant(cfg["sync"]))
    v3 = [lyapunov_values(transform_error(e, g)).v3 for e in traj.errors]
    rows = (
        [t, *m, *s, *e, u, v]
        for t, m, s, e, u, v in zip(traj.times, traj.master, traj.slave, traj.errors, traj.control, v3)
    )
    csv = write_csv(out / "sync.csv", SYNC_COLUMNS, rows)
    final_err = float(abs(traj.errors[-1]).max())
    results = {"tss": traj.tss, "final_error_inf": final_err}
    write_manifest(out / "sync.manifest.json", _manifest("sync", cfg, [csv], results, started))
    print(f"TSS = {traj.tss:.10g}; final |e|_inf = {final_err:.3g}")


def _make_cfg(cfg, algo):
    return (lambda seed: C.sso_config(cfg, seed)) if algo == "sso" else (lambda seed: C.pso_config(cfg, seed))


def cmd_optimize(cfg, out: Path, started):
    algo, seed = cfg["optimize"]["algo"], cfg["optimize"]["seed"]
    opt_cfg = _make_cfg(cfg, algo)(seed)
    res = run_optimizer(algo, C.objective(cfg), opt_cfg)
    rows = (
        [m + 1, c, p[0], p[1], n]
        for m, (c, p, n) in enumerate(zip(res.history, res.history_points, res.history_evals))
    )
    csv = write_csv(out / f"optimize_{algo}_convergence.csv", CONVERGENCE_COLUMNS, rows)
    best = out / f"optimize_{algo}_result.json"
    best.write_text(json.dumps(res.to_dict(), indent=2) + "\n", encoding="utf-8")
    results = {"best_point": list(res.best_point), "best_cost": res.best_cost, "evals": res.evals}
    write_manifest(out / f"optimize_{algo}.manifest.json", _manifest("optimize", cfg, [csv, best], results, started))
    print(f"{algo}: best (k1, k3) = ({res.best_point[0]:.6g}, {res.best_point[1]:.6g}), "
          f"TSS = {res.best_cost:.10g}, {res.evals} evaluations")


def cmd_table(cfg, out: Path, started):
    o = cfg["optimize"]
    algo = o["algo"]
    summary, _ = C.guarded(
        run_table, algo, C.objective(cfg), _make_cfg(cfg, algo), o["repeats"], o["seed"], o["workers"]
    )
    rows = ([r.experiment, r.seed, r.k1, r.k3, r.tss] for r in summary.rows)
    csv = write_csv(out / f"table_{algo}.csv", TABLE_COLUMNS, rows)
    agg = summary.aggregates()
    summ = write_csv(out / f"table_{algo}_summary.csv", SUMMARY_COLUMNS, [[agg[c] for c in SUMMARY_COLUMNS]])
    write_manifest(out / f"table_{algo}.manifest.json", _manifest("table", cfg, [csv, summ], agg, started))
    for r in summary.rows:
        print(f"{r.experiment:3d}  k1={r.k1:.4e}  k3={r.k3:.6g}  TSS={r.tss:.10g}")
    print(f"median TSS = {agg['tss_median']:.10g}, spread = {agg['tss_spread']:.3g}")


COMMANDS = {"simulate": cmd_simulate, "sync": cmd_sync, "optimize": cmd_optimize, "table": cmd_table}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    started = time.perf_counter()
    try:
        cfg = resolve(args)
        args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args.out, started)
    except C.ConfigError as exc:
        print(f"colpitts-sync: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"colpitts-sync: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
