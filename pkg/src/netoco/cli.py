"""Command-line front end for running the controller and its verification drivers.

Instances come from TOML or JSON config files (see ``instance_from_config``
for the recognized kinds); reports go to stdout as one-line verdicts, with
optional JSON (--out) and plot-ready CSV (--csv) artifacts.  The exit code is
nonzero whenever any checked inequality fails.  The only environment variable
consulted is NETOCO_THREADS (per-agent solve parallelism).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

from .experiments import (ExperimentReport, cr_sweep, error_accumulation_check,
                          per_step_bound_check, perturbation_sweep, pricing_demo,
                          spatial_lower_demo)
from .graph import make_network
from .instances import instance_from_config, random_instance, random_pricing_params
from .lpc import LpcConfig, competitive_ratio, lpc_run
from .solver import SolveSettings, offline_opt
from .theory import (augmentation_relations, compute_decay_params, cr_upper_bound,
                     decay_basic, decay_tight, geometric_b_pair)

__all__ = ["main"]


def _load_config(path: str) -> dict:
    if path.endswith(".toml"):
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def _settings(args) -> SolveSettings:
    return SolveSettings(backend=args.backend, tol=args.tol)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _emit(report: ExperimentReport, args) -> int:
    for check in report.checks:
        mark = "ok" if check.passed else "FAIL"
        line = f"[{mark}] {check.name}"
        if not check.passed and check.witness:
            line += f" ({check.witness})"
        print(line)
    for key, value in sorted(report.summary.items()):
        print(f"  {key} = {value}")
    if args.out:
        report.save_json(args.out)
        print(f"wrote {args.out}")
    if getattr(args, "csv", None):
        report.save_csv(args.csv)
        print(f"wrote {args.csv}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# subcommands


def _cmd_run_lpc(args) -> int:
    inst = instance_from_config(_load_config(args.config))
    cfg = LpcConfig(k=args.k, r=args.r, settings=_settings(args))
    traj = lpc_run(inst, cfg)
    print(f"lpc k={args.k} r={args.r}: cost {traj.cost:.9g} "
          f"(hitting {traj.hitting.sum():.9g}, switching {traj.switching.sum():.9g})")
    if args.out:
        traj.save_json(args.out)
        print(f"wrote {args.out}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(traj.to_csv())
        print(f"wrote {args.csv}")
    return 0


def _cmd_run_opt(args) -> int:
    inst = instance_from_config(_load_config(args.config))
    traj, cost = offline_opt(inst, _settings(args))
    print(f"offline optimum: cost {cost:.9g} "
          f"(hitting {traj.hitting.sum():.9g}, switching {traj.switching.sum():.9g})")
    if args.out:
        traj.save_json(args.out)
        print(f"wrote {args.out}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(traj.to_csv())
        print(f"wrote {args.csv}")
    return 0


def _cmd_perturbation(args) -> int:
    inst = instance_from_config(_load_config(args.config))
    report = perturbation_sweep(inst, args.t, args.v, args.k, args.r,
                                delta=args.delta, seed=args.seed,
                                settings=_settings(args))
    return _emit(report, args)


def _cmd_cr_sweep(args) -> int:
    inst = instance_from_config(_load_config(args.config))
    report = cr_sweep(inst, _int_list(args.k_list), _int_list(args.r_list),
                      settings=_settings(args))
    return _emit(report, args)


def _cmd_lower_bound(args) -> int:
    report = spatial_lower_demo(args.blocks, args.block_size, args.coupling,
                                _int_list(args.r_list), list(range(args.num_seeds)))
    return _emit(report, args)


def _cmd_pricing(args) -> int:
    cfg = _load_config(args.config)
    if cfg.get("kind") != "pricing-random":
        raise ValueError("pricing subcommand expects a config with kind 'pricing-random'")
    net = make_network(cfg["graph"], **cfg.get("graph_params", {}))
    params = random_pricing_params(net, cfg["horizon"], cfg["seed"])
    report = pricing_demo(params, LpcConfig(k=args.k, r=args.r, settings=_settings(args)))
    return _emit(report, args)


def _cmd_theory(args) -> int:
    if args.h:
        h = [float(part) for part in args.h.split(",") if part.strip()]
        b1 = args.b1 if args.b1 is not None else 1.0
        b2 = args.b2 if args.b2 is not None else 1.0
    else:
        h = [float(args.delta) ** g for g in range(max(args.r, 1) + 1)]
        default_b1, default_b2 = geometric_b_pair(args.delta)
        b1 = args.b1 if args.b1 is not None else default_b1
        b2 = args.b2 if args.b2 is not None else default_b2
    params = compute_decay_params(args.mu, args.l_f, args.l_T, args.l_S,
                                  args.delta, h, args.k, args.r, b1, b2)
    bound = cr_upper_bound(params)
    payload = {"params": dataclasses.asdict(params), "cr_bound": dataclasses.asdict(bound)}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_check_all(args) -> int:
    """One fast battery across every inequality family; nonzero exit on any failure."""
    failures: list[str] = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        print(f"[{'ok' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail and not ok else ""))
        if not ok:
            failures.append(name)

    basic = decay_basic(1.0, 4.0, 0.0, 3)
    record("closed-form rho_T at l_T/mu=4", abs(basic.rho_T ** 2 - 0.5) < 1e-12)
    for delta in range(3, 9):
        b1, b2 = geometric_b_pair(delta)
        tight = decay_tight(100.0 * delta, 1.0, 0.0, delta,
                            lambda g, d=delta: d ** g, b1, b2)
        record(f"geometric series constants at degree {delta}",
               abs(tight.a - 2.0) < 1e-12 and abs(tight.a_tilde - 2.0) < 1e-12)
    grid_ok = True
    for delta in range(3, 11):
        for ratio in (0.01, 0.1, 1.0, 10.0):
            rel = augmentation_relations(1.0, ratio, ratio / delta, delta)
            grid_ok &= rel.temporal_lower_ok and rel.temporal_upper_ok and rel.spatial_ok
    record("upper/lower decay-factor relations on parameter grid", grid_ok)

    net = make_network("path", n=7)
    inst = random_instance(net, horizon=5, dim=1, mu=1.0, l_f=2.0,
                           l_T=0.1, l_S=0.05, seed=7)
    report = perturbation_sweep(inst, t=2, v=3, k=3, r=2, seed=1)
    record("perturbation-decay ceiling on a 7-path", report.passed)

    cyc = make_network("cycle", n=6)
    inst2 = random_instance(cyc, horizon=4, dim=1, mu=1.0, l_f=2.0,
                            l_T=0.15, l_S=0.05, seed=3)
    sweep = cr_sweep(inst2, [2, 3], [1, 2])
    record("competitive-ratio ceiling on a 6-cycle", sweep.passed)
    acc = error_accumulation_check(inst2, LpcConfig(k=2, r=1))
    record("error-accumulation inequality", acc.passed, f"lhs {acc.lhs:.3e} rhs {acc.rhs:.3e}")
    per = per_step_bound_check(inst2, LpcConfig(k=2, r=1))
    record("per-round error ceiling", per.passed, f"worst margin {per.worst_margin:.3e}")

    demo = spatial_lower_demo(6, 2, 4.0, [1, 2], list(range(10)))
    record("Laplacian-inverse floor and estimator decay", demo.passed)

    pricing = pricing_demo(random_pricing_params(make_network("path", n=5), 4, 0),
                           LpcConfig(k=3, r=2))
    record("pricing revenue guarantee", pricing.passed)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", default="direct",
                   choices=["direct", "projected-gradient"])
    p.add_argument("--tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netoco",
        description="Decentralized control on networks: runs, sweeps, and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-lpc", help="run the localized controller")
    p.add_argument("--config", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--csv")
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_run_lpc)

    p = sub.add_parser("run-opt", help="solve the offline optimum")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--csv")
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_run_opt)

    p = sub.add_parser("perturbation", help="boundary perturbation decay sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--csv")
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_perturbation)

    p = sub.add_parser("cr-sweep", help="competitive ratio over a (k, r) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--k-list", required=True, help="comma-separated, e.g. 2,3,4")
    p.add_argument("--r-list", required=True, help="comma-separated, e.g. 1,2")
    p.add_argument("--out")
    p.add_argument("--csv")
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_cr_sweep)

    p = sub.add_parser("lower-bound", help="spatial impossibility demo on a block ring")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--coupling", type=float, required=True)
    p.add_argument("--r-list", required=True)
    p.add_argument("--num-seeds", type=int, default=50)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_lower_bound)

    p = sub.add_parser("pricing", help="pricing revenue-guarantee demo")
    p.add_argument("--config", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out")
    _add_common_solver_args(p)
    p.set_defaults(func=_cmd_pricing)

    p = sub.add_parser("theory", help="evaluate every closed-form constant")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--l-f", dest="l_f", type=float, required=True)
    p.add_argument("--l-T", dest="l_T", type=float, required=True)
    p.add_argument("--l-S", dest="l_S", type=float, required=True)
    p.add_argument("--delta", type=int, required=True, help="max degree")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--h", help="comma-separated boundary growth; default degree^gamma")
    p.add_argument("--b1", type=float)
    p.add_argument("--b2", type=float)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("check-all", help="fast battery over every inequality family")
    p.set_defaults(func=_cmd_check_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
