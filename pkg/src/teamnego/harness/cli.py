"""Command line front end: run experiments, trace one negotiation, selftest.

Subcommands:
  run <1|2|3|4> [--config FILE] [--out DIR] [--seed N] [--scale F]
  trace [--config FILE] [--seed N]
  selftest

``run`` writes ``exp<N>_metrics.csv`` (plus ``exp1_curves.csv`` for the first
study) into the output directory; identical config and seed reproduce the
files byte for byte. The default scale 0.25 keeps a desk run short; pass
``--scale 1.0`` for the full workload.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ..mediator import AgendaPolicy, MediatorConfig, VoteThreshold, run_negotiation
from .config import (
    RUN_KEYS,
    TRACE_KEYS,
    ConfigError,
    TraceConfig,
    apply_run_config,
    apply_trace_config,
    load_config_file,
)
from .experiments import EXPERIMENTS, default_config
from .metrics import write_curves_csv, write_metrics_csv
from .scenarios import ScenarioDistribution, generate_scenario
from .selftest import run_selftest


def _fmt_offer(offer) -> str:
    return "(" + ", ".join(f"{v:.6f}" for v in offer.values) + ")"


def _trace_observer(out) -> callable:
    def observe(kind: str, t: int, payload: dict) -> None:
        prefix = f"[t={t}]"
        if kind == "agenda":
            order = " ".join(str(j) for j in payload["order"])
            print(f"{prefix} agenda: {order}", file=out)
        elif kind == "attribute":
            demands = payload["demands"]
            shown = ", ".join(f"{d:.6f}" for d in demands) if demands else "none"
            print(
                f"{prefix} attribute {payload['index']} = {payload['value']:.6f}"
                f" (demands: {shown})",
                file=out,
            )
        elif kind == "satisfied":
            print(f"{prefix} member {payload['member']} satisfied, leaves the round", file=out)
        elif kind == "team_offer":
            print(
                f"{prefix} team offer {_fmt_offer(payload['offer'])}"
                f" -> opponent utility {payload['opponent_utility']:.6f}",
                file=out,
            )
        elif kind == "opponent_accept":
            print(f"{prefix} opponent accepts", file=out)
        elif kind == "counteroffer":
            print(f"{prefix} counteroffer {_fmt_offer(payload['offer'])}", file=out)
        elif kind == "votes":
            marks = " ".join("yes" if v else "no" for v in payload["votes"])
            verdict = "accepted" if payload["accepted"] else "rejected"
            print(f"{prefix} votes: {marks} -> {verdict}", file=out)
        elif kind == "outcome":
            if payload["kind"] == "agreement":
                print(
                    f"{prefix} agreement at round {payload['round']} on"
                    f" {_fmt_offer(payload['offer'])}, accepted by {payload['accepted_by']}",
                    file=out,
                )
            else:
                print(f"{prefix} failure at round {payload['round']}", file=out)

    return observe


def _cmd_run(args: argparse.Namespace) -> int:
    config = default_config(args.experiment)
    if args.config is not None:
        overrides = load_config_file(args.config, RUN_KEYS)
        config = apply_run_config(config, overrides)
    try:
        os.makedirs(args.out, exist_ok=True)
        probe = os.path.join(args.out, ".write_probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as exc:
        print(f"error: cannot write to output directory {args.out!r}: {exc}", file=sys.stderr)
        return 1
    result = EXPERIMENTS[args.experiment](config, seed=args.seed, scale=args.scale)
    metrics_path = os.path.join(args.out, f"exp{args.experiment}_metrics.csv")
    write_metrics_csv(metrics_path, result.metrics)
    written = [metrics_path]
    if result.curves:
        curves_path = os.path.join(args.out, "exp1_curves.csv")
        write_curves_csv(curves_path, result.curves)
        written.append(curves_path)
    for path in written:
        print(path)
    return 0


def _trace_policy(config: TraceConfig, deadline: int) -> AgendaPolicy:
    if config.agenda == "perfect":
        return AgendaPolicy.perfect()
    if config.agenda == "random":
        return AgendaPolicy.random()
    return AgendaPolicy.simple_learning(max(1, deadline // 4))


def _cmd_trace(args: argparse.Namespace) -> int:
    config = TraceConfig()
    if args.config is not None:
        overrides = load_config_file(args.config, TRACE_KEYS)
        config = apply_trace_config(config, overrides)
    dist = ScenarioDistribution(
        team_size=config.team_size,
        attributes=config.attributes,
        deadline=config.deadline,
        beta=config.beta,
        reservation=config.reservation,
        handover_budget=config.handover_budget,
        opponent_offer_mode=config.opponent_offer_mode,
    )
    rng = np.random.default_rng(np.random.SeedSequence((args.seed, 0)))
    scenario = generate_scenario(dist, rng)
    mediator = MediatorConfig(
        _trace_policy(config, scenario.team_deadline),
        VoteThreshold(config.vote_fraction),
    )
    run_negotiation(scenario, mediator, rng, observer=_trace_observer(sys.stdout))
    return 0


def _cmd_selftest(_: argparse.Namespace) -> int:
    return run_selftest()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamnego",
        description="Mediated team negotiation simulator and experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one of the four studies")
    run_p.add_argument("experiment", type=int, choices=(1, 2, 3, 4))
    run_p.add_argument("--config", default=None, help="key = value overrides")
    run_p.add_argument("--out", default="out", help="output directory for CSV files")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument(
        "--scale",
        type=float,
        default=0.25,
        help="fraction of the full workload (default 0.25)",
    )
    run_p.set_defaults(handler=_cmd_run)

    trace_p = sub.add_parser("trace", help="print a round-by-round negotiation trace")
    trace_p.add_argument("--config", default=None)
    trace_p.add_argument("--seed", type=int, default=0)
    trace_p.set_defaults(handler=_cmd_trace)

    self_p = sub.add_parser("selftest", help="run the built-in invariant checks")
    self_p.set_defaults(handler=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
