"""The four simulation studies and their shared cell runner.

Determinism contract: every random draw descends from the master seed through
position-based seed sequences, keyed by stream kind and by (team index,
opponent index, repetition index). Cells of a sweep therefore share their
scenario draws, which both reduces comparison variance and makes every output
reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..agents import re_negotiate, ssv_negotiate
from ..mediator import AgendaPolicy, MediatorConfig, VoteThreshold, run_negotiation
from ..model import NegotiationRecord
from ..strategy import IsoMode
from .metrics import CellAccumulator, CurveRow, MetricsRow, summarize_cell
from .scenarios import (
    IntLaw,
    Law,
    ScenarioDistribution,
    assemble_scenario,
    draw_opponent,
    draw_team,
)

# stream tags for seed derivation
_TEAM_STREAM = 1
_OPPONENT_STREAM = 2
_NEGOTIATION_STREAM = 3

SHORT = "short"
LONG = "long"

#: Team models understood by the cell runner.
FUM_MODELS = ("fum", "fum-simple", "fum-perfect", "fum-random", "fum75", "fum50")
BASELINE_MODELS = ("re", "ssv")
EXP1_MODELS = ("fum-perfect", "fum-simple", "fum-random", "re", "ssv")
EXP3_MODELS = ("fum", "fum75", "fum50")

_VOTE_FRACTIONS = {"fum75": 0.75, "fum50": 0.5}

EPSILON_GRID = (0.0, 0.02, 0.05, 0.07, 0.10, 0.12, 0.15, 0.17, 0.20)
INFILTRATION_GRID = (0.0, 0.25, 0.50, 0.75, 1.0)
DEVIATED_COUNTS = (1, 2, 3, 4)
DEMAND_MULTIPLIERS = (1.25, 1.5, 1.75)


@dataclass(frozen=True)
class ExperimentConfig:
    """Counts and laws shared by all cells of one study."""

    team_size: int = 4
    attributes: int = 4
    teams: int = 100
    opponents: int = 12
    repetitions: int = 4
    short_deadline: IntLaw = IntLaw(5, 10)
    long_deadline: IntLaw = IntLaw(30, 60)
    beta: Law = Law(0.4, 0.99)
    reservation: Law = Law(0.0, 0.25)
    handover_budget: float = 0.0
    infiltrator_reservation: Law = Law(0.8, 1.0)
    opponent_offer_mode: IsoMode = IsoMode.RANDOM

    def scaled(self, scale: float) -> "ExperimentConfig":
        """Shrink the workload by scaling the team count; opponents and
        repetitions stay put so per-cell totals scale proportionally."""
        if not 0.0 < scale <= 1.0:
            raise ValueError(f"scale {scale!r} outside (0, 1]")
        return replace(self, teams=max(1, round(self.teams * scale)))


#: Study defaults for the agenda comparison: fixed deadlines, linear
#: concession, zero reservations, eleven opponents.
EXP1_CONFIG = ExperimentConfig(
    teams=100,
    opponents=11,
    repetitions=4,
    short_deadline=IntLaw.fixed(10),
    long_deadline=IntLaw.fixed(50),
    beta=Law.fixed(1.0),
    reservation=Law.fixed(0.0),
)


def _deadline_law(config: ExperimentConfig, regime: str) -> IntLaw:
    if regime == SHORT:
        return config.short_deadline
    if regime == LONG:
        return config.long_deadline
    raise ValueError(f"unknown deadline regime {regime!r}")


def _distribution(config: ExperimentConfig, regime: str, **overrides) -> ScenarioDistribution:
    fields = dict(
        team_size=config.team_size,
        attributes=config.attributes,
        deadline=_deadline_law(config, regime),
        beta=config.beta,
        reservation=config.reservation,
        handover_budget=config.handover_budget,
        infiltrator_reservation=config.infiltrator_reservation,
        opponent_offer_mode=config.opponent_offer_mode,
    )
    fields.update(overrides)
    return ScenarioDistribution(**fields)


def _learning_window(deadline: int) -> int:
    """Opponent offers used to learn the agenda: a quarter of the deadline."""
    return max(1, deadline // 4)


def run_one(
    model: str,
    scenario,
    rng: np.random.Generator,
    *,
    acceptance_enabled: bool = True,
    collect_rounds: bool = False,
    observer=None,
) -> NegotiationRecord:
    """Dispatch one negotiation to the requested team model."""
    if model in FUM_MODELS:
        deadline = scenario.team_deadline
        if model == "fum-perfect":
            policy = AgendaPolicy.perfect()
        elif model == "fum-random":
            policy = AgendaPolicy.random()
        else:
            policy = AgendaPolicy.simple_learning(_learning_window(max(1, deadline)))
        threshold = VoteThreshold(_VOTE_FRACTIONS.get(model, 1.0))
        return run_negotiation(
            scenario,
            MediatorConfig(policy, threshold),
            rng,
            acceptance_enabled=acceptance_enabled,
            collect_rounds=collect_rounds,
            observer=observer,
        )
    if model == "re":
        return re_negotiate(
            scenario.members,
            scenario.opponent,
            rng,
            acceptance_enabled=acceptance_enabled,
            collect_rounds=collect_rounds,
        )
    if model == "ssv":
        return ssv_negotiate(
            scenario.members,
            scenario.opponent,
            rng,
            acceptance_enabled=acceptance_enabled,
            collect_rounds=collect_rounds,
        )
    raise ValueError(f"unknown model {model!r}")


def iter_cell_records(
    dist: ScenarioDistribution,
    config: ExperimentConfig,
    seed: int,
    model: str,
    *,
    acceptance_enabled: bool = True,
) -> Iterable[NegotiationRecord]:
    """Yield the records of one cell: teams x opponents x repetitions.

    Team and opponent draws depend only on (seed, index), the per-negotiation
    streams only on (seed, team, opponent, repetition), so cells that share a
    seed see identical scenario material wherever their distributions agree.
    """
    teams = [
        draw_team(dist, np.random.default_rng(np.random.SeedSequence((seed, _TEAM_STREAM, i))))
        for i in range(config.teams)
    ]
    opponents = [
        draw_opponent(
            dist, np.random.default_rng(np.random.SeedSequence((seed, _OPPONENT_STREAM, i)))
        )
        for i in range(config.opponents)
    ]
    for t_idx, team in enumerate(teams):
        for o_idx, opponent in enumerate(opponents):
            for rep in range(config.repetitions):
                root = np.random.SeedSequence(
                    (seed, _NEGOTIATION_STREAM, t_idx, o_idx, rep)
                )
                assembly_seq, dynamics_seq = root.spawn(2)
                scenario = assemble_scenario(
                    dist, team, opponent, np.random.default_rng(assembly_seq)
                )
                yield run_one(
                    model,
                    scenario,
                    np.random.default_rng(dynamics_seq),
                    acceptance_enabled=acceptance_enabled,
                )


def run_cell(
    dist: ScenarioDistribution,
    config: ExperimentConfig,
    seed: int,
    model: str,
    *,
    acceptance_enabled: bool = True,
    curve_rounds: int | None = None,
) -> tuple[CellAccumulator, list[float]]:
    """Aggregate one cell. When ``curve_rounds`` is given, also average the
    opponent's utility of the team offer per round over all negotiations
    (records are expected to cover every round, i.e. acceptance disabled
    with a fixed deadline)."""
    acc = CellAccumulator()
    sums = [0.0] * (curve_rounds or 0)
    counts = [0] * (curve_rounds or 0)
    for record in iter_cell_records(
        dist, config, seed, model, acceptance_enabled=acceptance_enabled
    ):
        acc.add(record)
        if curve_rounds:
            for r, u in enumerate(record.opponent_view):
                sums[r] += u
                counts[r] += 1
    curve = [s / c for s, c in zip(sums, counts) if c] if curve_rounds else []
    return acc, curve


@dataclass(frozen=True)
class ExperimentResult:
    metrics: list[MetricsRow]
    curves: list[CurveRow]


def run_experiment_1(
    config: ExperimentConfig | None = None,
    seed: int = 0,
    scale: float = 1.0,
    *,
    models: Sequence[str] = EXP1_MODELS,
    regimes: Sequence[str] = (SHORT, LONG),
    phases: Sequence[str] = ("curves", "metrics"),
) -> ExperimentResult:
    """Agenda study: compare team models by the demand curves they show the
    opponent (acceptance disabled) and by final utilities (acceptance on)."""
    config = (config or EXP1_CONFIG).scaled(scale)
    curves: list[CurveRow] = []
    metrics: list[MetricsRow] = []
    for regime in regimes:
        dist = _distribution(config, regime)
        for model in models:
            if "curves" in phases:
                deadline = dist.deadline.hi
                _, curve = run_cell(
                    dist,
                    config,
                    seed,
                    model,
                    acceptance_enabled=False,
                    curve_rounds=deadline + 1,
                )
                curves.extend(
                    CurveRow(model, regime, r, u) for r, u in enumerate(curve)
                )
            if "metrics" in phases:
                acc, _ = run_cell(dist, config, seed, model)
                metrics.append(
                    summarize_cell("exp1", (("model", model), ("deadline", regime)), acc)
                )
    return ExperimentResult(metrics=metrics, curves=curves)


def run_experiment_2(
    config: ExperimentConfig | None = None,
    seed: int = 0,
    scale: float = 1.0,
    *,
    handover_budgets: Sequence[float] = EPSILON_GRID,
    regimes: Sequence[str] = (SHORT, LONG),
    model: str = "fum-simple",
) -> ExperimentResult:
    """Handover study: sweep the budget each member may relinquish."""
    config = (config or ExperimentConfig()).scaled(scale)
    metrics: list[MetricsRow] = []
    for regime in regimes:
        for budget in handover_budgets:
            dist = _distribution(
                replace(config, handover_budget=budget), regime
            )
            acc, _ = run_cell(dist, config, seed, model)
            metrics.append(
                summarize_cell(
                    "exp2",
                    (("handover_budget", f"{budget:.2f}"), ("deadline", regime)),
                    acc,
                )
            )
    return ExperimentResult(metrics=metrics, curves=[])


def run_experiment_3(
    config: ExperimentConfig | None = None,
    seed: int = 0,
    scale: float = 1.0,
    *,
    infiltration_probs: Sequence[float] = INFILTRATION_GRID,
    models: Sequence[str] = EXP3_MODELS,
    regimes: Sequence[str] = (SHORT, LONG),
) -> ExperimentResult:
    """Infiltration study: sweep the probability that one seat is taken by a
    competitor, across unanimity and relaxed vote thresholds."""
    config = (config or ExperimentConfig()).scaled(scale)
    metrics: list[MetricsRow] = []
    for regime in regimes:
        for model in models:
            for prob in infiltration_probs:
                dist = _distribution(config, regime, infiltration_prob=prob)
                acc, _ = run_cell(dist, config, seed, model)
                metrics.append(
                    summarize_cell(
                        "exp3",
                        (
                            ("model", model),
                            ("infiltration_pct", str(int(round(prob * 100)))),
                            ("deadline", regime),
                        ),
                        acc,
                    )
                )
    return ExperimentResult(metrics=metrics, curves=[])


def run_experiment_4(
    config: ExperimentConfig | None = None,
    seed: int = 0,
    scale: float = 1.0,
    *,
    deviated_counts: Sequence[int] = DEVIATED_COUNTS,
    multipliers: Sequence[float] = DEMAND_MULTIPLIERS,
    regimes: Sequence[str] = (SHORT, LONG),
    model: str = "fum-simple",
) -> ExperimentResult:
    """Deviation study: does inflating demands pay? Sweeps how many members
    deviate (slightly or highly) and by how much, against an all-standard
    baseline."""
    config = (config or ExperimentConfig()).scaled(scale)
    metrics: list[MetricsRow] = []
    for regime in regimes:
        cells: list[tuple[str, int, float, dict]] = [("standard", 0, 1.0, {})]
        for count in deviated_counts:
            for mult in multipliers:
                cells.append(
                    (
                        "slightly_deviated",
                        count,
                        mult,
                        {"slightly_deviated": count, "demand_multiplier": mult},
                    )
                )
        for count in deviated_counts:
            for mult in multipliers:
                cells.append(
                    (
                        "highly_deviated",
                        count,
                        mult,
                        {"highly_deviated": count, "demand_multiplier": mult},
                    )
                )
        for profile, count, mult, overrides in cells:
            dist = _distribution(config, regime, **overrides)
            acc, _ = run_cell(dist, config, seed, model)
            metrics.append(
                summarize_cell(
                    "exp4",
                    (
                        ("profile", profile),
                        ("deviated_count", str(count)),
                        ("demand_multiplier", f"{mult:.2f}"),
                        ("deadline", regime),
                    ),
                    acc,
                )
            )
    return ExperimentResult(metrics=metrics, curves=[])


EXPERIMENTS = {
    1: run_experiment_1,
    2: run_experiment_2,
    3: run_experiment_3,
    4: run_experiment_4,
}


def default_config(experiment: int) -> ExperimentConfig:
    return EXP1_CONFIG if experiment == 1 else ExperimentConfig()
