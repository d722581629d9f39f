"""Quick in-process invariant checks behind the ``selftest`` subcommand.

These are smoke-level versions of the test suite's heavyweight checks, sized
to finish in seconds: construction never leaves a standard member under its
aspiration, the bid solver matches a grid search, demand aggregation is
immune to opponent-favorable infiltrator demands, and a small experiment cell
reproduces itself bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from ..agents import AgentRole, Opponent, Scenario, TeamMember
from ..mediator import (
    Agenda,
    AgendaPolicy,
    MediatorConfig,
    UNANIMITY,
    aggregate_demands,
    construct_offer,
    run_negotiation,
    run_prenegotiation,
)
from ..model import (
    Direction,
    NegotiatorParams,
    Offer,
    PartialOffer,
    UtilityProfile,
    Side,
    utility,
    valuation,
)
from ..strategy import IsoMode, bid_value, iso_utility_offer, team_aspiration
from .experiments import ExperimentConfig, _distribution, iter_cell_records
from .scenarios import IntLaw, Law, ScenarioDistribution, generate_scenario


def _random_profile(n: int, rng: np.random.Generator) -> UtilityProfile:
    gaps = rng.exponential(1.0, n)
    weights = tuple(float(g) / float(gaps.sum()) for g in gaps)
    directions = tuple(
        Direction.INCREASING if rng.random() < 0.5 else Direction.DECREASING
        for _ in range(n)
    )
    return UtilityProfile(weights, directions)


def _check_unanimity(trials: int, rng: np.random.Generator) -> str | None:
    for _ in range(trials):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 7))
        deadline = int(rng.integers(1, 40))
        t = int(rng.integers(0, deadline + 1))
        beta = float(rng.uniform(0.3, 3.0))
        directions = tuple(
            Direction.INCREASING if rng.random() < 0.5 else Direction.DECREASING
            for _ in range(n)
        )
        members = []
        for _ in range(m):
            gaps = rng.exponential(1.0, n)
            weights = tuple(float(g) / float(gaps.sum()) for g in gaps)
            budget = float(rng.uniform(0.0, 0.3))
            members.append(
                TeamMember(
                    UtilityProfile(weights, directions),
                    NegotiatorParams(
                        deadline=deadline,
                        beta=beta,
                        reservation=float(rng.uniform(0.0, 1.0 - budget)),
                        handover_budget=budget,
                    ),
                )
            )
        interest = run_prenegotiation(members)
        agenda = Agenda(tuple(int(j) for j in rng.permutation(n)))
        offer = construct_offer(members, interest, agenda, t, rng)
        for member in members:
            u = utility(member.profile, offer)
            if u < member.aspiration(t) - 1e-9:
                return f"member below aspiration: {u} < {member.aspiration(t)}"
    return None


def _check_bid_solver(trials: int, rng: np.random.Generator) -> str | None:
    grid = [i / 1000 for i in range(1001)]
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        profile = _random_profile(n, rng)
        j = int(rng.integers(n))
        assigned = {
            k: float(rng.random()) for k in range(n) if k != j and rng.random() < 0.5
        }
        partial = PartialOffer(assigned)
        aspiration = float(rng.random())
        got = bid_value(profile, j, partial, aspiration)
        from ..model import partial_utility

        needed = max(0.0, aspiration - partial_utility(profile, partial))
        w = profile.weights[j]
        d = profile.directions[j]
        best, best_gain = None, -1.0
        for x in grid:
            gain = w * valuation(d, x)
            if gain <= needed + 1e-12 and gain > best_gain:
                best, best_gain = x, gain
        if best is None or abs(got - best) > 2e-3:
            return f"bid {got} disagrees with grid {best}"
    return None


def _check_aggregation(trials: int, rng: np.random.Generator) -> str | None:
    replay = aggregate_demands([0.1, 0.2, 0.9, 0.85, 1.0], Direction.DECREASING)
    if replay != 0.1:
        return f"five-demand replay gave {replay}"
    for _ in range(trials):
        direction = Direction.INCREASING if rng.random() < 0.5 else Direction.DECREASING
        genuine = [float(rng.random()) for _ in range(int(rng.integers(1, 6)))]
        honest = aggregate_demands(genuine, direction)
        if direction is Direction.INCREASING:
            hostile = [float(rng.uniform(0.0, honest)) for _ in range(int(rng.integers(1, 4)))]
        else:
            hostile = [float(rng.uniform(honest, 1.0)) for _ in range(int(rng.integers(1, 4)))]
        if aggregate_demands(genuine + hostile, direction) != honest:
            return "hostile demands moved the aggregate"
    return None


def _check_iso_offers(trials: int, rng: np.random.Generator) -> str | None:
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        profile = _random_profile(n, rng)
        target = float(rng.random())
        mode = IsoMode.RANDOM if rng.random() < 0.5 else IsoMode.UNIFORM
        offer = iso_utility_offer(profile, target, mode, rng)
        if abs(utility(profile, offer) - target) > 1e-9:
            return f"iso offer missed target by {utility(profile, offer) - target}"
    return None


def _check_hand_trace() -> str | None:
    member = TeamMember(
        UtilityProfile((1.0,), (Direction.INCREASING,)),
        NegotiatorParams(deadline=10, beta=1.0),
    )
    opponent = Opponent(
        UtilityProfile((1.0,), (Direction.DECREASING,)),
        NegotiatorParams(deadline=10, beta=1.0),
        offer_mode=IsoMode.UNIFORM,
    )
    record = run_negotiation(
        Scenario((member,), opponent),
        MediatorConfig(AgendaPolicy.simple_learning(2), UNANIMITY),
        np.random.default_rng(0),
    )
    ok = (
        not record.failed
        and record.outcome.round == 5
        and record.outcome.accepted_by is Side.OPPONENT
        and record.outcome.offer.values == (0.5,)
    )
    return None if ok else f"hand trace ended with {record.outcome!r}"


def _check_determinism() -> str | None:
    config = ExperimentConfig(teams=3, opponents=3, repetitions=2)
    dist = _distribution(config, "short")

    def outcomes() -> list[tuple]:
        rows = []
        for record in iter_cell_records(dist, config, seed=9, model="fum-simple"):
            rows.append((record.failed, record.final_utilities))
        return rows

    if outcomes() != outcomes():
        return "identical seeds produced different records"
    return None


def run_selftest() -> int:
    """Run all suites, print one line each, return a process exit code."""
    rng = np.random.default_rng(np.random.SeedSequence(2024))
    suites = [
        ("unanimity of constructed offers", lambda: _check_unanimity(2000, rng)),
        ("bid solver vs grid search", lambda: _check_bid_solver(300, rng)),
        ("aggregation vs hostile demands", lambda: _check_aggregation(1000, rng)),
        ("iso-utility offers hit their target", lambda: _check_iso_offers(500, rng)),
        ("single-issue hand trace", _check_hand_trace),
        ("deterministic replay", _check_determinism),
    ]
    failed = 0
    for name, suite in suites:
        problem = suite()
        if problem is None:
            print(f"ok   {name}")
        else:
            failed += 1
            print(f"FAIL {name}: {problem}")
    if failed:
        print(f"{failed} of {len(suites)} suites failed")
        return 1
    print(f"all {len(suites)} suites passed")
    return 0
