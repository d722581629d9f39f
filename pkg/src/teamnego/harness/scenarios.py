"""Random scenario generation for the experiment harness.

Teams and opponents are drawn from simple product laws: weights from a
symmetric Dirichlet on the simplex, reservations and concession speeds from
uniform intervals, one shared integer deadline per pairing. The team side
values every attribute increasing and the opponent decreasing, without loss
of generality since the engine supports mixed directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..agents import AgentRole, Opponent, Scenario, TeamMember
from ..model import Direction, NegotiatorParams, UtilityProfile
from ..strategy import DeviationMode, DeviationParams, IsoMode


@dataclass(frozen=True)
class Law:
    """Uniform real law on [lo, hi]; degenerate when lo == hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.hi < self.lo:
            raise ValueError(f"law bounds reversed: {self.lo!r}..{self.hi!r}")

    @classmethod
    def fixed(cls, value: float) -> "Law":
        return cls(value, value)

    def sample(self, rng: np.random.Generator) -> float:
        if self.lo == self.hi:
            return self.lo
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class IntLaw:
    """Uniform integer law on [lo, hi], both ends inclusive."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.hi < self.lo:
            raise ValueError(f"law bounds reversed: {self.lo!r}..{self.hi!r}")

    @classmethod
    def fixed(cls, value: int) -> "IntLaw":
        return cls(value, value)

    def sample(self, rng: np.random.Generator) -> int:
        if self.lo == self.hi:
            return self.lo
        return int(rng.integers(self.lo, self.hi + 1))


# calibrated share of each opponent concession that is spread evenly over
# all attributes; the rest follows the opponent's private concession order
OPPONENT_SPREAD = 0.0

# calibrated Dirichlet concentration of the attribute-weight draws
WEIGHT_CONCENTRATION = 0.4

# calibrated sharpness of the opponent's weight-ranked concession order
OPPONENT_ORDER_SHARPNESS = 0.35


@dataclass(frozen=True)
class ScenarioDistribution:
    """Everything needed to draw one negotiation scenario.

    The deadline is drawn once per team and shared with the opponent; the
    concession speed is drawn once for the whole team and separately for the
    opponent; reservations are per agent. With probability
    ``infiltration_prob`` exactly one member slot is replaced by an
    infiltrated competitor whose reservation comes from the dedicated law.
    Deviated members, when configured, occupy the first slots.
    """

    team_size: int = 4
    attributes: int = 4
    deadline: IntLaw = IntLaw(30, 60)
    beta: Law = Law(0.4, 0.99)
    reservation: Law = Law(0.0, 0.25)
    handover_budget: float = 0.0
    infiltration_prob: float = 0.0
    infiltrator_reservation: Law = Law(0.8, 1.0)
    slightly_deviated: int = 0
    highly_deviated: int = 0
    demand_multiplier: float = 1.0
    opponent_offer_mode: IsoMode = IsoMode.RANDOM
    opponent_spread: float = OPPONENT_SPREAD
    opponent_order_sharpness: float = OPPONENT_ORDER_SHARPNESS
    weight_concentration: float = WEIGHT_CONCENTRATION

    def __post_init__(self) -> None:
        if self.team_size < 1:
            raise ValueError("team size must be at least 1")
        if self.attributes < 1:
            raise ValueError("attribute count must be at least 1")
        if not 0.0 <= self.infiltration_prob <= 1.0:
            raise ValueError("infiltration probability outside [0, 1]")
        if not 0.0 <= self.handover_budget <= 1.0:
            raise ValueError("handover budget outside [0, 1]")
        if self.slightly_deviated < 0 or self.highly_deviated < 0:
            raise ValueError("deviated counts must be nonnegative")
        if self.slightly_deviated + self.highly_deviated > self.team_size:
            raise ValueError("more deviated members than team seats")
        if self.demand_multiplier < 1.0:
            raise ValueError("demand multiplier must be >= 1")
        if not 0.0 <= self.opponent_spread <= 1.0:
            raise ValueError("opponent spread outside [0, 1]")


def simplex_weights(
    n: int, rng: np.random.Generator, concentration: float = 1.0
) -> tuple[float, ...]:
    """Random attribute weights summing to one (symmetric Dirichlet draw).

    concentration 1 is the uniform simplex; below 1 agents care strongly
    about few attributes, above 1 they weigh all attributes similarly.
    """
    gaps = rng.gamma(concentration, 1.0, n)
    total = float(gaps.sum())
    if total <= 0.0:
        return tuple(1.0 / n for _ in range(n))
    return tuple(float(g) / total for g in gaps)


@dataclass(frozen=True)
class TeamDraw:
    """The random part of a team, before roles and pairing are applied."""

    weights: tuple[tuple[float, ...], ...]
    reservations: tuple[float, ...]
    beta: float
    deadline: int


@dataclass(frozen=True)
class OpponentDraw:
    """The random part of an opponent; the deadline comes from the pairing."""

    weights: tuple[float, ...]
    beta: float
    reservation: float


def draw_team(dist: ScenarioDistribution, rng: np.random.Generator) -> TeamDraw:
    weights = tuple(
        simplex_weights(dist.attributes, rng, dist.weight_concentration)
        for _ in range(dist.team_size)
    )
    reservations = tuple(dist.reservation.sample(rng) for _ in range(dist.team_size))
    return TeamDraw(
        weights=weights,
        reservations=reservations,
        beta=dist.beta.sample(rng),
        deadline=dist.deadline.sample(rng),
    )


def draw_opponent(dist: ScenarioDistribution, rng: np.random.Generator) -> OpponentDraw:
    return OpponentDraw(
        weights=simplex_weights(dist.attributes, rng, dist.weight_concentration),
        beta=dist.beta.sample(rng),
        reservation=dist.reservation.sample(rng),
    )


def _role_plan(dist: ScenarioDistribution) -> list[tuple[AgentRole, DeviationParams | None]]:
    plan: list[tuple[AgentRole, DeviationParams | None]] = []
    for _ in range(dist.slightly_deviated):
        plan.append(
            (
                AgentRole.SLIGHTLY_DEVIATED,
                DeviationParams(DeviationMode.SLIGHTLY_DEVIATED, dist.demand_multiplier),
            )
        )
    for _ in range(dist.highly_deviated):
        plan.append(
            (
                AgentRole.HIGHLY_DEVIATED,
                DeviationParams(DeviationMode.HIGHLY_DEVIATED, dist.demand_multiplier),
            )
        )
    while len(plan) < dist.team_size:
        plan.append((AgentRole.STANDARD, None))
    return plan


def assemble_scenario(
    dist: ScenarioDistribution,
    team: TeamDraw,
    opponent: OpponentDraw,
    rng: np.random.Generator,
) -> Scenario:
    """Combine a team draw and an opponent draw into a ready negotiation.

    The infiltration draws are always consumed, whether or not an
    infiltrator ends up seated, so scenarios stay aligned across probability
    sweeps that share the same seed derivation.
    """
    team_directions = (Direction.INCREASING,) * dist.attributes
    opp_directions = (Direction.DECREASING,) * dist.attributes
    infiltrate = float(rng.random()) < dist.infiltration_prob
    slot = int(rng.integers(dist.team_size))
    infiltrator_reservation = dist.infiltrator_reservation.sample(rng)
    members = []
    for i, (role, deviation) in enumerate(_role_plan(dist)):
        reservation = team.reservations[i]
        if infiltrate and i == slot:
            role = AgentRole.INFILTRATED_COMPETITOR
            deviation = None
            reservation = min(infiltrator_reservation, 1.0 - dist.handover_budget)
        members.append(
            TeamMember(
                profile=UtilityProfile(team.weights[i], team_directions),
                params=NegotiatorParams(
                    deadline=team.deadline,
                    beta=team.beta,
                    reservation=reservation,
                    handover_budget=dist.handover_budget,
                ),
                role=role,
                deviation=deviation,
            )
        )
    opp = Opponent(
        profile=UtilityProfile(opponent.weights, opp_directions),
        params=NegotiatorParams(
            deadline=team.deadline,
            beta=opponent.beta,
            reservation=opponent.reservation,
        ),
        offer_mode=dist.opponent_offer_mode,
        spread=dist.opponent_spread,
        order_sharpness=dist.opponent_order_sharpness,
    )
    return Scenario(members=tuple(members), opponent=opp)


def generate_scenario(dist: ScenarioDistribution, rng: np.random.Generator) -> Scenario:
    """Draw a complete scenario from one stream (team, opponent, assembly)."""
    return assemble_scenario(dist, draw_team(dist, rng), draw_opponent(dist, rng), rng)
