"""Domain types and utility arithmetic for mediated team negotiation.

Every negotiable attribute is scaled to the unit interval, so offers live in
[0, 1]^n. Agents score offers with additive linear utilities over monotone
per-attribute valuations. All team members share one valuation direction per
attribute while the opponent holds the opposite one, which is what makes the
negotiation zero-sum per attribute but not per offer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

#: Slack used when comparing weighted-sum utilities, absorbing float drift.
UTILITY_TOL = 1e-9

#: Slack accepted on raw domain bounds (values, weights) before rejecting.
DOMAIN_TOL = 1e-12


class ProtocolError(RuntimeError):
    """A caller violated the negotiation protocol's sequencing rules."""


class Direction(Enum):
    """Monotone orientation of a valuation function, seen from the team side."""

    INCREASING = "increasing"
    DECREASING = "decreasing"

    def flipped(self) -> "Direction":
        """The opposite orientation, i.e. the opponent's view of the attribute."""
        if self is Direction.INCREASING:
            return Direction.DECREASING
        return Direction.INCREASING


def valuation(direction: Direction, x: float) -> float:
    """Score attribute value ``x`` on [0, 1]: identity when increasing, reflection when decreasing."""
    if not -DOMAIN_TOL <= x <= 1.0 + DOMAIN_TOL:
        raise ValueError(f"attribute value {x!r} outside [0, 1]")
    if direction is Direction.INCREASING:
        return x
    return 1.0 - x


def invert_valuation(direction: Direction, v: float) -> float:
    """Attribute value whose valuation equals ``v`` (linear valuations are bijective)."""
    if not -DOMAIN_TOL <= v <= 1.0 + DOMAIN_TOL:
        raise ValueError(f"valuation {v!r} outside [0, 1]")
    if direction is Direction.INCREASING:
        return v
    return 1.0 - v


@dataclass(frozen=True)
class Offer:
    """A complete assignment of all attributes, one value per attribute."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("an offer must assign at least one attribute")
        for j, v in enumerate(self.values):
            if not -DOMAIN_TOL <= v <= 1.0 + DOMAIN_TOL:
                raise ValueError(f"offer value {v!r} at attribute {j} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PartialOffer:
    """A sparse assignment built up attribute by attribute during construction."""

    assignments: Mapping[int, float]

    def __post_init__(self) -> None:
        clean: dict[int, float] = {}
        for j, v in self.assignments.items():
            if not isinstance(j, int) or j < 0:
                raise ValueError(f"attribute index {j!r} must be a nonnegative int")
            if not -DOMAIN_TOL <= v <= 1.0 + DOMAIN_TOL:
                raise ValueError(f"partial value {v!r} at attribute {j} outside [0, 1]")
            clean[j] = float(v)
        object.__setattr__(self, "assignments", clean)

    @classmethod
    def empty(cls) -> "PartialOffer":
        return cls({})

    def is_assigned(self, j: int) -> bool:
        return j in self.assignments

    def extended(self, j: int, value: float) -> "PartialOffer":
        """A new partial with attribute ``j`` additionally set to ``value``."""
        if j in self.assignments:
            raise ProtocolError(f"attribute {j} is already assigned")
        merged = dict(self.assignments)
        merged[j] = value
        return PartialOffer(merged)


@dataclass(frozen=True)
class UtilityProfile:
    """Additive linear utility: weights over attributes plus a direction each.

    Weights are nonnegative and sum to one, so utilities always land in [0, 1].
    """

    weights: tuple[float, ...]
    directions: tuple[Direction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "directions", tuple(self.directions))
        if not self.weights:
            raise ValueError("a profile needs at least one attribute")
        if len(self.weights) != len(self.directions):
            raise ValueError("weights and directions must have equal length")
        for w in self.weights:
            if w < -DOMAIN_TOL:
                raise ValueError(f"negative weight {w!r}")
        total = sum(self.weights)
        if abs(total - 1.0) > UTILITY_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return len(self.weights)

    def flipped(self) -> "UtilityProfile":
        """Same weights with every direction reversed (an opposing party's view)."""
        return UtilityProfile(self.weights, tuple(d.flipped() for d in self.directions))


def utility(profile: UtilityProfile, offer: Offer) -> float:
    """Weighted sum of per-attribute valuations for a complete offer."""
    if len(offer) != len(profile):
        raise ValueError(
            f"offer has {len(offer)} attributes, profile expects {len(profile)}"
        )
    total = 0.0
    for w, d, x in zip(profile.weights, profile.directions, offer.values):
        total += w * valuation(d, x)
    return total


def partial_utility(profile: UtilityProfile, partial: PartialOffer) -> float:
    """Utility gathered so far from the assigned attributes only.

    Unassigned attributes contribute nothing, so this is a lower bound on the
    utility of any completion (valuations are nonnegative).
    """
    total = 0.0
    for j, x in partial.assignments.items():
        if j >= len(profile):
            raise ValueError(f"attribute index {j} outside profile of size {len(profile)}")
        total += profile.weights[j] * valuation(profile.directions[j], x)
    return total


@dataclass(frozen=True)
class NegotiatorParams:
    """Time-dependent concession parameters of a single negotiator.

    ``deadline`` is the last round the party stays at the table. ``beta``
    shapes the concession curve (below one concedes late, one is linear,
    above one concedes early). ``reservation`` is the utility floor reached
    at the deadline. ``handover_budget`` is the largest utility weight the
    agent is willing to relinquish to the mediator before the negotiation.
    """

    deadline: int
    beta: float
    reservation: float = 0.0
    handover_budget: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.deadline, int) or isinstance(self.deadline, bool):
            raise ValueError(f"deadline must be an int, got {self.deadline!r}")
        if self.deadline < 0:
            raise ValueError(f"deadline must be nonnegative, got {self.deadline}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not 0.0 <= self.reservation <= 1.0:
            raise ValueError(f"reservation {self.reservation!r} outside [0, 1]")
        if not 0.0 <= self.handover_budget <= 1.0:
            raise ValueError(f"handover budget {self.handover_budget!r} outside [0, 1]")
        if self.reservation + self.handover_budget > 1.0 + DOMAIN_TOL:
            raise ValueError("reservation plus handover budget exceeds 1")


@dataclass(frozen=True)
class InterestMatrix:
    """Which team member kept decision rights over which attribute.

    ``retained[i][j]`` is False when member ``i`` handed attribute ``j`` over
    to the mediator during pre-negotiation.
    """

    retained: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "retained", tuple(tuple(bool(b) for b in row) for row in self.retained)
        )
        if not self.retained:
            raise ValueError("interest matrix needs at least one member row")
        width = len(self.retained[0])
        if width == 0:
            raise ValueError("interest matrix needs at least one attribute column")
        for row in self.retained:
            if len(row) != width:
                raise ValueError("interest matrix rows must have equal length")

    @property
    def team_size(self) -> int:
        return len(self.retained)

    @property
    def attributes(self) -> int:
        return len(self.retained[0])

    def retains(self, i: int, j: int) -> bool:
        return self.retained[i][j]


class Side(Enum):
    """Which party accepted the final offer."""

    TEAM = "team"
    OPPONENT = "opponent"


@dataclass(frozen=True)
class Agreement:
    """A negotiation that ended with one side accepting the other's offer."""

    offer: Offer
    round: int
    accepted_by: Side


@dataclass(frozen=True)
class Failure:
    """A negotiation abandoned because a deadline passed without acceptance."""

    round: int


Outcome = Agreement | Failure


@dataclass(frozen=True)
class RoundLog:
    """What happened in one protocol round, for traces and audits."""

    round: int
    agenda: tuple[int, ...]
    team_offer: Offer
    opponent_utility: float
    opponent_accepted: bool
    counteroffer: Offer | None
    votes: tuple[bool, ...] | None
    team_accepted: bool | None


@dataclass(frozen=True)
class NegotiationRecord:
    """Full account of one negotiation, the substrate for every metric.

    ``final_utilities`` are metric utilities: each member's utility of the
    agreed offer, or zero for every member when the negotiation failed.
    ``genuine`` flags which members are real team members (infiltrated
    competitors are excluded from welfare metrics). ``opponent_view`` holds
    the opponent's utility of the team offer at each round, in round order.
    """

    outcome: Outcome
    final_utilities: tuple[float, ...]
    reservations: tuple[float, ...]
    genuine: tuple[bool, ...]
    opponent_view: tuple[float, ...]
    rounds: tuple[RoundLog, ...] = field(default=())

    @property
    def failed(self) -> bool:
        return isinstance(self.outcome, Failure)
