"""Per-agent decision rules: concession curves, acceptance, bids, iso-utility offers.

All parties concede over time along the classic time-dependent tactic: the
aspiration starts at the party's utility ceiling and decays to its reservation
utility exactly at the deadline, with ``beta`` controlling whether concession
happens late (beta < 1), linearly (beta = 1) or early (beta > 1).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (
    UTILITY_TOL,
    Direction,
    NegotiatorParams,
    Offer,
    PartialOffer,
    ProtocolError,
    UtilityProfile,
    invert_valuation,
    partial_utility,
    valuation,
)


class DegenerateDeadlineError(ValueError):
    """Aspiration curves are undefined for a zero-round deadline."""


def _timed_aspiration(
    ceiling: float, reservation: float, beta: float, deadline: int, t: int
) -> float:
    if deadline == 0:
        raise DegenerateDeadlineError("aspiration undefined for deadline 0")
    if t < 0:
        raise ValueError(f"round {t} must be nonnegative")
    progress = min(t, deadline) / deadline
    return ceiling - (ceiling - reservation) * progress ** (1.0 / beta)


def opponent_aspiration(params: NegotiatorParams, t: int) -> float:
    """Utility the opponent demands at round ``t``, from 1 down to its reservation.

    Rounds past the deadline clamp to the deadline, so the curve bottoms out
    at the reservation utility instead of extrapolating below it.
    """
    return _timed_aspiration(1.0, params.reservation, params.beta, params.deadline, t)


def team_aspiration(params: NegotiatorParams, t: int) -> float:
    """Utility a team member demands at round ``t``.

    The ceiling is lowered by the handover budget: whatever weight the member
    relinquished to the mediator is not counted on, so the curve runs from
    ``1 - handover_budget`` down to the reservation utility.
    """
    ceiling = 1.0 - params.handover_budget
    return _timed_aspiration(ceiling, params.reservation, params.beta, params.deadline, t)


def accepts(aspiration_next: float, offer_utility: float, tol: float = UTILITY_TOL) -> bool:
    """Acceptance test: take the offer on the table iff it is worth at least
    what the party would aspire to in the next round."""
    return offer_utility >= aspiration_next - tol


def select_handover_set(profile: UtilityProfile, handover_budget: float) -> frozenset[int]:
    """Attributes the agent hands over to the mediator before negotiating.

    Picks the largest set of attributes whose weights sum to at most the
    budget; greedy by ascending weight (ties by index) is optimal for
    cardinality. Zero-weight attributes are always handed over.
    """
    if not 0.0 <= handover_budget <= 1.0:
        raise ValueError(f"handover budget {handover_budget!r} outside [0, 1]")
    order = sorted(range(len(profile)), key=lambda j: (profile.weights[j], j))
    chosen: list[int] = []
    total = 0.0
    for j in order:
        if total + profile.weights[j] <= handover_budget + 1e-12:
            chosen.append(j)
            total += profile.weights[j]
        else:
            break
    return frozenset(chosen)


def demand_for_needed(direction: Direction, weight: float, needed: float) -> float:
    """Attribute value whose weighted valuation comes closest to the needed
    utility from below, capped at valuation 1.

    A nonpositive need or a zero weight yields the least demanding value
    (valuation 0), since the attribute cannot or need not contribute.
    """
    if weight <= 0.0 or needed <= 0.0:
        return invert_valuation(direction, 0.0)
    return invert_valuation(direction, min(1.0, needed / weight))


def bid_value(
    profile: UtilityProfile, j: int, partial: PartialOffer, aspiration: float
) -> float:
    """Value an agent asks for attribute ``j`` given the partial offer so far.

    The agent requests exactly what would lift its partial utility to the
    aspiration, never overshooting it except when even valuation 1 falls
    short (then the demand caps at valuation 1).
    """
    if partial.is_assigned(j):
        raise ProtocolError(f"attribute {j} is already assigned")
    if j >= len(profile):
        raise ValueError(f"attribute index {j} outside profile of size {len(profile)}")
    needed = aspiration - partial_utility(profile, partial)
    return demand_for_needed(profile.directions[j], profile.weights[j], max(0.0, needed))


class DeviationMode(Enum):
    """How far a team member strays from the agreed bidding rule."""

    STANDARD = "standard"
    SLIGHTLY_DEVIATED = "slightly_deviated"
    HIGHLY_DEVIATED = "highly_deviated"


@dataclass(frozen=True)
class DeviationParams:
    """Knobs of a deviated member: how much it inflates its needs, and the
    valuation range of the one extra demand a highly deviated member places
    after it is already satisfied."""

    mode: DeviationMode
    demand_multiplier: float = 1.0
    extra_valuation_range: tuple[float, float] = (0.10, 0.50)

    def __post_init__(self) -> None:
        if self.mode is DeviationMode.STANDARD:
            if self.demand_multiplier != 1.0:
                raise ValueError("standard mode requires demand multiplier 1")
        elif self.demand_multiplier < 1.0:
            raise ValueError(
                f"demand multiplier {self.demand_multiplier!r} must be >= 1"
            )
        lo, hi = self.extra_valuation_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"extra valuation range {self.extra_valuation_range!r} invalid")


def deviated_bid(
    profile: UtilityProfile,
    j: int,
    partial: PartialOffer,
    aspiration: float,
    deviation: DeviationParams,
) -> float:
    """Bid of a member that inflates its remaining need by the demand
    multiplier. The no-overshoot discipline is deliberately dropped; the
    demand still caps at valuation 1."""
    if partial.is_assigned(j):
        raise ProtocolError(f"attribute {j} is already assigned")
    needed = aspiration - partial_utility(profile, partial)
    inflated = deviation.demand_multiplier * max(0.0, needed)
    return demand_for_needed(profile.directions[j], profile.weights[j], inflated)


def extra_demand(
    profile: UtilityProfile,
    j: int,
    rng: np.random.Generator,
    valuation_range: tuple[float, float] = (0.10, 0.50),
) -> float:
    """The opportunistic demand a satisfied highly deviated member places on
    one extra attribute: a uniform draw of 10 to 50 percent of the attribute's
    valuation scale."""
    lo, hi = valuation_range
    return invert_valuation(profile.directions[j], float(rng.uniform(lo, hi)))


class IsoMode(Enum):
    """How a party picks a point on an iso-utility set."""

    UNIFORM = "uniform"
    RANDOM = "random"


def concession_order(
    weights: Sequence[float], rng: np.random.Generator, sharpness: float = 1.0
) -> tuple[int, ...]:
    """A random attribute order biased toward keeping important attributes.

    Draws a weighted shuffle (Efraimidis-Spirakis keys ``u^(1/w)``): the
    probability an attribute heads the order is proportional to its weight,
    so a negotiator conceding along the reversed order tends to give up its
    least valuable attributes first while still varying between draws.
    ``sharpness`` exponentiates the weights before the draw: zero makes the
    order a plain shuffle, large values make it the exact importance rank.
    Zero-weight attributes sort last, conceded immediately.
    """
    if sharpness < 0.0:
        raise ValueError(f"sharpness {sharpness!r} must be nonnegative")
    keys = []
    for j, w in enumerate(weights):
        u = float(rng.random())
        keys.append(u ** (1.0 / w**sharpness) if w > 0.0 else 0.0)
    return tuple(sorted(range(len(keys)), key=lambda j: (-keys[j], j)))


def iso_utility_offer(
    profile: UtilityProfile,
    target: float,
    mode: IsoMode,
    rng: np.random.Generator | None = None,
    order: Sequence[int] | None = None,
    spread: float = 0.0,
) -> Offer:
    """A complete offer whose utility under ``profile`` equals ``target``.

    Uniform mode sets every attribute's valuation to the target (exact since
    weights sum to one). Random mode walks the attributes in a random order
    and greedily assigns each one the largest valuation the remaining budget
    allows, so the result is a corner of the iso-utility set: full valuation
    on some attributes, zero on the rest, one fractional attribute in
    between. Passing ``order`` fixes the walk; offers generated with the
    same order move monotonically as the target falls, which models a
    negotiator conceding attribute by attribute instead of re-rolling its
    package every round. ``spread`` mixes the corner with the uniform point
    on the same iso-utility surface (both are exact, so any mix is), pushing
    part of every concession onto all attributes at once instead of fully
    sacrificing one attribute after another. Zero-weight attributes get a
    uniform draw.
    """
    if not -UTILITY_TOL <= target <= 1.0 + UTILITY_TOL:
        raise ValueError(f"target utility {target!r} outside [0, 1]")
    target = min(1.0, max(0.0, target))
    n = len(profile)
    if mode is IsoMode.UNIFORM:
        vals = [target] * n
    else:
        if rng is None:
            raise ValueError("random mode needs an rng")
        if order is None:
            order = [int(j) for j in rng.permutation(n)]
        elif sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of the attributes")
        vals = [0.0] * n
        remaining = target
        for j in order:
            w = profile.weights[j]
            if w <= 0.0:
                vals[j] = float(rng.random())
                continue
            v = min(1.0, remaining / w)
            vals[j] = v
            remaining = max(0.0, remaining - w * v)
        if spread:
            if not 0.0 <= spread <= 1.0:
                raise ValueError(f"spread {spread!r} outside [0, 1]")
            vals = [
                v if w <= 0.0 else (1.0 - spread) * v + spread * target
                for v, w in zip(vals, profile.weights)
            ]
    return Offer(
        tuple(invert_valuation(d, v) for d, v in zip(profile.directions, vals))
    )


def nearest_iso_offer(profile: UtilityProfile, target: float, anchor: Offer) -> Offer:
    """The offer of utility ``target`` closest to ``anchor`` in Euclidean
    distance over attribute values.

    Linear valuations preserve distances, so this is a projection onto the
    weighted hyperplane in valuation space intersected with the unit box:
    the solution has the shape clip(anchor + lam * weights, 0, 1), with lam
    located by bisection and refined by one exact step on the final linear
    segment. Zero-weight attributes keep the anchor's value.
    """
    if not -UTILITY_TOL <= target <= 1.0 + UTILITY_TOL:
        raise ValueError(f"target utility {target!r} outside [0, 1]")
    target = min(1.0, max(0.0, target))
    if len(anchor) != len(profile):
        raise ValueError("anchor length does not match profile")
    anchors = [valuation(d, x) for d, x in zip(profile.directions, anchor.values)]
    live = [j for j, w in enumerate(profile.weights) if w > 0.0]
    weights = profile.weights

    def mass(lam: float) -> float:
        total = 0.0
        for j in live:
            v = anchors[j] + lam * weights[j]
            if v < 0.0:
                v = 0.0
            elif v > 1.0:
                v = 1.0
            total += weights[j] * v
        return total

    lo = min((0.0 - anchors[j]) / weights[j] for j in live) - 1.0
    hi = max((1.0 - anchors[j]) / weights[j] for j in live) + 1.0
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if mass(mid) < target:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    # one Newton step on the active linear segment lands on the target exactly
    slope = sum(
        weights[j] * weights[j]
        for j in live
        if 0.0 < anchors[j] + lam * weights[j] < 1.0
    )
    if slope > 0.0:
        lam += (target - mass(lam)) / slope
    vals = list(anchors)
    for j in live:
        vals[j] = min(1.0, max(0.0, anchors[j] + lam * weights[j]))
    return Offer(
        tuple(invert_valuation(d, v) for d, v in zip(profile.directions, vals))
    )
