"""Negotiating parties: team members (honest and otherwise), the opponent,
and the two baseline team protocols (single representative, similarity vote).

Team members answer three petitions from the mediator: a value request for
one attribute, a satisfaction check on the partial offer, and a vote on the
opponent's counteroffer. Adversarial roles answer the same petitions with
different intent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import (
    UTILITY_TOL,
    Agreement,
    Failure,
    NegotiationRecord,
    NegotiatorParams,
    Offer,
    RoundLog,
    Side,
    UtilityProfile,
    invert_valuation,
    utility,
)
from .strategy import (
    DeviationParams,
    IsoMode,
    accepts,
    concession_order,
    demand_for_needed,
    extra_demand,
    iso_utility_offer,
    nearest_iso_offer,
    opponent_aspiration,
    team_aspiration,
)


class AgentRole(Enum):
    STANDARD = "standard"
    SLIGHTLY_DEVIATED = "slightly_deviated"
    HIGHLY_DEVIATED = "highly_deviated"
    INFILTRATED_COMPETITOR = "infiltrated_competitor"
    OPPONENT = "opponent"
    REPRESENTATIVE = "representative"
    SSV_MEMBER = "ssv_member"

_DEVIATED_ROLES = (AgentRole.SLIGHTLY_DEVIATED, AgentRole.HIGHLY_DEVIATED)


@dataclass
class TeamMember:
    """One seat at the team's side of the table.

    The role decides how the member answers mediator petitions. An
    infiltrated competitor mimics a standard member during construction
    (with whatever reservation it was given) but always votes against the
    opponent's offers. Deviated members inflate their demands; the highly
    deviated one additionally lingers for one extra attribute per round
    after it is satisfied.
    """

    profile: UtilityProfile
    params: NegotiatorParams
    role: AgentRole = AgentRole.STANDARD
    deviation: DeviationParams | None = None
    _extra_placed: bool = field(default=False, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.role in _DEVIATED_ROLES and self.deviation is None:
            raise ValueError(f"role {self.role.value} requires deviation params")

    def aspiration(self, t: int) -> float:
        return team_aspiration(self.params, t)

    def begin_construction(self) -> None:
        """Reset per-round state before a new offer construction starts."""
        self._extra_placed = False

    def respond_bid(
        self, j: int, gathered: float, aspiration: float, rng: np.random.Generator
    ) -> float:
        """Value requested for attribute ``j``, given the utility already
        gathered from the partial offer this round."""
        needed = aspiration - gathered
        direction = self.profile.directions[j]
        weight = self.profile.weights[j]
        if self.role is AgentRole.HIGHLY_DEVIATED and needed <= UTILITY_TOL:
            # satisfied: place one opportunistic extra demand, then back off
            if self._extra_placed:
                return demand_for_needed(direction, weight, 0.0)
            self._extra_placed = True
            return extra_demand(self.profile, j, rng, self.deviation.extra_valuation_range)
        multiplier = (
            self.deviation.demand_multiplier if self.role in _DEVIATED_ROLES else 1.0
        )
        return demand_for_needed(direction, weight, multiplier * max(0.0, needed))

    def respond_partial_check(self, gathered: float, aspiration: float) -> bool:
        """True when the member is content with the partial offer and leaves
        the construction round. A highly deviated member hides satisfaction
        until its extra demand has been placed."""
        satisfied = gathered >= aspiration - UTILITY_TOL
        if self.role is AgentRole.HIGHLY_DEVIATED:
            return satisfied and self._extra_placed
        return satisfied

    def vote_on_offer(self, offer: Offer, t: int) -> bool:
        """Vote on the opponent's counteroffer received at round ``t``: accept
        iff it meets the next round's aspiration. Infiltrated competitors
        reject unconditionally."""
        if self.role is AgentRole.INFILTRATED_COMPETITOR:
            return False
        return accepts(self.aspiration(t + 1), utility(self.profile, offer))

    def extreme_offer(self) -> Offer:
        """The offer this member likes best: valuation 1 on every attribute."""
        return Offer(tuple(invert_valuation(d, 1.0) for d in self.profile.directions))


@dataclass
class Opponent:
    """The single negotiator on the other side of the table."""

    profile: UtilityProfile
    params: NegotiatorParams
    offer_mode: IsoMode = IsoMode.RANDOM
    # fraction of each concession spread evenly over all attributes; the
    # rest is given up attribute by attribute along the concession order
    spread: float = 0.0
    # how strictly the concession order follows the weight ranking
    order_sharpness: float = 1.0
    # drawn once, on the first counteroffer: the attribute order this
    # opponent keeps conceding along as its aspiration falls
    _concession_order: tuple[int, ...] | None = field(default=None, init=False, repr=False)

    def aspiration(self, t: int) -> float:
        return opponent_aspiration(self.params, t)

    def accepts_offer(self, offer_utility: float, t: int) -> bool:
        return accepts(self.aspiration(t + 1), offer_utility)

    def counter_offer(self, t: int, rng: np.random.Generator) -> Offer:
        if self.offer_mode is IsoMode.RANDOM and self._concession_order is None:
            self._concession_order = concession_order(
                self.profile.weights, rng, self.order_sharpness
            )
        return iso_utility_offer(
            self.profile, self.aspiration(t), self.offer_mode, rng,
            order=self._concession_order, spread=self.spread,
        )

    def respond(self, team_offer: Offer, t: int, rng: np.random.Generator) -> Offer | None:
        """None when the opponent accepts the team's round-``t`` offer,
        otherwise its counteroffer."""
        if self.accepts_offer(utility(self.profile, team_offer), t):
            return None
        return self.counter_offer(t, rng)


@dataclass(frozen=True)
class Scenario:
    """A fully instantiated negotiation: the team facing one opponent."""

    members: tuple[TeamMember, ...]
    opponent: Opponent

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a scenario needs at least one team member")
        directions = self.members[0].profile.directions
        deadline = self.members[0].params.deadline
        for m in self.members:
            if m.profile.directions != directions:
                raise ValueError("team members must share valuation directions")
            if m.params.deadline != deadline:
                raise ValueError("team members must share the deadline")
        if len(self.opponent.profile) != len(directions):
            raise ValueError("opponent profile length does not match the team")
        for mine, theirs in zip(directions, self.opponent.profile.directions):
            if theirs is not mine.flipped():
                raise ValueError("opponent directions must oppose the team's")

    @property
    def attributes(self) -> int:
        return len(self.members[0].profile)

    @property
    def team_deadline(self) -> int:
        return self.members[0].params.deadline


def _failure_record(members: tuple[TeamMember, ...], round_: int) -> NegotiationRecord:
    zeros = tuple(0.0 for _ in members)
    return NegotiationRecord(
        outcome=Failure(round=round_),
        final_utilities=zeros,
        reservations=tuple(m.params.reservation for m in members),
        genuine=tuple(m.role is not AgentRole.INFILTRATED_COMPETITOR for m in members),
        opponent_view=(),
    )


def _agreement_record(
    members: tuple[TeamMember, ...],
    outcome: Agreement,
    opponent_view: list[float],
    rounds: list[RoundLog],
) -> NegotiationRecord:
    return NegotiationRecord(
        outcome=outcome,
        final_utilities=tuple(utility(m.profile, outcome.offer) for m in members),
        reservations=tuple(m.params.reservation for m in members),
        genuine=tuple(m.role is not AgentRole.INFILTRATED_COMPETITOR for m in members),
        opponent_view=tuple(opponent_view),
        rounds=tuple(rounds),
    )


def _deadline_failure(
    members: tuple[TeamMember, ...],
    round_: int,
    opponent_view: list[float],
    rounds: list[RoundLog],
) -> NegotiationRecord:
    zeros = tuple(0.0 for _ in members)
    return NegotiationRecord(
        outcome=Failure(round=round_),
        final_utilities=zeros,
        reservations=tuple(m.params.reservation for m in members),
        genuine=tuple(m.role is not AgentRole.INFILTRATED_COMPETITOR for m in members),
        opponent_view=tuple(opponent_view),
        rounds=tuple(rounds),
    )


def re_negotiate(
    members: tuple[TeamMember, ...],
    opponent: Opponent,
    rng: np.random.Generator,
    *,
    acceptance_enabled: bool = True,
    collect_rounds: bool = False,
    offer_mode: IsoMode = IsoMode.RANDOM,
) -> NegotiationRecord:
    """Representative baseline: one member, drawn uniformly, negotiates
    bilaterally for everyone. It offers on its own iso-utility curve and
    accepts by its own curve alone; the whole team is scored on whatever it
    signs."""
    members = tuple(members)
    rep_index = int(rng.integers(len(members)))
    rep = members[rep_index]
    team_deadline = rep.params.deadline
    opp_deadline = opponent.params.deadline
    if team_deadline == 0 or opp_deadline == 0:
        return _failure_record(members, 0)
    rep_order = concession_order(rep.profile.weights, rng)
    opponent_view: list[float] = []
    rounds: list[RoundLog] = []
    t = 0
    while t <= team_deadline and t <= opp_deadline:
        team_offer = iso_utility_offer(
            rep.profile, rep.aspiration(t), offer_mode, rng, order=rep_order
        )
        u_op = utility(opponent.profile, team_offer)
        opponent_view.append(u_op)
        if acceptance_enabled and opponent.accepts_offer(u_op, t):
            if collect_rounds:
                rounds.append(RoundLog(t, (), team_offer, u_op, True, None, None, None))
            return _agreement_record(
                members, Agreement(team_offer, t, Side.OPPONENT), opponent_view, rounds
            )
        counter = opponent.counter_offer(t, rng)
        rep_accepts = accepts(rep.aspiration(t + 1), utility(rep.profile, counter))
        if collect_rounds:
            rounds.append(
                RoundLog(t, (), team_offer, u_op, False, counter, (rep_accepts,), rep_accepts)
            )
        if acceptance_enabled and rep_accepts:
            return _agreement_record(
                members, Agreement(counter, t, Side.TEAM), opponent_view, rounds
            )
        t += 1
    return _deadline_failure(members, t, opponent_view, rounds)


def ssv_negotiate(
    members: tuple[TeamMember, ...],
    opponent: Opponent,
    rng: np.random.Generator,
    *,
    acceptance_enabled: bool = True,
    collect_rounds: bool = False,
) -> NegotiationRecord:
    """Similarity-and-vote baseline. Each round every member proposes the
    point of its current iso-utility set closest to the last opponent offer
    (falling back to the last team offer, then to its own extreme), members
    vote for the candidate that suits them best (plurality, ties to the
    lowest proposer index), and the winner goes out. The opponent's
    counteroffer is accepted on a simple majority of per-member acceptance
    votes."""
    members = tuple(members)
    team_deadline = members[0].params.deadline
    opp_deadline = opponent.params.deadline
    if team_deadline == 0 or opp_deadline == 0:
        return _failure_record(members, 0)
    majority = math.ceil(len(members) / 2)
    extremes = [m.extreme_offer() for m in members]
    last_team: Offer | None = None
    last_opp: Offer | None = None
    opponent_view: list[float] = []
    rounds: list[RoundLog] = []
    t = 0
    while t <= team_deadline and t <= opp_deadline:
        candidates = []
        for i, m in enumerate(members):
            anchor = last_opp if last_opp is not None else last_team
            if anchor is None:
                anchor = extremes[i]
            candidates.append(nearest_iso_offer(m.profile, m.aspiration(t), anchor))
        tally = [0] * len(members)
        for m in members:
            best = 0
            best_u = -1.0
            for k, cand in enumerate(candidates):
                u = utility(m.profile, cand)
                if u > best_u:
                    best_u = u
                    best = k
            tally[best] += 1
        winner = max(range(len(members)), key=lambda k: (tally[k], -k))
        team_offer = candidates[winner]
        u_op = utility(opponent.profile, team_offer)
        opponent_view.append(u_op)
        if acceptance_enabled and opponent.accepts_offer(u_op, t):
            if collect_rounds:
                rounds.append(RoundLog(t, (), team_offer, u_op, True, None, None, None))
            return _agreement_record(
                members, Agreement(team_offer, t, Side.OPPONENT), opponent_view, rounds
            )
        counter = opponent.counter_offer(t, rng)
        votes = tuple(m.vote_on_offer(counter, t) for m in members)
        team_accepts = sum(votes) >= majority
        if collect_rounds:
            rounds.append(RoundLog(t, (), team_offer, u_op, False, counter, votes, team_accepts))
        if acceptance_enabled and team_accepts:
            return _agreement_record(
                members, Agreement(counter, t, Side.TEAM), opponent_view, rounds
            )
        last_team = team_offer
        last_opp = counter
        t += 1
    return _deadline_failure(members, t, opponent_view, rounds)
