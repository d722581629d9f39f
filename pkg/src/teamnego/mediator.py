"""The trusted mediator: pre-negotiation handover, attribute-by-attribute
offer construction, acceptance voting, agenda management and the full
negotiation state machine.

The construction loop guarantees that every standard-behavior member ends the
round at or above its aspiration: each member is asked for exactly the value
it still needs, demands are aggregated toward the team-favorable extreme, and
members only leave the round once satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .agents import AgentRole, Scenario, TeamMember
from .model import (
    Agreement,
    Direction,
    Failure,
    InterestMatrix,
    NegotiationRecord,
    Offer,
    ProtocolError,
    RoundLog,
    Side,
    UtilityProfile,
    utility,
    valuation,
)
from .strategy import accepts, select_handover_set

#: Callback receiving (event kind, round, payload) for traces; may be None.
Observer = Callable[[str, int, dict], None]


class AgendaKind(Enum):
    PERFECT = "perfect"
    SIMPLE_LEARNING = "simple"
    RANDOM = "random"


@dataclass(frozen=True)
class AgendaPolicy:
    """How the mediator orders attributes each round.

    Perfect ordering reads the opponent's true weights ascending (an
    omniscient baseline). Simple learning orders by concession observed in
    the opponent's first ``learning_window`` counteroffers, descending.
    Random reshuffles every round.
    """

    kind: AgendaKind
    learning_window: int | None = None

    def __post_init__(self) -> None:
        if self.kind is AgendaKind.SIMPLE_LEARNING:
            if self.learning_window is None or self.learning_window < 1:
                raise ValueError("simple learning needs a window of at least 1")
        elif self.learning_window is not None:
            raise ValueError(f"{self.kind.value} agenda takes no learning window")

    @classmethod
    def perfect(cls) -> "AgendaPolicy":
        return cls(AgendaKind.PERFECT)

    @classmethod
    def simple_learning(cls, window: int) -> "AgendaPolicy":
        return cls(AgendaKind.SIMPLE_LEARNING, window)

    @classmethod
    def random(cls) -> "AgendaPolicy":
        return cls(AgendaKind.RANDOM)


@dataclass(frozen=True)
class Agenda:
    """A visiting order over all attributes for one construction round."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(j) for j in self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"agenda {self.order!r} is not a permutation")


@dataclass(frozen=True)
class VoteThreshold:
    """Fraction of positive votes required to accept an opponent offer."""

    fraction: float

    def __post_init__(self) -> None:
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"vote fraction {self.fraction!r} outside (0, 1]")

    def required_votes(self, team_size: int) -> int:
        return math.ceil(self.fraction * team_size)


UNANIMITY = VoteThreshold(1.0)


@dataclass(frozen=True)
class ConcessionLedger:
    """Per-attribute concession observed in the opponent's counteroffers,
    measured in team valuation units and floored at zero per step."""

    totals: tuple[float, ...]

    @classmethod
    def empty(cls, attributes: int) -> "ConcessionLedger":
        return cls((0.0,) * attributes)


def update_ledger(
    ledger: ConcessionLedger,
    previous: Offer,
    new: Offer,
    directions: Sequence[Direction],
) -> ConcessionLedger:
    """Accumulate the team-favorable movement between two consecutive
    opponent offers. Moves against the team count as zero."""
    if len(previous) != len(ledger.totals) or len(new) != len(ledger.totals):
        raise ValueError("offer length does not match the ledger")
    totals = tuple(
        total + max(0.0, valuation(d, nx) - valuation(d, px))
        for total, d, px, nx in zip(ledger.totals, directions, previous.values, new.values)
    )
    return ConcessionLedger(totals)


def make_agenda(
    policy: AgendaPolicy,
    attributes: int,
    *,
    ledger: ConcessionLedger | None = None,
    opponent_profile: UtilityProfile | None = None,
    rng: np.random.Generator | None = None,
) -> Agenda:
    """Build this round's agenda. Ties always break toward the lower index,
    so an empty ledger yields plain index order."""
    if policy.kind is AgendaKind.PERFECT:
        if opponent_profile is None:
            raise ValueError("perfect agenda needs the opponent profile")
        order = sorted(range(attributes), key=lambda j: (opponent_profile.weights[j], j))
    elif policy.kind is AgendaKind.SIMPLE_LEARNING:
        if ledger is None:
            raise ValueError("simple learning agenda needs the concession ledger")
        if len(ledger.totals) != attributes:
            raise ValueError("ledger size does not match attribute count")
        order = sorted(range(attributes), key=lambda j: (-ledger.totals[j], j))
    else:
        if rng is None:
            raise ValueError("random agenda needs an rng")
        order = [int(j) for j in rng.permutation(attributes)]
    return Agenda(tuple(order))


def run_prenegotiation(members: Sequence[TeamMember]) -> InterestMatrix:
    """Collect the decision-rights handover: start from full interest and
    drop each member's handed-over attributes."""
    rows = []
    for m in members:
        handed = select_handover_set(m.profile, m.params.handover_budget)
        rows.append(tuple(j not in handed for j in range(len(m.profile))))
    return InterestMatrix(tuple(rows))


def best_value_for_opponent(direction: Direction) -> float:
    """Value granted when no active member claims an attribute: the team
    valuation 0 end, which is the opponent's favorite."""
    return 0.0 if direction is Direction.INCREASING else 1.0


def aggregate_demands(demands: Sequence[float], direction: Direction) -> float:
    """Combine simultaneous demands into the most team-demanding one."""
    if not demands:
        raise ValueError("no demands to aggregate")
    return max(demands) if direction is Direction.INCREASING else min(demands)


def acceptance_vote(votes: Iterable[bool | None], threshold: VoteThreshold) -> bool:
    """Decide on the opponent's offer from the members' votes."""
    collected = list(votes)
    if any(v is None for v in collected):
        raise ProtocolError("missing vote")
    return sum(bool(v) for v in collected) >= threshold.required_votes(len(collected))


def construct_offer(
    members: Sequence[TeamMember],
    interest: InterestMatrix,
    agenda: Agenda,
    t: int,
    rng: np.random.Generator,
    observer: Observer | None = None,
) -> Offer:
    """Build the team's round-``t`` offer attribute by attribute.

    For each agenda attribute the mediator asks every active member that
    retained rights over it for a value, sets the team-favorable extreme of
    the demands (or the opponent's favorite value when nobody asks), then
    lets members that already reached their aspiration leave the round.
    """
    if len(members) != interest.team_size:
        raise ProtocolError("member count does not match the interest matrix")
    n = interest.attributes
    if len(agenda.order) != n:
        raise ProtocolError("agenda length does not match the attribute count")
    directions = members[0].profile.directions
    values: list[float] = [0.0] * n
    aspirations = [m.aspiration(t) for m in members]
    gathered = [0.0] * len(members)
    active = [True] * len(members)
    for m in members:
        m.begin_construction()
    for j in agenda.order:
        demands: list[float] = []
        for i, m in enumerate(members):
            if active[i] and interest.retains(i, j):
                demands.append(m.respond_bid(j, gathered[i], aspirations[i], rng))
        if demands:
            x = aggregate_demands(demands, directions[j])
        else:
            x = best_value_for_opponent(directions[j])
        values[j] = x
        if observer is not None:
            observer("attribute", t, {"index": j, "value": x, "demands": tuple(demands)})
        for i, m in enumerate(members):
            gathered[i] += m.profile.weights[j] * valuation(directions[j], x)
        for i, m in enumerate(members):
            if active[i] and m.respond_partial_check(gathered[i], aspirations[i]):
                active[i] = False
                if observer is not None:
                    observer("satisfied", t, {"member": i})
    return Offer(tuple(values))


@dataclass(frozen=True)
class MediatorConfig:
    """Mediator-side knobs of one negotiation."""

    agenda_policy: AgendaPolicy
    vote_threshold: VoteThreshold = UNANIMITY


def run_negotiation(
    scenario: Scenario,
    config: MediatorConfig,
    rng: np.random.Generator,
    *,
    acceptance_enabled: bool = True,
    collect_rounds: bool = False,
    observer: Observer | None = None,
) -> NegotiationRecord:
    """Drive one full mediated negotiation to agreement or failure.

    Each round the mediator refreshes the agenda, constructs the team offer
    and shows it to the opponent; if the opponent declines it answers with a
    counteroffer on its own concession curve, which the team votes on. The
    loop ends in failure once the round counter would pass either deadline
    (a zero deadline fails immediately, before any round is played). With
    ``acceptance_enabled`` False both acceptance tests are skipped and the
    exchange runs to the deadline, which is useful for demand-curve studies.
    """
    members = scenario.members
    opponent = scenario.opponent
    team_deadline = scenario.team_deadline
    opp_deadline = opponent.params.deadline
    genuine = tuple(m.role is not AgentRole.INFILTRATED_COMPETITOR for m in members)
    reservations = tuple(m.params.reservation for m in members)
    zeros = tuple(0.0 for _ in members)
    if team_deadline == 0 or opp_deadline == 0:
        if observer is not None:
            observer("outcome", 0, {"kind": "failure", "round": 0})
        return NegotiationRecord(
            Failure(round=0), zeros, reservations, genuine, (), ()
        )
    interest = run_prenegotiation(members)
    n = interest.attributes
    directions = members[0].profile.directions
    policy = config.agenda_policy
    window = policy.learning_window if policy.kind is AgendaKind.SIMPLE_LEARNING else 0
    ledger = ConcessionLedger.empty(n)
    previous_counter: Offer | None = None
    opponent_view: list[float] = []
    logs: list[RoundLog] = []
    outcome: Agreement | None = None
    t = 0
    while t <= team_deadline and t <= opp_deadline:
        agenda = make_agenda(
            policy, n, ledger=ledger, opponent_profile=opponent.profile, rng=rng
        )
        if observer is not None:
            observer("agenda", t, {"order": agenda.order})
        team_offer = construct_offer(members, interest, agenda, t, rng, observer=observer)
        u_op = utility(opponent.profile, team_offer)
        opponent_view.append(u_op)
        if observer is not None:
            observer("team_offer", t, {"offer": team_offer, "opponent_utility": u_op})
        if acceptance_enabled and accepts(opponent.aspiration(t + 1), u_op):
            if observer is not None:
                observer("opponent_accept", t, {})
            if collect_rounds:
                logs.append(RoundLog(t, agenda.order, team_offer, u_op, True, None, None, None))
            outcome = Agreement(team_offer, t, Side.OPPONENT)
            break
        counter = opponent.counter_offer(t, rng)
        votes = tuple(m.vote_on_offer(counter, t) for m in members)
        team_accepts = acceptance_vote(votes, config.vote_threshold)
        if observer is not None:
            observer("counteroffer", t, {"offer": counter})
            observer("votes", t, {"votes": votes, "accepted": team_accepts})
        if collect_rounds:
            logs.append(
                RoundLog(t, agenda.order, team_offer, u_op, False, counter, votes, team_accepts)
            )
        if acceptance_enabled and team_accepts:
            outcome = Agreement(counter, t, Side.TEAM)
            break
        if window and t < window:
            if previous_counter is not None:
                ledger = update_ledger(ledger, previous_counter, counter, directions)
            previous_counter = counter
        t += 1
    if outcome is None:
        if observer is not None:
            observer("outcome", t, {"kind": "failure", "round": t})
        return NegotiationRecord(
            Failure(round=t),
            zeros,
            reservations,
            genuine,
            tuple(opponent_view),
            tuple(logs),
        )
    finals = tuple(utility(m.profile, outcome.offer) for m in members)
    if observer is not None:
        observer(
            "outcome",
            outcome.round,
            {
                "kind": "agreement",
                "round": outcome.round,
                "offer": outcome.offer,
                "accepted_by": outcome.accepted_by.value,
            },
        )
    return NegotiationRecord(
        outcome, finals, reservations, genuine, tuple(opponent_view), tuple(logs)
    )
