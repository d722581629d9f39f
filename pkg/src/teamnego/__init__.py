"""Mediated multi-attribute negotiation between an agent team and an opponent.

The package splits into a small simulation core and an experiment harness:

- :mod:`teamnego.model` holds the value types (offers, utility profiles,
  negotiator parameters, outcomes).
- :mod:`teamnego.strategy` holds the numerics: time-based aspiration
  curves, bid solving, iso-utility offer generation.
- :mod:`teamnego.agents` defines team members (including adversarial
  variants), the opponent, and two baseline team protocols.
- :mod:`teamnego.mediator` runs the mediated protocol itself: the
  decision-rights handover, agenda ordering, attribute-by-attribute offer
  construction, and voting.
- :mod:`teamnego.harness` samples random scenarios, runs the experiment
  grids, and writes the CSV outputs behind the ``teamnego`` CLI.
"""

from .model import (
    Agreement,
    Direction,
    Failure,
    NegotiationRecord,
    NegotiatorParams,
    Offer,
    Outcome,
    ProtocolError,
    Side,
    UtilityProfile,
    utility,
)
from .agents import AgentRole, Opponent, Scenario, TeamMember
from .mediator import AgendaPolicy, MediatorConfig, UNANIMITY, VoteThreshold, run_negotiation

__version__ = "0.1.0"

__all__ = [
    "AgendaPolicy",
    "AgentRole",
    "Agreement",
    "Direction",
    "Failure",
    "MediatorConfig",
    "NegotiationRecord",
    "NegotiatorParams",
    "Offer",
    "Opponent",
    "Outcome",
    "ProtocolError",
    "Scenario",
    "Side",
    "TeamMember",
    "UNANIMITY",
    "UtilityProfile",
    "VoteThreshold",
    "run_negotiation",
    "utility",
    "__version__",
]
