"""Plain key=value config files for the command line harness.

One assignment per line, ``key = value``; blank lines and ``#`` comments are
ignored. Interval laws are written ``lo..hi`` and collapse to a point when a
single number is given. Every parse error names the offending key.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Callable

from ..strategy import IsoMode
from .experiments import ExperimentConfig
from .scenarios import IntLaw, Law


class ConfigError(ValueError):
    """A config file could not be understood."""


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_law(text: str) -> Law:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return Law(float(lo), float(hi))
    return Law.fixed(float(text))


def _parse_int_law(text: str) -> IntLaw:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return IntLaw(int(lo, 10), int(hi, 10))
    return IntLaw.fixed(int(text, 10))


def _parse_mode(text: str) -> IsoMode:
    try:
        return IsoMode(text.strip().lower())
    except ValueError:
        raise ValueError(f"expected 'uniform' or 'random', got {text!r}") from None


#: Keys accepted in ``run`` config files, mirroring ExperimentConfig.
RUN_KEYS: dict[str, Callable[[str], object]] = {
    "team_size": _parse_int,
    "attributes": _parse_int,
    "teams": _parse_int,
    "opponents": _parse_int,
    "repetitions": _parse_int,
    "short_deadline": _parse_int_law,
    "long_deadline": _parse_int_law,
    "beta": _parse_law,
    "reservation": _parse_law,
    "handover_budget": _parse_float,
    "infiltrator_reservation": _parse_law,
    "opponent_offer_mode": _parse_mode,
}


@dataclass(frozen=True)
class TraceConfig:
    """A single-negotiation scenario for the round tracer.

    Defaults describe the smallest instructive case: one member, one
    attribute, ten rounds, linear concession, no reservation. That case
    reaches agreement at round five on value one half.
    """

    team_size: int = 1
    attributes: int = 1
    deadline: IntLaw = IntLaw.fixed(10)
    beta: Law = Law.fixed(1.0)
    reservation: Law = Law.fixed(0.0)
    handover_budget: float = 0.0
    opponent_offer_mode: IsoMode = IsoMode.UNIFORM
    agenda: str = "simple"
    vote_fraction: float = 1.0


TRACE_KEYS: dict[str, Callable[[str], object]] = {
    "team_size": _parse_int,
    "attributes": _parse_int,
    "deadline": _parse_int_law,
    "beta": _parse_law,
    "reservation": _parse_law,
    "handover_budget": _parse_float,
    "opponent_offer_mode": _parse_mode,
    "agenda": lambda text: text.strip().lower(),
    "vote_fraction": _parse_float,
}


def parse_config_text(
    text: str, keys: dict[str, Callable[[str], object]]
) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in keys:
            raise ConfigError(f"unknown config key '{key}'")
        try:
            values[key] = keys[key](value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for config key '{key}': {exc}") from None
    return values


def load_config_file(
    path: str, keys: dict[str, Callable[[str], object]]
) -> dict[str, object]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), keys)


def apply_run_config(base: ExperimentConfig, overrides: dict[str, object]) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown config key '{sorted(unknown)[0]}'")
    try:
        return replace(base, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def apply_trace_config(base: TraceConfig, overrides: dict[str, object]) -> TraceConfig:
    known = {f.name for f in fields(TraceConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown config key '{sorted(unknown)[0]}'")
    agenda = overrides.get("agenda")
    if agenda is not None and agenda not in ("perfect", "simple", "random"):
        raise ConfigError(
            f"bad value for config key 'agenda': expected perfect, simple or random, got {agenda!r}"
        )
    fraction = overrides.get("vote_fraction")
    if fraction is not None and not 0.0 < float(fraction) <= 1.0:
        raise ConfigError("bad value for config key 'vote_fraction': outside (0, 1]")
    try:
        return replace(base, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
