"""Decision rules: concession curves, bids, iso-utility offers, deviations."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teamnego.model import (
    Direction,
    NegotiatorParams,
    Offer,
    PartialOffer,
    ProtocolError,
    UtilityProfile,
    utility,
    valuation,
)
from teamnego.strategy import (
    DegenerateDeadlineError,
    DeviationMode,
    DeviationParams,
    IsoMode,
    accepts,
    bid_value,
    concession_order,
    deviated_bid,
    extra_demand,
    iso_utility_offer,
    nearest_iso_offer,
    opponent_aspiration,
    select_handover_set,
    team_aspiration,
)

from conftest import random_profile, rng_from


# frozen: s(t) = ceiling - (ceiling - ru) * (t/T)^(1/beta), computed by hand
ASPIRATION_CASES = [
    # (deadline, beta, reservation, budget, t, expected team aspiration)
    (10, 1.0, 0.0, 0.0, 0, 1.0),
    (10, 1.0, 0.0, 0.0, 5, 0.5),
    (10, 1.0, 0.0, 0.0, 10, 0.0),
    (4, 0.5, 0.2, 0.0, 2, 0.8),
    (4, 2.0, 0.2, 0.0, 2, 1.0 - 0.8 * math.sqrt(0.5)),
    (5, 1.0, 0.1, 0.2, 2, 0.52),
    (5, 1.0, 0.1, 0.2, 5, 0.1),
]


@pytest.mark.parametrize("deadline,beta,ru,budget,t,expected", ASPIRATION_CASES)
def test_team_aspiration_hand_values(deadline, beta, ru, budget, t, expected):
    params = NegotiatorParams(deadline, beta, ru, budget)
    assert math.isclose(team_aspiration(params, t), expected, abs_tol=1e-12)


def test_opponent_aspiration_ceiling_is_one():
    params = NegotiatorParams(10, 1.0, 0.25)
    assert opponent_aspiration(params, 0) == 1.0
    assert math.isclose(opponent_aspiration(params, 10), 0.25, abs_tol=1e-12)


def test_aspiration_clamps_past_deadline():
    params = NegotiatorParams(10, 0.7, 0.15)
    assert opponent_aspiration(params, 11) == opponent_aspiration(params, 10)
    assert team_aspiration(params, 99) == team_aspiration(params, 10)


def test_aspiration_rejects_zero_deadline():
    params = NegotiatorParams(0, 1.0)
    with pytest.raises(DegenerateDeadlineError):
        team_aspiration(params, 0)


@given(
    st.integers(1, 80),
    st.floats(0.05, 5.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 0.5),
)
def test_aspiration_monotone_between_ceiling_and_floor(deadline, beta, ru, budget):
    ceiling = 1.0 - budget
    if ru > ceiling:
        ru = ceiling
    params = NegotiatorParams(deadline, beta, ru, budget)
    previous = None
    for t in range(deadline + 1):
        s = team_aspiration(params, t)
        assert ru - 1e-9 <= s <= ceiling + 1e-9
        if previous is not None:
            assert s <= previous + 1e-9
        previous = s
    assert math.isclose(team_aspiration(params, 0), ceiling, abs_tol=1e-12)
    assert math.isclose(team_aspiration(params, deadline), ru, abs_tol=1e-12)


def test_accepts_boundary():
    assert accepts(0.5, 0.5)
    assert accepts(0.5, 0.5 - 1e-10)
    assert not accepts(0.5, 0.49)


def test_handover_set_keeps_within_budget_and_prefers_cheap():
    profile = UtilityProfile(
        (0.05, 0.5, 0.05, 0.4), (Direction.INCREASING,) * 4
    )
    assert select_handover_set(profile, 0.0) == frozenset()
    assert select_handover_set(profile, 0.06) == frozenset({0})
    assert select_handover_set(profile, 0.12) == frozenset({0, 2})
    with pytest.raises(ValueError):
        select_handover_set(profile, 1.5)


def test_handover_zero_weight_goes_even_with_zero_budget():
    profile = UtilityProfile((0.0, 1.0), (Direction.INCREASING,) * 2)
    assert select_handover_set(profile, 0.0) == frozenset({0})


@given(st.integers(1, 10), st.floats(0.0, 1.0), st.integers(0, 2**31 - 1))
@settings(max_examples=200)
def test_handover_matches_exhaustive_max_cardinality(n, budget, seed):
    rng = rng_from(7, seed)
    profile = random_profile(n, rng)
    chosen = select_handover_set(profile, budget)
    total = sum(profile.weights[j] for j in chosen)
    assert total <= budget + 1e-9
    best = 0
    for mask in range(1 << n):
        subset = [j for j in range(n) if mask >> j & 1]
        if sum(profile.weights[j] for j in subset) <= budget + 1e-12:
            best = max(best, len(subset))
    assert len(chosen) == best


def grid_best_bid(profile, j, partial, aspiration, step=1e-3):
    """Brute force reference: cheapest value whose added utility reaches the
    aspiration, else the most valuable one."""
    base = sum(
        profile.weights[k] * valuation(profile.directions[k], x)
        for k, x in partial.assignments.items()
    )
    best_x, best_key = None, None
    steps = int(round(1.0 / step))
    for i in range(steps + 1):
        x = i * step
        v = valuation(profile.directions[j], x)
        gain = profile.weights[j] * v
        short = max(0.0, aspiration - (base + gain))
        key = (round(short / 1e-9), v)
        if best_key is None or key < best_key:
            best_key, best_x = key, x
    return best_x


@given(st.integers(1, 4), st.integers(0, 2**31 - 1), st.floats(0.0, 1.0))
@settings(max_examples=120, deadline=None)
def test_bid_value_matches_grid_oracle(n, seed, aspiration):
    rng = rng_from(11, seed)
    profile = random_profile(n, rng)
    assigned = {
        k: float(rng.uniform()) for k in range(n) if k != n - 1 and rng.random() < 0.5
    }
    partial = PartialOffer(assigned)
    j = n - 1
    got = bid_value(profile, j, partial, aspiration)
    want = grid_best_bid(profile, j, partial, aspiration)
    assert abs(got - want) <= 2e-3


def test_bid_value_exact_cases():
    profile = UtilityProfile(
        (0.5, 0.3, 0.2), (Direction.INCREASING,) * 3
    )
    # needs 0.5 more: attribute 1 cannot cover it alone, demand saturates
    assert bid_value(profile, 1, PartialOffer({0: 0.4}), 0.7) == 1.0
    # needs 0.06 more: attribute 1 covers it at value 0.2
    assert math.isclose(bid_value(profile, 1, PartialOffer({0: 0.4}), 0.26), 0.2, abs_tol=1e-12)
    # already satisfied: least demanding value
    assert bid_value(profile, 1, PartialOffer({0: 1.0}), 0.3) == 0.0
    with pytest.raises(ProtocolError):
        bid_value(profile, 0, PartialOffer({0: 0.4}), 0.5)


def test_bid_value_decreasing_direction():
    profile = UtilityProfile(
        (0.5, 0.5), (Direction.DECREASING, Direction.DECREASING)
    )
    # needs 0.25: valuation 0.5 on a decreasing attribute is value 0.5
    assert math.isclose(bid_value(profile, 0, PartialOffer.empty(), 0.25), 0.5, abs_tol=1e-12)
    # least demanding value for a decreasing attribute is 1.0
    assert bid_value(profile, 0, PartialOffer.empty(), 0.0) == 1.0


def test_deviated_bid_inflates_but_caps():
    profile = UtilityProfile((0.5, 0.5), (Direction.INCREASING,) * 2)
    deviation = DeviationParams(DeviationMode.SLIGHTLY_DEVIATED, 1.25)
    # standard would ask 0.5/0.5 = 1.0 of the valuation range times 0.5 need
    standard = bid_value(profile, 0, PartialOffer.empty(), 0.25)
    inflated = deviated_bid(profile, 0, PartialOffer.empty(), 0.25, deviation)
    assert math.isclose(standard, 0.5, abs_tol=1e-12)
    assert math.isclose(inflated, 0.625, abs_tol=1e-12)
    # saturation: even inflated demands cannot leave the value domain
    big = deviated_bid(profile, 0, PartialOffer.empty(), 0.9, deviation)
    assert big == 1.0


def test_deviation_params_validation():
    with pytest.raises(ValueError):
        DeviationParams(DeviationMode.STANDARD, 1.5)
    with pytest.raises(ValueError):
        DeviationParams(DeviationMode.SLIGHTLY_DEVIATED, 0.9)
    with pytest.raises(ValueError):
        DeviationParams(DeviationMode.HIGHLY_DEVIATED, 1.5, (0.6, 0.4))


def test_extra_demand_stays_in_declared_range(rng):
    profile = UtilityProfile(
        (0.5, 0.5), (Direction.INCREASING, Direction.DECREASING)
    )
    for _ in range(200):
        for j in range(2):
            x = extra_demand(profile, j, rng)
            v = valuation(profile.directions[j], x)
            assert 0.10 - 1e-12 <= v <= 0.50 + 1e-12


@given(st.integers(1, 8), st.floats(0.0, 1.0), st.integers(0, 2**31 - 1))
@settings(max_examples=200)
def test_iso_offer_hits_target_both_modes(n, target, seed):
    rng = rng_from(13, seed)
    profile = random_profile(n, rng)
    for mode in (IsoMode.UNIFORM, IsoMode.RANDOM):
        offer = iso_utility_offer(profile, target, mode, rng)
        assert math.isclose(utility(profile, offer), target, abs_tol=1e-9)


@given(st.integers(2, 8), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 2**31 - 1))
@settings(max_examples=200)
def test_iso_offer_spread_preserves_target(n, target, spread, seed):
    rng = rng_from(17, seed)
    profile = random_profile(n, rng)
    offer = iso_utility_offer(profile, target, IsoMode.RANDOM, rng, spread=spread)
    assert math.isclose(utility(profile, offer), target, abs_tol=1e-9)


def test_iso_offer_corner_shape(rng):
    profile = random_profile(6, rng)
    offer = iso_utility_offer(profile, 0.55, IsoMode.RANDOM, rng)
    vals = [valuation(d, x) for d, x in zip(profile.directions, offer.values)]
    fractional = sum(1e-9 < v < 1.0 - 1e-9 for v in vals)
    assert fractional <= 1


def test_iso_offer_fixed_order_concedes_monotonically(rng):
    profile = random_profile(5, rng, mixed_directions=False)
    order = concession_order(profile.weights, rng)
    previous = None
    for target in (0.9, 0.7, 0.5, 0.3, 0.1):
        offer = iso_utility_offer(profile, target, IsoMode.RANDOM, rng, order=order)
        vals = [valuation(d, x) for d, x in zip(profile.directions, offer.values)]
        if previous is not None:
            assert all(v <= p + 1e-9 for v, p in zip(vals, previous))
        previous = vals


def test_iso_offer_argument_validation(rng):
    profile = random_profile(3, rng)
    with pytest.raises(ValueError):
        iso_utility_offer(profile, 1.5, IsoMode.UNIFORM)
    with pytest.raises(ValueError):
        iso_utility_offer(profile, 0.5, IsoMode.RANDOM)  # rng required
    with pytest.raises(ValueError):
        iso_utility_offer(profile, 0.5, IsoMode.RANDOM, rng, order=(0, 0, 1))
    with pytest.raises(ValueError):
        iso_utility_offer(profile, 0.5, IsoMode.RANDOM, rng, spread=1.5)


def test_concession_order_is_permutation_and_respects_sharpness():
    rng = rng_from(19)
    weights = (0.6, 0.25, 0.1, 0.05)
    for sharpness in (0.0, 0.5, 1.0, 5.0):
        order = concession_order(weights, rng, sharpness)
        assert sorted(order) == [0, 1, 2, 3]
    # a very sharp draw reproduces the exact weight ranking
    for _ in range(20):
        assert concession_order(weights, rng, 60.0) == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        concession_order(weights, rng, -0.5)


def test_concession_order_zero_weights_sort_last():
    rng = rng_from(23)
    for _ in range(20):
        order = concession_order((0.0, 0.7, 0.3, 0.0), rng)
        assert set(order[-2:]) == {0, 3}


def test_concession_order_head_tracks_weight():
    rng = rng_from(29)
    weights = (0.7, 0.2, 0.08, 0.02)
    heads = [concession_order(weights, rng)[0] for _ in range(2000)]
    freq = [heads.count(j) / len(heads) for j in range(4)]
    assert freq[0] > 0.55
    assert freq[0] > freq[1] > freq[3]


@given(st.integers(1, 6), st.floats(0.0, 1.0), st.integers(0, 2**31 - 1))
@settings(max_examples=150)
def test_nearest_iso_offer_exact_and_feasible(n, target, seed):
    rng = rng_from(31, seed)
    profile = random_profile(n, rng)
    anchor = Offer(tuple(float(v) for v in rng.uniform(size=n)))
    offer = nearest_iso_offer(profile, target, anchor)
    assert math.isclose(utility(profile, offer), target, abs_tol=1e-9)
    assert all(-1e-12 <= x <= 1.0 + 1e-12 for x in offer.values)


def test_nearest_iso_offer_beats_grid_points(rng):
    profile = random_profile(2, rng)
    anchor = Offer((0.9, 0.1))
    target = 0.4
    offer = nearest_iso_offer(profile, target, anchor)
    dist = sum((a - b) ** 2 for a, b in zip(offer.values, anchor.values))
    w0, w1 = profile.weights
    for i in range(201):
        x0 = i / 200
        v0 = valuation(profile.directions[0], x0)
        if w1 <= 0.0:
            continue
        v1 = (target - w0 * v0) / w1
        if not 0.0 <= v1 <= 1.0:
            continue
        x1 = v1 if profile.directions[1] is Direction.INCREASING else 1.0 - v1
        d = (x0 - anchor.values[0]) ** 2 + (x1 - anchor.values[1]) ** 2
        assert dist <= d + 1e-6


def test_nearest_iso_offer_keeps_anchor_when_already_on_target(rng):
    profile = random_profile(4, rng)
    anchor = iso_utility_offer(profile, 0.37, IsoMode.UNIFORM)
    offer = nearest_iso_offer(profile, 0.37, anchor)
    assert all(math.isclose(a, b, abs_tol=1e-9) for a, b in zip(anchor.values, offer.values))
