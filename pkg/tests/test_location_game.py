import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regret_manager.errors import InvalidInputError
from regret_manager.game import evaluate_utilities
from regret_manager.generators import generator_from_config
from regret_manager.location_game import (EXAMPLE_IDS, LocationRewardUtility,
                                          location_utility, make_example,
                                          make_grid_demo)


class TestLocationUtility:
    def test_two_players_split_one_location(self):
        assert location_utility((2, 2), (2.2, 10.0)) == (5.0, 5.0)

    def test_exclusive_locations_pay_in_full(self):
        assert location_utility((1, 2), (2.2, 10.0)) == (2.2, 10.0)

    def test_three_way_split(self):
        assert location_utility((1, 1, 1), (9.0, 0.0)) == (3.0, 3.0, 3.0)

    def test_location_out_of_range(self):
        with pytest.raises(InvalidInputError):
            location_utility((3, 1), (2.2, 10.0))
        with pytest.raises(InvalidInputError):
            location_utility((0, 1), (2.2, 10.0))

    def test_batch_matches_scalar(self):
        utility = LocationRewardUtility()
        omegas = np.array([[2.2, 10.0], [1.0, 0.0], [3.0, 3.0]])
        batch = utility.evaluate_batch((2, 2), omegas)
        for row, omega in zip(batch, omegas):
            assert tuple(row) == utility.evaluate((2, 2), omega)


@st.composite
def crowd_cases(draw):
    num_locations = draw(st.integers(1, 4))
    num_players = draw(st.integers(1, 4))
    actions = draw(st.lists(st.integers(1, num_locations),
                            min_size=num_players, max_size=num_players))
    # rewards are zero or of meaningful size; denormal-scale positives would
    # underflow the even split and void the strict-decrease claim
    reward = st.one_of(st.just(0.0), st.floats(1e-6, 100, allow_nan=False))
    omega = draw(st.lists(reward, min_size=num_locations, max_size=num_locations))
    return tuple(actions), tuple(omega)


class TestLocationProperties:
    @given(crowd_cases())
    @settings(max_examples=200, deadline=None)
    def test_reward_conservation_and_symmetry(self, case):
        actions, omega = case
        utilities = location_utility(actions, omega)
        # each chosen location pays out exactly its reward, split evenly
        chosen = set(actions)
        payout = math.fsum(utilities)
        expected = math.fsum(omega[m - 1] for m in chosen)
        assert payout == pytest.approx(expected, abs=1e-9)
        assert payout <= math.fsum(omega) + 1e-9
        for i, a in enumerate(actions):
            for j, b in enumerate(actions):
                if a == b:
                    assert utilities[i] == utilities[j]

    @given(crowd_cases())
    @settings(max_examples=100, deadline=None)
    def test_monotone_crowding(self, case):
        actions, omega = case
        utilities = location_utility(actions, omega)
        target = actions[0]
        crowded = location_utility(actions + (target,), omega)
        if omega[target - 1] > 0:
            assert crowded[0] < utilities[0]
        else:
            assert crowded[0] == utilities[0]


def _exact_expectation(example, style):
    """Independent oracle: enumerate the reward support and average the
    baseline policies' payoff analytically."""
    spec = example.spec_for(style)
    policies = example.policies[style]
    generator = generator_from_config(example.generator_config)
    values2, probs2 = generator.coordinates[1]
    total = [0.0, 0.0]
    for w2, p in zip(values2, probs2):
        omega = (2.2, w2)
        actions = []
        for i, policy in enumerate(policies):
            visible = {j: np.array([omega[j - 1]])
                       for j in sorted(spec.observation_sets[i])}
            idx = policy.decide_batch(spec, i + 1, visible, None)
            actions.append(spec.action_sets[i][int(idx[0])])
        u = evaluate_utilities(spec, tuple(actions), omega)
        total = [t + p * ui for t, ui in zip(total, u)]
    return tuple(total)


class TestExamples:
    def test_unknown_id_rejected(self):
        with pytest.raises(InvalidInputError):
            make_example("example9")

    @pytest.mark.parametrize("example_id,style,expected", [
        ("example1", "no_share", (2.2, 3.6)),
        ("example1", "share", (2.76, 2.6)),
        ("example2", "no_share", (3.0, 3.0)),
        ("example2", "share", (3.6, 3.5)),
        ("example3", "no_share", (3.5, 3.6)),
    ])
    def test_closed_form_expectations(self, example_id, style, expected):
        example = make_example(example_id)
        assert example.expected[style] == expected
        got = _exact_expectation(example, style)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_example3_share_has_no_pinned_value(self):
        example = make_example("example3")
        assert example.expected["share"] is None
        # the chosen convention reproduces the no-share numbers
        assert _exact_expectation(example, "share") == pytest.approx((3.5, 3.6))

    @pytest.mark.parametrize("example_id", EXAMPLE_IDS)
    def test_action_and_observation_sets(self, example_id):
        example = make_example(example_id)
        spec = example.spec_no_share
        assert spec.action_sets[1] == ((2,) if example_id != "example3" else (1, 2))
        assert spec.observation_sets == (frozenset({1}), frozenset({2}))
        shared = example.spec_share
        assert shared.observation_sets[0] == frozenset({1, 2})

    def test_high_reward_probabilities(self):
        cfg1 = make_example("example1").generator_config
        assert cfg1["coordinates"][1] == {"values": [10.0, 2.0], "probs": [0.2, 0.8]}
        cfg2 = make_example("example2").generator_config
        assert cfg2["coordinates"][1] == {"values": [10.0, 2.0], "probs": [0.5, 0.5]}


class TestGridDemo:
    def test_coverage_and_size(self):
        spec, generator_config = make_grid_demo()
        assert spec.event_dim == 16
        assert spec.num_joint_actions == 4096
        union = frozenset().union(*spec.observation_sets)
        assert union == frozenset(range(1, 17))
        assert len(generator_config["coordinates"]) == 16
