import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regret_manager.errors import (AssumptionViolationError,
                                   EnumerationLimitError, InvalidInputError)
from regret_manager.game import (CallableUtility, GameSpec, TableUtility,
                                 enumerate_joint_actions, evaluate_utilities,
                                 guard_limit, observe, validate_game)
from regret_manager.location_game import make_location_game

from .conftest import make_game


class TestGameSpec:
    def test_observation_sets_must_cover_all_coordinates(self):
        with pytest.raises(InvalidInputError, match="cover"):
            make_location_game(3, [[1], [2]], [[1], [2]], [10.0, 10.0])

    def test_rejects_empty_action_set(self):
        with pytest.raises(InvalidInputError, match="empty"):
            GameSpec(num_players=1, event_dim=1,
                     observation_sets=(frozenset({1}),),
                     action_sets=((),),
                     utility=CallableUtility(lambda a, w: (0.0,)),
                     utility_caps=(1.0,))

    def test_rejects_nonpositive_cap(self):
        with pytest.raises(InvalidInputError, match="cap"):
            make_location_game(1, [[1]], [[1]], [0.0])

    def test_joint_index_matches_enumeration_order(self, two_by_two_game):
        for k, actions in enumerate(enumerate_joint_actions(two_by_two_game)):
            assert two_by_two_game.joint_index(actions) == k


class TestEvaluateUtilities:
    def test_three_players_split_a_shared_location(self):
        spec = make_game([[1], [1], [1]], [[1], [1], [1]], num_locations=1)
        assert evaluate_utilities(spec, (1, 1, 1), (10.0,)) == (10 / 3, 10 / 3, 10 / 3)

    def test_identical_inputs_identical_outputs(self, example1):
        spec = example1.spec_no_share
        first = evaluate_utilities(spec, (1, 2), (2.2, 10.0))
        second = evaluate_utilities(spec, (1, 2), (2.2, 10.0))
        assert first == second

    def test_example1_separate_locations(self, example1):
        spec = example1.spec_no_share
        assert evaluate_utilities(spec, (1, 2), (2.2, 10.0)) == (2.2, 10.0)

    def test_dimension_mismatch_is_invalid_input(self, example1):
        spec = example1.spec_no_share
        with pytest.raises(InvalidInputError):
            evaluate_utilities(spec, (1, 2), (2.2, 10.0, 1.0))
        with pytest.raises(InvalidInputError):
            evaluate_utilities(spec, (1,), (2.2, 10.0))

    def test_action_outside_set_is_invalid_input(self, example1):
        with pytest.raises(InvalidInputError):
            evaluate_utilities(example1.spec_no_share, (1, 1), (2.2, 10.0))

    def test_utility_outside_box_blames_the_game(self):
        spec = GameSpec(
            num_players=1, event_dim=1,
            observation_sets=(frozenset({1}),),
            action_sets=((1,),),
            utility=CallableUtility(lambda a, w: (-1.0,)),
            utility_caps=(1.0,))
        with pytest.raises(AssumptionViolationError):
            evaluate_utilities(spec, (1,), (0.0,))


class TestObserve:
    def test_projects_exactly_the_observable_subset(self, example1):
        obs = observe(example1.spec_no_share, 1, (2.2, 10.0))
        assert obs.visible == {1: 2.2}

    def test_full_visibility_is_identity(self):
        spec = make_game([[1, 2]], [[1, 2]])
        assert observe(spec, 1, (3.0, 4.0)).visible == {1: 3.0, 2: 4.0}

    def test_player_two_sees_the_random_reward(self, example1):
        obs = observe(example1.spec_no_share, 2, (2.2, 10.0))
        assert obs.visible == {2: 10.0}

    def test_out_of_range_player(self, example1):
        with pytest.raises(InvalidInputError):
            observe(example1.spec_no_share, 3, (2.2, 10.0))

    @given(st.integers(1, 3), st.lists(st.floats(0, 10), min_size=3, max_size=3))
    @settings(max_examples=50, deadline=None)
    def test_projection_soundness(self, player, omega):
        spec = make_game([[1], [2], [3]], [[1, 2], [2, 3], [3, 1]])
        obs = observe(spec, player, omega)
        assert set(obs.visible) == set(spec.observation_sets[player - 1])
        for j, value in obs.visible.items():
            assert value == omega[j - 1]


class TestEnumerateJointActions:
    def test_two_by_one_product(self, example1):
        assert enumerate_joint_actions(example1.spec_no_share) == [(1, 2), (2, 2)]

    def test_full_product_is_lexicographic(self, two_by_two_game):
        assert enumerate_joint_actions(two_by_two_game) == [
            (1, 1), (1, 2), (2, 1), (2, 2)]

    def test_large_product_count(self):
        allowed = [list(range(1, 17))] * 3
        known = [list(range(1, 17))] * 3
        spec = make_game(allowed, known, num_locations=16)
        joint = enumerate_joint_actions(spec)
        # independent count: plain product of the set sizes
        assert len(joint) == 16 * 16 * 16 == 4096
        assert len(set(joint)) == len(joint)

    def test_guard_limit_refuses_rather_than_truncates(self, two_by_two_game):
        with pytest.raises(EnumerationLimitError):
            enumerate_joint_actions(two_by_two_game, limit=3)

    def test_guard_limit_env_override(self, two_by_two_game, monkeypatch):
        monkeypatch.setenv("REGRET_MANAGER_GUARD_LIMIT", "2")
        assert guard_limit() == 2
        with pytest.raises(EnumerationLimitError):
            enumerate_joint_actions(two_by_two_game)

    def test_enumeration_completeness_random_sets(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            sizes = rng.integers(1, 4, size=int(rng.integers(1, 4)))
            allowed = [sorted(rng.choice(np.arange(1, 5), size=s, replace=False).tolist())
                       for s in sizes]
            known = [[1, 2, 3, 4]] + [[1] for _ in range(len(sizes) - 1)]
            spec = make_game(allowed, known, num_locations=4)
            joint = enumerate_joint_actions(spec)
            assert len(joint) == math.prod(int(s) for s in sizes)
            assert len(set(joint)) == len(joint)
            assert joint == list(itertools.product(*spec.action_sets))


class TestValidateGame:
    def test_location_game_passes_with_tight_caps(self, example2):
        samples = [(2.2, 10.0), (2.2, 2.0)]
        report = validate_game(example2.spec_no_share, samples)
        assert report.ok and report.problems == []

    def test_bad_utility_cited_with_inputs(self):
        spec = GameSpec(
            num_players=2, event_dim=1,
            observation_sets=(frozenset({1}), frozenset({1})),
            action_sets=((1,), (1, 2)),
            utility=CallableUtility(
                lambda a, w: (1.0, -1.0) if a[1] == 2 else (1.0, 1.0)),
            utility_caps=(2.0, 2.0))
        report = validate_game(spec, [(0.0,)])
        assert not report.ok
        assert any("-1" in p and "(1, 2)" in p for p in report.problems)

    def test_table_game_roundtrip(self):
        utility = TableUtility(
            action_sets=[[1, 2], [1]],
            omega_support=[[0.0], [1.0]],
            values=[[[1.0, 2.0], [3.0, 4.0]], [[5.0, 6.0], [7.0, 8.0]]])
        spec = GameSpec(num_players=2, event_dim=1,
                        observation_sets=(frozenset({1}), frozenset({1})),
                        action_sets=utility.action_sets,
                        utility=utility, utility_caps=(8.0, 8.0))
        assert evaluate_utilities(spec, (1, 1), (1.0,)) == (3.0, 4.0)
        assert evaluate_utilities(spec, (2, 1), (0.0,)) == (5.0, 6.0)
        batch = utility.evaluate_batch((2, 1), np.array([[1.0], [0.0]]))
        assert batch.tolist() == [[7.0, 8.0], [5.0, 6.0]]
        assert validate_game(spec, [(0.0,), (1.0,)]).ok
