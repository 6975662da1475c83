"""Location-reward game: players pick locations and split each reward evenly.

Also builds the three canonical two-location instances used as ground truth
throughout the test suite, together with the hand-derived baseline strategies
for the information-withheld ("no_share") and information-shared ("share")
play styles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .game import ActionVector, GameSpec, UtilityFunction
from .policies import BaselinePolicy, ConstantPolicy, ThresholdPolicy


class LocationRewardUtility(UtilityFunction):
    """u_i = omega[chosen location] / (number of players at that location)."""

    name = "location_reward"

    def evaluate(self, actions: ActionVector, omega):
        m = len(omega)
        for a in actions:
            if not isinstance(a, int) or not (1 <= a <= m):
                raise InvalidInputError(f"location {a!r} outside 1..{m}")
        counts = {}
        for a in actions:
            counts[a] = counts.get(a, 0) + 1
        return tuple(float(omega[a - 1]) / counts[a] for a in actions)

    def evaluate_batch(self, actions: ActionVector, omegas: np.ndarray):
        omegas = np.asarray(omegas, dtype=float)
        m = omegas.shape[1] if omegas.ndim == 2 else 0
        for a in actions:
            if not isinstance(a, int) or not (1 <= a <= m):
                raise InvalidInputError(f"location {a!r} outside 1..{m}")
        counts = {}
        for a in actions:
            counts[a] = counts.get(a, 0) + 1
        cols = [omegas[:, a - 1] / counts[a] for a in actions]
        return np.column_stack(cols)


def location_utility(actions: ActionVector, omega) -> tuple[float, ...]:
    """Convenience wrapper over the shared evaluator instance."""
    return LocationRewardUtility().evaluate(actions, omega)


def make_location_game(num_locations: int,
                       allowed: list[list[int]],
                       known: list[list[int]],
                       caps: list[float]) -> GameSpec:
    return GameSpec(
        num_players=len(allowed),
        event_dim=num_locations,
        observation_sets=tuple(frozenset(s) for s in known),
        action_sets=tuple(tuple(sorted(a)) for a in allowed),
        utility=LocationRewardUtility(),
        utility_caps=tuple(float(c) for c in caps),
    )


@dataclass(frozen=True)
class ExampleGame:
    """One canonical two-player instance plus its hand-derived strategies.

    ``generator_config`` is the i.i.d. reward distribution in scenario-file
    form.  ``policies`` maps play style -> per-player baseline policies.
    ``expected`` maps play style -> exact long-run average utilities, or None
    where no closed form exists (example3 under sharing: the jointly optimal
    split of the low-reward rounds is ambiguous, so we fix player 1 -> the
    random location and player 2 -> the constant one and report only).
    """

    example_id: str
    spec_no_share: GameSpec
    spec_share: GameSpec
    generator_config: dict
    policies: dict[str, tuple[BaselinePolicy, ...]]
    expected: dict[str, tuple[float, float] | None]

    def spec_for(self, style: str) -> GameSpec:
        return self.spec_share if style == "share" else self.spec_no_share


EXAMPLE_IDS = ("example1", "example2", "example3")

_HI, _LO = 10.0, 2.0
_CONST = 2.2


def _two_location_spec(allowed: list[list[int]], known: list[list[int]]) -> GameSpec:
    return make_location_game(2, allowed, known, caps=[_HI, _HI])


def _iid_config(p_hi: float) -> dict:
    return {
        "kind": "iid",
        "coordinates": [
            {"values": [_CONST], "probs": [1.0]},
            {"values": [_HI, _LO], "probs": [p_hi, 1.0 - p_hi]},
        ],
    }


def make_example(example_id: str) -> ExampleGame:
    """Build one of the three canonical instances.

    All three share omega_1 = 2.2 always; omega_2 is 10-or-2 with the high
    probability 1/5 (example1) or 1/2 (examples 2, 3).  Player 1 may enter
    either location; player 2 is pinned to location 2 except in example3.
    Sharing is modeled by extending player 1's observation set to include
    coordinate 2, which is what the divulged value grants.
    """
    if example_id not in EXAMPLE_IDS:
        raise InvalidInputError(f"unknown example id {example_id!r}")

    know_split = [[1], [2]]
    know_shared = [[1, 2], [2]]
    chase_high = ThresholdPolicy(watch=2, threshold=_HI, if_ge=2, otherwise=1)

    if example_id == "example1":
        spec = _two_location_spec([[1, 2], [2]], know_split)
        spec_share = _two_location_spec([[1, 2], [2]], know_shared)
        return ExampleGame(
            example_id=example_id,
            spec_no_share=spec,
            spec_share=spec_share,
            generator_config=_iid_config(1 / 5),
            policies={
                "no_share": (ConstantPolicy(1), ConstantPolicy(2)),
                "share": (chase_high, ConstantPolicy(2)),
            },
            expected={
                "no_share": (2.2, 3.6),
                "share": (2.76, 2.6),
            },
        )
    if example_id == "example2":
        spec = _two_location_spec([[1, 2], [2]], know_split)
        spec_share = _two_location_spec([[1, 2], [2]], know_shared)
        return ExampleGame(
            example_id=example_id,
            spec_no_share=spec,
            spec_share=spec_share,
            generator_config=_iid_config(1 / 2),
            policies={
                "no_share": (ConstantPolicy(2), ConstantPolicy(2)),
                "share": (chase_high, ConstantPolicy(2)),
            },
            expected={
                "no_share": (3.0, 3.0),
                "share": (3.6, 3.5),
            },
        )
    spec = _two_location_spec([[1, 2], [1, 2]], know_split)
    spec_share = _two_location_spec([[1, 2], [1, 2]], know_shared)
    return ExampleGame(
        example_id=example_id,
        spec_no_share=spec,
        spec_share=spec_share,
        generator_config=_iid_config(1 / 2),
        policies={
            "no_share": (ConstantPolicy(2), chase_high),
            "share": (ConstantPolicy(2), chase_high),
        },
        expected={
            "no_share": (3.5, 3.6),
            "share": None,
        },
    )


def make_grid_demo() -> tuple[GameSpec, dict]:
    """Three players on a 4x4 grid with pairwise-overlapping visibility.

    Demo scenario only: large enough to exercise a 4096-way argmax, with no
    closed-form averages attached.
    """
    blue = [1, 2, 3]
    yellow = [4, 5, 6]
    red = [7, 8, 9]
    green = [10, 11]
    orange = [12, 13]
    purple = [14, 15, 16]
    known = [
        sorted(blue + green + purple),
        sorted(yellow + green + orange),
        sorted(red + orange + purple),
    ]
    allowed = [list(range(1, 17))] * 3
    spec = make_location_game(16, allowed, known, caps=[10.0] * 3)
    generator_config = {
        "kind": "iid",
        "coordinates": [
            {"values": [0.0, 1.0, 2.0, 5.0, 10.0],
             "probs": [0.35, 0.25, 0.2, 0.15, 0.05]}
            for _ in range(16)
        ],
    }
    return spec, generator_config
