"""Baseline decision policies.

A policy produces the action a player would take on its own, using only the
event coordinates that player can observe.  Policies generate the whole
horizon in one call: baseline sequences are oblivious to manager suggestions,
so batching keeps random streams identical whether a run happens headlessly
or one round at a time in an interactive session.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .game import Action, GameSpec


class BaselinePolicy:
    """Interface: per-player action indices for a whole horizon."""

    kind: str = "abstract"

    def config(self) -> dict:
        raise NotImplementedError

    def decide_batch(self, spec: GameSpec, player: int,
                     visible: dict[int, np.ndarray],
                     rng: np.random.Generator) -> np.ndarray:
        """Return 0-based indices into the player's action set, length = horizon.

        ``visible`` maps 1-based event coordinates in the player's observation
        set to their value columns; nothing else is ever passed in, which is
        what enforces the information boundary.
        """
        raise NotImplementedError

    def _horizon(self, visible: dict[int, np.ndarray]) -> int:
        return len(next(iter(visible.values()))) if visible else 0


class ConstantPolicy(BaselinePolicy):
    kind = "constant"

    def __init__(self, action: Action):
        self.action = action

    def config(self) -> dict:
        return {"kind": self.kind, "action": self.action}

    def decide_batch(self, spec, player, visible, rng):
        idx = spec.action_index(player, self.action)
        return np.full(self._horizon(visible), idx, dtype=np.int64)


class ScriptedPolicy(BaselinePolicy):
    """Explicit per-round action list; the run must not outlast the script."""

    kind = "scripted"

    def __init__(self, actions: list[Action]):
        if not actions:
            raise InvalidInputError("scripted policy needs at least one action")
        self.actions = list(actions)

    def config(self) -> dict:
        return {"kind": self.kind, "actions": list(self.actions)}

    def decide_batch(self, spec, player, visible, rng):
        horizon = self._horizon(visible)
        if horizon > len(self.actions):
            raise InvalidInputError(
                f"scripted policy for player {player} has {len(self.actions)} "
                f"actions but the horizon is {horizon}")
        return np.array([spec.action_index(player, a) for a in self.actions[:horizon]],
                        dtype=np.int64)


class RandomPolicy(BaselinePolicy):
    """Uniform over the player's action set, from the player's seeded stream."""

    kind = "random"

    def config(self) -> dict:
        return {"kind": self.kind}

    def decide_batch(self, spec, player, visible, rng):
        n = len(spec.action_sets[player - 1])
        return rng.integers(0, n, size=self._horizon(visible), dtype=np.int64)


class ThresholdPolicy(BaselinePolicy):
    """Watch one visible coordinate and switch action on a threshold."""

    kind = "threshold"

    def __init__(self, watch: int, threshold: float, if_ge: Action, otherwise: Action):
        self.watch = watch
        self.threshold = float(threshold)
        self.if_ge = if_ge
        self.otherwise = otherwise

    def config(self) -> dict:
        return {"kind": self.kind, "watch": self.watch, "threshold": self.threshold,
                "if_ge": self.if_ge, "else": self.otherwise}

    def decide_batch(self, spec, player, visible, rng):
        if self.watch not in visible:
            raise InvalidInputError(
                f"player {player} cannot watch coordinate {self.watch}: "
                f"not in its observation set")
        hi = spec.action_index(player, self.if_ge)
        lo = spec.action_index(player, self.otherwise)
        return np.where(visible[self.watch] >= self.threshold, hi, lo).astype(np.int64)


class GreedyObservedPolicy(BaselinePolicy):
    """Pick the best-looking location from visible rewards alone.

    Actions must be integer locations.  Unobserved locations are valued at
    ``default_value`` (the player's prior), and ``assumed_split`` models an
    assumption about how crowded each location will be.  Ties go to the
    earliest action in the declared set.
    """

    kind = "greedy_observed"

    def __init__(self, default_value: float, assumed_split: dict[int, float] | None = None):
        self.default_value = float(default_value)
        self.assumed_split = {int(k): float(v) for k, v in (assumed_split or {}).items()}
        for loc, div in self.assumed_split.items():
            if div < 1:
                raise InvalidInputError(f"assumed split at location {loc} must be >= 1")

    def config(self) -> dict:
        out: dict = {"kind": self.kind, "default_value": self.default_value}
        if self.assumed_split:
            out["assumed_split"] = {str(k): v for k, v in self.assumed_split.items()}
        return out

    def decide_batch(self, spec, player, visible, rng):
        horizon = self._horizon(visible)
        actions = spec.action_sets[player - 1]
        scores = np.empty((horizon, len(actions)))
        for col, a in enumerate(actions):
            if not isinstance(a, int):
                raise InvalidInputError("greedy_observed requires integer locations")
            value = visible.get(a)
            if value is None:
                value = np.full(horizon, self.default_value)
            scores[:, col] = value / self.assumed_split.get(a, 1.0)
        return np.argmax(scores, axis=1).astype(np.int64)


_POLICY_KINDS = {
    cls.kind: cls
    for cls in (ConstantPolicy, ScriptedPolicy, RandomPolicy, ThresholdPolicy,
                GreedyObservedPolicy)
}


def policy_from_config(cfg: dict) -> BaselinePolicy:
    kind = cfg.get("kind")
    if kind == "constant":
        return ConstantPolicy(cfg["action"])
    if kind == "scripted":
        return ScriptedPolicy(list(cfg["actions"]))
    if kind == "random":
        return RandomPolicy()
    if kind == "threshold":
        return ThresholdPolicy(cfg["watch"], cfg["threshold"], cfg["if_ge"], cfg["else"])
    if kind == "greedy_observed":
        split = cfg.get("assumed_split")
        split = {int(k): v for k, v in split.items()} if split else None
        return GreedyObservedPolicy(cfg["default_value"], split)
    raise InvalidInputError(f"unknown policy kind {kind!r}")


def policy_kinds() -> tuple[str, ...]:
    return tuple(_POLICY_KINDS)
