"""N-player partial-observation game model.

A game is defined by finite per-player action sets, per-player observable
subsets of an M-dimensional event vector, and a bounded utility function
mapping (joint action, event vector) to one utility per player.  Players and
event coordinates are indexed 1-based throughout the public API, matching the
scenario file format and trace column names.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AssumptionViolationError, EnumerationLimitError, InvalidInputError

Action = int | str
ActionVector = tuple[Action, ...]

DEFAULT_GUARD_LIMIT = 10**7
GUARD_LIMIT_ENV = "REGRET_MANAGER_GUARD_LIMIT"


def guard_limit(override: int | None = None) -> int:
    """Enumeration guard: explicit override, then env var, then default."""
    if override is not None:
        return override
    env = os.environ.get(GUARD_LIMIT_ENV)
    return int(env) if env else DEFAULT_GUARD_LIMIT


class UtilityFunction:
    """Pure evaluator û: (joint action, event vector) -> per-player utilities.

    Subclasses must be deterministic and side-effect free.  ``evaluate_batch``
    is an optional vectorized path; the default falls back to per-row calls.
    """

    name: str = "abstract"

    def params(self) -> dict:
        """JSON-serializable parameters for the scenario file."""
        return {}

    def evaluate(self, actions: ActionVector, omega: Sequence[float]) -> tuple[float, ...]:
        raise NotImplementedError

    def evaluate_batch(self, actions: ActionVector, omegas: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(actions, row) for row in omegas], dtype=float)


class CallableUtility(UtilityFunction):
    """Wraps an arbitrary python callable; mainly for tests and prototyping."""

    name = "callable"

    def __init__(self, fn, label: str = "callable"):
        self._fn = fn
        self.name = label

    def evaluate(self, actions, omega):
        return tuple(float(v) for v in self._fn(actions, omega))


class TableUtility(UtilityFunction):
    """Finite game given as an explicit table over a finite event support.

    ``values[c][s]`` is the utility vector for joint-action index ``c`` (in
    joint enumeration order) and event-support index ``s``.  Events outside
    the declared support are rejected.
    """

    name = "table"

    def __init__(self, action_sets: Sequence[Sequence[Action]],
                 omega_support: Sequence[Sequence[float]],
                 values: Sequence[Sequence[Sequence[float]]]):
        self.action_sets = tuple(tuple(a) for a in action_sets)
        self.omega_support = tuple(tuple(float(v) for v in row) for row in omega_support)
        self.values = tuple(tuple(tuple(float(u) for u in cell) for cell in row)
                            for row in values)
        n_cand = math.prod(len(a) for a in self.action_sets)
        if len(self.values) != n_cand:
            raise InvalidInputError(
                f"table has {len(self.values)} action rows, expected {n_cand}")
        for row in self.values:
            if len(row) != len(self.omega_support):
                raise InvalidInputError("table row length != omega support size")
        self._action_index = {
            combo: c for c, combo in enumerate(itertools.product(*self.action_sets))
        }
        self._omega_index = {row: s for s, row in enumerate(self.omega_support)}

    def params(self) -> dict:
        return {
            "action_sets": [list(a) for a in self.action_sets],
            "omega_support": [list(r) for r in self.omega_support],
            "values": [[list(u) for u in row] for row in self.values],
        }

    def _support_index(self, omega) -> int:
        key = tuple(float(v) for v in omega)
        try:
            return self._omega_index[key]
        except KeyError:
            raise InvalidInputError(f"event {key} outside the table's support") from None

    def evaluate(self, actions, omega):
        try:
            c = self._action_index[tuple(actions)]
        except KeyError:
            raise InvalidInputError(f"joint action {actions!r} not in the table") from None
        return self.values[c][self._support_index(omega)]

    def evaluate_batch(self, actions, omegas):
        c = self._action_index[tuple(actions)]
        rows = np.asarray(self.values[c], dtype=float)
        idx = np.array([self._omega_index[tuple(map(float, row))] for row in omegas])
        if len(idx) == 0:
            return np.zeros((0, rows.shape[1]))
        return rows[idx]


@dataclass(frozen=True)
class GameSpec:
    """Immutable definition of one game.

    observation_sets[i] and action_sets[i] belong to player i+1; observation
    sets contain 1-based event-coordinate indices and must jointly cover
    {1..event_dim} so the manager always sees the full event vector.
    """

    num_players: int
    event_dim: int
    observation_sets: tuple[frozenset[int], ...]
    action_sets: tuple[tuple[Action, ...], ...]
    utility: UtilityFunction
    utility_caps: tuple[float, ...]

    def __post_init__(self):
        n, m = self.num_players, self.event_dim
        if n < 1:
            raise InvalidInputError("num_players must be positive")
        if m < 1:
            raise InvalidInputError("event_dim must be positive")
        if len(self.observation_sets) != n or len(self.action_sets) != n:
            raise InvalidInputError("per-player sets must have num_players entries")
        if len(self.utility_caps) != n:
            raise InvalidInputError("utility_caps must have num_players entries")
        for i, s in enumerate(self.observation_sets):
            if any(j < 1 or j > m for j in s):
                raise InvalidInputError(f"observation set of player {i + 1} outside 1..{m}")
        covered = frozenset().union(*self.observation_sets)
        if covered != frozenset(range(1, m + 1)):
            missing = sorted(set(range(1, m + 1)) - covered)
            raise InvalidInputError(f"observation sets do not cover coordinates {missing}")
        for i, a in enumerate(self.action_sets):
            if len(a) == 0:
                raise InvalidInputError(f"action set of player {i + 1} is empty")
            if len(set(a)) != len(a):
                raise InvalidInputError(f"action set of player {i + 1} has duplicates")
        for i, cap in enumerate(self.utility_caps):
            if not (cap > 0):
                raise InvalidInputError(f"utility cap of player {i + 1} must be > 0")

    @property
    def num_joint_actions(self) -> int:
        return math.prod(len(a) for a in self.action_sets)

    def action_index(self, player: int, action: Action) -> int:
        """0-based position of ``action`` in player's declared set (player 1-based)."""
        try:
            return self.action_sets[player - 1].index(action)
        except ValueError:
            raise InvalidInputError(
                f"action {action!r} not allowed for player {player}") from None

    def joint_index(self, actions: ActionVector) -> int:
        """Position of a joint action in enumeration order (mixed-radix)."""
        idx = 0
        for i, a in enumerate(actions):
            idx = idx * len(self.action_sets[i]) + self.action_index(i + 1, a)
        return idx


@dataclass(frozen=True)
class Observation:
    """What one player sees at the start of a round: its coordinates only."""

    player: int
    visible: dict[int, float]


@dataclass
class ValidationReport:
    """Findings from scanning a game definition over sample events."""

    ok: bool = True
    problems: list[str] = field(default_factory=list)

    def add(self, message: str):
        self.ok = False
        self.problems.append(message)


def validate_action_vector(spec: GameSpec, actions: Sequence[Action]) -> ActionVector:
    if len(actions) != spec.num_players:
        raise InvalidInputError(
            f"action vector has {len(actions)} entries, expected {spec.num_players}")
    for i, a in enumerate(actions):
        if a not in spec.action_sets[i]:
            raise InvalidInputError(f"action {a!r} not allowed for player {i + 1}")
    return tuple(actions)


def validate_event_vector(spec: GameSpec, omega: Sequence[float]) -> tuple[float, ...]:
    if len(omega) != spec.event_dim:
        raise InvalidInputError(
            f"event vector has {len(omega)} entries, expected {spec.event_dim}")
    return tuple(float(v) for v in omega)


def evaluate_utilities(spec: GameSpec, actions: Sequence[Action],
                       omega: Sequence[float]) -> tuple[float, ...]:
    """Evaluate û for one round, enforcing the per-player utility boxes.

    A utility outside [0, cap] means the game definition violates its own
    standing assumptions, which is reported as AssumptionViolationError
    rather than blamed on the caller.
    """
    actions = validate_action_vector(spec, actions)
    omega = validate_event_vector(spec, omega)
    values = tuple(float(v) for v in spec.utility.evaluate(actions, omega))
    if len(values) != spec.num_players:
        raise AssumptionViolationError(
            f"utility function returned {len(values)} values for {spec.num_players} players")
    for i, (v, cap) in enumerate(zip(values, spec.utility_caps)):
        if not (0.0 <= v <= cap):
            raise AssumptionViolationError(
                f"utility {v} of player {i + 1} outside [0, {cap}] "
                f"at actions={actions!r}, omega={omega!r}")
    return values


def observe(spec: GameSpec, player: int, omega: Sequence[float]) -> Observation:
    """Project the event vector onto exactly the coordinates player can see."""
    if not (1 <= player <= spec.num_players):
        raise InvalidInputError(f"player {player} outside 1..{spec.num_players}")
    omega = validate_event_vector(spec, omega)
    visible = {j: omega[j - 1] for j in sorted(spec.observation_sets[player - 1])}
    return Observation(player=player, visible=visible)


def enumerate_joint_actions(spec: GameSpec,
                            limit: int | None = None) -> list[ActionVector]:
    """All joint actions, lexicographic by player then declaration order.

    Refuses (rather than truncates) products above the guard limit.
    """
    total = spec.num_joint_actions
    cap = guard_limit(limit)
    if total > cap:
        raise EnumerationLimitError(
            f"{total} joint actions exceed the guard limit {cap}")
    return list(itertools.product(*spec.action_sets))


def validate_game(spec: GameSpec,
                  event_samples: Sequence[Sequence[float]]) -> ValidationReport:
    """Scan the full joint-action enumeration against sample events.

    Structural invariants (coverage, non-empty action sets) are re-checked so
    the report is self-contained even though GameSpec construction enforces
    them too.
    """
    report = ValidationReport()
    covered = frozenset().union(*spec.observation_sets)
    for j in range(1, spec.event_dim + 1):
        if j not in covered:
            report.add(f"no player observes event coordinate {j}")
    for i, a in enumerate(spec.action_sets):
        if len(a) == 0:
            report.add(f"player {i + 1} has an empty action set")
    try:
        joint = enumerate_joint_actions(spec)
    except EnumerationLimitError as exc:
        report.add(str(exc))
        return report
    for omega in event_samples:
        try:
            omega_t = validate_event_vector(spec, omega)
        except InvalidInputError as exc:
            report.add(str(exc))
            continue
        for actions in joint:
            try:
                evaluate_utilities(spec, actions, omega_t)
            except (AssumptionViolationError, InvalidInputError) as exc:
                report.add(str(exc))
    return report
