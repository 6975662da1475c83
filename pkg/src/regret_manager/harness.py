"""Full-run driver: events, baselines, manager stepping, trace assembly.

Random streams are split per role so a run is reproducible and individual
seats are substitutable: the event generator draws from stream (seed, 0) and
player i's policy from stream (seed, i).  Replacing one seat's policy (e.g.
with a live human) leaves every other stream untouched, which is what makes
interactive sessions byte-equivalent to headless runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import checks
from .errors import EngineError, InvalidInputError, SimulationError
from .game import GameSpec, enumerate_joint_actions
from .generators import EventGenerator
from .manager import (ManagerConfig, RoundContext, initial_state, run_round,
                      validate_config_for_game)
from .policies import BaselinePolicy
from .trace import Trace, scenario_fingerprint

_PRECOMPUTE_CELL_LIMIT = 200_000_000


@dataclass
class Scenario:
    """Everything one run needs, plus its canonical document for fingerprints."""

    spec: GameSpec
    generator: EventGenerator
    policies: tuple[BaselinePolicy, ...]
    manager: ManagerConfig | None
    horizon: int
    seed: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 0:
            raise InvalidInputError("horizon must be non-negative")
        if len(self.policies) != self.spec.num_players:
            raise InvalidInputError("need exactly one baseline policy per player")
        if self.generator.event_dim != self.spec.event_dim:
            raise InvalidInputError(
                f"generator emits {self.generator.event_dim}-dim events for a "
                f"{self.spec.event_dim}-dim game")
        if self.manager is not None:
            validate_config_for_game(self.manager, self.spec)


def event_stream(scenario: Scenario) -> np.random.Generator:
    if scenario.generator.seed is not None:
        return np.random.default_rng(scenario.generator.seed)
    return np.random.default_rng([scenario.seed, 0])


def policy_stream(scenario: Scenario, player: int) -> np.random.Generator:
    return np.random.default_rng([scenario.seed, player])


def generate_events(scenario: Scenario) -> np.ndarray:
    events = scenario.generator.generate(scenario.horizon, event_stream(scenario))
    events = np.asarray(events, dtype=float)
    if events.shape != (scenario.horizon, scenario.spec.event_dim):
        raise InvalidInputError(
            f"generator produced shape {events.shape}, expected "
            f"{(scenario.horizon, scenario.spec.event_dim)}")
    return events


def generate_baselines(scenario: Scenario, events: np.ndarray,
                       skip_players: frozenset[int] = frozenset()) -> np.ndarray:
    """Per-player action indices for the whole horizon.

    ``skip_players`` seats (1-based) are left at -1 for a live participant to
    fill in; their policy stream is simply never consumed.
    """
    spec = scenario.spec
    horizon = len(events)
    out = np.full((horizon, spec.num_players), -1, dtype=np.int64)
    for i in range(spec.num_players):
        player = i + 1
        if player in skip_players:
            continue
        visible = {j: events[:, j - 1] for j in sorted(spec.observation_sets[i])}
        idx = scenario.policies[i].decide_batch(
            spec, player, visible, policy_stream(scenario, player))
        idx = np.asarray(idx, dtype=np.int64)
        if idx.shape != (horizon,):
            raise InvalidInputError(
                f"policy of player {player} produced shape {idx.shape}")
        n_actions = len(spec.action_sets[i])
        if horizon and (idx.min() < 0 or idx.max() >= n_actions):
            raise InvalidInputError(f"policy of player {player} left the action set")
        out[:, i] = idx
    return out


def candidate_utilities(spec: GameSpec, events: np.ndarray) -> tuple[list, np.ndarray]:
    """All joint actions and their utilities at every round: (H, n_cand, N)."""
    candidates = enumerate_joint_actions(spec)
    horizon = len(events)
    n = spec.num_players
    if horizon * len(candidates) * n > _PRECOMPUTE_CELL_LIMIT:
        raise EngineError(
            "candidate utility table would exceed the in-memory limit; "
            "reduce the horizon or the joint-action count")
    cu = np.empty((horizon, len(candidates), n), dtype=float)
    for c, actions in enumerate(candidates):
        cu[:, c, :] = spec.utility.evaluate_batch(actions, events)
    caps = np.asarray(spec.utility_caps)
    if horizon and (cu.min() < 0.0 or (cu > caps).any()):
        bad = np.argwhere((cu < 0.0) | (cu > caps))[0]
        raise SimulationError(int(bad[0]),
                              f"utility outside [0, cap] for joint action "
                              f"{candidates[int(bad[1])]!r}")
    return candidates, cu


def joint_indices(spec: GameSpec, action_indices: np.ndarray) -> np.ndarray:
    """Mixed-radix fold of per-player action indices into joint positions."""
    out = np.zeros(len(action_indices), dtype=np.int64)
    for i in range(spec.num_players):
        out = out * len(spec.action_sets[i]) + action_indices[:, i]
    return out


def _action_values(spec: GameSpec, idx: np.ndarray) -> np.ndarray:
    """Map per-player action indices to declared action values."""
    horizon = len(idx)
    all_int = all(isinstance(a, int) for acts in spec.action_sets for a in acts)
    dtype = np.int64 if all_int else object
    out = np.empty((horizon, spec.num_players), dtype=dtype)
    for i in range(spec.num_players):
        lookup = np.array(spec.action_sets[i], dtype=dtype)
        out[:, i] = lookup[idx[:, i]]
    return out


def make_round_context(candidates: list, cu: np.ndarray, t: int,
                       baseline_joint: int) -> RoundContext:
    """Per-round argmax inputs from the precomputed utility table."""
    return RoundContext(
        candidates=candidates,
        utilities=[tuple(row) for row in cu[t].tolist()],
        baseline_index=baseline_joint,
    )


def assemble_trace(scenario: Scenario, events: np.ndarray, b_idx: np.ndarray,
                   alpha_joint: np.ndarray, u: np.ndarray, x: np.ndarray,
                   q: np.ndarray, z: np.ndarray, gamma: np.ndarray,
                   objective: np.ndarray, check_bounds: bool = True) -> Trace:
    """Shared final assembly so headless runs and live sessions agree bit for
    bit: averages and summaries always come from this one code path."""
    spec = scenario.spec
    config = scenario.manager
    alpha_idx = _per_player_indices(spec, alpha_joint)
    trace = Trace(
        fingerprint=scenario_fingerprint(scenario.config),
        num_players=spec.num_players,
        event_dim=spec.event_dim,
        omega=events,
        b=_action_values(spec, b_idx),
        alpha=_action_values(spec, alpha_idx),
        u=u, x=x, q=q, z=z, gamma=gamma,
        objective=objective,
    )
    trace.summary["manager"] = None if config is None else _manager_summary(config, spec)
    if check_bounds and trace.horizon:
        results = checks.applicable_checks(trace, spec, config)
        trace.summary["bound_checks"] = {
            r.name: {"ok": r.ok, "worst_slack": r.worst_slack} for r in results
        }
    return trace


def run_simulation(scenario: Scenario, check_bounds: bool = True) -> Trace:
    """Deterministic full run; trace length equals the horizon.

    With no manager configured, suggestions are forced to the baselines and
    the queue columns stay at zero.
    """
    spec = scenario.spec
    horizon = scenario.horizon
    n = spec.num_players

    events = generate_events(scenario)
    b_idx = generate_baselines(scenario, events)
    candidates, cu = candidate_utilities(spec, events)
    b_joint = joint_indices(spec, b_idx)
    rows = np.arange(horizon)
    x = cu[rows, b_joint] if horizon else np.zeros((0, n))

    q = np.zeros((horizon, n))
    z = np.zeros((horizon, n))
    gamma = np.zeros((horizon, n))
    objective = np.zeros(horizon)

    config = scenario.manager
    if config is None:
        alpha_joint = b_joint
        u = x
    else:
        alpha_joint = np.empty(horizon, dtype=np.int64)
        state = initial_state(config, n)
        uses_q, uses_z = config.uses_q, config.uses_z
        try:
            for t in range(horizon):
                ctx = make_round_context(candidates, cu, t, int(b_joint[t]))
                state, out = run_round(state, config, spec, ctx=ctx)
                alpha_joint[t] = out.suggestion_index
                objective[t] = out.objective
                if uses_q:
                    q[t] = state.q
                if uses_z:
                    z[t] = state.z
                    gamma[t] = out.gamma
        except EngineError as exc:
            if isinstance(exc, SimulationError):
                raise
            raise SimulationError(int(state.t), str(exc)) from exc
        u = cu[rows, alpha_joint] if horizon else np.zeros((0, n))

    return assemble_trace(scenario, events, b_idx, alpha_joint, u, x, q, z,
                          gamma, objective, check_bounds)


def _per_player_indices(spec: GameSpec, joint: np.ndarray) -> np.ndarray:
    out = np.empty((len(joint), spec.num_players), dtype=np.int64)
    rem = joint.copy()
    for i in range(spec.num_players - 1, -1, -1):
        size = len(spec.action_sets[i])
        out[:, i] = rem % size
        rem //= size
    return out


def _manager_summary(config: ManagerConfig, spec: GameSpec) -> dict:
    from .manager import (constant_b, constant_c_concave, constant_c_weighted,
                          constant_d)
    from .phi import lipschitz_bound, phi_max

    caps = spec.utility_caps
    out: dict = {"variant": config.variant, "V": config.v}
    if config.theta is not None:
        out["theta"] = list(config.theta)
    if config.variant == "weighted":
        out["constants"] = {"B": constant_b(caps),
                            "C": constant_c_weighted(config.theta, caps)}
    elif config.variant == "concave":
        out["constants"] = {"C_prime": constant_c_concave(caps)}
    elif config.variant == "conservative_concave":
        out["constants"] = {"D": constant_d(caps)}
    else:
        out["constants"] = {}
    if config.phi is not None:
        out["phi"] = config.phi.params()
        out["constants"]["L_phi"] = lipschitz_bound(config.phi)
        out["constants"]["phi_max"] = phi_max(config.phi)
    return out
