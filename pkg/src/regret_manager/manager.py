"""Causal game manager: per-round suggestion rules and virtual queues.

The manager holds two kinds of accumulators.  The regret queue ``q`` tracks
how far each player's realized utility has fallen behind its baseline
(clamped at zero, so q/t -> 0 certifies the time-average no-regret
constraint).  The proxy queue ``z`` tracks the signed gap between the chosen
proxy values and realized utilities, tying a concave function of time
averages to the time average of the function.

Four decision variants:

* ``weighted``              argmax_a  sum_i u_i(a) * (V*theta_i + q_i)
* ``concave``               proxy step, then argmax_a sum_i u_i(a) * (q_i + z_i)
* ``conservative_linear``   argmax over the baseline-dominating set of sum_i theta_i u_i(a)
* ``conservative_concave``  proxy step, then argmax over that set of sum_i z_i u_i(a)

All argmaxes are exhaustive over the finite joint-action enumeration with
first-in-order tie-breaking, so traces replay bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InvalidInputError
from .game import (ActionVector, GameSpec, enumerate_joint_actions,
                   evaluate_utilities, validate_action_vector,
                   validate_event_vector)
from .phi import PhiSpec, proxy_argmax

VARIANTS = ("weighted", "concave", "conservative_linear", "conservative_concave")

_Q_VARIANTS = ("weighted", "concave")
_Z_VARIANTS = ("concave", "conservative_concave")


@dataclass(frozen=True)
class ManagerConfig:
    variant: str
    v: float = 0.0
    theta: tuple[float, ...] | None = None
    phi: PhiSpec | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"unknown manager variant {self.variant!r}")
        if self.v < 0:
            raise InvalidInputError("V must be non-negative")
        needs_theta = self.variant in ("weighted", "conservative_linear")
        needs_phi = self.variant in ("concave", "conservative_concave")
        if needs_theta and self.theta is None:
            raise InvalidInputError(f"{self.variant} requires theta")
        if not needs_theta and self.theta is not None:
            raise InvalidInputError(f"{self.variant} takes no theta")
        if needs_phi and self.phi is None:
            raise InvalidInputError(f"{self.variant} requires phi")
        if not needs_phi and self.phi is not None:
            raise InvalidInputError(f"{self.variant} takes no phi")

    @property
    def uses_q(self) -> bool:
        return self.variant in _Q_VARIANTS

    @property
    def uses_z(self) -> bool:
        return self.variant in _Z_VARIANTS


@dataclass(frozen=True)
class ManagerState:
    """Round counter plus queue values (post all updates through round t-1)."""

    t: int
    q: tuple[float, ...] | None
    z: tuple[float, ...] | None


@dataclass(frozen=True)
class StepOutput:
    suggestion: ActionVector
    suggestion_index: int
    u: tuple[float, ...]
    x: tuple[float, ...]
    gamma: tuple[float, ...] | None
    objective: float
    drift_constants: dict[str, float]


@dataclass
class RoundContext:
    """Precomputed per-round argmax inputs, for the simulation hot loop.

    ``utilities[c]`` is the utility vector of ``candidates[c]`` at this
    round's event; ``baseline_index`` locates the baseline joint action in
    the candidate list.  When absent, run_round computes everything from the
    validated public operations.
    """

    candidates: list[ActionVector]
    utilities: list[tuple[float, ...]]
    baseline_index: int


def initial_state(config: ManagerConfig, num_players: int) -> ManagerState:
    zeros = (0.0,) * num_players
    return ManagerState(
        t=0,
        q=zeros if config.uses_q else None,
        z=zeros if config.uses_z else None,
    )


def validate_config_for_game(config: ManagerConfig, spec: GameSpec):
    n = spec.num_players
    if config.theta is not None and len(config.theta) != n:
        raise InvalidInputError(f"theta has {len(config.theta)} weights for {n} players")
    if config.phi is not None and config.phi.caps != spec.utility_caps:
        raise InvalidInputError("phi box caps must equal the game's utility caps")


@lru_cache(maxsize=None)
def constant_b(caps: tuple[float, ...]) -> float:
    """Quadratic drift constant of the regret queues: half the caps' square sum."""
    return 0.5 * sum(c * c for c in caps)


@lru_cache(maxsize=None)
def constant_c_weighted(theta: tuple[float, ...], caps: tuple[float, ...]) -> float:
    """Penalty range of the weighted objective: sum_i |theta_i| * cap_i."""
    return sum(abs(t) * c for t, c in zip(theta, caps))


@lru_cache(maxsize=None)
def constant_c_concave(caps: tuple[float, ...]) -> float:
    """Quadratic drift constant when both queue families are active."""
    return float(sum(c * c for c in caps))


@lru_cache(maxsize=None)
def constant_d(caps: tuple[float, ...]) -> float:
    """Quadratic drift constant of the proxy queues alone."""
    return 0.5 * sum(c * c for c in caps)


@lru_cache(maxsize=None)
def _weighted_constants(theta: tuple[float, ...], caps: tuple[float, ...]) -> dict:
    return {"B": constant_b(caps), "C": constant_c_weighted(theta, caps)}


@lru_cache(maxsize=None)
def _concave_constants(caps: tuple[float, ...]) -> dict:
    return {"C_prime": constant_c_concave(caps)}


@lru_cache(maxsize=None)
def _conservative_constants(caps: tuple[float, ...]) -> dict:
    return {"D": constant_d(caps)}


def update_queue_q(q: Sequence[float], x: Sequence[float],
                   u: Sequence[float]) -> tuple[float, ...]:
    """q_i' = max(q_i + x_i - u_i, 0): shortfall versus baseline, never negative."""
    return tuple(max(qi + xi - ui, 0.0) for qi, xi, ui in zip(q, x, u))


def update_queue_z(z: Sequence[float], gamma: Sequence[float],
                   u: Sequence[float]) -> tuple[float, ...]:
    """z_i' = z_i + gamma_i - u_i: signed, no clamp."""
    return tuple(zi + gi - ui for zi, gi, ui in zip(z, gamma, u))


def _argmax(utilities: list[tuple[float, ...]], weights: Sequence[float],
            allowed: Sequence[int] | None = None) -> tuple[int, float]:
    """First index attaining the max weighted score.

    ``allowed`` restricts the search to those candidate indices (in order).
    """
    best_idx = -1
    best = None
    indices = range(len(utilities)) if allowed is None else allowed
    for c in indices:
        row = utilities[c]
        score = 0.0
        for w, ui in zip(weights, row):
            score += w * ui
        if best is None or score > best:
            best = score
            best_idx = c
    if best_idx < 0:
        raise InvalidInputError("argmax over an empty candidate set")
    return best_idx, best


def _feasible_indices(utilities: list[tuple[float, ...]],
                      baseline: tuple[float, ...]) -> list[int]:
    """Candidates whose utilities dominate the baseline's coordinatewise.

    Always non-empty: the baseline action compares equal to itself.
    """
    out = []
    for c, row in enumerate(utilities):
        if all(ui >= xi for ui, xi in zip(row, baseline)):
            out.append(c)
    return out


def _build_context(spec: GameSpec, omega, b) -> RoundContext:
    if omega is None or b is None:
        raise InvalidInputError("omega and b are required when no round context is given")
    b = validate_action_vector(spec, b)
    omega = validate_event_vector(spec, omega)
    candidates = enumerate_joint_actions(spec)
    utilities = [evaluate_utilities(spec, a, omega) for a in candidates]
    return RoundContext(candidates=candidates, utilities=utilities,
                        baseline_index=spec.joint_index(b))


def conservative_feasible_set(spec: GameSpec, b, omega) -> list[ActionVector]:
    """All joint actions at least as good as the baseline for every player."""
    ctx = _build_context(spec, omega, b)
    x = ctx.utilities[ctx.baseline_index]
    return [ctx.candidates[c] for c in _feasible_indices(ctx.utilities, x)]


def weighted_step(state: ManagerState, config: ManagerConfig, spec: GameSpec,
                  omega=None, b=None, ctx: RoundContext | None = None) -> StepOutput:
    ctx = ctx or _build_context(spec, omega, b)
    weights = [config.v * t + qi for t, qi in zip(config.theta, state.q)]
    idx, objective = _argmax(ctx.utilities, weights)
    return StepOutput(
        suggestion=ctx.candidates[idx],
        suggestion_index=idx,
        u=ctx.utilities[idx],
        x=ctx.utilities[ctx.baseline_index],
        gamma=None,
        objective=objective,
        drift_constants=_weighted_constants(config.theta, spec.utility_caps),
    )


def concave_step(state: ManagerState, config: ManagerConfig, spec: GameSpec,
                 omega=None, b=None, ctx: RoundContext | None = None) -> StepOutput:
    ctx = ctx or _build_context(spec, omega, b)
    gamma = proxy_argmax(config.phi, state.z, config.v)
    weights = [qi + zi for qi, zi in zip(state.q, state.z)]
    idx, objective = _argmax(ctx.utilities, weights)
    return StepOutput(
        suggestion=ctx.candidates[idx],
        suggestion_index=idx,
        u=ctx.utilities[idx],
        x=ctx.utilities[ctx.baseline_index],
        gamma=gamma,
        objective=objective,
        drift_constants=_concave_constants(spec.utility_caps),
    )


def conservative_linear_step(state: ManagerState, config: ManagerConfig,
                             spec: GameSpec, omega=None, b=None,
                             ctx: RoundContext | None = None) -> StepOutput:
    ctx = ctx or _build_context(spec, omega, b)
    x = ctx.utilities[ctx.baseline_index]
    allowed = _feasible_indices(ctx.utilities, x)
    idx, objective = _argmax(ctx.utilities, config.theta, allowed)
    return StepOutput(
        suggestion=ctx.candidates[idx],
        suggestion_index=idx,
        u=ctx.utilities[idx],
        x=x,
        gamma=None,
        objective=objective,
        drift_constants={},
    )


def conservative_concave_step(state: ManagerState, config: ManagerConfig,
                              spec: GameSpec, omega=None, b=None,
                              ctx: RoundContext | None = None) -> StepOutput:
    ctx = ctx or _build_context(spec, omega, b)
    gamma = proxy_argmax(config.phi, state.z, config.v)
    x = ctx.utilities[ctx.baseline_index]
    allowed = _feasible_indices(ctx.utilities, x)
    idx, objective = _argmax(ctx.utilities, state.z, allowed)
    return StepOutput(
        suggestion=ctx.candidates[idx],
        suggestion_index=idx,
        u=ctx.utilities[idx],
        x=x,
        gamma=gamma,
        objective=objective,
        drift_constants=_conservative_constants(spec.utility_caps),
    )


_STEPS = {
    "weighted": weighted_step,
    "concave": concave_step,
    "conservative_linear": conservative_linear_step,
    "conservative_concave": conservative_concave_step,
}


def run_round(state: ManagerState, config: ManagerConfig, spec: GameSpec,
              omega=None, b=None, ctx: RoundContext | None = None
              ) -> tuple[ManagerState, StepOutput]:
    """One protocol round: suggest, then update queues, then advance t.

    Strictly causal: only the current event/baseline and the queues feed the
    decision.  The returned state carries the post-round queue values.
    """
    step = _STEPS[config.variant]
    out = step(state, config, spec, omega, b, ctx)
    new_q = update_queue_q(state.q, out.x, out.u) if config.uses_q else None
    new_z = update_queue_z(state.z, out.gamma, out.u) if config.uses_z else None
    return ManagerState(t=state.t + 1, q=new_q, z=new_z), out
