"""Post-hoc verification of the deterministic per-path guarantees.

Every check below is a pure pass over an immutable trace.  Row t of a trace
holds the post-round state, so it is compared at time s = t+1: queue columns
hold q(s)/z(s) and the average columns hold the s-round averages.

Inequality checks report ``worst_slack`` = the smallest margin observed
(negative means violated by that much); equality checks report the largest
absolute deviation.  Tolerances default to the slack budgets the guarantees
are verified at: 1e-9 for telescoped inequalities, 0 where the property holds
by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .game import GameSpec
from .lookahead import frame_average_psi, frames_from_path
from .manager import (ManagerConfig, constant_b, constant_c_concave,
                      constant_c_weighted, constant_d)
from .phi import PhiSpec, eval_phi, eval_phi_batch, lipschitz_bound, phi_max
from .trace import Trace, running_mean


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    worst_slack: float
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _times(trace: Trace) -> np.ndarray:
    return np.arange(1, trace.horizon + 1, dtype=float)


def _min_location(margin: np.ndarray) -> str:
    flat = int(np.argmin(margin))
    if margin.ndim == 1:
        return f"t={flat}"
    t, i = divmod(flat, margin.shape[1])
    return f"t={t}, player={i + 1}"


def _ineq(name: str, margin: np.ndarray, tol: float) -> CheckResult:
    if margin.size == 0:
        return CheckResult(name, True, math.inf, "empty trace")
    worst = float(margin.min())
    ok = worst >= -tol
    detail = "" if ok else f"violated at {_min_location(margin)}"
    return CheckResult(name, ok, worst, detail)


def _eq(name: str, deviation: np.ndarray, tol: float) -> CheckResult:
    if deviation.size == 0:
        return CheckResult(name, True, 0.0, "empty trace")
    worst = float(deviation.max())
    ok = worst <= tol
    detail = "" if ok else f"deviates at {_min_location(-deviation)}"
    return CheckResult(name, ok, worst, detail)


def check_queue_regret_bound(trace: Trace, tol: float = 1e-9) -> CheckResult:
    """Queue telescoping: ubar_i(s) >= xbar_i(s) - q_i(s)/s for every i, s."""
    s = _times(trace).reshape(-1, 1)
    margin = trace.ubar - trace.xbar + trace.q / s
    return _ineq("queue_regret_bound", margin, tol)


def check_weighted_envelopes(trace: Trace, theta, caps, v: float,
                   tol: float = 1e-9) -> list[CheckResult]:
    """Queue-norm and regret envelopes of the weighted decision rule."""
    b = constant_b(caps)
    c = constant_c_weighted(theta, caps)
    s = _times(trace)
    env = np.sqrt((2 * b + 2 * v * c) / s)
    norm_margin = env - np.linalg.norm(trace.q, axis=1) / s
    regret_margin = (trace.ubar - trace.xbar) + env.reshape(-1, 1)
    return [
        _ineq("queue_norm_envelope", norm_margin, tol),
        _ineq("weighted_regret_envelope", regret_margin, tol),
    ]


def check_concave_envelopes(trace: Trace, phi: PhiSpec, v: float,
                   tol: float = 1e-9) -> list[CheckResult]:
    """Combined-queue envelope, regret envelope, and the proxy-to-average
    objective bound of the concave decision rule."""
    c_prime = constant_c_concave(phi.caps)
    pmax = phi_max(phi)
    lips = lipschitz_bound(phi)
    s = _times(trace)
    env = np.sqrt((2 * c_prime + 2 * v * pmax) / s)
    combined = np.sqrt(np.sum(trace.q ** 2, axis=1) + np.sum(trace.z ** 2, axis=1))
    norm_margin = env - combined / s
    regret_margin = (trace.ubar - trace.xbar) + env.reshape(-1, 1)
    phi_of_ubar = eval_phi_batch(phi, trace.ubar)
    phi_of_gamma_avg = running_mean(eval_phi_batch(phi, trace.gamma).reshape(-1, 1))[:, 0]
    objective_margin = phi_of_ubar - (phi_of_gamma_avg - lips * env)
    return [
        _ineq("joint_norm_envelope", norm_margin, tol),
        _ineq("concave_regret_envelope", regret_margin, tol),
        _ineq("objective_proxy_envelope", objective_margin, tol),
    ]


def check_proxy_identity(trace: Trace, tol: float = 1e-9) -> CheckResult:
    """||ubar(s) - gbar(s)|| equals ||z(s)||/s at every round."""
    s = _times(trace)
    lhs = np.linalg.norm(trace.ubar - trace.gbar, axis=1)
    rhs = np.linalg.norm(trace.z, axis=1) / s
    return _eq("proxy_identity", np.abs(lhs - rhs), tol)


def check_conservative_per_round(trace: Trace, tol: float = 0.0) -> CheckResult:
    """Every suggestion at least matches the baseline, player by player, round
    by round; holds by construction so the default tolerance is zero."""
    return _ineq("conservative_per_round", trace.u - trace.x, tol)


def check_running_averages(trace: Trace, tol: float = 1e-12) -> CheckResult:
    """Stored averages match a fresh compensated recomputation and an
    independent exact (fsum) check of the final row."""
    dev = 0.0
    for stored, raw in ((trace.ubar, trace.u), (trace.xbar, trace.x),
                        (trace.gbar, trace.gamma)):
        recomputed = running_mean(raw)
        if stored.size:
            dev = max(dev, float(np.max(np.abs(stored - recomputed))))
            h = trace.horizon
            for i in range(trace.num_players):
                exact = math.fsum(raw[:, i].tolist()) / h
                dev = max(dev, abs(float(stored[-1, i]) - exact))
    return _eq("running_averages", np.array([dev]), tol)


def _joint_indices_from_values(trace: Trace, spec: GameSpec,
                               values: np.ndarray) -> np.ndarray:
    out = np.zeros(trace.horizon, dtype=np.int64)
    for i in range(spec.num_players):
        lookup = {a: k for k, a in enumerate(spec.action_sets[i])}
        col = np.array([lookup[v if not isinstance(v, np.integer) else int(v)]
                        for v in values[:, i]], dtype=np.int64)
        out = out * len(spec.action_sets[i]) + col
    return out


def check_argmax_dominance(trace: Trace, spec: GameSpec, config: ManagerConfig,
                           tol: float = 1e-9) -> CheckResult:
    """The recorded suggestion scores at least as high as every candidate
    under the recorded queue weights (recomputed from the trace itself)."""
    from .harness import candidate_utilities

    h, n = trace.horizon, trace.num_players
    _, cu = candidate_utilities(spec, trace.omega)
    q_before = np.vstack([np.zeros((1, n)), trace.q[:-1]]) if h else trace.q
    z_before = np.vstack([np.zeros((1, n)), trace.z[:-1]]) if h else trace.z
    if config.variant == "weighted":
        w = config.v * np.asarray(config.theta) + q_before
    elif config.variant == "concave":
        w = q_before + z_before
    elif config.variant == "conservative_linear":
        w = np.tile(np.asarray(config.theta, dtype=float), (h, 1))
    else:
        w = z_before
    scores = np.einsum("tcn,tn->tc", cu, w)
    if config.variant.startswith("conservative"):
        feasible = np.all(cu >= trace.x[:, None, :], axis=2)
        scores = np.where(feasible, scores, -np.inf)
    best = scores.max(axis=1)
    chosen = scores[np.arange(h), _joint_indices_from_values(trace, spec, trace.alpha)]
    return _ineq("argmax_dominance", chosen - best, tol)


def _trace_frames(trace: Trace, spec: GameSpec, frame_size: int,
                  num_frames: int | None):
    b_rows = [tuple(int(v) if isinstance(v, np.integer) else v for v in row)
              for row in trace.b]
    return frames_from_path(trace.omega, b_rows, frame_size, num_frames)


def check_weighted_lookahead(trace: Trace, spec: GameSpec, theta, v: float,
                   frame_size: int, num_frames: int | None = None,
                   tol: float = 0.0) -> CheckResult:
    """Weighted rule versus the lookahead benchmark.

    sum_i theta_i * ubar_i(KT)  >=  mean_k psi_T[k] - T*B/V
    """
    if v <= 0:
        raise InvalidInputError("the lookahead comparison needs V > 0")
    frames = _trace_frames(trace, spec, frame_size, num_frames)
    k = len(frames)
    psi_bar = frame_average_psi(frames, spec, "weighted", theta=theta)
    achieved = float(np.dot(trace.ubar[k * frame_size - 1], np.asarray(theta)))
    b = constant_b(spec.utility_caps)
    margin = achieved - (psi_bar - frame_size * b / v)
    return CheckResult(
        "weighted_lookahead", margin >= -tol, margin,
        f"achieved={achieved:.12g} psi_bar={psi_bar:.12g} "
        f"penalty={frame_size * b / v:.12g} T={frame_size} K={k}")


def check_concave_lookahead(trace: Trace, spec: GameSpec, phi: PhiSpec,
                            v: float, frame_size: int,
                            num_frames: int | None = None,
                            tol: float = 0.0) -> CheckResult:
    """Concave rule versus the lookahead benchmark.

    phi(ubar(KT)) >= mean_k psi_T[k] - T*C'/V - L*sqrt((2C' + 2V*phi_max)/KT)
    """
    if v <= 0:
        raise InvalidInputError("lookahead comparison needs V > 0")
    frames = _trace_frames(trace, spec, frame_size, num_frames)
    k = len(frames)
    psi_bar = frame_average_psi(frames, spec, "concave", phi=phi)
    c_prime = constant_c_concave(spec.utility_caps)
    pmax, lips = phi_max(phi), lipschitz_bound(phi)
    achieved = eval_phi(phi, tuple(trace.ubar[k * frame_size - 1]))
    rhs = (psi_bar - frame_size * c_prime / v
           - lips * math.sqrt((2 * c_prime + 2 * v * pmax) / (k * frame_size)))
    margin = achieved - rhs
    return CheckResult(
        "concave_lookahead", margin >= -tol, margin,
        f"achieved={achieved:.12g} psi_bar={psi_bar:.12g} T={frame_size} K={k}")


def check_conservative_final(trace: Trace, spec: GameSpec, phi: PhiSpec,
                             v: float, frame_size: int,
                             num_frames: int | None = None,
                             d: float | None = None,
                             tol: float = 0.0) -> CheckResult:
    """Conservative concave rule versus the slot-constrained benchmark.

    phi(ubar(KT)) >= mean_k psi_T[k] - D*T/V - L*sqrt((2D + 2V*phi_max)/KT)
    """
    if v <= 0:
        raise InvalidInputError("lookahead comparison needs V > 0")
    frames = _trace_frames(trace, spec, frame_size, num_frames)
    k = len(frames)
    psi_bar = frame_average_psi(frames, spec, "conservative", phi=phi)
    d = constant_d(spec.utility_caps) if d is None else d
    pmax, lips = phi_max(phi), lipschitz_bound(phi)
    achieved = eval_phi(phi, tuple(trace.ubar[k * frame_size - 1]))
    rhs = (psi_bar - d * frame_size / v
           - lips * math.sqrt((2 * d + 2 * v * pmax) / (k * frame_size)))
    margin = achieved - rhs
    return CheckResult(
        "conservative_final", margin >= -tol, margin,
        f"achieved={achieved:.12g} psi_bar={psi_bar:.12g} D={d} "
        f"T={frame_size} K={k}")


def applicable_checks(trace: Trace, spec: GameSpec,
                      config: ManagerConfig | None) -> list[CheckResult]:
    """Every oracle-free check that applies to the trace's variant."""
    results = [check_running_averages(trace)]
    if config is None:
        return results
    if config.uses_q:
        results.append(check_queue_regret_bound(trace))
    if config.variant == "weighted":
        results.extend(check_weighted_envelopes(trace, config.theta, spec.utility_caps, config.v))
    if config.variant == "concave":
        results.extend(check_concave_envelopes(trace, config.phi, config.v))
    if config.uses_z:
        results.append(check_proxy_identity(trace))
    if config.variant.startswith("conservative"):
        results.append(check_conservative_per_round(trace))
    results.append(check_argmax_dominance(trace, spec, config))
    return results
