"""Concave objectives over the per-player utility box.

Three families ship, each with an exact closed-form solution of the per-round
proxy problem  maximize  V*phi(g) - sum_i z_i*g_i  over the box
prod_i [0, cap_i], an analytic Lipschitz constant, and the exact box maximum:

* ``weighted_sum``:  sum_i theta_i * g_i                (theta_i >= 0)
* ``log_offset``:    sum_i theta_i * log(delta + g_i)   (theta_i >= 0, delta > 0),
  shifted by a constant when delta < 1 so the box minimum is 0
* ``min_utility``:   min_i g_i

Non-negative weights keep every family non-negative and monotone on the box,
which the queue analysis relies on.  Tie-breaking everywhere prefers the box
upper corner, so replays are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

PHI_KINDS = ("weighted_sum", "log_offset", "min_utility")

_BOX_SLACK = 1e-9


@dataclass(frozen=True)
class PhiSpec:
    kind: str
    caps: tuple[float, ...]
    theta: tuple[float, ...] | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise InvalidInputError(f"unknown phi kind {self.kind!r}")
        if any(c <= 0 for c in self.caps):
            raise InvalidInputError("all box caps must be positive")
        if self.kind in ("weighted_sum", "log_offset"):
            if self.theta is None or len(self.theta) != len(self.caps):
                raise InvalidInputError(f"{self.kind} needs one weight per player")
            if any(t < 0 for t in self.theta):
                raise InvalidInputError(f"{self.kind} weights must be non-negative")
        else:
            if self.theta is not None:
                raise InvalidInputError("min_utility takes no weights")
        if self.kind == "log_offset":
            if self.delta is None or self.delta <= 0:
                raise InvalidInputError("log_offset needs delta > 0")
        elif self.delta is not None:
            raise InvalidInputError(f"{self.kind} takes no delta")

    @property
    def num_players(self) -> int:
        return len(self.caps)

    @property
    def log_shift(self) -> float:
        """Additive constant making log_offset non-negative on the box."""
        if self.kind != "log_offset" or self.delta >= 1:
            return 0.0
        return -math.log(self.delta) * sum(self.theta)

    def params(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.theta is not None:
            out["theta"] = list(self.theta)
        if self.delta is not None:
            out["delta"] = self.delta
        return out


def phi_from_config(cfg: dict, caps: tuple[float, ...]) -> PhiSpec:
    kind = cfg.get("kind")
    theta = tuple(float(t) for t in cfg["theta"]) if "theta" in cfg else None
    delta = float(cfg["delta"]) if "delta" in cfg else None
    return PhiSpec(kind=kind, caps=caps, theta=theta, delta=delta)


def _check_box(spec: PhiSpec, gamma) -> tuple[float, ...]:
    if len(gamma) != spec.num_players:
        raise InvalidInputError(
            f"gamma has {len(gamma)} entries, expected {spec.num_players}")
    out = []
    for i, (g, cap) in enumerate(zip(gamma, spec.caps)):
        g = float(g)
        if g < -_BOX_SLACK or g > cap + _BOX_SLACK:
            raise InvalidInputError(f"gamma[{i}] = {g} outside [0, {cap}]")
        out.append(min(max(g, 0.0), cap))
    return tuple(out)


def eval_phi(spec: PhiSpec, gamma) -> float:
    """Exact objective value at a box point."""
    gamma = _check_box(spec, gamma)
    if spec.kind == "weighted_sum":
        return float(sum(t * g for t, g in zip(spec.theta, gamma)))
    if spec.kind == "log_offset":
        return float(sum(t * math.log(spec.delta + g)
                         for t, g in zip(spec.theta, gamma)) + spec.log_shift)
    return float(min(gamma))


def eval_phi_batch(spec: PhiSpec, gammas: np.ndarray) -> np.ndarray:
    """Row-wise objective values; rows are clipped to the box."""
    g = np.clip(np.asarray(gammas, dtype=float), 0.0, np.asarray(spec.caps))
    if spec.kind == "weighted_sum":
        return g @ np.asarray(spec.theta)
    if spec.kind == "log_offset":
        return np.log(spec.delta + g) @ np.asarray(spec.theta) + spec.log_shift
    return np.min(g, axis=1)


def proxy_argmax(spec: PhiSpec, z, v: float) -> tuple[float, ...]:
    """Global maximizer of  V*phi(g) - sum_i z_i*g_i  over the box.

    weighted_sum is bang-bang per coordinate; log_offset has a per-coordinate
    stationary point clamped to the box; min_utility reduces to choosing the
    common lower level m shared by all positively-priced coordinates, in which
    the objective is linear, so m is 0 or the smallest cap.  Every tie takes
    the upper corner.
    """
    if v < 0:
        raise InvalidInputError("V must be non-negative")
    if len(z) != spec.num_players:
        raise InvalidInputError(f"z has {len(z)} entries, expected {spec.num_players}")
    z = [float(zi) for zi in z]
    for zi in z:
        if not math.isfinite(zi):
            raise InvalidInputError("z must be finite")

    if spec.kind == "weighted_sum":
        return tuple(cap if v * t - zi >= 0 else 0.0
                     for t, zi, cap in zip(spec.theta, z, spec.caps))

    if spec.kind == "log_offset":
        out = []
        for t, zi, cap in zip(spec.theta, z, spec.caps):
            if zi <= 0:
                # concave increasing part dominates; slope v*t/(d+g) - z >= 0
                out.append(cap)
            else:
                stationary = v * t / zi - spec.delta
                out.append(min(max(stationary, 0.0), cap))
        return tuple(out)

    # min_utility: coordinates priced z_i <= 0 sit at their caps for free;
    # the rest sit at the common level m, and d/dm = v - sum(z_i > 0 prices).
    positive = [zi for zi in z if zi > 0]
    if not positive:
        return tuple(spec.caps)
    m = min(spec.caps) if v - sum(positive) >= 0 else 0.0
    return tuple(cap if zi <= 0 else m for zi, cap in zip(z, spec.caps))


def lipschitz_bound(spec: PhiSpec) -> float:
    """Certified L with |phi(g) - phi(r)| <= L * ||g - r||_2 on the box."""
    if spec.kind == "weighted_sum":
        return math.sqrt(sum(t * t for t in spec.theta))
    if spec.kind == "log_offset":
        # gradient is largest at the box lower corner: theta_i / delta
        return math.sqrt(sum((t / spec.delta) ** 2 for t in spec.theta))
    # |min(g) - min(r)| <= max_i |g_i - r_i| <= ||g - r||_2
    return 1.0


def phi_max(spec: PhiSpec) -> float:
    """Exact maximum over the box (upper corner: all families are monotone)."""
    return eval_phi(spec, spec.caps)
