"""Exhaustive T-slot lookahead benchmark.

For a frame of T rounds with known events and baselines, computes the best
objective any action sequence could have achieved, subject to the family's
regret constraint:

* ``weighted``      frame-average utilities must dominate the frame-average
                    baseline utilities coordinatewise; objective sum_i theta_i*g_i
* ``concave``       same constraint; objective phi(g)
* ``conservative``  every single slot must dominate its baseline coordinatewise;
                    objective phi(g)

The all-baseline sequence always survives either filter, so the value is well
defined.  Search is brute force over every candidate sequence; correctness by
obviousness is the point, so there are no shortcuts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EnumerationLimitError, InvalidInputError
from .game import (ActionVector, GameSpec, enumerate_joint_actions,
                   evaluate_utilities, guard_limit)
from .phi import PhiSpec, eval_phi

FAMILIES = ("weighted", "concave", "conservative")


@dataclass(frozen=True)
class Frame:
    """T consecutive rounds of recorded events and baseline actions."""

    index: int
    events: tuple[tuple[float, ...], ...]
    baselines: tuple[ActionVector, ...]

    def __post_init__(self):
        if len(self.events) != len(self.baselines):
            raise InvalidInputError("frame events and baselines differ in length")
        if not self.events:
            raise InvalidInputError("frame must contain at least one round")

    @property
    def size(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class LookaheadResult:
    psi: float
    optimizer: tuple[ActionVector, ...]
    gamma_star: tuple[float, ...]
    family: str


def frames_from_path(events: Sequence[Sequence[float]],
                     baselines: Sequence[ActionVector],
                     frame_size: int,
                     num_frames: int | None = None) -> list[Frame]:
    """Partition a recorded (event, baseline) path into consecutive frames."""
    if frame_size < 1:
        raise InvalidInputError("frame size must be positive")
    total = len(events)
    if len(baselines) != total:
        raise InvalidInputError("events and baselines differ in length")
    max_frames = total // frame_size
    k = max_frames if num_frames is None else num_frames
    if k < 1 or k > max_frames:
        raise InvalidInputError(
            f"cannot take {k} frames of size {frame_size} from {total} rounds")
    out = []
    for i in range(k):
        lo, hi = i * frame_size, (i + 1) * frame_size
        out.append(Frame(
            index=i,
            events=tuple(tuple(float(v) for v in row) for row in events[lo:hi]),
            baselines=tuple(tuple(b) for b in baselines[lo:hi]),
        ))
    return out


def _objective(family: str, theta, phi: PhiSpec | None, mean: tuple[float, ...]) -> float:
    if family == "weighted":
        return float(sum(t * g for t, g in zip(theta, mean)))
    return eval_phi(phi, mean)


def _check_objective_args(family: str, theta, phi):
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown lookahead family {family!r}")
    if family == "weighted":
        if theta is None:
            raise InvalidInputError("weighted family requires theta")
    else:
        if phi is None:
            raise InvalidInputError(f"{family} family requires a phi spec")


def _psi_over_slots(slot_utilities: list[list[tuple[float, ...]]],
                    allowed: list[Sequence[int]],
                    baseline_rows: list[tuple[float, ...]],
                    candidates: list[ActionVector],
                    family: str, theta, phi: PhiSpec | None,
                    limit: int | None) -> LookaheadResult:
    t_slots = len(slot_utilities)
    n = len(baseline_rows[0])
    total = math.prod(len(a) for a in allowed)
    cap = guard_limit(limit)
    if total > cap:
        raise EnumerationLimitError(
            f"{total} candidate sequences exceed the guard limit {cap}")

    xsum = [0.0] * n
    for row in baseline_rows:
        for i in range(n):
            xsum[i] += row[i]

    needs_average_dominance = family in ("weighted", "concave")
    best: float | None = None
    best_seq: tuple[int, ...] | None = None
    best_mean: tuple[float, ...] | None = None
    for seq in itertools.product(*allowed):
        sums = [0.0] * n
        for tau, c in enumerate(seq):
            row = slot_utilities[tau][c]
            for i in range(n):
                sums[i] += row[i]
        if needs_average_dominance and any(s < xs for s, xs in zip(sums, xsum)):
            continue
        mean = tuple(s / t_slots for s in sums)
        value = _objective(family, theta, phi, mean)
        if best is None or value > best:
            best = value
            best_seq = seq
            best_mean = mean
    # the all-baseline sequence always survives, so best is never None
    return LookaheadResult(
        psi=best,
        optimizer=tuple(candidates[c] for c in best_seq),
        gamma_star=best_mean,
        family=family,
    )


def psi_frame(frame: Frame, spec: GameSpec, family: str,
              theta: Sequence[float] | None = None,
              phi: PhiSpec | None = None,
              limit: int | None = None) -> LookaheadResult:
    """Exact lookahead value of one frame, by exhaustive search."""
    _check_objective_args(family, theta, phi)
    candidates = enumerate_joint_actions(spec, limit)
    slot_utilities = [
        [evaluate_utilities(spec, a, omega) for a in candidates]
        for omega in frame.events
    ]
    baseline_rows = [
        slot_utilities[tau][spec.joint_index(b)]
        for tau, b in enumerate(frame.baselines)
    ]
    if family == "conservative":
        allowed: list[Sequence[int]] = []
        for tau, xrow in enumerate(baseline_rows):
            feasible = [c for c, row in enumerate(slot_utilities[tau])
                        if all(ui >= xi for ui, xi in zip(row, xrow))]
            allowed.append(feasible)
    else:
        allowed = [range(len(candidates))] * frame.size
    return _psi_over_slots(slot_utilities, allowed, baseline_rows, candidates,
                           family, theta, phi, limit)


def frame_average_psi(frames: Sequence[Frame], spec: GameSpec, family: str,
                      theta: Sequence[float] | None = None,
                      phi: PhiSpec | None = None,
                      limit: int | None = None) -> float:
    """Mean lookahead value over frames.

    Candidate utilities are evaluated once per (candidate, round) across all
    frames, then reused, so long recorded paths stay cheap.
    """
    if not frames:
        raise InvalidInputError("need at least one frame")
    _check_objective_args(family, theta, phi)
    candidates = enumerate_joint_actions(spec, limit)

    all_events = np.array([row for f in frames for row in f.events], dtype=float)
    per_candidate = [spec.utility.evaluate_batch(a, all_events).tolist()
                     for a in candidates]

    values = []
    offset = 0
    for frame in frames:
        t_slots = frame.size
        slot_utilities = [
            [tuple(per_candidate[c][offset + tau]) for c in range(len(candidates))]
            for tau in range(t_slots)
        ]
        baseline_rows = [
            slot_utilities[tau][spec.joint_index(b)]
            for tau, b in enumerate(frame.baselines)
        ]
        if family == "conservative":
            allowed: list[Sequence[int]] = [
                [c for c, row in enumerate(slot_utilities[tau])
                 if all(ui >= xi for ui, xi in zip(row, baseline_rows[tau]))]
                for tau in range(t_slots)
            ]
        else:
            allowed = [range(len(candidates))] * t_slots
        result = _psi_over_slots(slot_utilities, allowed, baseline_rows,
                                 candidates, family, theta, phi, limit)
        values.append(result.psi)
        offset += t_slots
    return math.fsum(values) / len(values)
