"""Event-vector generators.

A generator materializes the full event matrix for a horizon up front.  The
sequences are oblivious: they never depend on manager decisions, which is the
regime the deterministic guarantees target.  ``piecewise`` composes other
generators into non-stationary (possibly non-ergodic) schedules by cycling
through its pieces.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError

_PROB_TOL = 1e-9


def _check_probs(probs, path: str):
    if not probs:
        raise InvalidInputError(f"{path}: empty probability list")
    if any(p < 0 for p in probs):
        raise InvalidInputError(f"{path}: negative probability")
    if abs(math.fsum(probs) - 1.0) > _PROB_TOL:
        raise InvalidInputError(f"{path}: probabilities sum to {math.fsum(probs)}, not 1")


class EventGenerator:
    """Interface: an (horizon, event_dim) float matrix from a seeded stream."""

    kind: str = "abstract"

    def __init__(self, seed: int | None = None):
        self.seed = seed

    @property
    def event_dim(self) -> int:
        raise NotImplementedError

    def config(self) -> dict:
        out = self._config()
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def _config(self) -> dict:
        raise NotImplementedError

    def generate(self, horizon: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class IIDGenerator(EventGenerator):
    """Independent draws each round, per-coordinate or joint support tables."""

    kind = "iid"

    def __init__(self, coordinates: list[dict] | None = None,
                 vectors: list[list[float]] | None = None,
                 probs: list[float] | None = None,
                 seed: int | None = None):
        super().__init__(seed)
        if (coordinates is None) == (vectors is None):
            raise InvalidInputError("iid takes either coordinates or vectors, not both")
        if coordinates is not None:
            self.coordinates = []
            for j, table in enumerate(coordinates):
                values = [float(v) for v in table["values"]]
                p = [float(v) for v in table["probs"]]
                if len(values) != len(p) or not values:
                    raise InvalidInputError(
                        f"coordinate {j + 1}: values and probs must align and be non-empty")
                _check_probs(p, f"coordinate {j + 1}")
                self.coordinates.append((values, p))
            self.vectors = None
            self.probs = None
        else:
            self.coordinates = None
            self.vectors = [tuple(float(v) for v in row) for row in vectors]
            if not self.vectors:
                raise InvalidInputError("joint iid support is empty")
            dim = len(self.vectors[0])
            if any(len(row) != dim for row in self.vectors):
                raise InvalidInputError("joint iid support rows differ in length")
            self.probs = [float(p) for p in probs]
            if len(self.probs) != len(self.vectors):
                raise InvalidInputError("joint iid probs must align with vectors")
            _check_probs(self.probs, "joint probs")

    @property
    def event_dim(self) -> int:
        if self.coordinates is not None:
            return len(self.coordinates)
        return len(self.vectors[0])

    def support_values(self) -> list[set[float]]:
        """Per-coordinate value sets; used to derive tight utility caps."""
        if self.coordinates is not None:
            return [set(values) for values, _ in self.coordinates]
        dim = self.event_dim
        return [{row[j] for row in self.vectors} for j in range(dim)]

    def _config(self) -> dict:
        if self.coordinates is not None:
            return {"kind": self.kind,
                    "coordinates": [{"values": list(v), "probs": list(p)}
                                    for v, p in self.coordinates]}
        return {"kind": self.kind,
                "vectors": [list(r) for r in self.vectors],
                "probs": list(self.probs)}

    def generate(self, horizon, rng):
        if self.coordinates is not None:
            cols = [np.asarray(values)[rng.choice(len(values), size=horizon, p=p)]
                    for values, p in self.coordinates]
            if horizon == 0:
                return np.zeros((0, self.event_dim))
            return np.column_stack(cols)
        idx = rng.choice(len(self.vectors), size=horizon, p=self.probs)
        return np.asarray(self.vectors, dtype=float)[idx].reshape(horizon, self.event_dim)


class MarkovGenerator(EventGenerator):
    """Finite-state chain emitting one fixed event vector per state."""

    kind = "markov"

    def __init__(self, states: list[list[float]], transitions: list[list[float]],
                 initial: int = 0, seed: int | None = None):
        super().__init__(seed)
        self.states = [tuple(float(v) for v in row) for row in states]
        if not self.states:
            raise InvalidInputError("markov generator needs at least one state")
        dim = len(self.states[0])
        if any(len(row) != dim for row in self.states):
            raise InvalidInputError("markov state vectors differ in length")
        self.transitions = [[float(p) for p in row] for row in transitions]
        if len(self.transitions) != len(self.states):
            raise InvalidInputError("transition matrix must be square over states")
        for s, row in enumerate(self.transitions):
            if len(row) != len(self.states):
                raise InvalidInputError("transition matrix must be square over states")
            _check_probs(row, f"transitions[{s}]")
        if not (0 <= initial < len(self.states)):
            raise InvalidInputError("initial state out of range")
        self.initial = initial

    @property
    def event_dim(self) -> int:
        return len(self.states[0])

    def support_values(self) -> list[set[float]]:
        dim = self.event_dim
        return [{row[j] for row in self.states} for j in range(dim)]

    def _config(self) -> dict:
        return {"kind": self.kind,
                "states": [list(r) for r in self.states],
                "transitions": [list(r) for r in self.transitions],
                "initial": self.initial}

    def generate(self, horizon, rng):
        cum = np.cumsum(np.asarray(self.transitions, dtype=float), axis=1)
        draws = rng.random(horizon)
        path = np.empty(horizon, dtype=np.int64)
        state = self.initial
        for t in range(horizon):
            path[t] = state
            state = int(np.searchsorted(cum[state], draws[t], side="right"))
            state = min(state, len(self.states) - 1)
        return np.asarray(self.states, dtype=float)[path].reshape(horizon, self.event_dim)


class PiecewiseGenerator(EventGenerator):
    """Cycle through (duration, generator) pieces; deliberately non-stationary."""

    kind = "piecewise"

    def __init__(self, pieces: list[tuple[int, EventGenerator]], seed: int | None = None):
        super().__init__(seed)
        if not pieces:
            raise InvalidInputError("piecewise generator needs at least one piece")
        self.pieces = []
        for i, (duration, gen) in enumerate(pieces):
            if duration < 1:
                raise InvalidInputError(f"piece {i}: duration must be positive")
            self.pieces.append((int(duration), gen))
        dims = {gen.event_dim for _, gen in self.pieces}
        if len(dims) != 1:
            raise InvalidInputError("piecewise pieces must share the event dimension")

    @property
    def event_dim(self) -> int:
        return self.pieces[0][1].event_dim

    def support_values(self) -> list[set[float]]:
        out = [set() for _ in range(self.event_dim)]
        for _, gen in self.pieces:
            for j, values in enumerate(gen.support_values()):
                out[j] |= values
        return out

    def _config(self) -> dict:
        return {"kind": self.kind,
                "pieces": [{"duration": d, "generator": g.config()}
                           for d, g in self.pieces]}

    def generate(self, horizon, rng):
        blocks = []
        produced = 0
        i = 0
        while produced < horizon:
            duration, gen = self.pieces[i % len(self.pieces)]
            take = min(duration, horizon - produced)
            blocks.append(gen.generate(take, rng))
            produced += take
            i += 1
        if not blocks:
            return np.zeros((0, self.event_dim))
        return np.vstack(blocks)


class ScriptedGenerator(EventGenerator):
    """Explicit event sequence; the run must not outlast the script."""

    kind = "scripted"

    def __init__(self, events: list[list[float]], seed: int | None = None):
        super().__init__(seed)
        if not events:
            raise InvalidInputError("scripted generator needs at least one event")
        self.events = [tuple(float(v) for v in row) for row in events]
        dim = len(self.events[0])
        if any(len(row) != dim for row in self.events):
            raise InvalidInputError("scripted events differ in length")

    @property
    def event_dim(self) -> int:
        return len(self.events[0])

    def support_values(self) -> list[set[float]]:
        dim = self.event_dim
        return [{row[j] for row in self.events} for j in range(dim)]

    def _config(self) -> dict:
        return {"kind": self.kind, "events": [list(r) for r in self.events]}

    def generate(self, horizon, rng):
        if horizon > len(self.events):
            raise InvalidInputError(
                f"scripted generator has {len(self.events)} events "
                f"but the horizon is {horizon}")
        return np.asarray(self.events[:horizon], dtype=float).reshape(horizon, self.event_dim)


def generator_from_config(cfg: dict) -> EventGenerator:
    kind = cfg.get("kind")
    seed = cfg.get("seed")
    if kind == "iid":
        if "coordinates" in cfg:
            return IIDGenerator(coordinates=cfg["coordinates"], seed=seed)
        return IIDGenerator(vectors=cfg["vectors"], probs=cfg["probs"], seed=seed)
    if kind == "markov":
        return MarkovGenerator(cfg["states"], cfg["transitions"],
                               cfg.get("initial", 0), seed=seed)
    if kind == "piecewise":
        pieces = [(p["duration"], generator_from_config(p["generator"]))
                  for p in cfg["pieces"]]
        return PiecewiseGenerator(pieces, seed=seed)
    if kind == "scripted":
        return ScriptedGenerator(cfg["events"], seed=seed)
    raise InvalidInputError(f"unknown generator kind {kind!r}")
