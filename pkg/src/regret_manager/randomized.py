"""Randomized small-scenario generation for property verification.

Builds scenario *documents* (not objects), so every fuzzed case also passes
through the schema validator.  Games are tiny (2-3 players, at most a few
dozen joint actions), horizons short, and generators deliberately include
non-stationary piecewise schedules: the deterministic guarantees must hold on
each such path, round by round.
"""

from __future__ import annotations

import numpy as np

_VALUE_POOL = (0.0, 0.5, 1.0, 2.2, 3.0, 5.0, 10.0)
_POSITIVE_POOL = tuple(v for v in _VALUE_POOL if v > 0)


def _probs(rng: np.random.Generator, k: int) -> list[float]:
    raw = rng.dirichlet(np.ones(k))
    # exact unit sum: peg the last entry to the remainder
    probs = [float(round(p, 6)) for p in raw[:-1]]
    probs.append(float(1.0 - sum(probs)))
    return probs


def _coordinate_table(rng: np.random.Generator) -> dict:
    k = int(rng.integers(1, 4))
    values = sorted(rng.choice(_POSITIVE_POOL, size=k, replace=False).tolist())
    if rng.random() < 0.4:
        values = [0.0] + values
    return {"values": values, "probs": _probs(rng, len(values))}


def _iid_doc(rng: np.random.Generator, dim: int) -> dict:
    if dim > 1 and rng.random() < 0.3:
        k = int(rng.integers(2, 5))
        vectors = [[float(rng.choice(_POSITIVE_POOL)) for _ in range(dim)]
                   for _ in range(k)]
        return {"kind": "iid", "vectors": vectors, "probs": _probs(rng, k)}
    return {"kind": "iid", "coordinates": [_coordinate_table(rng) for _ in range(dim)]}


def _markov_doc(rng: np.random.Generator, dim: int) -> dict:
    k = int(rng.integers(2, 4))
    states = [[float(rng.choice(_POSITIVE_POOL)) for _ in range(dim)] for _ in range(k)]
    transitions = [_probs(rng, k) for _ in range(k)]
    return {"kind": "markov", "states": states, "transitions": transitions,
            "initial": int(rng.integers(0, k))}


def _scripted_doc(rng: np.random.Generator, dim: int, horizon: int) -> dict:
    events = [[float(rng.choice(_VALUE_POOL[1:])) for _ in range(dim)]
              for _ in range(horizon)]
    return {"kind": "scripted", "events": events}


def _generator_doc(rng: np.random.Generator, dim: int, horizon: int) -> dict:
    roll = rng.random()
    if roll < 0.35:
        # non-stationary schedule cycling two different regimes
        pieces = [
            {"duration": int(rng.integers(5, 40)), "generator": _iid_doc(rng, dim)},
            {"duration": int(rng.integers(5, 40)),
             "generator": _markov_doc(rng, dim) if rng.random() < 0.5
             else _iid_doc(rng, dim)},
        ]
        return {"kind": "piecewise", "pieces": pieces}
    if roll < 0.55:
        return _markov_doc(rng, dim)
    if roll < 0.65:
        return _scripted_doc(rng, dim, horizon)
    return _iid_doc(rng, dim)


def _policy_doc(rng: np.random.Generator, allowed: list[int],
                known: list[int], horizon: int) -> dict:
    roll = rng.random()
    if roll < 0.3:
        return {"kind": "constant", "action": int(rng.choice(allowed))}
    if roll < 0.5:
        return {"kind": "random"}
    if roll < 0.7 and known:
        hi, lo = (int(rng.choice(allowed)), int(rng.choice(allowed)))
        return {"kind": "threshold", "watch": int(rng.choice(known)),
                "threshold": float(rng.choice((1.0, 2.2, 5.0))),
                "if_ge": hi, "else": lo}
    if roll < 0.85:
        return {"kind": "greedy_observed",
                "default_value": float(rng.choice((0.5, 1.0, 2.0)))}
    return {"kind": "scripted",
            "actions": [int(rng.choice(allowed)) for _ in range(horizon)]}


def _manager_doc(rng: np.random.Generator, n: int, index: int) -> dict | None:
    variant = ("weighted", "concave", "conservative_linear",
               "conservative_concave", None)[index % 5]
    if variant is None:
        return None
    v = float(rng.choice((0.0, 1.0, 10.0, 100.0)))
    if variant == "weighted":
        theta = [float(round(rng.uniform(-1.0, 2.0), 3)) for _ in range(n)]
        return {"variant": variant, "V": v, "theta": theta}
    if variant == "conservative_linear":
        theta = [float(round(rng.uniform(-1.0, 2.0), 3)) for _ in range(n)]
        return {"variant": variant, "theta": theta}
    kind = ("weighted_sum", "log_offset", "min_utility")[index % 3]
    phi: dict = {"kind": kind}
    if kind != "min_utility":
        phi["theta"] = [float(round(rng.uniform(0.1, 2.0), 3)) for _ in range(n)]
    if kind == "log_offset":
        phi["delta"] = float(rng.choice((0.5, 1.0, 2.0)))
    return {"variant": variant, "V": v, "phi": phi}


def random_scenario_doc(index: int, base_seed: int = 90_000) -> dict:
    """Deterministic fuzzed scenario: same (index, base_seed) -> same document."""
    rng = np.random.default_rng([base_seed, index])
    n = int(rng.integers(2, 4))
    dim = int(rng.integers(1, 4))
    horizon = int(rng.integers(120, 350))

    known = [sorted(int(j) for j in
                    rng.choice(np.arange(1, dim + 1),
                               size=int(rng.integers(1, dim + 1)),
                               replace=False))
             for _ in range(n)]
    # each coordinate must be observed by somebody
    for j in range(1, dim + 1):
        if not any(j in s for s in known):
            seat = int(rng.integers(0, n))
            known[seat] = sorted(set(known[seat]) | {j})

    allowed = [sorted(int(a) for a in
                      rng.choice(np.arange(1, dim + 1),
                                 size=int(rng.integers(1, dim + 1)),
                                 replace=False))
               for _ in range(n)]

    generator = _generator_doc(rng, dim, horizon)
    cap = max(_VALUE_POOL)
    game = {"type": "location", "num_locations": dim, "allowed": allowed,
            "known": known, "caps": [cap] * n}
    baselines = [_policy_doc(rng, allowed[i], known[i], horizon) for i in range(n)]
    return {
        "game": game,
        "generator": generator,
        "baselines": baselines,
        "manager": _manager_doc(rng, n, index),
        "horizon": horizon,
        "seed": int(rng.integers(0, 2**31)),
    }
