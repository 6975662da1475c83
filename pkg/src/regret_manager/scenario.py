"""Scenario document schema: strict parsing, canonical serialization.

A scenario file is JSON with exactly these top-level fields:

    game       location | table | example game definition
    generator  event generator config, or "canonical" with an example game
    baselines  list of per-player policy configs, or "canonical" with an example game
    manager    decision-rule config, or null to force suggestions = baselines
    horizon    non-negative integer
    seed       integer
    outputs    optional {"trace": path, "summary": path}

Unknown fields are rejected everywhere, with the offending path in the error.
The canonical form of a document is key-sorted compact JSON of the validated
content (the "canonical" shorthands are preserved, not expanded), so a parsed and
re-serialized file is byte-identical modulo key order.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ScenarioError
from .game import GameSpec, TableUtility
from .generators import EventGenerator, generator_from_config
from .harness import Scenario
from .location_game import make_example, make_location_game
from .manager import ManagerConfig
from .phi import PHI_KINDS, phi_from_config
from .policies import policy_from_config
from .trace import canonical_json

_TOP_KEYS = {"game", "generator", "baselines", "manager", "horizon", "seed", "outputs"}
_REQUIRED = {"game", "generator", "baselines", "manager", "horizon", "seed"}


def _reject_unknown(doc: dict, allowed: set[str], path: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}", "unknown field")


def _require(doc: dict, keys: set[str], path: str):
    for key in sorted(keys):
        if key not in doc:
            raise ScenarioError(f"{path}.{key}", "missing required field")


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScenarioError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(path, f"must be >= {minimum}")
    return value


def _as_number(value, path: str, minimum: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(path, f"must be >= {minimum}")
    return float(value)


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, f"expected a list, got {type(value).__name__}")
    return value


def _int_list(value, path: str) -> list[int]:
    return [_as_int(v, f"{path}[{k}]") for k, v in enumerate(_as_list(value, path))]


def _number_list(value, path: str) -> list[float]:
    return [_as_number(v, f"{path}[{k}]") for k, v in enumerate(_as_list(value, path))]


def _parse_game(doc, path: str):
    """Returns (GameSpec or example handle, is_example)."""
    if not isinstance(doc, dict):
        raise ScenarioError(path, "expected an object")
    kind = doc.get("type")
    if kind == "location":
        _reject_unknown(doc, {"type", "num_locations", "allowed", "known", "caps"}, path)
        _require(doc, {"num_locations", "allowed", "known", "caps"}, path)
        m = _as_int(doc["num_locations"], f"{path}.num_locations", 1)
        allowed = [_int_list(a, f"{path}.allowed[{i}]")
                   for i, a in enumerate(_as_list(doc["allowed"], f"{path}.allowed"))]
        known = [_int_list(s, f"{path}.known[{i}]")
                 for i, s in enumerate(_as_list(doc["known"], f"{path}.known"))]
        caps = _number_list(doc["caps"], f"{path}.caps")
        try:
            return make_location_game(m, allowed, known, caps), None
        except Exception as exc:
            raise ScenarioError(path, str(exc)) from exc
    if kind == "table":
        _reject_unknown(doc, {"type", "action_sets", "omega_support", "values",
                              "observation_sets", "caps"}, path)
        _require(doc, {"action_sets", "omega_support", "values",
                       "observation_sets", "caps"}, path)
        try:
            utility = TableUtility(doc["action_sets"], doc["omega_support"], doc["values"])
            return GameSpec(
                num_players=len(doc["action_sets"]),
                event_dim=len(doc["omega_support"][0]),
                observation_sets=tuple(frozenset(_int_list(s, f"{path}.observation_sets[{i}]"))
                                       for i, s in enumerate(doc["observation_sets"])),
                action_sets=utility.action_sets,
                utility=utility,
                utility_caps=tuple(_number_list(doc["caps"], f"{path}.caps")),
            ), None
        except ScenarioError:
            raise
        except Exception as exc:
            raise ScenarioError(path, str(exc)) from exc
    if kind == "example":
        _reject_unknown(doc, {"type", "id", "share"}, path)
        _require(doc, {"id"}, path)
        share = doc.get("share", False)
        if not isinstance(share, bool):
            raise ScenarioError(f"{path}.share", "expected a boolean")
        try:
            example = make_example(doc["id"])
        except Exception as exc:
            raise ScenarioError(f"{path}.id", str(exc)) from exc
        return example.spec_for("share" if share else "no_share"), (example, share)
    raise ScenarioError(f"{path}.type", f"expected location|table|example, got {kind!r}")


_GENERATOR_KEYS = {
    "iid": {"kind", "coordinates", "vectors", "probs", "seed"},
    "markov": {"kind", "states", "transitions", "initial", "seed"},
    "piecewise": {"kind", "pieces", "seed"},
    "scripted": {"kind", "events", "seed"},
}


def _validate_generator_doc(doc, path: str):
    if not isinstance(doc, dict):
        raise ScenarioError(path, "expected an object")
    kind = doc.get("kind")
    if kind not in _GENERATOR_KEYS:
        raise ScenarioError(f"{path}.kind",
                            f"expected one of {sorted(_GENERATOR_KEYS)}, got {kind!r}")
    _reject_unknown(doc, _GENERATOR_KEYS[kind], path)
    if kind == "piecewise":
        pieces = _as_list(doc.get("pieces"), f"{path}.pieces")
        for i, piece in enumerate(pieces):
            if not isinstance(piece, dict):
                raise ScenarioError(f"{path}.pieces[{i}]", "expected an object")
            _reject_unknown(piece, {"duration", "generator"}, f"{path}.pieces[{i}]")
            _require(piece, {"duration", "generator"}, f"{path}.pieces[{i}]")
            _as_int(piece["duration"], f"{path}.pieces[{i}].duration", 1)
            _validate_generator_doc(piece["generator"], f"{path}.pieces[{i}].generator")


def _parse_generator(doc, path: str, example) -> EventGenerator:
    if doc == "canonical":
        if example is None:
            raise ScenarioError(path, '"canonical" shorthand requires an example game')
        return generator_from_config(example[0].generator_config)
    _validate_generator_doc(doc, path)
    try:
        return generator_from_config(doc)
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError(path, str(exc)) from exc


_POLICY_KEYS = {
    "constant": {"kind", "action"},
    "scripted": {"kind", "actions"},
    "random": {"kind"},
    "threshold": {"kind", "watch", "threshold", "if_ge", "else"},
    "greedy_observed": {"kind", "default_value", "assumed_split"},
}


def _parse_baselines(doc, path: str, example, num_players: int):
    if doc == "canonical":
        if example is None:
            raise ScenarioError(path, '"canonical" shorthand requires an example game')
        ex, share = example
        return ex.policies["share" if share else "no_share"]
    entries = _as_list(doc, path)
    if len(entries) != num_players:
        raise ScenarioError(path, f"need {num_players} policies, got {len(entries)}")
    policies = []
    for i, cfg in enumerate(entries):
        sub = f"{path}[{i}]"
        if not isinstance(cfg, dict):
            raise ScenarioError(sub, "expected an object")
        kind = cfg.get("kind")
        if kind not in _POLICY_KEYS:
            raise ScenarioError(f"{sub}.kind",
                                f"expected one of {sorted(_POLICY_KEYS)}, got {kind!r}")
        _reject_unknown(cfg, _POLICY_KEYS[kind], sub)
        try:
            policies.append(policy_from_config(cfg))
        except KeyError as exc:
            raise ScenarioError(sub, f"missing field {exc.args[0]!r}") from exc
        except Exception as exc:
            raise ScenarioError(sub, str(exc)) from exc
    return tuple(policies)


_MANAGER_KEYS = {
    "weighted": {"variant", "V", "theta"},
    "concave": {"variant", "V", "phi"},
    "conservative_linear": {"variant", "theta"},
    "conservative_concave": {"variant", "V", "phi"},
}


def _parse_manager(doc, path: str, spec: GameSpec) -> ManagerConfig | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ScenarioError(path, "expected an object or null")
    variant = doc.get("variant")
    if variant not in _MANAGER_KEYS:
        raise ScenarioError(f"{path}.variant",
                            f"expected one of {sorted(_MANAGER_KEYS)}, got {variant!r}")
    _reject_unknown(doc, _MANAGER_KEYS[variant], path)
    _require(doc, _MANAGER_KEYS[variant], path)
    v = _as_number(doc["V"], f"{path}.V", 0.0) if "V" in doc else 0.0
    theta = tuple(_number_list(doc["theta"], f"{path}.theta")) if "theta" in doc else None
    phi = None
    if "phi" in doc:
        phi_doc = doc["phi"]
        if not isinstance(phi_doc, dict):
            raise ScenarioError(f"{path}.phi", "expected an object")
        kind = phi_doc.get("kind")
        if kind not in PHI_KINDS:
            raise ScenarioError(f"{path}.phi.kind",
                                f"expected one of {sorted(PHI_KINDS)}, got {kind!r}")
        _reject_unknown(phi_doc, {"kind", "theta", "delta"}, f"{path}.phi")
        try:
            phi = phi_from_config(phi_doc, spec.utility_caps)
        except Exception as exc:
            raise ScenarioError(f"{path}.phi", str(exc)) from exc
    try:
        config = ManagerConfig(variant=variant, v=v, theta=theta, phi=phi)
        from .manager import validate_config_for_game
        validate_config_for_game(config, spec)
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError(path, str(exc)) from exc
    return config


def parse_scenario(doc: dict, horizon_override: int | None = None,
                   seed_override: int | None = None) -> Scenario:
    """Validate a scenario document and build the runnable Scenario.

    Overrides replace the document's horizon/seed before canonicalization, so
    the trace fingerprint always reflects what actually ran.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    doc = dict(doc)
    if horizon_override is not None:
        doc["horizon"] = horizon_override
    if seed_override is not None:
        doc["seed"] = seed_override
    _reject_unknown(doc, _TOP_KEYS, "$")
    _require(doc, _REQUIRED, "$")

    spec, example = _parse_game(doc["game"], "game")
    generator = _parse_generator(doc["generator"], "generator", example)
    policies = _parse_baselines(doc["baselines"], "baselines", example, spec.num_players)
    manager = _parse_manager(doc["manager"], "manager", spec)
    horizon = _as_int(doc["horizon"], "horizon", 0)
    seed = _as_int(doc["seed"], "seed")
    if "outputs" in doc:
        outputs = doc["outputs"]
        if not isinstance(outputs, dict):
            raise ScenarioError("outputs", "expected an object")
        _reject_unknown(outputs, {"trace", "summary"}, "outputs")
        for key, value in outputs.items():
            if not isinstance(value, str):
                raise ScenarioError(f"outputs.{key}", "expected a path string")

    if generator.event_dim != spec.event_dim:
        raise ScenarioError("generator", f"emits {generator.event_dim}-dim events "
                                         f"for a {spec.event_dim}-dim game")
    try:
        return Scenario(spec=spec, generator=generator, policies=policies,
                        manager=manager, horizon=horizon, seed=seed, config=doc)
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError("$", str(exc)) from exc


def load_scenario(path: str | Path, horizon_override: int | None = None,
                  seed_override: int | None = None) -> Scenario:
    p = Path(path)
    if not p.exists():
        raise ScenarioError("$", f"scenario file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"invalid JSON: {exc}") from exc
    return parse_scenario(doc, horizon_override, seed_override)


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical document: key-sorted compact JSON."""
    return canonical_json(scenario.config)


def example_scenario_doc(example_id: str, share: bool, manager: dict | None,
                         horizon: int, seed: int) -> dict:
    """Document for one canonical instance with its hand-derived strategies."""
    return {
        "game": {"type": "example", "id": example_id, "share": share},
        "generator": "canonical",
        "baselines": "canonical",
        "manager": copy.deepcopy(manager),
        "horizon": horizon,
        "seed": seed,
    }


def grid_demo_doc(horizon: int = 300, seed: int = 11) -> dict:
    from .location_game import make_grid_demo

    spec, generator_config = make_grid_demo()
    return {
        "game": {
            "type": "location",
            "num_locations": spec.event_dim,
            "allowed": [list(a) for a in spec.action_sets],
            "known": [sorted(s) for s in spec.observation_sets],
            "caps": list(spec.utility_caps),
        },
        "generator": generator_config,
        "baselines": [{"kind": "greedy_observed", "default_value": 1.9}
                      for _ in range(spec.num_players)],
        "manager": {"variant": "weighted", "V": 100.0, "theta": [1.0, 1.0, 1.0]},
        "horizon": horizon,
        "seed": seed,
    }
