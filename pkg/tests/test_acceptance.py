"""Acceptance gate: one test per release criterion, tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Traces for the shipped scenario files are computed once per
session and shared across criteria.
"""

import json
import time
from pathlib import Path

import pytest

from regret_manager import checks
from regret_manager.harness import run_simulation
from regret_manager.manager import constant_b
from regret_manager.randomized import random_scenario_doc
from regret_manager.scenario import (example_scenario_doc, load_scenario,
                                     parse_scenario)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

REPRODUCTION_TARGETS = {
    "example1_noshare": (2.2, 3.6),
    "example1_share": (2.76, 2.6),
    "example2_noshare": (3.0, 3.0),
    "example2_share": (3.6, 3.5),
    "example3_noshare": (3.5, 3.6),
    "example3_share": None,
}
REPRODUCTION_TOLERANCE = 0.02


@pytest.fixture(scope="session")
def shipped():
    """name -> (scenario, trace, elapsed seconds), one run per shipped file."""
    out = {}
    for path in sorted(SCENARIO_DIR.glob("*.json")):
        scenario = load_scenario(path)
        start = time.perf_counter()
        trace = run_simulation(scenario, check_bounds=False)
        out[path.stem] = (scenario, trace, time.perf_counter() - start)
    return out


def test_criterion_1_example_reproduction(shipped):
    """Six canonical configurations at horizon 1e6 match the closed forms."""
    elapsed = 0.0
    lines = []
    for name, expected in REPRODUCTION_TARGETS.items():
        scenario, trace, seconds = shipped[name]
        elapsed += seconds
        assert scenario.horizon == 1_000_000
        got = tuple(float(v) for v in trace.ubar[-1])
        if expected is None:
            lines.append(f"    {name}: ({got[0]:.4f}, {got[1]:.4f}) [report only]")
            continue
        for g, e in zip(got, expected):
            assert abs(g - e) <= REPRODUCTION_TOLERANCE, (
                f"{name}: got {got}, expected {expected} +/- 0.02")
        lines.append(f"    {name}: ({got[0]:.4f}, {got[1]:.4f}) "
                     f"vs ({expected[0]}, {expected[1]})")
    assert elapsed < 60.0, f"reproduction took {elapsed:.1f}s (budget 60s)"
    print(f"\n[criterion 1] PASS six reproductions within +/-0.02 "
          f"({elapsed:.1f}s)")
    for line in lines:
        print(line)


def test_criterion_2_deterministic_bounds(shipped):
    """Per-round guarantees hold on every shipped and 100 fuzzed scenarios."""
    exercised = set()
    failures = []

    def verify(label, scenario, trace):
        results = checks.applicable_checks(trace, scenario.spec, scenario.manager)
        for res in results:
            exercised.add(res.name)
            if not res.ok:
                failures.append(f"{label}: {res.name} slack={res.worst_slack:.3e} "
                                f"{res.detail}")

    for name, (scenario, trace, _) in shipped.items():
        verify(name, scenario, trace)

    piecewise_count = 0
    for index in range(100):
        doc = random_scenario_doc(index)
        if doc["generator"]["kind"] == "piecewise":
            piecewise_count += 1
        scenario = parse_scenario(doc)
        trace = run_simulation(scenario, check_bounds=False)
        verify(f"random[{index}]", scenario, trace)

    assert piecewise_count >= 10, "fuzz batch must include non-stationary paths"
    assert not failures, "bound violations:\n" + "\n".join(failures)
    required = {"queue_regret_bound", "queue_norm_envelope", "weighted_regret_envelope", "joint_norm_envelope", "concave_regret_envelope",
                "objective_proxy_envelope", "proxy_identity", "conservative_per_round"}
    assert required <= exercised, f"checks never exercised: {required - exercised}"
    print(f"\n[criterion 2] PASS {len(shipped)} shipped + 100 randomized "
          f"scenarios ({piecewise_count} non-stationary), checks: "
          f"{', '.join(sorted(required))}")


def test_criterion_3_lookahead_benchmark():
    """Weighted rule stays within T*B/V of the exhaustive benchmark."""
    theta = (1.0, 1.0)
    num_frames = 1000
    slack_by_t = {1: [], 2: []}
    for v in (10.0, 100.0, 1000.0):
        doc = example_scenario_doc(
            "example2", False,
            {"variant": "weighted", "V": v, "theta": list(theta)}, 2000, 41)
        scenario = parse_scenario(doc)
        trace = run_simulation(scenario, check_bounds=False)
        b = constant_b(scenario.spec.utility_caps)
        assert b == 100.0
        for frame_size in (1, 2):
            result = checks.check_weighted_lookahead(trace, scenario.spec, theta, v,
                                                     frame_size,
                                                     num_frames=num_frames)
            assert result.ok, f"V={v} T={frame_size}: {result.detail}"
            # raw gap to the benchmark, without the T*B/V allowance: this is
            # the quantity that improves as V grows
            gap = result.worst_slack - frame_size * b / v
            slack_by_t[frame_size].append((v, result.worst_slack, gap))

    # oracle timing probe: 4 joint actions per slot at T=2
    doc4 = example_scenario_doc(
        "example3", False,
        {"variant": "weighted", "V": 100.0, "theta": list(theta)}, 2000, 43)
    scenario4 = parse_scenario(doc4)
    trace4 = run_simulation(scenario4, check_bounds=False)
    assert scenario4.spec.num_joint_actions == 4
    start = time.perf_counter()
    result4 = checks.check_weighted_lookahead(trace4, scenario4.spec, theta, 100.0, 2)
    oracle_seconds = time.perf_counter() - start
    assert result4.ok
    assert oracle_seconds < 60.0, f"oracle took {oracle_seconds:.1f}s at T=2"

    print(f"\n[criterion 3] PASS lookahead inequality at every (T, V); "
          f"T=2 oracle with 4 joint actions per slot: {oracle_seconds:.2f}s")
    for frame_size, rows in slack_by_t.items():
        trend = " -> ".join(f"V={v:g}: margin {s:+.4f} (gap {g:+.4f})"
                            for v, s, g in rows)
        print(f"    reported, T={frame_size}: {trend}")
        gaps = [g for _, _, g in rows]
        monotone = all(a <= b + 1e-12 for a, b in zip(gaps, gaps[1:]))
        print(f"    benchmark gap improves monotonically in V: {monotone}")


def test_criterion_4_conservative_final_bound(shipped):
    """Round-by-round dominance plus the lookahead bound with D = 50."""
    scenario, trace, _ = shipped["example2_conservative"]
    assert scenario.horizon == 100_000
    assert scenario.manager.v == 1000.0

    per_round = checks.check_conservative_per_round(trace, tol=0.0)
    assert per_round.ok and per_round.worst_slack >= 0.0

    result = checks.check_conservative_final(
        trace, scenario.spec, scenario.manager.phi, v=1000.0, frame_size=1,
        d=50.0)
    assert result.ok, result.detail
    print(f"\n[criterion 4] PASS conservative bound with D=50 "
          f"(margin {result.worst_slack:.4f}); u >= x at all "
          f"{trace.horizon} rounds")


def test_criterion_5_manager_value(shipped):
    """Weighted manager lifts the sum well above the no-share baseline."""
    scenario, trace, _ = shipped["example2_weighted"]
    assert scenario.horizon == 1_000_000
    assert scenario.manager.v == 1000.0

    total = float(trace.ubar[-1].sum())
    baseline_total = float(trace.xbar[-1].sum())
    assert total >= 7.0, f"managed sum {total:.4f} below 7.0"

    _, regret = checks.check_weighted_envelopes(trace, scenario.manager.theta,
                                      scenario.spec.utility_caps,
                                      scenario.manager.v)
    assert regret.ok, "regret envelope violated somewhere on the path"
    print(f"\n[criterion 5] PASS managed sum {total:.4f} >= 7.0 "
          f"(baseline sum {baseline_total:.4f}); per-round regret envelope holds")


def test_criterion_6_bitwise_determinism(tmp_path):
    """Same scenario + seed -> byte-identical trace files, twice over."""
    baseline_doc = json.loads((SCENARIO_DIR / "example1_noshare.json").read_text())
    baseline_doc["horizon"] = 200_000
    pairs = []
    for name, doc in (
        ("baseline", baseline_doc),
        ("managed", example_scenario_doc(
            "example2", False,
            {"variant": "weighted", "V": 1000.0, "theta": [1.0, 1.0]}, 20_000, 7)),
    ):
        files = []
        for attempt in range(2):
            trace = run_simulation(parse_scenario(doc), check_bounds=False)
            path = tmp_path / f"{name}_{attempt}.csv"
            trace.write_csv(path)
            files.append(path.read_bytes())
        assert files[0] == files[1], f"{name}: trace files differ across runs"
        pairs.append((name, len(files[0])))
    print("\n[criterion 6] PASS bitwise-identical traces: "
          + ", ".join(f"{name} ({size} bytes)" for name, size in pairs))
