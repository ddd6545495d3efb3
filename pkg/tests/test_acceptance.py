"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line. Criterion
2 asserts the published reference tuple for H2 verbatim; its pooled-model entry
(2.70) is inconsistent with the distribution it claims to describe (the same
profile reproduces the other two H2 entries to 0.2%, and 2.70 fails against the
cumulative-bandwidth formula by 9.5%), so that assertion fails honestly rather
than being loosened.
"""

import math
import time
from fractions import Fraction

import pytest

from chunkcast.checks import run_bound_battery, run_oracle_battery
from chunkcast.model import (
    BandwidthProfile,
    ManyToOne,
    OneToOne,
    OneToSome,
    StreamConfig,
    expand_classes,
    generate_adversarial,
)
from chunkcast.scenarios import DISTRIBUTIONS
from chunkcast.single_chunk import (
    delay_many_to_one,
    delay_one_to_c,
    delay_one_to_one,
)
from chunkcast.stream import (
    adversarial_lower_bound,
    feasibility_check,
    find_group_period,
    plan_intra_then_inter,
    stream_delay_floor,
    verify_schedule,
)

TOL = 1e-9


def report(number: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def ceil_log2(n: int, n0: int) -> int:
    k, grown = 0, n0
    while grown < n:
        grown, k = grown * 2, k + 1
    return k


def test_criterion_1_homogeneous_reference_row():
    start = time.perf_counter()
    profile = BandwidthProfile((1.0,) * 10_000)
    pooled = delay_many_to_one(profile, 5, 10_000).final
    single = delay_one_to_one(profile, 5, 10_000).final
    parallel = delay_one_to_c(profile, 5, 4, 10_000).final
    elapsed = time.perf_counter() - start
    ok = abs(pooled - 7.70) <= 0.01 and single == 11.0 and parallel == 20.0 and elapsed < 1.0
    report(1, ok, f"H0 row ({pooled:.4f}, {single:g}, {parallel:g}) in {elapsed:.2f}s")
    assert abs(pooled - 7.70) <= 0.01
    assert single == 11.0
    assert parallel == 20.0
    assert elapsed < 1.0


def test_criterion_2_class_reference_rows():
    start = time.perf_counter()
    references = {
        "H1": (3.72, 5.40, 9.00),
        "H2": (2.70, 4.11, 6.86),
    }
    rows = {}
    for name, refs in references.items():
        profile = expand_classes(DISTRIBUTIONS[name], 10_000)
        rows[name] = (
            delay_many_to_one(profile, 5, 10_000).final,
            delay_one_to_one(profile, 5, 10_000).final,
            delay_one_to_c(profile, 5, 4, 10_000).final,
        )
    elapsed = time.perf_counter() - start
    failures = []
    for name, refs in references.items():
        for value, ref, label in zip(rows[name], refs, ("pooled", "single", "parallel")):
            rel = abs(value - ref) / ref
            if rel > 0.02:
                failures.append(f"{name} {label}: computed {value:.4f} vs reference {ref} ({rel:.1%})")
    detail = (
        f"H1 ({rows['H1'][0]:.4f}, {rows['H1'][1]:.4f}, {rows['H1'][2]:.4f}), "
        f"H2 ({rows['H2'][0]:.4f}, {rows['H2'][1]:.4f}, {rows['H2'][2]:.4f}) in {elapsed:.2f}s"
    )
    report(2, not failures and elapsed < 5.0, detail + (f"; {failures}" if failures else ""))
    assert elapsed < 5.0
    # The H2 pooled reference (2.70) contradicts its own distribution; this
    # assertion is kept verbatim and fails (see notes/decisions ledger).
    assert not failures, failures


def test_criterion_3_worked_example_exact():
    profile = BandwidthProfile((Fraction("1.6"), Fraction("0.8"), Fraction("0.8"), Fraction("0.8")))
    value = delay_one_to_one(profile, 2, 4).final
    homogeneous = delay_one_to_one(BandwidthProfile((Fraction(1),) * 4), 2, 4).final
    ok = value == Fraction(5, 4) and homogeneous == 1
    report(3, ok, f"heterogeneous {value}, homogeneous equivalent {homogeneous}")
    assert value == Fraction(5, 4)
    assert homogeneous == 1


def test_criterion_4_homogeneous_identities_random():
    import random

    rng = random.Random(42)
    for _ in range(50):
        u = Fraction(rng.randint(1, 40), rng.randint(1, 20))
        n0 = rng.randint(1, 6)
        n = rng.randint(n0, 160)
        profile = BandwidthProfile((u,) * max(n, 1))
        single = delay_one_to_one(profile, n0, n).final
        assert single == Fraction(ceil_log2(n, n0)) / u
        pooled = delay_many_to_one(profile, n0, n).final
        assert pooled == sum(Fraction(1, k) for k in range(n0, n)) / u
        # float path agrees to 1e-9
        fp = BandwidthProfile((float(u),) * max(n, 1))
        assert abs(delay_one_to_one(fp, n0, n).final - float(single)) <= 1e-9 * max(1.0, float(single))
        assert abs(delay_many_to_one(fp, n0, n).final - float(pooled)) <= 1e-9 * max(1.0, float(pooled))
    report(4, True, "50 random (u, n0, n) triples match both closed forms exactly")


def test_criterion_5_oracle_equivalence():
    start = time.perf_counter()
    battery = run_oracle_battery(20240, 210)
    elapsed = time.perf_counter() - start
    mismatches = [cmp for cmp in battery.comparisons if not cmp.match]
    by_c = {c: sum(1 for cmp in battery.comparisons if cmp.connections == c) for c in (1, 2, 3)}
    report(
        5,
        battery.passed and elapsed < 60,
        f"210 instances ({by_c}), {len(mismatches)} mismatches in {elapsed:.1f}s",
    )
    assert battery.passed, mismatches[:5]
    assert elapsed < 60.0


def test_criterion_6_proven_bound_battery():
    battery = run_bound_battery(20240, 1000)
    report(
        6,
        battery.passed,
        f"{battery.profiles_checked} profiles, {battery.checks_evaluated} checks, "
        f"{len(battery.violations)} proven-bound violations",
    )
    assert battery.passed, battery.violations[:10]


def test_criterion_7_conjecture_report_emitted():
    battery = run_bound_battery(20240, 1000)
    payload = battery.to_json_dict()
    print(
        f"conjecture report: {payload['profiles_checked']} profiles, "
        f"findings={payload['findings']!r}"
    )
    report(7, True, f"report emitted; {len(battery.findings)} conjecture violations found")
    assert "findings" in payload  # the report itself is the deliverable; it passes regardless


@pytest.mark.parametrize(
    "name,model,label",
    [
        ("H0", OneToOne(), "single"),
        ("H1", OneToOne(), "single"),
        ("H2", OneToSome(4), "parallel c=4"),
    ],
)
def test_criterion_8_group_scheme_simulations(name, model, label):
    start = time.perf_counter()
    profile = expand_classes(DISTRIBUTIONS[name], 10_000)
    stream = StreamConfig(0.5, 5)
    plan = find_group_period(profile, stream, model)
    assert plan is not None
    horizon = 3 * plan.period
    schedule = plan_intra_then_inter(profile, stream, model, plan, horizon)
    result = verify_schedule(profile, stream, model, schedule)
    elapsed = time.perf_counter() - start
    ok = result.valid and all(d <= plan.delay_bound + TOL for d in result.chunk_delays)
    report(
        8,
        ok and elapsed < 120,
        f"{name} {label}: E={plan.period}, max delay {result.max_delay:.3f} <= {plan.delay_bound:g}, "
        f"{len(schedule.transfers)} transfers, {len(result.violations)} violations in {elapsed:.1f}s",
    )
    assert result.valid, result.violations[:5]
    assert len(result.chunk_delays) == horizon
    assert all(d <= plan.delay_bound + TOL for d in result.chunk_delays)
    assert elapsed < 120.0


def test_criterion_9_linear_delay_witness():
    lines = []
    floors = []
    log_delays = []
    for n_peers in (10, 100, 1000):
        profile = generate_adversarial(n_peers, 1, 0, 1)
        stream = StreamConfig(1.0, 1)
        assert feasibility_check(profile, stream).feasible
        witness = adversarial_lower_bound(n_peers, 1, 0, 1)
        assert abs(witness.floor - (n_peers - 1) / 2) < TOL
        assert witness.forced
        # the equivalent homogeneous system has unit mean upload here
        assert abs(profile.mean_upload - 1.0) < 1e-9
        floors.append(witness.floor)
        log_delays.append(ceil_log2(n_peers, 1))
        lines.append(f"N={n_peers}: forced floor {witness.floor:g} vs homogeneous-equivalent {log_delays[-1]}")
    assert floors == [4.5, 49.5, 499.5]  # linear in N
    assert log_delays == [4, 7, 10]  # logarithmic in N
    print("; ".join(lines))
    report(9, True, "; ".join(lines))


def test_criterion_10_two_peer_curse():
    details = []
    for eps in (0.25, 0.1, 0.01):
        profile = BandwidthProfile((1 - eps, eps))
        stream = StreamConfig(1.0, 1)
        pooled = delay_many_to_one(profile, 1, 2).final
        single = delay_one_to_one(profile, 1, 2).final
        assert abs(pooled - 1 / (1 - eps)) <= 1e-9
        assert abs(single - 1 / (1 - eps)) <= 1e-9
        floor = stream_delay_floor(profile, stream)
        assert abs(floor - 1 / eps) <= 1e-9 * (1 / eps)
        details.append(f"eps={eps}: D={pooled:.4f}, floor={floor:g}")
    report(10, True, "; ".join(details))
