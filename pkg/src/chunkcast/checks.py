"""Seeded verification batteries: proven bounds, conjecture findings, oracle equivalence.

Proven inequalities must hold on every generated instance; a failure there is a
bug. The conjectured bounds are only reported: the battery records any
violation as a finding and leaves judgement to the caller.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .model import (
    BandwidthProfile,
    DomainError,
    OneToOne,
    OneToSome,
    RANDOM_FAMILIES,
    random_profile,
)
from .oracle import exhaustive_min_delay
from .single_chunk import (
    CONJECTURE_CHECKS,
    REQUIRED_CHECKS,
    evaluate_bounds,
    greedy_delay_values,
)


@dataclass(frozen=True, slots=True)
class BoundBatteryReport:
    seed: int
    profiles_checked: int
    checks_evaluated: int
    violations: tuple[str, ...]  # failed proven inequalities (should be empty)
    findings: tuple[str, ...]  # failed conjectured inequalities (reported only)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "profiles_checked": self.profiles_checked,
            "checks_evaluated": self.checks_evaluated,
            "violations": list(self.violations),
            "findings": list(self.findings),
            "passed": self.passed,
        }


def run_bound_battery(
    seed: int,
    count: int = 1000,
    max_peers: int = 48,
    connection_choices: tuple[int, ...] = (2, 3, 4),
) -> BoundBatteryReport:
    """Evaluate every stated bound at every n on ``count`` random profiles."""
    rng = random.Random(seed)
    violations: list[str] = []
    findings: list[str] = []
    evaluated = 0
    for idx in range(count):
        family = RANDOM_FAMILIES[idx % len(RANDOM_FAMILIES)]
        n_peers = rng.randint(2, max_peers)
        profile = random_profile(family, n_peers, rng)
        n0 = rng.randint(1, min(4, n_peers))
        c = connection_choices[idx % len(connection_choices)]
        n_max = n_peers + (rng.randint(1, 5) if idx % 10 == 0 else 0)
        report = evaluate_bounds(profile, n0, c, n_max)
        evaluated += sum(len(rec.checks) for rec in report.records)
        for n, name in report.failures(REQUIRED_CHECKS):
            violations.append(f"profile #{idx} ({family}, N={n_peers}, n0={n0}, c={c}): {name} at n={n}")
        for n, name in report.failures(CONJECTURE_CHECKS):
            findings.append(f"profile #{idx} ({family}, N={n_peers}, n0={n0}, c={c}): {name} at n={n}")
    return BoundBatteryReport(seed, count, evaluated, tuple(violations), tuple(findings))


@dataclass(frozen=True, slots=True)
class OracleComparison:
    uploads: tuple[str, ...]
    n0: int
    n: int
    connections: int
    algorithm: str  # exact value, as a fraction string
    oracle: str
    match: bool


@dataclass(frozen=True, slots=True)
class OracleBatteryReport:
    seed: int
    comparisons: tuple[OracleComparison, ...]

    @property
    def passed(self) -> bool:
        return all(cmp.match for cmp in self.comparisons)

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": len(self.comparisons),
            "mismatches": [asdict(cmp) for cmp in self.comparisons if not cmp.match],
            "passed": self.passed,
        }


def random_rational_instance(rng: random.Random, max_peers: int = 5):
    """Small random instance with rational uploads (occasionally zero tails)."""
    n_peers = rng.randint(2, max_peers)
    uploads = []
    for _ in range(n_peers):
        if rng.random() < 0.15:
            uploads.append(Fraction(0))
        else:
            uploads.append(Fraction(rng.randint(1, 8), rng.randint(1, 8)))
    if all(u == 0 for u in uploads):
        uploads[0] = Fraction(1)
    profile = BandwidthProfile.from_unsorted(uploads)
    n = rng.randint(1, n_peers)
    n0 = rng.randint(1, n)
    return profile, n0, n


def compare_with_oracle(profile: BandwidthProfile, n0: int, n: int, c: int) -> OracleComparison:
    exact = profile.as_fractions()
    algorithm = greedy_delay_values(exact.uploads, n0, c, n)[n - 1]
    model = OneToOne() if c == 1 else OneToSome(c)
    oracle = exhaustive_min_delay(profile, n0, n, model)
    return OracleComparison(
        tuple(str(u) for u in exact.uploads),
        n0,
        n,
        c,
        str(Fraction(algorithm)),
        str(oracle),
        algorithm == oracle,
    )


def run_oracle_battery(seed: int, count: int = 200) -> OracleBatteryReport:
    """Compare the greedy curves against the exhaustive oracle, exactly."""
    rng = random.Random(seed)
    comparisons = []
    for idx in range(count):
        profile, n0, n = random_rational_instance(rng)
        c = (1, 2, 3)[idx % 3]
        comparisons.append(compare_with_oracle(profile, n0, n, c))
    return OracleBatteryReport(seed, tuple(comparisons))


def oracle_table_from_instances(instances: list[dict]) -> OracleBatteryReport:
    """Per-instance comparisons for externally supplied tiny instances.

    Each instance dict needs ``uploads`` (numbers or fraction strings), ``n0``,
    ``n``, and optionally ``c`` (default 1).
    """
    comparisons = []
    for inst in instances:
        try:
            uploads = [Fraction(str(u)) for u in inst["uploads"]]
            profile = BandwidthProfile.from_unsorted(uploads)
            comparisons.append(
                compare_with_oracle(profile, int(inst["n0"]), int(inst["n"]), int(inst.get("c", 1)))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"bad oracle instance {inst!r}: {exc}") from exc
    return OracleBatteryReport(0, tuple(comparisons))
