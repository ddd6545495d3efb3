"""System description: peers, upload capacities, collaboration models, stream parameters.

Everything here is an immutable value object or a pure function, so instances can
be shared freely across threads. Upload capacities are expressed in chunks per
second. Profiles keep peers sorted by non-increasing upload; peer indices used
throughout the package are 1-based ranks into that order.

Capacities may be ``float`` or ``fractions.Fraction``; all derived quantities
keep the numeric type of their inputs, which is what makes the exact-arithmetic
verification paths possible.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path


class DomainError(ValueError):
    """An operation was called outside its documented domain."""


class InfeasibleError(DomainError):
    """A stream-level operation requires a feasible system and got none."""


TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class BandwidthProfile:
    """Upload capacities of the N peers, sorted non-increasing.

    Invariants: ``uploads[0] >= uploads[1] >= ... >= uploads[-1] >= 0`` and
    ``uploads[0] > 0`` (the system has some upload capacity).
    """

    uploads: tuple

    def __post_init__(self) -> None:
        if len(self.uploads) < 1:
            raise DomainError("profile needs at least one peer")
        if any(u < 0 for u in self.uploads):
            raise DomainError("upload capacities must be non-negative")
        if any(a < b for a, b in itertools.pairwise(self.uploads)):
            raise DomainError("uploads must be sorted non-increasing")
        if not self.uploads[0] > 0:
            raise DomainError("the best peer must have positive upload")

    @classmethod
    def from_unsorted(cls, uploads) -> "BandwidthProfile":
        return cls(tuple(sorted(uploads, reverse=True)))

    @property
    def size(self) -> int:
        return len(self.uploads)

    @property
    def total_upload(self):
        return sum(self.uploads)

    @property
    def mean_upload(self):
        return self.total_upload / self.size

    @property
    def max_upload(self):
        return self.uploads[0]

    def min_positive_upload(self):
        """Smallest strictly positive upload (u_1 > 0 guarantees one exists)."""
        return min(u for u in self.uploads if u > 0)

    def upload(self, i: int):
        """Upload of peer ``i`` (1-based rank)."""
        if not 1 <= i <= self.size:
            raise DomainError(f"peer index {i} outside 1..{self.size}")
        return self.uploads[i - 1]

    def cumulative_prefix(self) -> tuple:
        """Cumulative uploads of the k best peers, for k = 1..N."""
        return tuple(itertools.accumulate(self.uploads))

    def as_fractions(self) -> "BandwidthProfile":
        """Exact-rational copy; floats are read as their decimal repr."""
        return BandwidthProfile(tuple(_to_fraction(u) for u in self.uploads))


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    # Interpret floats by their shortest decimal repr, not their binary expansion.
    return Fraction(str(value))


def cumulative_bandwidth(profile: BandwidthProfile, k: int):
    """Total upload of the k best peers, U_k."""
    if not 1 <= k <= profile.size:
        raise DomainError(f"k={k} outside 1..{profile.size}")
    return sum(profile.uploads[:k])


@dataclass(frozen=True, slots=True)
class ClassSpec:
    """Peer population described as bandwidth classes.

    ``classes`` is a sequence of ``(size, upload)`` pairs with strictly
    decreasing uploads. Integer sizes are head counts; float or Fraction sizes
    are fractions of the total population N (and must then sum to 1 within
    1e-9), so ``1.0`` means the whole population while ``1`` means one peer.
    """

    classes: tuple

    def __post_init__(self) -> None:
        if not self.classes:
            raise DomainError("at least one class required")
        uploads = [u for _, u in self.classes]
        if any(a <= b for a, b in itertools.pairwise(uploads)):
            raise DomainError("class uploads must be strictly decreasing")
        sizes = [s for s, _ in self.classes]
        if any(s <= 0 for s in sizes):
            raise DomainError("class sizes must be positive")
        kinds = {isinstance(s, int) for s in sizes}
        if len(kinds) > 1:
            raise DomainError("class sizes must be all counts or all fractions")
        if self.fractional:
            if any(s > 1 for s in sizes):
                raise DomainError("fractional class sizes must be at most 1")
            if abs(sum(sizes) - 1) > TOLERANCE:
                raise DomainError("fractional class sizes must sum to 1")

    @property
    def fractional(self) -> bool:
        return not isinstance(self.classes[0][0], int)

    def counts(self, total: int | None = None) -> tuple[int, ...]:
        """Realized head-count per class; needs ``total`` when sizes are fractions.

        Fractions are apportioned by largest remainder, ties going to the
        higher-bandwidth class, so the result always sums to ``total`` exactly.
        """
        if not self.fractional:
            return tuple(int(s) for s, _ in self.classes)
        if total is None:
            raise DomainError("total population N required for fractional sizes")
        if total < len(self.classes):
            raise DomainError("N smaller than the number of classes")
        quotas = [s * total for s, _ in self.classes]
        base = [int(q) for q in quotas]
        leftover = total - sum(base)
        if leftover < 0:
            raise DomainError("rounding cannot reach N")
        order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - base[i]), i))
        for i in order[:leftover]:
            base[i] += 1
        if sum(base) != total:
            raise DomainError("rounding cannot reach N")
        return tuple(base)


def expand_classes(spec: ClassSpec, total: int | None = None) -> BandwidthProfile:
    """Concrete sorted profile realizing a class description."""
    counts = spec.counts(total)
    if total is not None and sum(counts) != total:
        raise DomainError(f"class counts sum to {sum(counts)}, expected {total}")
    uploads: list = []
    for count, (_, u) in zip(counts, spec.classes):
        uploads.extend([u] * count)
    return BandwidthProfile(tuple(uploads))


@dataclass(frozen=True, slots=True)
class ManyToOne:
    """Senders may pool their upload on a single receiver (pooled rate U -> 1/U per copy)."""


@dataclass(frozen=True, slots=True)
class OneToOne:
    """One sender per transfer at full rate; a copy from peer i takes 1/u_i."""


@dataclass(frozen=True, slots=True)
class OneToSome:
    """Sender splits its upload into c equal, non-aggregatable connections.

    Each of the c parallel copies takes c/u_i. ``OneToSome(1)`` behaves exactly
    like ``OneToOne``.
    """

    connections: int

    def __post_init__(self) -> None:
        if self.connections < 1:
            raise DomainError("connection count must be >= 1")


DiffusionModel = ManyToOne | OneToOne | OneToSome


def parallel_connections(model: DiffusionModel) -> int:
    """Connection count c of a single-sender model; errors on ManyToOne."""
    if isinstance(model, OneToOne):
        return 1
    if isinstance(model, OneToSome):
        return model.connections
    raise DomainError("pooled model has no connection count")


@dataclass(frozen=True, slots=True)
class InjectionConfig:
    """Number of copies the source hands out per new chunk."""

    n0: int

    def __post_init__(self) -> None:
        if self.n0 < 1:
            raise DomainError("n0 must be >= 1")


@dataclass(frozen=True, slots=True)
class StreamConfig:
    """Chunk creation rate s (chunks/second) plus the injection redundancy n0."""

    rate: float
    n0: int

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise DomainError("stream rate must be positive")
        if self.n0 < 1:
            raise DomainError("n0 must be >= 1")


def generate_adversarial(n_peers: int, n0: int, excess: float, rate: float) -> BandwidthProfile:
    """Feasible system whose stream delay floor grows linearly with N.

    One peer gets almost all the bandwidth (u_1 = (N-n0-1)s) while the N-1
    others share just enough ((n0+excess+1)s/(N-1) each) to keep the system
    feasible with spare capacity excess*s. The source plus the big peer cannot
    sustain the stream on their own, so some slow peer must eventually upload,
    which forces a delay of (N-1)/(s(n0+excess+1)).
    """
    if n0 < 1:
        raise DomainError("n0 must be >= 1")
    if n_peers <= n0 + 1:
        raise DomainError("need N > n0 + 1")
    if excess < 0:
        raise DomainError("excess capacity must be >= 0")
    if not rate > 0:
        raise DomainError("rate must be positive")
    big = (n_peers - n0 - 1) * rate
    small = (n0 + excess + 1) * rate / (n_peers - 1)
    return BandwidthProfile.from_unsorted([big] + [small] * (n_peers - 1))


RANDOM_FAMILIES = (
    "homogeneous",
    "uniform",
    "exponential",
    "power_law",
    "two_class",
    "free_rider",
)


def random_profile(family: str, n_peers: int, rng: random.Random) -> BandwidthProfile:
    """Seeded random profile from one of the named distribution families."""
    if n_peers < 1:
        raise DomainError("need at least one peer")
    if family == "homogeneous":
        u = rng.uniform(0.1, 4.0)
        uploads = [u] * n_peers
    elif family == "uniform":
        uploads = [rng.uniform(0.05, 4.0) for _ in range(n_peers)]
    elif family == "exponential":
        uploads = [rng.expovariate(1.0) + 0.01 for _ in range(n_peers)]
    elif family == "power_law":
        alpha = rng.uniform(1.1, 3.0)
        uploads = [rng.paretovariate(alpha) * 0.2 for _ in range(n_peers)]
    elif family == "two_class":
        hi = rng.uniform(1.0, 8.0)
        lo = rng.uniform(0.02, 0.9) * hi / 8
        n_hi = rng.randint(1, n_peers)
        uploads = [hi] * n_hi + [lo] * (n_peers - n_hi)
    elif family == "free_rider":
        u = rng.uniform(0.2, 4.0)
        n_up = rng.randint(1, n_peers)
        uploads = [u] * n_up + [0.0] * (n_peers - n_up)
    else:
        raise DomainError(f"unknown family {family!r}; expected one of {RANDOM_FAMILIES}")
    return BandwidthProfile.from_unsorted(uploads)


def profile_from_dict(data: dict) -> BandwidthProfile:
    """Profile from its JSON form.

    Either ``{"uploads": [...]}`` (any order, normalized by sorting) or
    ``{"classes": [{"size": ..., "upload": ...}, ...], "N": ...}`` with sizes
    given as counts or as fractions of N.
    """
    if "uploads" in data:
        return BandwidthProfile.from_unsorted(data["uploads"])
    if "classes" in data:
        spec = ClassSpec(tuple((c["size"], c["upload"]) for c in data["classes"]))
        return expand_classes(spec, data.get("N"))
    raise DomainError("profile JSON needs an 'uploads' or 'classes' key")


def profile_to_dict(profile: BandwidthProfile) -> dict:
    return {"uploads": [float(u) for u in profile.uploads]}


def load_profile(path: str | Path) -> BandwidthProfile:
    with open(path, encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def save_profile(profile: BandwidthProfile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile_to_dict(profile), fh)
        fh.write("\n")
