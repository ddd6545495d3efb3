"""Brute-force minimal single-chunk delay on tiny instances.

Independent check for the greedy curves: enumerate every assignment schedule in
exact rational arithmetic and take the best finish time. At each instant where
a transfer completes (and at time zero), every free connection slot of a
capable peer may start serving any peer that neither holds the chunk nor is
currently receiving it, or may stay idle. Idling must be allowed: a slow peer
that grabs the last missing receiver can lock out a faster sender, so forcing
maximal assignments would miss true optima.

Initial placements of the n0 seed copies are enumerated too (up to upload
symmetry), so the oracle does not inherit the "seed the best peers" choice
from the algorithms it certifies. Starts between completion instants are never
needed: moving a start earlier onto the previous event frees the slot sooner
and delivers sooner, so the event-aligned schedules contain an optimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    BandwidthProfile,
    DiffusionModel,
    DomainError,
    OneToOne,
    OneToSome,
    parallel_connections,
)

MAX_PEERS = 6
MAX_COPIES = 6
MAX_CONNECTIONS = 3


@dataclass(frozen=True, slots=True)
class ScheduleSearchNode:
    """Search state: who holds the chunk, what is in flight, and the clock.

    In-flight entries are (finish, sender, receiver) triples; the memoized
    solver keeps finish times relative to the node's clock.
    """

    capable: frozenset
    in_flight: tuple
    elapsed: Fraction


def exhaustive_min_delay(
    profile: BandwidthProfile, n0: int, n: int, model: DiffusionModel
) -> Fraction:
    """Exact minimum time until n copies exist, by exhaustive schedule search."""
    if isinstance(model, (OneToOne, OneToSome)):
        c = parallel_connections(model)
    else:
        raise DomainError("oracle covers single-sender models only")
    if c > MAX_CONNECTIONS:
        raise DomainError(f"oracle limited to c <= {MAX_CONNECTIONS}")
    n_peers = profile.size
    if n_peers > MAX_PEERS or n > MAX_COPIES:
        raise DomainError(f"oracle limited to N <= {MAX_PEERS}, n <= {MAX_COPIES}")
    if not 1 <= n <= n_peers:
        raise DomainError("need 1 <= n <= N")
    if n0 < 1:
        raise DomainError("n0 must be >= 1")
    uploads = profile.as_fractions().uploads
    if n <= n0:
        return Fraction(0)

    searcher = _Searcher(uploads, n, c)
    best: Fraction | None = None
    seen_placements: set[tuple] = set()
    for placement in itertools.combinations(range(n_peers), min(n0, n_peers)):
        key = tuple(sorted(uploads[p] for p in placement))
        if key in seen_placements:
            continue  # equal-upload peers are interchangeable
        seen_placements.add(key)
        value = searcher.solve(frozenset(placement), ())
        if value is not None and (best is None or value < best):
            best = value
    if best is None:
        raise DomainError("no schedule reaches n copies (insufficient upload)")
    return best


class _Searcher:
    """Memoized search over states with relative in-flight finish times."""

    def __init__(self, uploads: tuple, target: int, c: int) -> None:
        self.uploads = uploads
        self.target = target
        self.c = c
        self.memo: dict = {}

    def solve(self, capable: frozenset, in_flight: tuple) -> Fraction | None:
        """Minimal additional time until the target copy count, or None if stuck."""
        if len(capable) >= self.target:
            return Fraction(0)
        key = (capable, in_flight)
        if key in self.memo:
            return self.memo[key]

        busy: dict[int, list] = {}
        for finish, sender, _ in in_flight:
            busy.setdefault(sender, []).append(finish)
        targeted = {receiver for _, _, receiver in in_flight}
        receivers = [
            p
            for p in range(len(self.uploads))
            if p not in capable and p not in targeted
        ]
        slots = {
            p: self.c - len(busy.get(p, ()))
            for p in capable
            if self.uploads[p] > 0 and len(busy.get(p, ())) < self.c
        }

        best: Fraction | None = None
        for assignment in self._assignments(receivers, slots, busy):
            started = tuple(
                (self.c / self.uploads[s], s, r) for r, s in assignment
            )
            merged = tuple(sorted(in_flight + started))
            if not merged:
                continue  # idle with nothing in flight: no progress possible
            step = merged[0][0]
            arrived = frozenset(r for f, _, r in merged if f == step)
            rest = tuple((f - step, s, r) for f, s, r in merged if f != step)
            tail = self.solve(capable | arrived, rest)
            if tail is not None:
                total = step + tail
                if best is None or total < best:
                    best = total
        self.memo[key] = best
        return best

    def _assignments(self, receivers: list[int], slots: dict[int, int], busy: dict):
        """All partial injective maps receivers -> free slots, including none.

        Symmetry pruning: equal-upload receivers form runs in which idle ones
        come last and assigned ones use non-decreasing sender indices; senders
        that look alike (upload, free slots, pending finish times) are tried
        once per choice point.
        """
        ordered = sorted(receivers, key=lambda r: (self.uploads[r], r))

        def expand(idx: int, floor_sender: int, prev_idle: bool, acc: list):
            if idx == len(ordered):
                yield list(acc)
                return
            r = ordered[idx]
            same_run = idx > 0 and self.uploads[r] == self.uploads[ordered[idx - 1]]
            # leave r unserved; later receivers of the same run must idle too
            yield from expand(idx + 1, -1 if not same_run else floor_sender, True, acc)
            if same_run and prev_idle:
                return
            seen: set[tuple] = set()
            for s in sorted(slots):
                if slots[s] <= 0:
                    continue
                if same_run and s < floor_sender:
                    continue
                sender_key = (self.uploads[s], slots[s], tuple(sorted(busy.get(s, ()))))
                if sender_key in seen:
                    continue
                seen.add(sender_key)
                slots[s] -= 1
                acc.append((r, s))
                yield from expand(idx + 1, s, False, acc)
                acc.pop()
                slots[s] += 1

        yield from expand(0, -1, False, [])
