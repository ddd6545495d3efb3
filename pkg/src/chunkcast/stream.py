"""Stream-of-chunks feasibility, delay bounds, group scheduling and verification.

A stream at rate s is feasible iff the source redundancy plus total peer upload
covers the demand: n0 + U_N/s >= N. Feasibility alone says nothing good about
delay: the responsibility scheduler that proves it can be ~2(N-1)/u_min slow,
and there are overprovisioned systems whose delay floor grows linearly in N.

The constructive upper bound is the intra-then-inter scheme. Peers are split
into E groups by index residue; chunk i is seeded into group i mod E, fills
that group first (intra), and the group then serves everyone else (inter),
each member returning to duty in time for its group's next chunk. When the
slowest group fills within E/s and the bandwidth-provisioning inequality
holds, every chunk is delivered within 2E/s.

The planner here emits an explicit transfer schedule for that scheme, and
``verify_schedule`` replays any schedule against the model's capacity and
chunk-atomicity rules without trusting the planner.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .model import (
    BandwidthProfile,
    DiffusionModel,
    DomainError,
    InfeasibleError,
    ManyToOne,
    OneToOne,
    OneToSome,
    StreamConfig,
    TOLERANCE,
    parallel_connections,
)
from .single_chunk import greedy_delay_values, pooled_delay_values


@dataclass(frozen=True, slots=True)
class FeasibilityResult:
    feasible: bool
    slack: float  # n0 + U_N/s - N


def feasibility_check(profile: BandwidthProfile, stream: StreamConfig) -> FeasibilityResult:
    """Whether lossless bounded-delay diffusion is possible at all."""
    slack = stream.n0 + profile.total_upload / stream.rate - profile.size
    return FeasibilityResult(slack >= -TOLERANCE, slack)


def responsibility_delay_bound(profile: BandwidthProfile, stream: StreamConfig) -> float:
    """Delay guarantee of the scheduler that assigns each chunk to one peer.

    Chunks are handed out proportionally to upload; the slowest positive
    uploader may hold a fresh chunk while still shipping the previous one,
    hence the factor 2 on its (N-1)-transfer round.
    """
    if not feasibility_check(profile, stream).feasible:
        raise InfeasibleError("responsibility bound requires a feasible system")
    if profile.size == 1:
        return 0.0
    return 2 * (profile.size - 1) / profile.min_positive_upload()


@dataclass(frozen=True, slots=True)
class AdversarialWitness:
    """Forced-delay floor of the linear-delay construction, with its argument."""

    floor: float  # (N-1)/(s(n0+V+1))
    source_and_best_rate: float  # n0*s + u_1
    required_rate: float  # N*s

    @property
    def forced(self) -> bool:
        return self.source_and_best_rate < self.required_rate - TOLERANCE


def adversarial_lower_bound(n_peers: int, n0: int, excess: float, rate: float) -> AdversarialWitness:
    """Delay floor of ``generate_adversarial(n_peers, n0, excess, rate)``.

    The source plus the big peer fall short of N*s by exactly s, so any
    lossless schedule eventually makes some small peer upload a full chunk,
    which alone takes (N-1)/(s(n0+excess+1)).
    """
    if n0 < 1 or n_peers <= n0 + 1 or excess < 0 or not rate > 0:
        raise DomainError("need n0 >= 1, N > n0+1, excess >= 0, rate > 0")
    floor = (n_peers - 1) / (rate * (n0 + excess + 1))
    best = (n_peers - n0 - 1) * rate
    return AdversarialWitness(floor, n0 * rate + best, n_peers * rate)


def stream_delay_floor(profile: BandwidthProfile, stream: StreamConfig) -> float:
    """Generic forced-delay floor: 1/u_i for the slowest peer that must upload.

    If the source and the i-1 best peers cannot sustain N*s on their own, some
    peer ranked >= i eventually sends a full chunk, so the stream delay is at
    least 1/u_i. Returns the largest such floor (0 when the source alone
    suffices, inf when the system is infeasible).
    """
    if not feasibility_check(profile, stream).feasible:
        return math.inf
    demand = profile.size * stream.rate
    supplied = stream.n0 * stream.rate
    floor = 0.0
    for u in profile.uploads:
        if supplied < demand - TOLERANCE:
            floor = 1 / u if u > 0 else math.inf
        else:
            break
        supplied += u
    return floor


def _make_groups(n_peers: int, period: int) -> tuple[tuple[int, ...], ...]:
    """Peers 1..N split by index residue mod E; residue 0 joins group E."""
    return tuple(
        tuple(i for i in range(1, n_peers + 1) if i % period == g % period)
        for g in range(1, period + 1)
    )


@dataclass(frozen=True, slots=True)
class GroupPlan:
    """A period E with its residue groups and the values behind both conditions."""

    period: int
    groups: tuple[tuple[int, ...], ...]
    delay_bound: float  # 2E/s
    intra_delay: float  # single-chunk delay of the slowest group
    intra_limit: float  # E/s
    provision_lhs: float  # mean upload
    provision_rhs: float  # s + E*U_{E-1}/N, plus s*c/E for single-sender models


def evaluate_group_period(
    profile: BandwidthProfile,
    stream: StreamConfig,
    model: DiffusionModel,
    period: int,
) -> GroupPlan | None:
    """GroupPlan for this E if both scheme conditions hold, else None."""
    if not 1 <= period <= profile.size:
        raise DomainError(f"period {period} outside 1..{profile.size}")
    s = stream.rate
    n_peers = profile.size
    u_head = sum(profile.uploads[: period - 1])
    provision_rhs = s + period * u_head / n_peers
    if not isinstance(model, ManyToOne):
        provision_rhs += s * parallel_connections(model) / period
    provision_lhs = profile.mean_upload
    if provision_lhs < provision_rhs - TOLERANCE:
        return None

    groups = _make_groups(n_peers, period)
    slowest = groups[-1]
    intra_delay = _subsystem_delay(profile, slowest, stream.n0, model)
    intra_limit = period / s
    if intra_delay > intra_limit + TOLERANCE:
        return None
    return GroupPlan(
        period,
        groups,
        2 * period / s,
        intra_delay,
        intra_limit,
        provision_lhs,
        provision_rhs,
    )


def _subsystem_delay(
    profile: BandwidthProfile, members: tuple[int, ...], n0: int, model: DiffusionModel
) -> float:
    """Single-chunk delay of a peer subset, seeded at its best members."""
    uploads = tuple(profile.uploads[i - 1] for i in members)
    size = len(uploads)
    if n0 >= size:
        return 0.0
    if isinstance(model, ManyToOne):
        values = pooled_delay_values(uploads, n0, size)
    else:
        values = greedy_delay_values(uploads, n0, parallel_connections(model), size)
    return float(values[-1])


def find_group_period(
    profile: BandwidthProfile, stream: StreamConfig, model: DiffusionModel
) -> GroupPlan | None:
    """Smallest qualifying period, or None; smaller E means a tighter 2E/s bound."""
    for period in range(1, profile.size + 1):
        plan = evaluate_group_period(profile, stream, model, period)
        if plan is not None:
            return plan
    return None


@dataclass(frozen=True, slots=True)
class Injection:
    """The source hands a finished copy to a peer (no upload consumed)."""

    chunk: int
    receiver: int
    time: float


@dataclass(frozen=True, slots=True)
class TransferEvent:
    """One complete chunk copy moved to one receiver.

    ``senders`` is a single peer under the single-sender models and a pooled
    set under ManyToOne; ``rate`` times the duration is always one chunk.
    """

    chunk: int
    senders: tuple[int, ...]
    receiver: int
    start: float
    end: float
    rate: float


@dataclass(frozen=True, slots=True)
class Schedule:
    horizon: int
    injections: tuple[Injection, ...]
    transfers: tuple[TransferEvent, ...]


@dataclass(frozen=True, slots=True)
class SimulationResult:
    """Replay outcome: per-chunk full-delivery delays plus any rule violations."""

    chunk_delays: tuple[float, ...]
    max_delay: float
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


class _IntraTemplate:
    """Relative-time intra schedule of one group, reused for each of its chunks.

    ``seeded`` members get injected copies at time 0; every member has a grant
    time (``alpha``, when its upload becomes committed to the group) and a
    release time (``beta``, when its last intra transfer ends).
    """

    def __init__(self, transfers, seeded, alpha, beta, delay):
        self.transfers = transfers  # (senders, receiver, start, end, rate)
        self.seeded = seeded
        self.alpha = alpha
        self.beta = beta
        self.delay = delay


def _intra_template_single(uploads, members, n_seed: int, c: int) -> _IntraTemplate:
    # Same grant loop as the delay curve, but materializing each used completion
    # as a sender->receiver transfer on one of the sender's c slots.
    size = len(members)
    heap: list = [(0.0, 0, 0)] * n_seed
    grant = [0.0] * (size + 1)
    transfers = []
    alpha = {}
    beta = {}
    delay = 0.0
    for i in range(1, size + 1):
        if not heap:
            delay = math.inf  # remaining members are unreachable inside the group
            for rank in range(i - 1, size):
                alpha[members[rank]] = math.inf
                beta[members[rank]] = math.inf
            break
        t, sender, j = heapq.heappop(heap)
        delay = t
        if sender > 0:
            u = uploads[sender - 1]
            sender_peer = members[sender - 1]
            start = grant[sender] + ((j - 1) // c) * c / u
            transfers.append(((sender_peer,), members[i - 1], start, t, u / c))
            beta[sender_peer] = max(beta[sender_peer], t)
            if j + 1 <= size - sender:
                heapq.heappush(heap, (grant[sender] + ((j + c) // c) * c / u, sender, j + 1))
        peer = members[i - 1]
        alpha[peer] = t
        beta.setdefault(peer, t)
        grant[i] = t
        if uploads[i - 1] > 0 and size - i >= 1:
            heapq.heappush(heap, (t + c / uploads[i - 1], i, 1))
    return _IntraTemplate(transfers, members[:n_seed], alpha, beta, delay)


def _intra_template_pooled(uploads, members, n_seed: int) -> _IntraTemplate:
    size = len(members)
    transfers = []
    alpha = {}
    beta = {}
    now = 0.0
    pool: list[int] = []
    rate = 0.0
    for rank in range(size):
        peer = members[rank]
        if rank < n_seed:
            alpha[peer] = 0.0
        elif rate > 0:
            end = now + 1 / rate
            transfers.append((tuple(pool), peer, now, end, rate))
            now = end
            alpha[peer] = now
        else:
            now = math.inf
            alpha[peer] = math.inf
        if uploads[rank] > 0:
            pool.append(peer)
            rate += uploads[rank]
    # Pool members upload until the group is full; receive-only members are free
    # the moment their copy lands.
    for rank in range(size):
        peer = members[rank]
        beta[peer] = now if uploads[rank] > 0 else alpha[peer]
    return _IntraTemplate(transfers, members[:n_seed], alpha, beta, now)


def _build_template(profile, members, n0, model) -> _IntraTemplate:
    uploads = tuple(float(profile.uploads[i - 1]) for i in members)
    n_seed = min(n0, len(members))
    if n_seed >= len(members):
        zero = {p: 0.0 for p in members}
        return _IntraTemplate([], members, zero, dict(zero), 0.0)
    if isinstance(model, ManyToOne):
        return _intra_template_pooled(uploads, members, n_seed)
    return _intra_template_single(uploads, members, n_seed, parallel_connections(model))


def _spill_recipients(groups, home: int, leftover: int) -> list[int]:
    """Best peers of the other groups, visited round-robin, for surplus seeds."""
    order = [g for g in range(len(groups)) if g != home]
    cursors = {g: 0 for g in order}
    chosen = []
    while leftover > 0:
        progressed = False
        for g in order:
            if leftover == 0:
                break
            if cursors[g] < len(groups[g]):
                chosen.append(groups[g][cursors[g]])
                cursors[g] += 1
                leftover -= 1
                progressed = True
        if not progressed:
            raise DomainError("n0 exceeds the number of peers")
    return chosen


def plan_intra_then_inter(
    profile: BandwidthProfile,
    stream: StreamConfig,
    model: DiffusionModel,
    plan: GroupPlan,
    horizon: int,
) -> Schedule:
    """Explicit transfer schedule of the intra-then-inter scheme.

    Every chunk in the horizon is scheduled to full delivery. Members stop
    inter work in time for their next intra duty; under the single-sender
    models a member whose remaining window cannot fit a whole transfer idles.
    """
    if horizon < 0:
        raise DomainError("horizon must be >= 0")
    if plan.groups != _make_groups(profile.size, plan.period):
        raise DomainError("plan does not match this profile")
    if abs(plan.delay_bound - 2 * plan.period / stream.rate) > TOLERANCE:
        raise DomainError("plan does not match this stream rate")
    period = plan.period
    cycle = period / stream.rate

    templates = [_build_template(profile, g, stream.n0, model) for g in plan.groups]
    slowest_fill = max(t.delay for t in templates)
    if slowest_fill > cycle + TOLERANCE:
        raise InfeasibleError(
            f"a group needs {slowest_fill:.6g}s to fill, beyond the {cycle:.6g}s cycle"
        )

    injections: list[Injection] = []
    transfers: list[TransferEvent] = []
    for chunk in range(horizon):
        residue = chunk % period
        home = (period if residue == 0 else residue) - 1
        template = templates[home]
        members = plan.groups[home]
        t0 = chunk / stream.rate

        spill = (
            _spill_recipients(plan.groups, home, stream.n0 - len(members))
            if stream.n0 > len(members)
            else []
        )
        for peer in template.seeded:
            injections.append(Injection(chunk, peer, t0))
        for peer in spill:
            injections.append(Injection(chunk, peer, t0))
        for senders, receiver, start, end, rate in template.transfers:
            transfers.append(TransferEvent(chunk, senders, receiver, t0 + start, t0 + end, rate))

        excluded = set(members) | set(spill)
        receivers = [p for p in range(1, profile.size + 1) if p not in excluded]
        if not receivers:
            continue
        windows = {
            p: (t0 + template.beta[p], t0 + cycle + template.alpha[p])
            for p in members
            if profile.uploads[p - 1] > 0
        }
        if isinstance(model, ManyToOne):
            served = _inter_pooled(chunk, receivers, windows, profile, transfers)
        else:
            served = _inter_single(
                chunk, receivers, windows, profile, parallel_connections(model), transfers
            )
        if served < len(receivers):
            raise InfeasibleError(
                f"chunk {chunk}: only {served} of {len(receivers)} peers reachable "
                "within the group's sending windows"
            )

    transfers.sort(key=lambda e: (e.start, e.end, e.receiver))
    return Schedule(horizon, tuple(injections), tuple(transfers))


def _inter_single(chunk, receivers, windows, profile, c, out) -> int:
    heap = []
    for p, (w_start, w_end) in windows.items():
        duration = c / profile.uploads[p - 1]
        for _ in range(c):
            heap.append((w_start, p, duration, w_end))
    heapq.heapify(heap)
    served = 0
    idx = 0
    while idx < len(receivers) and heap:
        t, p, duration, w_end = heapq.heappop(heap)
        if t + duration > w_end + TOLERANCE:
            continue  # cannot fit another full copy; this slot idles
        out.append(
            TransferEvent(chunk, (p,), receivers[idx], t, t + duration, profile.uploads[p - 1] / c)
        )
        idx += 1
        served += 1
        heapq.heappush(heap, (t + duration, p, duration, w_end))
    return served


def _inter_pooled(chunk, receivers, windows, profile, out) -> int:
    # Fixed-membership pools: a transfer only counts members able to stay for
    # all of it, so each pooled event keeps the single constant rate the model
    # prescribes. When no assembly can finish a copy, jump to the next window
    # boundary (a member joining or leaving) and retry.
    if not windows:
        return 0
    now = min(ws for ws, _ in windows.values())
    served = 0
    last_senders: tuple[int, ...] = ()
    for receiver in receivers:
        while True:
            active = [
                p
                for p, (ws, we) in windows.items()
                if ws <= now + TOLERANCE and we > now + TOLERANCE
            ]
            end = now
            while active:
                rate = sum(profile.uploads[p - 1] for p in active)
                end = now + 1 / rate
                keep = [p for p in active if windows[p][1] >= end - TOLERANCE]
                if len(keep) == len(active):
                    break
                active = keep
            if active:
                senders = tuple(active)
                if senders == last_senders:
                    senders = last_senders  # share the tuple across identical pools
                last_senders = senders
                out.append(TransferEvent(chunk, senders, receiver, now, end, rate))
                now = end
                served += 1
                break
            boundaries = [
                t for ws_we in windows.values() for t in ws_we if t > now + TOLERANCE
            ]
            if not boundaries:
                return served
            now = min(boundaries)
    return served


def measured_stream_delay(
    profile: BandwidthProfile,
    stream: StreamConfig,
    model: DiffusionModel,
    horizon: int | None = None,
) -> float:
    """Max per-chunk delivery delay of the planned schedule; at most 2E/s."""
    plan = find_group_period(profile, stream, model)
    if plan is None:
        raise InfeasibleError("no qualifying group period for this system")
    if horizon is None:
        horizon = 3 * plan.period
    schedule = plan_intra_then_inter(profile, stream, model, plan, horizon)
    result = verify_schedule(profile, stream, model, schedule)
    if not result.valid:
        raise AssertionError(f"planned schedule failed verification: {result.violations[:3]}")
    return result.max_delay


def verify_schedule(
    profile: BandwidthProfile,
    stream: StreamConfig,
    model: DiffusionModel,
    schedule: Schedule,
) -> SimulationResult:
    """Replay a schedule against chunk atomicity and the model's capacity rules.

    Checks, without trusting the planner: (a) every sender holds a complete
    copy when its transfer starts, (b) transfers move exactly one chunk at the
    model's admissible rates and concurrency, (c) per-chunk delays to the
    N-th copy. Violations are collected, never raised.
    """
    violations: list[str] = []

    def flag(msg: str) -> None:
        if len(violations) < 200:
            violations.append(msg)

    acquired: dict[tuple[int, int], float] = {}
    chunk_time: dict[int, float] = {}
    for inj in schedule.injections:
        key = (inj.chunk, inj.receiver)
        acquired[key] = min(acquired.get(key, math.inf), inj.time)
        chunk_time[inj.chunk] = min(chunk_time.get(inj.chunk, math.inf), inj.time)
    for ev in schedule.transfers:
        key = (ev.chunk, ev.receiver)
        acquired[key] = min(acquired.get(key, math.inf), ev.end)

    events = sorted(schedule.transfers, key=lambda e: (e.start, e.end))
    per_sender: dict[int, list[TransferEvent]] = {}
    for ev in events:
        if not ev.end > ev.start:
            flag(f"chunk {ev.chunk} -> {ev.receiver}: empty or reversed interval")
            continue
        if abs(ev.rate * (ev.end - ev.start) - 1) > 1e-6:
            flag(f"chunk {ev.chunk} -> {ev.receiver}: rate*duration != 1 chunk")
        if ev.chunk not in chunk_time:
            flag(f"chunk {ev.chunk}: transferred but never injected")
            chunk_time[ev.chunk] = ev.start
        for s in ev.senders:
            if not 1 <= s <= profile.size:
                flag(f"chunk {ev.chunk}: unknown sender {s}")
                continue
            held = acquired.get((ev.chunk, s), math.inf)
            if held > ev.start + TOLERANCE:
                flag(f"chunk {ev.chunk}: peer {s} sends at {ev.start:.6g} before holding a copy")
            per_sender.setdefault(s, []).append(ev)
        if isinstance(model, (OneToOne, OneToSome)) and len(ev.senders) != 1:
            flag(f"chunk {ev.chunk} -> {ev.receiver}: pooled senders under a single-sender model")

    if isinstance(model, ManyToOne):
        _check_pooled_capacity(profile, events, flag)
    else:
        _check_single_capacity(profile, per_sender, parallel_connections(model), flag)

    horizon = schedule.horizon or (max(chunk_time) + 1 if chunk_time else 0)
    delays = []
    for chunk in range(horizon):
        t0 = chunk_time.get(chunk)
        if t0 is None:
            delays.append(math.inf)
            continue
        times = [acquired.get((chunk, p), math.inf) for p in range(1, profile.size + 1)]
        delays.append(max(times) - t0)
    max_delay = max(delays, default=0.0)
    return SimulationResult(tuple(delays), max_delay, tuple(violations))


def _check_single_capacity(profile, per_sender, c, flag) -> None:
    import heapq

    for sender, evs in per_sender.items():
        u = profile.uploads[sender - 1]
        if u <= 0:
            flag(f"peer {sender} has no upload but sends")
            continue
        expected = u / c
        evs.sort(key=lambda e: (e.start, e.end))
        running: list[float] = []
        for ev in evs:
            if abs(ev.rate - expected) > 1e-6 * max(1.0, expected):
                flag(
                    f"peer {sender}: rate {ev.rate:.6g} differs from u/c = {expected:.6g} "
                    f"on chunk {ev.chunk}"
                )
            while running and running[0] <= ev.start + TOLERANCE:
                heapq.heappop(running)
            if len(running) >= c:
                flag(f"peer {sender}: more than {c} concurrent transfers at {ev.start:.6g}")
            heapq.heappush(running, ev.end)


def _check_pooled_capacity(profile, events, flag) -> None:
    # Each pool member is charged the fraction rate/U_pool of its upload for the
    # transfer's duration; per-peer fractions may never sum above 1.
    marks: dict[int, list[tuple[float, float]]] = {}
    for ev in events:
        pool_rate = sum(profile.uploads[s - 1] for s in ev.senders if 1 <= s <= profile.size)
        if pool_rate <= 0:
            flag(f"chunk {ev.chunk} -> {ev.receiver}: pool has no upload")
            continue
        if ev.rate > pool_rate * (1 + 1e-9) + TOLERANCE:
            flag(
                f"chunk {ev.chunk} -> {ev.receiver}: rate {ev.rate:.6g} exceeds pool "
                f"capacity {pool_rate:.6g}"
            )
        share = ev.rate / pool_rate
        for s in ev.senders:
            marks.setdefault(s, []).append((ev.start, share))
            marks[s].append((ev.end, -share))
    for sender, deltas in marks.items():
        deltas.sort(key=lambda d: (d[0], d[1]))  # releases before grabs at ties
        load = 0.0
        for _, delta in deltas:
            load += delta
            if load > 1 + 1e-6:
                flag(f"peer {sender}: pooled upload oversubscribed ({load:.6g}x)")
                break


def schedule_to_lines(schedule: Schedule) -> list[str]:
    lines = []
    for inj in schedule.injections:
        lines.append(
            json.dumps(
                {"kind": "injection", "chunk": inj.chunk, "receiver": inj.receiver, "time": inj.time}
            )
        )
    for ev in schedule.transfers:
        lines.append(
            json.dumps(
                {
                    "kind": "transfer",
                    "chunk": ev.chunk,
                    "senders": list(ev.senders),
                    "receiver": ev.receiver,
                    "start": ev.start,
                    "end": ev.end,
                    "rate": ev.rate,
                }
            )
        )
    return lines


def schedule_from_lines(lines) -> Schedule:
    injections = []
    transfers = []
    top = -1
    for line in lines:
        line = line.strip()
        if not line:
            continue
        data = json.loads(line)
        top = max(top, data["chunk"])
        if data.get("kind") == "injection":
            injections.append(Injection(data["chunk"], data["receiver"], data["time"]))
        else:
            transfers.append(
                TransferEvent(
                    data["chunk"],
                    tuple(data["senders"]),
                    data["receiver"],
                    data["start"],
                    data["end"],
                    data["rate"],
                )
            )
    return Schedule(top + 1, tuple(injections), tuple(transfers))


def save_schedule(schedule: Schedule, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in schedule_to_lines(schedule):
            fh.write(line + "\n")


def load_schedule(path: str | Path) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_lines(fh)
