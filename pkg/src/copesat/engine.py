"""Slot-by-slot simulation over a fixed horizon, Monte Carlo averaging and sweeps."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .coding import DecoderState, Transmission, max_code_size, select_code_set
from .mac_sched import FIFO, OWN, MacPolicy, MprConfig, make_scheduler
from .topology import build_component, receptions
from .traffic import BROADCAST, UNICAST, LoadVector, draw_loads, make_packets


@dataclass(frozen=True)
class SimConfig:
    kind: str = "cross"
    n: int = 5
    x1: int | None = None
    traffic: str = UNICAST
    nc: bool = False
    mpr: MprConfig = field(default_factory=MprConfig)
    mac: MacPolicy = field(default_factory=MacPolicy)
    horizon: int = 100
    g: int = 100
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    def component(self):
        return build_component(self.kind, self.n, self.x1)

    @property
    def config_id(self) -> str:
        parts = [self.kind, f"n{self.n}"]
        if self.kind == "x":
            parts.append(f"x1-{self.x1 if self.x1 is not None else (self.n - 1) // 2}")
        parts += [self.traffic, "nc" if self.nc else "route", f"m{self.mpr.m}"]
        if self.mpr.broadcast_cap2:
            parts.append("cap2")
        parts += [self.mac.name, f"g{self.g}", f"h{self.horizon}"]
        return "-".join(parts)


@dataclass(frozen=True)
class SimResult:
    s: float
    delivered: int
    per_flow: tuple  # delivered count per source node 1..N
    completion: float
    offered: int
    slots_used: int
    horizon: int
    sent: tuple  # transmissions per node 1..N

    @property
    def s_exact(self) -> Fraction:
        return Fraction(self.delivered, self.horizon)


class _Trace:
    FIELDS = ("slot", "transmitters", "payloads", "receptions", "deliveries")

    def __init__(self, fh, prefix=(), header=True):
        self.writer = csv.writer(fh, lineterminator="\n")
        self.prefix = tuple(v for _, v in prefix)
        if header:
            self.writer.writerow((*(k for k, _ in prefix), *self.FIELDS))

    def row(self, slot, transmissions, heard, delivered):
        self.writer.writerow((
            *self.prefix,
            slot,
            " ".join(str(t.sender) for t in transmissions),
            " ".join(f"{t.sender}:{'+'.join(map(str, t.payload))}" for t in transmissions),
            " ".join(f"{u}<{','.join(map(str, s))}" for u, s in sorted(heard.items())),
            " ".join(map(str, delivered)),
        ))


def run(config: SimConfig, loads: LoadVector, rng=None, trace=None, component=None,
        scheduler=None, check=False) -> SimResult:
    """Simulate one load vector for ``config.horizon`` slots.

    All packets exist at slot 0. S is the number of completed packets divided
    by the horizon. ``trace`` is an open text file receiving one CSV row per
    slot. ``rng`` is accepted for interface symmetry; a run is deterministic.
    """
    component = component or config.component()
    if loads.n != component.n:
        raise ValueError(f"load vector has {loads.n} nodes, component has {component.n}")
    center = component.center
    m = config.mpr.m
    broadcast = config.traffic == BROADCAST
    packets = make_packets(loads, component, config.traffic)
    if scheduler is None:
        scheduler = make_scheduler(component, config.mac, config.mpr, config.nc, config.traffic)
    budget = max_code_size(component.kind, m, component.n, config.mpr.broadcast_cap2)
    if trace is None or isinstance(trace, _Trace):
        tracer = trace
    else:
        tracer = _Trace(trace)

    outbox = {v: [] for v in component.nodes}  # untransmitted own packets, FIFO
    for p in packets:
        outbox[p.origin].append(p)
    cursor = {v: 0 for v in component.nodes}
    states = {v: DecoderState(q.uid for q in outbox[v]) for v in component.nodes}
    relay = []  # packets at the center still missing at some recipient, FIFO
    done = [False] * len(packets)
    per_flow = [0] * component.n
    delivered = 0
    remaining = len(packets)
    nodes = tuple(component.nodes)

    def complete(p):
        if broadcast:
            return all(states[v].holds(p.uid) for v in nodes)
        return states[p.dest].holds(p.uid)

    sent_count = [0] * component.n
    slots_used = 0
    for slot in range(1, config.horizon + 1):
        if not remaining:
            break
        edge_backlog = {v for v in component.edges if cursor[v] < len(outbox[v])}
        own_left = cursor[center] < len(outbox[center])
        if not (edge_backlog or own_left or relay):
            break
        tx, mode = scheduler.select(edge_backlog, own_left, bool(relay))
        if check:
            _check_transmit_set(component, config.mpr, tx, edge_backlog)
        slots_used = slot

        transmissions = []
        for v in sorted(tx):
            if v != center:
                p = outbox[v][cursor[v]]
                cursor[v] += 1
                transmissions.append(Transmission(v, (p.uid,)))
                continue
            own_head = outbox[center][cursor[center]] if own_left else None
            if mode == OWN or (mode == FIFO and own_head is not None):
                # own packets entered the queue at slot 0, ahead of every relay
                cursor[center] += 1
                transmissions.append(Transmission(center, (own_head.uid,)))
            elif config.nc:
                t = select_code_set(relay, states, budget, config.traffic, sender=center)
                if check:
                    _check_decodable(t, relay, states, config.traffic, center)
                transmissions.append(t)
            else:
                transmissions.append(Transmission(center, (relay[0].uid,)))

        heard = receptions(component, tx, m)
        sent = {t.sender: t for t in transmissions}
        newly = set()
        for u, senders in heard.items():
            for v in senders:
                got = states[u].add(sent[v].vector)
                if got:
                    newly.update(got)
            if u == center:
                for v in senders:
                    uid = sent[v].payload[0]
                    p = packets[uid]
                    if not done[uid]:
                        relay.append(p)
        for t in transmissions:
            sent_count[t.sender - 1] += 1

        finished = []
        for uid in sorted(newly):
            if not done[uid] and complete(packets[uid]):
                done[uid] = True
                finished.append(uid)
                per_flow[packets[uid].origin - 1] += 1
        delivered += len(finished)
        remaining -= len(finished)
        if finished:
            relay = [p for p in relay if not done[p.uid]]
        if tracer:
            tracer.row(slot, transmissions, heard, finished)

    total = len(packets)
    return SimResult(
        s=delivered / config.horizon,
        delivered=delivered,
        per_flow=tuple(per_flow),
        completion=delivered / total if total else 1.0,
        offered=total,
        slots_used=slots_used,
        horizon=config.horizon,
        sent=tuple(sent_count),
    )


def _check_transmit_set(component, mpr, tx, edge_backlog):
    if (edge_backlog) and not tx:
        raise AssertionError("idle slot with backlogged nodes")
    if component.center in tx and len(tx) > 1:
        raise AssertionError(f"center transmitting with edges: {sorted(tx)}")
    if len(tx) > mpr.simultaneous:
        raise AssertionError(f"{len(tx)} transmitters exceed MPR width {mpr.simultaneous}")
    if mpr.simultaneous <= 2:
        for a in tx:
            for b in tx:
                if a < b and component.adjacent(a, b):
                    raise AssertionError(f"adjacent nodes {a}, {b} transmitting together")


def _check_decodable(t, relay, states, traffic, center):
    by_uid = {p.uid: p for p in relay}
    payload = [by_uid[u] for u in t.payload]
    if traffic == UNICAST:
        dests = [p.dest for p in payload]
        if len(set(dests)) != len(dests):
            raise AssertionError(f"two payload packets share a next hop: {t.payload}")
        for p in payload:
            if not states[p.dest].contains(t.vector ^ (1 << p.uid)):
                raise AssertionError(f"packet {p.uid} not decodable at {p.dest}")


def relay_transmissions_per_round(component, nc_enabled: bool, mpr: MprConfig, traffic_type: str):
    """Relay transmissions needed after every edge node sends one packet.

    Runs the engine under the node-fair MAC with one packet per edge node and
    none at the center; ``None`` if the round does not finish.
    """
    k = (1,) * (component.n - 1) + (0,)
    loads = LoadVector(Fraction(component.n - 1, 1), 1, k)
    budget_slots = 4 * component.n * component.n
    config = SimConfig(kind=component.kind.value, n=component.n, x1=len(component.x1) or None,
                       traffic=traffic_type, nc=nc_enabled, mpr=mpr, mac=MacPolicy(),
                       horizon=budget_slots, g=1, iterations=1)
    result = run(config, loads, component=component)
    if result.delivered != component.n - 1:
        return None
    return result.sent[component.center - 1]


def trace_sweep(config: SimConfig, p_list, fh, labels=None, iteration: int = 0):
    """Write the per-slot trace of one Monte Carlo iteration at every load.

    The iteration replays exactly the draw :func:`monte_carlo` uses, so the
    trace explains the matching sweep row. ``labels`` are the P strings for
    the leading column (defaults to ``str(p)``).
    """
    child = _iteration_seeds(config.seed, max(config.iterations, iteration + 1))[iteration]
    labels = labels or [str(p) for p in p_list]
    first = True
    for p, label in zip(p_list, labels):
        rng = np.random.default_rng(child)
        loads = draw_loads(p, config.n, config.g, rng)
        run(config, loads, trace=_Trace(fh, (("P", label),), header=first))
        first = False


def _iteration_seeds(seed, iterations):
    return np.random.SeedSequence(seed).spawn(iterations)


def _run_one(args):
    config, p, child = args
    rng = np.random.default_rng(child)
    loads = draw_loads(p, config.n, config.g, rng)
    return run(config, loads).s


def monte_carlo(config: SimConfig, p, workers: int = 1) -> tuple:
    """Mean and sample standard deviation of S over ``config.iterations`` draws.

    Iteration i always uses the i-th child of the master seed, so every load
    level sees the same random streams.
    """
    children = _iteration_seeds(config.seed, config.iterations)
    jobs = [(config, p, child) for child in children]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            samples = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        samples = [_run_one(job) for job in jobs]
    mean = math.fsum(samples) / len(samples)
    if len(samples) < 2:
        return mean, 0.0
    var = math.fsum((s - mean) ** 2 for s in samples) / (len(samples) - 1)
    return mean, math.sqrt(var)


@dataclass(frozen=True)
class SweepCurve:
    points: tuple  # (P, mean S, std S)

    def __post_init__(self):
        ps = [pt[0] for pt in self.points]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("sweep loads must be strictly increasing")

    @property
    def loads(self):
        return [pt[0] for pt in self.points]

    @property
    def means(self):
        return [pt[1] for pt in self.points]


def sweep(config: SimConfig, p_list, workers: int = 1) -> SweepCurve:
    if not p_list:
        raise ValueError("empty load grid")
    points = []
    for p in p_list:
        mean, std = monte_carlo(config, p, workers)
        points.append((p, mean, std))
    return SweepCurve(tuple(points))


def with_overrides(config: SimConfig, **changes) -> SimConfig:
    return replace(config, **changes)
