"""Per-slot transmit-set selection: node-fair 802.11 abstraction and flow-fair MAC."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .coding import effective_mpr
from .topology import Kind
from .traffic import BROADCAST, TRAFFIC_TYPES, UNICAST

NODE_FAIR = "node-fair"
FLOW_FAIR = "flow-fair"
LITERAL = "literal"
GENERALIZED = "generalized"
MAC_CHOICES = ("node-fair", "flow-fair-literal", "flow-fair-generalized")

# center transmission modes
FIFO = "fifo"  # node-fair: one queue, own packets and relays in arrival order
OWN = "own"
RELAY = "relay"


class UnsupportedConfiguration(ValueError):
    pass


@dataclass(frozen=True)
class MacPolicy:
    kind: str = NODE_FAIR
    formula: str | None = None

    def __post_init__(self):
        if self.kind == NODE_FAIR and self.formula is None:
            return
        if self.kind == FLOW_FAIR and self.formula in (LITERAL, GENERALIZED):
            return
        raise ValueError(f"invalid MAC policy {self.kind!r}/{self.formula!r}")

    @classmethod
    def parse(cls, name: str) -> "MacPolicy":
        if name == "node-fair":
            return cls()
        if name == "flow-fair-literal":
            return cls(FLOW_FAIR, LITERAL)
        if name == "flow-fair-generalized":
            return cls(FLOW_FAIR, GENERALIZED)
        raise ValueError(f"unknown MAC {name!r}; choose from {', '.join(MAC_CHOICES)}")

    @property
    def name(self) -> str:
        return NODE_FAIR if self.kind == NODE_FAIR else f"flow-fair-{self.formula}"


@dataclass(frozen=True)
class MprConfig:
    m: int = 1
    broadcast_cap2: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"MPR order must be >= 1, got {self.m}")

    @property
    def simultaneous(self) -> int:
        """Most edge nodes allowed on the air in one slot."""
        return effective_mpr(self.m, self.broadcast_cap2)


@dataclass(frozen=True)
class ShareVector:
    s_edge: Fraction
    s_center: Fraction
    edge_slots: int  # slots per cycle needed for every edge to send once
    m: int
    n: int

    def normalization(self) -> Fraction:
        """Sum over edges of s_j/m plus s_R."""
        return (self.n - 1) * self.s_edge / self.m + self.s_center

    def slot_sum(self) -> Fraction:
        """Integer-slot form of the normalization: edge_slots * s_j + s_R."""
        return self.edge_slots * self.s_edge + self.s_center


def _edge_slots(n, m):
    return math.ceil((n - 1) / m)


def literal_shares(component, nc_enabled: bool, m: int, traffic_type: str = UNICAST) -> ShareVector:
    n = component.n
    d = _edge_slots(n, m)
    if not nc_enabled:
        return ShareVector(Fraction(1, d + n), Fraction(n, d + n), d, m, n)
    if component.kind is Kind.CROSS:
        return ShareVector(Fraction(1, d + m), Fraction(m, d + m), d, m, n)
    biggest = max(len(component.x1), len(component.x2))
    extra = 2 if traffic_type == BROADCAST and m >= 3 else 1
    return ShareVector(
        Fraction(1, d + biggest + extra), Fraction(biggest + extra, d + biggest + extra), d, m, n
    )


def generalized_shares(component, nc_enabled: bool, m: int, traffic_type: str = UNICAST,
                       cap2: bool = False) -> ShareVector:
    from .engine import relay_transmissions_per_round

    mpr = MprConfig(m, cap2)
    e = _edge_slots(component.n, mpr.simultaneous)
    relays = relay_transmissions_per_round(component, nc_enabled, mpr, traffic_type)
    if relays is None:
        raise UnsupportedConfiguration(
            f"no finite relay schedule for {component!r}, nc={nc_enabled}, m={m}, {traffic_type}"
        )
    cycle = e + relays + 1
    return ShareVector(Fraction(1, cycle), Fraction(relays + 1, cycle), e, m, component.n)


@lru_cache(maxsize=None)
def flow_fair_shares(component, nc_enabled: bool, m: int, traffic_type: str = UNICAST,
                     formula: str = GENERALIZED, cap2: bool = False) -> ShareVector:
    """Slot shares per edge node and for the center under flow fairness.

    ``literal`` evaluates the closed forms as published (``cap2`` is
    ignored). ``generalized`` builds one schedule cycle: every edge sends
    once, the relay makes as many transmissions as the coding rules need to
    finish those packets, plus one slot for the center's own flow.
    """
    if m < 1:
        raise ValueError(f"MPR order must be >= 1, got {m}")
    if traffic_type not in TRAFFIC_TYPES:
        raise ValueError(f"unknown traffic type {traffic_type!r}")
    if formula == LITERAL:
        return literal_shares(component, nc_enabled, m, traffic_type)
    if formula == GENERALIZED:
        return generalized_shares(component, nc_enabled, m, traffic_type, cap2)
    raise ValueError(f"unknown share formula {formula!r}")


def listening_score(component, tx, m):
    """Receptions a transmit set produces: the center counts up to ``m``,
    every other listener at most one."""
    score = min(len(tx), m)
    for u in component.edges:
        if u not in tx and any(component.adjacent(u, t) for t in tx):
            score += 1
    return score


def augment(component, mpr: MprConfig, primary: int, candidates, rank) -> frozenset:
    """Grow ``{primary}`` into a simultaneous edge transmit set.

    ``candidates`` are the other backlogged edge nodes; ``rank`` orders them
    for the two-transmitter rule (lower is preferred).
    """
    width = mpr.simultaneous
    if width == 1 or not candidates:
        return frozenset((primary,))
    if width == 2:
        free = [v for v in candidates if not component.adjacent(primary, v)]
        if not free:
            return frozenset((primary,))
        return frozenset((primary, min(free, key=rank)))
    pool = sorted(candidates)
    best, best_key = (primary,), (listening_score(component, (primary,), mpr.m), 1)
    for size in range(1, min(width - 1, len(pool)) + 1):
        for extra in combinations(pool, size):
            tx = (primary, *extra)
            key = (listening_score(component, tx, mpr.m), len(tx))
            if key > best_key:
                best, best_key = tx, key
    return frozenset(best)


@dataclass
class GrantHistory:
    grants: dict = field(default_factory=dict)  # slots won as primary
    sent: dict = field(default_factory=dict)  # slots spent transmitting


def next_transmit_set(component, policy, mpr, backlogged_nodes, grant_history) -> frozenset:
    """Node-fair pick for one slot (pure; does not update ``grant_history``).

    The least-granted backlogged node wins (lowest id on ties). The center
    always transmits alone; an edge winner is joined by other backlogged
    edges according to the MPR rule.
    """
    if not backlogged_nodes:
        raise ValueError("no backlogged node")
    if isinstance(policy, str):
        policy = MacPolicy.parse(policy)
    if policy.kind != NODE_FAIR:
        raise ValueError("next_transmit_set is stateless only for node-fair; use FlowFairScheduler")
    grants = grant_history.grants if grant_history is not None else {}
    sent = grant_history.sent if grant_history is not None else {}
    primary = min(backlogged_nodes, key=lambda v: (grants.get(v, 0), v))
    if primary == component.center:
        return frozenset((primary,))
    candidates = [v for v in backlogged_nodes if v not in (primary, component.center)]
    return augment(component, mpr, primary, candidates, lambda v: (sent.get(v, 0), v))


class NodeFairScheduler:
    def __init__(self, component, mpr: MprConfig):
        self.component = component
        self.mpr = mpr
        self.history = GrantHistory({v: 0 for v in component.nodes}, {v: 0 for v in component.nodes})

    def select(self, edge_backlog, center_own: bool, center_relay: bool):
        backlogged = set(edge_backlog)
        if center_own or center_relay:
            backlogged.add(self.component.center)
        if not backlogged:
            return frozenset(), None
        tx = next_transmit_set(self.component, MacPolicy(), self.mpr, backlogged, self.history)
        # only the winner is charged a grant; MPR partners ride along
        primary = min(backlogged, key=lambda v: (self.history.grants[v], v))
        self.history.grants[primary] += 1
        for v in tx:
            self.history.sent[v] += 1
        mode = FIFO if self.component.center in tx else None
        return tx, mode


class FlowFairScheduler:
    """Deficit scheduler over per-flow slot shares.

    Accounts: one per edge node, and two for the center (its own flow and
    the relay). Backlogged accounts earn their share every slot; an idle
    account's credit resets to zero. Accounts in credit are served edges
    first, then the center's own flow, then the relay, so the relay codes
    over a full round of edge packets. When no account is in credit the
    richest one transmits. Every transmitting account pays one slot.
    """

    _GROUP = {"edge": 0, OWN: 1, RELAY: 2}

    def __init__(self, component, mpr: MprConfig, shares: ShareVector):
        self.component = component
        self.mpr = mpr
        self.shares = shares
        s_own = shares.s_edge
        rates = {("edge", v): shares.s_edge for v in component.edges}
        rates[(OWN, component.center)] = s_own
        rates[(RELAY, component.center)] = max(shares.s_center - s_own, Fraction(0))
        # integer credits in units of 1/scale keep the arithmetic exact and fast
        self.scale = math.lcm(*(r.denominator for r in rates.values()))
        self.rate = {acct: int(r * self.scale) for acct, r in rates.items()}
        self.credit = {acct: 0 for acct in rates}

    def _key(self, acct):
        kind, node = acct
        credit = self.credit[acct]
        if credit > 0:
            return (0, self._GROUP[kind], -credit, node)
        return (1, 0, -credit, node, self._GROUP[kind])

    def select(self, edge_backlog, center_own: bool, center_relay: bool):
        c = self.component.center
        active = {("edge", v) for v in edge_backlog}
        if center_own:
            active.add((OWN, c))
        if center_relay:
            active.add((RELAY, c))
        credit = self.credit
        for acct in credit:
            credit[acct] = credit[acct] + self.rate[acct] if acct in active else 0
        if not active:
            return frozenset(), None
        winner = min(active, key=self._key)
        kind, node = winner
        if kind != "edge":
            credit[winner] -= self.scale
            return frozenset((c,)), kind
        candidates = [v for v in edge_backlog if v != node]
        tx = augment(self.component, self.mpr, node, candidates,
                     lambda v: (-credit[("edge", v)], v))
        for v in tx:
            credit[("edge", v)] -= self.scale
        return tx, None


def make_scheduler(component, policy: MacPolicy, mpr: MprConfig, nc_enabled: bool,
                   traffic_type: str):
    if policy.kind == NODE_FAIR:
        return NodeFairScheduler(component, mpr)
    shares = flow_fair_shares(component, nc_enabled, mpr.m, traffic_type, policy.formula,
                              mpr.broadcast_cap2)
    return FlowFairScheduler(component, mpr, shares)
