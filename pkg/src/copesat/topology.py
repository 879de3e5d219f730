"""Cross and "X" single-relay topology components.

Nodes are numbered 1..N and node N is always the center (relay). Every
edge-to-edge flow crosses the center because source and destination are
never adjacent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations


class TopologyError(ValueError):
    """Invalid component parameters or an unknown node."""


class Kind(str, Enum):
    CROSS = "cross"
    X = "x"


@dataclass(frozen=True)
class TopologyComponent:
    kind: Kind
    n: int
    adjacency: frozenset  # frozenset of frozenset({a, b})
    x1: tuple = ()
    x2: tuple = ()
    flow_map: tuple = ()  # flow_map[i - 1] is the destination of node i

    @property
    def center(self) -> int:
        return self.n

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def edges(self) -> tuple:
        return tuple(range(1, self.n))

    def adjacent(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.adjacency

    def __repr__(self):
        if self.kind is Kind.X:
            return f"TopologyComponent(x, n={self.n}, x1={self.x1}, x2={self.x2})"
        return f"TopologyComponent(cross, n={self.n})"


def opposite(i: int, n: int) -> int:
    """Edge node across the center from edge node ``i`` in an ``n``-node cross."""
    half = (n - 1) // 2
    return ((i - 1 + half) % (n - 1)) + 1


def build_component(kind, n: int = 5, x1_size: int | None = None) -> TopologyComponent:
    """Build a canonical cross or X component.

    Args:
        kind: ``"cross"`` / ``"x"`` or a :class:`Kind`.
        n: total node count including the center.
        x1_size: size of the first edge set (X only). Defaults to half the
            edge nodes.

    Raises:
        TopologyError: on violated size constraints.
    """
    try:
        kind = Kind(kind)
    except ValueError:
        raise TopologyError(f"unknown component kind {kind!r}") from None
    if n < 3:
        raise TopologyError(f"a component needs at least 3 nodes, got n={n}")
    center = n
    edges = list(range(1, n))
    adj = {frozenset((e, center)) for e in edges}

    if kind is Kind.CROSS:
        if (n - 1) % 2:
            raise TopologyError(f"cross component needs an even number of edge nodes, got n={n}")
        for a, b in combinations(edges, 2):
            if b != opposite(a, n):
                adj.add(frozenset((a, b)))
        flows = [opposite(i, n) for i in edges]
        x1 = x2 = ()
    else:
        if x1_size is None:
            x1_size = (n - 1) // 2
        if not 1 <= x1_size <= n - 2:
            raise TopologyError(f"x1_size must be in [1, {n - 2}], got {x1_size}")
        x1 = tuple(edges[:x1_size])
        x2 = tuple(edges[x1_size:])
        for group in (x1, x2):
            for a, b in combinations(group, 2):
                adj.add(frozenset((a, b)))
        dest = {}
        for k, node in enumerate(x1):
            dest[node] = x2[k % len(x2)]
        for k, node in enumerate(x2):
            dest[node] = x1[k % len(x1)]
        flows = [dest[i] for i in edges]

    # the center's own flow is single-hop; node 1 by convention
    flows.append(1)
    return TopologyComponent(kind, n, frozenset(adj), x1, x2, tuple(flows))


def _check_node(component, node):
    if not isinstance(node, int) or not 1 <= node <= component.n:
        raise TopologyError(f"unknown node {node!r} (component has nodes 1..{component.n})")


def neighbors(component: TopologyComponent, node: int) -> frozenset:
    _check_node(component, node)
    return frozenset(v for v in component.nodes if v != node and component.adjacent(node, v))


def flow_dest(component: TopologyComponent, node: int) -> int:
    _check_node(component, node)
    return component.flow_map[node - 1]


def receptions(component: TopologyComponent, transmitters, m: int) -> dict:
    """Map each listening node to the transmitters it captures this slot.

    Half-duplex: transmitters hear nothing. A listener captures every
    transmitting neighbor as long as there are at most ``m`` of them and
    captures nothing otherwise.
    """
    tx = set(transmitters)
    heard = {}
    for u in component.nodes:
        if u in tx:
            continue
        senders = [v for v in sorted(tx) if component.adjacent(u, v)]
        if senders and len(senders) <= m:
            heard[u] = tuple(senders)
    return heard
