"""Offered-load generation and packet materialization."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .topology import flow_dest

UNICAST = "unicast"
BROADCAST = "broadcast"
TRAFFIC_TYPES = (UNICAST, BROADCAST)

# destination marker for broadcast packets
ALL = 0


def as_fraction(x) -> Fraction:
    """Exact value of ``x``; floats go through their shortest repr (0.05 -> 1/20)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class LoadVector:
    p: Fraction
    g: int
    k: tuple

    @property
    def n(self):
        return len(self.k)

    @property
    def total(self):
        return sum(self.k)

    @property
    def rho(self):
        return tuple(Fraction(ki, self.g) for ki in self.k)


@dataclass(frozen=True)
class Packet:
    uid: int
    origin: int
    dest: int  # ALL for broadcast


def packet_count(p, g: int) -> int:
    """K = round(P * G), half-up."""
    value = Decimal(as_fraction(p).numerator) * g / Decimal(as_fraction(p).denominator)
    return int(value.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def draw_loads(p, n: int, g: int, rng) -> LoadVector:
    """Split K = round(p*g) packets over ``n`` nodes with sequential binomials.

    Node i draws from Binomial(K - sum(k_<i), 1/(n - i + 1)); the last node
    takes the remainder, so the joint law is uniform multinomial.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    if p < 0 or n < 1 or g < 1:
        raise ValueError(f"need p >= 0, n >= 1, g >= 1 (got p={p}, n={n}, g={g})")
    remaining = packet_count(p, g)
    k = []
    for i in range(1, n):
        ki = int(rng.binomial(remaining, 1.0 / (n - i + 1))) if remaining else 0
        k.append(ki)
        remaining -= ki
    k.append(remaining)
    return LoadVector(as_fraction(p), g, tuple(k))


def symmetric_loads(p, n: int, g: int) -> LoadVector:
    per_node = as_fraction(p) * g / n
    if per_node.denominator != 1:
        raise ValueError(
            f"p*g/n = {per_node} is not an integer; choose g so that p*g/n is integral"
        )
    return LoadVector(as_fraction(p), g, (int(per_node),) * n)


def make_packets(loads: LoadVector, component, traffic_type: str = UNICAST) -> list:
    """Materialize ``k_i`` packets per node; uids run node by node from 0."""
    if loads.n != component.n:
        raise ValueError(f"load vector has {loads.n} nodes, component has {component.n}")
    if traffic_type not in TRAFFIC_TYPES:
        raise ValueError(f"unknown traffic type {traffic_type!r}")
    packets = []
    for node, count in zip(component.nodes, loads.k):
        dest = flow_dest(component, node) if traffic_type == UNICAST else ALL
        for _ in range(count):
            packets.append(Packet(len(packets), node, dest))
    return packets
