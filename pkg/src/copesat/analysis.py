"""Exact analytical model of a single-relay component.

Everything here is a :class:`fractions.Fraction`. Loads are per-node slot
fractions rho_i = k_i / G; the component load P_T is the fraction of slots
needed to push all offered traffic through the component, split into the
relay's coded transmissions (rho_R) and the native transmissions (rho_M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coding import effective_mpr
from .mac_sched import MprConfig, UnsupportedConfiguration
from .topology import Kind, build_component
from .traffic import BROADCAST, TRAFFIC_TYPES, UNICAST, as_fraction


@dataclass(frozen=True)
class ComponentLoad:
    rho_r: Fraction
    rho_m: Fraction
    p_t: Fraction
    lower_bound: bool = False  # rho_m is only a lower bound for unequal edge loads


@dataclass(frozen=True)
class ThroughputPoint:
    p_star: Fraction
    s_max: Fraction
    s_sat: Fraction
    extrapolated: bool = False  # m does not divide the edge count


def _relay_fraction(kind: Kind, nc_enabled: bool, m: int, traffic_type: str, cap2: bool,
                    n: int = 5) -> Fraction:
    """Relay transmissions per edge packet in steady state."""
    if not nc_enabled:
        return Fraction(1)
    if n != 5:
        return _engine_relay_fraction(kind, nc_enabled, m, traffic_type, cap2, n)
    width = effective_mpr(m, cap2)
    if kind is Kind.CROSS and width <= 2:
        return Fraction(1, 4)  # all four edge packets in one XOR
    if traffic_type == BROADCAST and width >= 3:
        # edges stop overhearing each other: one extra degree of freedom per round
        return Fraction(3, 4)
    # opposite pairs in a cross, one packet per side in an X
    return Fraction(1, 2)


def _engine_relay_fraction(kind, nc_enabled, m, traffic_type, cap2, n):
    from .engine import relay_transmissions_per_round

    component = build_component(kind, n)
    relays = relay_transmissions_per_round(component, nc_enabled, MprConfig(m, cap2), traffic_type)
    if relays is None:
        raise UnsupportedConfiguration(f"no finite relay schedule for {kind.value}, n={n}, m={m}")
    return Fraction(relays, n - 1)


def _check(kind, m, traffic_type):
    try:
        kind = Kind(kind)
    except ValueError:
        raise UnsupportedConfiguration(f"unknown component kind {kind!r}") from None
    if not isinstance(m, int) or m < 1:
        raise UnsupportedConfiguration(f"MPR order must be a positive integer, got {m!r}")
    if traffic_type not in TRAFFIC_TYPES:
        raise UnsupportedConfiguration(f"unknown traffic type {traffic_type!r}")
    return kind


def component_load(loads, component_kind, nc_enabled: bool, m: int,
                   traffic_type: str = UNICAST, broadcast_cap2: bool = False) -> ComponentLoad:
    """rho_R, rho_M and P_T for per-node loads ``loads`` (center last).

    ``loads`` is a sequence of rho_i or a :class:`~copesat.traffic.LoadVector`.
    rho_M counts 1/m of a slot per edge packet plus the center's own packets,
    which is exact only when all edge loads are equal; otherwise the value is
    a lower bound and ``lower_bound`` is set.
    """
    kind = _check(component_kind, m, traffic_type)
    rho = tuple(as_fraction(r) for r in getattr(loads, "rho", loads))
    if len(rho) < 3:
        raise ValueError("a component has at least 3 nodes")
    if any(r < 0 for r in rho):
        raise ValueError("loads must be non-negative")
    edge_total = sum(rho[:-1], Fraction(0))
    width = effective_mpr(m, broadcast_cap2)
    rho_r = _relay_fraction(kind, nc_enabled, m, traffic_type, broadcast_cap2, len(rho)) * edge_total
    rho_m = edge_total / width + rho[-1]
    asymmetric = width > 1 and len(set(rho[:-1])) > 1
    return ComponentLoad(rho_r, rho_m, rho_r + rho_m, asymmetric)


def _cycle_length(kind, nc_enabled, m, traffic_type, cap2, n):
    """Slots for one symmetric round: every node offers one packet."""
    width = effective_mpr(m, cap2)
    relays = _relay_fraction(kind, nc_enabled, m, traffic_type, cap2, n) * (n - 1)
    return math.ceil(Fraction(n - 1, width)) + relays + 1


def max_throughput(component_kind, nc_enabled: bool, m: int, traffic_type: str = UNICAST,
                   broadcast_cap2: bool = False, n: int = 5) -> ThroughputPoint:
    """Operating point where P_T = 1 under symmetric loads.

    With equal loads rho on all n nodes, P_T = rho * (cycle length), so
    p_star = s_max = n / cycle. When m does not divide the edge count the
    native phase needs ceil((n-1)/m) slots per round and the point is
    flagged as extrapolated. s_sat is the node-fair limit as P grows: the
    center wins one slot in n and delivers one packet per slot.
    """
    kind = _check(component_kind, m, traffic_type)
    if (kind is Kind.CROSS and (n - 1) % 2) or n < 3:
        raise UnsupportedConfiguration(f"no {kind.value} component with n={n}")
    width = effective_mpr(m, broadcast_cap2)
    if (n - 1) % width == 0:
        load = component_load((Fraction(1),) * n, kind, nc_enabled, m, traffic_type, broadcast_cap2)
        rho = 1 / load.p_t
        p_star = n * rho
        extrapolated = False
    else:
        p_star = Fraction(n) / _cycle_length(kind, nc_enabled, m, traffic_type, broadcast_cap2, n)
        extrapolated = True
    s_sat = Fraction(1, n)
    return ThroughputPoint(p_star, p_star, s_sat, extrapolated)


def gain_decomposition(component_kind, m: int, traffic_type: str = UNICAST, n: int = 5) -> dict:
    """Maxima with neither, either and both of coding and MPR.

    ``additive_prediction`` adds the two individual gains over routing; the
    combination is super-additive when ``nc_plus_mpr`` exceeds it.
    """
    routing = max_throughput(component_kind, False, 1, traffic_type, n=n).s_max
    nc_only = max_throughput(component_kind, True, 1, traffic_type, n=n).s_max
    mpr_only = max_throughput(component_kind, False, m, traffic_type, n=n).s_max
    both = max_throughput(component_kind, True, m, traffic_type, n=n).s_max
    return {
        "routing": routing,
        "nc_only": nc_only,
        "mpr_only": mpr_only,
        "nc_plus_mpr": both,
        "additive_prediction": routing + (nc_only - routing) + (mpr_only - routing),
    }


def saturation_gap(component_kind, config, loads=None) -> Fraction:
    """s_max - s_sat under the node-fair MAC.

    ``config`` is anything with ``nc``, ``mpr`` and ``traffic`` attributes
    (e.g. :class:`~copesat.engine.SimConfig`). With an all-zero ``loads``
    there is nothing to saturate and the gap is 0.
    """
    if loads is not None and not any(getattr(loads, "k", loads)):
        return Fraction(0)
    n = getattr(config, "n", 5)
    point = max_throughput(component_kind, config.nc, config.mpr.m, config.traffic,
                           config.mpr.broadcast_cap2, n=n)
    return point.s_max - point.s_sat


def operating_g(point: ThroughputPoint, n: int = 5, multiple: int = 1) -> int:
    """Smallest G (times ``multiple``) giving integral per-node packet counts at p_star."""
    per_node = point.p_star / n
    return per_node.denominator * multiple
