"""Throughput of COPE-style coding and multi-packet reception in single-relay wireless components."""

__version__ = "0.1.0"

from .analysis import (ComponentLoad, ThroughputPoint, component_load, gain_decomposition,
                       max_throughput, saturation_gap)
from .coding import CodingBudget, DecoderState, Transmission, max_code_size, select_code_set
from .engine import SimConfig, SimResult, SweepCurve, monte_carlo, run, sweep
from .mac_sched import (MacPolicy, MprConfig, ShareVector, UnsupportedConfiguration,
                        flow_fair_shares, next_transmit_set)
from .topology import Kind, TopologyComponent, TopologyError, build_component, flow_dest, neighbors
from .traffic import LoadVector, draw_loads, symmetric_loads

__all__ = [
    "CodingBudget", "ComponentLoad", "DecoderState", "Kind", "LoadVector", "MacPolicy",
    "MprConfig", "ShareVector", "SimConfig", "SimResult", "SweepCurve", "ThroughputPoint",
    "TopologyComponent", "TopologyError", "Transmission", "UnsupportedConfiguration",
    "build_component", "component_load", "draw_loads", "flow_dest", "flow_fair_shares",
    "gain_decomposition", "max_code_size", "max_throughput", "monte_carlo", "neighbors",
    "next_transmit_set", "run", "saturation_gap", "select_code_set", "sweep", "symmetric_loads",
]
