from collections import deque

import pytest
from hypothesis import given, strategies as st

from copesat.topology import (Kind, TopologyError, build_component, flow_dest, neighbors,
                              opposite, receptions)


def test_cross5_adjacency(cross5):
    assert not cross5.adjacent(1, 3)
    assert not cross5.adjacent(2, 4)
    for a, b in [(1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (2, 5), (3, 5), (4, 5)]:
        assert cross5.adjacent(a, b)
    assert cross5.flow_map == (3, 4, 1, 2, 1)


def test_x5_sets(x5):
    assert x5.x1 == (1, 2) and x5.x2 == (3, 4)
    assert x5.adjacent(1, 2) and x5.adjacent(3, 4)
    for a in (1, 2):
        for b in (3, 4):
            assert not x5.adjacent(a, b)
    assert all(x5.adjacent(5, v) for v in range(1, 5))


def test_cross3():
    c = build_component("cross", 3)
    assert c.edges == (1, 2)
    assert opposite(1, 3) == 2
    assert not c.adjacent(1, 2)
    assert c.flow_map == (2, 1, 1)


def test_neighbors(cross5, x5):
    assert neighbors(cross5, 1) == {2, 4, 5}
    assert neighbors(x5, 1) == {2, 5}
    assert neighbors(cross5, 5) == {1, 2, 3, 4}


def test_flow_dest(cross5, x5):
    assert flow_dest(cross5, 2) == 4
    assert flow_dest(x5, 3) == 1
    assert flow_dest(cross5, 5) == 1


@pytest.mark.parametrize("args", [("cross", 4), ("cross", 2), ("x", 5, 0), ("x", 5, 4), ("ring", 5)])
def test_invalid_parameters(args):
    with pytest.raises(TopologyError):
        build_component(*args)


def test_unknown_node(cross5):
    with pytest.raises(TopologyError):
        neighbors(cross5, 6)
    with pytest.raises(TopologyError):
        flow_dest(cross5, 0)


def _two_hop_only(comp, src, dst):
    # BFS path length between source and destination
    seen, queue = {src: 0}, deque([src])
    while queue:
        u = queue.popleft()
        for v in neighbors(comp, u):
            if v not in seen:
                seen[v] = seen[u] + 1
                queue.append(v)
    return seen[dst] == 2


components = st.one_of(
    st.integers(1, 5).map(lambda h: build_component("cross", 2 * h + 1)),
    st.integers(3, 11).flatmap(
        lambda n: st.integers(1, n - 2).map(lambda x1: build_component("x", n, x1))),
)


@given(components)
def test_component_invariants(comp):
    n = comp.n
    for a in comp.nodes:
        assert not comp.adjacent(a, a)
        for b in comp.nodes:
            assert comp.adjacent(a, b) == comp.adjacent(b, a)
    assert all(comp.adjacent(n, e) for e in comp.edges)
    assert flow_dest(comp, n) in comp.edges
    for e in comp.edges:
        d = flow_dest(comp, e)
        assert d != e and d in comp.edges
        assert _two_hop_only(comp, e, d)
    if comp.kind is Kind.CROSS:
        assert sorted(comp.flow_map[:-1]) == list(comp.edges)
    else:
        assert len(comp.x1) + len(comp.x2) == n - 1
        for e in comp.x1:
            assert flow_dest(comp, e) in comp.x2
        for e in comp.x2:
            assert flow_dest(comp, e) in comp.x1
        if len(comp.x1) == len(comp.x2):
            assert sorted(comp.flow_map[:-1]) == list(comp.edges)


def test_build_is_deterministic():
    assert build_component("x", 7, 2) == build_component("x", 7, 2)


def test_receptions_respect_mpr_order(cross5):
    # nodes 1 and 3 transmit: the center hears both under m=2, nothing under m=1
    assert receptions(cross5, {1, 3}, 2)[5] == (1, 3)
    assert 5 not in receptions(cross5, {1, 3}, 1)
    # node 2 neighbors both transmitters
    assert receptions(cross5, {1, 3}, 2)[2] == (1, 3)
    assert 2 not in receptions(cross5, {1, 3}, 1)
    # transmitters hear nothing
    assert 1 not in receptions(cross5, {1}, 4)
