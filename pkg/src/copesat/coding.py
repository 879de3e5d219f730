"""COPE-style XOR coding at the relay and per-node decoding.

Packets are coordinates of GF(2)^K; a payload is the XOR of a set of
natives and is stored as an int bitmask (bit ``uid`` set). Each node keeps
what it knows as a subspace: decoded natives plus a reduced row-echelon
basis of coded combinations it could not yet resolve.
"""

from __future__ import annotations

from dataclasses import dataclass

from .topology import Kind
from .traffic import BROADCAST, UNICAST


def mask(uids) -> int:
    vec = 0
    for uid in uids:
        vec |= 1 << uid
    return vec


def bits(vec: int):
    while vec:
        low = vec & -vec
        yield low.bit_length() - 1
        vec ^= low


class DecoderState:
    """Everything one node can reconstruct from what it has received."""

    __slots__ = ("known", "rows")

    def __init__(self, natives=()):
        self.known = mask(natives)
        # pivot bit -> row; rows hold no known bits and no foreign pivots
        self.rows = {}

    def holds(self, uid: int) -> bool:
        return bool(self.known >> uid & 1)

    @property
    def natives(self) -> frozenset:
        return frozenset(bits(self.known))

    @property
    def rank(self) -> int:
        return self.known.bit_count() + len(self.rows)

    def _reduce(self, vec: int) -> int:
        vec &= ~self.known
        rows = self.rows
        if rows:
            pending = vec
            while pending:
                low = pending & -pending
                pending ^= low
                row = rows.get(low)
                if row is not None:
                    vec ^= row
        return vec

    def contains(self, vec: int) -> bool:
        """True if ``vec`` is already in this node's span (not innovative)."""
        return self._reduce(vec) == 0

    def add(self, vec: int) -> list:
        """Absorb a received payload; return uids that became decodable."""
        r = self._reduce(vec)
        if not r:
            return []
        pivot = r & -r
        touched = [pivot]
        for p, row in self.rows.items():
            if row & pivot:
                self.rows[p] = row ^ r
                touched.append(p)
        self.rows[pivot] = r
        decoded = []
        for p in touched:
            row = self.rows[p]
            if row == p:
                del self.rows[p]
                self.known |= p
                decoded.append(p.bit_length() - 1)
        return decoded

    def copy(self):
        other = DecoderState()
        other.known = self.known
        other.rows = dict(self.rows)
        return other


@dataclass(frozen=True)
class Transmission:
    sender: int
    payload: tuple  # uids; one uid is a native send

    @property
    def vector(self) -> int:
        return mask(self.payload)

    @property
    def coded(self) -> bool:
        return len(self.payload) > 1


@dataclass(frozen=True)
class CodingBudget:
    c: int


def effective_mpr(m: int, cap2: bool = False) -> int:
    return min(m, 2) if cap2 else m


def max_code_size(component_kind, m: int, n: int = 5, cap2: bool = False) -> CodingBudget:
    """How many natives the relay may XOR together.

    In a cross every edge misses only its opposite's packet while at most two
    edges transmit at once, so all N-1 edge packets code together; once more
    edges transmit simultaneously they stop overhearing each other and only
    opposite pairs remain decodable. In an X the two sides never overhear
    each other, so at most one packet per side.
    """
    if m < 1:
        raise ValueError(f"MPR order must be >= 1, got {m}")
    kind = Kind(component_kind)
    if kind is Kind.CROSS:
        return CodingBudget(n - 1 if effective_mpr(m, cap2) <= 2 else 2)
    return CodingBudget(2)


def apply_reception(state: DecoderState, transmission: Transmission) -> set:
    return set(state.add(transmission.vector))


def _innovative_count(vec, states, sender):
    return sum(1 for node, st in states.items() if node != sender and not st.contains(vec))


def select_code_set(relay_queue, decoder_states, budget, traffic_type=UNICAST, sender=None):
    """Choose the relay's next payload.

    The FIFO head is always sent, so nothing is ever held back waiting for a
    coding partner. Further queued packets are added greedily in FIFO order,
    up to ``budget.c`` natives:

    * unicast: a candidate joins if its next hop is new to the payload and
      every destination in the payload can decode its own packet right away;
    * broadcast: a candidate from a new origin joins if it makes the payload
      innovative for strictly more nodes.

    Args:
        relay_queue: pending packets, oldest first.
        decoder_states: node -> :class:`DecoderState`.
        budget: :class:`CodingBudget` or an int.
        sender: transmitting node, excluded from the broadcast count.
    """
    if not relay_queue:
        raise ValueError("relay queue is empty")
    c = budget.c if isinstance(budget, CodingBudget) else int(budget)
    head = relay_queue[0]
    chosen = [head]
    vec = 1 << head.uid
    if c > 1 and len(relay_queue) > 1:
        if traffic_type == UNICAST:
            hops = {head.dest}
            for q in relay_queue[1:]:
                if q.dest in hops:
                    continue
                cand = vec | (1 << q.uid)
                if all(decoder_states[r.dest].contains(cand ^ (1 << r.uid)) for r in (*chosen, q)):
                    chosen.append(q)
                    vec = cand
                    hops.add(q.dest)
                    if len(chosen) >= c:
                        break
        elif traffic_type == BROADCAST:
            origins = {head.origin}
            best = _innovative_count(vec, decoder_states, sender)
            for q in relay_queue[1:]:
                if q.origin in origins:
                    continue
                cand = vec | (1 << q.uid)
                score = _innovative_count(cand, decoder_states, sender)
                if score > best:
                    chosen.append(q)
                    vec, best = cand, score
                    origins.add(q.origin)
                    if len(chosen) >= c:
                        break
        else:
            raise ValueError(f"unknown traffic type {traffic_type!r}")
    return Transmission(sender if sender is not None else -1, tuple(p.uid for p in chosen))
