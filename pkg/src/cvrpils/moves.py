"""Move evaluation and the two search procedures built on one move engine.

Six move kinds share anchor pairs (v, u) where u ranges over v's neighbor list
plus the depot: inter-route Shift1, Swap* (each vertex re-inserted at the
cheapest position of the other route) and Cross (tail exchange), intra-route
Shift1, Swap1 and 2-opt.  ``local_search`` applies best-improvement over this
neighborhood to a feasible solution; ``make_feasible`` uses the same engine to
drive capacity excess to zero, opening an empty route when stuck.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .instances import NeighborLists
from .solution import Solution

KIND_NAMES = {
    K.SHIFT_INTER: "ShiftInter",
    K.SWAP_STAR: "SwapStar",
    K.CROSS: "Cross",
    K.SHIFT_INTRA: "ShiftIntra",
    K.SWAP_INTRA: "SwapIntra",
    K.TWO_OPT: "TwoOpt",
}


@dataclass(frozen=True)
class MoveDelta:
    """One evaluated move: exact cost/excess change plus the data to apply it.

    ``args`` are kernel apply arguments (insert-after node, swap partner, or
    the two Swap* insertion predecessors), so applying never re-searches.
    """

    kind: int
    v: int
    anchor: int
    cost_delta: int
    excess_delta: int
    args: tuple[int, int, int]

    @property
    def kind_name(self) -> str:
        return KIND_NAMES[self.kind]


def _excess_after_loads(s: Solution, pairs: list[tuple[int, int]]) -> int:
    """Excess delta if the listed routes took the listed new loads."""
    delta = 0
    for r, new_load in pairs:
        delta += max(0, new_load - s.cap) - max(0, int(s.load[r]) - s.cap)
    return delta


def delta_shift1_inter(s: Solution, v: int, after: int) -> MoveDelta:
    """Move customer v right after node ``after`` in a different route."""
    rv = s.route_of(v)
    ra = int(s.rte[after])
    if ra < 0 or rv < 0:
        raise ValueError("operands must be routed")
    if ra == rv:
        raise ValueError("target position must be in another route")
    dc = K._ev_relocate(s.n, s.inst.coords, s.nxt, s.prv, v, after)
    if dc >= K.NULL_DELTA:
        raise ValueError("null move")
    qv = int(s.inst.demand[v])
    dex = _excess_after_loads(s, [(rv, int(s.load[rv]) - qv), (ra, int(s.load[ra]) + qv)])
    return MoveDelta(K.SHIFT_INTER, v, after, int(dc), dex, (after, -1, -1))


def delta_shift1_intra(s: Solution, v: int, after: int) -> MoveDelta:
    """Relocate customer v after node ``after`` within its own route."""
    if int(s.rte[after]) != s.route_of(v):
        raise ValueError("target position must be in the same route")
    dc = K._ev_relocate(s.n, s.inst.coords, s.nxt, s.prv, v, after)
    if dc >= K.NULL_DELTA:
        raise ValueError("null move (vertex already at that position)")
    return MoveDelta(K.SHIFT_INTRA, v, after, int(dc), 0, (after, -1, -1))


def delta_swap1_intra(s: Solution, v: int, u: int) -> MoveDelta:
    """Swap the positions of customers v and u in one route."""
    if v == u:
        raise ValueError("null move")
    if s.route_of(v) != s.route_of(u):
        raise ValueError("operands must share a route")
    dc = K._ev_swap1(s.n, s.inst.coords, s.nxt, s.prv, v, u)
    return MoveDelta(K.SWAP_INTRA, v, u, int(dc), 0, (u, -1, -1))


def delta_two_opt(s: Solution, v: int, u: int) -> MoveDelta:
    """Reverse the route segment between the successor edges of v and u."""
    if v == u:
        raise ValueError("null move")
    if s.route_of(v) != s.route_of(u):
        raise ValueError("operands must share a route")
    dc = K._ev_two_opt(s.n, s.inst.coords, s.nxt, s.pos, v, u)
    if dc >= K.NULL_DELTA:
        raise ValueError("null move (adjacent reference points)")
    return MoveDelta(K.TWO_OPT, v, u, int(dc), 0, (u, -1, -1))


def delta_cross(s: Solution, v: int, u: int) -> MoveDelta:
    """Exchange the tails following v and u (distinct routes)."""
    rv, ru = s.route_of(v), s.route_of(u)
    if rv == ru:
        raise ValueError("operands must be in distinct routes")
    dc, lv, lu = K._ev_cross(s.n, s.inst.coords, s.nxt, s.pld, s.load, s.rte, v, u)
    dex = _excess_after_loads(s, [(rv, int(lv)), (ru, int(lu))])
    return MoveDelta(K.CROSS, v, u, int(dc), dex, (u, -1, -1))


def delta_swap_star(s: Solution, v: int, u: int) -> MoveDelta:
    """Exchange the routes of v and u, each taking the other route's cheapest slot."""
    rv, ru = s.route_of(v), s.route_of(u)
    if rv == ru:
        raise ValueError("operands must be in distinct routes")
    dc, pv, pu, lv, lu = K._ev_swapstar(s.n, s.inst.coords, s.inst.demand, s.nxt,
                                        s.prv, s.rte, s.load, v, u)
    dex = _excess_after_loads(s, [(rv, int(lv)), (ru, int(lu))])
    return MoveDelta(K.SWAP_STAR, v, u, int(dc), dex, (u, int(pv), int(pu)))


def apply_move(s: Solution, delta: MoveDelta) -> Solution:
    """Apply an evaluated move; cached cost/excess shift by exactly the deltas."""
    a1, a2, a3 = delta.args
    K._apply_move(s.n, s.cap, s.inst.coords, s.inst.demand, s.nxt, s.prv, s.rte,
                  s.pos, s.pld, s.load, s.st, s._seg, delta.kind, delta.v, a1, a2, a3)
    s.mark_dirty()
    return s


_NO_LOG = np.zeros((0, 4), dtype=np.int64)


def local_search(s: Solution, nl: NeighborLists,
                 move_log: np.ndarray | None = None) -> Solution:
    """Best-improvement descent to a local optimum of the composite neighborhood.

    Customers are scanned in index order; each customer's best strictly
    improving, capacity-feasible move is applied on the spot, and passes repeat
    until one applies nothing.  Only feasible solutions may enter.  Pass a
    preallocated (k, 4) int64 array as ``move_log`` to record applied moves as
    (kind, vertex, anchor, delta) rows; the count is returned in ``s`` order.
    """
    if s.excess > 0:
        raise ValueError("local_search requires a feasible solution (excess = 0)")
    log = _NO_LOG if move_log is None else move_log
    cnt = np.zeros(1, dtype=np.int64)
    K.run_local_search(s.n, s.cap, s.inst.coords, s.inst.demand, nl.lists, nl.counts,
                       s.nxt, s.prv, s.rte, s.pos, s.pld, s.load, s.st, s._seg,
                       log, cnt)
    if move_log is not None:
        move_log[cnt[0]:, 0] = 0
    s.mark_dirty()
    return s


def make_feasible(s: Solution, nl: NeighborLists,
                  move_log: np.ndarray | None = None) -> Solution:
    """Drive total capacity excess to zero; feasible input returns unchanged.

    Moves are chosen best-first on the key (excess delta, cost delta) among
    excess-reducing candidates; when none exists an empty route is added and
    the scan restarts, which always unblocks while any route is overloaded.
    """
    if s.excess == 0:
        return s
    log = _NO_LOG if move_log is None else move_log
    cnt = np.zeros(1, dtype=np.int64)
    rc = K.run_repair(s.n, s.cap, s.inst.coords, s.inst.demand, nl.lists, nl.counts,
                      s.nxt, s.prv, s.rte, s.pos, s.pld, s.load, s.st, s._seg,
                      log, cnt)
    if move_log is not None:
        move_log[cnt[0]:, 0] = 0
    s.mark_dirty()
    if rc != 0:
        raise RuntimeError(f"repair failed with status {rc}")
    return s
