"""Perturbation: remove-and-reinsert with concentric or sequential removal.

Each perturbation call removes and immediately re-inserts one vertex at a time
(omega times in total), using one of two insertion rules chosen at random:
cost-based (cheapest position whose predecessor is a neighbor of the vertex or
the depot) or distance-based (beside the nearest routed customer).  Re-creating
both of a vertex's former neighbors from the reference solution is forbidden,
which guarantees the output differs from the reference.  A repair pass restores
capacity feasibility at the end.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .instances import Instance, NeighborLists
from .moves import make_feasible
from .solution import Solution

INSERT_COST = 0      # cheapest admissible position (c-based rule)
INSERT_NEAREST = 1   # beside the nearest routed customer


def concentric_order(inst: Instance, center: int, omega: int,
                     nl: NeighborLists | None = None) -> list[int]:
    """Center plus its omega-1 nearest customers, ties broken by vertex index."""
    if omega <= 1:
        return [center]
    if nl is not None and omega - 1 <= int(nl.counts[center]):
        return [center] + [int(u) for u in nl.lists[center, : omega - 1]]
    coords = inst.coords
    d = np.floor(np.hypot(coords[:, 0] - coords[center, 0],
                          coords[:, 1] - coords[center, 1]) + 0.5)
    d[center] = np.inf
    d[0] = np.inf
    order = np.lexsort((np.arange(inst.n + 1), d))
    return [center] + [int(u) for u in order[: omega - 1]]


class _SequentialWalk:
    """Walk route-consecutive customers, cyclically within each route.

    ``take`` returns the next unprocessed customer and advances the cursor to
    its current successor.  The walk wraps past the depot inside a route; only
    when a route holds no unprocessed customer does it restart from a random
    point in another route.  Processed vertices encountered again (possible
    when removals interleave with re-insertions) are skipped.
    """

    def __init__(self, s: Solution, rng: np.random.Generator):
        self.s = s
        self.rng = rng
        self.processed = np.zeros(s.n + 1, dtype=bool)
        self.exhausted: set[int] = set()
        self.cursor = int(rng.integers(1, s.n + 1))

    def _route_has_unprocessed(self, r: int) -> bool:
        s = self.s
        h = s.n + 1 + r
        a = int(s.nxt[h])
        while a != h:
            if not self.processed[a]:
                return True
            a = int(s.nxt[a])
        return False

    def _jump(self) -> int:
        s = self.s
        candidates = []
        fallback = []
        for r, route in enumerate(s.routes):
            unproc = [v for v in route if not self.processed[v]]
            if not unproc:
                continue
            (fallback if r in self.exhausted else candidates).append((r, unproc))
        pool = candidates or fallback
        if not pool:
            raise RuntimeError("no unprocessed customer left")
        r, unproc = pool[int(self.rng.integers(len(pool)))]
        return unproc[int(self.rng.integers(len(unproc)))]

    def take(self) -> int:
        s = self.s
        v = self.cursor
        n = s.n
        while True:
            if v > n:  # depot sentinel: wrap within the route or leave it
                r = v - n - 1
                if self._route_has_unprocessed(r):
                    v = int(s.nxt[v])
                else:
                    self.exhausted.add(r)
                    v = self._jump()
                continue
            if int(s.rte[v]) < 0:  # detached vertex: restart elsewhere
                v = self._jump()
                continue
            if self.processed[v]:
                v = int(s.nxt[v])
                continue
            break
        self.processed[v] = True
        self.cursor = int(s.nxt[v])
        return v


def remove_concentric(s: Solution, omega: int, rng: np.random.Generator,
                      nl: NeighborLists | None = None) -> list[int]:
    """Remove the omega customers nearest to a random center (center included)."""
    if not 1 <= omega <= s.n:
        raise ValueError("omega must be in [1, n]")
    center = int(rng.integers(1, s.n + 1))
    removed = concentric_order(s.inst, center, omega, nl)
    for v in removed:
        K.detach_customer(s.n, s.cap, s.inst.coords, s.inst.demand, s.nxt, s.prv,
                          s.rte, s.pos, s.pld, s.load, s.st, v)
    s.mark_dirty()
    return removed


def remove_sequential(s: Solution, omega: int, rng: np.random.Generator) -> list[int]:
    """Remove omega route-consecutive customers from a random starting point."""
    if not 1 <= omega <= s.n:
        raise ValueError("omega must be in [1, n]")
    walk = _SequentialWalk(s, rng)
    removed = []
    for _ in range(omega):
        v = walk.take()
        removed.append(v)
        K.detach_customer(s.n, s.cap, s.inst.coords, s.inst.demand, s.nxt, s.prv,
                          s.rte, s.pos, s.pld, s.load, s.st, v)
    s.mark_dirty()
    return removed


def insert_vertex(s: Solution, v: int, heuristic: int,
                  forbidden: tuple[int, int] | None, nl: NeighborLists,
                  rng: np.random.Generator | None = None) -> int:
    """Insert the unrouted customer v; returns the node it was placed after.

    Cost-based insertion scans positions whose predecessor is in v's neighbor
    list or the depot (one empty route counts once); nearest-neighbor insertion
    tries both sides of v's closest routed customer, preferring the cheaper
    side (ties go after the neighbor).  A position whose neighbors are exactly
    ``forbidden`` is excluded; with no admissible candidate the globally
    cheapest position is used regardless of the restriction.  Capacity is
    ignored here; repair happens after the full perturbation.
    """
    if int(s.rte[v]) >= 0:
        raise ValueError(f"customer {v} is still routed")
    fa, fb = (-1, -1) if forbidden is None else forbidden
    aft = K.best_insert(s.n, s.cap, s.inst.coords, s.inst.demand, nl.lists, nl.counts,
                        s.nxt, s.prv, s.rte, s.load, s.st,
                        v, heuristic == INSERT_NEAREST, fa, fb, False)
    K.attach_customer(s.n, s.cap, s.inst.coords, s.inst.demand, s.nxt, s.prv, s.rte,
                      s.pos, s.pld, s.load, s.st, v, int(aft))
    s.mark_dirty()
    return int(aft)


def perturb(s_ref: Solution, heuristic_k: int, omega_k: int, nl: NeighborLists,
            rng: np.random.Generator) -> Solution:
    """One perturbation of the reference solution (heuristic_k: 0 concentric, 1 sequential).

    Draw order: insertion rule, then the removal center/start (and any route
    jumps for sequential removal).  Each removed vertex is re-inserted before
    the next removal.  The result is repaired to feasibility and its empty
    route slots compacted to exactly one.
    """
    if omega_k < 1:
        raise ValueError("omega must be >= 1")
    omega_k = min(omega_k, s_ref.n)
    s = s_ref.copy()
    inst = s.inst

    # former neighbors in the reference, as real vertex ids
    old_prev = np.where(s.prv[1:s.n + 1] > s.n, 0, s.prv[1:s.n + 1])
    old_next = np.where(s.nxt[1:s.n + 1] > s.n, 0, s.nxt[1:s.n + 1])

    insertion = INSERT_COST if rng.integers(0, 2) == 0 else INSERT_NEAREST

    if heuristic_k == 0:
        center = int(rng.integers(1, s.n + 1))
        order = iter(concentric_order(inst, center, omega_k, nl))
        next_vertex = lambda: next(order)
    elif heuristic_k == 1:
        walk = _SequentialWalk(s, rng)
        next_vertex = walk.take
    else:
        raise ValueError(f"unknown removal heuristic {heuristic_k}")

    for _ in range(omega_k):
        v = next_vertex()
        K.detach_customer(s.n, s.cap, inst.coords, inst.demand, s.nxt, s.prv,
                          s.rte, s.pos, s.pld, s.load, s.st, v)
        fa = int(old_prev[v - 1])
        fb = int(old_next[v - 1])
        aft = K.best_insert(s.n, s.cap, inst.coords, inst.demand, nl.lists, nl.counts,
                            s.nxt, s.prv, s.rte, s.load, s.st,
                            v, insertion == INSERT_NEAREST, fa, fb, False)
        K.attach_customer(s.n, s.cap, inst.coords, inst.demand, s.nxt, s.prv, s.rte,
                          s.pos, s.pld, s.load, s.st, v, int(aft))
    s.mark_dirty()
    make_feasible(s, nl)
    K.compact_routes(s.n, inst.demand, s.nxt, s.prv, s.rte, s.pos, s.pld, s.load, s.st)
    s.mark_dirty()
    return s
