"""Solution representation, objective, edge-set distance and initial construction.

A Solution owns flat arrays describing a set of routes as doubly linked lists
(see ``_kernels``).  Empty route slots are legal and contribute zero cost; they
are kept so the move engine can open routes.  The cached cost and excess are
maintained incrementally by every mutation and can always be recomputed from
scratch for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .instances import Instance, NeighborLists


class Solution:
    """Mutable set of routes over one instance.

    Owned by a single search thread; ``copy()`` yields an independent deep
    copy.  The edge key set (used by the distance metric and the elite pool)
    is cached lazily and dropped on mutation.
    """

    __slots__ = ("inst", "n", "cap", "m_cap", "nxt", "prv", "rte", "pos", "pld",
                 "load", "st", "_seg", "_edge_cache")

    def __init__(self, inst: Instance, num_routes: int = 1):
        n = inst.n
        self.inst = inst
        self.n = n
        self.cap = int(inst.capacity)
        self.m_cap = n + 2
        size = n + 1 + self.m_cap
        self.nxt = np.full(size, -1, dtype=np.int64)
        self.prv = np.full(size, -1, dtype=np.int64)
        self.rte = np.full(size, -1, dtype=np.int64)
        self.pos = np.zeros(size, dtype=np.int64)
        self.pld = np.zeros(size, dtype=np.int64)
        self.load = np.zeros(self.m_cap, dtype=np.int64)
        self.st = np.zeros(3, dtype=np.int64)
        self._seg = np.zeros(size, dtype=np.int64)
        self._edge_cache: frozenset[int] | None = None
        num_routes = max(1, min(num_routes, self.m_cap))
        for r in range(num_routes):
            h = n + 1 + r
            self.nxt[h] = h
            self.prv[h] = h
            self.rte[h] = r
        self.st[2] = num_routes

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_routes(cls, inst: Instance, routes: list[list[int]]) -> "Solution":
        """Build a solution from explicit route lists (customers only, no depot)."""
        if len(routes) > inst.n + 2:
            raise ValueError(f"too many route slots ({len(routes)}) for {inst.n} customers")
        s = cls(inst, num_routes=max(1, len(routes)))
        n = inst.n
        seen: set[int] = set()
        for r, route in enumerate(routes):
            h = n + 1 + r
            prev = h
            for v in route:
                if not (1 <= v <= n):
                    raise ValueError(f"customer {v} out of range")
                if v in seen:
                    raise ValueError(f"customer {v} listed twice")
                seen.add(v)
                s.nxt[prev] = v
                s.prv[v] = prev
                s.rte[v] = r
                prev = v
            s.nxt[prev] = h
            s.prv[h] = prev
        if len(seen) != n:
            missing = sorted(set(range(1, n + 1)) - seen)
            raise ValueError(f"customers missing from routes: {missing[:10]}")
        s._refresh_caches()
        return s

    def _refresh_caches(self):
        """Recompute loads, prefix data, cost and excess from the link structure."""
        n = self.n
        m = int(self.st[2])
        for r in range(m):
            h = n + 1 + r
            total = 0
            a = int(self.nxt[h])
            while a != h:
                total += int(self.inst.demand[a])
                a = int(self.nxt[a])
            self.load[r] = total
            K._rebuild(n, r, self.nxt, self.rte, self.pos, self.pld, self.inst.demand)
        self.st[0] = K.recompute_cost(n, self.inst.coords, self.nxt, self.st)
        self.st[1] = int(np.maximum(self.load[:m] - self.cap, 0).sum())
        self._edge_cache = None

    def copy(self) -> "Solution":
        dup = object.__new__(Solution)
        dup.inst = self.inst
        dup.n = self.n
        dup.cap = self.cap
        dup.m_cap = self.m_cap
        dup.nxt = self.nxt.copy()
        dup.prv = self.prv.copy()
        dup.rte = self.rte.copy()
        dup.pos = self.pos.copy()
        dup.pld = self.pld.copy()
        dup.load = self.load.copy()
        dup.st = self.st.copy()
        dup._seg = np.zeros_like(self._seg)
        dup._edge_cache = self._edge_cache  # frozenset is immutable, safe to share
        return dup

    # -- views ----------------------------------------------------------------

    @property
    def cost(self) -> int:
        return int(self.st[0])

    @property
    def excess(self) -> int:
        return int(self.st[1])

    @property
    def num_route_slots(self) -> int:
        return int(self.st[2])

    @property
    def routes(self) -> list[list[int]]:
        """All route slots as customer lists (empty slots included)."""
        out = []
        n = self.n
        for r in range(self.num_route_slots):
            h = n + 1 + r
            route = []
            a = int(self.nxt[h])
            while a != h:
                route.append(a)
                a = int(self.nxt[a])
            out.append(route)
        return out

    @property
    def nonempty_routes(self) -> list[list[int]]:
        return [r for r in self.routes if r]

    @property
    def route_loads(self) -> np.ndarray:
        return self.load[: self.num_route_slots].copy()

    def position_of(self, v: int) -> tuple[int, int]:
        """Route id and 1-based position of customer v."""
        return int(self.rte[v]), int(self.pos[v])

    def route_of(self, v: int) -> int:
        return int(self.rte[v])

    def mark_dirty(self):
        self._edge_cache = None

    # -- edge set --------------------------------------------------------------

    def edge_keys(self) -> frozenset[int]:
        """Set of canonical keys (min*(n+1)+max) of the undirected route edges.

        Depot legs collapse per customer endpoint: an out-and-back route
        contributes a single element, and routes of distinct customers never
        share keys.  Cached until the next mutation.
        """
        if self._edge_cache is None:
            buf = np.empty(self.n + 1 + self.num_route_slots, dtype=np.int64)
            cnt = K.collect_edge_keys(self.n, self.nxt, self.st, buf)
            self._edge_cache = frozenset(buf[:cnt].tolist())
        return self._edge_cache


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def solution_cost(s: Solution, inst: Instance) -> int:
    """Total edge weight recomputed from scratch (depot legs included)."""
    total = 0
    coords = inst.coords
    for route in s.routes:
        prev = 0
        for v in route:
            dx = coords[prev, 0] - coords[v, 0]
            dy = coords[prev, 1] - coords[v, 1]
            total += int(math.sqrt(dx * dx + dy * dy) + 0.5)
            prev = v
        if route:
            dx = coords[prev, 0] - coords[0, 0]
            dy = coords[prev, 1] - coords[0, 1]
            total += int(math.sqrt(dx * dx + dy * dy) + 0.5)
    return total


def edge_set(s: Solution) -> frozenset[tuple[int, int]]:
    """Undirected edges of the solution as sorted vertex pairs."""
    k = s.n + 1
    return frozenset((key // k, key % k) for key in s.edge_keys())


def solution_distance(a: Solution, b: Solution) -> int:
    """Number of edges in exactly one of the two solutions (symmetric difference)."""
    ea = a.edge_keys()
    eb = b.edge_keys()
    return len(ea) + len(eb) - 2 * len(ea & eb)


def min_routes(inst: Instance) -> int:
    """Lower bound on the route count: ceil of total demand over capacity."""
    total = int(inst.demand.sum())
    return max(1, -(-total // inst.capacity))


def validate_routes(routes: list[list[int]], inst: Instance) -> list[Violation]:
    """Audit raw route lists (duplicated/missing customers, capacity excess).

    The Solution wrapper cannot represent a duplicated customer, so externally
    supplied routes are checked in list form before being wrapped.
    """
    out: list[Violation] = []
    seen: dict[int, int] = {}
    for r, route in enumerate(routes):
        for v in route:
            if not (1 <= v <= inst.n):
                out.append(Violation("unknown customer", f"vertex {v} in route {r}"))
            elif v in seen:
                out.append(Violation("duplicate customer", f"customer {v} in routes {seen[v]} and {r}"))
            else:
                seen[v] = r
    missing = [v for v in range(1, inst.n + 1) if v not in seen]
    if missing:
        out.append(Violation("missing customer", f"{missing[:10]}"))
    excess = sum(max(0, int(sum(int(inst.demand[v]) for v in route if 1 <= v <= inst.n)) - inst.capacity)
                 for route in routes)
    if excess > 0:
        out.append(Violation("capacity excess", f"total excess {excess}"))
    return out


def validate(s: Solution | list[list[int]], inst: Instance) -> list[Violation]:
    """Structural audit; returns an empty list when the solution is consistent.

    Accepts either a Solution (full audit including cached-value drift) or raw
    route lists (duplicate/missing/capacity checks only).
    """
    if isinstance(s, list):
        return validate_routes(s, inst)
    out: list[Violation] = []
    n = inst.n
    seen: dict[int, int] = {}
    routes = s.routes
    for r, route in enumerate(routes):
        for p, v in enumerate(route, start=1):
            if v in seen:
                out.append(Violation("duplicate customer", f"customer {v} in routes {seen[v]} and {r}"))
            seen[v] = r
            if s.route_of(v) != r or int(s.pos[v]) != p:
                out.append(Violation("position drift", f"customer {v}: stored {s.position_of(v)}, actual ({r}, {p})"))
    missing = [v for v in range(1, n + 1) if v not in seen]
    if missing:
        out.append(Violation("missing customer", f"{missing[:10]}"))
    for r, route in enumerate(routes):
        actual = int(sum(int(inst.demand[v]) for v in route))
        if actual != int(s.load[r]):
            out.append(Violation("load drift", f"route {r}: stored {int(s.load[r])}, actual {actual}"))
    true_cost = solution_cost(s, inst)
    if true_cost != s.cost:
        out.append(Violation("cost drift", f"stored {s.cost}, actual {true_cost}"))
    true_excess = sum(max(0, int(s.load[r]) - inst.capacity) for r in range(s.num_route_slots))
    if true_excess != s.excess:
        out.append(Violation("excess drift", f"stored {s.excess}, actual {true_excess}"))
    if true_excess > 0:
        out.append(Violation("capacity excess", f"total excess {true_excess}"))
    return out


def construct_initial(inst: Instance, nl: NeighborLists, rng: np.random.Generator) -> Solution:
    """Build a feasible starting solution.

    Customers are shuffled and inserted by the cost-based rule among routes
    with residual capacity (min_routes empty routes are opened up front); if no
    position fits, the globally cheapest position is used and the repair
    procedure fixes the overflow afterwards.
    """
    from .moves import make_feasible  # local import to avoid a cycle

    s = Solution(inst, num_routes=min_routes(inst))
    order = rng.permutation(np.arange(1, inst.n + 1))
    for v in order:
        aft = K.best_insert(s.n, s.cap, inst.coords, inst.demand, nl.lists, nl.counts,
                            s.nxt, s.prv, s.rte, s.load, s.st,
                            int(v), False, -1, -1, True)
        K.attach_customer(s.n, s.cap, inst.coords, inst.demand, s.nxt, s.prv, s.rte,
                          s.pos, s.pld, s.load, s.st, int(v), int(aft))
    s.mark_dirty()
    make_feasible(s, nl)
    K.compact_routes(s.n, inst.demand, s.nxt, s.prv, s.rte, s.pos, s.pld, s.load, s.st)
    s.mark_dirty()
    return s


def format_solution(s: Solution, cost: int | None = None) -> str:
    """CVRPLIB solution convention: one line per non-empty route plus the cost."""
    lines = []
    for k, route in enumerate(s.nonempty_routes, start=1):
        lines.append(f"Route #{k}: " + " ".join(str(v) for v in route))
    lines.append(f"Cost {s.cost if cost is None else cost}")
    return "\n".join(lines) + "\n"


def parse_solution_routes(text: str) -> tuple[list[list[int]], int | None]:
    """Parse the CVRPLIB solution convention into raw route lists and the stated cost."""
    routes: list[list[int]] = []
    stated: int | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith("route"):
            _, _, rest = line.partition(":")
            routes.append([int(tok) for tok in rest.split()])
        elif low.startswith("cost"):
            stated = int(float(line.split()[-1]))
    if not routes:
        raise ValueError("no routes found in solution text")
    return routes, stated


def parse_solution(text: str, inst: Instance) -> tuple[Solution, int | None]:
    """Parse the CVRPLIB solution convention; returns the solution and the stated cost."""
    routes, stated = parse_solution_routes(text)
    return Solution.from_routes(inst, routes), stated
