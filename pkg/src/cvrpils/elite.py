"""Bounded pool of high-quality solutions kept pairwise distant.

Membership follows one rule set: a candidate enters only if no stored solution
is both better and within the separation distance; on entry it evicts every
stored solution that is worse (or equal) and within that distance, or the
worst member when the pool is full.  As a consequence members stay more than
``separation`` apart and the best stored cost never increases.
"""

from __future__ import annotations

import numpy as np

from .solution import Solution, solution_distance


class EliteSet:
    def __init__(self, capacity: int = 60, separation: int = 25):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.separation = separation
        self.members: list[Solution] = []

    def __len__(self) -> int:
        return len(self.members)

    def costs(self) -> list[int]:
        return [m.cost for m in self.members]

    def try_insert(self, s: Solution) -> bool:
        """Offer a feasible solution to the pool; returns True when stored."""
        if s.excess > 0:
            raise ValueError("elite candidates must be feasible")
        f_s = s.cost
        dists = np.empty(len(self.members), dtype=np.int64)
        for i, e in enumerate(self.members):
            d = solution_distance(s, e)
            if e.cost < f_s and d <= self.separation:
                return False  # a strictly better near-twin is already stored
            dists[i] = d
        worst_idx = -1
        if self.members:
            costs = self.costs()
            worst_idx = int(np.argmax(costs))  # ties: lowest index
        if not (len(self.members) < self.capacity or f_s <= self.members[worst_idx].cost):
            return False
        md_plus = [i for i in range(len(self.members))
                   if self.members[i].cost >= f_s and dists[i] <= self.separation]
        if md_plus:
            for i in reversed(md_plus):
                del self.members[i]
        elif len(self.members) >= self.capacity:
            del self.members[worst_idx]
        self.members.append(s.copy())
        return True

    def sample(self, rng: np.random.Generator) -> Solution:
        """Deep copy of a uniformly chosen member."""
        if not self.members:
            raise ValueError("cannot sample from an empty elite set")
        return self.members[int(rng.integers(len(self.members)))].copy()

    def best(self) -> Solution | None:
        """Minimum-cost member (ties: lowest index), or None when empty."""
        if not self.members:
            return None
        best = self.members[0]
        for m in self.members[1:]:
            if m.cost < best.cost:
                best = m
        return best

    def dump_csv(self) -> str:
        """Costs plus the pairwise distance matrix, for diagnostics."""
        k = len(self.members)
        lines = ["member,cost," + ",".join(f"d{j}" for j in range(k))]
        for i, m in enumerate(self.members):
            row = [str(i), str(m.cost)]
            for j, other in enumerate(self.members):
                row.append("0" if i == j else str(solution_distance(m, other)))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"
