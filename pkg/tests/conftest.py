from __future__ import annotations

import numpy as np
import pytest

from cvrpils import Instance, RunConfig, build_neighbor_lists, run


def make_instance(n: int, seed: int, capacity: int | None = None,
                  demand_high: int = 10, box: float = 100.0) -> Instance:
    """Uniform random instance with the depot near the middle."""
    rng = np.random.default_rng(seed)
    coords = np.vstack([[box / 2, box / 2], rng.uniform(0.0, box, size=(n, 2))])
    demand = np.concatenate([[0], rng.integers(1, demand_high + 1, size=n)])
    if capacity is None:
        capacity = max(int(demand[1:].max()), int(demand.sum()) // max(2, n // 5))
    return Instance(name=f"rand-n{n}-s{seed}", n=n, coords=coords,
                    demand=demand, capacity=capacity)


def random_routes(n: int, rng: np.random.Generator, max_routes: int | None = None):
    """Random partition of customers 1..n into non-empty ordered routes."""
    perm = list(rng.permutation(np.arange(1, n + 1)))
    k = int(rng.integers(1, (max_routes or n) + 1))
    cuts = sorted(rng.choice(np.arange(1, n), size=min(k - 1, n - 1), replace=False).tolist()) if k > 1 and n > 1 else []
    routes, prev = [], 0
    for c in cuts + [n]:
        routes.append([int(v) for v in perm[prev:c]])
        prev = c
    return [r for r in routes if r]


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the hot kernels once so timed tests measure work, not JIT."""
    from cvrpils import (Solution, apply_move, delta_cross, delta_shift1_inter,
                         delta_swap_star, delta_two_opt, solution_distance)

    inst = make_instance(12, seed=999, capacity=20)
    cfg = RunConfig(seed=0, max_iterations=3, time_limit=1e9, time_source="counted",
                    stall_threshold=1)
    run(inst, cfg)
    s = Solution.from_routes(inst, [[1, 2, 3], [4, 5, 6], [7, 8, 9], [10, 11, 12]])
    solution_distance(s, s.copy())
    apply_move(s, delta_shift1_inter(s, 1, 4))
    apply_move(s, delta_swap_star(s, 2, 5))
    apply_move(s, delta_cross(s, 3, 6))
    apply_move(s, delta_two_opt(s, 7, 9))
    return True


@pytest.fixture()
def inst20():
    return make_instance(20, seed=11, capacity=25)


@pytest.fixture()
def nl20(inst20):
    return build_neighbor_lists(inst20, 40)
