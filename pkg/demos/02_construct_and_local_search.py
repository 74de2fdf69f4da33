"""Initial construction, move evaluation and best-improvement local search."""

import numpy as np

from cvrpils import (Instance, apply_move, build_neighbor_lists, construct_initial,
                     delta_shift1_inter, delta_swap_star, format_solution,
                     local_search, make_feasible, solution_cost, validate)

rng = np.random.default_rng(3)
n = 40
inst = Instance(name="demo40", n=n,
                coords=np.vstack([[50.0, 50.0], rng.uniform(0, 100, size=(n, 2))]),
                demand=np.concatenate([[0], rng.integers(1, 10, size=n)]),
                capacity=30)
nl = build_neighbor_lists(inst, phi=20)

# construction: shuffled cheapest insertion under capacity, then repair
s = construct_initial(inst, nl, np.random.default_rng(0))
print(f"constructed: cost={s.cost}, routes={len(s.nonempty_routes)}, "
      f"violations={validate(s, inst)}")

# single moves carry exact cost/excess deltas and can be applied directly
v = s.nonempty_routes[0][0]
u = next(c for c in s.nonempty_routes[1])
d = delta_swap_star(s, v, u)
print(f"\nswap* of {v} and {u} would change cost by {d.cost_delta}")

d = delta_shift1_inter(s, v, u)
print(f"shift customer {v} after {u}: cost delta {d.cost_delta}, "
      f"excess delta {d.excess_delta}")
before = s.cost
apply_move(s, d)
print(f"applied: {before} -> {s.cost} (recomputed {solution_cost(s, inst)})")

# descend to a local optimum of the six-move composite neighborhood
make_feasible(s, nl)
local_search(s, nl)
print(f"\nlocal optimum: cost={s.cost}, violations={validate(s, inst)}")
print("\nsolution in the benchmark convention:")
print(format_solution(s))
