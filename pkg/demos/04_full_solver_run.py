"""A complete two-phase search run with trace inspection.

Runs the solver on a synthetic instance with a small stall threshold so the
second phase activates quickly, then reads the per-iteration trace to show the
phase mix, the adaptive degree at work, and the elite pool filling up.
"""

import numpy as np

from cvrpils import Instance, RunConfig, run, validate

rng = np.random.default_rng(19)
n = 80
inst = Instance(name="demo80", n=n,
                coords=np.vstack([[50.0, 50.0], rng.uniform(0, 100, size=(n, 2))]),
                demand=np.concatenate([[0], rng.integers(1, 10, size=n)]),
                capacity=40)

cfg = RunConfig(seed=5, max_iterations=4000, time_limit=1e9, time_source="counted",
                stall_threshold=400, collect_trace=True)
report = run(inst, cfg)

print(f"best cost {report.best_cost} after {report.iterations} iterations")
print(f"phase 2 activated at iteration {report.phase2_activation_iteration}")
print(f"best solution clean: {validate(report.best_solution, inst) == []}")

trace = report.trace
act = report.phase2_activation_iteration
post = [row for row in trace if row[0] > act]
share = sum(1 for row in post if row[1] == 2) / len(post)
print(f"\nphase-2 share after activation: {share:.3f} (coin target 0.5)")

omegas = [row[3] for row in trace]
print(f"perturbation degree: start {omegas[0]}, "
      f"min {min(omegas)}, max {max(omegas)}, final {omegas[-1]}")

elite_sizes = [row[8] for row in trace]
print(f"elite pool size at the end: {elite_sizes[-1]}")

accepted = [row for row in trace if row[4] == 1]
consulted = [row for row in trace if row[4] is not None]
print(f"acceptance rate over phase-1 iterations: {len(accepted) / len(consulted):.3f}")

print("\nlast three trace rows (iteration, phase, heuristic, omega, accepted, "
      "cost, best, dist, elite, phase2):")
for row in trace[-3:]:
    print(" ", row)
