"""The benchmark harness: multi-run experiments, gap tables and profiles.

Writes two synthetic instances to disk, runs a small seeded experiment over
them, and shows the gap table, the quartile summary and a performance profile
comparing two configurations.  With real benchmark files the same harness
reproduces the published evaluation protocol (see README).
"""

import tempfile
from pathlib import Path

import numpy as np

from cvrpils import (ExperimentSpec, Instance, RunConfig, format_instance,
                     load_bks, performance_profile, rows_to_csv, run_experiment,
                     summarize)

tmp = Path(tempfile.mkdtemp(prefix="cvrpils-demo-"))
names = []
rng = np.random.default_rng(23)
for i in range(2):
    n = 60
    inst = Instance(name=f"demo-bench-{i}", n=n,
                    coords=np.vstack([[50.0, 50.0], rng.uniform(0, 100, size=(n, 2))]),
                    demand=np.concatenate([[0], rng.integers(1, 10, size=n)]),
                    capacity=30)
    (tmp / f"{inst.name}.vrp").write_text(format_instance(inst))
    names.append(inst.name)

# reference values would normally come from the shipped registry; for the
# synthetic instances we register plausible targets by a quick pilot run
pilot_cfg = RunConfig(seed=99, max_iterations=6000, time_limit=1e9,
                      time_source="counted", stall_threshold=300)
pilot, _ = run_experiment(ExperimentSpec(
    instance_paths=tuple(str(tmp / f"{n}.vrp") for n in names),
    runs=1, config=pilot_cfg, seed_base=99))
bks = load_bks("\n".join(f"{row.instance},{row.best}" for row in pilot))
print("pilot targets:", dict(bks.values))

def experiment(acceptance: str):
    cfg = RunConfig(seed=0, acceptance=acceptance, max_iterations=120,
                    time_limit=1e9, time_source="counted", stall_threshold=100)
    spec = ExperimentSpec(instance_paths=tuple(str(tmp / f"{n}.vrp") for n in names),
                          runs=3, config=cfg, seed_base=1, bks=bks)
    rows, _ = run_experiment(spec)
    return rows

rows_c4 = experiment("c4")
print("\ngap table for the convergent criterion:")
print(rows_to_csv(rows_c4))

gaps_c4 = [row.gap for row in rows_c4]
rows_c7 = experiment("c7")
gaps_c7 = [row.gap for row in rows_c7]
print("quartile summary c4:", {k: round(v, 4) for k, v in summarize(gaps_c4).items()})
print("quartile summary c7:", {k: round(v, 4) for k, v in summarize(gaps_c7).items()})

profile = performance_profile({"c4": gaps_c4, "c7": gaps_c7})
print("\nperformance profile breakpoints (tau, share of instances):")
for algo, curve in profile.items():
    print(f"  {algo}: {[(round(t, 4), phi) for t, phi in curve]}")
