"""The two-phase adaptive iterated local search loop.

Every iteration perturbs a reference solution, descends to a local optimum,
and books the result: incumbent update, perturbation-degree feedback, stall
tracking, elite-pool offer (once phase 2 is active), and the acceptance test
that decides whether the phase-1 reference moves.  Phase 2 activates
permanently once the incumbent stalls past a threshold; from then on each
iteration flips a fair coin between perturbing the phase-1 reference and a
random elite member.

One seeded generator drives every stochastic choice, in this order per
iteration: phase coin (only when phase 2 is active and the pool is non-empty),
removal heuristic, elite sample index (phase 2 only), degree draw (random
mechanism only), insertion rule, removal center/start and any route jumps.
Runs with the same seed and config replay exactly; use the counted time source
to make the time-dependent pieces reproducible too.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .adaptive import (AcceptanceState, DegreeState, accept, next_omega,
                       observe_distance, update_eta_convergent, update_fbar,
                       ACCEPTANCE_CRITERIA, DEGREE_MECHANISMS)
from .elite import EliteSet
from .instances import Instance, NeighborLists, build_neighbor_lists
from .moves import local_search
from .perturbation import perturb
from .solution import Solution, construct_initial, solution_distance

TRACE_FIELDS = ("iteration", "phase", "heuristic", "omega", "accepted", "cost",
                "best_cost", "dist_to_ref", "elite_size", "phase2_active")


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs; defaults are the tuned values."""

    acceptance: str = "c4"
    degree: str = "d4"
    gamma: int = 30
    sigma: int = 60
    phi: int = 40
    d_beta: int = 25
    eta0: float = 0.4
    kappa: float = 0.4
    mu: float = 0.5
    theta: float = 0.005
    k_best: int = 6
    lam: int | None = None           # c4 alpha refresh period; defaults to gamma
    omega_fixed: float = 15.0
    nu: float = 0.03
    omega_low: int = 1
    omega_high: int = 30
    time_limit: float | None = None  # seconds; None means 10n at run start
    max_iterations: int | None = None
    stall_threshold: int = 2000
    phase2_probability: float = 0.5
    seed: int = 0
    time_source: str = "wall"        # "wall" or "counted" (counted_dt per iteration)
    counted_dt: float = 1.0
    collect_trace: bool = False

    def validate(self) -> None:
        if self.acceptance not in ACCEPTANCE_CRITERIA:
            raise ValueError(f"unknown acceptance criterion {self.acceptance!r}")
        if self.degree not in DEGREE_MECHANISMS:
            raise ValueError(f"unknown degree mechanism {self.degree!r}")
        for name in ("gamma", "sigma", "phi", "d_beta", "k_best", "stall_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lam is not None and self.lam <= 0:
            raise ValueError("lam must be positive")
        if not 0.0 <= self.phase2_probability <= 1.0:
            raise ValueError("phase2_probability must be in [0, 1]")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.max_iterations is not None and self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.omega_low > self.omega_high:
            raise ValueError("omega_low must not exceed omega_high")
        if self.time_source not in ("wall", "counted"):
            raise ValueError("time_source must be 'wall' or 'counted'")
        if self.counted_dt <= 0:
            raise ValueError("counted_dt must be positive")


@dataclass
class RunReport:
    instance_name: str
    best_cost: int
    best_solution: Solution
    time_to_best_seconds: float
    iterations: int
    phase2_activation_iteration: int | None
    seed: int
    wall_seconds: float
    trace: list[tuple] | None = None

    def to_dict(self) -> dict:
        return {
            "instance": self.instance_name,
            "seed": self.seed,
            "best_cost": self.best_cost,
            "best_routes": self.best_solution.nonempty_routes,
            "time_to_best_seconds": round(self.time_to_best_seconds, 6),
            "iterations": self.iterations,
            "phase2_activation_iteration": self.phase2_activation_iteration,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def trace_csv(self) -> str:
        if self.trace is None:
            raise ValueError("run was executed without collect_trace")
        buf = io.StringIO()
        buf.write(",".join(TRACE_FIELDS) + "\n")
        for row in self.trace:
            buf.write(",".join("" if x is None else str(x) for x in row) + "\n")
        return buf.getvalue()


@dataclass
class SearchState:
    inst: Instance
    nl: NeighborLists
    cfg: RunConfig
    rng: np.random.Generator
    s_ref1: Solution
    s_best: Solution
    best_cost: int
    elite: EliteSet
    deg: DegreeState
    acc: AcceptanceState
    time_limit: float
    t0: float
    iteration: int = 0
    stall: int = 0
    phase2_started: bool = False
    phase2_activation_iteration: int | None = None
    time_to_best: float = 0.0
    window_best_sol: Solution | None = None
    trace: list[tuple] | None = None

    def elapsed(self) -> float:
        if self.cfg.time_source == "counted":
            return self.iteration * self.cfg.counted_dt
        return time.perf_counter() - self.t0


def init_state(inst: Instance, cfg: RunConfig, nl: NeighborLists | None = None) -> SearchState:
    cfg.validate()
    if nl is None:
        nl = build_neighbor_lists(inst, cfg.phi)
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    s0 = construct_initial(inst, nl, rng)
    local_search(s0, nl)
    deg = DegreeState(mechanism=cfg.degree, omega_fixed=cfg.omega_fixed, nu=cfg.nu,
                      omega_low=cfg.omega_low, omega_high=cfg.omega_high,
                      d_beta=cfg.d_beta, gamma=cfg.gamma)
    acc = AcceptanceState(criterion=cfg.acceptance, gamma=cfg.gamma, eta0=cfg.eta0,
                          kappa=cfg.kappa, mu=cfg.mu, theta=cfg.theta,
                          k_best=cfg.k_best, lam=cfg.gamma if cfg.lam is None else cfg.lam,
                          epsilon=0.01, d_beta=cfg.d_beta)
    state = SearchState(
        inst=inst, nl=nl, cfg=cfg, rng=rng,
        s_ref1=s0, s_best=s0.copy(), best_cost=s0.cost,
        elite=EliteSet(capacity=cfg.sigma, separation=cfg.d_beta),
        deg=deg, acc=acc,
        time_limit=cfg.time_limit if cfg.time_limit is not None else 10.0 * inst.n,
        t0=t0,
        trace=[] if cfg.collect_trace else None,
    )
    state.time_to_best = state.elapsed()
    return state


def step(state: SearchState) -> SearchState:
    """One full iteration of the search loop (exposed for tests and demos)."""
    cfg = state.cfg
    rng = state.rng
    state.iteration += 1

    phase = 1
    if state.phase2_started and len(state.elite) > 0:
        if rng.random() < cfg.phase2_probability:
            phase = 2
    s_ref = state.elite.sample(rng) if phase == 2 else state.s_ref1

    k = int(rng.integers(0, 2))
    omega = next_omega(state.deg, k, state.inst.n, rng)

    s = perturb(s_ref, k, omega, state.nl, rng)
    local_search(s, state.nl)
    f_s = s.cost

    strict = f_s < state.best_cost
    if f_s <= state.best_cost:
        state.s_best = s.copy()
        state.best_cost = f_s
    if strict:
        state.stall = 0
        state.time_to_best = state.elapsed()
    else:
        state.stall += 1

    d_obs = solution_distance(s, s_ref)
    observe_distance(state.deg, k, d_obs, state.inst.n)

    if not state.phase2_started and state.stall > cfg.stall_threshold:
        state.phase2_started = True
        state.phase2_activation_iteration = state.iteration

    if state.phase2_started:
        state.elite.try_insert(s)

    update_fbar(state.acc, f_s)
    accepted: bool | None = None
    if phase == 1:
        accepted = accept(state.acc, f_s, state.best_cost, d_obs)
        if cfg.acceptance == "c6":
            if state.acc.window_took_current:
                state.window_best_sol = s.copy()
            if accepted and state.window_best_sol is not None:
                state.s_ref1 = state.window_best_sol
                state.window_best_sol = None
        elif accepted:
            state.s_ref1 = s
    if cfg.acceptance == "c4":
        update_eta_convergent(state.acc, state.elapsed(), state.time_limit)

    if state.trace is not None:
        state.trace.append((state.iteration, phase, k + 1, omega,
                            None if accepted is None else int(accepted),
                            f_s, state.best_cost, d_obs, len(state.elite),
                            int(state.phase2_started)))
    return state


def run(inst: Instance, cfg: RunConfig, nl: NeighborLists | None = None) -> RunReport:
    """Run the search until the time limit (or iteration cap) and report the best."""
    state = init_state(inst, cfg, nl)
    while True:
        if state.elapsed() >= state.time_limit:
            break
        if cfg.max_iterations is not None and state.iteration >= cfg.max_iterations:
            break
        step(state)
    return RunReport(
        instance_name=inst.name,
        best_cost=state.best_cost,
        best_solution=state.s_best,
        time_to_best_seconds=state.time_to_best,
        iterations=state.iteration,
        phase2_activation_iteration=state.phase2_activation_iteration,
        seed=cfg.seed,
        wall_seconds=time.perf_counter() - state.t0,
        trace=state.trace,
    )


def run_with_seed(inst: Instance, cfg: RunConfig, seed: int,
                  nl: NeighborLists | None = None) -> RunReport:
    return run(inst, replace(cfg, seed=seed), nl)
