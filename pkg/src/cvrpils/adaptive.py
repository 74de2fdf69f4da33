"""Perturbation-degree mechanisms (d1-d4) and acceptance criteria (c1-c7).

Both families are plain state objects updated by free functions, so the engine
can mix any degree mechanism with any acceptance criterion.  Defaults are the
tuned values: fixed omega 15, relative factor 0.03, random range [1, 30],
target distance 25, window 30, and criterion parameters eta0 0.4, kappa 0.4,
mu 0.5, theta 0.005, k 6, epsilon 0.01.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEGREE_MECHANISMS = ("d1", "d2", "d3", "d4")  # fixed, relative, random, distance
ACCEPTANCE_CRITERIA = ("c1", "c2", "c3", "c4", "c5", "c6", "c7")

NUM_REMOVAL_HEURISTICS = 2


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass
class DegreeState:
    """Per-heuristic perturbation degree and the distance-mechanism accumulators."""

    mechanism: str = "d4"
    omega_fixed: float = 15.0
    nu: float = 0.03
    omega_low: int = 1
    omega_high: int = 30
    d_beta: int = 25
    gamma: int = 30
    omega: np.ndarray = field(default_factory=lambda: np.full(NUM_REMOVAL_HEURISTICS, 15.0))
    dist_sum: np.ndarray = field(default_factory=lambda: np.zeros(NUM_REMOVAL_HEURISTICS))
    dist_cnt: np.ndarray = field(default_factory=lambda: np.zeros(NUM_REMOVAL_HEURISTICS, dtype=np.int64))

    def __post_init__(self):
        if self.mechanism not in DEGREE_MECHANISMS:
            raise ValueError(f"unknown degree mechanism {self.mechanism!r}")


def next_omega(ds: DegreeState, heuristic_k: int, n: int,
               rng: np.random.Generator | None = None) -> int:
    """Perturbation degree for the next use of removal heuristic ``heuristic_k``."""
    if ds.mechanism == "d1":
        w = ds.omega_fixed
    elif ds.mechanism == "d2":
        w = ds.nu * n
    elif ds.mechanism == "d3":
        if rng is None:
            raise ValueError("the random mechanism needs an rng")
        return max(1, min(n, int(rng.integers(ds.omega_low, ds.omega_high + 1))))
    else:
        w = float(ds.omega[heuristic_k])
    return max(1, min(n, _round_half_up(w)))


def observe_distance(ds: DegreeState, heuristic_k: int, d_obs: int, n: int) -> None:
    """Record a solution-to-reference distance for the heuristic that produced it.

    Every gamma observations of one heuristic, its degree moves toward the
    target distance: omega <- min(n, max(1, omega * d_beta / mean)).  A zero
    mean (the search keeps returning to the reference) doubles omega instead,
    since the formula would divide by zero.
    """
    ds.dist_sum[heuristic_k] += d_obs
    ds.dist_cnt[heuristic_k] += 1
    if ds.dist_cnt[heuristic_k] >= ds.gamma:
        mean = ds.dist_sum[heuristic_k] / ds.dist_cnt[heuristic_k]
        if mean <= 0.0:
            ds.omega[heuristic_k] = min(float(n), 2.0 * ds.omega[heuristic_k])
        else:
            ds.omega[heuristic_k] = min(float(n), max(1.0, ds.omega[heuristic_k] * ds.d_beta / mean))
        ds.dist_sum[heuristic_k] = 0.0
        ds.dist_cnt[heuristic_k] = 0


@dataclass
class AcceptanceState:
    """Shared threshold statistics plus criterion-specific counters.

    f_bar is the running mean of local-search costs (exponential once past the
    first gamma observations); f_min_window the best cost of the current
    gamma-iteration window.  eta starts at 1 for the convergent criterion and
    at the tuned threshold 0.4 otherwise.
    """

    criterion: str = "c4"
    gamma: int = 30
    eta0: float = 0.4
    kappa: float = 0.4
    mu: float = 0.5
    theta: float = 0.005
    k_best: int = 6
    lam: int = 30
    epsilon: float = 0.01
    d_beta: int = 25
    eta: float = field(init=False)
    alpha: float = 1.0
    f_bar: float = 0.0
    f_min_window: float = math.inf
    it: int = 0
    consults: int = 0        # acceptance decisions since the last flow update
    accepted: int = 0        # acceptances since the last flow/distance update
    accepted_dist_sum: float = 0.0
    window_count: int = 0    # c6 tumbling window fill
    window_best: float = math.inf
    window_took_current: bool = field(default=False, init=False)

    def __post_init__(self):
        if self.criterion not in ACCEPTANCE_CRITERIA:
            raise ValueError(f"unknown acceptance criterion {self.criterion!r}")
        self.eta = 1.0 if self.criterion == "c4" else self.eta0


def update_fbar(state: AcceptanceState, f_s: float) -> None:
    """Fold one local-search cost into the running statistics (call once per iteration)."""
    state.it += 1
    if state.it == 1:
        state.f_bar = float(f_s)
    elif state.it <= state.gamma:
        state.f_bar = (state.f_bar * (state.it - 1) + f_s) / state.it
    else:
        state.f_bar = state.f_bar * (1.0 - 1.0 / state.gamma) + f_s / state.gamma
    if (state.it - 1) % state.gamma == 0:
        state.f_min_window = float(f_s)
    else:
        state.f_min_window = min(state.f_min_window, float(f_s))


def update_eta_flow(state: AcceptanceState) -> None:
    """c2: eta <- kappa * eta / kappa_r with kappa_r the realised acceptance rate."""
    if state.accepted <= 0 or state.consults <= 0:
        return
    kappa_r = state.accepted / state.consults
    state.eta = min(1.0, max(0.0, state.kappa * state.eta / kappa_r))
    state.consults = 0
    state.accepted = 0


def update_eta_distance(state: AcceptanceState, d_beta: int | None = None) -> None:
    """c3: eta <- mu * d_beta * eta / d_a_r with d_a_r the mean accepted distance.

    A zero mean distance is degenerate and skips the eta update; the window is
    consumed either way.
    """
    if state.accepted <= 0:
        return
    beta = state.d_beta if d_beta is None else d_beta
    d_a_r = state.accepted_dist_sum / state.accepted
    if d_a_r > 0:
        state.eta = min(1.0, max(0.0, state.mu * beta * state.eta / d_a_r))
    state.consults = 0
    state.accepted = 0
    state.accepted_dist_sum = 0.0


def update_eta_convergent(state: AcceptanceState, t_elapsed: float, t_total: float) -> None:
    """c4: refresh alpha from the pace of the run, then decay eta by one step.

    alpha is fitted so that eta, decayed once per iteration, falls from 1 to
    about epsilon over the whole run: alpha = epsilon ** (t_elapsed / (it * t_total)).
    Refreshed on the first iteration and every lam iterations after that.
    """
    if state.it >= 1 and (state.it == 1 or state.it % state.lam == 0):
        if t_total > 0 and t_elapsed > 0:
            state.alpha = state.epsilon ** (t_elapsed / (state.it * t_total))
    state.eta = min(1.0, max(0.0, state.eta * state.alpha))


def threshold(state: AcceptanceState, f_best: float | None = None) -> float:
    """Current acceptance bound for the threshold-family criteria."""
    if state.criterion == "c5":
        if f_best is None:
            raise ValueError("c5 threshold needs the incumbent cost")
        return f_best + state.theta * f_best
    return state.f_min_window + state.eta * (state.f_bar - state.f_min_window)


def accept(state: AcceptanceState, f_s: float, f_best: float, d_to_ref: int) -> bool:
    """Decide whether the iteration's solution replaces the phase-1 reference.

    Mutates criterion bookkeeping: flow counters (c2), accepted-distance sums
    (c3), and the k-window (c6, which reports True exactly when a window of
    k decisions completes; the window's best solution becomes the reference).
    Call update_fbar first.
    """
    crit = state.criterion
    state.window_took_current = False
    if crit in ("c1", "c2", "c3", "c4"):
        verdict = f_s <= threshold(state)
    elif crit == "c5":
        verdict = f_s <= threshold(state, f_best)
    elif crit == "c6":
        state.window_count += 1
        if state.window_count == 1 or f_s < state.window_best:
            state.window_best = float(f_s)
            state.window_took_current = True
        verdict = state.window_count >= state.k_best
        if verdict:
            state.window_count = 0
            state.window_best = math.inf
        return verdict
    else:  # c7
        verdict = f_s <= f_best

    state.consults += 1
    if verdict:
        state.accepted += 1
        state.accepted_dist_sum += d_to_ref
        if crit == "c2" and state.accepted >= state.gamma:
            update_eta_flow(state)
        elif crit == "c3" and state.accepted >= state.gamma:
            update_eta_distance(state)
    return verdict
