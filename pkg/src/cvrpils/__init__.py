"""Adaptive two-phase iterated local search for the capacitated vehicle routing problem."""

from .instances import (BksRegistry, Instance, NeighborLists, ParseError,
                        build_neighbor_lists, edge_weight, format_instance,
                        load_bks, parse_instance, shipped_bks)
from .solution import (Solution, construct_initial, edge_set, format_solution,
                       min_routes, parse_solution, solution_cost,
                       solution_distance, validate, validate_routes)
from .moves import (MoveDelta, apply_move, delta_cross, delta_shift1_inter,
                    delta_shift1_intra, delta_swap1_intra, delta_swap_star,
                    delta_two_opt, local_search, make_feasible)
from .perturbation import (INSERT_COST, INSERT_NEAREST, insert_vertex, perturb,
                           remove_concentric, remove_sequential)
from .adaptive import (AcceptanceState, DegreeState, accept, next_omega,
                       observe_distance, threshold, update_eta_convergent,
                       update_eta_distance, update_eta_flow, update_fbar)
from .elite import EliteSet
from .engine import RunConfig, RunReport, SearchState, init_state, run, step
from .bench import (ExperimentSpec, GapRow, compute_gap, performance_profile,
                    rows_to_csv, rows_to_jsonl, run_experiment, summarize)

__version__ = "0.1.0"
