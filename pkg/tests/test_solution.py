import numpy as np
import pytest

import oracles
from cvrpils import (Instance, Solution, build_neighbor_lists, construct_initial,
                     edge_set, format_solution, min_routes, parse_solution,
                     solution_cost, solution_distance, validate)
from conftest import make_instance, random_routes


def two_customer_instance():
    return Instance(name="pair", n=2, coords=[[0, 0], [10, 0], [10, 7]],
                    demand=[0, 1, 1], capacity=2)


class TestSolutionCost:
    def test_out_and_back_doubles_the_leg(self):
        inst = Instance(name="t", n=1, coords=[[0, 0], [3, 4]], demand=[0, 1], capacity=1)
        s = Solution.from_routes(inst, [[1]])
        assert s.cost == 10
        assert solution_cost(s, inst) == 10

    def test_empty_route_contributes_zero(self):
        inst = two_customer_instance()
        s = Solution.from_routes(inst, [[1, 2], []])
        t = Solution.from_routes(inst, [[1, 2]])
        assert s.cost == t.cost
        assert solution_cost(s, inst) == solution_cost(t, inst)

    def test_matches_oracle_on_random_solutions(self):
        inst = make_instance(15, seed=8)
        rng = np.random.default_rng(1)
        coords = inst.coords.tolist()
        for _ in range(30):
            routes = random_routes(inst.n, rng)
            s = Solution.from_routes(inst, routes)
            assert s.cost == oracles.routes_cost(routes, coords)
            assert solution_cost(s, inst) == s.cost


class TestSolutionDistance:
    def test_identical_solutions(self):
        inst = make_instance(9, seed=9)
        s = Solution.from_routes(inst, random_routes(inst.n, np.random.default_rng(2)))
        assert solution_distance(s, s.copy()) == 0

    def test_two_customer_split_case(self):
        # one tour [0,a,b,0] versus two out-and-backs; edge sets {0a,ab,b0} and
        # {0a,0b} differ only in ab (brute-force set oracle value)
        inst = two_customer_instance()
        s1 = Solution.from_routes(inst, [[1, 2]])
        s2 = Solution.from_routes(inst, [[1], [2]])
        expected = oracles.set_distance([[1, 2]], [[1], [2]])
        assert expected == 1
        assert solution_distance(s1, s2) == expected

    def test_matches_oracle_and_symmetry(self):
        inst = make_instance(12, seed=10)
        rng = np.random.default_rng(3)
        for _ in range(40):
            ra, rb = random_routes(inst.n, rng), random_routes(inst.n, rng)
            a, b = Solution.from_routes(inst, ra), Solution.from_routes(inst, rb)
            d = solution_distance(a, b)
            assert d == oracles.set_distance(ra, rb)
            assert d == solution_distance(b, a)

    def test_metric_axioms_on_random_triples(self):
        inst = make_instance(10, seed=12)
        rng = np.random.default_rng(4)
        for _ in range(25):
            sols = [Solution.from_routes(inst, random_routes(inst.n, rng)) for _ in range(3)]
            a, b, c = sols
            dab, dbc, dac = (solution_distance(a, b), solution_distance(b, c),
                             solution_distance(a, c))
            assert dab >= 0 and solution_distance(a, a) == 0
            assert dac <= dab + dbc

    def test_edge_set_size_counts_collapsed_depot_legs(self):
        # every leg appears once as an unordered pair; the two legs of an
        # out-and-back route are the same pair, so they collapse
        inst = make_instance(11, seed=13)
        rng = np.random.default_rng(5)
        for _ in range(20):
            routes = random_routes(inst.n, rng)
            s = Solution.from_routes(inst, routes)
            legs = sum(len(r) + 1 for r in routes if r)
            singletons = sum(1 for r in routes if len(r) == 1)
            assert len(edge_set(s)) == legs - singletons


class TestMinRoutes:
    def test_ceiling(self):
        inst = Instance(name="a", n=3, coords=[[0, 0], [1, 0], [2, 0], [3, 0]],
                        demand=[0, 3, 3, 3], capacity=5)
        assert min_routes(inst) == 2

    def test_exact_fit(self):
        inst = Instance(name="b", n=1, coords=[[0, 0], [1, 0]], demand=[0, 5], capacity=5)
        assert min_routes(inst) == 1


class TestConstructInitial:
    def test_single_customer_forced(self):
        inst = Instance(name="c", n=1, coords=[[0, 0], [5, 0]], demand=[0, 1], capacity=1)
        nl = build_neighbor_lists(inst, 40)
        s = construct_initial(inst, nl, np.random.default_rng(0))
        assert s.nonempty_routes == [[1]]
        assert s.cost == 10

    def test_validates_with_zero_excess(self):
        for seed in range(5):
            inst = make_instance(30, seed=seed + 20)
            nl = build_neighbor_lists(inst, 40)
            s = construct_initial(inst, nl, np.random.default_rng(seed))
            assert validate(s, inst) == []
            assert s.excess == 0
            assert len(s.nonempty_routes) >= min_routes(inst)

    def test_deterministic_under_fixed_seed(self):
        inst = make_instance(25, seed=31)
        nl = build_neighbor_lists(inst, 40)
        a = construct_initial(inst, nl, np.random.default_rng(7))
        b = construct_initial(inst, nl, np.random.default_rng(7))
        assert a.routes == b.routes
        assert a.cost == b.cost


class TestValidate:
    def test_fresh_solution_ok(self, inst20, nl20):
        s = construct_initial(inst20, nl20, np.random.default_rng(1))
        assert validate(s, inst20) == []

    def test_duplicate_customer_reported(self, inst20):
        routes = [[1, 2, 3], [3, 4], [5]]
        problems = validate(routes, inst20)
        assert any(v.kind == "duplicate customer" for v in problems)
        assert any(v.kind == "missing customer" for v in problems)

    def test_cost_drift_reported(self, inst20, nl20):
        s = construct_initial(inst20, nl20, np.random.default_rng(2))
        s.st[0] += 17
        problems = validate(s, inst20)
        assert any(v.kind == "cost drift" for v in problems)

    def test_capacity_excess_reported(self):
        inst = make_instance(8, seed=40, capacity=12)
        all_in_one = Solution.from_routes(inst, [[v for v in range(1, 9)]])
        problems = validate(all_in_one, inst)
        assert any(v.kind == "capacity excess" for v in problems)


class TestSerialization:
    def test_round_trip(self, inst20, nl20):
        s = construct_initial(inst20, nl20, np.random.default_rng(3))
        text = format_solution(s)
        again, stated = parse_solution(text, inst20)
        assert stated == s.cost
        assert again.nonempty_routes == s.nonempty_routes
        assert again.cost == s.cost

    def test_format_shape(self):
        inst = two_customer_instance()
        s = Solution.from_routes(inst, [[1], [2]])
        text = format_solution(s)
        assert text.splitlines()[0] == "Route #1: 1"
        assert text.splitlines()[1] == "Route #2: 2"
        assert text.splitlines()[2] == f"Cost {s.cost}"
