import math

import numpy as np
import pytest

from cvrpils import (Instance, ParseError, build_neighbor_lists, edge_weight,
                     format_instance, load_bks, parse_instance, shipped_bks)
from conftest import make_instance

MINIMAL = """\
NAME : tiny
TYPE : CVRP
DIMENSION : 2
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 1
NODE_COORD_SECTION
1 0 0
2 3 4
DEMAND_SECTION
1 0
2 1
DEPOT_SECTION
1
-1
EOF
"""


def _header_file(dimension: int, capacity: int, name: str) -> str:
    lines = [f"NAME : {name}", "TYPE : CVRP", f"DIMENSION : {dimension}",
             "EDGE_WEIGHT_TYPE : EUC_2D", f"CAPACITY : {capacity}",
             "NODE_COORD_SECTION"]
    rng = np.random.default_rng(1)
    for i in range(dimension):
        x, y = rng.integers(0, 1000, size=2)
        lines.append(f"{i + 1} {x} {y}")
    lines.append("DEMAND_SECTION")
    lines.append("1 0")
    for i in range(1, dimension):
        lines.append(f"{i + 1} {int(rng.integers(1, 20))}")
    lines.extend(["DEPOT_SECTION", "1", "-1", "EOF"])
    return "\n".join(lines)


class TestParseInstance:
    def test_benchmark_shaped_header(self):
        # same header shape as the 100-customer, capacity-206 benchmark file
        inst = parse_instance(_header_file(101, 206, "X-n101-k25"))
        assert inst.n == 100
        assert inst.capacity == 206
        assert inst.name == "X-n101-k25"

    def test_minimal_single_customer(self):
        inst = parse_instance(MINIMAL)
        assert inst.n == 1
        assert inst.demand.tolist() == [0, 1]

    def test_demand_exceeding_capacity_rejected(self):
        bad = MINIMAL.replace("2 1\n", "2 5\n", 1)
        with pytest.raises(ParseError, match="demand exceeds capacity"):
            parse_instance(bad)

    def test_unsupported_edge_weight_type(self):
        bad = MINIMAL.replace("EUC_2D", "CEIL_2D")
        with pytest.raises(ParseError, match="unsupported EDGE_WEIGHT_TYPE"):
            parse_instance(bad)

    def test_missing_section_named(self):
        bad = "\n".join(l for l in MINIMAL.splitlines() if not l.startswith("DEPOT")
                        and l not in ("1", "-1")) + "\n"
        with pytest.raises(ParseError, match="DEPOT_SECTION"):
            parse_instance(bad)

    def test_malformed_record_names_line(self):
        bad = MINIMAL.replace("2 3 4", "2 3")
        with pytest.raises(ParseError, match="line 8"):
            parse_instance(bad)

    def test_depot_remapped_to_zero(self):
        # depot listed as vertex 2 in the file
        text = """\
NAME : swapped
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 10
NODE_COORD_SECTION
1 7 0
2 1 1
3 0 9
DEMAND_SECTION
1 4
2 0
3 5
DEPOT_SECTION
2
-1
EOF
"""
        inst = parse_instance(text)
        assert inst.coords[0].tolist() == [1.0, 1.0]
        assert inst.demand.tolist() == [0, 4, 5]

    def test_round_trip(self):
        inst = make_instance(17, seed=5)
        again = parse_instance(format_instance(inst))
        assert again.n == inst.n
        assert again.capacity == inst.capacity
        assert np.array_equal(again.coords, inst.coords)
        assert np.array_equal(again.demand, inst.demand)


class TestEdgeWeight:
    def test_three_four_five(self):
        inst = parse_instance(MINIMAL)
        assert edge_weight(inst, 0, 1) == 5

    def test_roundings(self):
        inst = Instance(name="r", n=2, coords=[[0, 0], [1, 1], [0.5, 0]],
                        demand=[0, 1, 1], capacity=2)
        assert edge_weight(inst, 0, 1) == 1      # sqrt(2) ~ 1.414 rounds down
        assert edge_weight(inst, 0, 2) == 1      # exactly 0.5 rounds half-up
        assert edge_weight(inst, 0, 0) == 0

    def test_symmetry_random(self):
        inst = make_instance(30, seed=2)
        rng = np.random.default_rng(0)
        for _ in range(200):
            i, j = rng.integers(0, inst.n + 1, size=2)
            assert edge_weight(inst, int(i), int(j)) == edge_weight(inst, int(j), int(i))


class TestNeighborLists:
    def test_collinear_tie_break(self):
        inst = Instance(name="line", n=3, coords=[[0, 0], [1, 0], [2, 0], [3, 0]],
                        demand=[0, 1, 1, 1], capacity=3)
        nl = build_neighbor_lists(inst, 1)
        # customers at x=1 and x=3 are equidistant from x=2; lower index wins
        assert nl.neighbors(2).tolist() == [1]

    def test_saturation(self):
        inst = make_instance(8, seed=3)
        nl = build_neighbor_lists(inst, inst.n)
        for v in range(1, inst.n + 1):
            assert sorted(nl.neighbors(v).tolist()) == [u for u in range(1, 9) if u != v]
        assert sorted(nl.neighbors(0).tolist()) == list(range(1, 9))

    def test_matches_full_sort_oracle(self):
        inst = make_instance(10, seed=4)
        nl = build_neighbor_lists(inst, 4)
        for v in range(inst.n + 1):
            ranked = sorted((u for u in range(1, inst.n + 1) if u != v),
                            key=lambda u: (edge_weight(inst, v, u), u))
            assert nl.neighbors(v).tolist() == ranked[:4]

    def test_soundness_bound(self):
        inst = make_instance(25, seed=6)
        nl = build_neighbor_lists(inst, 5)
        for v in range(inst.n + 1):
            lst = nl.neighbors(v).tolist()
            worst = edge_weight(inst, v, lst[-1])
            outside = set(range(1, inst.n + 1)) - set(lst) - {v}
            for u in outside:
                assert edge_weight(inst, v, u) >= worst


class TestBks:
    def test_single_known_value(self):
        reg = load_bks("X-n101-k25,27591\n")
        assert reg["X-n101-k25"] == 27591

    def test_large_instance_value(self):
        reg = load_bks("Leuven1,192848\n")
        assert reg["Leuven1"] == 192848

    def test_empty_file(self):
        assert len(load_bks("")) == 0

    def test_duplicate_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            load_bks("a,1\na,2\n")

    def test_nonpositive_rejected(self):
        with pytest.raises(ParseError, match="non-positive"):
            load_bks("a,0\n")

    def test_shipped_registry(self):
        reg = shipped_bks()
        assert len(reg) == 110
        assert reg["X-n101-k25"] == 27591
        assert reg["X-n120-k6"] == 13332
        assert reg["X-n148-k46"] == 43448
        assert reg["Flanders2"] == 4375193
        assert all(v > 0 for v in reg.values.values())
