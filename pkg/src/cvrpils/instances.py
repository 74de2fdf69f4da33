"""CVRPLIB instance parsing, edge weights, neighbor lists and best-known-value registries.

Vertices are indexed 0..n with 0 the depot, regardless of the numbering used in
the input file.  Edge weights follow the EUC_2D convention of the benchmark
sets: Euclidean distance rounded half-up to the nearest integer.  All objects
here are immutable after construction and safe to share between solver runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EDGE_WEIGHT_EUC_2D = "EUC_2D"

_SECTION_KEYWORDS = {
    "NODE_COORD_SECTION",
    "DEMAND_SECTION",
    "DEPOT_SECTION",
    "EDGE_WEIGHT_SECTION",
    "EOF",
}


class ParseError(ValueError):
    """Raised on malformed instance/registry input; carries the offending line number."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


@dataclass(frozen=True)
class Instance:
    """Immutable problem data.

    coords has n+1 rows (depot first); demand[0] is 0; capacity is the shared
    vehicle capacity.  Edge weights are computed on demand from coordinates,
    never materialised as a full matrix (the large instances would need ~GBs).
    """

    name: str
    n: int
    coords: np.ndarray  # float64, shape (n+1, 2), read-only
    demand: np.ndarray  # int64, shape (n+1,), read-only
    capacity: int
    edge_weight_kind: str = EDGE_WEIGHT_EUC_2D

    def __post_init__(self):
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        demand = np.ascontiguousarray(np.asarray(self.demand, dtype=np.int64))
        coords.setflags(write=False)
        demand.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "demand", demand)
        if coords.shape != (self.n + 1, 2):
            raise ValueError(f"coords must have shape ({self.n + 1}, 2), got {coords.shape}")
        if demand.shape != (self.n + 1,):
            raise ValueError(f"demand must have shape ({self.n + 1},), got {demand.shape}")
        if demand[0] != 0:
            raise ValueError("depot demand must be 0")
        if np.any(demand < 0):
            raise ValueError("demands must be non-negative")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.n >= 1 and int(demand[1:].max()) > self.capacity:
            raise ValueError("demand exceeds capacity")

    @property
    def num_vertices(self) -> int:
        return self.n + 1


def edge_weight(inst: Instance, i: int, j: int) -> int:
    """Rounded Euclidean edge weight between vertices i and j (half-up, symmetric)."""
    dx = inst.coords[i, 0] - inst.coords[j, 0]
    dy = inst.coords[i, 1] - inst.coords[j, 1]
    return int(math.sqrt(dx * dx + dy * dy) + 0.5)


@dataclass(frozen=True)
class NeighborLists:
    """For every vertex, the phi nearest customers, ascending by edge weight.

    Customers never list themselves; ties are broken by ascending vertex index.
    lists is a padded int32 array of shape (n+1, width) and counts[v] gives the
    valid prefix length of row v (min(phi, n-1) for customers, min(phi, n) for
    the depot row).
    """

    phi: int
    lists: np.ndarray   # int32, shape (n+1, width), read-only
    counts: np.ndarray  # int32, shape (n+1,), read-only

    def __post_init__(self):
        self.lists.setflags(write=False)
        self.counts.setflags(write=False)

    def neighbors(self, v: int) -> np.ndarray:
        return self.lists[v, : self.counts[v]]


def build_neighbor_lists(inst: Instance, phi: int) -> NeighborLists:
    """Sort each vertex's full distance row once and keep the phi nearest customers."""
    if phi < 1:
        raise ValueError("phi must be >= 1")
    n = inst.n
    width = min(phi, n) if n >= 1 else 0
    lists = np.zeros((n + 1, max(width, 1)), dtype=np.int32)
    counts = np.zeros(n + 1, dtype=np.int32)
    coords = inst.coords
    idx = np.arange(n + 1)
    for v in range(n + 1):
        d = np.floor(np.hypot(coords[:, 0] - coords[v, 0], coords[:, 1] - coords[v, 1]) + 0.5)
        d[v] = np.inf  # exclude self
        d[0] = np.inf  # lists contain customers only
        order = np.lexsort((idx, d))
        k = min(phi, n - 1) if v >= 1 else min(phi, n)
        lists[v, :k] = order[:k]
        counts[v] = k
    return NeighborLists(phi=phi, lists=lists, counts=counts)


@dataclass(frozen=True)
class BksRegistry:
    """Best-known objective values keyed by instance name."""

    values: dict[str, int] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __getitem__(self, name: str) -> int:
        return self.values[name]

    def get(self, name: str, default=None):
        return self.values.get(name, default)

    def __len__(self) -> int:
        return len(self.values)


def load_bks(text: str) -> BksRegistry:
    """Parse a two-column ``name,value`` CSV into a registry."""
    values: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(line_no, f"expected 'name,value', got {raw!r}")
        name = parts[0].strip()
        try:
            value = int(parts[1])
        except ValueError:
            raise ParseError(line_no, f"non-integer value {parts[1]!r}") from None
        if name in values:
            raise ParseError(line_no, f"duplicate name {name!r}")
        if value <= 0:
            raise ParseError(line_no, f"non-positive value {value} for {name!r}")
        values[name] = value
    return BksRegistry(values)


def shipped_bks() -> BksRegistry:
    """Registry bundled with the package (the X set and the ten large road-network instances)."""
    from importlib.resources import files

    return load_bks(files("cvrpils").joinpath("data/bks.csv").read_text())


def _parse_kv(line: str) -> tuple[str, str]:
    if ":" in line:
        key, _, value = line.partition(":")
        return key.strip().upper(), value.strip()
    return line.strip().upper(), ""


def parse_instance(text: str) -> Instance:
    """Parse a CVRPLIB-format instance (EUC_2D only).

    The depot is remapped to index 0 and customers renumbered 1..n in file
    order.  Raises :class:`ParseError` naming the offending line on malformed
    records, unsupported edge weight types, missing sections, or demands
    exceeding the capacity.
    """
    lines = text.splitlines()
    name = ""
    dimension = None
    capacity = None
    ewt = None
    coords_raw: dict[int, tuple[float, float]] = {}
    demand_raw: dict[int, int] = {}
    depot_ids: list[int] = []
    seen_sections: set[str] = set()

    i = 0
    while i < len(lines):
        line_no = i + 1
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        key, value = _parse_kv(line)
        if key == "NAME":
            name = value
        elif key == "TYPE" or key == "COMMENT":
            pass
        elif key == "DIMENSION":
            try:
                dimension = int(value)
            except ValueError:
                raise ParseError(line_no, f"bad DIMENSION {value!r}") from None
            if dimension < 2:
                raise ParseError(line_no, "DIMENSION must be at least 2")
        elif key == "CAPACITY":
            try:
                capacity = int(value)
            except ValueError:
                raise ParseError(line_no, f"bad CAPACITY {value!r}") from None
        elif key == "EDGE_WEIGHT_TYPE":
            ewt = value.upper()
            if ewt != EDGE_WEIGHT_EUC_2D:
                raise ParseError(line_no, f"unsupported EDGE_WEIGHT_TYPE {value!r} (only EUC_2D)")
        elif key == "NODE_COORD_SECTION":
            if dimension is None:
                raise ParseError(line_no, "NODE_COORD_SECTION before DIMENSION")
            seen_sections.add(key)
            for _ in range(dimension):
                if i >= len(lines):
                    raise ParseError(len(lines), "truncated NODE_COORD_SECTION")
                entry_no = i + 1
                parts = lines[i].split()
                i += 1
                if len(parts) != 3:
                    raise ParseError(entry_no, f"bad coordinate record {lines[i-1]!r}")
                try:
                    vid, x, y = int(parts[0]), float(parts[1]), float(parts[2])
                except ValueError:
                    raise ParseError(entry_no, f"bad coordinate record {lines[i-1]!r}") from None
                if vid in coords_raw:
                    raise ParseError(entry_no, f"duplicate coordinate for vertex {vid}")
                coords_raw[vid] = (x, y)
        elif key == "DEMAND_SECTION":
            if dimension is None:
                raise ParseError(line_no, "DEMAND_SECTION before DIMENSION")
            seen_sections.add(key)
            for _ in range(dimension):
                if i >= len(lines):
                    raise ParseError(len(lines), "truncated DEMAND_SECTION")
                entry_no = i + 1
                parts = lines[i].split()
                i += 1
                if len(parts) != 2:
                    raise ParseError(entry_no, f"bad demand record {lines[i-1]!r}")
                try:
                    vid, q = int(parts[0]), int(parts[1])
                except ValueError:
                    raise ParseError(entry_no, f"bad demand record {lines[i-1]!r}") from None
                if vid in demand_raw:
                    raise ParseError(entry_no, f"duplicate demand for vertex {vid}")
                if q < 0:
                    raise ParseError(entry_no, f"negative demand for vertex {vid}")
                demand_raw[vid] = q
        elif key == "DEPOT_SECTION":
            seen_sections.add(key)
            while i < len(lines):
                entry_no = i + 1
                tok = lines[i].strip()
                i += 1
                if not tok:
                    continue
                try:
                    vid = int(tok.split()[0])
                except ValueError:
                    raise ParseError(entry_no, f"bad depot record {tok!r}") from None
                if vid == -1:
                    break
                depot_ids.append(vid)
        elif key == "EOF":
            break
        else:
            raise ParseError(line_no, f"unrecognised record {line!r}")

    if dimension is None:
        raise ParseError(len(lines), "missing DIMENSION")
    if capacity is None:
        raise ParseError(len(lines), "missing CAPACITY")
    if ewt is None:
        raise ParseError(len(lines), "missing EDGE_WEIGHT_TYPE")
    for section in ("NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"):
        if section not in seen_sections:
            raise ParseError(len(lines), f"missing {section}")
    if len(depot_ids) != 1:
        raise ParseError(len(lines), f"expected exactly one depot, got {len(depot_ids)}")

    depot = depot_ids[0]
    if depot not in coords_raw:
        raise ParseError(len(lines), f"depot {depot} has no coordinates")
    file_ids = sorted(coords_raw)
    if len(file_ids) != dimension:
        raise ParseError(len(lines), f"expected {dimension} coordinate records, got {len(file_ids)}")

    order = [depot] + [vid for vid in file_ids if vid != depot]
    n = dimension - 1
    coords = np.zeros((n + 1, 2), dtype=np.float64)
    demand = np.zeros(n + 1, dtype=np.int64)
    for new_id, vid in enumerate(order):
        coords[new_id] = coords_raw[vid]
        q = demand_raw.get(vid)
        if q is None:
            if new_id == 0:
                q = 0  # depot demand may be omitted
            else:
                raise ParseError(len(lines), f"vertex {vid} has no demand record")
        demand[new_id] = q
    if demand[0] != 0:
        raise ParseError(len(lines), "depot demand must be 0")
    if n >= 1 and int(demand[1:].max()) > capacity:
        bad = order[int(np.argmax(demand[1:])) + 1]
        raise ParseError(len(lines), f"demand exceeds capacity for vertex {bad}")

    return Instance(name=name, n=n, coords=coords, demand=demand, capacity=capacity)


def _fmt_coord(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def format_instance(inst: Instance) -> str:
    """Emit the canonical CVRPLIB text form; parse_instance round-trips it exactly."""
    out = [
        f"NAME : {inst.name}",
        "TYPE : CVRP",
        f"DIMENSION : {inst.n + 1}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        f"CAPACITY : {inst.capacity}",
        "NODE_COORD_SECTION",
    ]
    for v in range(inst.n + 1):
        out.append(f"{v + 1} {_fmt_coord(inst.coords[v, 0])} {_fmt_coord(inst.coords[v, 1])}")
    out.append("DEMAND_SECTION")
    for v in range(inst.n + 1):
        out.append(f"{v + 1} {int(inst.demand[v])}")
    out.extend(["DEPOT_SECTION", "1", "-1", "EOF", ""])
    return "\n".join(out)
