"""Assign a flow direction to every transmission line.

Stage 1 applies physical heuristics line by line, strongest signal
first:

1. An active generator at exactly one endpoint pushes flow away from
   it. Two active-generator endpoints get a seeded-random direction
   (the link is redundant for everyone else's supply either way).
2. A line rated below both endpoint classes carries atypical transfers
   (or reflects a recording gap), so flow is treated as free between
   its terminals: the line is deliberately left undirected here.
3. Endpoint classes differing: high feeds low.
4. A line rated above an endpoint's class cannot be fed from that end.
   (With rule 3 ahead of it this rule never decides alone; it is kept
   for completeness.)

Stage 2 collects the still-undirected lines into connected residual
subgraphs and orients each by multi-source BFS from its entry points:
buses of the top voltage class (only meaningful when the subgraph
mixes classes), buses with active generation, and buses already fed by
a stage-1 direction. BFS tree edges point parent to child; leftover
non-tree edges get a seeded-random direction, which cannot break
reachability. Heuristic directions are never overwritten.

All voltage comparisons use :func:`gridtopo.graph.voltage_class`, so
240 kV and 500 kV are interchangeable. The whole procedure is a pure
function of (grid, snapshot, seed).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import TYPE_CHECKING, Mapping

from . import rng
from .graph import Grid
from .ingest import LineRecord

if TYPE_CHECKING:
    from .dispatch import GenerationSnapshot

__all__ = [
    "DEFAULT_SEED",
    "Direction",
    "Provenance",
    "Orientation",
    "PartialOrientation",
    "ResidualSubgraph",
    "apply_heuristics",
    "residual_subgraphs",
    "entry_points",
    "bfs_orient",
    "orient_all",
    "write_orientation_csv",
    "read_orientation_csv",
]

DEFAULT_SEED = 42


class Direction(Enum):
    A_TO_B = "AtoB"
    B_TO_A = "BtoA"


class Provenance(Enum):
    TWO_END_VOLTAGE = "TwoEndVoltage"
    LINE_VOLTAGE = "LineVoltage"
    GENERATOR_SOURCE = "GeneratorSource"
    SPECIAL_FREE_FLOW = "SpecialFreeFlow"
    BOTH_ENDS_GENERATOR_RANDOM = "BothEndsGeneratorRandom"
    BFS_TREE = "BfsTree"
    RESIDUAL_RANDOM = "ResidualRandom"


#: Provenances decided before the BFS stage.
HEURISTIC_PROVENANCES = frozenset(
    {
        Provenance.TWO_END_VOLTAGE,
        Provenance.LINE_VOLTAGE,
        Provenance.GENERATOR_SOURCE,
        Provenance.BOTH_ENDS_GENERATOR_RANDOM,
    }
)


@dataclass(frozen=True)
class Orientation:
    """Total direction assignment with per-line provenance."""

    directions: Mapping[str, Direction]
    provenance: Mapping[str, Provenance]
    conflicts: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def from_to(self, line: LineRecord) -> tuple[str, str]:
        if self.directions[line.id] is Direction.A_TO_B:
            return line.endpoint_a, line.endpoint_b
        return line.endpoint_b, line.endpoint_a

    def endpoint_map(self, grid: Grid) -> dict[str, tuple[str, str]]:
        return {line_id: self.from_to(grid.lines[line_id]) for line_id in self.directions}

    @property
    def heuristic_count(self) -> int:
        return sum(1 for p in self.provenance.values() if p in HEURISTIC_PROVENANCES)

    def provenance_counts(self) -> dict[Provenance, int]:
        counts = {p: 0 for p in Provenance}
        for p in self.provenance.values():
            counts[p] += 1
        return counts


@dataclass(frozen=True)
class PartialOrientation:
    """Stage-1 output: heuristic directions plus deferred lines."""

    directions: Mapping[str, Direction]
    provenance: Mapping[str, Provenance]
    conflicts: tuple[str, ...]
    free_flow: frozenset[str]  # undirected lines deferred by rule 2


@dataclass(frozen=True, slots=True)
class ResidualSubgraph:
    buses: tuple[str, ...]
    lines: tuple[str, ...]


def _bus_outputs(grid: Grid, snapshot: "GenerationSnapshot") -> dict[str, float]:
    totals: dict[str, float] = {}
    for bus, gens in grid.generators_by_bus.items():
        totals[bus] = sum(snapshot.outputs.get(g.id, 0.0) for g in gens)
    return totals


def apply_heuristics(
    grid: Grid, snapshot: "GenerationSnapshot", seed: int = DEFAULT_SEED
) -> PartialOrientation:
    """Stage 1: direct every line the physical heuristics can decide.

    Lines the heuristics cannot (or deliberately do not) decide stay
    absent from the returned mapping. A generator decision that
    contradicts the two-end voltage rule wins but is flagged as a
    conflict.
    """
    outputs = _bus_outputs(grid, snapshot)
    directions: dict[str, Direction] = {}
    provenance: dict[str, Provenance] = {}
    conflicts: list[str] = []
    free_flow: set[str] = set()

    for line_id, line in grid.lines.items():
        class_a = grid.bus_class(line.endpoint_a)
        class_b = grid.bus_class(line.endpoint_b)
        class_line = grid.line_class(line_id)
        active_a = outputs.get(line.endpoint_a, 0.0) > 0.0
        active_b = outputs.get(line.endpoint_b, 0.0) > 0.0

        voltage_rule = None
        if class_a > class_b:
            voltage_rule = Direction.A_TO_B
        elif class_b > class_a:
            voltage_rule = Direction.B_TO_A

        if active_a and active_b:
            directions[line_id] = (
                Direction.A_TO_B if rng.coin(seed, line_id) else Direction.B_TO_A
            )
            provenance[line_id] = Provenance.BOTH_ENDS_GENERATOR_RANDOM
            continue
        if active_a or active_b:
            chosen = Direction.A_TO_B if active_a else Direction.B_TO_A
            directions[line_id] = chosen
            provenance[line_id] = Provenance.GENERATOR_SOURCE
            if voltage_rule is not None and voltage_rule is not chosen:
                conflicts.append(line_id)
            continue
        if class_line < class_a and class_line < class_b:
            free_flow.add(line_id)
            continue
        if voltage_rule is not None:
            directions[line_id] = voltage_rule
            provenance[line_id] = Provenance.TWO_END_VOLTAGE
            continue
        # Line above exactly one endpoint class would force the other
        # end as source; unreachable when the rule above tied.
        blocked_a = class_line > class_a
        blocked_b = class_line > class_b
        if blocked_a != blocked_b:
            directions[line_id] = Direction.B_TO_A if blocked_a else Direction.A_TO_B
            provenance[line_id] = Provenance.LINE_VOLTAGE

    return PartialOrientation(
        directions=MappingProxyType(directions),
        provenance=MappingProxyType(provenance),
        conflicts=tuple(sorted(conflicts)),
        free_flow=frozenset(free_flow),
    )


def residual_subgraphs(grid: Grid, partial: PartialOrientation) -> tuple[ResidualSubgraph, ...]:
    """Connected components of the grid restricted to undirected lines."""
    undirected = [l for l in grid.lines if l not in partial.directions]
    incident: dict[str, list[tuple[str, str]]] = {}
    for line_id in undirected:
        line = grid.lines[line_id]
        incident.setdefault(line.endpoint_a, []).append((line_id, line.endpoint_b))
        incident.setdefault(line.endpoint_b, []).append((line_id, line.endpoint_a))

    seen: set[str] = set()
    subgraphs: list[ResidualSubgraph] = []
    for start in sorted(incident):
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        buses: list[str] = []
        line_ids: set[str] = set()
        while stack:
            bus = stack.pop()
            buses.append(bus)
            for line_id, neighbor in incident[bus]:
                line_ids.add(line_id)
                if neighbor not in seen:
                    seen.add(neighbor)
                    stack.append(neighbor)
        subgraphs.append(ResidualSubgraph(tuple(sorted(buses)), tuple(sorted(line_ids))))
    return tuple(subgraphs)


def entry_points(
    subgraph: ResidualSubgraph,
    grid: Grid,
    snapshot: "GenerationSnapshot",
    partial: PartialOrientation,
) -> tuple[tuple[str, ...], bool]:
    """Buses through which power enters the subgraph.

    Union of: (a) top-voltage-class buses, counted only when the
    subgraph mixes classes (in a uniform subgraph voltage carries no
    signal); (b) buses with active generation; (c) buses already fed by
    a stage-1 directed line. Returns ``(entries, used_fallback)``; when
    every rule comes up empty the lowest-id bus serves as entry so the
    subgraph still gets a deterministic orientation.
    """
    classes = {bus: grid.bus_class(bus) for bus in subgraph.buses}
    top = max(classes.values())
    entries: set[str] = set()
    if min(classes.values()) < top:
        entries.update(bus for bus, cls in classes.items() if cls == top)

    outputs = _bus_outputs(grid, snapshot)
    entries.update(bus for bus in subgraph.buses if outputs.get(bus, 0.0) > 0.0)

    member = set(subgraph.buses)
    for line_id, direction in partial.directions.items():
        line = grid.lines[line_id]
        head = line.endpoint_b if direction is Direction.A_TO_B else line.endpoint_a
        if head in member:
            entries.add(head)

    if entries:
        return tuple(sorted(entries)), False
    return (subgraph.buses[0],), True


def bfs_orient(
    grid: Grid,
    subgraph: ResidualSubgraph,
    entries: tuple[str, ...],
    seed: int = DEFAULT_SEED,
    free_flow: frozenset[str] = frozenset(),
) -> tuple[dict[str, Direction], dict[str, Provenance]]:
    """Stage 2 for one subgraph: multi-source BFS orientation.

    All entries start at depth 0; buses are dequeued FIFO and their
    neighbors visited in sorted (bus id, line id) order, so the tree is
    deterministic. Tree edges point parent to child. Non-tree edges
    get a per-line seeded-random direction afterwards; reachability is
    already guaranteed by the tree alone.
    """
    if not entries:
        raise ValueError("bfs_orient requires at least one entry point")
    members = set(subgraph.buses)
    remaining = set(subgraph.lines)
    directions: dict[str, Direction] = {}
    provenance: dict[str, Provenance] = {}

    visited = set(entries)
    queue = deque(sorted(entries))
    while queue:
        bus = queue.popleft()
        for line_id, neighbor in grid.adjacency[bus]:
            if line_id not in remaining or neighbor not in members:
                continue
            if neighbor in visited:
                continue  # non-tree edge; randomized below
            line = grid.lines[line_id]
            directions[line_id] = (
                Direction.A_TO_B if bus == line.endpoint_a else Direction.B_TO_A
            )
            provenance[line_id] = (
                Provenance.SPECIAL_FREE_FLOW
                if line_id in free_flow
                else Provenance.BFS_TREE
            )
            remaining.discard(line_id)
            visited.add(neighbor)
            queue.append(neighbor)

    for line_id in sorted(remaining):
        directions[line_id] = (
            Direction.A_TO_B if rng.coin(seed, line_id) else Direction.B_TO_A
        )
        provenance[line_id] = Provenance.RESIDUAL_RANDOM
    return directions, provenance


def orient_all(
    grid: Grid, snapshot: "GenerationSnapshot", seed: int = DEFAULT_SEED
) -> Orientation:
    """Run both stages and return a total orientation."""
    partial = apply_heuristics(grid, snapshot, seed)
    directions = dict(partial.directions)
    provenance = dict(partial.provenance)
    warnings: list[str] = []

    for subgraph in residual_subgraphs(grid, partial):
        entries, used_fallback = entry_points(subgraph, grid, snapshot, partial)
        if used_fallback:
            warnings.append(
                f"no entry point found for subgraph starting at {subgraph.buses[0]}; "
                "falling back to its lowest-id bus"
            )
        sub_dir, sub_prov = bfs_orient(grid, subgraph, entries, seed, partial.free_flow)
        directions.update(sub_dir)
        provenance.update(sub_prov)

    missing = [l for l in grid.lines if l not in directions]
    if missing:
        raise RuntimeError(f"orientation left lines undirected: {missing}")
    return Orientation(
        directions=MappingProxyType({l: directions[l] for l in sorted(directions)}),
        provenance=MappingProxyType({l: provenance[l] for l in sorted(provenance)}),
        conflicts=partial.conflicts,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# CSV export / import

def write_orientation_csv(orientation: Orientation, grid: Grid, path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("line_id", "from_bus", "to_bus", "provenance"))
        for line_id in sorted(orientation.directions):
            frm, to = orientation.from_to(grid.lines[line_id])
            writer.writerow((line_id, frm, to, orientation.provenance[line_id].value))


def read_orientation_csv(path) -> tuple[dict[str, tuple[str, str]], dict[str, str]]:
    """Read an orientation export; returns (line -> (from, to), line -> provenance)."""
    import csv

    endpoints: dict[str, tuple[str, str]] = {}
    provenance: dict[str, str] = {}
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise ValueError(f"cannot read orientation file {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        expected = {"line_id", "from_bus", "to_bus", "provenance"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ValueError(f"{path}: expected header line_id,from_bus,to_bus,provenance")
        for row in reader:
            endpoints[row["line_id"]] = (row["from_bus"], row["to_bus"])
            provenance[row["line_id"]] = row["provenance"]
    return endpoints, provenance
