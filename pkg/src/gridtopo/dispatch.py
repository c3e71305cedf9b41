"""Scenario snapshots, load attribution, and the flow-conservation LP.

Generation scenarios come in two modes: every generator at maximum
capacity (the baseline), or per-generator outputs read from a
Snapshot.csv time point. Each generation bus's output is attributed
over the buses it can reach under the line orientation, proportionally
to the demand index; the LP then finds line flows and injections that
balance those bus loads.

LP formulation, per bus i (sets follow the orientation):

    minimize    sum_i eps_i
    subject to  inflow_i + gen_i - outflow_i - load_i + eps_i = 0
                0 <= gen_i <= cap_i
                flows >= 0, eps_i >= 0

``eps_i`` is the unserved demand at bus i, so the problem is always
feasible (shed everything) and the objective equals total load minus
total delivered generation. Flows carry no upper bounds because line
limits are not part of the dataset. The LP is solved exactly with the
in-house simplex; only bus-level quantities and the objective are
contractual; per-line flows are one optimal allocation among possibly
many.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import simplex
from .demand import DemandIndex
from .direction import Orientation
from .graph import Grid
from .ingest import GridDataset, parse_snapshot_outputs
from .simplex import SolverStall, UnboundedProblem

__all__ = [
    "MODE_MAX_CAPACITY",
    "MODE_TIME_POINT",
    "GenerationSnapshot",
    "BusLoad",
    "FlowSolution",
    "make_snapshot",
    "reachable_buses",
    "estimate_bus_load",
    "solve_flow_lp",
    "write_solution_files",
    "SolverStall",
    "UnboundedProblem",
]

MODE_MAX_CAPACITY = "max"
MODE_TIME_POINT = "timepoint"


@dataclass(frozen=True)
class GenerationSnapshot:
    """Per-generator output defining one scenario."""

    outputs: Mapping[str, float]
    mode: str
    label: str | None = None
    warnings: tuple[str, ...] = ()

    def bus_totals(self, grid: Grid) -> dict[str, float]:
        totals = {bus: 0.0 for bus in grid.adjacency}
        for bus, gens in grid.generators_by_bus.items():
            totals[bus] = sum(self.outputs.get(g.id, 0.0) for g in gens)
        return totals

    def total_output(self) -> float:
        return math.fsum(self.outputs.values())


def make_snapshot(
    dataset: GridDataset,
    mode: str = MODE_MAX_CAPACITY,
    snapshot_path=None,
    label: str | None = None,
) -> GenerationSnapshot:
    """Build a scenario from capacities or from a Snapshot.csv file.

    Time-point mode tolerates source noise: generators missing from the
    file default to 0 and outputs above nameplate capacity are accepted,
    both with a warning.
    """
    if mode == MODE_MAX_CAPACITY:
        outputs = {g.id: g.max_capacity_mw for g in dataset.generators}
        return GenerationSnapshot(
            outputs=MappingProxyType(outputs), mode=mode, label=label
        )
    if mode != MODE_TIME_POINT:
        raise ValueError(f"unknown snapshot mode {mode!r}")
    if snapshot_path is None:
        raise ValueError("time-point mode needs a snapshot file")

    reported = parse_snapshot_outputs(snapshot_path)
    warnings = []
    outputs = {}
    known = {g.id: g for g in dataset.generators}
    for gen_id, gen in known.items():
        if gen_id not in reported:
            warnings.append(f"generator {gen_id} missing from snapshot; output set to 0")
            outputs[gen_id] = 0.0
            continue
        value = reported[gen_id]
        if value > gen.max_capacity_mw:
            warnings.append(
                f"generator {gen_id} output {value} exceeds capacity "
                f"{gen.max_capacity_mw}; accepted"
            )
        outputs[gen_id] = value
    for gen_id in sorted(set(reported) - set(known)):
        warnings.append(f"snapshot lists unknown generator {gen_id}; ignored")
    return GenerationSnapshot(
        outputs=MappingProxyType(outputs),
        mode=mode,
        label=label if label is not None else Path(snapshot_path).stem,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class BusLoad:
    """Estimated load per bus (MW); conserves total attributed output."""

    values: Mapping[str, float]
    warnings: tuple[str, ...] = ()

    def total(self) -> float:
        return math.fsum(self.values.values())


def reachable_buses(orientation: Orientation, grid: Grid, source_bus: str) -> frozenset[str]:
    """Directed reachability closure from ``source_bus`` (inclusive)."""
    seen = {source_bus}
    stack = [source_bus]
    while stack:
        bus = stack.pop()
        for line_id, neighbor in grid.adjacency[bus]:
            frm, _to = orientation.from_to(grid.lines[line_id])
            if frm == bus and neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return frozenset(seen)


def estimate_bus_load(
    demand_index: DemandIndex,
    snapshot: GenerationSnapshot,
    orientation: Orientation,
    grid: Grid,
) -> BusLoad:
    """Attribute each generation bus's output over its reachable buses,
    proportionally to the demand index.

    A reachable set with zero total index cannot take a proportional
    share; the output is attributed to the generation bus itself (with
    a warning) so generation mass is conserved.
    """
    loads = {bus: 0.0 for bus in grid.adjacency}
    warnings = []
    totals = snapshot.bus_totals(grid)
    for bus in sorted(totals):
        output = totals[bus]
        if output <= 0.0:
            continue
        reach = reachable_buses(orientation, grid, bus)
        index_sum = math.fsum(demand_index.values.get(r, 0.0) for r in reach)
        if index_sum == 0.0:
            warnings.append(
                f"zero demand index over buses reachable from {bus}; "
                f"attributing {output} MW to {bus} itself"
            )
            loads[bus] += output
            continue
        for member in sorted(reach):
            weight = demand_index.values.get(member, 0.0) / index_sum
            loads[member] += weight * output
    return BusLoad(values=MappingProxyType(loads), warnings=tuple(warnings))


@dataclass(frozen=True)
class FlowSolution:
    """Optimal flows, injections, and unserved demand for one scenario.

    ``loads`` echoes the LP's input bus loads so a solution is
    self-contained for export and rendering.
    """

    flows: Mapping[str, float]
    injections: Mapping[str, float]
    mismatch: Mapping[str, float]
    loads: Mapping[str, float]
    objective: float
    max_residual: float
    iterations: int = 0

    def total_injection(self) -> float:
        return math.fsum(self.injections.values())

    def total_load(self) -> float:
        return math.fsum(self.loads.values())


def solve_flow_lp(
    orientation: Orientation,
    grid: Grid,
    bus_load: BusLoad,
    snapshot: GenerationSnapshot,
) -> FlowSolution:
    """Solve the flow-conservation LP for one oriented scenario.

    Always feasible; ``mismatch`` absorbs any deficit. ``max_residual``
    is the largest nodal-balance violation recomputed from the returned
    numbers, and stays within 1e-6 of zero.
    """
    bus_ids = sorted(grid.adjacency)
    line_ids = sorted(grid.lines)
    n, m = len(bus_ids), len(line_ids)
    if n == 0:
        return FlowSolution(
            flows=MappingProxyType({}),
            injections=MappingProxyType({}),
            mismatch=MappingProxyType({}),
            loads=MappingProxyType({}),
            objective=0.0,
            max_residual=0.0,
        )

    bus_pos = {bus: i for i, bus in enumerate(bus_ids)}
    caps = snapshot.bus_totals(grid)
    loads = [bus_load.values.get(bus, 0.0) for bus in bus_ids]
    if min(loads) < 0.0:
        raise ValueError("bus loads must be nonnegative")

    # Columns: flows (m) | gen (n) | eps (n) | cap slack (n)
    total = m + 3 * n
    A = np.zeros((2 * n, total))
    b = np.zeros(2 * n)
    c = np.zeros(total)
    c[m + n : m + 2 * n] = 1.0

    for col, line_id in enumerate(line_ids):
        frm, to = orientation.from_to(grid.lines[line_id])
        A[bus_pos[frm], col] -= 1.0
        A[bus_pos[to], col] += 1.0
    for i, bus in enumerate(bus_ids):
        A[i, m + i] = 1.0  # generation
        A[i, m + n + i] = 1.0  # unserved demand
        b[i] = loads[i]
        A[n + i, m + i] = 1.0  # capacity row: gen + slack = cap
        A[n + i, m + 2 * n + i] = 1.0
        b[n + i] = caps[bus]

    basis = list(range(m + n, m + 2 * n)) + list(range(m + 2 * n, m + 3 * n))
    x, objective, iterations = simplex.solve(c, A, b, basis)

    flows = {line_id: float(x[col]) for col, line_id in enumerate(line_ids)}
    injections = {bus: float(x[m + i]) for i, bus in enumerate(bus_ids)}
    mismatch = {bus: float(x[m + n + i]) for i, bus in enumerate(bus_ids)}

    residual = 0.0
    for i, bus in enumerate(bus_ids):
        balance = injections[bus] - loads[i] + mismatch[bus]
        for line_id, neighbor in grid.adjacency[bus]:
            frm, _to = orientation.from_to(grid.lines[line_id])
            balance += -flows[line_id] if frm == bus else flows[line_id]
        residual = max(residual, abs(balance))

    return FlowSolution(
        flows=MappingProxyType(flows),
        injections=MappingProxyType(injections),
        mismatch=MappingProxyType(mismatch),
        loads=MappingProxyType({bus: loads[i] for i, bus in enumerate(bus_ids)}),
        objective=objective,
        max_residual=residual,
        iterations=iterations,
    )


def write_solution_files(
    solution: FlowSolution,
    orientation: Orientation,
    grid: Grid,
    out_dir,
) -> dict[str, Path]:
    """Write flows.csv, buses.csv, and summary.txt under ``out_dir``."""
    import csv

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    flows_path = out_dir / "flows.csv"
    buses_path = out_dir / "buses.csv"
    summary_path = out_dir / "summary.txt"

    with open(flows_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("line_id", "from_bus", "to_bus", "flow_mw"))
        for line_id in sorted(solution.flows):
            frm, to = orientation.from_to(grid.lines[line_id])
            writer.writerow((line_id, frm, to, repr(solution.flows[line_id])))

    with open(buses_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("bus_id", "injection_mw", "load_mw", "epsilon_mw"))
        for bus in sorted(solution.injections):
            writer.writerow(
                (
                    bus,
                    repr(solution.injections[bus]),
                    repr(solution.loads.get(bus, 0.0)),
                    repr(solution.mismatch[bus]),
                )
            )

    summary_path.write_text(
        "\n".join(
            [
                f"objective_mw = {repr(solution.objective)}",
                f"max_residual_mw = {repr(solution.max_residual)}",
                f"total_injection_mw = {repr(solution.total_injection())}",
                f"total_load_mw = {repr(solution.total_load())}",
                f"buses = {len(solution.injections)}",
                f"lines = {len(solution.flows)}",
                "",
            ]
        ),
        encoding="utf-8",
    )
    return {"flows": flows_path, "buses": buses_path, "summary": summary_path}
