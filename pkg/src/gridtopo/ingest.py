"""CSV ingestion of the open-data file family into a validated GridDataset.

File schemas (UTF-8, comma-delimited, header row required, ``.`` decimal
separator):

=========================  ====================================================
Substation.csv             ``id,name,x,y,voltage_kv``
Line.csv                   ``id,bus_a,bus_b,voltage_kv,wkt_geometry`` (last
                           column optional)
Generator.csv              ``id,bus_id,max_capacity_mw,fuel_type``
PlanningAreaBorder.csv     ``area_id,name,ring_index,vertex_index,x,y``
CityBorder.csv             ``city_id,name,ring_index,vertex_index,x,y``
CityPopulationPoint.csv    ``city_id,x,y,population``
HourlyLoad.csv             ``area_id,name,avg_hourly_load_mw``
Snapshot.csv               ``generator_id,output_mw``
=========================  ====================================================

Parsers are pure functions of file bytes and fail fast with the row
number of the offending record. Cross-file references (line endpoints,
generator buses, load area ids) are checked at link time in
:func:`build_dataset`, not at parse time.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .geometry import PlanarPoint, PlanarPolygon, point_in_polygon

__all__ = [
    "IngestError",
    "MissingColumn",
    "UnexpectedColumn",
    "DuplicateId",
    "NonNumericValue",
    "NonNumericVoltage",
    "InvalidValue",
    "DanglingReference",
    "OverlappingAreas",
    "BusRecord",
    "LineRecord",
    "GeneratorRecord",
    "CityPolygon",
    "PlanningArea",
    "PopulationPoint",
    "AreaLoad",
    "GridDataset",
    "ValidationReport",
    "parse_buses",
    "parse_lines",
    "parse_generators",
    "parse_planning_area_polygons",
    "parse_city_polygons",
    "parse_population_points",
    "parse_hourly_loads",
    "parse_snapshot_outputs",
    "serialize_buses",
    "serialize_lines",
    "serialize_generators",
    "serialize_hourly_loads",
    "assign_regions",
    "build_dataset",
    "validate_dataset",
    "load_dataset",
    "DATASET_FILES",
]


# ---------------------------------------------------------------------------
# Errors

class IngestError(Exception):
    """Input data violates the documented schema or invariants."""

    def __init__(self, message: str, *, path=None, row: int | None = None):
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where += f"{path}: "
        if row is not None:
            where += f"row {row}: "
        super().__init__(where + message)


class MissingColumn(IngestError):
    pass


class UnexpectedColumn(IngestError):
    pass


class DuplicateId(IngestError):
    pass


class NonNumericValue(IngestError):
    pass


class NonNumericVoltage(NonNumericValue):
    pass


class InvalidValue(IngestError):
    pass


class DanglingReference(IngestError):
    pass


class OverlappingAreas(IngestError):
    pass


# ---------------------------------------------------------------------------
# Records

@dataclass(frozen=True, slots=True)
class BusRecord:
    """A substation node. Region fields are assigned, never parsed."""

    id: str
    name: str
    location: PlanarPoint
    voltage_kv: float
    planning_area_id: str | None = None
    is_urban: bool = False


@dataclass(frozen=True, slots=True)
class LineRecord:
    """A transmission line between two distinct buses."""

    id: str
    endpoint_a: str
    endpoint_b: str
    voltage_kv: float
    geometry: tuple[PlanarPoint, ...] | None = None


@dataclass(frozen=True, slots=True)
class GeneratorRecord:
    id: str
    bus_id: str
    max_capacity_mw: float
    fuel_type: str


@dataclass(frozen=True, slots=True)
class CityPolygon:
    id: str
    name: str
    boundary: PlanarPolygon


@dataclass(frozen=True, slots=True)
class PlanningArea:
    """Administrative region carrying an aggregate hourly load figure."""

    id: str
    name: str
    boundary: PlanarPolygon
    avg_hourly_load_mw: float = 0.0
    population: int = 0


@dataclass(frozen=True, slots=True)
class PopulationPoint:
    city_id: str
    location: PlanarPoint
    population: int


@dataclass(frozen=True, slots=True)
class AreaLoad:
    area_id: str
    name: str
    avg_hourly_load_mw: float


@dataclass(frozen=True, slots=True)
class DatasetProvenance:
    source_files: tuple[tuple[str, str], ...] = ()
    ingested_at: str = ""


@dataclass(frozen=True, slots=True)
class GridDataset:
    """Immutable canonical model of one ingested dataset.

    All collections are tuples sorted by id; every referential link is
    guaranteed to resolve once :func:`build_dataset` has returned.
    Instances are safe to share across concurrent readers.
    """

    buses: tuple[BusRecord, ...]
    lines: tuple[LineRecord, ...]
    generators: tuple[GeneratorRecord, ...]
    planning_areas: tuple[PlanningArea, ...]
    city_polygons: tuple[CityPolygon, ...]
    provenance: DatasetProvenance = DatasetProvenance()

    def bus_index(self) -> Mapping[str, BusRecord]:
        return MappingProxyType({b.id: b for b in self.buses})

    def area_index(self) -> Mapping[str, PlanningArea]:
        return MappingProxyType({a.id: a for a in self.planning_areas})


# ---------------------------------------------------------------------------
# Low-level CSV helpers

def _read_rows(path, required: Sequence[str], optional: Sequence[str] = ()):
    """Yield (row_number, {column: raw}) after validating the header.

    The header must list the required columns in order, optionally
    followed (in order) by a prefix-free subset of the optional ones.
    Row numbers are physical 1-based file lines (header is row 1).
    A leading BOM (common in spreadsheet exports) is tolerated.
    """
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MissingColumn(
                f"empty file, expected header {','.join(required)}", path=path
            )
        allowed = list(required) + [c for c in optional if c in header]
        missing = [c for c in required if c not in header]
        if missing:
            raise MissingColumn(
                "missing column(s): " + ", ".join(missing), path=path, row=1
            )
        if header != allowed:
            raise UnexpectedColumn(
                f"header {','.join(header)} does not match schema "
                f"{','.join(allowed)}",
                path=path,
                row=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InvalidValue(
                    f"expected {len(header)} fields, found {len(row)}",
                    path=path,
                    row=lineno,
                )
            yield lineno, dict(zip(header, row))


def _float(raw: str, column: str, *, path, row, cls=NonNumericValue) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise cls(f"non-numeric {column}: {raw!r}", path=path, row=row) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise cls(f"non-finite {column}: {raw!r}", path=path, row=row)
    return value


def _int(raw: str, column: str, *, path, row) -> int:
    try:
        return int(raw)
    except ValueError:
        raise NonNumericValue(
            f"non-integer {column}: {raw!r}", path=path, row=row
        ) from None


def _require_id(raw: str, column: str, *, path, row) -> str:
    value = raw.strip()
    if not value:
        raise InvalidValue(f"empty {column}", path=path, row=row)
    return value


def _fmt(value: float) -> str:
    return repr(float(value))


_WKT_LINESTRING = re.compile(r"^\s*LINESTRING\s*\((.*)\)\s*$", re.IGNORECASE)


def parse_wkt_linestring(text: str) -> tuple[PlanarPoint, ...]:
    match = _WKT_LINESTRING.match(text)
    if not match:
        raise ValueError(f"not a WKT LINESTRING: {text!r}")
    points = []
    for chunk in match.group(1).split(","):
        parts = chunk.split()
        if len(parts) != 2:
            raise ValueError(f"bad WKT coordinate pair: {chunk!r}")
        points.append(PlanarPoint(float(parts[0]), float(parts[1])))
    if len(points) < 2:
        raise ValueError("LINESTRING needs at least 2 points")
    return tuple(points)


def format_wkt_linestring(points: Iterable[PlanarPoint]) -> str:
    inner = ", ".join(f"{_fmt(p.x)} {_fmt(p.y)}" for p in points)
    return f"LINESTRING ({inner})"


# ---------------------------------------------------------------------------
# Parsers

def parse_buses(path) -> list[BusRecord]:
    """Parse Substation.csv. Duplicate ids abort with the row number."""
    seen: set[str] = set()
    records = []
    for row_no, row in _read_rows(path, ("id", "name", "x", "y", "voltage_kv")):
        bus_id = _require_id(row["id"], "id", path=path, row=row_no)
        if bus_id in seen:
            raise DuplicateId(f"duplicate bus id {bus_id}", path=path, row=row_no)
        seen.add(bus_id)
        kv = _float(
            row["voltage_kv"], "voltage_kv", path=path, row=row_no,
            cls=NonNumericVoltage,
        )
        if kv <= 0:
            raise InvalidValue(f"voltage_kv must be > 0, got {kv}", path=path, row=row_no)
        location = PlanarPoint(
            _float(row["x"], "x", path=path, row=row_no),
            _float(row["y"], "y", path=path, row=row_no),
        )
        records.append(BusRecord(bus_id, row["name"], location, kv))
    return records


def parse_lines(path) -> list[LineRecord]:
    seen: set[str] = set()
    records = []
    for row_no, row in _read_rows(
        path, ("id", "bus_a", "bus_b", "voltage_kv"), optional=("wkt_geometry",)
    ):
        line_id = _require_id(row["id"], "id", path=path, row=row_no)
        if line_id in seen:
            raise DuplicateId(f"duplicate line id {line_id}", path=path, row=row_no)
        seen.add(line_id)
        bus_a = _require_id(row["bus_a"], "bus_a", path=path, row=row_no)
        bus_b = _require_id(row["bus_b"], "bus_b", path=path, row=row_no)
        if bus_a == bus_b:
            raise InvalidValue(
                f"line {line_id} is a self-loop on {bus_a}", path=path, row=row_no
            )
        kv = _float(
            row["voltage_kv"], "voltage_kv", path=path, row=row_no,
            cls=NonNumericVoltage,
        )
        if kv <= 0:
            raise InvalidValue(f"voltage_kv must be > 0, got {kv}", path=path, row=row_no)
        geometry = None
        raw_wkt = row.get("wkt_geometry", "").strip()
        if raw_wkt:
            try:
                geometry = parse_wkt_linestring(raw_wkt)
            except ValueError as exc:
                raise InvalidValue(str(exc), path=path, row=row_no) from None
        records.append(LineRecord(line_id, bus_a, bus_b, kv, geometry))
    return records


def parse_generators(path) -> list[GeneratorRecord]:
    seen: set[str] = set()
    records = []
    for row_no, row in _read_rows(
        path, ("id", "bus_id", "max_capacity_mw", "fuel_type")
    ):
        gen_id = _require_id(row["id"], "id", path=path, row=row_no)
        if gen_id in seen:
            raise DuplicateId(f"duplicate generator id {gen_id}", path=path, row=row_no)
        seen.add(gen_id)
        cap = _float(row["max_capacity_mw"], "max_capacity_mw", path=path, row=row_no)
        if cap < 0:
            raise InvalidValue(
                f"max_capacity_mw must be >= 0, got {cap}", path=path, row=row_no
            )
        bus_id = _require_id(row["bus_id"], "bus_id", path=path, row=row_no)
        records.append(GeneratorRecord(gen_id, bus_id, cap, row["fuel_type"]))
    return records


def _parse_border_rows(path, id_column: str):
    """Shared reader for the two border files. Returns ordered shapes."""
    # vertices[id] -> {ring_index: {vertex_index: point}}
    vertices: dict[str, dict[int, dict[int, PlanarPoint]]] = {}
    names: dict[str, str] = {}
    order: list[str] = []
    for row_no, row in _read_rows(
        path, (id_column, "name", "ring_index", "vertex_index", "x", "y")
    ):
        shape_id = _require_id(row[id_column], id_column, path=path, row=row_no)
        ring_i = _int(row["ring_index"], "ring_index", path=path, row=row_no)
        vertex_i = _int(row["vertex_index"], "vertex_index", path=path, row=row_no)
        if ring_i < 0 or vertex_i < 0:
            raise InvalidValue("negative ring/vertex index", path=path, row=row_no)
        point = PlanarPoint(
            _float(row["x"], "x", path=path, row=row_no),
            _float(row["y"], "y", path=path, row=row_no),
        )
        if shape_id not in vertices:
            vertices[shape_id] = {}
            names[shape_id] = row["name"]
            order.append(shape_id)
        elif names[shape_id] != row["name"]:
            raise InvalidValue(
                f"{id_column} {shape_id} listed under two names", path=path, row=row_no
            )
        ring = vertices[shape_id].setdefault(ring_i, {})
        if vertex_i in ring:
            raise DuplicateId(
                f"duplicate vertex {vertex_i} in ring {ring_i} of {shape_id}",
                path=path,
                row=row_no,
            )
        ring[vertex_i] = point

    shapes = []
    for shape_id in order:
        rings = []
        for ring_i in sorted(vertices[shape_id]):
            ring = vertices[shape_id][ring_i]
            rings.append(tuple(ring[i] for i in sorted(ring)))
        try:
            polygon = PlanarPolygon(tuple(rings))
        except ValueError as exc:
            raise InvalidValue(f"{id_column} {shape_id}: {exc}", path=path) from None
        shapes.append((shape_id, names[shape_id], polygon))
    return shapes


def parse_planning_area_polygons(path) -> list[PlanningArea]:
    """Parse PlanningAreaBorder.csv; loads and population are merged later."""
    return [
        PlanningArea(shape_id, name, polygon)
        for shape_id, name, polygon in _parse_border_rows(path, "area_id")
    ]


def parse_city_polygons(path) -> list[CityPolygon]:
    return [
        CityPolygon(shape_id, name, polygon)
        for shape_id, name, polygon in _parse_border_rows(path, "city_id")
    ]


def parse_population_points(path) -> list[PopulationPoint]:
    records = []
    for row_no, row in _read_rows(path, ("city_id", "x", "y", "population")):
        pop = _int(row["population"], "population", path=path, row=row_no)
        if pop < 0:
            raise InvalidValue(f"population must be >= 0, got {pop}", path=path, row=row_no)
        records.append(
            PopulationPoint(
                _require_id(row["city_id"], "city_id", path=path, row=row_no),
                PlanarPoint(
                    _float(row["x"], "x", path=path, row=row_no),
                    _float(row["y"], "y", path=path, row=row_no),
                ),
                pop,
            )
        )
    return records


def parse_hourly_loads(path) -> list[AreaLoad]:
    seen: set[str] = set()
    records = []
    for row_no, row in _read_rows(path, ("area_id", "name", "avg_hourly_load_mw")):
        area_id = _require_id(row["area_id"], "area_id", path=path, row=row_no)
        if area_id in seen:
            raise DuplicateId(f"duplicate area id {area_id}", path=path, row=row_no)
        seen.add(area_id)
        load = _float(row["avg_hourly_load_mw"], "avg_hourly_load_mw", path=path, row=row_no)
        if load < 0:
            raise InvalidValue(
                f"avg_hourly_load_mw must be >= 0, got {load}", path=path, row=row_no
            )
        records.append(AreaLoad(area_id, row["name"], load))
    return records


def parse_snapshot_outputs(path) -> dict[str, float]:
    """Parse Snapshot.csv into generator id -> output (MW)."""
    outputs: dict[str, float] = {}
    for row_no, row in _read_rows(path, ("generator_id", "output_mw")):
        gen_id = _require_id(row["generator_id"], "generator_id", path=path, row=row_no)
        if gen_id in outputs:
            raise DuplicateId(f"duplicate generator id {gen_id}", path=path, row=row_no)
        value = _float(row["output_mw"], "output_mw", path=path, row=row_no)
        if value < 0:
            raise InvalidValue(f"output_mw must be >= 0, got {value}", path=path, row=row_no)
        outputs[gen_id] = value
    return outputs


# ---------------------------------------------------------------------------
# Serializers (canonical form; parse -> serialize normalizes a file)

def _write_csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def serialize_buses(records: Iterable[BusRecord]) -> str:
    return _write_csv(
        ("id", "name", "x", "y", "voltage_kv"),
        (
            (b.id, b.name, _fmt(b.location.x), _fmt(b.location.y), _fmt(b.voltage_kv))
            for b in records
        ),
    )


def serialize_lines(records: Iterable[LineRecord]) -> str:
    records = list(records)
    with_geometry = any(r.geometry is not None for r in records)
    header = ["id", "bus_a", "bus_b", "voltage_kv"]
    if with_geometry:
        header.append("wkt_geometry")
    rows = []
    for r in records:
        row = [r.id, r.endpoint_a, r.endpoint_b, _fmt(r.voltage_kv)]
        if with_geometry:
            row.append("" if r.geometry is None else format_wkt_linestring(r.geometry))
        rows.append(row)
    return _write_csv(header, rows)


def serialize_generators(records: Iterable[GeneratorRecord]) -> str:
    return _write_csv(
        ("id", "bus_id", "max_capacity_mw", "fuel_type"),
        ((g.id, g.bus_id, _fmt(g.max_capacity_mw), g.fuel_type) for g in records),
    )


def serialize_hourly_loads(records: Iterable[AreaLoad]) -> str:
    return _write_csv(
        ("area_id", "name", "avg_hourly_load_mw"),
        ((a.area_id, a.name, _fmt(a.avg_hourly_load_mw)) for a in records),
    )


def _border_rows(shape_id: str, name: str, boundary: PlanarPolygon):
    for ring_i, ring in enumerate(boundary.rings):
        for vertex_i, point in enumerate(ring[:-1]):  # open form on disk
            yield (shape_id, name, str(ring_i), str(vertex_i), _fmt(point.x), _fmt(point.y))


def serialize_planning_area_polygons(areas: Iterable[PlanningArea]) -> str:
    rows = []
    for area in areas:
        rows.extend(_border_rows(area.id, area.name, area.boundary))
    return _write_csv(("area_id", "name", "ring_index", "vertex_index", "x", "y"), rows)


def serialize_city_polygons(cities: Iterable[CityPolygon]) -> str:
    rows = []
    for city in cities:
        rows.extend(_border_rows(city.id, city.name, city.boundary))
    return _write_csv(("city_id", "name", "ring_index", "vertex_index", "x", "y"), rows)


def serialize_population_points(points: Iterable[PopulationPoint]) -> str:
    return _write_csv(
        ("city_id", "x", "y", "population"),
        (
            (p.city_id, _fmt(p.location.x), _fmt(p.location.y), str(p.population))
            for p in points
        ),
    )


def serialize_snapshot_outputs(outputs: Mapping[str, float]) -> str:
    return _write_csv(
        ("generator_id", "output_mw"),
        ((gen_id, _fmt(mw)) for gen_id, mw in sorted(outputs.items())),
    )


# ---------------------------------------------------------------------------
# Linking, region assignment, validation

def _containing(point: PlanarPoint, shapes, boundary_of):
    return [s for s in shapes if point_in_polygon(point, boundary_of(s))]


def assign_regions(
    buses: Iterable[BusRecord],
    planning_areas: Sequence[PlanningArea],
    city_polygons: Sequence[CityPolygon],
) -> list[BusRecord]:
    """Annotate each bus with its planning area and urban flag.

    A bus must fall in at most one planning area (areas are assumed to
    partition the territory); two or more containing areas is a hard
    error. A bus outside every area keeps ``planning_area_id=None``.
    Deterministic and independent of record order.
    """
    annotated = []
    for bus in buses:
        areas = _containing(bus.location, planning_areas, lambda a: a.boundary)
        if len(areas) > 1:
            raise OverlappingAreas(
                f"bus {bus.id} lies in planning areas "
                + ", ".join(sorted(a.id for a in areas))
            )
        area_id = areas[0].id if areas else None
        urban = any(
            point_in_polygon(bus.location, city.boundary) for city in city_polygons
        )
        annotated.append(replace(bus, planning_area_id=area_id, is_urban=urban))
    return annotated


def aggregate_population(
    points: Iterable[PopulationPoint], planning_areas: Sequence[PlanningArea]
) -> dict[str, int]:
    """Sum population points into their containing planning area."""
    totals = {area.id: 0 for area in planning_areas}
    for point in points:
        areas = _containing(point.location, planning_areas, lambda a: a.boundary)
        if len(areas) > 1:
            raise OverlappingAreas(
                f"population point for city {point.city_id} lies in planning areas "
                + ", ".join(sorted(a.id for a in areas))
            )
        if areas:
            totals[areas[0].id] += point.population
    return totals


def build_dataset(
    *,
    buses: Sequence[BusRecord],
    lines: Sequence[LineRecord],
    generators: Sequence[GeneratorRecord] = (),
    planning_areas: Sequence[PlanningArea] = (),
    area_loads: Sequence[AreaLoad] = (),
    city_polygons: Sequence[CityPolygon] = (),
    population_points: Sequence[PopulationPoint] = (),
    source_files: Mapping[str, str] | None = None,
) -> GridDataset:
    """Link, annotate, and freeze parsed records into a GridDataset.

    Raises DanglingReference for any cross-file id that does not
    resolve, and OverlappingAreas if the area polygons fail to
    partition the buses/population points.
    """
    bus_ids = {b.id for b in buses}
    for line in lines:
        for endpoint in (line.endpoint_a, line.endpoint_b):
            if endpoint not in bus_ids:
                raise DanglingReference(
                    f"line {line.id} references unknown bus {endpoint}"
                )
    for gen in generators:
        if gen.bus_id not in bus_ids:
            raise DanglingReference(
                f"generator {gen.id} references unknown bus {gen.bus_id}"
            )
    area_ids = {a.id for a in planning_areas}
    for load in area_loads:
        if load.area_id not in area_ids:
            raise DanglingReference(
                f"hourly load references unknown planning area {load.area_id}"
            )

    population = aggregate_population(population_points, planning_areas)
    loads = {load.area_id: load.avg_hourly_load_mw for load in area_loads}
    merged_areas = tuple(
        replace(
            area,
            avg_hourly_load_mw=loads.get(area.id, 0.0),
            population=population.get(area.id, 0),
        )
        for area in sorted(planning_areas, key=lambda a: a.id)
    )
    annotated = assign_regions(buses, merged_areas, tuple(city_polygons))

    return GridDataset(
        buses=tuple(sorted(annotated, key=lambda b: b.id)),
        lines=tuple(sorted(lines, key=lambda l: l.id)),
        generators=tuple(sorted(generators, key=lambda g: g.id)),
        planning_areas=merged_areas,
        city_polygons=tuple(sorted(city_polygons, key=lambda c: c.id)),
        provenance=DatasetProvenance(
            source_files=tuple(sorted((source_files or {}).items())),
            ingested_at=datetime.now(timezone.utc).isoformat(),
        ),
    )


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Non-fatal dataset findings; hard errors raise during build."""

    unassigned_buses: tuple[str, ...] = ()
    isolated_buses: tuple[str, ...] = ()
    voltage_anomalies: tuple[str, ...] = ()
    duplicate_geometry: tuple[str, ...] = ()

    @property
    def is_clean(self) -> bool:
        return not (
            self.unassigned_buses
            or self.isolated_buses
            or self.voltage_anomalies
            or self.duplicate_geometry
        )

    def entries(self) -> list[str]:
        lines = []
        lines += [f"unassigned bus {b}" for b in self.unassigned_buses]
        lines += [f"isolated bus {b}" for b in self.isolated_buses]
        lines += [
            f"line {l} voltage exceeds both endpoint voltages"
            for l in self.voltage_anomalies
        ]
        lines += [f"duplicate geometry: {d}" for d in self.duplicate_geometry]
        return lines


def validate_dataset(dataset: GridDataset) -> ValidationReport:
    """Report unassigned buses, isolated buses, voltage anomalies, and
    duplicated geometry. None of these abort the pipeline; lines rated
    above both endpoints are later handled by the voltage-class rules.
    """
    unassigned = tuple(
        b.id for b in dataset.buses if b.planning_area_id is None
    )

    degree: dict[str, int] = {b.id: 0 for b in dataset.buses}
    for line in dataset.lines:
        degree[line.endpoint_a] += 1
        degree[line.endpoint_b] += 1
    isolated = tuple(sorted(b for b, d in degree.items() if d == 0))

    kv = {b.id: b.voltage_kv for b in dataset.buses}
    anomalies = tuple(
        line.id
        for line in dataset.lines
        if line.voltage_kv > kv[line.endpoint_a] and line.voltage_kv > kv[line.endpoint_b]
    )

    duplicates = []
    seen_locations: dict[tuple[float, float], str] = {}
    for bus in dataset.buses:
        key = (bus.location.x, bus.location.y)
        if key in seen_locations:
            duplicates.append(f"buses {seen_locations[key]},{bus.id}")
        else:
            seen_locations[key] = bus.id
    seen_geometry: dict[tuple, str] = {}
    for line in dataset.lines:
        if line.geometry is None:
            continue  # bare parallel circuits are legitimate, not duplicates
        key = tuple((p.x, p.y) for p in line.geometry)
        if key in seen_geometry:
            duplicates.append(f"lines {seen_geometry[key]},{line.id}")
        else:
            seen_geometry[key] = line.id

    return ValidationReport(
        unassigned_buses=unassigned,
        isolated_buses=isolated,
        voltage_anomalies=anomalies,
        duplicate_geometry=tuple(duplicates),
    )


# ---------------------------------------------------------------------------
# Directory loading

DATASET_FILES = {
    "buses": "Substation.csv",
    "lines": "Line.csv",
    "generators": "Generator.csv",
    "planning_areas": "PlanningAreaBorder.csv",
    "cities": "CityBorder.csv",
    "population": "CityPopulationPoint.csv",
    "hourly_loads": "HourlyLoad.csv",
}


def load_dataset(data_dir) -> GridDataset:
    """Parse the canonical file family under ``data_dir`` and link it."""
    data_dir = Path(data_dir)
    paths = {key: data_dir / name for key, name in DATASET_FILES.items()}
    missing = [p.name for p in paths.values() if not p.is_file()]
    if missing:
        raise IngestError(
            f"missing dataset file(s) in {data_dir}: " + ", ".join(sorted(missing))
        )
    return build_dataset(
        buses=parse_buses(paths["buses"]),
        lines=parse_lines(paths["lines"]),
        generators=parse_generators(paths["generators"]),
        planning_areas=parse_planning_area_polygons(paths["planning_areas"]),
        area_loads=parse_hourly_loads(paths["hourly_loads"]),
        city_polygons=parse_city_polygons(paths["cities"]),
        population_points=parse_population_points(paths["population"]),
        source_files={key: str(path) for key, path in paths.items()},
    )
