"""Planar geometry for map-digitized grid data.

Coordinates are abstract planar units (digitized map positions). No
geodesy, projection, or datum handling is applied anywhere; the numbers
are taken at face value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["PlanarPoint", "PlanarPolygon", "point_in_polygon"]


@dataclass(frozen=True, slots=True)
class PlanarPoint:
    """A point in abstract planar map units."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate ({self.x}, {self.y})")


@dataclass(frozen=True, slots=True)
class PlanarPolygon:
    """A polygon as a sequence of closed rings.

    Ring 0 is the outer boundary; any further rings are holes.
    Containment uses even-odd semantics, so ring orientation is
    irrelevant and holes simply toggle insideness. Each stored ring is
    normalized to be explicitly closed (first vertex == last vertex).
    """

    rings: tuple[tuple[PlanarPoint, ...], ...]

    def __post_init__(self) -> None:
        if not self.rings:
            raise ValueError("polygon needs at least one ring")
        normalized = []
        for ring in self.rings:
            ring = tuple(ring)
            if ring and ring[0] == ring[-1]:
                ring = ring[:-1]
            if len({(p.x, p.y) for p in ring}) < 3:
                raise ValueError("ring needs at least 3 distinct vertices")
            normalized.append(ring + (ring[0],))
        object.__setattr__(self, "rings", tuple(normalized))

    def edges(self):
        for ring in self.rings:
            for a, b in zip(ring, ring[1:]):
                yield a, b


def _on_segment(p: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> bool:
    cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
    if cross != 0.0:
        return False
    return (
        min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


def point_in_polygon(p: PlanarPoint, poly: PlanarPolygon) -> bool:
    """Even-odd ray-casting containment test.

    Convention: a point lying exactly on any edge (in the float
    arithmetic sense) counts as inside. This keeps features digitized
    on a shared boundary line deterministic.
    """
    inside = False
    for a, b in poly.edges():
        if _on_segment(p, a, b):
            return True
        # Half-open vertical rule: each edge covers [min(y), max(y)).
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside
