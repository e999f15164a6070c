"""Geometry of the lattice graph Z^3.

Vertices are integer triples; x and y are adjacent iff sum |x_i - y_i| = 1,
so every vertex has exactly 6 neighbours.  Graph distance is the taxicab
metric, balls and spheres are taken in that metric.
"""

from __future__ import annotations

import math
from collections import deque
from enum import Enum
from typing import Iterable

import numpy as np

Point = tuple[int, int, int]

# fixed neighbour order: +x, -x, +y, -y, +z, -z
_UNIT_STEPS: tuple[Point, ...] = (
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
)


class DistanceKind(Enum):
    """Which metric the Coulomb kernel 1/|x-y| is built on.

    GRAPH is the taxicab (path) distance, EUCLIDEAN the l2 norm of x - y.
    EUCLIDEAN(x,y) <= GRAPH(x,y) always.
    """

    GRAPH = "graph"
    EUCLIDEAN = "euclidean"

    def distance(self, x: Point, y: Point) -> float:
        if self is DistanceKind.GRAPH:
            return float(graph_distance(x, y))
        return euclidean_distance(x, y)


def graph_distance(x: Point, y: Point) -> int:
    return abs(x[0] - y[0]) + abs(x[1] - y[1]) + abs(x[2] - y[2])


def euclidean_distance(x: Point, y: Point) -> float:
    return math.sqrt((x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2 + (x[2] - y[2]) ** 2)


def neighbors(p: Point) -> list[Point]:
    """The 6 lattice neighbours of p, in a fixed deterministic order."""
    x, y, z = p
    return [(x + dx, y + dy, z + dz) for dx, dy, dz in _UNIT_STEPS]


def ball(center: Point, radius: int) -> set[Point]:
    """All points at graph distance <= radius from center."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cx, cy, cz = center
    out: set[Point] = set()
    for dx in range(-radius, radius + 1):
        ry = radius - abs(dx)
        for dy in range(-ry, ry + 1):
            rz = ry - abs(dy)
            for dz in range(-rz, rz + 1):
                out.add((cx + dx, cy + dy, cz + dz))
    return out


def sphere(center: Point, radius: int) -> set[Point]:
    """All points at graph distance exactly radius (radius >= 1)."""
    if radius < 1:
        raise ValueError("sphere radius must be >= 1")
    cx, cy, cz = center
    out: set[Point] = set()
    for dx in range(-radius, radius + 1):
        ry = radius - abs(dx)
        for dy in range(-ry, ry + 1):
            dz = ry - abs(dy)
            out.add((cx + dx, cy + dy, cz + dz))
            if dz != 0:
                out.add((cx + dx, cy + dy, cz - dz))
    return out


def ball_volume_formula(radius: int) -> int:
    """|B_R| = (4R^3 + 6R^2 + 8R + 3) / 3, in exact integer arithmetic."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    num = 4 * radius**3 + 6 * radius**2 + 8 * radius + 3
    assert num % 3 == 0
    return num // 3


def sphere_size_formula(radius: int) -> int:
    """|dB_R| = 4R^2 + 2 for R >= 1, and 1 for R = 0."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return 1 if radius == 0 else 4 * radius**2 + 2


def set_boundary(cells: Iterable[Point]) -> set[Point]:
    """Inner vertex boundary: members with at least one neighbour outside."""
    s = set(cells)
    return {p for p in s if any(q not in s for q in neighbors(p))}


def is_connected(cells: Iterable[Point]) -> bool:
    """Breadth-first reachability of the whole set through lattice edges."""
    s = set(cells)
    if not s:
        raise ValueError("empty set has no connectivity status")
    start = next(iter(s))
    seen = {start}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for q in neighbors(p):
            if q in s and q not in seen:
                seen.add(q)
                queue.append(q)
    return len(seen) == len(s)


def diameter(cells: Iterable[Point]) -> int:
    """max over pairs in the set of the graph distance."""
    pts = np.asarray(sorted(set(cells)), dtype=np.int64)
    if pts.size == 0:
        raise ValueError("empty set has no diameter")
    if len(pts) == 1:
        return 0
    diffs = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    return int(diffs.max())
