"""Finite boxes in Z^3 and nonnegative fields supported on them.

A field phi lives on an inclusive axis-aligned box and is defined as 0
outside it; every operator here respects that extension.  Cells are
enumerated lexicographically (first coordinate slowest), which fixes the
serialization order and makes runs reproducible.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .lattice import DistanceKind, Point

_FIELD_MAGIC = "TFDW-FIELD 1"


@dataclass(frozen=True)
class BoxDomain:
    """Inclusive box [lo, hi] in Z^3."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"degenerate box: lo={self.lo} hi={self.hi}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        n1, n2, n3 = self.dims
        return n1 * n2 * n3

    def contains(self, p: Point) -> bool:
        return all(l <= c <= h for l, c, h in zip(self.lo, p, self.hi))

    def index(self, p: Point) -> tuple[int, int, int]:
        if not self.contains(p):
            raise IndexError(f"{p} outside box {self.lo}..{self.hi}")
        return tuple(c - l for c, l in zip(p, self.lo))

    def point(self, idx: tuple[int, int, int]) -> Point:
        return tuple(l + i for l, i in zip(self.lo, idx))

    def points(self) -> list[Point]:
        """All cells in lexicographic order (first coordinate slowest)."""
        (x0, y0, z0), (x1, y1, z1) = self.lo, self.hi
        return [
            (x, y, z)
            for x in range(x0, x1 + 1)
            for y in range(y0, y1 + 1)
            for z in range(z0, z1 + 1)
        ]


def centered_box(half_width: int) -> BoxDomain:
    """The symmetric box [-L, L]^3."""
    if half_width < 0:
        raise ValueError("half_width must be >= 0")
    L = half_width
    return BoxDomain((-L, -L, -L), (L, L, L))


class FieldGrid:
    """Nonnegative field phi on a box, with its mass sum(phi^2) cached."""

    def __init__(self, box: BoxDomain, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != box.dims:
            raise ValueError(f"values shape {values.shape} != box dims {box.dims}")
        if values.size and values.min() < -1e-12:
            raise ValueError(f"field has negative value {values.min()}")
        # kill -0.0 and round-off negatives before any fractional power
        self.box = box
        self.values = np.maximum(values, 0.0)
        self.mass = float(np.sum(self.values * self.values))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldGrid)
            and self.box == other.box
            and np.array_equal(self.values, other.values)
        )

    def value_at(self, p: Point) -> float:
        """phi(p), with phi == 0 outside the box."""
        if not self.box.contains(p):
            return 0.0
        return float(self.values[self.box.index(p)])

    def density(self) -> "DensityGrid":
        return DensityGrid(self.box, self.values * self.values)


class DensityGrid:
    """Nonnegative density rho on a box (phi^2, or a drop indicator)."""

    def __init__(self, box: BoxDomain, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != box.dims:
            raise ValueError(f"values shape {values.shape} != box dims {box.dims}")
        if values.size and values.min() < -1e-12:
            raise ValueError(f"density has negative value {values.min()}")
        self.box = box
        self.values = np.maximum(values, 0.0)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def field_from_points(box: BoxDomain, assignments: dict[Point, float]) -> FieldGrid:
    vals = np.zeros(box.dims)
    for p, v in assignments.items():
        vals[box.index(p)] = v
    return FieldGrid(box, vals)


# ---------------------------------------------------------------------------
# discrete calculus
# ---------------------------------------------------------------------------

def _shifted(values: np.ndarray, axis: int, step: int) -> np.ndarray:
    """values translated by `step` cells along axis, zero-filled."""
    out = np.zeros_like(values)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if step > 0:
        src[axis] = slice(step, None)
        dst[axis] = slice(None, -step)
    elif step < 0:
        src[axis] = slice(None, step)
        dst[axis] = slice(-step, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def gradient_sq_field(values: np.ndarray) -> np.ndarray:
    """Gamma(phi) on every cell: half the sum over the 6 neighbours of the
    squared difference (zero extension outside the array)."""
    acc = np.zeros_like(values)
    for axis in range(3):
        for step in (1, -1):
            acc += (_shifted(values, axis, step) - values) ** 2
    return 0.5 * acc


def laplacian_field(values: np.ndarray) -> np.ndarray:
    """6 phi(x) - sum of the 6 neighbour values, zero extension."""
    acc = 6.0 * values
    for axis in range(3):
        for step in (1, -1):
            acc -= _shifted(values, axis, step)
    return acc


def kinetic_sum(values: np.ndarray) -> float:
    """Sum over unordered edges of (phi(y)-phi(x))^2, each edge once.

    Edges leaving the box contribute phi(inside)^2 since phi == 0 outside.
    Equals sum_p Gamma(phi)(p).
    """
    total = 0.0
    for axis in range(3):
        d = np.diff(values, axis=axis)
        total += float(np.sum(d * d))
        total += float(np.sum(np.take(values, 0, axis=axis) ** 2))
        total += float(np.sum(np.take(values, -1, axis=axis) ** 2))
    return total


def graph_gradient_sq(phi: FieldGrid, p: Point) -> float:
    """Gamma(phi)(p) = 1/2 sum over the 6 neighbours of (phi(y)-phi(p))^2."""
    v = phi.value_at(p)
    from .lattice import neighbors

    return 0.5 * sum((phi.value_at(q) - v) ** 2 for q in neighbors(p))


def graph_laplacian(phi: FieldGrid, p: Point) -> float:
    """6 phi(p) - sum of neighbour values, phi == 0 outside the box."""
    from .lattice import neighbors

    return 6.0 * phi.value_at(p) - sum(phi.value_at(q) for q in neighbors(p))


# ---------------------------------------------------------------------------
# serialization (text format, one value per line, lexicographic order)
# ---------------------------------------------------------------------------

def save_field(path, field: FieldGrid, kind: DistanceKind = DistanceKind.EUCLIDEAN) -> None:
    with open(path, "w") as fh:
        write_field(fh, field, kind)


def write_field(fh: io.TextIOBase, field: FieldGrid, kind: DistanceKind) -> None:
    n1, n2, n3 = field.box.dims
    fh.write(_FIELD_MAGIC + "\n")
    fh.write("lo: %d %d %d\n" % field.box.lo)
    fh.write("dims: %d %d %d\n" % (n1, n2, n3))
    fh.write("kind: %s\n" % kind.value)
    for v in field.values.ravel(order="C"):
        fh.write(repr(float(v)) + "\n")


def load_field(path) -> tuple[FieldGrid, DistanceKind]:
    with open(path) as fh:
        return read_field(fh)


def read_field(fh: io.TextIOBase) -> tuple[FieldGrid, DistanceKind]:
    magic = fh.readline().strip()
    if magic != _FIELD_MAGIC:
        raise ValueError(f"bad field file: expected {_FIELD_MAGIC!r}, got {magic!r}")
    lo = _parse_triple(fh.readline(), "lo")
    dims = _parse_triple(fh.readline(), "dims")
    kind_line = fh.readline().strip()
    if not kind_line.startswith("kind:"):
        raise ValueError(f"bad field file: expected kind line, got {kind_line!r}")
    kind = DistanceKind(kind_line.split(":", 1)[1].strip())
    n = dims[0] * dims[1] * dims[2]
    vals = np.fromiter((float(fh.readline()) for _ in range(n)), dtype=np.float64, count=n)
    box = BoxDomain(lo, tuple(l + d - 1 for l, d in zip(lo, dims)))
    return FieldGrid(box, vals.reshape(dims)), kind


def _parse_triple(line: str, tag: str) -> tuple[int, int, int]:
    head, _, rest = line.partition(":")
    if head.strip() != tag:
        raise ValueError(f"bad field file: expected {tag!r} line, got {line!r}")
    parts = rest.split()
    if len(parts) != 3:
        raise ValueError(f"bad field file: {tag} needs 3 integers, got {line!r}")
    return tuple(int(x) for x in parts)
