"""Stadium boundary parametrization and the unfolded (reflection-stacked) table.

Conventions: the semicircles have radius 1 and centers ``(+-ell/2, 0)``; the
arc-length coordinate ``r`` starts at ``(ell/2, -1)`` and runs counterclockwise
through RightArc, TopSegment, LeftArc, BottomSegment.  Piece intervals are
half-open, so each junction point belongs to the piece that starts there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, GeometryError

BOUNDARY_TOL = 1e-9
HALF_PI = 0.5 * math.pi

Vec = tuple[float, float]


class BoundaryPiece(enum.IntEnum):
    # integer values double as the JSON encoding of Four-symbol words
    RIGHT_ARC = 0
    TOP_SEGMENT = 1
    LEFT_ARC = 2
    BOTTOM_SEGMENT = 3

    @property
    def is_arc(self) -> bool:
        return self in (BoundaryPiece.RIGHT_ARC, BoundaryPiece.LEFT_ARC)


@dataclass(frozen=True)
class StadiumTable:
    """Stadium with unit semicircles joined by straight segments of length ``ell``."""

    ell: float

    def __post_init__(self):
        if not (self.ell > 0 and math.isfinite(self.ell)):
            raise DomainError(f"segment length must be positive and finite, got {self.ell!r}")

    @property
    def perimeter(self) -> float:
        return 2.0 * self.ell + 2.0 * math.pi

    @property
    def half(self) -> float:
        return 0.5 * self.ell

    def piece_start(self, piece: BoundaryPiece) -> float:
        ell = self.ell
        return (0.0, math.pi, math.pi + ell, 2.0 * math.pi + ell)[piece]

    @property
    def corners(self) -> tuple[float, float, float, float]:
        """Arc-length positions of the four junction points."""
        return tuple(self.piece_start(p) for p in BoundaryPiece)  # type: ignore[return-value]

    def arc_center(self, piece: BoundaryPiece) -> Vec:
        if piece is BoundaryPiece.RIGHT_ARC:
            return (self.half, 0.0)
        if piece is BoundaryPiece.LEFT_ARC:
            return (-self.half, 0.0)
        raise DomainError(f"{piece.name} is not an arc")


def piece_of(table: StadiumTable, r: float) -> BoundaryPiece:
    _check_r(table, r)
    ell = table.ell
    if r < math.pi:
        return BoundaryPiece.RIGHT_ARC
    if r < math.pi + ell:
        return BoundaryPiece.TOP_SEGMENT
    if r < 2.0 * math.pi + ell:
        return BoundaryPiece.LEFT_ARC
    return BoundaryPiece.BOTTOM_SEGMENT


def boundary_point(table: StadiumTable, r: float) -> tuple[Vec, BoundaryPiece]:
    """Point at arc length ``r`` and the boundary piece containing it."""
    piece = piece_of(table, r)
    h = table.half
    s = r - table.piece_start(piece)
    if piece is BoundaryPiece.RIGHT_ARC:
        theta = s - HALF_PI
        return (h + math.cos(theta), math.sin(theta)), piece
    if piece is BoundaryPiece.TOP_SEGMENT:
        return (h - s, 1.0), piece
    if piece is BoundaryPiece.LEFT_ARC:
        theta = s + HALF_PI
        return (-h + math.cos(theta), math.sin(theta)), piece
    return (-h + s, -1.0), piece


def arc_param(table: StadiumTable, point: Vec, tol: float = BOUNDARY_TOL) -> float:
    """Inverse of :func:`boundary_point`."""
    x, y = point
    h = table.half
    ell = table.ell
    if x > h:
        dx = x - h
        if abs(math.hypot(dx, y) - 1.0) > tol:
            raise GeometryError(f"point {point} is not on the right arc")
        r = math.atan2(y, dx) + HALF_PI
    elif x < -h:
        dx = x + h
        if abs(math.hypot(dx, y) - 1.0) > tol:
            raise GeometryError(f"point {point} is not on the left arc")
        theta = math.atan2(y, dx) % (2.0 * math.pi)
        r = math.pi + ell + (theta - HALF_PI)
    elif abs(y - 1.0) <= tol:
        r = math.pi + (h - x)
    elif abs(y + 1.0) <= tol:
        r = 2.0 * math.pi + ell + (x + h)
    else:
        raise GeometryError(f"point {point} is not on the boundary")
    r = r % table.perimeter
    # guard against r == perimeter after rounding
    return 0.0 if r >= table.perimeter else max(r, 0.0)


def inward_normal(table: StadiumTable, r: float) -> Vec:
    (x, y), piece = boundary_point(table, r)
    if piece is BoundaryPiece.TOP_SEGMENT:
        return (0.0, -1.0)
    if piece is BoundaryPiece.BOTTOM_SEGMENT:
        return (0.0, 1.0)
    cx, cy = table.arc_center(piece)
    return (cx - x, cy - y)


def arc_argument(table: StadiumTable, r: float) -> float:
    """Polar angle about the arc's own center, measured from its outward horizontal.

    Zero at either apex, ``-pi/2`` at the lower end of the arc and ``+pi/2`` at
    the upper end.  The left arc is measured in the mirror image so that both
    arcs share the same sign convention (positive = upper half).
    """
    piece = piece_of(table, r)
    s = r - table.piece_start(piece)
    if piece is BoundaryPiece.RIGHT_ARC:
        return s - HALF_PI
    if piece is BoundaryPiece.LEFT_ARC:
        return HALF_PI - s
    raise DomainError(f"r={r} lies on {piece.name}, not on an arc")


def distance_to_corner(table: StadiumTable, r: float) -> float:
    """Arc-length distance from ``r`` to the nearest junction point."""
    per = table.perimeter
    best = math.inf
    for c in table.corners:
        d = abs(r - c) % per
        best = min(best, d, per - d)
    return best


def _check_r(table: StadiumTable, r: float) -> None:
    if not (0.0 <= r < table.perimeter):
        raise DomainError(f"r={r} outside [0, {table.perimeter})")


# --- unfolded stadium -------------------------------------------------------


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def opposite(self) -> Side:
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    @property
    def sign(self) -> int:
        return 1 if self is Side.RIGHT else -1


@dataclass(frozen=True)
class UnfoldedSemicircleSpec:
    """A copy of one semicircle in the table reflected ``level`` times across its segments."""

    side: Side
    level: int

    def center(self, table: StadiumTable) -> Vec:
        return (self.side.sign * table.half, 2.0 * self.level)

    def point(self, table: StadiumTable, arg: float) -> Vec:
        cx, cy = self.center(table)
        return (cx + self.side.sign * math.cos(arg), cy + math.sin(arg))

    def tangent(self, arg: float) -> Vec:
        """Derivative of :meth:`point` with respect to ``arg``."""
        return (-self.side.sign * math.sin(arg), math.cos(arg))

    def argument_of(self, table: StadiumTable, p: Vec) -> float:
        cx, cy = self.center(table)
        return math.atan2(p[1] - cy, self.side.sign * (p[0] - cx))

    def endpoints(self, table: StadiumTable) -> tuple[Vec, Vec]:
        cx, cy = self.center(table)
        return (cx, cy - 1.0), (cx, cy + 1.0)


def fold_point(p: Vec, level: int) -> Vec:
    """Map a point of the level-``level`` copy back into the real table."""
    x, y = p
    y0 = y - 2.0 * level
    return (x, y0 if level % 2 == 0 else -y0)


def unfold_point(p: Vec, level: int) -> Vec:
    x, y = p
    return (x, 2.0 * level + (y if level % 2 == 0 else -y))
