"""The billiard collision map of the stadium and its numerical checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError, Singular, SingularAtStep
from .geometry import (
    HALF_PI,
    BoundaryPiece,
    StadiumTable,
    Vec,
    boundary_point,
    distance_to_corner,
    inward_normal,
)

GRAZING_TOL = 1e-9
CORNER_TOL = 1e-9
MIN_FLIGHT = 1e-12
_HIT_TOL = 1e-9
# disc = cos(phi')**2 at arrival, so this matches the grazing cutoff
_TANGENT_DISC = GRAZING_TOL ** 2


@dataclass(frozen=True)
class PhasePoint:
    r: float
    phi: float


@dataclass(frozen=True)
class StepOutcome:
    next: PhasePoint
    flight_length: float
    piece: BoundaryPiece
    point: Vec


def _rotate(v: Vec, angle: float) -> Vec:
    c, s = math.cos(angle), math.sin(angle)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1]


def _cross(a: Vec, b: Vec) -> float:
    return a[0] * b[1] - a[1] * b[0]


def direction(table: StadiumTable, p: PhasePoint) -> Vec:
    """Unit outgoing velocity at ``p``: the inward normal rotated by ``phi``."""
    return _rotate(inward_normal(table, p.r), p.phi)


def _circle_hits(origin: Vec, d: Vec, center: Vec, same_circle: bool) -> list[float]:
    ox, oy = origin[0] - center[0], origin[1] - center[1]
    b = d[0] * ox + d[1] * oy
    if same_circle:
        # origin is on the circle: the chord length is exact, the t = 0 root is dropped
        return [-2.0 * b]
    c = ox * ox + oy * oy - 1.0
    disc = b * b - c
    if -_TANGENT_DISC < disc < 0.0:
        # a miss by less than rounding is a tangency; the arrival check flags it as grazing
        disc = 0.0
    if disc < 0.0:
        return []
    q = -b - math.copysign(math.sqrt(disc), b)
    roots = [q]
    if q != 0.0:
        roots.append(c / q)
    return roots


def _param_on(table: StadiumTable, piece: BoundaryPiece, q: Vec) -> float:
    h = table.half
    if piece is BoundaryPiece.RIGHT_ARC:
        r = math.atan2(q[1], q[0] - h) + HALF_PI
    elif piece is BoundaryPiece.TOP_SEGMENT:
        r = math.pi + (h - q[0])
    elif piece is BoundaryPiece.LEFT_ARC:
        theta = math.atan2(q[1], q[0] + h) % (2.0 * math.pi)
        r = math.pi + table.ell + (theta - HALF_PI)
    else:
        r = 2.0 * math.pi + table.ell + (q[0] + h)
    r %= table.perimeter
    return 0.0 if r >= table.perimeter else r


def _next_hit(table: StadiumTable, origin: Vec, d: Vec, start: BoundaryPiece):
    h = table.half
    best_t, best_piece = math.inf, None
    for piece, y_line in ((BoundaryPiece.TOP_SEGMENT, 1.0), (BoundaryPiece.BOTTOM_SEGMENT, -1.0)):
        if piece is start or d[1] == 0.0:
            continue
        t = (y_line - origin[1]) / d[1]
        if MIN_FLIGHT < t < best_t and abs(origin[0] + t * d[0]) <= h + _HIT_TOL:
            best_t, best_piece = t, piece
    for piece in (BoundaryPiece.RIGHT_ARC, BoundaryPiece.LEFT_ARC):
        center = table.arc_center(piece)
        side = 1.0 if piece is BoundaryPiece.RIGHT_ARC else -1.0
        for t in _circle_hits(origin, d, center, piece is start):
            if MIN_FLIGHT < t < best_t and side * (origin[0] + t * d[0] - center[0]) >= -_HIT_TOL:
                best_t, best_piece = t, piece
    if best_piece is None:
        raise GeometryError(f"ray from {origin} along {d} does not meet the boundary")
    return best_t, best_piece


def step(table: StadiumTable, p: PhasePoint) -> StepOutcome:
    """Apply the billiard map once.

    Raises :class:`Singular` when the start or arrival is a grazing collision
    or touches one of the four junction points.
    """
    if not abs(p.phi) < HALF_PI - GRAZING_TOL:
        raise Singular("grazing departure")
    if distance_to_corner(table, p.r) < CORNER_TOL:
        raise Singular("departure at a corner")
    origin, piece = boundary_point(table, p.r)
    n = inward_normal(table, p.r)
    d = _rotate(n, p.phi)
    t, hit_piece = _next_hit(table, origin, d, piece)
    q = (origin[0] + t * d[0], origin[1] + t * d[1])
    r_next = _param_on(table, hit_piece, q)
    if distance_to_corner(table, r_next) < CORNER_TOL:
        raise Singular("arrival at a corner")
    n2 = inward_normal(table, r_next)
    dn = _dot(d, n2)
    d_out = (d[0] - 2.0 * dn * n2[0], d[1] - 2.0 * dn * n2[1])
    phi_next = math.atan2(_cross(n2, d_out), _dot(n2, d_out))
    if not abs(phi_next) < HALF_PI - GRAZING_TOL:
        raise Singular("grazing arrival")
    return StepOutcome(PhasePoint(r_next, phi_next), t, hit_piece, q)


def trajectory(table: StadiumTable, p: PhasePoint, n: int) -> list[PhasePoint]:
    if n < 0:
        raise DomainError("n must be non-negative")
    points = [p]
    for k in range(n):
        try:
            points.append(step(table, points[-1]).next)
        except Singular as exc:
            raise SingularAtStep(k, exc.reason) from exc
    return points


def reverse(p: PhasePoint) -> PhasePoint:
    return PhasePoint(p.r, -p.phi)


def reflection_residual(table: StadiumTable, p: PhasePoint, outcome: StepOutcome) -> float:
    """|incidence angle - reflection angle| at the arrival point of ``outcome``.

    The incoming direction is recomputed from the two collision positions, so
    the check does not reuse the direction the step itself propagated.
    """
    origin, _ = boundary_point(table, p.r)
    arrival, _ = boundary_point(table, outcome.next.r)
    v = (arrival[0] - origin[0], arrival[1] - origin[1])
    norm = math.hypot(*v)
    incoming = (-v[0] / norm, -v[1] / norm)
    n = inward_normal(table, outcome.next.r)
    outgoing = _rotate(n, outcome.next.phi)
    incidence = abs(math.atan2(_cross(n, incoming), _dot(n, incoming)))
    reflection = abs(math.atan2(_cross(n, outgoing), _dot(n, outgoing)))
    # incoming and outgoing must also sit on opposite sides of the normal
    side = _cross(n, incoming) * _cross(n, outgoing)
    return abs(incidence - reflection) + (0.0 if side <= 1e-15 else math.inf)


def _wrap(dr: float, per: float) -> float:
    return (dr + 0.5 * per) % per - 0.5 * per


def measure_distortion(table: StadiumTable, p: PhasePoint, h: float = 1e-5) -> float:
    """Return ``|det DF| * cos(phi') / cos(phi)`` from a central-difference Jacobian.

    The natural measure ``cos(phi) dr dphi`` is invariant, so the value is
    ``1 + O(h^2)`` away from the singular set.
    """
    per = table.perimeter
    base = step(table, p)
    cols = []
    for dr, dphi in ((h, 0.0), (0.0, h)):
        plus = PhasePoint((p.r + dr) % per, p.phi + dphi)
        minus = PhasePoint((p.r - dr) % per, p.phi - dphi)
        out_p, out_m = step(table, plus), step(table, minus)
        if out_p.piece is not base.piece or out_m.piece is not base.piece:
            raise Singular("finite-difference stencil crosses a discontinuity")
        cols.append((
            _wrap(out_p.next.r - out_m.next.r, per) / (2.0 * h),
            (out_p.next.phi - out_m.next.phi) / (2.0 * h),
        ))
    det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
    return abs(det) * math.cos(base.next.phi) / math.cos(p.phi)


def clearance(table: StadiumTable, p: PhasePoint) -> float:
    """Distance of ``p`` and its forward and backward images from the singular set.

    Measured as the minimum of the arc-length distance to a corner and the
    angular distance of ``phi`` to ``+-pi/2``; zero when a step is singular.
    """
    try:
        fwd = step(table, p).next
        bwd = step(table, reverse(p)).next
    except Singular:
        return 0.0
    return min(
        min(distance_to_corner(table, q.r), HALF_PI - abs(q.phi)) for q in (p, fwd, bwd)
    )


def random_regular_points(
    table: StadiumTable, count: int, rng: np.random.Generator, min_clearance: float = 1e-3
) -> list[PhasePoint]:
    """Draw phase points uniformly in ``(r, phi)``, keeping those far from the singular set."""
    points: list[PhasePoint] = []
    per = table.perimeter
    while len(points) < count:
        p = PhasePoint(float(rng.uniform(0.0, per)), float(rng.uniform(-HALF_PI, HALF_PI)))
        if clearance(table, p) >= min_clearance:
            points.append(p)
    return points
