"""Realizing level words as billiard orbits by maximizing length in the unfolded stadium.

A word ``0 ... 0`` of the level subshift prescribes a chain of semicircle
copies in the unfolded table.  Among all polylines visiting those copies with
the two ends pinned at semicircle midpoints, the longest one reflects
specularly at every interior vertex, so folding it back gives a genuine orbit
with the prescribed itinerary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .billiard import PhasePoint, trajectory
from .coding import (
    Alphabet,
    SymbolWord,
    check_levels_grammar,
    itinerary,
    recode_levels,
    to_three,
    zero_delimit,
)
from .errors import DomainError, NumericError, StadiumError, WordError
from .geometry import (
    HALF_PI,
    BoundaryPiece,
    Side,
    StadiumTable,
    UnfoldedSemicircleSpec,
    Vec,
    arc_param,
    boundary_point,
    fold_point,
    inward_normal,
    unfold_point,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MOVE_TOL = 1e-12
CERT_RESIDUAL = 1e-9
ARG_BOUND = math.pi / 4


class RealizationError(StadiumError):
    def __init__(self, stage: str, cause: Exception | str):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


def unfold_word(word: SymbolWord) -> list[UnfoldedSemicircleSpec]:
    """Semicircle copies visited by a zero-delimited level word.

    One spec per 0 symbol, alternating sides from the left semicircle at
    level 0.  A block of m segment hits moves m levels; its direction is up
    for a block starting at the top segment, except that inside a mirrored
    (odd) copy the real top segment lies below, so the direction flips.
    """
    if word.alphabet is not Alphabet.LEVELS:
        raise DomainError("unfold_word expects a LEVELS word")
    syms = word.symbols
    check_levels_grammar(syms, word.n_levels)
    if not syms or syms[0] != 0 or syms[-1] != 0:
        raise WordError("word must start and end with 0")
    specs = [UnfoldedSemicircleSpec(Side.LEFT, 0)]
    block = 0
    for s in syms[1:]:
        if s != 0:
            block = s
            continue
        level = specs[-1].level
        parity = 1 if level % 2 == 0 else -1
        specs.append(UnfoldedSemicircleSpec(specs[-1].side.opposite, level + parity * block))
        block = 0
    return specs


@dataclass
class UnfoldedPolyline:
    specs: list[UnfoldedSemicircleSpec]
    args: list[float]
    points: list[Vec]
    sweeps: int = 0
    history: list[float] = field(default_factory=list)

    @property
    def total_length(self) -> float:
        return math.fsum(_dist(a, b) for a, b in zip(self.points, self.points[1:]))


def _dist(a: Vec, b: Vec) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _local(table, spec, theta, a, b):
    """Value, first and second derivative of |p-a| + |p-b| along the semicircle."""
    p = spec.point(table, theta)
    t = spec.tangent(theta)
    cx, cy = spec.center(table)
    e = (p[0] - cx, p[1] - cy)
    f = df = d2f = 0.0
    sx = sy = 0.0
    for q in (a, b):
        ux, uy = p[0] - q[0], p[1] - q[1]
        d = math.hypot(ux, uy)
        ux, uy = ux / d, uy / d
        f += d
        tu = t[0] * ux + t[1] * uy
        df += tu
        d2f += (1.0 - tu * tu) / d
        sx += ux
        sy += uy
    d2f -= e[0] * sx + e[1] * sy
    return f, df, d2f


def _golden_max(func, lo: float, hi: float, tol: float) -> float:
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = func(x1), func(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = func(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = func(x1)
    return 0.5 * (lo + hi)


def _maximize_one(table, spec, theta, a, b, coarse: bool) -> float:
    """Move one vertex to the length-maximizing position on its semicircle."""
    lim = HALF_PI - 1e-12
    if coarse:
        theta = _golden_max(lambda th: _local(table, spec, th, a, b)[0], -lim, lim, 1e-4)
    f0 = _local(table, spec, theta, a, b)[0]
    for _ in range(50):
        f, df, d2f = _local(table, spec, theta, a, b)
        if d2f >= 0.0:
            break
        new = theta - df / d2f
        if not -lim < new < lim:
            break
        moved = abs(new - theta)
        theta = new
        if moved < 1e-15:
            break
    if _local(table, spec, theta, a, b)[0] < f0 - 1e-13 or not -lim < theta < lim:
        # Newton wandered off; fall back to a fine golden-section search
        theta = _golden_max(lambda th: _local(table, spec, th, a, b)[0], -lim, lim, 1e-13)
    return theta


def _initial_args(table, specs) -> list[float]:
    centers = [s.center(table) for s in specs]
    args = [0.0] * len(specs)
    for i in range(1, len(specs) - 1):
        c = centers[i]
        wx = wy = 0.0
        for q in (centers[i - 1], centers[i + 1]):
            d = _dist(c, q)
            wx += (q[0] - c[0]) / d
            wy += (q[1] - c[1]) / d
        # the vertex sits opposite the bisector of the directions to its neighbours
        args[i] = specs[i].argument_of(table, (c[0] - wx, c[1] - wy))
    return args


def maximize_length(
    table: StadiumTable,
    specs: list[UnfoldedSemicircleSpec],
    tol: float = 1e-13,
    max_sweeps: int = 100_000,
) -> UnfoldedPolyline:
    """Longest polyline through the given semicircle copies, ends pinned at midpoints.

    Cyclic coordinate ascent: each interior vertex in turn is moved to the
    maximizing point on its semicircle.  Stops when no vertex moves more than
    1e-12 or the worst reflection residual drops below ``tol``.
    """
    if len(specs) < 2:
        raise DomainError("need at least two semicircles")
    for s, t in zip(specs, specs[1:]):
        if s.side is t.side:
            raise DomainError("consecutive semicircles must be on opposite sides")
    args = _initial_args(table, specs)
    pts = [s.point(table, th) for s, th in zip(specs, args)]
    poly = UnfoldedPolyline(list(specs), args, pts)
    poly.history.append(poly.total_length)
    if len(specs) == 2:
        return poly
    residual = math.inf
    for sweep in range(max_sweeps):
        moved = 0.0
        for i in range(1, len(specs) - 1):
            new = _maximize_one(table, specs[i], args[i], pts[i - 1], pts[i + 1], sweep == 0)
            moved = max(moved, abs(new - args[i]))
            args[i] = new
            pts[i] = specs[i].point(table, new)
        length = poly.total_length
        if length < poly.history[-1] - 1e-12 * max(1.0, length):
            raise NumericError("length decreased during coordinate ascent", poly.history[-1] - length, poly)
        poly.history.append(length)
        poly.sweeps = sweep + 1
        residual = max(reflection_residuals(table, poly))
        if moved < MOVE_TOL or residual < tol:
            return poly
    raise NumericError("coordinate ascent did not converge", residual, poly)


def _signed_angle(n: Vec, v: Vec) -> float:
    return math.atan2(n[0] * v[1] - n[1] * v[0], n[0] * v[0] + n[1] * v[1])


def reflection_residuals(table: StadiumTable, poly: UnfoldedPolyline) -> list[float]:
    """|incidence + reflection| (signed angles from the inward normal) at interior vertices."""
    out = []
    for i in range(1, len(poly.points) - 1):
        p = poly.points[i]
        c = poly.specs[i].center(table)
        n = (c[0] - p[0], c[1] - p[1])
        back = (poly.points[i - 1][0] - p[0], poly.points[i - 1][1] - p[1])
        fwd = (poly.points[i + 1][0] - p[0], poly.points[i + 1][1] - p[1])
        out.append(abs(_signed_angle(n, back) + _signed_angle(n, fwd)))
    return out or [0.0]


@dataclass(frozen=True)
class OrbitCertificate:
    max_reflection_residual: float
    max_abs_arc_argument: float
    endpoint_clearance: float
    extra_intersection_found: bool
    curvature_margin: float
    total_length: float
    max_segment_angle: float

    @property
    def passes(self) -> bool:
        return (
            self.max_reflection_residual < CERT_RESIDUAL
            and self.max_abs_arc_argument < ARG_BOUND
            and not self.extra_intersection_found
            and self.curvature_margin > 0.0
        )

    def to_dict(self) -> dict:
        return {
            "max_reflection_residual": self.max_reflection_residual,
            "max_abs_arc_argument": self.max_abs_arc_argument,
            "endpoint_clearance": self.endpoint_clearance,
            "extra_intersection_found": self.extra_intersection_found,
            "curvature_margin": self.curvature_margin,
            "total_length": self.total_length,
            "max_segment_angle": self.max_segment_angle,
            "passes": self.passes,
        }


def curvature_margin(ell: float, n_levels: int) -> float:
    """``1 - ell / (ell**2 - (2N+1)**2)``: positive when every focal ellipse is flatter than the arcs."""
    denom = ell * ell - (2 * n_levels + 1) ** 2
    return 1.0 - ell / denom if denom > 0 else -math.inf


def _segment_circle_params(a: Vec, b: Vec, c: Vec) -> list[float]:
    dx, dy = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - c[0], a[1] - c[1]
    qa = dx * dx + dy * dy
    qb = fx * dx + fy * dy
    qc = fx * fx + fy * fy - 1.0
    disc = qb * qb - qa * qc
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    q = -qb - math.copysign(s, qb)
    roots = [q / qa] if q != 0.0 else [0.0]
    if q != 0.0:
        roots.append(qc / q)
    return roots


def _extra_intersections(table: StadiumTable, poly: UnfoldedPolyline, n_levels: int) -> bool:
    levels = [s.level for s in poly.specs]
    lo, hi = min(levels) - n_levels - 1, max(levels) + n_levels + 1
    copies = [UnfoldedSemicircleSpec(side, lv) for lv in range(lo, hi + 1) for side in Side]
    for i in range(len(poly.points) - 1):
        a, b = poly.points[i], poly.points[i + 1]
        for spec in copies:
            c = spec.center(table)
            for t in _segment_circle_params(a, b, c):
                if not -1e-12 <= t <= 1.0 + 1e-12:
                    continue
                x = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                if spec.side.sign * (x[0] - c[0]) < 0.0:
                    continue  # other half of the full circle, not part of the table
                if _dist(x, a) < 1e-9 and spec == poly.specs[i]:
                    continue
                if _dist(x, b) < 1e-9 and spec == poly.specs[i + 1]:
                    continue
                return True
    return False


def certify(table: StadiumTable, poly: UnfoldedPolyline, n_levels: int) -> OrbitCertificate:
    """Collect the evidence that ``poly`` is a genuine orbit piece."""
    args = [s.argument_of(table, p) for s, p in zip(poly.specs, poly.points)]
    clearance = min(min(_dist(p, e) for e in s.endpoints(table)) for s, p in zip(poly.specs, poly.points))
    angles = [
        math.atan2(abs(b[1] - a[1]), abs(b[0] - a[0])) for a, b in zip(poly.points, poly.points[1:])
    ]
    return OrbitCertificate(
        max_reflection_residual=max(reflection_residuals(table, poly)),
        max_abs_arc_argument=max(abs(x) for x in args),
        endpoint_clearance=clearance,
        extra_intersection_found=_extra_intersections(table, poly, n_levels),
        curvature_margin=curvature_margin(table.ell, n_levels),
        total_length=poly.total_length,
        max_segment_angle=max(angles),
    )


def fold_to_phase_point(table: StadiumTable, poly: UnfoldedPolyline) -> PhasePoint:
    """Phase point at the first vertex, heading toward the second, folded into the real table."""
    level = poly.specs[0].level
    x0 = fold_point(poly.points[0], level)
    x1 = fold_point(poly.points[1], level)
    r = arc_param(table, x0)
    n = inward_normal(table, r)
    d = (x1[0] - x0[0], x1[1] - x0[1])
    return PhasePoint(r, _signed_angle(n, d))


def unfold_orbit(
    table: StadiumTable, points: list[PhasePoint], start_level: int = 0
) -> list[tuple[UnfoldedSemicircleSpec, Vec]]:
    """Arc collisions of a simulated orbit, placed in the unfolded table."""
    level = start_level
    out = []
    for q in points:
        pos, piece = boundary_point(table, q.r)
        parity = 1 if level % 2 == 0 else -1
        if piece is BoundaryPiece.TOP_SEGMENT:
            level += parity
        elif piece is BoundaryPiece.BOTTOM_SEGMENT:
            level -= parity
        else:
            side = Side.RIGHT if piece is BoundaryPiece.RIGHT_ARC else Side.LEFT
            out.append((UnfoldedSemicircleSpec(side, level), unfold_point(pos, level)))
    return out


@dataclass(frozen=True)
class Realization:
    word: tuple[int, ...]
    extended: tuple[int, ...]
    offset: int
    phase_point: PhasePoint
    certificate: OrbitCertificate
    polyline: UnfoldedPolyline
    itinerary: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "word": list(self.word),
            "extended_word": list(self.extended),
            "offset": self.offset,
            "phase_point": {"r": self.phase_point.r, "phi": self.phase_point.phi},
            **self.certificate.to_dict(),
            "sweeps": self.polyline.sweeps,
            "polyline": [
                {"side": s.side.value, "level": s.level, "x": p[0], "y": p[1]}
                for s, p in zip(self.polyline.specs, self.polyline.points)
            ],
        }


def realize_word(
    table: StadiumTable, word, n_levels: int, tol: float = 1e-13
) -> Realization:
    """Find an orbit whose recoded itinerary contains ``word``.

    Non-zero-delimited words are first extended to ``0 ... 0``; the returned
    phase point starts the extended word and ``offset`` locates the original.
    """
    symbols = tuple(word.symbols if isinstance(word, SymbolWord) else word)
    if not table.ell > 2 * n_levels + 2:
        raise RealizationError("precondition", f"need ell > 2N+2 = {2 * n_levels + 2}, got {table.ell}")
    try:
        extended, offset = zero_delimit(symbols, n_levels)
        if len(extended) == 1:
            extended += (0,)
        specs = unfold_word(SymbolWord.levels(extended, n_levels))
    except StadiumError as exc:
        raise RealizationError("unfold", exc) from exc
    try:
        poly = maximize_length(table, specs, tol)
    except StadiumError as exc:
        raise RealizationError("maximize", exc) from exc
    cert = certify(table, poly, n_levels)
    if not cert.passes:
        raise RealizationError("certify", f"certificate fails: {cert}")
    try:
        p0 = fold_to_phase_point(table, poly)
        four = itinerary(table, p0, len(extended) - 1, Alphabet.FOUR)
        got = recode_levels(to_three(four), n_levels).symbols
    except StadiumError as exc:
        raise RealizationError("simulate", exc) from exc
    if got != extended:
        raise RealizationError("roundtrip", f"itinerary {got} != {extended}")
    return Realization(symbols, extended, offset, p0, cert, poly, got)


def polyline_from_orbit(table: StadiumTable, p0: PhasePoint, steps: int) -> list[Vec]:
    """Unfolded arc-collision points of the orbit of ``p0`` (for round-trip checks)."""
    return [pt for _, pt in unfold_orbit(table, trajectory(table, p0, steps))]
