"""Row builders and deterministic CSV/JSON serialization for command output."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

import numpy as np

from .billiard import (
    PhasePoint,
    StepOutcome,
    measure_distortion,
    random_regular_points,
    reflection_residual,
    step,
)
from .coding import levels_language
from .errors import Singular, StadiumError
from .geometry import StadiumTable, boundary_point
from .orbits import realize_word
from .sft import SILVER, entropy_lower_bound, eq0_root, three_way_agreement

SCHEMA_VERSION = 1
ENTROPY_COLUMNS = [
    "ell", "N_used", "spectral_radius", "entropy", "method", "residual",
    "eq0_root", "eq0_discrepancy", "limit_gap",
]
TRACE_COLUMNS = [
    "step", "r", "phi", "piece", "symbol", "x", "y", "flight_length",
    "reflection_residual", "in_K", "in_KN",
]


def fmt(x):
    """15 significant digits for floats; everything else passes through."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.15g}")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return fmt(obj)


def to_json(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **_clean(payload)}, indent=2) + "\n"


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(v):
    v = fmt(v)
    if isinstance(v, float):
        return f"{v:.15g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else v


def entropy_row(ell: float, n_cap: int | None = None, tol: float = 1e-12) -> dict:
    bound = entropy_lower_bound(ell, tol, n_cap)
    rho = bound.result.spectral_radius
    eq0 = eq0_root(bound.n_used + 1).spectral_radius
    return {
        "ell": ell,
        "N_used": bound.n_used,
        "spectral_radius": rho,
        "entropy": bound.entropy,
        "method": bound.result.method.value,
        "residual": bound.result.residual,
        "eq0_root": eq0,
        "eq0_discrepancy": abs(rho - eq0),
        "limit_gap": abs(rho - SILVER),
        "certified": bound.certified,
    }


def entropy_table(ells: Iterable[float], n_cap: int | None = None, tol: float = 1e-12) -> list[dict]:
    return [entropy_row(float(ell), n_cap, tol) for ell in ells]


def simulate_trace(table: StadiumTable, p: PhasePoint, steps: int, n_levels: int) -> dict:
    """Trajectory rows with a reflection post-check and running membership flags."""
    rows = []
    singular = None
    in_k = in_kn = True
    prev_piece = None
    run = 0
    current = p
    outcome: StepOutcome | None = None
    prev = p
    for k in range(steps + 1):
        (x, y), piece = boundary_point(table, current.r)
        if prev_piece is not None and piece.is_arc and piece is prev_piece:
            in_k = in_kn = False
        run = 0 if piece.is_arc else run + 1
        if run > n_levels:
            in_kn = False
        rows.append({
            "step": k, "r": current.r, "phi": current.phi, "piece": piece.name,
            "symbol": int(piece), "x": x, "y": y,
            "flight_length": outcome.flight_length if outcome else 0.0,
            "reflection_residual": reflection_residual(table, prev, outcome) if outcome else 0.0,
            "in_K": in_k, "in_KN": in_kn,
        })
        prev_piece = piece
        if k == steps:
            break
        try:
            outcome = step(table, current)
        except Singular as exc:
            singular = {"step": k, "reason": exc.reason}
            break
        prev, current = current, outcome.next
    return {"rows": rows, "singular": singular, "in_K": in_k, "in_KN": in_kn}


def _realize_one(args):
    ell, word, n_levels = args
    try:
        res = realize_word(StadiumTable(ell), word, n_levels)
    except StadiumError as exc:
        return {"word": list(word), "ok": False, "error": str(exc), "residual": math.inf}
    return {"word": list(word), "ok": True, "residual": res.certificate.max_reflection_residual,
            "max_abs_arc_argument": res.certificate.max_abs_arc_argument}


def conjugacy_sweep(ell: float, n_levels: int, depth: int, jobs: int = 1) -> dict:
    words = [w for n in range(1, depth + 1) for w in levels_language(n_levels, n)]
    tasks = [(ell, w, n_levels) for w in words]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_realize_one, tasks, chunksize=64))
    else:
        results = [_realize_one(t) for t in tasks]
    failed = [r for r in results if not r["ok"]]
    ok = [r for r in results if r["ok"]]
    return {
        "words": len(results),
        "passed": len(ok),
        "failed": len(failed),
        "worst_residual": max((r["residual"] for r in ok), default=0.0),
        "worst_abs_arc_argument": max((r["max_abs_arc_argument"] for r in ok), default=0.0),
        "failures": failed,
    }


def agreement_report(levels: Iterable[int]) -> dict:
    rows = three_way_agreement(levels)
    shifts = sorted({r.k_match - r.n_levels for r in rows})
    return {
        "rows": [
            {"N": r.n_levels, "power": r.power, "rome": r.rome, "eq0": r.closed_form,
             "k_match": r.k_match, "discrepancy": r.discrepancy}
            for r in rows
        ],
        "max_discrepancy": max(r.discrepancy for r in rows),
        "index_shifts": shifts,
    }


def distortion_report(ell: float, count: int = 100, h: float = 1e-5, seed: int = 0) -> dict:
    table = StadiumTable(ell)
    pts = random_regular_points(table, count, np.random.default_rng(seed))
    devs = [abs(measure_distortion(table, p, h) - 1.0) for p in pts]
    return {"points": count, "h": h, "seed": seed, "max_deviation": max(devs)}
