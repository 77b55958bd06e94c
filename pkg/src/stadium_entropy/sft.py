"""Subshifts of finite type: transition matrices, Perron roots, rome reduction, counting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DomainError, NumericError, StructuralError

SILVER = 1.0 + math.sqrt(2.0)
LOG_SILVER = math.log(SILVER)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Square 0/1 matrix; ``entries[i, j] == 1`` iff state ``labels[i]`` may be followed by ``labels[j]``."""

    entries: np.ndarray
    labels: tuple

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"transition matrix must be square, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise DomainError("transition matrix entries must be 0 or 1")
        if len(self.labels) != a.shape[0]:
            raise DomainError("one label per state required")
        a = a.astype(np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)

    def allowed(self, a: Hashable, b: Hashable) -> bool:
        return bool(self.entries[self.index(a), self.index(b)])

    def successors(self, label: Hashable) -> list:
        row = self.entries[self.index(label)]
        return [self.labels[j] for j in np.flatnonzero(row)]

    def admits(self, word: Sequence[Hashable]) -> bool:
        return all(self.allowed(a, b) for a, b in zip(word, word[1:]))

    @classmethod
    def from_rows(cls, rows, labels=None) -> TransitionMatrix:
        rows = np.asarray(rows)
        return cls(rows, tuple(labels) if labels is not None else tuple(range(rows.shape[0])))


def matrix_sigma_prime() -> TransitionMatrix:
    """Three-state system ``0, A, B`` with only ``A -> A`` and ``B -> B`` forbidden."""
    return TransitionMatrix.from_rows([[1, 1, 1], [1, 0, 1], [1, 1, 0]], ("0", "A", "B"))


def matrix_sigma_prime_displayed() -> TransitionMatrix:
    """The variant forbidding ``A -> B`` and ``B -> A``; same Perron root as :func:`matrix_sigma_prime`."""
    return TransitionMatrix.from_rows([[1, 1, 1], [1, 1, 0], [1, 0, 1]], ("0", "A", "B"))


def matrix_sigma_tilde(n_levels: int) -> TransitionMatrix:
    """Level subshift on states ``-N..N``.

    0 may go to 0 or start a block at ``+-1``; ``i`` goes to ``i+1`` or 0 for
    ``1 <= i < N``; ``N`` returns to 0; negative states mirror the positive
    ones.  Blocks never start above level 1, so 0 has no other successors.
    ``N = 0`` gives the one-state full shift.
    """
    if n_levels < 0:
        raise DomainError("N must be non-negative")
    labels = tuple(range(-n_levels, n_levels + 1))
    size = len(labels)
    m = np.zeros((size, size), dtype=np.int64)
    at = {s: k for k, s in enumerate(labels)}
    for s in labels:
        if abs(s) <= 1:
            m[at[0], at[s]] = 1
    for i in range(1, n_levels + 1):
        for sign in (1, -1):
            m[at[sign * i], at[0]] = 1
            if i < n_levels:
                m[at[sign * i], at[sign * (i + 1)]] = 1
    return TransitionMatrix(m, labels)


class Method(enum.Enum):
    POWER_ITERATION = "PowerIteration"
    CHAR_POLY = "CharPoly"
    ROME = "Rome"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class EntropyResult:
    spectral_radius: float
    method: Method
    residual: float = 0.0

    @property
    def entropy(self) -> float:
        return math.log(self.spectral_radius) if self.spectral_radius > 0 else -math.inf


def _char_poly(a: np.ndarray) -> list[float]:
    """Monic characteristic polynomial coefficients (highest degree first) for size <= 3."""
    n = a.shape[0]
    a = a.astype(float)
    if n == 1:
        return [1.0, -a[0, 0]]
    if n == 2:
        return [1.0, -np.trace(a), a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]]
    minors = sum(
        a[i, i] * a[j, j] - a[i, j] * a[j, i] for i in range(3) for j in range(i + 1, 3)
    )
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    return [1.0, -np.trace(a), minors, -det]


def _largest_real_root(coeffs: list[float]) -> float:
    """Largest real root of a monic polynomial of degree 1, 2 or 3, in closed form."""
    deg = len(coeffs) - 1
    if deg == 1:
        return -coeffs[1]
    if deg == 2:
        b, c = coeffs[1], coeffs[2]
        disc = b * b - 4.0 * c
        return 0.5 * (-b + math.sqrt(max(disc, 0.0)))
    _, a, b, c = coeffs
    # depressed cubic t^3 + p t + q with x = t - a/3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        s = math.sqrt(disc)
        t = math.copysign(abs(-q / 2.0 + s) ** (1 / 3), -q / 2.0 + s) + math.copysign(
            abs(-q / 2.0 - s) ** (1 / 3), -q / 2.0 - s
        )
    elif p == 0:
        t = 0.0
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        t = m * math.cos(math.acos(max(-1.0, min(1.0, arg))) / 3.0)
    x = t - a / 3.0
    # one Newton step removes the rounding left by acos/cbrt
    f = ((x + a) * x + b) * x + c
    df = (3.0 * x + 2.0 * a) * x + b
    if df != 0.0:
        x -= f / df
    return x


def _power_iteration(m: TransitionMatrix, tol: float, max_iter: int) -> EntropyResult:
    # Collatz-Wielandt: min and max of (Av)_i / v_i bracket the Perron root of A = M + I
    a = m.entries.astype(float) + np.eye(m.size)
    v = np.ones(m.size)
    lo, hi = 0.0, math.inf
    for _ in range(max_iter):
        w = a @ v
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo < tol:
            break
        v = w / w.max()
    else:
        raise NumericError("power iteration did not converge", hi - lo, 0.5 * (lo + hi) - 1.0)
    return EntropyResult(0.5 * (lo + hi) - 1.0, Method.POWER_ITERATION, hi - lo)


def spectral_radius(m: TransitionMatrix, tol: float = 1e-12, max_iter: int = 10**6) -> EntropyResult:
    """Perron root of ``m``: closed form up to size 3, power iteration beyond."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    if m.size <= 3:
        return EntropyResult(_largest_real_root(_char_poly(m.entries)), Method.CHAR_POLY)
    return _power_iteration(m, tol, max_iter)


@dataclass(frozen=True)
class RomeReduction:
    rome: frozenset
    path_lengths: tuple[int, ...]
    paths: tuple[tuple[Hashable, Hashable, int], ...] = ()


def rome_reduce(m: TransitionMatrix, rome: Iterable[Hashable]) -> RomeReduction:
    """Lengths of all paths between rome states that avoid the rome in their interior."""
    rome = frozenset(rome)
    if not rome:
        raise StructuralError("rome must be non-empty")
    for s in rome:
        m.index(s)
    _check_acyclic_outside(m, rome)
    paths: list[tuple[Hashable, Hashable, int]] = []

    def walk(start, state, length):
        for nxt in m.successors(state):
            if nxt in rome:
                paths.append((start, nxt, length + 1))
            else:
                walk(start, nxt, length + 1)

    for start in sorted(rome, key=m.index):
        walk(start, start, 0)
    return RomeReduction(rome, tuple(sorted(p[2] for p in paths)), tuple(paths))


def _check_acyclic_outside(m: TransitionMatrix, rome: frozenset) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {s: WHITE for s in m.labels if s not in rome}

    def visit(s):
        color[s] = GREY
        for nxt in m.successors(s):
            if nxt in rome:
                continue
            if color[nxt] == GREY:
                raise StructuralError(f"cycle through {nxt!r} avoids the rome")
            if color[nxt] == WHITE:
                visit(nxt)
        color[s] = BLACK

    for s in list(color):
        if color[s] == WHITE:
            visit(s)


def _bisect_decreasing(f, lo: float, hi: float, tol: float) -> float:
    """Zero of a function that is positive at ``lo`` and negative at ``hi``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rome_root(reduction: RomeReduction, tol: float = 0.0) -> EntropyResult:
    """Largest zero of ``sum_i x**-p_i - 1`` (single-state rome).

    For a larger rome the spectral radius of the path-weight matrix
    ``A(x)_{ij} = sum x**-p`` decreases in ``x`` and the root is where it
    crosses 1.
    """
    if not reduction.path_lengths:
        raise DomainError("no rome paths")
    if len(reduction.rome) == 1:
        lengths = reduction.path_lengths

        def f(x):
            return math.fsum(x ** -p for p in lengths) - 1.0
    else:
        order = sorted(reduction.rome, key=str)
        at = {s: k for k, s in enumerate(order)}

        def f(x):
            a = np.zeros((len(order), len(order)))
            for s, t, p in reduction.paths:
                a[at[s], at[t]] += x ** -p
            return float(np.max(np.abs(np.linalg.eigvals(a)))) - 1.0

    if f(1.0) <= 0.0:
        return EntropyResult(1.0, Method.ROME)
    hi = 4.0
    while f(hi) > 0.0:
        hi *= 2.0
    return EntropyResult(_bisect_decreasing(f, 1.0, hi, tol), Method.ROME)


def eq0_root(k: int, tol: float = 0.0) -> EntropyResult:
    """Largest root of ``x**2 - 2x - 1 + 2 x**(1-k) = 0``.

    The left side vanishes at ``x = 1`` for every ``k``; for ``k >= 2`` it is
    negative on ``(1, y_k)`` and positive beyond, with ``y_k < 1 + sqrt 2``.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return EntropyResult(1.0, Method.CLOSED_FORM)

    def g(x):
        return x * x - 2.0 * x - 1.0 + 2.0 * x ** (1 - k)

    return EntropyResult(_bisect_decreasing(lambda x: -g(x), 1.0, SILVER, tol), Method.CLOSED_FORM)


def count_words(m: TransitionMatrix, n: int) -> int:
    """Number of admissible words with ``n`` symbols (sum of the entries of ``M**(n-1)``)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    rows = [[int(x) for x in row] for row in m.entries]
    v = [1] * m.size
    for _ in range(n - 1):
        v = [sum(r * x for r, x in zip(row, v)) for row in rows]
    return sum(v)


def count_periodic(m: TransitionMatrix, n: int) -> int:
    """``trace(M**n)``: the number of points of period ``n`` in the subshift."""
    if n < 1:
        raise DomainError("n must be >= 1")
    base = m.entries.astype(object)
    result = np.identity(m.size, dtype=np.int64).astype(object)
    e = n
    while e:
        if e & 1:
            result = result @ base
        base = base @ base
        e >>= 1
    return int(sum(result[i, i] for i in range(m.size)))


def primitivity_exponent(m: TransitionMatrix, cap: int) -> int | None:
    """Smallest ``k <= cap`` with ``M**k`` entrywise positive, or None."""
    a = (m.entries > 0).astype(np.int64)
    p = a.copy()
    for k in range(1, cap + 1):
        if np.all(p > 0):
            return k
        p = ((p @ a) > 0).astype(np.int64)
    return None


def levels_for_length(ell: float) -> int:
    """Largest ``N >= 1`` with ``ell > 2N + 2``, or 0 when there is none."""
    if not ell > 4.0:
        return 0
    n = max(1, math.ceil((ell - 2.0) / 2.0) - 1)
    while not ell > 2 * n + 2:
        n -= 1
    while ell > 2 * (n + 1) + 2:
        n += 1
    return n


# beyond this the (2N+1)-state power iteration is replaced by the closed-form root
POWER_ITERATION_MAX_LEVELS = 60


@dataclass(frozen=True)
class LowerBound:
    ell: float
    n_used: int
    result: EntropyResult
    certified: bool

    @property
    def entropy(self) -> float:
        return self.result.entropy if self.certified else 0.0


def entropy_lower_bound(ell: float, tol: float = 1e-12, n_cap: int | None = None) -> LowerBound:
    """Certified entropy lower bound ``log rho(Sigma~_N)`` for the largest admissible N.

    ``n_cap`` optionally limits N (the bound stays valid, only weaker).
    """
    if not ell > 0:
        raise DomainError("ell must be positive")
    n = levels_for_length(ell)
    if n_cap is not None:
        n = min(n, n_cap)
    if n == 0:
        return LowerBound(ell, 0, EntropyResult(1.0, Method.CLOSED_FORM), False)
    if n <= POWER_ITERATION_MAX_LEVELS:
        res = spectral_radius(matrix_sigma_tilde(n), tol)
    else:
        res = eq0_root(n + 1)
    return LowerBound(ell, n, res, True)


@dataclass(frozen=True)
class AgreementRow:
    n_levels: int
    power: float
    rome: float
    closed_form: float
    k_match: int

    @property
    def discrepancy(self) -> float:
        return max(abs(self.power - self.rome), abs(self.power - self.closed_form),
                   abs(self.rome - self.closed_form))


def three_way_agreement(levels: Iterable[int], tol: float = 1e-12) -> list[AgreementRow]:
    """Compare power iteration, the rome root and the closed-form root for each N.

    The closed-form index is not assumed: every ``k`` in ``1..N+3`` is tried
    and the one whose root is nearest the power-iteration value is kept.
    """
    rows = []
    for n in levels:
        m = matrix_sigma_tilde(n)
        power = _power_iteration(m, tol, 10**6).spectral_radius
        rome = rome_root(rome_reduce(m, {0})).spectral_radius
        candidates = {k: eq0_root(k).spectral_radius for k in range(1, n + 4)}
        k_best = min(candidates, key=lambda k: abs(candidates[k] - power))
        rows.append(AgreementRow(n, power, rome, candidates[k_best], k_best))
    return rows
