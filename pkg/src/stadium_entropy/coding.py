"""Symbolic itineraries, the factor maps between alphabets and the level recoding."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterator, Sequence

from .billiard import PhasePoint, trajectory
from .errors import BlockTooLong, BoundaryNotZero, DomainError, SingularAtStep, WordError
from .geometry import BoundaryPiece, StadiumTable, piece_of


class Alphabet(enum.Enum):
    SIX = "six"
    FOUR = "four"
    THREE = "three"
    LEVELS = "levels"


class SixSymbol(enum.IntEnum):
    LEFT_ARC_PLUS = 0
    LEFT_ARC_MINUS = 1
    RIGHT_ARC_PLUS = 2
    RIGHT_ARC_MINUS = 3
    TOP_SEGMENT = 4
    BOTTOM_SEGMENT = 5


class ThreeSymbol(enum.IntEnum):
    ZERO = 0
    A = 1
    B = 2


_SIX_TO_FOUR = {
    SixSymbol.LEFT_ARC_PLUS: BoundaryPiece.LEFT_ARC,
    SixSymbol.LEFT_ARC_MINUS: BoundaryPiece.LEFT_ARC,
    SixSymbol.RIGHT_ARC_PLUS: BoundaryPiece.RIGHT_ARC,
    SixSymbol.RIGHT_ARC_MINUS: BoundaryPiece.RIGHT_ARC,
    SixSymbol.TOP_SEGMENT: BoundaryPiece.TOP_SEGMENT,
    SixSymbol.BOTTOM_SEGMENT: BoundaryPiece.BOTTOM_SEGMENT,
}

_FOUR_TO_THREE = {
    BoundaryPiece.RIGHT_ARC: ThreeSymbol.ZERO,
    BoundaryPiece.LEFT_ARC: ThreeSymbol.ZERO,
    BoundaryPiece.TOP_SEGMENT: ThreeSymbol.A,
    BoundaryPiece.BOTTOM_SEGMENT: ThreeSymbol.B,
}

_SYMBOL_TYPES = {
    Alphabet.SIX: SixSymbol,
    Alphabet.FOUR: BoundaryPiece,
    Alphabet.THREE: ThreeSymbol,
}


@dataclass(frozen=True)
class SymbolWord:
    """A finite word over one of the coding alphabets.

    ``n_levels`` is required for (and only meaningful with) the LEVELS
    alphabet, whose words must obey the grammar of the level subshift.
    """

    alphabet: Alphabet
    symbols: tuple
    n_levels: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.alphabet is Alphabet.LEVELS:
            if self.n_levels is None or self.n_levels < 0:
                raise DomainError("LEVELS words need a non-negative n_levels")
            object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
            check_levels_grammar(self.symbols, self.n_levels)
        else:
            kind = _SYMBOL_TYPES[self.alphabet]
            try:
                object.__setattr__(self, "symbols", tuple(kind(s) for s in self.symbols))
            except ValueError as exc:
                raise WordError(f"symbol outside the {self.alphabet.value} alphabet") from exc

    def __len__(self) -> int:
        return len(self.symbols)

    def shift(self, k: int = 1) -> SymbolWord:
        return SymbolWord(self.alphabet, self.symbols[k:], self.n_levels)

    def to_json(self) -> list[int]:
        return [int(s) for s in self.symbols]

    @classmethod
    def levels(cls, symbols: Sequence[int], n_levels: int) -> SymbolWord:
        return cls(Alphabet.LEVELS, tuple(symbols), n_levels)


def levels_successors(state: int, n_levels: int) -> tuple[int, ...]:
    """States reachable in one step from ``state`` in the level subshift."""
    if abs(state) > n_levels:
        raise WordError(f"level {state} outside [-{n_levels}, {n_levels}]")
    if state == 0:
        return (-1, 0, 1) if n_levels >= 1 else (0,)
    sign = 1 if state > 0 else -1
    if abs(state) < n_levels:
        return (state + sign, 0)
    return (0,)


def check_levels_grammar(symbols: Sequence[int], n_levels: int) -> None:
    for k, s in enumerate(symbols):
        if abs(s) > n_levels:
            raise WordError(f"symbol {s} at index {k} outside [-{n_levels}, {n_levels}]")
    for k in range(len(symbols) - 1):
        if symbols[k + 1] not in levels_successors(symbols[k], n_levels):
            raise WordError(
                f"forbidden transition {symbols[k]} -> {symbols[k + 1]} at index {k}"
            )


def levels_language(n_levels: int, length: int) -> Iterator[tuple[int, ...]]:
    """All grammar-valid level words with exactly ``length`` symbols, in lexicographic order."""
    if length < 1:
        return

    def extend(prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == length:
            yield prefix
            return
        for s in sorted(levels_successors(prefix[-1], n_levels)):
            yield from extend(prefix + (s,))

    for first in range(-n_levels, n_levels + 1):
        yield from extend((first,))


def itinerary(
    table: StadiumTable, p: PhasePoint, n: int, alphabet: Alphabet = Alphabet.FOUR
) -> SymbolWord:
    points = trajectory(table, p, n)
    pieces = [piece_of(table, q.r) for q in points]
    if alphabet is Alphabet.FOUR:
        return SymbolWord(Alphabet.FOUR, tuple(pieces))
    if alphabet is Alphabet.SIX:
        return SymbolWord(Alphabet.SIX, tuple(_six(piece, q.phi) for piece, q in zip(pieces, points)))
    raise DomainError("itineraries are produced over the SIX or FOUR alphabet")


def _six(piece: BoundaryPiece, phi: float) -> SixSymbol:
    if piece is BoundaryPiece.TOP_SEGMENT:
        return SixSymbol.TOP_SEGMENT
    if piece is BoundaryPiece.BOTTOM_SEGMENT:
        return SixSymbol.BOTTOM_SEGMENT
    plus = phi >= 0.0
    if piece is BoundaryPiece.LEFT_ARC:
        return SixSymbol.LEFT_ARC_PLUS if plus else SixSymbol.LEFT_ARC_MINUS
    return SixSymbol.RIGHT_ARC_PLUS if plus else SixSymbol.RIGHT_ARC_MINUS


def six_to_four(word: SymbolWord) -> SymbolWord:
    _require(word, Alphabet.SIX)
    return SymbolWord(Alphabet.FOUR, tuple(_SIX_TO_FOUR[s] for s in word.symbols))


def to_three(word: SymbolWord) -> SymbolWord:
    """Identify the two semicircles: the 2-to-1 factor onto the three-symbol system."""
    _require(word, Alphabet.FOUR)
    return SymbolWord(Alphabet.THREE, tuple(_FOUR_TO_THREE[s] for s in word.symbols))


def trim_to_arcs(word: SymbolWord) -> tuple[SymbolWord, int]:
    """Cut a FOUR or THREE word to its first..last arc symbol; also return the start offset."""
    if word.alphabet is Alphabet.FOUR:
        is_arc = [s.is_arc for s in word.symbols]
    elif word.alphabet is Alphabet.THREE:
        is_arc = [s is ThreeSymbol.ZERO for s in word.symbols]
    else:
        raise DomainError("trim_to_arcs expects a FOUR or THREE word")
    if not any(is_arc):
        raise BoundaryNotZero("word contains no arc collision")
    first = is_arc.index(True)
    last = len(is_arc) - 1 - is_arc[::-1].index(True)
    return SymbolWord(word.alphabet, word.symbols[first : last + 1]), first


def recode_levels(word: SymbolWord, n_levels: int) -> SymbolWord:
    """Replace each maximal A/B block of length m by ``1..m`` (A first) or ``-1..-m`` (B first)."""
    _require(word, Alphabet.THREE)
    syms = word.symbols
    if not syms or syms[0] is not ThreeSymbol.ZERO or syms[-1] is not ThreeSymbol.ZERO:
        raise BoundaryNotZero("word must begin and end with the arc symbol 0")
    out: list[int] = []
    index = 0
    for is_zero, group in groupby(syms, key=lambda s: s is ThreeSymbol.ZERO):
        block = list(group)
        if is_zero:
            out.extend([0] * len(block))
        else:
            for a, b in zip(block, block[1:]):
                if a is b:
                    raise WordError(f"forbidden transition {a.name} -> {b.name} near index {index}")
            if len(block) > n_levels:
                raise BlockTooLong(index, len(block), n_levels)
            sign = 1 if block[0] is ThreeSymbol.A else -1
            out.extend(sign * k for k in range(1, len(block) + 1))
        index += len(block)
    return SymbolWord.levels(out, n_levels)


def decode_levels(word: SymbolWord) -> SymbolWord:
    """Inverse of :func:`recode_levels` on its image."""
    _require(word, Alphabet.LEVELS)
    out = []
    for s in word.symbols:
        if s == 0:
            out.append(ThreeSymbol.ZERO)
        else:
            first = ThreeSymbol.A if s > 0 else ThreeSymbol.B
            other = ThreeSymbol.B if s > 0 else ThreeSymbol.A
            out.append(first if abs(s) % 2 == 1 else other)
    return SymbolWord(Alphabet.THREE, tuple(out))


def zero_delimit(symbols: Sequence[int], n_levels: int) -> tuple[tuple[int, ...], int]:
    """Extend a level word so that it starts and ends with 0.

    A leading partial block ``j, j+1, ...`` is completed backwards to
    ``0, 1, ..., j-1`` so the result stays grammar-valid; a trailing nonzero
    symbol is followed by 0.  Returns the extended word and the offset of the
    original word inside it.
    """
    symbols = tuple(int(s) for s in symbols)
    check_levels_grammar(symbols, n_levels)
    if not symbols:
        raise WordError("empty word")
    head: tuple[int, ...] = ()
    first = symbols[0]
    if first != 0:
        sign = 1 if first > 0 else -1
        head = (0,) + tuple(sign * k for k in range(1, abs(first)))
    tail = (0,) if symbols[-1] != 0 else ()
    return head + symbols + tail, len(head)


class MembershipReason(enum.Enum):
    OK = "ok"
    REPEATED_ARC = "repeated_arc"
    LONG_SEGMENT_RUN = "long_segment_run"
    SINGULAR = "singular"


@dataclass(frozen=True)
class MembershipReport:
    in_K: bool
    in_KN: bool
    violation_index: int | None = None
    reason: MembershipReason = MembershipReason.OK
    word: SymbolWord | None = field(default=None, compare=False)


def word_membership(word: SymbolWord, n_levels: int) -> MembershipReport:
    """Finite-horizon membership test on a FOUR word."""
    _require(word, Alphabet.FOUR)
    syms = word.symbols
    for k in range(1, len(syms)):
        if syms[k].is_arc and syms[k] is syms[k - 1]:
            return MembershipReport(False, False, k, MembershipReason.REPEATED_ARC, word)
    run = 0
    for k, s in enumerate(syms):
        run = 0 if s.is_arc else run + 1
        if run > n_levels:
            return MembershipReport(True, False, k, MembershipReason.LONG_SEGMENT_RUN, word)
    return MembershipReport(True, True, None, MembershipReason.OK, word)


def membership(table: StadiumTable, p: PhasePoint, horizon: int, n_levels: int) -> MembershipReport:
    """Check the first ``horizon`` steps of the orbit of ``p`` against the K and K_N conditions.

    Only a necessary condition: membership is a property of the whole orbit.
    """
    try:
        word = itinerary(table, p, horizon, Alphabet.FOUR)
    except SingularAtStep as exc:
        return MembershipReport(False, False, exc.index + 1, MembershipReason.SINGULAR)
    return word_membership(word, n_levels)


def _require(word: SymbolWord, alphabet: Alphabet) -> None:
    if word.alphabet is not alphabet:
        raise DomainError(f"expected a {alphabet.value} word, got {word.alphabet.value}")
