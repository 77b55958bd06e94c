import json
import math

import numpy as np
import pytest

from stadium_entropy.billiard import PhasePoint, random_regular_points, trajectory
from stadium_entropy.coding import (
    Alphabet,
    MembershipReason,
    SixSymbol,
    SymbolWord,
    ThreeSymbol,
    decode_levels,
    itinerary,
    levels_language,
    levels_successors,
    membership,
    recode_levels,
    six_to_four,
    to_three,
    trim_to_arcs,
    word_membership,
    zero_delimit,
)
from stadium_entropy.errors import BlockTooLong, BoundaryNotZero, SingularAtStep, WordError
from stadium_entropy.geometry import BoundaryPiece as P
from stadium_entropy.geometry import StadiumTable, arc_argument, piece_of

T4 = StadiumTable(4.0)
T10 = StadiumTable(10.0)
BOUNCER = PhasePoint(math.pi + 2, 0.0)
AXIS = PhasePoint(math.pi / 2, 0.0)
Z, A, B = ThreeSymbol.ZERO, ThreeSymbol.A, ThreeSymbol.B


def four(*s):
    return SymbolWord(Alphabet.FOUR, s)


def three(*s):
    return SymbolWord(Alphabet.THREE, s)


def test_itinerary_examples():
    assert itinerary(T4, BOUNCER, 3).symbols == (P.TOP_SEGMENT, P.BOTTOM_SEGMENT) * 2
    assert itinerary(T4, AXIS, 3).symbols == (P.RIGHT_ARC, P.LEFT_ARC) * 2
    p = PhasePoint(math.pi / 2, 0.05)
    six = itinerary(T4, p, 2, Alphabet.SIX)
    phis = [q.phi for q in trajectory(T4, p, 2)]
    pieces = [piece_of(T4, q.r) for q in trajectory(T4, p, 2)]
    for s, phi, piece in zip(six.symbols, phis, pieces):
        if piece is P.RIGHT_ARC:
            assert s is (SixSymbol.RIGHT_ARC_PLUS if phi >= 0 else SixSymbol.RIGHT_ARC_MINUS)
        elif piece is P.LEFT_ARC:
            assert s is (SixSymbol.LEFT_ARC_PLUS if phi >= 0 else SixSymbol.LEFT_ARC_MINUS)
    assert six.symbols[0] is SixSymbol.RIGHT_ARC_PLUS
    assert six_to_four(six).symbols == tuple(pieces)
    with pytest.raises(SingularAtStep):
        itinerary(T4, PhasePoint(math.pi, 0.1), 2)


@pytest.mark.parametrize(
    "src, dst",
    [
        ((P.RIGHT_ARC, P.LEFT_ARC, P.RIGHT_ARC), (Z, Z, Z)),
        ((P.TOP_SEGMENT, P.BOTTOM_SEGMENT, P.TOP_SEGMENT), (A, B, A)),
        ((P.RIGHT_ARC, P.TOP_SEGMENT, P.BOTTOM_SEGMENT, P.LEFT_ARC), (Z, A, B, Z)),
    ],
)
def test_to_three(src, dst):
    assert to_three(four(*src)).symbols == dst


def test_factor_commutes_with_shift():
    rng = np.random.default_rng(4)
    for _ in range(200):
        w = four(*rng.integers(0, 4, size=12))
        k = int(rng.integers(0, 12))
        assert to_three(w.shift(k)) == to_three(w).shift(k)


@pytest.mark.parametrize(
    "word, n, levels",
    [((Z, A, B, A, Z), 3, (0, 1, 2, 3, 0)), ((Z, B, Z), 1, (0, -1, 0)), ((Z, Z, B, A, Z, A, Z), 2, (0, 0, -1, -2, 0, 1, 0))],
)
def test_recode_examples(word, n, levels):
    out = recode_levels(three(*word), n)
    assert out.symbols == levels
    assert out.n_levels == n
    assert decode_levels(out) == three(*word)


def test_recode_errors():
    with pytest.raises(BlockTooLong) as info:
        recode_levels(three(Z, A, B, Z), 1)
    assert info.value.index == 1
    with pytest.raises(BoundaryNotZero):
        recode_levels(three(A, Z), 2)
    with pytest.raises(BoundaryNotZero):
        recode_levels(three(Z, B), 2)
    with pytest.raises(WordError):
        recode_levels(three(Z, A, A, Z), 3)


def test_decode_inverts_recode_on_language():
    for n in (1, 2, 3):
        for length in range(1, 8):
            for w in levels_language(n, length):
                ext, _ = zero_delimit(w, n)
                lev = SymbolWord.levels(ext, n)
                assert recode_levels(decode_levels(lev), n) == lev


def test_grammar():
    assert levels_successors(0, 3) == (-1, 0, 1)
    assert levels_successors(2, 3) == (3, 0)
    assert levels_successors(-3, 3) == (0,)
    with pytest.raises(WordError):
        SymbolWord.levels((0, 2), 3)
    with pytest.raises(WordError):
        SymbolWord.levels((0, 4, 0), 3)
    with pytest.raises(WordError):
        SymbolWord(Alphabet.THREE, (3,))


def test_zero_delimit():
    assert zero_delimit((0, 1, 0), 2) == ((0, 1, 0), 0)
    assert zero_delimit((2, 0), 3) == ((0, 1, 2, 0), 2)
    assert zero_delimit((-3,), 3) == ((0, -1, -2, -3, 0), 3)
    assert zero_delimit((0, 1), 3) == ((0, 1, 0), 0)


def test_trim_to_arcs():
    w, off = trim_to_arcs(four(P.TOP_SEGMENT, P.RIGHT_ARC, P.TOP_SEGMENT, P.LEFT_ARC, P.BOTTOM_SEGMENT))
    assert off == 1
    assert w.symbols == (P.RIGHT_ARC, P.TOP_SEGMENT, P.LEFT_ARC)
    with pytest.raises(BoundaryNotZero):
        trim_to_arcs(four(P.TOP_SEGMENT, P.BOTTOM_SEGMENT))


def test_json_encoding():
    assert json.dumps(four(P.RIGHT_ARC, P.TOP_SEGMENT, P.LEFT_ARC, P.BOTTOM_SEGMENT).to_json()) == "[0, 1, 2, 3]"
    assert three(Z, A, B).to_json() == [0, 1, 2]
    assert SymbolWord.levels((0, -1, 0), 1).to_json() == [0, -1, 0]


def test_membership_examples():
    rep = membership(T4, AXIS, 10, 1)
    assert rep.in_K and rep.in_KN and rep.violation_index is None
    rep = membership(T4, BOUNCER, 10, 3)
    assert rep.in_K and not rep.in_KN
    assert rep.reason is MembershipReason.LONG_SEGMENT_RUN and rep.violation_index == 3
    rep = word_membership(four(P.RIGHT_ARC, P.RIGHT_ARC), 3)
    assert not rep.in_K and rep.reason is MembershipReason.REPEATED_ARC and rep.violation_index == 1
    rep = membership(T4, PhasePoint(1.0, math.pi / 2), 5, 3)
    assert rep.reason is MembershipReason.SINGULAR and not rep.in_K


def _sample(table, count, horizon, seed):
    rng = np.random.default_rng(seed)
    for p in random_regular_points(table, count, rng):
        try:
            yield trajectory(table, p, horizon)
        except SingularAtStep:
            continue


def test_orientation_is_redundant_in_K():
    # the arc sign only separates repeated hits on one arc, which K excludes
    for pts in _sample(T10, 400, 6, seed=8):
        fw = tuple(piece_of(T10, q.r) for q in pts)
        if not word_membership(SymbolWord(Alphabet.FOUR, fw), 3).in_K:
            continue
        sw = itinerary(T10, pts[0], 6, Alphabet.SIX)
        assert six_to_four(sw).symbols == fw
        # consecutive hits on one arc would need the sign; they never occur in K
        assert all(not (a.is_arc and a is b) for a, b in zip(fw, fw[1:]))


def test_arc_and_segment_angle_bounds_on_KN_windows():
    n = 3
    horizon = 30
    checked_arcs = checked_segments = 0
    for pts in _sample(T10, 1500, horizon, seed=5):
        pieces = [piece_of(T10, q.r) for q in pts]
        for k in range(n + 1, horizon - n):
            piece = pieces[k]
            w = n + 1 if piece.is_arc else n
            window = SymbolWord(Alphabet.FOUR, pieces[k - w : k + w + 1])
            if not word_membership(window, n).in_KN:
                continue
            if piece.is_arc:
                assert abs(arc_argument(T10, pts[k].r)) < math.pi / 4
                checked_arcs += 1
            else:
                assert abs(pts[k].phi) > math.pi / 4
                checked_segments += 1
    assert checked_arcs > 100 and checked_segments > 100
