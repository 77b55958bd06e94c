import itertools
import math

import numpy as np
import pytest

from stadium_entropy.errors import DomainError, StructuralError
from stadium_entropy.sft import (
    LOG_SILVER,
    SILVER,
    Method,
    RomeReduction,
    TransitionMatrix,
    count_periodic,
    count_words,
    entropy_lower_bound,
    eq0_root,
    levels_for_length,
    matrix_sigma_prime,
    matrix_sigma_prime_displayed,
    matrix_sigma_tilde,
    primitivity_exponent,
    rome_reduce,
    rome_root,
    spectral_radius,
    three_way_agreement,
)


def brute_words(m, n):
    return [w for w in itertools.product(m.labels, repeat=n) if m.admits(w)]


def brute_periodic(m, n):
    return sum(1 for w in itertools.product(m.labels, repeat=n) if m.admits(w + (w[0],)))


def brute_paths(m, rome, max_len=40):
    """Breadth-first enumeration of rome-to-rome paths avoiding the rome inside."""
    out = []
    frontier = [(s, 0) for s in m.labels if s in rome]
    while frontier:
        nxt = []
        for state, length in frontier:
            for t in m.successors(state):
                if t in rome:
                    out.append(length + 1)
                elif length + 1 < max_len:
                    nxt.append((t, length + 1))
        frontier = nxt
    return sorted(out)


def test_sigma_prime_rows():
    m = matrix_sigma_prime()
    assert m.labels == ("0", "A", "B")
    assert m.allowed("0", "0") and not m.allowed("A", "A") and not m.allowed("B", "B")
    assert m.successors("A") == ["0", "B"]
    assert m.successors("B") == ["0", "A"]
    assert matrix_sigma_prime_displayed().entries.tolist() == [[1, 1, 1], [1, 1, 0], [1, 0, 1]]


def test_sigma_tilde_rows():
    m = matrix_sigma_tilde(1)
    assert m.labels == (-1, 0, 1)
    assert m.successors(-1) == [0]
    assert m.successors(0) == [-1, 0, 1]
    assert m.successors(1) == [0]
    m2 = matrix_sigma_tilde(2)
    assert sorted(m2.successors(1)) == [0, 2]
    assert sorted(m2.successors(-1)) == [-2, 0]
    assert m2.successors(2) == [0]
    assert matrix_sigma_tilde(0).entries.tolist() == [[1]]
    for n in range(1, 8):
        e = matrix_sigma_tilde(n).entries
        assert e.shape == (2 * n + 1, 2 * n + 1)
        assert np.all(e.sum(axis=0) > 0) and np.all(e.sum(axis=1) > 0)


def test_matrix_validation():
    with pytest.raises(DomainError):
        TransitionMatrix.from_rows([[1, 2], [0, 1]])
    with pytest.raises(DomainError):
        TransitionMatrix.from_rows([[1, 0, 1]])


@pytest.mark.parametrize("m", [matrix_sigma_prime(), matrix_sigma_prime_displayed()])
def test_three_by_three_radius(m):
    res = spectral_radius(m)
    assert res.method is Method.CHAR_POLY
    assert res.spectral_radius == pytest.approx(SILVER, abs=1e-12)
    # independent oracle: numpy's dense eigenvalues
    assert res.spectral_radius == pytest.approx(max(abs(np.linalg.eigvals(m.entries))), abs=1e-12)
    assert res.entropy == math.log(res.spectral_radius)


def test_spectral_radius_examples():
    assert spectral_radius(TransitionMatrix.from_rows(np.eye(2, dtype=int))).spectral_radius == pytest.approx(1.0)
    assert spectral_radius(matrix_sigma_tilde(1)).spectral_radius == pytest.approx(2.0, abs=1e-12)
    res = spectral_radius(matrix_sigma_tilde(2))
    assert res.method is Method.POWER_ITERATION
    assert res.residual < 1e-9
    assert res.spectral_radius == pytest.approx(2.26953084208114, abs=1e-9)
    with pytest.raises(DomainError):
        spectral_radius(matrix_sigma_tilde(2), tol=0.0)


@pytest.mark.parametrize("n", range(1, 9))
def test_power_iteration_against_eigvals(n):
    m = matrix_sigma_tilde(n)
    oracle = max(abs(np.linalg.eigvals(m.entries.astype(float))))
    assert spectral_radius(m).spectral_radius == pytest.approx(oracle, abs=1e-9)


def test_rome_paths_examples():
    assert rome_reduce(matrix_sigma_tilde(1), {0}).path_lengths == (1, 2, 2)
    assert rome_reduce(matrix_sigma_tilde(2), {0}).path_lengths == (1, 2, 2, 3, 3)
    with pytest.raises(StructuralError):
        rome_reduce(matrix_sigma_prime(), {"0"})


@pytest.mark.parametrize("n", range(1, 7))
def test_rome_paths_match_enumeration(n):
    m = matrix_sigma_tilde(n)
    assert list(rome_reduce(m, {0}).path_lengths) == brute_paths(m, {0})


def test_multi_state_rome():
    m = matrix_sigma_prime()
    red = rome_reduce(m, {"0", "A"})
    assert rome_root(red).spectral_radius == pytest.approx(SILVER, abs=1e-9)


def test_rome_root_examples():
    assert rome_root(RomeReduction(frozenset({0}), (1, 2, 2))).spectral_radius == pytest.approx(2.0, abs=1e-12)
    assert rome_root(RomeReduction(frozenset({0}), (1,))).spectral_radius == pytest.approx(1.0, abs=1e-12)
    red = rome_reduce(matrix_sigma_tilde(2), {0})
    root = rome_root(red).spectral_radius
    assert root == pytest.approx(spectral_radius(matrix_sigma_tilde(2)).spectral_radius, abs=1e-9)
    assert sum(root ** -p for p in red.path_lengths) == pytest.approx(1.0, abs=1e-12)


def test_eq0_examples():
    assert eq0_root(1).spectral_radius == pytest.approx(1.0, abs=1e-12)
    assert eq0_root(2).spectral_radius == pytest.approx(2.0, abs=1e-12)
    assert eq0_root(4).spectral_radius == pytest.approx(spectral_radius(matrix_sigma_tilde(3)).spectral_radius, abs=1e-9)
    assert SILVER - eq0_root(40).spectral_radius < 1e-12


def test_eq0_and_tilde_monotone():
    eq = [eq0_root(k).spectral_radius for k in range(1, 25)]
    assert all(a < b for a, b in zip(eq, eq[1:]))
    assert all(x <= SILVER for x in eq)
    rad = [spectral_radius(matrix_sigma_tilde(n)).spectral_radius for n in range(1, 16)]
    assert all(a < b for a, b in zip(rad, rad[1:]))
    assert all(x <= SILVER for x in rad)


def test_three_way_agreement_finds_shift():
    rows = three_way_agreement(range(1, 21))
    assert all(r.discrepancy < 1e-9 for r in rows)
    assert {r.k_match - r.n_levels for r in rows} == {1}


@pytest.mark.parametrize(
    "m, n, words",
    [(matrix_sigma_prime(), 1, 3), (matrix_sigma_prime(), 2, 7), (matrix_sigma_tilde(1), 2, 5)],
)
def test_count_words_examples(m, n, words):
    assert count_words(m, n) == words


def test_count_periodic_examples():
    assert count_periodic(matrix_sigma_prime(), 1) == 1
    assert count_periodic(matrix_sigma_tilde(1), 2) == 5
    m = matrix_sigma_tilde(3)
    assert count_periodic(m, 1) == int(np.trace(m.entries))


@pytest.mark.parametrize("m", [matrix_sigma_prime(), matrix_sigma_tilde(1), matrix_sigma_tilde(2)])
@pytest.mark.parametrize("n", range(1, 7))
def test_counts_match_enumeration(m, n):
    assert count_words(m, n) == len(brute_words(m, n))
    assert count_periodic(m, n) == brute_periodic(m, n)


def test_counts_are_exact_integers():
    c = count_words(matrix_sigma_prime(), 64)
    assert isinstance(c, int) and c > 2**63


def test_primitivity():
    assert primitivity_exponent(matrix_sigma_prime(), 4) == 2
    for n in range(1, 8):
        k = primitivity_exponent(matrix_sigma_tilde(n), 2 * n + 2)
        assert k is not None and k <= 2 * n + 2


def test_word_growth_converges():
    for m in (matrix_sigma_prime(), matrix_sigma_tilde(3)):
        h = spectral_radius(m).entropy
        gaps = [abs(math.log(count_words(m, n)) / n - h) for n in (10, 20, 40, 80)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        # the gap is log(C)/n for a fixed constant C
        assert gaps[-1] * 80 == pytest.approx(gaps[-2] * 40, rel=0.05)


@pytest.mark.parametrize("ell, n", [(4.0, 0), (4.5, 1), (6.0, 1), (6.01, 2), (10.0, 3), (10.5, 4), (100.0, 48)])
def test_levels_for_length(ell, n):
    assert levels_for_length(ell) == n


def test_entropy_lower_bound():
    b = entropy_lower_bound(10.0)
    assert b.n_used == 3 and b.certified
    assert b.result.spectral_radius == pytest.approx(eq0_root(4).spectral_radius, abs=1e-9)
    assert b.result.spectral_radius == pytest.approx(2.3593040, abs=1e-6)
    short = entropy_lower_bound(3.0)
    assert (short.n_used, short.entropy, short.certified) == (0, 0.0, False)
    assert entropy_lower_bound(10.0, n_cap=1).result.spectral_radius == pytest.approx(2.0)


def test_entropy_limit():
    ells = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6]
    ent = [entropy_lower_bound(ell).entropy for ell in ells]
    assert all(a <= b for a, b in zip(ent, ent[1:]))
    assert abs(ent[-1] - LOG_SILVER) < 1e-6
    assert entropy_lower_bound(1e6).result.method is Method.CLOSED_FORM
