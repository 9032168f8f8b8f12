from __future__ import annotations

import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ncpolys, paths, quivers
from wheelcalc.paths import NCPoly, Path, cyclic_normalize, make_path, ncpoly_mul, path_compose, trivial
from wheelcalc.perm import Permutation, koszul_sign
from wheelcalc.quiver import Quiver, QuiverError, kronecker, loops, one_loop


def bubble_sign(targets: list[int], parities: list[int]) -> int:
    """Oracle: sort by adjacent swaps, paying -1 for every odd/odd swap."""
    items = list(zip(targets, parities))
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j][0] > items[j + 1][0]:
                if items[j][1] and items[j + 1][1]:
                    sign = -sign
                items[j], items[j + 1] = items[j + 1], items[j]
    return sign


def step_rotation_sign(q: Quiver, word: tuple[int, ...], r: int) -> int:
    """Oracle: rotate one letter at a time; moving a past the rest costs (-1)^{|a||rest|}."""
    sign, w = 1, list(word)
    par = lambda a: q.arrows[a].parity  # noqa: E731
    for _ in range(r):
        a, rest = w[0], w[1:]
        if par(a) and sum(par(b) for b in rest) % 2:
            sign = -sign
        w = rest + [a]
    return sign


# -- quivers ----------------------------------------------------------------
def test_doubled_quiver_reverses_star_arrows() -> None:
    q = kronecker(star_parity=1)
    assert (q.arrow("a*").tail, q.arrow("a*").head) == ("w", "v")
    assert q.arrow("a*").parity == 1 and q.arrow("a").parity == 0


def test_omega_quiver_has_parallel_diff_arrows() -> None:
    q = kronecker(omega=True)
    assert (q.arrow("da").tail, q.arrow("da").head) == ("v", "w")
    assert q.arrow("da").stratum == "diff"


def test_quiver_json_round_trip(tmp_path) -> None:
    q = kronecker(star_parity=1)
    f = tmp_path / "q.json"
    f.write_text(json.dumps(q.to_json()))
    assert Quiver.load(f) == q


@pytest.mark.parametrize(
    "vertices, arrows",
    [(["v"], [("x", "v", "w")]), (["v", "v"], []), (["v"], [("x", "v", "v"), ("x", "v", "v")]), (["v"], [("1x", "v", "v")])],
)
def test_malformed_quivers_are_rejected(vertices, arrows) -> None:
    with pytest.raises(QuiverError):
        Quiver(vertices, arrows)


# -- paths and NCPoly ---------------------------------------------------------
def test_path_compose_examples() -> None:
    q, k = loops(2), kronecker()
    assert path_compose(trivial("v"), trivial("v")) == trivial("v")
    assert path_compose(make_path(q, ["x"]), make_path(q, ["y"])) == make_path(q, ["x", "y"])
    assert path_compose(make_path(k, ["a"]), make_path(k, ["b"])) is None


def test_ncpoly_mul_examples() -> None:
    q = loops(2)
    x, y = NCPoly.word(q, ["x"]), NCPoly.word(q, ["y"])
    assert ncpoly_mul(x + y, x) == NCPoly.word(q, ["x", "x"]) + NCPoly.word(q, ["y", "x"])
    assert ncpoly_mul(x + y, NCPoly.one(q)) == x + y
    assert ncpoly_mul(x.scale(Fraction(2, 3)), y.scale(Fraction(3, 2))) == NCPoly.word(q, ["x", "y"])


def test_incomposable_word_is_rejected() -> None:
    with pytest.raises(QuiverError):
        make_path(kronecker(), ["a", "b"])


@given(st.data())
def test_ncpoly_mul_is_associative_and_unital(data) -> None:
    q = data.draw(quivers())
    f, g, h = (data.draw(ncpolys(q)) for _ in range(3))
    assert ncpoly_mul(ncpoly_mul(f, g), h) == ncpoly_mul(f, ncpoly_mul(g, h))
    assert ncpoly_mul(NCPoly.one(q), f) == f == ncpoly_mul(f, NCPoly.one(q))


# -- Koszul signs ---------------------------------------------------------------
@pytest.mark.parametrize(
    "images, parities, expected", [((2, 1), (1, 1), -1), ((2, 1), (0, 1), 1), ((2, 3, 1), (1, 1, 1), 1)]
)
def test_koszul_sign_examples(images, parities, expected) -> None:
    assert koszul_sign(Permutation(images), parities) == expected


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(range(1, n + 1)), st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_koszul_sign_matches_bubble_sort(case) -> None:
    images, parities = case
    assert koszul_sign(Permutation(images), parities) == bubble_sign(list(images), parities)


@given(
    st.integers(1, 5).flatmap(
        lambda n: st.tuples(
            st.permutations(range(1, n + 1)), st.permutations(range(1, n + 1)), st.lists(st.integers(0, 1), min_size=n, max_size=n)
        )
    )
)
def test_koszul_sign_is_a_cocycle(case) -> None:
    s, t, par = case
    sigma, tau = Permutation(s), Permutation(t)
    moved = tau.act(par)
    assert koszul_sign(sigma * tau, par) == koszul_sign(sigma, moved) * koszul_sign(tau, par)


# -- cyclic words ---------------------------------------------------------------
def test_cyclic_normalize_examples() -> None:
    q = one_loop(star_parity=1)
    xxs = make_path(q, ["x", "x*"])
    assert cyclic_normalize(q, make_path(q, ["x*", "x"])) == (xxs, 1)
    assert cyclic_normalize(q, xxs) == (xxs, 1)


def test_odd_odd_rotation_sign_matches_transposition_count() -> None:
    q = loops(2, star_parity=1)
    p = make_path(q, ["y*", "x*"])
    canon, s = cyclic_normalize(q, p)
    assert canon.word == (q.arrow("x*").index, q.arrow("y*").index)
    assert s == bubble_sign([2, 1], [1, 1]) == -1


def test_odd_periodic_class_vanishes() -> None:
    q = one_loop(star_parity=1)
    assert cyclic_normalize(q, make_path(q, ["x*", "x*"]))[1] == 0


@given(st.data())
def test_cyclic_normalize_is_idempotent(data) -> None:
    q = data.draw(quivers())
    p = data.draw(paths(q, 5, closed=True))
    canon, s = cyclic_normalize(q, p)
    if s:
        assert cyclic_normalize(q, canon) == (canon, 1)


@given(st.data())
def test_rotations_share_a_class_up_to_koszul_sign(data) -> None:
    q = data.draw(quivers())
    p = data.draw(paths(q, 5, closed=True))
    if not p.word:
        return
    r = data.draw(st.integers(0, len(p.word) - 1))
    rotated = Path(q.tails[p.word[r]], q.tails[p.word[r]], p.word[r:] + p.word[:r])
    c1, s1 = cyclic_normalize(q, p)
    c2, s2 = cyclic_normalize(q, rotated)
    assert c1 == c2
    assert s1 == s2 * step_rotation_sign(q, p.word, r)


def test_brute_force_class_enumeration_agrees_on_short_words() -> None:
    q = loops(2, star_parity=1)
    letters = [a.index for a in q.arrows]
    for n in range(1, 5):
        for word in itertools.product(letters, repeat=n):
            p = Path("v", "v", word)
            canon, s = cyclic_normalize(q, p)
            rots = [word[r:] + word[:r] for r in range(n)]
            assert canon.word == min(rots)
            signs = {step_rotation_sign(q, word, r) for r in range(n) if rots[r] == canon.word}
            assert (s == 0) == (len(signs) == 2)
            if s:
                assert signs == {s}
