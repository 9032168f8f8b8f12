from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rngs
from wheelcalc.paths import make_path, path_grade
from wheelcalc.perm import Permutation, koszul_sign
from wheelcalc.quiver import cyclic_two, loops
from wheelcalc.sampling import random_element, random_homogeneous
from wheelcalc.wheels import (
    WheelElement,
    WheelError,
    block_swap,
    contract,
    parity,
    wheel_act,
    wheel_equal,
    wheel_normalize,
)

Q0 = loops(2)
Q1 = loops(2, star_parity=1)
QUIVERS = (Q0, Q1, cyclic_two())


def P(q, text):
    return make_path(q, text.split())


def W(q, text):
    return WheelElement.from_path(q, P(q, text))


def necklace(q, text):
    return WheelElement.necklace(q, P(q, text))


def perms(m):
    return [Permutation(p) for p in permutations(range(1, m + 1))]


elements = st.tuples(st.sampled_from(QUIVERS), st.integers(1, 4), rngs).map(
    lambda t: random_element(t[2], t[0], t[1], 3, 2)
)


# -- canonical form -------------------------------------------------------------
def test_canonical_term_is_unchanged() -> None:
    x, y = P(Q0, "x"), P(Q0, "y")
    u = wheel_normalize(Q0, 1, Permutation.identity(2), Permutation.identity(2), [x, y])
    assert u == W(Q0, "x") * W(Q0, "y")


@pytest.mark.parametrize("q", [Q0, Q1])
def test_right_permutation_is_absorbed_by_orbit_relation(q) -> None:
    """Oracle: enumerate the relation (sl d, sr d) X = (sl, sr) tau_d X over all d in S_3."""
    word = [P(q, "x*"), P(q, "y"), P(q, "x y*")]
    grades = [path_grade(q, p) for p in word]
    sl, sr = Permutation((2, 3, 1)), Permutation((3, 1, 2))
    ref = wheel_normalize(q, 1, sl, sr, word)
    for d in perms(3):
        moved = wheel_normalize(q, koszul_sign(d, grades), sl, sr, d.act(word))
        assert wheel_normalize(q, 1, sl * d, sr * d, word) == moved
    orbit = [wheel_normalize(q, 1, sl * d, sr * d, word) for d in perms(3)]
    assert ref in orbit


def test_right_swap_moves_to_the_left() -> None:
    x, y = P(Q0, "x"), P(Q0, "y")
    swap = Permutation((2, 1))
    u = wheel_normalize(Q0, 1, Permutation.identity(2), swap, [x, y])
    assert u == wheel_normalize(Q0, 1, swap, Permutation.identity(2), [y, x])


def test_odd_necklace_squares_to_zero() -> None:
    c = P(Q1, "x*")
    assert not wheel_normalize(Q1, 1, Permutation.identity(1), Permutation.identity(1), [P(Q1, "x")], [c, c])


# -- action and product -----------------------------------------------------------
@given(elements)
def test_identity_action(u) -> None:
    m = u.degree
    assert wheel_act(Permutation.identity(m), Permutation.identity(m), u) == u


@given(elements, st.data())
def test_action_axiom(u, data) -> None:
    m = u.degree
    s1, s2, t1, t2 = (Permutation(data.draw(st.permutations(range(1, m + 1)))) for _ in range(4))
    assert wheel_act(s1, t1, wheel_act(s2, t2, u)) == wheel_act(s1 * s2, t1 * t2, u)


def test_diagonal_action_reindexes_the_word() -> None:
    word = [P(Q0, "x"), P(Q0, "y"), P(Q0, "x y")]
    ident = Permutation.identity(3)
    u = wheel_normalize(Q0, 1, ident, ident, word)
    for s in perms(3):
        assert wheel_act(s, s, u) == wheel_normalize(Q0, 1, ident, ident, s.act(word))


def test_product_examples() -> None:
    x, y = W(Q0, "x"), W(Q0, "y")
    xy = wheel_normalize(Q0, 1, Permutation.identity(2), Permutation.identity(2), [P(Q0, "x"), P(Q0, "y")])
    assert x * y == xy
    swap = Permutation((2, 1))
    assert y * x == wheel_act(swap, swap, x * y)
    assert necklace(Q0, "x") * y == wheel_normalize(Q0, 1, Permutation.identity(1), Permutation.identity(1), [P(Q0, "y")], [P(Q0, "x")])


def test_equality_examples() -> None:
    x, y = W(Q0, "x"), W(Q0, "y")
    swap = Permutation((2, 1))
    assert wheel_equal(x * y, x * y)
    assert wheel_equal(x * y, wheel_act(swap, swap, y * x))
    assert not wheel_equal(x * y, y * x)
    assert wheel_equal(x * x, x * x)


@given(st.sampled_from(QUIVERS), rngs)
def test_product_is_associative(q, rng) -> None:
    u, v, w = (random_element(rng, q, rng.randint(0, 2), 3, 2) for _ in range(3))
    assert (u * v) * w == u * (v * w)


@given(st.sampled_from(QUIVERS), rngs)
def test_product_is_twisted_commutative(q, rng) -> None:
    m, n = rng.randint(0, 2), rng.randint(0, 2)
    u = random_homogeneous(rng, q, m, 3, 2, terms=1)
    v = random_homogeneous(rng, q, n, 3, 2, terms=1)
    sign = -1 if parity(u) and parity(v) else 1
    sw = block_swap(n, m)
    assert u * v == wheel_act(sw, sw, v * u).scale(sign)


# -- contraction ------------------------------------------------------------------
def test_contraction_examples() -> None:
    x, y = W(Q0, "x"), W(Q0, "y")
    assert contract(x * y, 1, 2) == W(Q0, "x y")
    assert contract(x * y, 1, 1) == y * necklace(Q0, "x")
    assert contract(x, 1, 1) == necklace(Q0, "x")


def test_contraction_index_out_of_range() -> None:
    with pytest.raises(WheelError):
        contract(W(Q0, "x"), 1, 2)


def _shift(a: int, b: int) -> tuple[int, int]:
    return (a, b - 1) if a < b else (a + 1, b)


@given(elements, st.data())
def test_contraction_associativity(u, data) -> None:
    m = u.degree
    if m < 2:
        return
    k, l = data.draw(st.integers(1, m)), data.draw(st.integers(1, m))
    i, j = data.draw(st.integers(1, m - 1)), data.draw(st.integers(1, m - 1))
    (ip, kp), (jp, lp) = _shift(i, k), _shift(j, l)
    assert contract(contract(u, k, l), i, j) == contract(contract(u, ip, jp), kp, lp)


@given(elements, st.data())
def test_contraction_reduces_to_first_slot(u, data) -> None:
    m = u.degree
    i, j = data.draw(st.integers(1, m)), data.draw(st.integers(1, m))
    front = lambda k: Permutation.cycle(m, *range(1, k + 1)) if k > 1 else Permutation.identity(m)  # noqa: E731
    assert contract(u, i, j) == contract(wheel_act(front(j), front(i), u), 1, 1)


@given(elements, st.data())
def test_contraction_is_equivariant(u, data) -> None:
    """Permuting the untouched labels commutes with contracting (m, m)."""
    m = u.degree
    if m < 2:
        return
    s = Permutation(data.draw(st.permutations(range(1, m))))
    t = Permutation(data.draw(st.permutations(range(1, m))))
    lifted_s, lifted_t = (Permutation(p.images() + (m,)) for p in (s, t))
    assert contract(wheel_act(lifted_s, lifted_t, u), m, m) == wheel_act(s, t, contract(u, m, m))


@given(st.sampled_from(QUIVERS), rngs)
def test_contraction_commutes_with_products(q, rng) -> None:
    m = rng.randint(1, 3)
    u = random_element(rng, q, m, 3, 2)
    v = random_element(rng, q, rng.randint(0, 2), 3, 2)
    i, j = rng.randint(1, m), rng.randint(1, m)
    assert contract(u * v, i, j) == contract(u, i, j) * v
