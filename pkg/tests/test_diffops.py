from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import paths, rngs
from wheelcalc.calculus import wheeled_bracket
from wheelcalc.connections import Connection, bv_operator
from wheelcalc.diffops import (
    WheeledDiffOp,
    apply_op,
    apply_phi,
    commutator,
    compose_ops,
    groth2_apply,
    phi_bracket,
    principal_symbol,
    sp2_triple,
    sp2_weil,
    t_commutator,
    t_derivation,
    t_lambda,
    weil_element,
    weyl_commutator,
    weyl_image,
)
from wheelcalc.expr import parse_ncpoly, parse_op, parse_wheel
from wheelcalc.paths import make_path
from wheelcalc.perm import Permutation
from wheelcalc.quiver import cyclic_two, loops, one_loop
from wheelcalc.rep import DimVector, RepPoint, SuperPoly, ev_scalar, ev_wheel
from wheelcalc.sampling import random_element, random_homogeneous
from wheelcalc.wheels import WheelElement, WheelError, block_swap, parity, wheel_act

Q = loops(2)
Q1 = one_loop()
QUIVERS = (loops(2), cyclic_two(), one_loop())


def random_op(rng, q, max_order=2) -> WheeledDiffOp:
    while True:
        w = random_homogeneous(rng, q, rng.randint(0, 1), 2, max_order, terms=2)
        if w:
            return WheeledDiffOp(w)


def twisted(d1: WheeledDiffOp, d2: WheeledDiffOp, u: WheelElement) -> WheelElement:
    """Oracle: d1 d2 u - (-1)^{|d1||d2|} (labels of d2 and d1 swapped) d2 d1 u, computed by applying."""
    k1, k2, m = d1.shift, d2.shift, u.degree
    swap = Permutation(block_swap(k2, k1).images() + tuple(range(k1 + k2 + 1, k1 + k2 + m + 1)))
    sign = -1 if parity(d1.symbol) and parity(d2.symbol) else 1
    return d1(d2(u)) - wheel_act(swap, swap, d2(d1(u))).scale(sign)


# -- applying operators ---------------------------------------------------------
def test_identity_and_multiplier() -> None:
    u = parse_wheel(Q, "[x y] * x # y*")
    assert WheeledDiffOp.identity(Q)(u) == u
    assert parse_op(Q, "mul(x)")(u) == parse_wheel(Q, "x") * u


def test_odd_regime_operators_are_rejected() -> None:
    with pytest.raises(WheelError):
        WheeledDiffOp(parse_wheel(one_loop(star_parity=1), "x*"))


def test_derivation_on_square_necklace() -> None:
    assert parse_op(Q1, "op(x*)")(parse_wheel(Q1, "[x x]")) == parse_wheel(Q1, "2 x")


@pytest.mark.parametrize("d", [2, 3])
@given(st.data())
def test_partial_x_is_the_matrix_gradient(d, data) -> None:
    """Oracle: ev(theta_{d_x} [w])[i, j] = d ev([w]) / d X[j, i]."""
    p = data.draw(paths(Q, 4, strata=("base",), closed=True))
    c = WheelElement.necklace(Q, p)
    point = RepPoint.symbolic(Q, DimVector.of(Q, d))
    got = ev_wheel(parse_op(Q, "op(x*)")(c), point)
    f = ev_scalar(c, point)
    for i in range(d):
        for j in range(d):
            entry = got.entries.get(((("v", i),), (("v", j),)))
            grad = f.d_even(("x", j, i))
            assert (entry or SuperPoly()) == grad


@given(st.sampled_from(QUIVERS), rngs)
def test_apply_is_a_homomorphism(q, rng) -> None:
    d1, d2 = random_op(rng, q), random_op(rng, q)
    u = random_element(rng, q, rng.randint(0, 2), 3, 2)
    assert apply_op(compose_ops(d1, d2), u) == d1(d2(u))


# -- filtration and commutators ---------------------------------------------------
@given(st.sampled_from(QUIVERS), rngs)
def test_order_filtration(q, rng) -> None:
    d1, d2 = random_op(rng, q), random_op(rng, q)
    assert compose_ops(d1, d2).order <= d1.order + d2.order
    com = commutator(d1, d2)
    assert not com.symbol or com.order <= d1.order + d2.order - 1


@given(st.sampled_from(QUIVERS), rngs)
def test_commutator_acts_as_twisted_commutator(q, rng) -> None:
    d1, d2 = random_op(rng, q), random_op(rng, q)
    u = random_element(rng, q, rng.randint(0, 2), 3, 2)
    assert commutator(d1, d2)(u) == twisted(d1, d2, u)


def test_shadow_examples_in_the_wheeled_setting() -> None:
    theta, lam = parse_op(Q, "op(x*)"), parse_op(Q, "mul(x)")
    wiring = parse_op(Q, "mul(perm((1 2))<e_v, e_v>)")
    assert commutator(theta, lam) == wiring
    assert not commutator(parse_op(Q, "mul(x)"), parse_op(Q, "mul(y)")).symbol
    for text in ["x", "[x y]", "x* # y"]:
        u = parse_wheel(Q, text)
        assert twisted(theta, lam, u) == wiring(u)


@given(rngs)
def test_derivation_commutators_drop_order(rng) -> None:
    xi = random_element(rng, Q, 1, 2, 2, necks=0)
    eta = random_element(rng, Q, 1, 2, 2, necks=0)
    xi = xi.part(lambda k: sum(Q.strata[a] == "star" for a in k[1][0].word) == 1)
    eta = eta.part(lambda k: sum(Q.strata[a] == "star" for a in k[1][0].word) == 1)
    if xi and eta:
        com = commutator(WheeledDiffOp.theta(xi), WheeledDiffOp.theta(eta))
        assert com.order <= 1


# -- the twisted shadow on T(V) ------------------------------------------------
words = st.dictionaries(
    st.lists(st.sampled_from("xy"), min_size=1, max_size=3).map(tuple), st.integers(-3, 3).map(Fraction), max_size=3
)
vectors = st.dictionaries(st.sampled_from("xy"), st.integers(-3, 3).map(Fraction))
endos = st.dictionaries(st.sampled_from("xy"), vectors)


def clean(d):
    return {k: v for k, v in d.items() if v}


@given(vectors, vectors, endos, endos, words)
def test_shadow_relations(v, w, phi, psi, u) -> None:
    assert not clean(t_commutator(t_lambda(v), t_lambda(w), 1, 1)(u))
    assert clean(t_commutator(t_derivation(phi), t_lambda(v), 0, 1)(u)) == clean(t_lambda(apply_phi(phi, v))(u))
    assert clean(t_commutator(t_derivation(phi), t_derivation(psi), 0, 0)(u)) == clean(
        t_derivation(phi_bracket(phi, psi))(u)
    )


@pytest.mark.parametrize(
    "ds, word, expected",
    [([{"x": "y"}], "x x", "y x + x y"), ([{"x": "y"}, {"x": "y"}], "x x", "y y"), ([{"x": "y"}, {"x": "y"}], "x", "0")],
)
def test_higher_order_derivation_examples(ds, word, expected) -> None:
    q = loops(2, double=False)
    ops = [{q.arrow(k).index: parse_ncpoly(q, v) for k, v in d.items()} for d in ds]
    got = groth2_apply(ops, make_path(q, word.split()), q)
    assert got == (parse_ncpoly(q, expected) if expected != "0" else got.zero(q))


# -- principal symbols -------------------------------------------------------------
def test_first_symbols() -> None:
    theta = parse_op(Q, "dd(x x*)")
    for text in ["x", "y", "x y"]:
        a = parse_wheel(Q, text)
        assert principal_symbol(theta, [a]) == theta(a)
        assert not principal_symbol(parse_op(Q, "mul(x)"), [a])


@given(st.sampled_from(QUIVERS), rngs)
def test_symbol_beyond_the_order_vanishes(q, rng) -> None:
    d = random_op(rng, q)
    args = []
    while len(args) < d.order + 1:
        a = random_element(rng, q, 1, 2, 1, necks=0, strata=("base",))
        if a:
            args.append(a)
    assert not principal_symbol(d, args)


def test_second_symbol_of_bv_is_the_bracket() -> None:
    q = loops(2, star_parity=1)
    conn = Connection.trivial(q)
    gens = [parse_wheel(q, s) for s in ("x", "y", "x*", "y*", "[x]", "[y*]", "[x x*]")]
    for a in gens:
        for b in gens:
            got = principal_symbol(lambda u: bv_operator(conn, u), [a, b])
            assert got == wheeled_bracket(a, b).scale((-1) ** (parity(a) + 1))


# -- Weil elements ---------------------------------------------------------------
def test_weil_orders() -> None:
    assert weil_element(parse_wheel(Q1, "[x x]")).order == 0
    top = weil_element(parse_wheel(Q1, "[x* x*]"))
    assert top.order == 2 and top == parse_op(Q1, "op([x* x*])")


def test_weil_images_satisfy_sp2() -> None:
    """Oracle: commutators in the Weyl algebra of x and d/dx."""
    ops = sp2_weil(Q1)
    weyl = sp2_triple()
    for a in "efh":
        for b in "efh":
            expected = weyl_image(Q1, weyl_commutator(weyl[a], weyl[b]))
            assert commutator(ops[a], ops[b]) == expected
    assert commutator(ops["h"], ops["e"]) == ops["e"].scale(2)
    assert commutator(ops["h"], ops["f"]) == ops["f"].scale(-2)
    assert commutator(ops["e"], ops["f"]) == ops["h"].scale(-4)


@settings(max_examples=20)
@given(st.sampled_from(["[x x]", "[x x*]", "[x* x*]"]), st.data())
def test_weil_operators_act_like_weyl_operators_on_traces(word, data) -> None:
    """Oracle at d = 1: [x^i (x*)^j] acts on polynomials in X as X^i d^j."""
    n = data.draw(st.integers(0, 4))
    u = WheelElement.necklace(Q1, make_path(Q1, ["x"] * n, tail="v"))
    op = weil_element(parse_wheel(Q1, word))
    point = RepPoint.symbolic(Q1, DimVector.of(Q1, 1))
    got = ev_scalar(op(u), point)
    X = ("x", 0, 0)
    f = ev_scalar(u, point)
    i = {"[x x]": 2, "[x x*]": 1, "[x* x*]": 0}[word]
    j = 2 - i
    want = f
    for _ in range(j):
        want = want.d_even(X)
    for _ in range(i):
        want = want * ev_scalar(parse_wheel(Q1, "[x]"), point)
    if word == "[x x*]":
        want = want + f.scale(Fraction(1, 2))
    assert got == want
