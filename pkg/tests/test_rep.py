from __future__ import annotations

import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import paths, rngs
from wheelcalc.calculus import necklace_bracket
from wheelcalc.connections import bv_trivial, rank_element
from wheelcalc.expr import parse_wheel
from wheelcalc.paths import make_path, trivial
from wheelcalc.quiver import cyclic_two, kronecker, loops, one_loop
from wheelcalc.rep import (
    DimVector,
    RepError,
    RepPoint,
    SuperPoly,
    ev_matrix_values,
    ev_path,
    ev_scalar,
    ev_wheel,
    matmul,
    matrix_poisson,
    odd_laplacian,
    rep_dimension,
)
from wheelcalc.sampling import random_element
from wheelcalc.wheels import WheelElement, contract

Q = one_loop()
EVEN = (one_loop(), loops(2), cyclic_two(), kronecker())


def to_sympy(f: SuperPoly) -> sympy.Expr:
    """Even polynomials only; variable (e, i, j) becomes the symbol e_i_j."""
    out = sympy.Integer(0)
    for (even, odd), c in f.sort_terms():
        assert not odd
        term = sympy.Rational(c.numerator, c.denominator)
        for (name, i, j), k in even:
            term *= sympy.Symbol(f"{name}_{i}_{j}") ** k
        out += term
    return sympy.expand(out)


def sympy_trace(q, p, dims) -> sympy.Expr:
    """Oracle: trace of a product of symbolic sympy matrices."""
    mats = []
    for a in p.word:
        arr = q.arrows[a]
        rows, cols = dims[arr.tail], dims[arr.head]
        mats.append(sympy.Matrix(rows, cols, lambda i, j, n=arr.name: sympy.Symbol(f"{n}_{i}_{j}")))
    m = sympy.eye(dims[p.tail])
    for x in mats:
        m = m * x
    return sympy.expand(m.trace())


def sympy_poisson(q, f, g, dims) -> sympy.Expr:
    out = sympy.Integer(0)
    for a in q.base_arrows:
        for i in range(dims[a.tail]):
            for j in range(dims[a.head]):
                x = sympy.Symbol(f"{a.name}_{i}_{j}")
                xs = sympy.Symbol(f"{a.name}*_{j}_{i}")
                out += sympy.diff(f, x) * sympy.diff(g, xs) - sympy.diff(f, xs) * sympy.diff(g, x)
    return sympy.expand(out)


# -- evaluation ---------------------------------------------------------------------
def test_trivial_path_is_the_identity() -> None:
    point = RepPoint.symbolic(Q, DimVector.of(Q, 3))
    assert ev_matrix_values(ev_path(trivial("v"), point)) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_square_of_unipotent_matrix() -> None:
    point = RepPoint(Q, DimVector.of(Q, 2), {"x": [[1, 1], [0, 1]]})
    assert ev_matrix_values(ev_path(make_path(Q, ["x", "x"]), point)) == [[1, 2], [0, 1]]


def test_incompatible_shapes_are_errors() -> None:
    q = kronecker()
    with pytest.raises(RepError):
        RepPoint(q, DimVector.of(q, {"v": 2, "w": 3}), {"a": [[1, 2], [3, 4]]})
    with pytest.raises(RepError):
        matmul([[SuperPoly.const(1), SuperPoly.const(2)]], [[SuperPoly.const(1), SuperPoly.const(2)]])


def test_traces() -> None:
    point = RepPoint(Q, DimVector.of(Q, 2), {"x": [[0, 1], [0, 0]]})
    assert not ev_scalar(parse_wheel(Q, "[x]"), point)
    for d in (1, 2, 3):
        pt = RepPoint.symbolic(Q, DimVector.of(Q, d))
        assert ev_scalar(parse_wheel(Q, "[e_v] * [e_v]"), pt) == SuperPoly.const(d * d)


def test_point_file(tmp_path) -> None:
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"x": [["1/2", 3], [0, 1]]}))
    point = RepPoint.load(Q, DimVector.parse(Q, "v=2"), f)
    assert ev_scalar(parse_wheel(Q, "[x]"), point) == SuperPoly.const(Fraction(3, 2))


@pytest.mark.parametrize(
    "q, dims",
    [(loops(2), {"v": 2}), (cyclic_two(), {"v": 2, "w": 3}), (kronecker(), {"v": 3, "w": 2}), (one_loop(), {"v": 3})],
)
def test_rank_is_the_dimension_of_the_representation_space(q, dims) -> None:
    expected = sum(dims[a.head] * dims[a.tail] for a in q.base_arrows)
    dv = DimVector.of(q, dims)
    assert rep_dimension(q, dv) == expected
    assert ev_scalar(rank_element(q), RepPoint.symbolic(q, dv)) == SuperPoly.const(expected)


def test_two_loops_at_dimension_two_has_rank_eight() -> None:
    q = loops(2)
    assert ev_scalar(rank_element(q), RepPoint.symbolic(q, DimVector.of(q, 2))) == SuperPoly.const(8)


@given(st.sampled_from(EVEN), st.data())
def test_trace_matches_sympy(q, data) -> None:
    p = data.draw(paths(q, 5, closed=True))
    dims = {v: 2 + k for k, v in enumerate(q.vertices)}
    point = RepPoint.symbolic(q, DimVector.of(q, dims))
    assert to_sympy(ev_scalar(WheelElement.necklace(q, p), point)) == sympy_trace(q, p, dims)


# -- the matrix Poisson bracket ---------------------------------------------------------
def test_poisson_examples() -> None:
    X, Xs = SuperPoly.even(("x", 0, 0)), SuperPoly.even(("x*", 0, 0))
    assert matrix_poisson(X, Xs) == SuperPoly.const(1)
    point = RepPoint.symbolic(Q, DimVector.of(Q, 2))
    t = ev_scalar(parse_wheel(Q, "[x x*]"), point)
    assert not matrix_poisson(t, t)
    lhs = matrix_poisson(ev_scalar(parse_wheel(Q, "[x x x*]"), point), ev_scalar(parse_wheel(Q, "[x x* x*]"), point))
    assert lhs == ev_scalar(parse_wheel(Q, "[x x x* x*] + 2 [x x* x x*]"), point)


@given(st.sampled_from(EVEN[:3]), st.data())
def test_poisson_matches_sympy(q, data) -> None:
    a = data.draw(paths(q, 4, closed=True))
    b = data.draw(paths(q, 4, closed=True))
    dims = {v: 2 for v in q.vertices}
    point = RepPoint.symbolic(q, DimVector.of(q, dims))
    f, g = (ev_scalar(WheelElement.necklace(q, p), point) for p in (a, b))
    assert to_sympy(matrix_poisson(f, g)) == sympy_poisson(q, to_sympy(f), to_sympy(g), dims)


@given(st.sampled_from(EVEN[:3]), st.sampled_from((2, 3)), st.data())
def test_necklace_bracket_matches_poisson(q, d, data) -> None:
    a = WheelElement.necklace(q, data.draw(paths(q, 5, closed=True)))
    b = WheelElement.necklace(q, data.draw(paths(q, 5, closed=True)))
    point = RepPoint.symbolic(q, DimVector.of(q, d))
    assert ev_scalar(necklace_bracket(a, b), point) == matrix_poisson(ev_scalar(a, point), ev_scalar(b, point))


@given(st.data())
def test_poisson_jacobi(data) -> None:
    q = loops(2)
    point = RepPoint.symbolic(q, DimVector.of(q, 2))
    f, g, h = (ev_scalar(WheelElement.necklace(q, data.draw(paths(q, 3, closed=True))), point) for _ in range(3))
    jac = (
        matrix_poisson(f, matrix_poisson(g, h))
        + matrix_poisson(g, matrix_poisson(h, f))
        + matrix_poisson(h, matrix_poisson(f, g))
    )
    assert not jac


# -- the odd Laplacian ----------------------------------------------------------------
@pytest.mark.parametrize("d", [1, 2, 3])
def test_laplacian_examples(d) -> None:
    q = one_loop(star_parity=1)
    point = RepPoint.symbolic(q, DimVector.of(q, d))
    assert odd_laplacian(ev_scalar(parse_wheel(q, "[x x*]"), point)) == SuperPoly.const(d * d)
    assert not odd_laplacian(ev_scalar(parse_wheel(q, "[x x] * [x]"), point))


@given(st.sampled_from([q.with_options(star_parity=1) for q in EVEN[:3]]), st.sampled_from((2, 3)), st.data())
def test_bv_matches_laplacian(q, d, data) -> None:
    u = WheelElement.necklace(q, data.draw(paths(q, 5, closed=True)))
    if data.draw(st.booleans()):
        u = u * WheelElement.necklace(q, data.draw(paths(q, 2, closed=True)))
    point = RepPoint.symbolic(q, DimVector.of(q, d))
    lap = odd_laplacian(ev_scalar(u, point))
    assert ev_scalar(bv_trivial(u), point) == lap
    assert not odd_laplacian(lap)


# -- multiplicativity --------------------------------------------------------------------
@given(st.sampled_from((loops(2), cyclic_two(), loops(2, star_parity=1))), st.sampled_from((1, 2, 3)), rngs)
def test_evaluation_is_multiplicative_and_commutes_with_contraction(q, d, rng) -> None:
    u = random_element(rng, q, 1, 3, 2)
    v = random_element(rng, q, 1, 2, 1)
    point = RepPoint.symbolic(q, DimVector.of(q, d))
    w = u * v
    assert ev_wheel(w, point) == ev_wheel(u, point) * ev_wheel(v, point)
    i, j = rng.randint(1, 2), rng.randint(1, 2)
    assert ev_wheel(contract(w, i, j), point) == ev_wheel(w, point).contract(i, j)


def test_high_wheel_degree_is_refused() -> None:
    x = parse_wheel(Q, "x")
    with pytest.raises(RepError):
        ev_wheel(x * x * x * x, RepPoint.symbolic(Q, DimVector.of(Q, 2)))
