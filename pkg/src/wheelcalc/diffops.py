"""Wheeled differential operators on F(A) in normal-ordered form.

An operator is stored as its symbol W in F(P_{Qbar}): base letters of W are
creation (multiplier) letters and star letters are annihilators.  Applying W
to u sums, over all injective pairings of the star letters of W with matching
base letters of u, the signed surgeries of the product W.u.  Composition is the
corresponding Wick sum over partial pairings of the stars of the left symbol
with the base letters of the right one.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

from .paths import NCPoly, Path, _add_into
from .perm import Permutation, reorder_sign
from .quiver import Quiver, mask_dot
from .wheels import (
    Key,
    Raw,
    WheelElement,
    WheelError,
    block_swap,
    canonicalize,
    closure,
    contract,
    key_grade,
    key_stars,
    product_raw,
    raw_from_key,
    surgery,
    wheel_act,
    wheel_product,
)


def _pairings(
    q: Quiver, raw: Raw, star_ids: Sequence[int], target_ids: set[int], *, injective_all: bool
) -> Iterator[tuple[Raw, int]]:
    """Sequential surgeries pairing star letters with matching base letters in target_ids.

    With injective_all every star must be paired; otherwise any subset may be.
    """
    if not star_ids:
        yield raw, 1
        return
    sid, rest = star_ids[0], star_ids[1:]
    if not injective_all:
        yield from _pairings(q, raw, rest, target_ids, injective_all=False)
    sa = next(a for i, a in raw.flat() if i == sid)
    base = q.arrows[sa].base
    for bid, ba in raw.flat():
        if bid in target_ids and q.strata[ba] == "base" and q.arrows[ba].base == base:
            new, s = surgery(q, raw, sid, bid)
            for fin, s2 in _pairings(q, new, rest, target_ids - {bid}, injective_all=injective_all):
                yield fin, s * s2


def _wick(w1: WheelElement, w2: WheelElement, *, all_stars: bool) -> WheelElement:
    w1._check(w2)
    q = w1.quiver
    out: dict[Key, Fraction] = {}
    for k1, c1 in w1.terms.items():
        r1 = raw_from_key(k1)
        n1 = len(r1.flat())
        stars = [i for i, a in r1.flat() if q.strata[a] == "star"]
        for k2, c2 in w2.terms.items():
            raw, s0 = product_raw(r1, raw_from_key(k2), q)
            targets = {i for i, _ in raw.flat() if i >= n1}
            for fin, s in _pairings(q, raw, stars, targets, injective_all=all_stars):
                got = canonicalize(q, fin)
                if got is None:
                    continue
                key, s2 = got
                _add_into(out, key, c1 * c2 * s0 * s * s2)
    return w1._new(out)


@dataclass(frozen=True)
class WheeledDiffOp:
    """A wheeled differential operator given by its normal-ordered symbol."""

    symbol: WheelElement

    def __post_init__(self) -> None:
        if self.symbol.quiver.star_parity:
            raise WheelError("differential operators on F(A) use the even regime (star_parity 0)")

    @property
    def quiver(self) -> Quiver:
        return self.symbol.quiver

    @classmethod
    def multiplier(cls, w: WheelElement) -> "WheeledDiffOp":
        if any(key_stars(w.quiver, k) for k in w.terms):
            raise WheelError("a multiplier must not contain star letters")
        return cls(w)

    @classmethod
    def identity(cls, q: Quiver) -> "WheeledDiffOp":
        return cls(WheelElement.scalar(q, 1))

    @classmethod
    def theta(cls, xi: WheelElement) -> "WheeledDiffOp":
        """theta_xi for a double derivation xi in F_1."""
        return cls(xi)

    @property
    def order(self) -> int:
        q = self.quiver
        return max((key_stars(q, k) for k in self.symbol.terms), default=0)

    @property
    def shift(self) -> int:
        """Wheel degree added to the argument."""
        return self.symbol.degree

    def __call__(self, u: WheelElement) -> WheelElement:
        return apply_op(self, u)

    def __add__(self, other: "WheeledDiffOp") -> "WheeledDiffOp":
        return WheeledDiffOp(self.symbol + other.symbol)

    def __sub__(self, other: "WheeledDiffOp") -> "WheeledDiffOp":
        return WheeledDiffOp(self.symbol - other.symbol)

    def __neg__(self) -> "WheeledDiffOp":
        return WheeledDiffOp(-self.symbol)

    def scale(self, c) -> "WheeledDiffOp":
        return WheeledDiffOp(self.symbol.scale(c))

    def __matmul__(self, other: "WheeledDiffOp") -> "WheeledDiffOp":
        return compose_ops(self, other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WheeledDiffOp) and self.symbol == other.symbol

    def __hash__(self) -> int:
        return hash(self.symbol)

    def __str__(self) -> str:
        return f"Op({self.symbol})"

    def order_part(self, n: int) -> WheelElement:
        q = self.quiver
        return self.symbol.part(lambda k: key_stars(q, k) == n)


def apply_op(op: WheeledDiffOp, u: WheelElement) -> WheelElement:
    return _wick(op.symbol, u, all_stars=True)


def compose_ops(d1: WheeledDiffOp, d2: WheeledDiffOp) -> WheeledDiffOp:
    """The normal-ordered symbol of d1 o d2."""
    return WheeledDiffOp(_wick(d1.symbol, d2.symbol, all_stars=False))


def _op_parity(op: WheeledDiffOp) -> int:
    q = op.quiver
    gs = {key_grade(q, k) for k in op.symbol.terms}
    if len(gs) > 1:
        raise WheelError("operator is not homogeneous")
    g = gs.pop() if gs else 0
    return mask_dot(g, g)


def commutator(d1: WheeledDiffOp, d2: WheeledDiffOp) -> WheeledDiffOp:
    """Twisted commutator d1 d2 - (-1)^{|d1||d2|} (12)^{k2,k1} d2 d1."""
    if not d1.symbol or not d2.symbol:
        return WheeledDiffOp(WheelElement(d1.quiver))
    k1, k2 = d1.shift, d2.shift
    s = -1 if (_op_parity(d1) and _op_parity(d2)) else 1
    sw = block_swap(k2, k1)
    back = wheel_act(sw, sw, compose_ops(d2, d1).symbol)
    return WheeledDiffOp(compose_ops(d1, d2).symbol - back.scale(s))


# --------------------------------------------------------------------------
# Principal symbols
# --------------------------------------------------------------------------
def _grade(u: WheelElement) -> int:
    q = u.quiver
    gs = {key_grade(q, k) for k in u.terms}
    if len(gs) > 1:
        raise WheelError("principal symbol arguments must be homogeneous")
    return gs.pop() if gs else 0


def principal_symbol(
    op: Callable[[WheelElement], WheelElement],
    args: Sequence[WheelElement],
) -> WheelElement:
    """Gamma_n(D)(a_1, ..., a_n) by the inclusion-exclusion formula.

    Gamma_n(D)(a) = sum over I of (-1)^{n-|I|} eps_I sigma_I (D(a_I) . a_{I^c}),
    where sigma_I puts the wheel labels back in the order of a_1, ..., a_n and
    eps_I is the Koszul sign of reordering the a_i.  For n = 2 this is
    D(ab) - D(a)b - (-1)^{|a|} a D(b).
    """
    n = len(args)
    if n == 0:
        raise WheelError("need at least one argument")
    q = args[0].quiver
    sizes = [a.degree for a in args]
    grades = [_grade(a) for a in args]
    out = WheelElement(q)
    for r in range(n + 1):
        for I in combinations(range(n), r):
            Ic = [i for i in range(n) if i not in I]
            inside = WheelElement.scalar(q, 1)
            for i in I:
                inside = wheel_product(inside, args[i])
            term = op(inside)
            if not term:
                continue
            for i in Ic:
                term = wheel_product(term, args[i])
            order = list(I) + Ic
            s = reorder_sign([order.index(i) for i in range(n)], [_par(g) for g in grades])
            # labels added by D form a leading block that stays in front
            shift = term.degree - sum(sizes)
            blocks = [shift] + [sizes[i] for i in order]
            back = [0] + [order.index(k) + 1 for k in range(n)]
            term = wheel_act(*(Permutation.block(blocks, back),) * 2, term)
            sgn = s * (-1 if (n - r) % 2 else 1)
            out = out + term.scale(sgn)
    return out


def _par(g: int) -> int:
    return mask_dot(g, g)


# --------------------------------------------------------------------------
# The twisted shadow on T_k V
# --------------------------------------------------------------------------
TWord = tuple[str, ...]
TElem = dict[TWord, Fraction]


def _tadd(d: TElem, w: TWord, c: Fraction) -> None:
    _add_into(d, w, c)


def t_lambda(v: Mapping[str, Fraction]) -> Callable[[TElem], TElem]:
    """Multiplication by v in V on the left of T(V)."""

    def f(u: TElem) -> TElem:
        out: TElem = {}
        for w, c in u.items():
            for a, d in v.items():
                _tadd(out, (a,) + w, c * d)
        return out

    return f


def t_derivation(phi: Mapping[str, Mapping[str, Fraction]]) -> Callable[[TElem], TElem]:
    """D_phi for phi in End(V), acting on each tensor factor."""

    def f(u: TElem) -> TElem:
        out: TElem = {}
        for w, c in u.items():
            for i, a in enumerate(w):
                for b, d in phi.get(a, {}).items():
                    _tadd(out, w[:i] + (b,) + w[i + 1 :], c * d)
        return out

    return f


def t_swap12(u: TElem) -> TElem:
    out: TElem = {}
    for w, c in u.items():
        _tadd(out, (w[1], w[0]) + w[2:] if len(w) >= 2 else w, c)
    return out


def t_commutator(a, b, shift_a: int, shift_b: int) -> Callable[[TElem], TElem]:
    """Twisted commutator of operators raising tensor degree by shift_a, shift_b (each 0 or 1)."""

    def f(u: TElem) -> TElem:
        ab = a(b(u))
        ba = b(a(u))
        if shift_a and shift_b:
            ba = t_swap12(ba)
        out = dict(ab)
        for w, c in ba.items():
            _tadd(out, w, -c)
        return out

    return f


def phi_bracket(phi, psi) -> dict[str, dict[str, Fraction]]:
    """[phi, psi] = phi psi - psi phi in End(V); phi(a) = sum phi[a][b] b."""
    keys = set(phi) | set(psi) | {b for m in (phi, psi) for v in m.values() for b in v}
    out: dict[str, dict[str, Fraction]] = {}
    for a in keys:
        row: dict[str, Fraction] = {}
        for b, c in psi.get(a, {}).items():
            for d, e in phi.get(b, {}).items():
                _add_into(row, d, c * e)
        for b, c in phi.get(a, {}).items():
            for d, e in psi.get(b, {}).items():
                _add_into(row, d, -c * e)
        if row:
            out[a] = row
    return out


def apply_phi(phi, v: Mapping[str, Fraction]) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for a, c in v.items():
        for b, d in phi.get(a, {}).items():
            _add_into(out, b, c * d)
    return out


def groth2_apply(ds: Sequence[Mapping[int, NCPoly]], w: Path, q: Quiver) -> NCPoly:
    """Sum over i_1 < ... < i_m of D_1 applied at letter i_1, ..., D_m at letter i_m.

    Each D_k is given on generators (arrow index -> NCPoly); a letter without a
    value is sent to zero.
    """
    m = len(ds)
    out = NCPoly(q)
    word = w.word
    for pos in combinations(range(len(word)), m):
        acc = NCPoly(q, {Path(w.tail, w.tail, ()): 1})
        prev = 0
        ok = True
        for k, i in enumerate(pos):
            if i > prev:
                acc = acc * NCPoly(q, {Path(q.tails[word[prev]], q.heads[word[i - 1]], word[prev:i]): 1})
            val = ds[k].get(word[i])
            if not val:
                ok = False
                break
            acc = acc * val
            prev = i + 1
        if not ok:
            continue
        if prev < len(word):
            acc = acc * NCPoly(q, {Path(q.tails[word[prev]], w.head, word[prev:]): 1})
        out = out + acc
    return out


# --------------------------------------------------------------------------
# Weil elements
# --------------------------------------------------------------------------
def _letter(q: Quiver, a: int) -> WheelElement:
    return WheelElement.from_path(q, Path(q.tails[a], q.heads[a], (a,)))


def weil_element(c: WheelElement) -> WheeledDiffOp:
    """Symmetrized operator of a quadratic necklace [ab].

    Words without star letters, or with two, map to Op([ab]).  A mixed word
    [a b] maps to half the closed-up sum of Op(a) o Op(b) and Op(b) o Op(a).
    """
    q = c.quiver
    out = WheelElement(q)
    for (perm, strands, necks), coeff in c.terms.items():
        if perm or len(necks) != 1 or len(necks[0].word) != 2:
            raise WheelError("weil_element expects a combination of quadratic necklaces")
        a, b = necks[0].word
        stars = sum(1 for x in (a, b) if q.strata[x] == "star")
        neck = WheelElement.necklace(q, necks[0])
        if stars != 1:
            out = out + neck.scale(coeff)
            continue
        A, B = WheeledDiffOp(_letter(q, a)), WheeledDiffOp(_letter(q, b))
        ab = closure(contract(compose_ops(A, B).symbol, 1, 2))
        ba = closure(contract(compose_ops(B, A).symbol, 1, 2))
        # ab is [ab] plus lower terms; rescale so the leading term is `neck`
        lead = closure(contract(_letter(q, a) * _letter(q, b), 1, 2))
        ratio = _ratio(neck, lead)
        out = out + (ab + ba).scale(coeff * ratio / 2)
    return WheeledDiffOp(out)


def _ratio(u: WheelElement, v: WheelElement) -> Fraction:
    (k, a), = u.terms.items()
    return a / v.terms[k]


# --------------------------------------------------------------------------
# The one-variable Weyl algebra (oracle for the Weil check)
# --------------------------------------------------------------------------
Weyl = dict[tuple[int, int], Fraction]  # (i, j) -> coefficient of x^i d^j


def weyl_mul(a: Weyl, b: Weyl) -> Weyl:
    """Product of normal-ordered symbols: d^j x^k = sum_l C(j,l) k!/(k-l)! x^{k-l} d^{j-l}."""
    out: Weyl = {}
    for (i, j), c in a.items():
        for (k, m), d in b.items():
            for l in range(min(j, k) + 1):
                coef = comb(j, l) * factorial(k) // factorial(k - l)
                _add_into(out, (i + k - l, j - l + m), c * d * coef)
    return out


def weyl_commutator(a: Weyl, b: Weyl) -> Weyl:
    out = dict(weyl_mul(a, b))
    for k, c in weyl_mul(b, a).items():
        _add_into(out, k, -c)
    return out


def sp2_triple() -> dict[str, Weyl]:
    """e = x^2, f = d^2, h = (x d + d x)/2 in the Weyl algebra."""
    half = Fraction(1, 2)
    return {"e": {(2, 0): Fraction(1)}, "f": {(0, 2): Fraction(1)}, "h": {(1, 1): Fraction(1), (0, 0): half}}


def weyl_to_wheel(q: Quiver, a: Weyl) -> WheelElement:
    """Normal-ordered symbol x^i d^j -> necklace [x^i (x*)^j]; the constant 1 -> rk = [e_v]^2.

    Only the monomials of total degree 2 and the constant are supported
    (one-loop quiver).
    """
    x = q.arrow("x").index
    xs = q.star("x")
    v = q.vertices[0]
    ev = WheelElement.necklace(q, Path(v, v, ()))
    out = WheelElement(q)
    for (i, j), c in a.items():
        if (i, j) == (0, 0):
            out = out + (ev * ev).scale(c)
        elif i + j == 2:
            out = out + WheelElement.necklace(q, Path(v, v, (x,) * i + (xs,) * j), c)
        else:
            raise WheelError(f"monomial x^{i} d^{j} has no quadratic image")
    return out


def weyl_image(q: Quiver, a: Weyl) -> WheeledDiffOp:
    """The operator whose normal-ordered symbol corresponds to a quadratic Weyl element."""
    return WheeledDiffOp(weyl_to_wheel(q, a))


SP2_WORDS = {"e": ("x", "x"), "f": ("x*", "x*"), "h": ("x", "x*")}


def sp2_weil(q: Quiver) -> dict[str, WheeledDiffOp]:
    """weil([x x]), weil([x* x*]), weil([x x*]) on the one-loop quiver."""
    v = q.vertices[0]
    out = {}
    for name, word in SP2_WORDS.items():
        p = Path(v, v, tuple(q.arrow(a).index for a in word))
        out[name] = weil_element(WheelElement.necklace(q, p))
    return out
