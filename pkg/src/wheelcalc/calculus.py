"""Double derivations, double and wheeled brackets, and the necklace Lie bialgebra.

All pairings between a star letter e* and a base letter e are computed by the
surgery of :mod:`wheelcalc.wheels`.  In the odd regime (star parity 1) every
sign is a Koszul sign; in the even regime the letters are all even and the
orientation of each pairing supplies the sign instead.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from fractions import Fraction
from typing import Optional

from .paths import NCPoly, Path, Tensor, _add_into, cyclic_normalize, path_compose
from .perm import Permutation
from .quiver import Quiver, mask_dot
from .wheels import (
    Key,
    Raw,
    WheelElement,
    WheelError,
    canonicalize,
    key_grade,
    product_raw,
    raw_from_key,
    surgery,
    to_tensor,
    wheel_act,
)


def _parity(q: Quiver, g: int) -> int:
    return mask_dot(g, g)


def _partners(q: Quiver, s_arrow: int, strata: tuple[str, ...] = ("base",)) -> set[int]:
    base = q.arrows[s_arrow].base
    out = set()
    for a in q.arrows:
        if a.base == base and a.stratum in strata:
            out.add(a.index)
    return out


def _is_star(q: Quiver, a: int) -> bool:
    return q.strata[a] == "star"


def star_pairs(
    q: Quiver, raw: Raw, partner_strata: tuple[str, ...] = ("base",)
) -> Iterator[tuple[int, int]]:
    """All (star id, partner id) pairs of letters in a raw term."""
    flat = raw.flat()
    for sid, sa in flat:
        if not _is_star(q, sa):
            continue
        partners = _partners(q, sa, partner_strata)
        for bid, ba in flat:
            if ba in partners:
                yield sid, bid


# --------------------------------------------------------------------------
# Double derivations on A
# --------------------------------------------------------------------------
def apply_double_derivation(xi: NCPoly, f: NCPoly | Path) -> Tensor:
    """xi(f) for xi = sum c * (a e* b): the Sweedler sum of (p1 b) (x) (a p2) over p = p1 e p2."""
    q = xi.quiver
    if isinstance(f, Path):
        f = NCPoly(q, {f: 1})
    out = Tensor(q, 2)
    for w, c in xi.terms.items():
        stars = [k for k, a in enumerate(w.word) if _is_star(q, a)]
        if len(stars) != 1:
            raise WheelError("a double derivation word needs exactly one star arrow")
        k = stars[0]
        e_star = w.word[k]
        a = Path(w.tail, q.tails[e_star], w.word[:k])
        b = Path(q.heads[e_star], w.head, w.word[k + 1 :])
        e = q.base_index(e_star)
        for p, d in f.terms.items():
            for j, letter in enumerate(p.word):
                if letter != e:
                    continue
                p1 = Path(p.tail, q.tails[letter], p.word[:j])
                p2 = Path(q.heads[letter], p.head, p.word[j + 1 :])
                left = path_compose(p1, b)
                right = path_compose(a, p2)
                if left is not None and right is not None:
                    _add_into(out.terms, (left, right), c * d)
    return out


# --------------------------------------------------------------------------
# Wheeled bracket
# --------------------------------------------------------------------------
def _cross_sum(
    u: WheelElement,
    v: WheelElement,
    weight,
    partner_strata: tuple[str, ...] = ("base",),
) -> WheelElement:
    """Sum over letter pairs split between u and v of weight * (signed surgery on u.v).

    ``weight(grade_u, star_in_u)`` returns the extra scalar for the pairing.
    """
    u._check(v)
    q = u.quiver
    out: dict[Key, Fraction] = {}
    for k1, c1 in u.terms.items():
        r1 = raw_from_key(k1)
        n1 = len(r1.flat())
        g1 = key_grade(q, k1)
        for k2, c2 in v.terms.items():
            raw, s0 = product_raw(r1, raw_from_key(k2), q)
            flat = raw.flat()
            for sid, sa in flat:
                if not _is_star(q, sa):
                    continue
                partners = _partners(q, sa, partner_strata)
                s_in_u = sid < n1
                for bid, ba in flat:
                    if ba not in partners or (bid < n1) == s_in_u:
                        continue
                    w = weight(g1, s_in_u)
                    if not w:
                        continue
                    new, s1 = surgery(q, raw, sid, bid)
                    got = canonicalize(q, new)
                    if got is None:
                        continue
                    key, s2 = got
                    _add_into(out, key, c1 * c2 * s0 * s1 * s2 * w)
    return u._new(out)


def wheeled_bracket(u: WheelElement, v: WheelElement) -> WheelElement:
    """The Lie-wheelgebra bracket on F(P_{Qbar}) extending {f, g} = (12){{f, g}}."""
    q = u.quiver
    if q.star_parity:
        return _cross_sum(u, v, lambda g1, s_in_u: -1 if _parity(q, g1) == 0 else 1)
    return _cross_sum(u, v, lambda g1, s_in_u: 1 if s_in_u else -1)


def double_bracket(f: NCPoly, g: NCPoly) -> Tensor:
    """{{f, g}} in A (x) A, read off from the wheeled bracket of f, g in F_1."""
    q = f.quiver
    w = wheeled_bracket(WheelElement.from_ncpoly(f), WheelElement.from_ncpoly(g))
    if not w:
        return Tensor(q, 2)
    swap = Permutation((2, 1))
    return to_tensor(wheel_act(swap, Permutation.identity(2), w))


def bracket_generators(q: Quiver, a: int, b: int) -> Tensor:
    """{{a, b}} for single arrows: the defining values on generators."""
    return double_bracket(NCPoly.word(q, [a]), NCPoly.word(q, [b]))


# --------------------------------------------------------------------------
# Necklaces
# --------------------------------------------------------------------------
def necklace(q: Quiver, p: Path | Iterable) -> WheelElement:
    if not isinstance(p, Path):
        from .paths import make_path

        p = make_path(q, p)
    return WheelElement.necklace(q, p)


def _necklace_orientation(q: Quiver):
    """Pairing weight of the necklace bracket: + when e lies in the first argument."""
    if q.star_parity:
        return lambda g1, s_in_u: 1 if _parity(q, g1) == 0 else -1
    return lambda g1, s_in_u: -1 if s_in_u else 1


def necklace_bracket(c1: WheelElement, c2: WheelElement) -> WheelElement:
    """Bracket of F_0 elements: glue the necklaces along every (e, e*) pair.

    This is the negative of the degree-0 wheeled bracket.
    """
    for c in (c1, c2):
        if c and c.degrees() != {0}:
            raise WheelError("necklace bracket takes F_0 elements")
    return -wheeled_bracket(c1, c2)


# Elements of A_cyc (x) A_cyc are stored as tensors of canonical cyclic words.
def _cyc_pair(q: Quiver, x: Path, y: Path) -> Optional[tuple[tuple[Path, Path], int]]:
    cx, sx = cyclic_normalize(q, x)
    cy, sy = cyclic_normalize(q, y)
    if not sx or not sy:
        return None
    return (cx, cy), sx * sy


def _rest_path(q: Quiver, vertex: str, letters) -> Path:
    word = tuple(a for _, a in letters)
    if not word:
        return Path(vertex, vertex, ())
    return Path(q.tails[word[0]], q.heads[word[-1]], word)


def necklace_cobracket(c: WheelElement) -> Tensor:
    """delta on F_0 terms with a single necklace, as an antisymmetric element of A_cyc (x) A_cyc.

    For every internal (e, e*) pair the necklace b X s Y splits into [X] (x) [Y]
    minus the flip.  Implemented for the even regime.
    """
    q = c.quiver
    if q.star_parity:
        raise WheelError("the necklace cobracket is implemented in the even regime")
    out = Tensor(q, 2)
    for k, coeff in c.terms.items():
        perm, strands, necks = k
        if perm or len(necks) != 1:
            raise WheelError("cobracket expects a linear combination of single necklaces")
        w = necks[0].word
        L = len(w)
        for ps, sa in enumerate(w):
            if not _is_star(q, sa):
                continue
            e = q.base_index(sa)
            for pb, ba in enumerate(w):
                if ba != e:
                    continue
                X = [w[(pb + 1 + t) % L] for t in range((ps - pb - 1) % L)]
                Y = [w[(ps + 1 + t) % L] for t in range((pb - ps - 1) % L)]
                px = _path_or_trivial(q, X, q.heads[ba])
                py = _path_or_trivial(q, Y, q.heads[sa])
                got = _cyc_pair(q, px, py)
                if got is None:
                    continue
                (cx, cy), s = got
                _add_into(out.terms, (cx, cy), coeff * s)
                _add_into(out.terms, (cy, cx), -coeff * s)
    return out


def _path_or_trivial(q: Quiver, word, vertex: str) -> Path:
    word = tuple(word)
    if not word:
        return Path(vertex, vertex, ())
    return Path(q.tails[word[0]], q.heads[word[-1]], word)


# --------------------------------------------------------------------------
# Lifts to open words (even regime)
# --------------------------------------------------------------------------
def lifted_bracket(a: NCPoly, c: WheelElement) -> NCPoly:
    """{a, [c]} in A: pair letters of the open word a with letters of the necklace c.

    Uses the necklace orientation, so that closing up the result reproduces the
    necklace bracket of [a] and [c].
    """
    q = a.quiver
    if c and c.degrees() != {0}:
        raise WheelError("second argument must lie in F_0")
    w = _cross_sum(WheelElement.from_ncpoly(a), c, _necklace_orientation(q))
    out = NCPoly(q)
    for (perm, strands, necks), coeff in w.terms.items():
        if necks:
            raise WheelError("lifted bracket expects single-necklace input")
        _add_into(out.terms, strands[0], coeff)
    return out


def lifted_cobracket(a: NCPoly) -> Tensor:
    """delta(a) in A (x) A_cyc for an open word a = s1 X s2 Y s3 over internal pairs.

    Each pair contributes eps * (s1 s3) (x) [s2], eps = +1 if the star letter
    comes first and -1 if the base letter does.  Even regime only.
    """
    q = a.quiver
    if q.star_parity:
        raise WheelError("the lifted cobracket is implemented in the even regime")
    out = Tensor(q, 2)
    for p, coeff in a.terms.items():
        w = p.word
        for ps, sa in enumerate(w):
            if not _is_star(q, sa):
                continue
            e = q.base_index(sa)
            for pb, ba in enumerate(w):
                if ba != e:
                    continue
                i, j = sorted((ps, pb))
                outer = Path(p.tail, p.head, w[:i] + w[j + 1 :])
                inner = _path_or_trivial(q, w[i + 1 : j], q.heads[w[i]])
                cn, s = cyclic_normalize(q, inner)
                if not s:
                    continue
                eps = 1 if ps < pb else -1
                _add_into(out.terms, (outer, cn), coeff * eps * s)
    return out


def cyc_tensor_from_pair(q: Quiver, left: WheelElement, right: WheelElement) -> Tensor:
    """[a] (x) [b] for F_0 elements with one necklace per term."""
    out = Tensor(q, 2)
    for (_, _, n1), c1 in left.terms.items():
        for (_, _, n2), c2 in right.terms.items():
            if len(n1) != 1 or len(n2) != 1:
                raise WheelError("expected single necklaces")
            _add_into(out.terms, (n1[0], n2[0]), c1 * c2)
    return out


def pr(q: Quiver, f: NCPoly) -> WheelElement:
    """The projection A -> A_cyc (open paths map to zero)."""
    out = WheelElement(q)
    for p, c in f.terms.items():
        if p.is_closed:
            out = out + WheelElement.necklace(q, p, c)
    return out
