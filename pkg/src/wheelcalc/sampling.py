"""Seeded random generators for paths, wheel elements and connections."""

from __future__ import annotations

import random
from collections.abc import Sequence
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .paths import NCPoly, Path, trivial
from .perm import Permutation
from .quiver import Quiver
from .wheels import WheelElement

if TYPE_CHECKING:
    from .connections import Connection

ALL_STRATA = ("base", "star", "diff")


def random_path(
    rng: random.Random,
    q: Quiver,
    length: int,
    *,
    strata: Sequence[str] = ("base", "star"),
    tail: Optional[str] = None,
) -> Optional[Path]:
    """Uniform random walk of the given length; None if it gets stuck."""
    v = tail if tail is not None else rng.choice(q.vertices)
    start = v
    word = []
    for _ in range(length):
        choices = [a.index for a in q.arrows if a.tail == v and a.stratum in strata]
        if not choices:
            return None
        a = rng.choice(choices)
        word.append(a)
        v = q.heads[a]
    return Path(start, v, tuple(word)) if word else trivial(start)


def random_closed_path(
    rng: random.Random,
    q: Quiver,
    length: int,
    *,
    strata: Sequence[str] = ("base", "star"),
    tries: int = 200,
) -> Optional[Path]:
    for _ in range(tries):
        p = random_path(rng, q, length, strata=strata)
        if p is not None and p.is_closed:
            return p
    return None


def random_coeff(rng: random.Random) -> Fraction:
    c = 0
    while c == 0:
        c = rng.randint(-3, 3)
    return Fraction(c, rng.choice((1, 1, 1, 2)))


def random_ncpoly(
    rng: random.Random, q: Quiver, max_len: int, terms: int = 2, *, strata: Sequence[str] = ("base", "star")
) -> NCPoly:
    out = NCPoly(q)
    for _ in range(terms):
        p = random_path(rng, q, rng.randint(0, max_len), strata=strata)
        if p is not None:
            out = out + NCPoly(q, {p: random_coeff(rng)})
    return out


def random_term(
    rng: random.Random,
    q: Quiver,
    degree: int,
    max_len: int,
    *,
    necks: int = 1,
    strata: Sequence[str] = ("base", "star"),
    lengths: Optional[Sequence[int]] = None,
) -> WheelElement:
    """A single random wheel term of the given wheel degree (possibly zero)."""
    word = []
    for k in range(degree):
        n = lengths[k] if lengths is not None else rng.randint(0, max_len)
        p = None
        while p is None:
            p = random_path(rng, q, n, strata=strata)
        word.append(p)
    cyc = []
    for _ in range(rng.randint(0, necks)):
        p = random_closed_path(rng, q, rng.randint(0, max_len), strata=strata)
        if p is not None:
            cyc.append(p)
    sl = Permutation(rng.sample(range(1, degree + 1), degree))
    sr = Permutation(rng.sample(range(1, degree + 1), degree))
    return WheelElement.from_term(q, random_coeff(rng), sl, sr, word, cyc)


def random_element(
    rng: random.Random,
    q: Quiver,
    degree: int,
    max_len: int,
    terms: int = 2,
    *,
    necks: int = 1,
    strata: Sequence[str] = ("base", "star"),
) -> WheelElement:
    out = WheelElement(q)
    for _ in range(terms):
        out = out + random_term(rng, q, degree, max_len, necks=necks, strata=strata)
    return out


def random_homogeneous(
    rng: random.Random,
    q: Quiver,
    degree: int,
    max_len: int,
    max_stars: int,
    *,
    terms: int = 2,
    necks: int = 1,
) -> WheelElement:
    """Random element whose terms share wheel degree and star count."""
    from .wheels import key_stars

    target = rng.randint(0, max_stars)
    out = WheelElement(q)
    for _ in range(terms * 20):
        t = random_term(rng, q, degree, max_len, necks=necks)
        if t and all(key_stars(q, k) == target for k in t.terms):
            out = out + t
            if len(out) >= terms:
                break
    return out


def connection_basis(q: Quiver, max_len: int = 2):
    """Basis corrections: (side, base arrow, word) for value words of length <= max_len.

    Words have one diff and one star letter plus base letters; endpoints match
    the star of the keyed arrow.
    """
    from .connections import omega_quiver

    qo = omega_quiver(q)
    out = []
    for e in qo.base_arrows:
        star = qo.star(e.index)
        for n in range(2, max_len + 1):
            for word in _words(qo, qo.tails[star], n):
                if qo.heads[word[-1]] != qo.heads[star]:
                    continue
                stars = [k for k, a in enumerate(word) if qo.strata[a] == "star"]
                diffs = [k for k, a in enumerate(word) if qo.strata[a] == "diff"]
                if len(stars) != 1 or len(diffs) != 1:
                    continue
                side = "left" if diffs[0] < stars[0] else "right"
                out.append((side, e.index, word))
    return qo, out


def _words(q: Quiver, v: str, n: int):
    if n == 0:
        yield ()
        return
    for a in q.arrows:
        if a.tail == v:
            for rest in _words(q, a.head, n - 1):
                yield (a.index,) + rest


def connection_from_vector(q: Quiver, basis, vec) -> "Connection":
    from .connections import Connection

    left: dict = {}
    right: dict = {}
    for (side, e, word), c in zip(basis, vec):
        if not c:
            continue
        store = left if side == "left" else right
        p = Path(q.tails[word[0]], q.heads[word[-1]], tuple(word))
        store[e] = store.get(e, NCPoly(q)) + NCPoly(q, {p: c})
    return Connection(q, {k: v for k, v in left.items() if v}, {k: v for k, v in right.items() if v})


def random_connection(rng: random.Random, q: Quiver, max_len: int = 2, density: float = 0.5) -> "Connection":
    qo, basis = connection_basis(q, max_len)
    vec = [random_coeff(rng) if rng.random() < density else 0 for _ in basis]
    return connection_from_vector(qo, basis, vec)


def _linear_kernel(rows_of: list[WheelElement]) -> list[list[Fraction]]:
    """Exact nullspace of the linear map sending basis vector i to rows_of[i]."""
    import sympy

    keys = sorted({k for w in rows_of for k in w.terms}, key=repr)
    index = {k: r for r, k in enumerate(keys)}
    mat = sympy.zeros(len(keys), len(rows_of))
    for col, w in enumerate(rows_of):
        for k, c in w.terms.items():
            mat[index[k], col] = sympy.Rational(c.numerator, c.denominator)
    if not keys:
        return [[Fraction(int(i == j)) for j in range(len(rows_of))] for i in range(len(rows_of))]
    out = []
    for v in mat.nullspace():
        out.append([Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in v])
    return out


def constrained_connections(q: Quiver, max_len: int = 2, *, with_divergence: bool = False):
    """Basis of connection corrections that are torsion-free (and optionally divergence-free).

    Returns (omega quiver, basis words, list of coefficient vectors).
    """
    from .connections import divergence, torsion

    qo, basis = connection_basis(q, max_len)
    images = []
    for i in range(len(basis)):
        vec = [Fraction(int(i == j)) for j in range(len(basis))]
        conn = connection_from_vector(qo, basis, vec)
        img = _tag(torsion(conn), "t")
        if with_divergence:
            for name, d in sorted(divergence(conn).items()):
                img = img + _tag(d, "d:" + name)
        images.append(img)
    return qo, basis, _linear_kernel(images)


def _tag(w: WheelElement, tag: str) -> WheelElement:
    """Prefix keys so that components of different maps do not collide."""
    out = WheelElement(w.quiver)
    out.terms = {(tag,) + k: c for k, c in w.terms.items()}
    return out


def random_torsion_free(rng: random.Random, q: Quiver, max_len: int = 2, _cache: dict = {}) -> "Connection":
    key = (q.signature(), max_len)
    if key not in _cache:
        _cache[key] = constrained_connections(q, max_len)
    qo, basis, kernel = _cache[key]
    vec = [Fraction(0)] * len(basis)
    for v in kernel:
        c = random_coeff(rng) if rng.random() < 0.6 else 0
        vec = [a + c * b for a, b in zip(vec, v)]
    return connection_from_vector(qo, basis, vec)
