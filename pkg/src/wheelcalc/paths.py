"""Paths, exact path-algebra elements, tensor powers and cyclic words."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .quiver import Quiver, QuiverError, mask_dot

Scalar = Fraction
Number = Union[int, Fraction]


class Path(NamedTuple):
    """A path in a quiver: trivial (empty word, tail == head) or a composable word.

    Letters are arrow indices of the owning quiver.
    """

    tail: str
    head: str
    word: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not self.word

    @property
    def is_closed(self) -> bool:
        return self.tail == self.head


def trivial(v: str) -> Path:
    return Path(v, v, ())


def make_path(q: Quiver, letters: Iterable[int | str], tail: Optional[str] = None) -> Path:
    word = tuple(q.arrow(a).index if isinstance(a, str) else int(a) for a in letters)
    if not word:
        if tail is None:
            raise QuiverError("a trivial path needs its vertex")
        return trivial(tail)
    for a, b in zip(word, word[1:]):
        if q.heads[a] != q.tails[b]:
            raise QuiverError(
                f"arrows {q.arrows[a].name} and {q.arrows[b].name} are not composable"
            )
    return Path(q.tails[word[0]], q.heads[word[-1]], word)


def path_grade(q: Quiver, p: Path) -> int:
    g = 0
    for a in p.word:
        g ^= q.grades[a]
    return g


def bidegree(q: Quiver, p: Path) -> tuple[int, int]:
    """(number of star arrows, -number of diff arrows)."""
    s = sum(1 for a in p.word if q.strata[a] == "star")
    d = sum(1 for a in p.word if q.strata[a] == "diff")
    return (s, -d)


def path_compose(p: Path, q: Path) -> Optional[Path]:
    """pq (first p, then q), or None when head(p) != tail(q)."""
    if p.head != q.tail:
        return None
    return Path(p.tail, q.head, p.word + q.word)


def path_str(q: Quiver, p: Path) -> str:
    if not p.word:
        return f"e_{p.tail}"
    return " ".join(q.arrows[a].name for a in p.word)


def _frac(c: Number) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


def _add_into(d: dict, key, c: Fraction) -> None:
    v = d.get(key, 0) + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


# --------------------------------------------------------------------------
# NCPoly
# --------------------------------------------------------------------------
class NCPoly:
    """Finitely supported exact-rational combination of paths."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Optional[Mapping[Path, Number]] = None):
        self.quiver = quiver
        self.terms: dict[Path, Fraction] = {}
        if terms:
            for p, c in terms.items():
                _add_into(self.terms, p, _frac(c))

    @classmethod
    def from_path(cls, q: Quiver, p: Path, c: Number = 1) -> "NCPoly":
        return cls(q, {p: c})

    @classmethod
    def word(cls, q: Quiver, letters: Iterable[int | str], c: Number = 1, tail: Optional[str] = None) -> "NCPoly":
        return cls(q, {make_path(q, letters, tail): c})

    @classmethod
    def one(cls, q: Quiver) -> "NCPoly":
        return cls(q, {trivial(v): 1 for v in q.vertices})

    @classmethod
    def zero(cls, q: Quiver) -> "NCPoly":
        return cls(q)

    def _check(self, other: "NCPoly") -> None:
        if self.quiver != other.quiver:
            raise QuiverError("quiver mismatch")

    def __iter__(self) -> Iterator[tuple[Path, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            _add_into(out, p, c)
        res = NCPoly(self.quiver)
        res.terms = out
        return res

    def __neg__(self) -> "NCPoly":
        res = NCPoly(self.quiver)
        res.terms = {p: -c for p, c in self.terms.items()}
        return res

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, c: Number) -> "NCPoly":
        c = _frac(c)
        res = NCPoly(self.quiver)
        if c:
            res.terms = {p: c * v for p, v in self.terms.items()}
        return res

    def __rmul__(self, c: Number) -> "NCPoly":
        return self.scale(c)

    def __mul__(self, other: Union["NCPoly", Number]) -> "NCPoly":
        if not isinstance(other, NCPoly):
            return self.scale(other)
        return ncpoly_mul(self, other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NCPoly) and self.quiver == other.quiver and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"NCPoly({self})"

    def __str__(self) -> str:
        return format_sum(
            [(c, path_str(self.quiver, p)) for p, c in sorted(self.terms.items(), key=lambda t: _path_key(t[0]))]
        )

    def homogeneous_parts(self) -> dict[tuple[int, int], "NCPoly"]:
        out: dict[tuple[int, int], NCPoly] = {}
        for p, c in self.terms.items():
            out.setdefault(bidegree(self.quiver, p), NCPoly(self.quiver)).terms[p] = c
        return out


def _path_key(p: Path) -> tuple:
    return (len(p.word), p.word, p.tail, p.head)


def ncpoly_mul(f: NCPoly, g: NCPoly) -> NCPoly:
    f._check(g)
    out: dict[Path, Fraction] = {}
    for p, a in f.terms.items():
        for q, b in g.terms.items():
            r = path_compose(p, q)
            if r is not None:
                _add_into(out, r, a * b)
    res = NCPoly(f.quiver)
    res.terms = out
    return res


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_sum(items: list[tuple[Fraction, str]]) -> str:
    """Render sum of c * body; bodies are already strings."""
    if not items:
        return "0"
    parts = []
    for k, (c, body) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        piece = body if a == 1 else f"{format_coeff(a)} * {body}"
        if k == 0:
            parts.append(("-" if neg else "") + piece)
        else:
            parts.append((" - " if neg else " + ") + piece)
    return "".join(parts)


# --------------------------------------------------------------------------
# Cyclic words
# --------------------------------------------------------------------------
def _min_rotation(word: tuple[int, ...]) -> int:
    """Smallest index r such that word[r:] + word[:r] is lexicographically minimal."""
    n = len(word)
    best = 0
    for r in range(1, n):
        for k in range(n):
            a = word[(r + k) % n]
            b = word[(best + k) % n]
            if a != b:
                if a < b:
                    best = r
                break
    return best


def rotation_sign(q: Quiver, word: tuple[int, ...], r: int) -> int:
    """Koszul sign of [w] = sign * [w[r:] w[:r]] (moving the prefix to the end)."""
    g1 = 0
    for a in word[:r]:
        g1 ^= q.grades[a]
    g2 = 0
    for a in word[r:]:
        g2 ^= q.grades[a]
    return -1 if mask_dot(g1, g2) else 1


def cyclic_normalize(q: Quiver, p: Path) -> tuple[Path, int]:
    """Canonical representative of [p] in A_cyc and the sign relating them.

    Returns (c, s) with [p] = s [c].  s == 0 means the class vanishes: the word
    is odd-periodic so that [w] = -[w].  Raises on an open path.
    """
    if not p.is_closed:
        raise QuiverError("cyclic_normalize needs a closed path")
    w = p.word
    if not w:
        return p, 1
    n = len(w)
    r = _min_rotation(w)
    s = rotation_sign(q, w, r)
    canon = w[r:] + w[:r]
    # smallest period of the canonical word
    for per in range(1, n):
        if n % per == 0 and canon[per:] + canon[:per] == canon:
            if rotation_sign(q, canon, per) < 0:
                return Path(q.tails[canon[0]], q.tails[canon[0]], canon), 0
            break
    v = q.tails[canon[0]]
    return Path(v, v, canon), s


# --------------------------------------------------------------------------
# Tensor powers A^{(x) n}
# --------------------------------------------------------------------------
class Tensor:
    """Exact combination of n-fold tensors of paths (elements of A^{(x) n})."""

    __slots__ = ("quiver", "arity", "terms")

    def __init__(self, quiver: Quiver, arity: int, terms: Optional[Mapping[tuple[Path, ...], Number]] = None):
        self.quiver = quiver
        self.arity = arity
        self.terms: dict[tuple[Path, ...], Fraction] = {}
        if terms:
            for k, c in terms.items():
                if len(k) != arity:
                    raise ValueError("tensor arity mismatch")
                _add_into(self.terms, tuple(k), _frac(c))

    @classmethod
    def pure(cls, q: Quiver, *factors: NCPoly) -> "Tensor":
        out = cls(q, len(factors))
        acc: dict[tuple[Path, ...], Fraction] = {(): Fraction(1)}
        for f in factors:
            nxt: dict[tuple[Path, ...], Fraction] = {}
            for k, c in acc.items():
                for p, d in f.terms.items():
                    _add_into(nxt, k + (p,), c * d)
            acc = nxt
        out.terms = acc
        return out

    def _check(self, other: "Tensor") -> None:
        if self.quiver != other.quiver or self.arity != other.arity:
            raise ValueError("tensor mismatch")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        res = Tensor(self.quiver, self.arity)
        res.terms = out
        return res

    def __neg__(self) -> "Tensor":
        res = Tensor(self.quiver, self.arity)
        res.terms = {k: -c for k, c in self.terms.items()}
        return res

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def scale(self, c: Number) -> "Tensor":
        c = _frac(c)
        res = Tensor(self.quiver, self.arity)
        if c:
            res.terms = {k: c * v for k, v in self.terms.items()}
        return res

    def __rmul__(self, c: Number) -> "Tensor":
        return self.scale(c)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Tensor)
            and self.quiver == other.quiver
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"Tensor({self})"

    def __str__(self) -> str:
        q = self.quiver
        items = sorted(self.terms.items(), key=lambda t: tuple(_path_key(p) for p in t[0]))
        return format_sum([(c, " # ".join(path_str(q, p) for p in k)) for k, c in items])

    def map_terms(self, fn) -> "Tensor":
        """Apply fn(key, coeff) -> iterable of (key, coeff) and collect."""
        out: dict[tuple[Path, ...], Fraction] = {}
        arity = None
        for k, c in self.terms.items():
            for k2, c2 in fn(k, c):
                arity = len(k2)
                _add_into(out, k2, c2)
        res = Tensor(self.quiver, self.arity if arity is None else arity)
        res.terms = out
        return res

    def permute(self, sigma) -> "Tensor":
        """Signed braiding tau_sigma: factor i moves to slot sigma(i)."""
        q = self.quiver

        def fn(k, c):
            grades = [path_grade(q, p) for p in k]
            targets = [sigma(i + 1) for i in range(len(k))]
            s = 1
            for i in range(len(k)):
                for j in range(i + 1, len(k)):
                    if targets[j] < targets[i] and mask_dot(grades[i], grades[j]):
                        s = -s
            new = [None] * len(k)
            for i, p in enumerate(k):
                new[targets[i] - 1] = p
            yield tuple(new), s * c

        return self.map_terms(fn)

    def outer(self, left: NCPoly, right: NCPoly) -> "Tensor":
        """left * (x' (x) ... (x) x'') * right on the first and last factors."""

        def fn(k, c):
            for a, ca in left.terms.items():
                first = path_compose(a, k[0])
                if first is None:
                    continue
                mid = (first,) + k[1:]
                for b, cb in right.terms.items():
                    last = path_compose(mid[-1], b)
                    if last is not None:
                        yield mid[:-1] + (last,), c * ca * cb

        return self.map_terms(fn)

    def inner(self, left: NCPoly, right: NCPoly) -> "Tensor":
        """Inner action on A (x) A: a * (x' (x) x'') * b = (-1)^{...} x' b (x) a x''."""
        if self.arity != 2:
            raise ValueError("inner action needs arity 2")
        q = self.quiver

        def fn(k, c):
            x1, x2 = k
            g1, g2 = path_grade(q, x1), path_grade(q, x2)
            for a, ca in left.terms.items():
                t2 = path_compose(a, x2)
                if t2 is None:
                    continue
                ga = path_grade(q, a)
                for b, cb in right.terms.items():
                    t1 = path_compose(x1, b)
                    if t1 is None:
                        continue
                    gb = path_grade(q, b)
                    s = mask_dot(ga, g1 ^ gb) ^ mask_dot(g2, gb)
                    yield (t1, t2), (-c if s else c) * ca * cb

        return self.map_terms(fn)
