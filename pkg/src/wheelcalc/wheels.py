"""The commutative wheelgebra F(A) of a (doubled, possibly Omega-extended) path algebra.

A term of wheel degree m is stored as m *strands* and a multiset of *necklaces*.
Strand k carries a path together with an input label (attached at the path's
tail) and an output label (attached at its head); the labels are a pair of
bijections onto {1..m}.  Canonical form orders the strands by output label, so
the right permutation is the identity and the left permutation is read off
from the input labels.  Necklaces are closed paths up to signed rotation.

Every sign in this module is the Koszul sign of a permutation of the letters
of a term: the flat letter order of a term is strands (in stored order)
followed by necklaces.  The wheel operations are implemented as letter
rearrangements and the sign follows from the bigrade masks of the letters.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .paths import (
    NCPoly,
    Number,
    Path,
    Tensor,
    _add_into,
    _frac,
    _min_rotation,
    cyclic_normalize,
    format_coeff,
    format_sum,
    path_str,
)
from .perm import Permutation
from .quiver import Quiver, QuiverError, mask_dot

# (input labels of the strands ordered by output label, strand paths, necklaces)
Key = tuple[tuple[int, ...], tuple[Path, ...], tuple[Path, ...]]


class WheelError(ValueError):
    pass


# --------------------------------------------------------------------------
# Raw terms: letters carry ids so that rearrangements can be signed
# --------------------------------------------------------------------------
Letter = tuple[int, int]  # (id, arrow index)


@dataclass
class Strand:
    inl: int
    outl: int
    tail: str
    head: str
    letters: list[Letter]


@dataclass
class Neck:
    vertex: str
    letters: list[Letter]


@dataclass
class Raw:
    strands: list[Strand] = field(default_factory=list)
    necks: list[Neck] = field(default_factory=list)

    def flat(self) -> list[Letter]:
        out: list[Letter] = []
        for s in self.strands:
            out.extend(s.letters)
        for n in self.necks:
            out.extend(n.letters)
        return out

    def copy(self) -> "Raw":
        return Raw(
            [Strand(s.inl, s.outl, s.tail, s.head, list(s.letters)) for s in self.strands],
            [Neck(n.vertex, list(n.letters)) for n in self.necks],
        )

    def locate(self, lid: int) -> tuple[str, int, int]:
        for k, s in enumerate(self.strands):
            for p, (i, _) in enumerate(s.letters):
                if i == lid:
                    return ("S", k, p)
        for k, n in enumerate(self.necks):
            for p, (i, _) in enumerate(n.letters):
                if i == lid:
                    return ("N", k, p)
        raise KeyError(lid)


def raw_from_key(key: Key, start: int = 0) -> Raw:
    perm, strands, necks = key
    nid = start
    raw = Raw()
    for k, (inl, p) in enumerate(zip(perm, strands)):
        letters = []
        for a in p.word:
            letters.append((nid, a))
            nid += 1
        raw.strands.append(Strand(inl, k + 1, p.tail, p.head, letters))
    for n in necks:
        letters = []
        for a in n.word:
            letters.append((nid, a))
            nid += 1
        raw.necks.append(Neck(n.tail, letters))
    return raw


def letters_sign(q: Quiver, src: Sequence[Letter], dst_ids: Sequence[int]) -> int:
    """Koszul sign of rearranging the letters ``src`` into the id order ``dst_ids``."""
    pos = {i: k for k, i in enumerate(dst_ids)}
    grades = q.grades
    targets = [pos[i] for i, _ in src]
    gs = [grades[a] for _, a in src]
    odd = 0
    n = len(src)
    for i in range(n):
        gi = gs[i]
        if not gi:
            continue
        ti = targets[i]
        for j in range(i + 1, n):
            if targets[j] < ti and mask_dot(gi, gs[j]):
                odd ^= 1
    return -1 if odd else 1


def _word_grade(q: Quiver, word: Iterable[int]) -> int:
    g = 0
    for a in word:
        g ^= q.grades[a]
    return g


def canonicalize(q: Quiver, raw: Raw) -> Optional[tuple[Key, int]]:
    """Canonical key of a raw term and the sign relating them (None if it vanishes)."""
    strands = sorted(raw.strands, key=lambda s: s.outl)
    m = len(strands)
    if [s.outl for s in strands] != list(range(1, m + 1)) or sorted(s.inl for s in strands) != list(
        range(1, m + 1)
    ):
        raise WheelError("strand labels are not a pair of bijections")
    dst: list[int] = []
    spaths = []
    for s in strands:
        word = tuple(a for _, a in s.letters)
        spaths.append(Path(s.tail, s.head, word))
        dst.extend(i for i, _ in s.letters)
    necks = []
    for n in raw.necks:
        word = tuple(a for _, a in n.letters)
        if not word:
            necks.append((Path(n.vertex, n.vertex, ()), []))
            continue
        canon, s = cyclic_normalize(q, Path(q.tails[word[0]], q.tails[word[0]], word))
        if s == 0:
            return None
        r = _min_rotation(word)
        necks.append((canon, n.letters[r:] + n.letters[:r]))
    necks.sort(key=lambda t: (len(t[0].word), t[0].word, t[0].tail))
    for (a, _), (b, _) in zip(necks, necks[1:]):
        if a == b and mask_dot(_word_grade(q, a.word), _word_grade(q, a.word)):
            return None
    for _, letters in necks:
        dst.extend(i for i, _ in letters)
    sign = letters_sign(q, raw.flat(), dst)
    key = (tuple(s.inl for s in strands), tuple(spaths), tuple(p for p, _ in necks))
    return key, sign


# --------------------------------------------------------------------------
# Surgery: delete a (star, partner) letter pair and reconnect crosswise
# --------------------------------------------------------------------------
def _piece_vertex_after(q: Quiver, letter: Letter) -> str:
    return q.heads[letter[1]]


def surgery(q: Quiver, raw: Raw, s_id: int, b_id: int) -> tuple[Raw, int]:
    """Remove letters s (a star arrow e*) and b (its partner e or de) and rewire.

    The piece ending just before b is joined to the piece starting just after
    s, and the piece ending before s to the piece starting after b.  Returns
    the new raw term and the Koszul sign of moving [s, b] to the front.
    """
    ls, ks, ps = raw.locate(s_id)
    lb, kb, pb = raw.locate(b_id)
    new = raw.copy()
    if ls == "S" and lb == "S" and ks != kb:
        A = new.strands[ks]
        B = new.strands[kb]
        p1, p2 = B.letters[:pb], B.letters[pb + 1 :]
        q1, q2 = A.letters[:ps], A.letters[ps + 1 :]
        b_letter = B.letters[pb]
        s_letter = A.letters[ps]
        nb = Strand(B.inl, A.outl, B.tail, A.head, p1 + q2)
        na = Strand(A.inl, B.outl, A.tail, B.head, q1 + p2)
        del b_letter, s_letter
        new.strands[kb] = nb
        new.strands[ks] = na
    elif ls == "S" and lb == "S":
        st = new.strands[ks]
        i, j = sorted((ps, pb))
        x = st.letters[i]
        st_mid = st.letters[i + 1 : j]
        neck = Neck(_piece_vertex_after(q, x), st_mid)
        st.letters = st.letters[:i] + st.letters[j + 1 :]
        new.necks.append(neck)
    elif ls == "N" and lb == "S":
        n = new.necks[ks]
        rest = n.letters[ps + 1 :] + n.letters[:ps]
        B = new.strands[kb]
        B.letters = B.letters[:pb] + rest + B.letters[pb + 1 :]
        del new.necks[ks]
    elif ls == "S" and lb == "N":
        n = new.necks[kb]
        rest = n.letters[pb + 1 :] + n.letters[:pb]
        A = new.strands[ks]
        A.letters = A.letters[:ps] + rest + A.letters[ps + 1 :]
        del new.necks[kb]
    elif ks != kb:
        M = new.necks[kb]
        N = new.necks[ks]
        m = M.letters[pb + 1 :] + M.letters[:pb]
        nn = N.letters[ps + 1 :] + N.letters[:ps]
        b_letter = raw.necks[kb].letters[pb]
        merged = Neck(q.heads[b_letter[1]], m + nn)
        for k in sorted((ks, kb), reverse=True):
            del new.necks[k]
        new.necks.append(merged)
    else:
        n = new.necks[ks]
        L = len(n.letters)
        b_letter = n.letters[pb]
        s_letter = n.letters[ps]
        X = [n.letters[(pb + 1 + t) % L] for t in range((ps - pb - 1) % L)]
        Y = [n.letters[(ps + 1 + t) % L] for t in range((pb - ps - 1) % L)]
        del new.necks[ks]
        new.necks.append(Neck(q.heads[b_letter[1]], X))
        new.necks.append(Neck(q.heads[s_letter[1]], Y))
    sign = letters_sign(q, raw.flat(), [s_id, b_id] + [i for i, _ in new.flat()])
    return new, sign


# --------------------------------------------------------------------------
# WheelElement
# --------------------------------------------------------------------------
class WheelElement:
    """Finite exact-rational sum of canonical wheel terms."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Optional[Mapping[Key, Number]] = None):
        self.quiver = quiver
        self.terms: dict[Key, Fraction] = {}
        if terms:
            for k, c in terms.items():
                _add_into(self.terms, k, _frac(c))

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, q: Quiver) -> "WheelElement":
        return cls(q)

    @classmethod
    def scalar(cls, q: Quiver, c: Number = 1) -> "WheelElement":
        return cls(q, {((), (), ()): c})

    @classmethod
    def from_path(cls, q: Quiver, p: Path, c: Number = 1) -> "WheelElement":
        return cls(q, {((1,), (p,), ()): c})

    @classmethod
    def from_ncpoly(cls, f: NCPoly) -> "WheelElement":
        return cls(f.quiver, {((1,), (p,), ()): c for p, c in f.terms.items()})

    @classmethod
    def unit1(cls, q: Quiver) -> "WheelElement":
        """1 = sum of the vertex idempotents, as an element of F_1."""
        return cls.from_ncpoly(NCPoly.one(q))

    @classmethod
    def necklace(cls, q: Quiver, p: Path, c: Number = 1) -> "WheelElement":
        return cls.from_raw(q, raw_from_key(((), (), (p,))), c)

    @classmethod
    def from_tensor(cls, t: Tensor) -> "WheelElement":
        m = t.arity
        ident = tuple(range(1, m + 1))
        return cls(t.quiver, {(ident, k, ()): c for k, c in t.terms.items()})

    @classmethod
    def from_raw(cls, q: Quiver, raw: Raw, c: Number = 1) -> "WheelElement":
        out = cls(q)
        got = canonicalize(q, raw)
        if got is not None and c:
            key, s = got
            out.terms[key] = _frac(c) * s
        return out

    @classmethod
    def from_term(
        cls,
        q: Quiver,
        coeff: Number,
        sigma_l: Permutation,
        sigma_r: Permutation,
        word: Sequence[Path],
        cyc: Sequence[Path] = (),
    ) -> "WheelElement":
        """Normalize (coeff, sigma_L, sigma_R, word, cyc) to canonical form.

        Strand k (the k-th tensor factor) gets input label sigma_L(k) and
        output label sigma_R(k).
        """
        m = len(word)
        if sigma_l.degree != m or sigma_r.degree != m:
            raise WheelError("arity mismatch between permutations and word")
        raw = raw_from_key((tuple(range(1, m + 1)), tuple(word), tuple(cyc)))
        for k, s in enumerate(raw.strands):
            s.inl = sigma_l(k + 1)
            s.outl = sigma_r(k + 1)
        return cls.from_raw(q, raw, coeff)

    # -- basic algebra ------------------------------------------------------
    def _new(self, terms: dict[Key, Fraction]) -> "WheelElement":
        res = WheelElement(self.quiver)
        res.terms = terms
        return res

    def _check(self, other: "WheelElement") -> None:
        if not isinstance(other, WheelElement):
            raise TypeError("expected a WheelElement")
        if self.quiver != other.quiver:
            raise QuiverError("quiver mismatch")

    def __iter__(self) -> Iterator[tuple[Key, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "WheelElement") -> "WheelElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return self._new(out)

    def __neg__(self) -> "WheelElement":
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "WheelElement") -> "WheelElement":
        return self + (-other)

    def scale(self, c: Number) -> "WheelElement":
        c = _frac(c)
        if not c:
            return WheelElement(self.quiver)
        return self._new({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c: Number) -> "WheelElement":
        return self.scale(c)

    def __mul__(self, other: Union["WheelElement", Number]) -> "WheelElement":
        if isinstance(other, WheelElement):
            return wheel_product(self, other)
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WheelElement) and self.quiver == other.quiver and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- gradings -----------------------------------------------------------
    def degrees(self) -> set[int]:
        return {len(k[0]) for k in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise WheelError("inhomogeneous wheel degree")
        return ds.pop() if ds else 0

    def part(self, pred: Callable[[Key], bool]) -> "WheelElement":
        return self._new({k: c for k, c in self.terms.items() if pred(k)})

    def degree_part(self, m: int) -> "WheelElement":
        return self.part(lambda k: len(k[0]) == m)

    def map_raw(self, fn: Callable[[Raw], Iterable[tuple[Raw, Number]]]) -> "WheelElement":
        """Linear map given on raw terms; fn yields (raw, signed coefficient) pairs."""
        q = self.quiver
        out: dict[Key, Fraction] = {}
        for k, c in self.terms.items():
            for raw, d in fn(raw_from_key(k)):
                if not d:
                    continue
                got = canonicalize(q, raw)
                if got is None:
                    continue
                key, s = got
                _add_into(out, key, c * _frac(d) * s)
        return self._new(out)

    # -- rendering ----------------------------------------------------------
    def __repr__(self) -> str:
        return f"WheelElement({self})"

    def __str__(self) -> str:
        q = self.quiver
        items = sorted(self.terms.items(), key=lambda t: sort_key(t[0]))
        return format_sum([(c, render_key(q, k)) for k, c in items])

    def to_json(self) -> list[dict[str, Any]]:
        q = self.quiver
        out = []
        for k, c in sorted(self.terms.items(), key=lambda t: sort_key(t[0])):
            perm, strands, necks = k
            out.append(
                {
                    "coeff": format_coeff(c),
                    "degree": len(perm),
                    "sigma_left": str(Permutation(perm)) if perm else "()",
                    "word": [path_str(q, p) for p in strands],
                    "cyc": [path_str(q, p) for p in necks],
                }
            )
        return out


def sort_key(k: Key) -> tuple:
    perm, strands, necks = k
    return (
        len(perm),
        sum(len(p.word) for p in strands) + sum(len(p.word) for p in necks),
        perm,
        tuple((p.word, p.tail) for p in strands),
        tuple((p.word, p.tail) for p in necks),
    )


def render_key(q: Quiver, k: Key) -> str:
    perm, strands, necks = k
    parts = []
    m = len(perm)
    if m == 1:
        parts.append(path_str(q, strands[0]))
    elif m >= 2:
        body = ", ".join(path_str(q, p) for p in strands)
        if perm == tuple(range(1, m + 1)):
            parts.append(f"<{body}>")
        else:
            parts.append(f"perm({Permutation(perm)})<{body}>")
    parts.extend(f"[{path_str(q, n)}]" for n in necks)
    return " * ".join(parts) if parts else "1"


# --------------------------------------------------------------------------
# Wheel operations
# --------------------------------------------------------------------------
def wheel_normalize(
    q: Quiver,
    coeff: Number,
    sigma_l: Permutation,
    sigma_r: Permutation,
    word: Sequence[Path],
    cyc: Sequence[Path] = (),
) -> WheelElement:
    return WheelElement.from_term(q, coeff, sigma_l, sigma_r, word, cyc)


def wheel_act(sigma_l: Permutation, sigma_r: Permutation, u: WheelElement) -> WheelElement:
    """Relabel inputs by sigma_L and outputs by sigma_R (a left action of S_m x S_m)."""
    for m in u.degrees():
        if m != sigma_l.degree or m != sigma_r.degree:
            raise WheelError("permutation degree does not match wheel degree")

    def fn(raw: Raw):
        for s in raw.strands:
            s.inl = sigma_l(s.inl)
            s.outl = sigma_r(s.outl)
        yield raw, 1

    return u.map_raw(fn)


def _shifted(raw: Raw, shift: int, id_shift: int) -> Raw:
    return Raw(
        [
            Strand(s.inl + shift, s.outl + shift, s.tail, s.head, [(i + id_shift, a) for i, a in s.letters])
            for s in raw.strands
        ],
        [Neck(n.vertex, [(i + id_shift, a) for i, a in n.letters]) for n in raw.necks],
    )


def product_raw(r1: Raw, r2: Raw, q: Quiver) -> tuple[Raw, int]:
    """Wheel product of raw terms; r2's labels are shifted past r1's."""
    m = len(r1.strands)
    n1 = len(r1.flat())
    r2s = _shifted(r2, m, n1)
    out = Raw(r1.strands + r2s.strands, r1.necks + r2s.necks)
    src = r1.flat() + r2s.flat()
    return out, letters_sign(q, src, [i for i, _ in out.flat()])


def wheel_product(u: WheelElement, v: WheelElement) -> WheelElement:
    u._check(v)
    q = u.quiver
    out: dict[Key, Fraction] = {}
    for k1, c1 in u.terms.items():
        r1 = raw_from_key(k1)
        for k2, c2 in v.terms.items():
            raw, s = product_raw(r1, raw_from_key(k2), q)
            got = canonicalize(q, raw)
            if got is None:
                continue
            key, s2 = got
            _add_into(out, key, c1 * c2 * s * s2)
    return u._new(out)


def wheel_prod(*factors: WheelElement) -> WheelElement:
    if not factors:
        raise WheelError("empty product")
    out = factors[0]
    for f in factors[1:]:
        out = wheel_product(out, f)
    return out


def contract_raw(q: Quiver, raw: Raw, i: int, j: int) -> Optional[Raw]:
    """mu_{i,j}: glue output i to input j.  None if the paths do not compose."""
    m = len(raw.strands)
    if not (1 <= i <= m and 1 <= j <= m):
        raise WheelError(f"contraction index out of range for wheel degree {m}")
    new = raw.copy()
    ks = next(k for k, s in enumerate(new.strands) if s.outl == i)
    kt = next(k for k, s in enumerate(new.strands) if s.inl == j)
    S, T = new.strands[ks], new.strands[kt]
    if ks != kt:
        if S.head != T.tail:
            return None
        glued = Strand(S.inl, T.outl, S.tail, T.head, S.letters + T.letters)
        new.strands[ks] = glued
        del new.strands[kt]
    else:
        if S.head != S.tail:
            return None
        del new.strands[ks]
        new.necks.append(Neck(S.tail, S.letters))
    for s in new.strands:
        if s.inl > j:
            s.inl -= 1
        if s.outl > i:
            s.outl -= 1
    return new


def contract(u: WheelElement, i: int, j: int) -> WheelElement:
    q = u.quiver
    for m in u.degrees():
        if not (1 <= i <= m and 1 <= j <= m):
            raise WheelError(f"contraction index ({i},{j}) out of range for wheel degree {m}")

    def fn(raw: Raw):
        new = contract_raw(q, raw, i, j)
        if new is not None:
            yield new, letters_sign(q, raw.flat(), [x for x, _ in new.flat()])

    return u.map_raw(fn)


def wheel_equal(u: WheelElement, v: WheelElement) -> bool:
    return u == v


def block_swap(m: int, n: int) -> Permutation:
    """(12)^{m,n}."""
    return Permutation.block((m, n), (1, 0))


# --------------------------------------------------------------------------
# Gradings of terms
# --------------------------------------------------------------------------
def key_letters(k: Key) -> Iterator[int]:
    for p in k[1]:
        yield from p.word
    for p in k[2]:
        yield from p.word


def key_grade(q: Quiver, k: Key) -> int:
    return _word_grade(q, key_letters(k))


def key_stars(q: Quiver, k: Key) -> int:
    return sum(1 for a in key_letters(k) if q.strata[a] == "star")


def key_diffs(q: Quiver, k: Key) -> int:
    return sum(1 for a in key_letters(k) if q.strata[a] == "diff")


def homogeneous_grade(u: WheelElement) -> int:
    gs = {key_grade(u.quiver, k) for k in u.terms}
    if len(gs) > 1:
        raise WheelError("element is not homogeneous")
    return gs.pop() if gs else 0


def parity(u: WheelElement) -> int:
    g = homogeneous_grade(u)
    return mask_dot(g, g)


def to_tensor(u: WheelElement) -> Tensor:
    """Read an element with identity left permutation and no necklaces as a tensor."""
    q = u.quiver
    m = u.degree
    ident = tuple(range(1, m + 1))
    out = Tensor(q, m)
    for (perm, strands, necks), c in u.terms.items():
        if perm != ident or necks:
            raise WheelError("element is not a pure tensor word")
        out.terms[strands] = c
    return out


def closure(u: WheelElement) -> WheelElement:
    """[u] for u in F_1: the cyclic class mu_{1,1}(u)."""
    return contract(u, 1, 1)
