"""Bimodule connections on Der(P_Q), total contractions and the BV operator D_nabla.

Elements that mix double derivations and one-forms live in F of the doubled,
Omega-extended quiver: the letter ``dx`` is the one-form of the arrow x.  A
connection stores, for every base arrow e, the value nabla(d_e) as a sum of
words with one diff letter and one star letter; the left part has the diff
letter first and the right part the star letter first.
"""

from __future__ import annotations

import json
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Any

from .perm import Permutation
from .paths import NCPoly, Path, _add_into, path_str
from .quiver import Quiver, QuiverError
from .wheels import (
    Key,
    Neck,
    Raw,
    WheelElement,
    WheelError,
    canonicalize,
    key_diffs,
    product_raw,
    raw_from_key,
    surgery,
    wheel_act,
)


def omega_quiver(q: Quiver) -> Quiver:
    if not q.double:
        raise QuiverError("connections need the doubled quiver")
    return q if q.omega else q.with_options(omega=True)


def rewrap(u: WheelElement, q: Quiver) -> WheelElement:
    """Reinterpret u over a quiver with the same arrows up to added diff letters."""
    if u.quiver == q:
        return u
    n = len(q.arrows)
    for k in u.terms:
        for p in k[1] + k[2]:
            for a in p.word:
                if a >= n or q.arrows[a].name != u.quiver.arrows[a].name:
                    raise QuiverError("element uses arrows absent from the target quiver")
    out = WheelElement(q)
    out.terms = dict(u.terms)
    return out


def lift(u: WheelElement) -> WheelElement:
    return rewrap(u, omega_quiver(u.quiver))


# --------------------------------------------------------------------------
# Connections
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Connection:
    """nabla(d_e) = trivial part (zero) + stored left and right values."""

    quiver: Quiver  # Omega-extended doubled quiver
    left: Mapping[int, NCPoly] = field(default_factory=dict)
    right: Mapping[int, NCPoly] = field(default_factory=dict)

    def __post_init__(self) -> None:
        q = self.quiver
        if not q.omega or not q.double:
            raise QuiverError("connection quiver must be doubled and Omega-extended")
        for side, vals in (("left", self.left), ("right", self.right)):
            for e, f in vals.items():
                if q.strata[e] != "base":
                    raise QuiverError("connection values are keyed by base arrows")
                star = q.star(e)
                for p in f.terms:
                    stars = [k for k, a in enumerate(p.word) if q.strata[a] == "star"]
                    diffs = [k for k, a in enumerate(p.word) if q.strata[a] == "diff"]
                    if len(stars) != 1 or len(diffs) != 1:
                        raise QuiverError(
                            f"{side} value of {q.arrows[e].name} must have one star and one diff letter"
                        )
                    if (side == "left") != (diffs[0] < stars[0]):
                        raise QuiverError(f"{side} value of {q.arrows[e].name} has the wrong letter order")
                    if (p.tail, p.head) != (q.tails[star], q.heads[star]):
                        raise QuiverError(f"value of {q.arrows[e].name} has the wrong endpoints")

    @classmethod
    def trivial(cls, q: Quiver) -> "Connection":
        return cls(omega_quiver(q))

    def value(self, e: int) -> NCPoly:
        q = self.quiver
        out = NCPoly(q)
        if e in self.left:
            out = out + self.left[e]
        if e in self.right:
            out = out + self.right[e]
        return out

    def is_trivial(self) -> bool:
        return not any(self.value(a.index) for a in self.quiver.base_arrows)

    def __add__(self, other: "Connection") -> "Connection":
        """Sum of corrections (connections form an affine space over the trivial one)."""
        q = self.quiver
        left = {a.index: self._get(self.left, a.index) + self._get(other.left, a.index) for a in q.base_arrows}
        right = {
            a.index: self._get(self.right, a.index) + self._get(other.right, a.index) for a in q.base_arrows
        }
        return Connection(q, {k: v for k, v in left.items() if v}, {k: v for k, v in right.items() if v})

    def scale(self, c) -> "Connection":
        return Connection(
            self.quiver,
            {k: v.scale(c) for k, v in self.left.items() if c},
            {k: v.scale(c) for k, v in self.right.items() if c},
        )

    def _get(self, vals: Mapping[int, NCPoly], e: int) -> NCPoly:
        return vals.get(e, NCPoly(self.quiver))

    def __str__(self) -> str:
        q = self.quiver
        lines = []
        for a in q.base_arrows:
            lines.append(f"nabla(d_{a.name}) = {self.value(a.index)}")
        return "\n".join(lines)

    def to_json(self) -> list[dict[str, Any]]:
        q = self.quiver
        out = []
        for a in q.base_arrows:
            out.append(
                {
                    "arrow": a.name,
                    "left": _terms_json(q, self._get(self.left, a.index)),
                    "right": _terms_json(q, self._get(self.right, a.index)),
                }
            )
        return out

    @classmethod
    def from_json(cls, q: Quiver, data: Any) -> "Connection":
        from .expr import parse_ncpoly

        qo = omega_quiver(q)
        if isinstance(data, dict):
            data = [data]
        left: dict[int, NCPoly] = {}
        right: dict[int, NCPoly] = {}
        try:
            for entry in data:
                e = qo.arrow(entry["arrow"])
                if e.stratum != "base":
                    raise QuiverError("connection entries are keyed by base arrows")
                for side, store in (("left", left), ("right", right)):
                    val = NCPoly(qo)
                    for text in entry.get(side, []):
                        val = val + parse_ncpoly(qo, text)
                    if val:
                        store[e.index] = store.get(e.index, NCPoly(qo)) + val
        except (KeyError, TypeError) as exc:
            raise QuiverError(f"malformed connection description: {exc}") from exc
        return cls(qo, left, right)

    @classmethod
    def load(cls, q: Quiver, path: str | FsPath) -> "Connection":
        return cls.from_json(q, json.loads(FsPath(path).read_text()))


def _terms_json(q: Quiver, f: NCPoly) -> list[str]:
    from .paths import format_coeff

    out = []
    for p, c in sorted(f.terms.items(), key=lambda t: (len(t[0].word), t[0].word)):
        body = path_str(q, p)
        out.append(body if c == 1 else f"{format_coeff(c)} * {body}")
    return out


# --------------------------------------------------------------------------
# nabla extended to F
# --------------------------------------------------------------------------
def _replace(raw: Raw, lid: int, word: Sequence[int], next_id: int) -> Raw:
    """Replace the letter lid by the letters of word (fresh ids from next_id)."""
    new = raw.copy()
    fresh = [(next_id + t, a) for t, a in enumerate(word)]
    for s in new.strands:
        for k, (i, _) in enumerate(s.letters):
            if i == lid:
                s.letters = s.letters[:k] + fresh + s.letters[k + 1 :]
                return new
    for n in new.necks:
        for k, (i, _) in enumerate(n.letters):
            if i == lid:
                n.letters = n.letters[:k] + fresh + n.letters[k + 1 :]
                return new
    raise KeyError(lid)


def nabla_raw(conn: Connection, raw: Raw) -> Iterator[tuple[Raw, Fraction]]:
    q = conn.quiver
    flat = raw.flat()
    next_id = max((i for i, _ in flat), default=-1) + 1
    diffs_before = 0
    for lid, a in flat:
        sign = -1 if diffs_before % 2 else 1
        st = q.strata[a]
        if st == "base":
            yield _replace(raw, lid, [q.diff(a)], next_id), Fraction(sign)
        elif st == "star":
            for p, c in conn.value(q.base_index(a)).terms.items():
                yield _replace(raw, lid, p.word, next_id), sign * c
        else:
            diffs_before += 1


def nabla_extend(conn: Connection, u: WheelElement) -> WheelElement:
    """The extension of nabla to F as a derivation (base e -> de, star -> values, diff -> 0)."""
    u = rewrap(u, conn.quiver)
    return u.map_raw(lambda raw: nabla_raw(conn, raw))


def _pair_sum(u: WheelElement, partner: str) -> WheelElement:
    q = u.quiver

    def fn(raw: Raw):
        flat = raw.flat()
        for sid, sa in flat:
            if q.strata[sa] != "star":
                continue
            base = q.arrows[sa].base
            for bid, ba in flat:
                if q.strata[ba] == partner and q.arrows[ba].base == base:
                    new, s = surgery(q, raw, sid, bid)
                    yield new, s

    return u.map_raw(fn)


def contract_iota(u: WheelElement) -> WheelElement:
    """i_iota: pair every star letter with every matching diff letter and rewire."""
    return _pair_sum(lift(u) if not u.quiver.omega else u, "diff")


def bv_trivial(u: WheelElement) -> WheelElement:
    """D for the trivial connection: pair every star letter with every matching base letter."""
    return _pair_sum(u, "base")


def bv_operator(conn: Connection, u: WheelElement) -> WheelElement:
    """D_nabla = i_iota o nabla; the result is returned over u's quiver when possible."""
    if conn.is_trivial() and not any(key_diffs(u.quiver, k) for k in u.terms):
        return bv_trivial(u)
    out = contract_iota(nabla_extend(conn, u))
    try:
        return rewrap(out, u.quiver)
    except QuiverError:
        return out


def divergence(conn: Connection) -> dict[str, WheelElement]:
    """div(nabla)(d_e) = D_nabla(e*) as elements of F_1, keyed by base arrow name."""
    q = conn.quiver
    out = {}
    for a in q.base_arrows:
        star = WheelElement.from_path(q, Path(a.head, a.tail, (q.star(a.index),)))
        out[a.name] = bv_operator(conn, star)
    return out


# --------------------------------------------------------------------------
# iota, rank, torsion
# --------------------------------------------------------------------------
def iota(q: Quiver) -> WheelElement:
    """The canonical element sum_e [d_e de] in F_0."""
    qo = omega_quiver(q)
    out = WheelElement(qo)
    for a in qo.base_arrows:
        w = (qo.star(a.index), qo.diff(a.index))
        out = out + WheelElement.necklace(qo, Path(a.head, a.head, w))
    return out


def rank_element(q: Quiver) -> WheelElement:
    """rk(Der) = i_iota(iota) = sum_e [e_head(e)][e_tail(e)]."""
    return rewrap(contract_iota(iota(q)), q.with_options(omega=False) if q.omega else q)


def torsion(conn: Connection) -> WheelElement:
    """tau(nabla) = nabla(iota)."""
    return nabla_extend(conn, iota(conn.quiver))


def _star_word(q: Quiver, e: int) -> WheelElement:
    a = q.arrows[e]
    return WheelElement.from_path(q, Path(a.head, a.tail, (q.star(e),)))


def total_contraction(omega: WheelElement, w: WheelElement) -> WheelElement:
    """i_omega(w): every diff letter of omega is paired with a distinct matching star of w.

    Each term of omega is multiplied on the left of w and its diff letters are
    removed one after the other (in their flat order) by signed surgeries.
    """
    q = omega.quiver
    w = rewrap(w, q)
    out: dict[Key, Fraction] = {}
    for k1, c1 in omega.terms.items():
        r1 = raw_from_key(k1)
        n1 = len(r1.flat())
        diff_ids = [i for i, a in r1.flat() if q.strata[a] == "diff"]
        for k2, c2 in w.terms.items():
            raw, s0 = product_raw(r1, raw_from_key(k2), q)
            for new, s in _contract_all(q, raw, diff_ids, n1):
                got = canonicalize(q, new)
                if got is None:
                    continue
                key, s2 = got
                _add_into(out, key, c1 * c2 * s0 * s * s2)
    return omega._new(out)


def _contract_all(q: Quiver, raw: Raw, diff_ids: list[int], n1: int) -> Iterator[tuple[Raw, int]]:
    if not diff_ids:
        yield raw, 1
        return
    bid = diff_ids[0]
    ba = next(a for i, a in raw.flat() if i == bid)
    base = q.arrows[ba].base
    for sid, sa in raw.flat():
        if sid < n1 or q.strata[sa] != "star" or q.arrows[sa].base != base:
            continue
        new, s = surgery(q, raw, sid, bid)
        for fin, s2 in _contract_all(q, new, diff_ids[1:], n1):
            yield fin, s * s2


def torsion_pairing(conn: Connection, e: int, f: int) -> WheelElement:
    """tau(nabla) evaluated on the generator pair (d_e, d_f), as an element of F_2."""
    q = conn.quiver
    return total_contraction(torsion(conn), wheel_pair(q, e, f))


def wheel_pair(q: Quiver, e: int, f: int) -> WheelElement:
    return _star_word(q, e) * _star_word(q, f)


def torsion_formula(conn: Connection, e: int, f: int) -> WheelElement:
    """Generator-pair expression for tau(nabla) paired with (d_e, d_f), in F_2.

    The double bracket of two generators vanishes, so only connection terms
    contribute.  The component with the surviving star letter in the first
    strand is L(e, f) = (nabla_r)_xi(eta) + tau_21 (nabla_l)_eta(xi); the plus
    sign is the Koszul sign of pairing the one-form of nabla_l(xi) across the
    odd letter.  The other component is -(12) L(f, e).
    """
    swap = Permutation((2, 1))
    return torsion_component(conn, e, f) - wheel_act(swap, swap, torsion_component(conn, f, e))


def torsion_component(conn: Connection, e: int, f: int) -> WheelElement:
    q = conn.quiver
    xi = _star_word(q, e)
    eta = _star_word(q, f)
    out = WheelElement(q)
    if f in conn.right:
        out = out + _pair_one_forms(WheelElement.from_ncpoly(conn.right[f]), xi, order=(1, 0))
    if e in conn.left:
        out = out + _pair_one_forms(WheelElement.from_ncpoly(conn.left[e]), eta, order=(0, 1))
    return out


def _pair_one_forms(value: WheelElement, probe: WheelElement, order: tuple[int, int]) -> WheelElement:
    """Contract the diff letter of value against the star letter of probe.

    order=(1, 0) puts the probe strand first in the product, (0, 1) puts it second.
    """
    q = value.quiver
    if not value:
        return WheelElement(q)
    pair = probe * value if order == (1, 0) else value * probe
    slot = 0 if order == (1, 0) else 1

    def fn(raw: Raw):
        flat = raw.flat()
        probe_ids = {i for i, _ in raw.strands[slot].letters}
        for sid, sa in flat:
            if sid not in probe_ids or q.strata[sa] != "star":
                continue
            for bid, ba in flat:
                if q.strata[ba] == "diff" and q.arrows[ba].base == q.arrows[sa].base:
                    yield surgery(q, raw, sid, bid)

    return pair.map_raw(fn)


# --------------------------------------------------------------------------
# Curvature
# --------------------------------------------------------------------------
def nabla_squared(conn: Connection, e: int) -> WheelElement:
    """nabla^2(d_e) in F_1."""
    q = conn.quiver
    return nabla_extend(conn, nabla_extend(conn, _star_word(q, e)))


def check_linearity(conn: Connection, e: int) -> bool:
    """nabla^2(a d_e b) = a nabla^2(d_e) b for the probe a = b = the arrow e (when composable)."""
    q = conn.quiver
    a = q.arrows[e]
    star = q.star(e)
    lhs_word = []
    # a word x e* y with x ending at head(e) and y starting at tail(e)
    pre = [b.index for b in q.base_arrows if b.head == a.head][:1]
    post = [b.index for b in q.base_arrows if b.tail == a.tail][:1]
    if not pre or not post:
        return True
    lhs_word = pre + [star] + post
    p = Path(q.tails[pre[0]], q.heads[post[0]], tuple(lhs_word))
    lhs = nabla_extend(conn, nabla_extend(conn, WheelElement.from_path(q, p)))
    pre_w = WheelElement.from_path(q, Path(q.tails[pre[0]], q.heads[pre[0]], (pre[0],)))
    post_w = WheelElement.from_path(q, Path(q.tails[post[0]], q.heads[post[0]], (post[0],)))
    from .wheels import contract

    mid = nabla_squared(conn, e)
    rhs = contract(contract(pre_w * mid * post_w, 1, 2), 1, 2) if mid else WheelElement(q)
    return lhs == rhs


def curvature_trace(conn: Connection) -> WheelElement:
    """tr(nabla^2) = sum_e sum over terms u d_e v of nabla^2(d_e) of [de u d_e v] contracted at the new de."""
    q = conn.quiver
    for a in q.base_arrows:
        if not check_linearity(conn, a.index):
            raise WheelError(f"nabla^2 is not A^e-linear on d_{a.name}")
    out = WheelElement(q)
    for a in q.base_arrows:
        phi = nabla_squared(conn, a.index)
        de = q.diff(a.index)
        for (perm, strands, necks), c in phi.terms.items():
            if necks:
                raise WheelError("unexpected necklace in nabla^2 value")
            p = strands[0]
            raw = Raw([], [Neck(p.head, [(0, de)] + [(t + 1, x) for t, x in enumerate(p.word)])])
            for sid, sa in raw.flat():
                if q.strata[sa] == "star" and q.arrows[sa].base == a.name:
                    new, s = surgery(q, raw, sid, 0)
                    out = out + WheelElement.from_raw(q, new, c * s)
    return out
