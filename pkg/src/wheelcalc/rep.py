"""Representation oracle: wheel elements evaluated as polynomials in matrix entries.

A base arrow e: v -> w of a quiver with dimension vector d becomes a generic
d_v x d_w matrix X_e with entries ``(e, i, j)``; a path evaluates to the
ordered product of its matrices, so rows belong to the tail and columns to the
head.  Star arrows give matrices of even variables in the even regime and of
odd (exterior) variables in the odd regime.  A necklace evaluates to a trace,
and a strand of F_m to a matrix entry carrying one index per wheel label.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Any, Optional, Union

from .paths import Path, _add_into, _frac, format_coeff, format_sum
from .quiver import Quiver
from .wheels import WheelElement

Var = tuple[str, int, int]
Mono = tuple[tuple[tuple[Var, int], ...], tuple[Var, ...]]
Number = Union[int, Fraction]

# Evaluation of F_m materializes d^(2m) entries; larger m is refused.
MAX_EV_DEGREE = 3


class RepError(ValueError):
    """Shape, dimension or parity errors of the representation oracle."""


# --------------------------------------------------------------------------
# Super polynomials
# --------------------------------------------------------------------------
def _merge_even(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _merge_odd(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Sign and sorted product of two exterior monomials (0 if a factor repeats)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class SuperPoly:
    """Exact polynomial in commuting variables times an exterior algebra.

    Monomials are (sorted ((var, exponent), ...), sorted odd vars).  Purely
    even polynomials are the commutative case.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Mono, Number]] = None):
        self.terms: dict[Mono, Fraction] = {}
        for m, c in (terms or {}).items():
            _add_into(self.terms, m, _frac(c))

    @classmethod
    def const(cls, c: Number) -> "SuperPoly":
        return cls({((), ()): c}) if c else cls()

    @classmethod
    def even(cls, v: Var) -> "SuperPoly":
        return cls({(((v, 1),), ()): 1})

    @classmethod
    def odd(cls, v: Var) -> "SuperPoly":
        return cls({((), (v,)): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SuperPoly.const(other)
        return isinstance(other, SuperPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "SuperPoly") -> "SuperPoly":
        out = SuperPoly()
        out.terms = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out.terms, m, c)
        return out

    def __neg__(self) -> "SuperPoly":
        return self.scale(-1)

    def __sub__(self, other: "SuperPoly") -> "SuperPoly":
        return self + (-other)

    def scale(self, c: Number) -> "SuperPoly":
        c = _frac(c)
        out = SuperPoly()
        if c:
            out.terms = {m: v * c for m, v in self.terms.items()}
        return out

    def __mul__(self, other: Union["SuperPoly", Number]) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            return self.scale(other)
        out: dict[Mono, Fraction] = {}
        for (e1, o1), c1 in self.terms.items():
            for (e2, o2), c2 in other.terms.items():
                s, o = _merge_odd(o1, o2)
                if s:
                    _add_into(out, (_merge_even(e1, e2), o), c1 * c2 * s)
        res = SuperPoly()
        res.terms = out
        return res

    __rmul__ = scale

    def variables(self) -> set[Var]:
        out: set[Var] = set()
        for e, o in self.terms:
            out.update(v for v, _ in e)
            out.update(o)
        return out

    def odd_variables(self) -> set[Var]:
        return {v for _, o in self.terms for v in o}

    def constant(self) -> Fraction:
        """The value of a constant polynomial."""
        if any(m != ((), ()) for m in self.terms):
            raise RepError("polynomial is not constant")
        return self.terms.get(((), ()), Fraction(0))

    def d_even(self, v: Var) -> "SuperPoly":
        out = SuperPoly()
        for (e, o), c in self.terms.items():
            d = dict(e)
            k = d.get(v, 0)
            if not k:
                continue
            if k == 1:
                del d[v]
            else:
                d[v] = k - 1
            _add_into(out.terms, (tuple(sorted(d.items())), o), c * k)
        return out

    def d_odd(self, v: Var) -> "SuperPoly":
        """Left derivative: move v to the front, then drop it."""
        out = SuperPoly()
        for (e, o), c in self.terms.items():
            if v not in o:
                continue
            k = o.index(v)
            _add_into(out.terms, (e, o[:k] + o[k + 1 :]), -c if k % 2 else c)
        return out

    def sort_terms(self) -> list[tuple[Mono, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (sum(e for _, e in t[0][0]) + len(t[0][1]), t[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, o), c in self.sort_terms():
            factors = [_var_str(v) + (f"^{k}" if k > 1 else "") for v, k in e] + [_var_str(v) for v in o]
            if factors:
                parts.append((c, " ".join(factors)))
            else:
                parts.append((Fraction(1 if c > 0 else -1), format_coeff(abs(c))))
        return format_sum(parts)

    __repr__ = __str__

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {
                "coeff": str(c),
                "even": [[_var_str(v), k] for v, k in e],
                "odd": [_var_str(v) for v in o],
            }
            for (e, o), c in self.sort_terms()
        ]


def _var_str(v: Var) -> str:
    return f"{v[0]}[{v[1] + 1},{v[2] + 1}]"


# --------------------------------------------------------------------------
# Dimension vectors and points
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class DimVector:
    dims: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, q: Quiver, dims: Union[int, Mapping[str, int]]) -> "DimVector":
        if isinstance(dims, int):
            dims = {v: dims for v in q.vertices}
        missing = [v for v in q.vertices if v not in dims]
        if missing:
            raise RepError(f"no dimension for vertices {missing}")
        extra = [v for v in dims if v not in q.vertices]
        if extra:
            raise RepError(f"unknown vertices {extra}")
        for v, d in dims.items():
            if not isinstance(d, int) or d < 1:
                raise RepError(f"dimension of {v} must be a positive integer")
        return cls(tuple((v, dims[v]) for v in q.vertices))

    @classmethod
    def parse(cls, q: Quiver, text: str) -> "DimVector":
        """'v=2,w=3', or a bare integer for every vertex."""
        text = text.strip()
        if text.isdigit():
            return cls.of(q, int(text))
        out = {}
        for part in text.split(","):
            name, sep, val = part.partition("=")
            if not sep or not val.strip().isdigit():
                raise RepError(f"bad dimension entry {part!r}")
            out[name.strip()] = int(val)
        return cls.of(q, out)

    def __getitem__(self, v: str) -> int:
        return dict(self.dims)[v]


Matrix = list[list[SuperPoly]]


@dataclass
class RepPoint:
    """Matrices for some arrows; arrows without a value stay symbolic."""

    quiver: Quiver
    dim: DimVector
    values: dict[str, list[list[Fraction]]]

    def __post_init__(self) -> None:
        for name, m in self.values.items():
            a = self.quiver.arrow(name)
            if a.stratum == "diff":
                raise RepError("diff arrows have no representation values")
            if a.stratum == "star" and self.quiver.star_parity:
                raise RepError("odd star arrows cannot take numeric values")
            shape = (self.dim[a.tail], self.dim[a.head])
            if len(m) != shape[0] or any(len(r) != shape[1] for r in m):
                raise RepError(f"matrix for {name} must have shape {shape[0]}x{shape[1]}")
            self.values[name] = [[_frac(c) for c in r] for r in m]

    @classmethod
    def symbolic(cls, q: Quiver, dim: DimVector) -> "RepPoint":
        return cls(q, dim, {})

    @classmethod
    def from_json(cls, q: Quiver, dim: DimVector, data: Mapping[str, Any]) -> "RepPoint":
        vals = {k: [[Fraction(str(c)) for c in r] for r in m] for k, m in data.items()}
        return cls(q, dim, vals)

    @classmethod
    def load(cls, q: Quiver, dim: DimVector, path: Union[str, FsPath]) -> "RepPoint":
        return cls.from_json(q, dim, json.loads(FsPath(path).read_text()))

    def matrix(self, a: int) -> Matrix:
        arr = self.quiver.arrows[a]
        if arr.stratum == "diff":
            raise RepError("diff letters cannot be evaluated")
        rows, cols = self.dim[arr.tail], self.dim[arr.head]
        if arr.name in self.values:
            m = self.values[arr.name]
            return [[SuperPoly.const(c) for c in r] for r in m]
        make = SuperPoly.odd if arr.stratum == "star" and self.quiver.star_parity else SuperPoly.even
        return [[make((arr.name, i, j)) for j in range(cols)] for i in range(rows)]


def identity(n: int) -> Matrix:
    return [[SuperPoly.const(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise RepError("matrix shapes do not compose")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = SuperPoly()
            for k, x in enumerate(row):
                if x and b[k][j]:
                    acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def trace(m: Matrix) -> SuperPoly:
    acc = SuperPoly()
    for i in range(len(m)):
        acc = acc + m[i][i]
    return acc


def ev_path(p: Path, point: RepPoint) -> Matrix:
    """Ordered product of arrow matrices; the trivial path gives the identity."""
    if not p.word:
        return identity(point.dim[p.tail])
    out = point.matrix(p.word[0])
    for a in p.word[1:]:
        out = matmul(out, point.matrix(a))
    return out


def ev_matrix_values(m: Matrix) -> list[list[Fraction]]:
    return [[x.constant() for x in r] for r in m]


# --------------------------------------------------------------------------
# Wheel elements
# --------------------------------------------------------------------------
Leg = tuple[str, int]  # (vertex, index)
Index = tuple[tuple[Leg, ...], tuple[Leg, ...]]


class RepTensor:
    """Evaluation of an F_m element: (input indices, output indices) -> polynomial.

    Input leg k carries (vertex, index) for wheel input label k+1, likewise
    outputs; legs at different vertices are never traced together.  For m = 0
    the only entry is keyed ((), ()).
    """

    __slots__ = ("degree", "entries")

    def __init__(self, degree: int, entries: Optional[dict[Index, SuperPoly]] = None):
        self.degree = degree
        self.entries: dict[Index, SuperPoly] = {k: v for k, v in (entries or {}).items() if v}

    def _add(self, k: Index, v: SuperPoly) -> None:
        got = self.entries.get(k)
        new = v if got is None else got + v
        if new:
            self.entries[k] = new
        else:
            self.entries.pop(k, None)

    def __add__(self, other: "RepTensor") -> "RepTensor":
        if other.degree != self.degree and self.entries and other.entries:
            raise RepError("cannot add evaluations of different wheel degree")
        out = RepTensor(self.degree if self.entries else other.degree, dict(self.entries))
        for k, v in other.entries.items():
            out._add(k, v)
        return out

    def __sub__(self, other: "RepTensor") -> "RepTensor":
        return self + other.scale(-1)

    def scale(self, c: Number) -> "RepTensor":
        return RepTensor(self.degree, {k: v.scale(c) for k, v in self.entries.items()})

    def __mul__(self, other: "RepTensor") -> "RepTensor":
        """Tensor product: legs of self first, polynomial factors in that order."""
        out = RepTensor(self.degree + other.degree)
        for (i1, o1), a in self.entries.items():
            for (i2, o2), b in other.entries.items():
                out._add((i1 + i2, o1 + o2), a * b)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RepTensor):
            return NotImplemented
        if not self.entries and not other.entries:
            return True
        return self.degree == other.degree and self.entries == other.entries

    def contract(self, i: int, j: int) -> "RepTensor":
        """Trace output leg i against input leg j (1-based)."""
        out = RepTensor(self.degree - 1)
        for (ins, outs), v in self.entries.items():
            if outs[i - 1] != ins[j - 1]:
                continue
            out._add((ins[: j - 1] + ins[j:], outs[: i - 1] + outs[i:]), v)
        return out

    def scalar(self) -> SuperPoly:
        if self.degree != 0:
            raise RepError("only F_0 evaluations are scalars")
        return self.entries.get(((), ()), SuperPoly())

    def __str__(self) -> str:
        if self.degree == 0:
            return str(self.scalar())
        lines = []
        for (ins, outs), v in sorted(self.entries.items()):
            i = ",".join(_leg_str(x) for x in ins)
            o = ",".join(_leg_str(x) for x in outs)
            lines.append(f"({i} | {o}): {v}")
        return "\n".join(lines) if lines else "0"

    def to_json(self) -> Any:
        if self.degree == 0:
            return self.scalar().to_json()
        return [
            {"in": [_leg_str(x) for x in ins], "out": [_leg_str(x) for x in outs], "value": v.to_json()}
            for (ins, outs), v in sorted(self.entries.items())
        ]


def ev_wheel(u: WheelElement, point: RepPoint) -> RepTensor:
    """Evaluate a homogeneous wheel element: necklaces become traces, strands entries."""
    degs = u.degrees()
    if len(degs) > 1:
        raise RepError("evaluation needs a homogeneous wheel degree")
    m = degs.pop() if degs else 0
    if m > MAX_EV_DEGREE:
        raise RepError(f"evaluation is implemented up to wheel degree {MAX_EV_DEGREE}")
    out = RepTensor(m)
    for (perm, strands, necks), c in u.terms.items():
        mats = [ev_path(p, point) for p in strands]
        scal = SuperPoly.const(c)
        # strand matrices are indexed by (input label, output label)
        in_legs: list[list[Leg]] = [[] for _ in range(m)]
        for inl, p in zip(perm, strands):
            in_legs[inl - 1] = [(p.tail, i) for i in range(point.dim[p.tail])]
        out_legs = [[(p.head, j) for j in range(point.dim[p.head])] for p in strands]
        traces = [trace(ev_path(n, point)) for n in necks]
        for ins in itertools.product(*in_legs):
            for outs in itertools.product(*out_legs):
                val = scal
                for k, (inl, mat) in enumerate(zip(perm, mats)):
                    val = val * mat[ins[inl - 1][1]][outs[k][1]]
                    if not val:
                        break
                for t in traces:
                    if not val:
                        break
                    val = val * t
                if val:
                    out._add((ins, outs), val)
    return out


def _leg_str(leg: Leg) -> str:
    return f"{leg[0]}:{leg[1] + 1}"


def ev_scalar(u: WheelElement, point: RepPoint) -> SuperPoly:
    got = ev_wheel(u, point)
    return got.scalar() if got.entries else SuperPoly()


# --------------------------------------------------------------------------
# Oracle structures
# --------------------------------------------------------------------------
def _is_star_var(v: Var) -> bool:
    return v[0].endswith("*")


def matrix_poisson(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    """Canonical bracket with {X_e[i,j], X_e*[k,l]} = delta_il delta_jk."""
    if f.odd_variables() or g.odd_variables():
        raise RepError("the Poisson oracle takes even polynomials")
    out = SuperPoly()
    for v in sorted(f.variables() | g.variables()):
        if _is_star_var(v):
            continue
        w = (v[0] + "*", v[2], v[1])
        out = out + f.d_even(v) * g.d_even(w) - f.d_even(w) * g.d_even(v)
    return out


def odd_laplacian(f: SuperPoly) -> SuperPoly:
    """Sum over e, i, j of d/dX_e[i,j] d/dxi_e*[j,i], the odd derivative applied first."""
    out = SuperPoly()
    for v in sorted(f.odd_variables()):
        x = (v[0][:-1], v[2], v[1])
        out = out + f.d_odd(v).d_even(x)
    return out


def rep_dimension(q: Quiver, dim: DimVector) -> int:
    return sum(dim[a.tail] * dim[a.head] for a in q.base_arrows)
