"""Quivers, their doubles and Omega-extensions."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Any, Iterable, Literal

Stratum = Literal["base", "star", "diff"]

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# Bit masks of the bigrading (|Der|, |Omega^1|) reduced mod 2.
STAR_BIT = 1
DIFF_BIT = 2
_PARITY_OF_MASK = (0, 1, 1, 0)


def mask_dot(a: int, b: int) -> int:
    """Exponent of the sign (-1)^{ac+bd} for bigrade masks a=(a,b), b=(c,d)."""
    return _PARITY_OF_MASK[a & b]


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: str
    head: str
    stratum: Stratum
    base: str
    index: int
    parity: int
    grade: int  # bigrade mask, see STAR_BIT / DIFF_BIT


class Quiver:
    """A finite quiver, optionally doubled (e -> e*) and Omega-extended (e -> de).

    Star arrows carry the parity ``star_parity``: 0 is the even (Poisson)
    regime and 1 the odd (Schouten-Nijenhuis / BV) regime.  Arrows are
    totally ordered by declaration: base arrows, then stars, then diffs.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        arrows: Iterable[tuple[str, str, str]],
        *,
        double: bool = True,
        star_parity: int = 0,
        omega: bool = False,
    ):
        self.vertices: tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices) or not self.vertices:
            raise QuiverError("vertices must be a nonempty list of distinct ids")
        if star_parity not in (0, 1):
            raise QuiverError("star_parity must be 0 or 1")
        self.double = bool(double)
        self.star_parity = int(star_parity)
        self.omega = bool(omega)
        base = list(arrows)
        vset = set(self.vertices)
        specs: list[tuple[str, str, str, Stratum, str]] = []
        for name, tail, head in base:
            if not _NAME_RE.match(name):
                raise QuiverError(f"bad arrow name {name!r}")
            if tail not in vset or head not in vset:
                raise QuiverError(f"arrow {name} uses an unknown vertex")
            specs.append((name, tail, head, "base", name))
        if self.double:
            specs += [(n + "*", h, t, "star", n) for n, t, h, *_ in specs[: len(base)]]
        if self.omega:
            specs += [("d" + n, t, h, "diff", n) for n, t, h, *_ in specs[: len(base)]]
        self.arrows: tuple[Arrow, ...] = tuple(
            Arrow(
                name,
                t,
                h,
                st,
                b,
                i,
                self.star_parity if st == "star" else 0,
                (STAR_BIT * self.star_parity if st == "star" else 0) | (DIFF_BIT if st == "diff" else 0),
            )
            for i, (name, t, h, st, b) in enumerate(specs)
        )
        self._by_name = {a.name: a for a in self.arrows}
        if len(self._by_name) != len(self.arrows):
            raise QuiverError("arrow names (including derived x*, dx) must be unique")
        self.base_arrows = tuple(a for a in self.arrows if a.stratum == "base")
        self._star_of = {a.base: a.index for a in self.arrows if a.stratum == "star"}
        self._diff_of = {a.base: a.index for a in self.arrows if a.stratum == "diff"}
        self._base_of = {a.name: a.index for a in self.base_arrows}
        self.grades = tuple(a.grade for a in self.arrows)
        self.tails = tuple(a.tail for a in self.arrows)
        self.heads = tuple(a.head for a in self.arrows)
        self.strata = tuple(a.stratum for a in self.arrows)

    # -- lookup -------------------------------------------------------------
    def arrow(self, key: str | int) -> Arrow:
        if isinstance(key, int):
            return self.arrows[key]
        try:
            return self._by_name[key]
        except KeyError:
            raise QuiverError(f"unknown arrow {key!r}") from None

    def has_arrow(self, name: str) -> bool:
        return name in self._by_name

    def star(self, base: str | int) -> int:
        name = self.arrows[base].base if isinstance(base, int) else base
        if name not in self._star_of:
            raise QuiverError(f"no star arrow for {name!r} (quiver not doubled?)")
        return self._star_of[name]

    def diff(self, base: str | int) -> int:
        name = self.arrows[base].base if isinstance(base, int) else base
        if name not in self._diff_of:
            raise QuiverError(f"no diff arrow for {name!r} (quiver not Omega-extended?)")
        return self._diff_of[name]

    def base_index(self, arrow: str | int) -> int:
        name = self.arrows[arrow].base if isinstance(arrow, int) else self.arrow(arrow).base
        return self._base_of[name]

    # -- variants -----------------------------------------------------------
    def base_spec(self) -> list[tuple[str, str, str]]:
        return [(a.name, a.tail, a.head) for a in self.base_arrows]

    def with_options(self, **kw: Any) -> "Quiver":
        opts = dict(double=self.double, star_parity=self.star_parity, omega=self.omega)
        opts.update(kw)
        return Quiver(self.vertices, self.base_spec(), **opts)

    def signature(self) -> tuple:
        return (self.vertices, tuple(self.base_spec()), self.double, self.star_parity, self.omega)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Quiver) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        arrows = ", ".join(f"{n}:{t}->{h}" for n, t, h in self.base_spec())
        return (
            f"Quiver(vertices={list(self.vertices)}, arrows=[{arrows}], double={self.double}, "
            f"star_parity={self.star_parity}, omega={self.omega})"
        )

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"name": n, "tail": t, "head": h} for n, t, h in self.base_spec()],
            "double": self.double,
            "star_parity": self.star_parity,
            "omega": self.omega,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Quiver":
        try:
            arrows = [(a["name"], a["tail"], a["head"]) for a in data["arrows"]]
            return cls(
                data["vertices"],
                arrows,
                double=data.get("double", True),
                star_parity=data.get("star_parity", 0),
                omega=data.get("omega", False),
            )
        except (KeyError, TypeError) as exc:
            raise QuiverError(f"malformed quiver description: {exc}") from exc

    @classmethod
    def load(cls, path: str | FsPath) -> "Quiver":
        return cls.from_json(json.loads(FsPath(path).read_text()))


def one_loop(**kw: Any) -> Quiver:
    return Quiver(["v"], [("x", "v", "v")], **kw)


def loops(n: int, **kw: Any) -> Quiver:
    names = ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{i}" for i in range(n)]
    return Quiver(["v"], [(a, "v", "v") for a in names], **kw)


def kronecker(**kw: Any) -> Quiver:
    """Two vertices and two arrows v -> w."""
    return Quiver(["v", "w"], [("a", "v", "w"), ("b", "v", "w")], **kw)


def cyclic_two(**kw: Any) -> Quiver:
    """Two vertices with one arrow each way."""
    return Quiver(["v", "w"], [("a", "v", "w"), ("b", "w", "v")], **kw)
