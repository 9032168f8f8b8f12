"""Permutations of {1..m} and Koszul signs of signed braidings."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from typing import Union

Grade = Union[int, tuple[int, ...]]


def grade_dot(a: Grade, b: Grade) -> int:
    """Parity of the sign rule (-1)^{a.b} for (multi)degrees, reduced mod 2."""
    if isinstance(a, int) and isinstance(b, int):
        return (a * b) & 1
    if isinstance(a, int) or isinstance(b, int):
        raise TypeError("cannot mix scalar and vector degrees")
    if len(a) != len(b):
        raise ValueError("degree vectors of different length")
    return sum(x * y for x, y in zip(a, b)) & 1


class Permutation:
    """A bijection of {1, ..., m}, stored in one-line notation.

    ``Permutation((2, 3, 1))`` sends 1 -> 2, 2 -> 3, 3 -> 1.  Composition
    ``s * t`` means "apply t first, then s".
    """

    __slots__ = ("_img",)

    def __init__(self, images: Iterable[int]):
        img = tuple(int(i) for i in images)
        if sorted(img) != list(range(1, len(img) + 1)):
            raise ValueError(f"not a permutation of 1..{len(img)}: {img}")
        self._img = img

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(range(1, m + 1))

    @classmethod
    def cycle(cls, m: int, *points: int) -> "Permutation":
        """The cycle (p1, p2, ..., pk) in S_m, sending p1 -> p2 -> ... -> p1."""
        img = list(range(1, m + 1))
        if len(set(points)) != len(points):
            raise ValueError("repeated point in cycle")
        for a, b in zip(points, points[1:] + points[:1]):
            if not 1 <= a <= m:
                raise ValueError(f"point {a} outside 1..{m}")
            img[a - 1] = b
        return cls(img)

    @classmethod
    def from_cycles(cls, m: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        out = cls.identity(m)
        for c in cycles:
            out = out * cls.cycle(m, *c)
        return out

    @classmethod
    def block(cls, sizes: Sequence[int], order: Sequence[int]) -> "Permutation":
        """Block permutation moving block ``order[k]`` (0-based) to position k.

        ``Permutation.block((m, n), (1, 0))`` is the shorthand (12)^{m,n}: it
        sends 1..m to n+1..n+m and m+1..m+n to 1..n.
        """
        if sorted(order) != list(range(len(sizes))):
            raise ValueError("order must permute the blocks")
        starts = [sum(sizes[:k]) for k in range(len(sizes))]
        img = [0] * sum(sizes)
        pos = 1
        for b in order:
            for r in range(sizes[b]):
                img[starts[b] + r] = pos
                pos += 1
        return cls(img)

    @property
    def degree(self) -> int:
        return len(self._img)

    def __call__(self, i: int) -> int:
        return self._img[i - 1]

    def images(self) -> tuple[int, ...]:
        return self._img

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(self._img[j - 1] for j in other._img)

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self._img, start=1):
            inv[j - 1] = i
        return Permutation(inv)

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        out = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            out = out * base
        return out

    def embed(self, *sizes: int) -> "Permutation":
        """The block map i_{i1,...,il}: permute blocks of the given sizes.

        ``self`` must lie in S_l; the result lies in S_{i1+...+il} and moves
        block k to the position that ``self`` assigns to k.
        """
        if len(sizes) != self.degree:
            raise ValueError("need one size per permuted point")
        inv = self.inverse()
        return Permutation.block(sizes, [inv(k) - 1 for k in range(1, self.degree + 1)])

    def cycles(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def sign(self) -> int:
        return koszul_sign(self, [1] * self.degree)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self) -> int:
        return hash(self._img)

    def __repr__(self) -> str:
        return f"Permutation({self._img})"

    def __str__(self) -> str:
        cs = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs) or "()"

    def act(self, items: Sequence) -> list:
        """Move the item at position i to position sigma(i)."""
        if len(items) != self.degree:
            raise ValueError("length mismatch")
        out = [None] * self.degree
        for i, x in enumerate(items, start=1):
            out[self(i) - 1] = x
        return out


def koszul_sign(sigma: Permutation, parities: Sequence[Grade]) -> int:
    """Sign of the braiding tau_sigma on factors of the given degrees.

    tau_sigma sends V_1 (x) ... (x) V_n to V_{sigma^-1(1)} (x) ..., i.e. the
    factor in slot i moves to slot sigma(i); every pair of factors whose
    relative order is reversed contributes (-1)^{|a||b|}.
    """
    if len(parities) != sigma.degree:
        raise ValueError("length mismatch between permutation and parities")
    return reorder_sign([sigma(i) for i in range(1, sigma.degree + 1)], parities)


def reorder_sign(targets: Sequence[int], parities: Sequence[Grade]) -> int:
    """Koszul sign when item i is moved to (sortable) target position targets[i]."""
    odd = 0
    n = len(targets)
    for i in range(n):
        ti = targets[i]
        pi = parities[i]
        for j in range(i + 1, n):
            if targets[j] < ti:
                odd ^= grade_dot(pi, parities[j])
    return -1 if odd else 1
