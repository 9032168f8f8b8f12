from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wheelcalc.paths import NCPoly, Path, trivial
from wheelcalc.quiver import Quiver, cyclic_two, kronecker, loops, one_loop

settings.register_profile(
    "wheelcalc", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("wheelcalc")

QUIVER_MAKERS = (one_loop, lambda **kw: loops(2, **kw), kronecker, cyclic_two)


def quivers(parity: int | None = None) -> st.SearchStrategy[Quiver]:
    par = st.just(parity) if parity is not None else st.sampled_from((0, 1))
    return st.builds(lambda make, p: make(star_parity=p), st.sampled_from(QUIVER_MAKERS), par)


@st.composite
def paths(draw, q: Quiver, max_len: int = 4, strata=("base", "star"), closed: bool = False) -> Path:
    """A random walk; closed walks are retried until they return to the start."""
    for _ in range(50):
        v = draw(st.sampled_from(q.vertices))
        start, word = v, []
        for _ in range(draw(st.integers(0, max_len))):
            out = [a.index for a in q.arrows if a.tail == v and a.stratum in strata]
            if not out:
                break
            a = draw(st.sampled_from(out))
            word.append(a)
            v = q.heads[a]
        if not closed or v == start:
            return Path(start, v, tuple(word)) if word else trivial(start)
    return trivial(q.vertices[0])


coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(lambda c: c != 0)


@st.composite
def ncpolys(draw, q: Quiver, max_len: int = 3, terms: int = 3) -> NCPoly:
    out = NCPoly(q)
    for _ in range(draw(st.integers(1, terms))):
        out = out + NCPoly(q, {draw(paths(q, max_len)): draw(coeffs)})
    return out


def frac(x) -> Fraction:
    return Fraction(x)


rngs = st.integers(0, 2**31).map(random.Random)
