"""Seeded randomized identity checks, shared by the CLI and the test suite.

Every property draws its own cases from ``random.Random`` seeded by the suite
seed and the property name, so suites are reproducible and independent of the
order in which they run.
"""

from __future__ import annotations

import random
import time
import zlib
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .calculus import (
    double_bracket,
    lifted_bracket,
    lifted_cobracket,
    necklace_bracket,
    necklace_cobracket,
    pr,
    wheeled_bracket,
)
from .connections import (
    bv_operator,
    bv_trivial,
    curvature_trace,
    divergence,
    rank_element,
    rewrap,
    torsion,
    torsion_formula,
    torsion_pairing,
    total_contraction,
)
from .diffops import (
    WheeledDiffOp,
    apply_op,
    apply_phi,
    commutator,
    compose_ops,
    phi_bracket,
    principal_symbol,
    sp2_triple,
    sp2_weil,
    t_commutator,
    t_derivation,
    t_lambda,
    weyl_commutator,
    weyl_image,
)
from .paths import NCPoly, Path, Tensor, cyclic_normalize, ncpoly_mul, path_compose, path_grade
from .perm import Permutation
from .quiver import Quiver, cyclic_two, kronecker, loops, mask_dot, one_loop
from .rep import DimVector, RepPoint, ev_scalar, ev_wheel, matrix_poisson, odd_laplacian, rep_dimension
from .sampling import (
    connection_from_vector,
    constrained_connections,
    random_closed_path,
    random_coeff,
    random_connection,
    random_element,
    random_homogeneous,
    random_path,
    random_torsion_free,
)
from .wheels import WheelElement, block_swap, contract, parity, wheel_act


@dataclass(frozen=True)
class CheckConfig:
    seed: int = 0
    max_len: int = 4
    max_deg: int = 3
    dims: tuple[int, ...] = (2, 3)
    scale: float = 1.0  # multiplies every case budget

    def budget(self, n: int) -> int:
        return max(1, round(n * self.scale))


@dataclass
class PropertyResult:
    suite: str
    name: str
    cases: int = 0
    failures: int = 0
    counterexample: Optional[dict[str, str]] = None
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.suite,
            "property": self.name,
            "cases": self.cases,
            "failures": self.failures,
            "passed": self.passed,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}.{self.name}: {self.cases} cases, {self.failures} failures"


# A case yields (ok, description) where the description is rendered lazily.
Case = tuple[bool, Callable[[], dict[str, str]]]


def _rng(cfg: CheckConfig, suite: str, name: str) -> random.Random:
    return random.Random(zlib.crc32(f"{cfg.seed}:{suite}:{name}".encode()))


def _run(suite: str, name: str, cases: Iterator[Case]) -> PropertyResult:
    res = PropertyResult(suite, name)
    t0 = time.perf_counter()
    for ok, describe in cases:
        res.cases += 1
        if not ok:
            res.failures += 1
            if res.counterexample is None:
                res.counterexample = describe()
    res.seconds = time.perf_counter() - t0
    return res


def _desc(**kw: Any) -> Callable[[], dict[str, str]]:
    return lambda: {k: str(v) for k, v in kw.items()}


def _path(rng: random.Random, q: Quiver, lo: int, hi: int, **kw: Any) -> Path:
    while True:
        p = random_path(rng, q, rng.randint(lo, hi), **kw)
        if p is not None:
            return p


def _closed(rng: random.Random, q: Quiver, lo: int, hi: int) -> Path:
    while True:
        p = random_closed_path(rng, q, rng.randint(lo, hi))
        if p is not None and cyclic_normalize(q, p)[1]:
            return p


# --------------------------------------------------------------------------
# wheel: wheelspace axioms
# --------------------------------------------------------------------------
WHEEL_QUIVERS = (loops(2), cyclic_two(), loops(2, star_parity=1))


def _cycle_to_front(m: int, k: int) -> Permutation:
    return Permutation.cycle(m, *range(1, k + 1)) if k > 1 else Permutation.identity(m)


def wheel_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "wheel"
    top = max(2, cfg.max_deg)
    plen = min(cfg.max_len, 3)

    def assoc() -> Iterator[Case]:
        rng = _rng(cfg, s, "contraction_associativity")
        for t in range(cfg.budget(210)):
            q = WHEEL_QUIVERS[t % 3]
            m = rng.randint(2, top)
            u = random_element(rng, q, m, plen, 2)
            k, l = rng.randint(1, m), rng.randint(1, m)
            i, j = rng.randint(1, m - 1), rng.randint(1, m - 1)
            ip, kp = (i, k - 1) if i < k else (i + 1, k)
            jp, lp = (j, l - 1) if j < l else (j + 1, l)
            lhs = contract(contract(u, k, l), i, j)
            rhs = contract(contract(u, ip, jp), kp, lp)
            yield lhs == rhs, _desc(u=u, indices=(i, j, k, l), lhs=lhs, rhs=rhs)

    def equivariance() -> Iterator[Case]:
        rng = _rng(cfg, s, "equivariance")
        for t in range(cfg.budget(210)):
            q = WHEEL_QUIVERS[t % 3]
            m = rng.randint(1, top)
            u = random_element(rng, q, m, plen, 2)
            i, j = rng.randint(1, m), rng.randint(1, m)
            lhs = contract(u, i, j)
            rhs = contract(wheel_act(_cycle_to_front(m, j), _cycle_to_front(m, i), u), 1, 1)
            yield lhs == rhs, _desc(u=u, i=i, j=j, lhs=lhs, rhs=rhs)

    def action() -> Iterator[Case]:
        rng = _rng(cfg, s, "action_axiom")
        for t in range(cfg.budget(100)):
            q = WHEEL_QUIVERS[t % 3]
            m = rng.randint(1, top)
            u = random_element(rng, q, m, plen, 2)
            a, b, c, d = (Permutation(rng.sample(range(1, m + 1), m)) for _ in range(4))
            lhs = wheel_act(a * b, c * d, u)
            rhs = wheel_act(a, c, wheel_act(b, d, u))
            yield lhs == rhs, _desc(u=u, lhs=lhs, rhs=rhs)

    def product() -> Iterator[Case]:
        rng = _rng(cfg, s, "product_laws")
        for t in range(cfg.budget(100)):
            q = WHEEL_QUIVERS[t % 3]
            m, n, p = (rng.randint(0, 2) for _ in range(3))
            u, v, w = (random_element(rng, q, k, plen, 2) for k in (m, n, p))
            ok = (u * v) * w == u * (v * w)
            sw = block_swap(n, m)
            uv = random_homogeneous(rng, q, m, plen, 2, terms=1)
            vv = random_homogeneous(rng, q, n, plen, 2, terms=1)
            if uv and vv:
                sign = -1 if parity(uv) and parity(vv) else 1
                ok = ok and uv * vv == wheel_act(sw, sw, vv * uv).scale(sign)
            if m >= 1:
                i, j = rng.randint(1, m), rng.randint(1, m)
                ok = ok and contract(u * v, i, j) == contract(u, i, j) * v
            yield ok, _desc(u=u, v=v, w=w)

    return [
        _run(s, "contraction_associativity", assoc()),
        _run(s, "equivariance", equivariance()),
        _run(s, "action_axiom", action()),
        _run(s, "product_laws", product()),
    ]


# --------------------------------------------------------------------------
# doublepoisson: double Poisson axioms on words of the doubled quiver
# --------------------------------------------------------------------------
DP_QUIVERS = (one_loop(), loops(2), kronecker(), cyclic_two(), loops(2, star_parity=1), cyclic_two(star_parity=1))


def _par(q: Quiver, p: Path) -> int:
    g = path_grade(q, p)
    return mask_dot(g, g)


def _word(q: Quiver, p: Path) -> NCPoly:
    return NCPoly(q, {p: 1})


def _left_bracket(a: NCPoly, t: Tensor) -> Tensor:
    """{{a, x (x) y}}_L = {{a, x}} (x) y."""
    q = a.quiver
    out = Tensor(q, 3)
    for (x, y), c in t.terms.items():
        for (u, v), d in double_bracket(a, _word(q, x)).terms.items():
            out = out + Tensor(q, 3, {(u, v, y): c * d})
    return out


def _dp_cases(cfg: CheckConfig, name: str):
    rng = _rng(cfg, "doublepoisson", name)
    n = cfg.budget(120)
    for t in range(n):
        q = DP_QUIVERS[t % len(DP_QUIVERS)]
        a = _path(rng, q, 1, cfg.max_len)
        b = _path(rng, q, 1, cfg.max_len, tail=a.head)
        c = _path(rng, q, 1, cfg.max_len, tail=b.head)
        yield q, [a, b, c]


def doublepoisson_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "doublepoisson"

    def skew() -> Iterator[Case]:
        for q, (a, b, _) in _dp_cases(cfg, "skew"):
            sp = q.star_parity
            A, B = _word(q, a), _word(q, b)
            sign = -((-1) ** ((_par(q, a) + sp) * (_par(q, b) + sp)))
            lhs = double_bracket(A, B)
            rhs = double_bracket(B, A).permute(Permutation((2, 1))).scale(sign)
            yield lhs == rhs, _desc(a=A, b=B, lhs=lhs, rhs=rhs)

    def leibniz() -> Iterator[Case]:
        for q, (a, b, c) in _dp_cases(cfg, "leibniz"):
            sp = q.star_parity
            A, B, C = _word(q, a), _word(q, b), _word(q, c)
            bc = ncpoly_mul(B, C)
            if not bc:
                continue
            sign = (-1) ** ((_par(q, a) + sp) * _par(q, b))
            lhs = double_bracket(A, bc)
            rhs = double_bracket(A, B).outer(NCPoly.one(q), C) + double_bracket(A, C).outer(B, NCPoly.one(q)).scale(sign)
            yield lhs == rhs, _desc(a=A, b=B, c=C, lhs=lhs, rhs=rhs)

    def poisson() -> Iterator[Case]:
        for q, (a, b, c) in _dp_cases(cfg, "first_argument_leibniz"):
            sp = q.star_parity
            A, B, C = _word(q, a), _word(q, b), _word(q, c)
            ab = ncpoly_mul(A, B)
            if not ab:
                continue
            # a * (u (x) v) = u (x) a v and (u (x) v) * b = u b (x) v, with Koszul signs
            inner = Tensor(q, 2)
            for (u, v), d in double_bracket(B, C).terms.items():
                w = path_compose(a, v)
                if w is not None:
                    sg = -1 if mask_dot(path_grade(q, a), path_grade(q, u)) else 1
                    inner = inner + Tensor(q, 2, {(u, w): d * sg})
            outer = Tensor(q, 2)
            for (u, v), d in double_bracket(A, C).terms.items():
                w = path_compose(u, b)
                if w is not None:
                    sg = -1 if mask_dot(path_grade(q, b), path_grade(q, v)) else 1
                    outer = outer + Tensor(q, 2, {(w, v): d * sg})
            sign = (-1) ** ((_par(q, c) + sp) * _par(q, b))
            lhs = double_bracket(ab, C)
            rhs = inner + outer.scale(sign)
            yield lhs == rhs, _desc(a=A, b=B, c=C, lhs=lhs, rhs=rhs)

    def jacobi() -> Iterator[Case]:
        cyc = Permutation((2, 3, 1))
        for q, (a, b, c) in _dp_cases(cfg, "jacobi"):
            sp = q.star_parity
            A, B, C = _word(q, a), _word(q, b), _word(q, c)
            pa, pb, pc = _par(q, a), _par(q, b), _par(q, c)
            t1 = _left_bracket(A, double_bracket(B, C))
            t2 = _left_bracket(B, double_bracket(C, A)).permute(cyc)
            t3 = _left_bracket(C, double_bracket(A, B)).permute(cyc * cyc)
            total = t1 + t2.scale((-1) ** ((pa + sp) * (pb + pc))) + t3.scale((-1) ** ((pc + sp) * (pa + pb)))
            yield not total, _desc(a=A, b=B, c=C, jacobiator=total)

    return [
        _run(s, "leibniz", leibniz()),
        _run(s, "skew_symmetry", skew()),
        _run(s, "first_argument_leibniz", poisson()),
        _run(s, "jacobi", jacobi()),
    ]


# --------------------------------------------------------------------------
# bialgebra: the necklace Lie bialgebra
# --------------------------------------------------------------------------
BIALG_QUIVERS = (one_loop(), loops(2), cyclic_two())


def _neck(q: Quiver, p: Path) -> WheelElement:
    return WheelElement.necklace(q, p)


def _bracket_slot(q: Quiver, a: WheelElement, t: Tensor, slot: int) -> Tensor:
    out = Tensor(q, t.arity)
    for k, c in t.terms.items():
        for (_, _, necks), d in necklace_bracket(a, _neck(q, k[slot])).terms.items():
            kk = list(k)
            kk[slot] = necks[0]
            out = out + Tensor(q, t.arity, {tuple(kk): c * d})
    return out


def _cobracket_first(q: Quiver, t: Tensor) -> Tensor:
    out = Tensor(q, 3)
    for (x, y), c in t.terms.items():
        for (u, v), d in necklace_cobracket(_neck(q, x)).terms.items():
            out = out + Tensor(q, 3, {(u, v, y): c * d})
    return out


def _cobracket_sum(q: Quiver, w: WheelElement) -> Tensor:
    out = Tensor(q, 2)
    for k, c in w.terms.items():
        out = out + necklace_cobracket(WheelElement(q, {k: c}))
    return out


def bialgebra_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "bialgebra"
    hi = max(1, cfg.max_len + 1)

    def necklaces(name: str, k: int):
        rng = _rng(cfg, s, name)
        for t in range(cfg.budget(80)):
            q = BIALG_QUIVERS[t % 3]
            yield q, [_neck(q, _closed(rng, q, 1, hi)) for _ in range(k)]

    def jacobi() -> Iterator[Case]:
        for q, (a, b, c) in necklaces("jacobi", 3):
            j = (
                necklace_bracket(a, necklace_bracket(b, c))
                + necklace_bracket(b, necklace_bracket(c, a))
                + necklace_bracket(c, necklace_bracket(a, b))
            )
            yield not j, _desc(a=a, b=b, c=c, jacobiator=j)

    def cojacobi() -> Iterator[Case]:
        cyc = Permutation((2, 3, 1))
        for q, (a,) in necklaces("cojacobi", 1):
            dd = _cobracket_first(q, necklace_cobracket(a))
            total = dd + dd.permute(cyc) + dd.permute(cyc * cyc)
            yield not total, _desc(a=a, cojacobiator=total)

    def involutive() -> Iterator[Case]:
        for q, (a,) in necklaces("involutivity", 1):
            out = WheelElement(q)
            for (x, y), c in necklace_cobracket(a).terms.items():
                out = out + necklace_bracket(_neck(q, x), _neck(q, y)).scale(c)
            yield not out, _desc(a=a, bracket_of_cobracket=out)

    def cocycle() -> Iterator[Case]:
        for q, (a, b) in necklaces("cocycle", 2):
            lhs = _cobracket_sum(q, necklace_bracket(a, b))
            da, db = necklace_cobracket(a), necklace_cobracket(b)
            rhs = (
                _bracket_slot(q, a, db, 0)
                + _bracket_slot(q, a, db, 1)
                - _bracket_slot(q, b, da, 0)
                - _bracket_slot(q, b, da, 1)
            )
            yield lhs == rhs, _desc(a=a, b=b, lhs=lhs, rhs=rhs)

    def compatibility() -> Iterator[Case]:
        rng = _rng(cfg, s, "lifted_compatibility")
        n = 0
        while n < cfg.budget(60):
            q = BIALG_QUIVERS[n % 3]
            a = _path(rng, q, 0, cfg.max_len)
            b = _path(rng, q, 0, cfg.max_len, tail=a.head)
            A, B = _word(q, a), _word(q, b)
            n += 1
            lhs = lifted_cobracket(ncpoly_mul(A, B))
            r1 = Tensor(q, 2)
            for (u, v), c in lifted_cobracket(A).terms.items():
                w = path_compose(u, b)
                if w is not None:
                    r1 = r1 + Tensor(q, 2, {(w, v): c})
            r2 = Tensor(q, 2)
            for (u, v), c in lifted_cobracket(B).terms.items():
                w = path_compose(a, u)
                if w is not None:
                    r2 = r2 + Tensor(q, 2, {(w, v): c})
            r3 = Tensor(q, 2)
            for (u, v), c in double_bracket(A, B).terms.items():
                if u.is_closed:
                    cu, sg = cyclic_normalize(q, u)
                    if sg:
                        r3 = r3 + Tensor(q, 2, {(v, cu): c * sg})
            ok = lhs == r1 + r2 + r3
            if a.is_closed and b.is_closed and a.word:
                ok = ok and pr(q, lifted_bracket(A, _neck(q, b))) == necklace_bracket(_neck(q, a), _neck(q, b))
            yield ok, _desc(a=A, b=B, lhs=lhs, rhs=r1 + r2 + r3)

    return [
        _run(s, "jacobi", jacobi()),
        _run(s, "cojacobi", cojacobi()),
        _run(s, "involutivity", involutive()),
        _run(s, "cocycle", cocycle()),
        _run(s, "lifted_compatibility", compatibility()),
    ]


# --------------------------------------------------------------------------
# bv: the trivial connection
# --------------------------------------------------------------------------
BV_QUIVERS = (loops(2, star_parity=1), cyclic_two(star_parity=1), kronecker(star_parity=1))


def _bv_identity(D: Callable[[WheelElement], WheelElement], a: WheelElement, b: WheelElement) -> tuple[bool, WheelElement, WheelElement]:
    pa = parity(a)
    lhs = D(a * b) - D(a) * b - (a * D(b)).scale((-1) ** pa)
    rhs = wheeled_bracket(a, b).scale((-1) ** (pa + 1))
    return lhs == rhs, lhs, rhs


def bv_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "bv"
    plen = min(cfg.max_len, 3)

    def elements(name: str, k: int):
        rng = _rng(cfg, s, name)
        for t in range(cfg.budget(210)):
            q = BV_QUIVERS[t % 3]
            out = []
            while len(out) < k:
                u = random_homogeneous(rng, q, rng.randint(0, 2), plen, 3, terms=2)
                if u:
                    out.append(u)
            yield q, out

    def square() -> Iterator[Case]:
        for q, (u,) in elements("square_zero", 1):
            d2 = bv_trivial(bv_trivial(u))
            yield not d2, _desc(u=u, D2u=d2)

    def identity() -> Iterator[Case]:
        for q, (a, b) in elements("bv_identity", 2):
            ok, lhs, rhs = _bv_identity(bv_trivial, a, b)
            yield ok, _desc(a=a, b=b, lhs=lhs, rhs=rhs)

    def contractions() -> Iterator[Case]:
        rng = _rng(cfg, s, "commutes_with_contraction")
        for t in range(cfg.budget(60)):
            q = BV_QUIVERS[t % 3]
            m = rng.randint(1, 3)
            u = random_element(rng, q, m, plen, 2)
            i, j = rng.randint(1, m), rng.randint(1, m)
            lhs = bv_trivial(contract(u, i, j))
            rhs = contract(bv_trivial(u), i, j)
            yield lhs == rhs, _desc(u=u, i=i, j=j, lhs=lhs, rhs=rhs)

    return [
        _run(s, "square_zero", square()),
        _run(s, "bv_identity", identity()),
        _run(s, "commutes_with_contraction", contractions()),
    ]


# --------------------------------------------------------------------------
# curvature: torsion, curvature trace and divergence
# --------------------------------------------------------------------------
CURV_QUIVERS = (loops(2, star_parity=1), cyclic_two(star_parity=1), one_loop(star_parity=1))


def _probe(rng: random.Random, q: Quiver, n: int) -> list[WheelElement]:
    out = []
    while len(out) < n:
        u = random_homogeneous(rng, q, rng.randint(0, 2), 3, 2, terms=2)
        if u:
            out.append(u)
    return out


def curvature_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "curvature"

    def torsion_eq() -> Iterator[Case]:
        rng = _rng(cfg, s, "torsion_formula")
        for t in range(cfg.budget(24)):
            conn = random_connection(rng, CURV_QUIVERS[t % 3], 2)
            q = conn.quiver
            ok = True
            bad = None
            for e in q.base_arrows:
                for f in q.base_arrows:
                    lhs = torsion_pairing(conn, e.index, f.index)
                    rhs = torsion_formula(conn, e.index, f.index)
                    if lhs != rhs:
                        ok, bad = False, (e.name, f.name, lhs, rhs)
            yield ok, _desc(connection=conn.to_json(), mismatch=bad)

    traces: dict[str, list[bool]] = {}

    def curvature(name: str, max_len: int, quivers) -> Iterator[Case]:
        rng = _rng(cfg, s, name)
        seen = traces.setdefault(name, [])
        for t in range(cfg.budget(8)):
            conn = random_torsion_free(rng, quivers[t % len(quivers)], max_len)
            tr = curvature_trace(conn)
            seen.append(bool(tr))
            for u in _probe(rng, conn.quiver, 8):
                u = rewrap(u, conn.quiver)
                d2 = rewrap(bv_operator(conn, bv_operator(conn, u)), conn.quiver)
                expected = -total_contraction(tr, u)
                ok = d2 == expected and (bool(tr) or not d2)
                yield ok, _desc(connection=conn.to_json(), trace=tr, u=u, D2u=d2, expected=expected)

    def divergence_eq() -> Iterator[Case]:
        rng = _rng(cfg, s, "divergence_determines_D")
        for t in range(cfg.budget(6)):
            q = CURV_QUIVERS[t % 3]
            qo, basis, kernel = constrained_connections(q, 3, with_divergence=True)
            c1 = random_torsion_free(rng, q, 3)
            vec = [Fraction(0)] * len(basis)
            for v in kernel:
                c = random_coeff(rng)
                vec = [a + c * b for a, b in zip(vec, v)]
            c2 = c1 + connection_from_vector(qo, basis, vec)
            ok = not torsion(c2) and divergence(c1) == divergence(c2)
            for u in _probe(rng, q, 6):
                u = rewrap(u, qo)
                ok = ok and bv_operator(c1, u) == bv_operator(c2, u)
            yield ok, _desc(first=c1.to_json(), second=c2.to_json())

    out = [
        _run(s, "torsion_formula", torsion_eq()),
        _run(s, "trace_flat_square_zero", curvature("trace_flat_square_zero", 2, CURV_QUIVERS)),
        _run(s, "curvature_law", curvature("curvature_law", 3, CURV_QUIVERS[:2])),
        _run(s, "divergence_determines_D", divergence_eq()),
    ]
    for r in out:
        if r.name in traces:
            seen = traces[r.name]
            r.notes.append(f"{sum(seen)} of {len(seen)} connections have nonzero tr(nabla^2)")
    law = out[2]
    if not any(traces["curvature_law"]):
        # the law would only have been exercised with tr = 0
        law.failures += 1
        law.counterexample = {"reason": "no sampled connection had a nonzero curvature trace"}
    return out


# --------------------------------------------------------------------------
# diffops: filtration, shadow relations, principal symbols
# --------------------------------------------------------------------------
OP_QUIVERS = (loops(2), cyclic_two(), one_loop())


def _random_op(rng: random.Random, q: Quiver, max_order: int) -> WheeledDiffOp:
    while True:
        w = random_homogeneous(rng, q, rng.randint(0, 1), 2, max_order, terms=2)
        if w:
            return WheeledDiffOp(w)


def _generators(q: Quiver) -> list[WheelElement]:
    out = []
    for a in q.arrows:
        if a.stratum in ("base", "star"):
            p = Path(a.tail, a.head, (a.index,))
            out.append(WheelElement.from_path(q, p))
            if a.tail == a.head:
                out.append(WheelElement.necklace(q, p))
    return out


def diffops_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "diffops"

    def filtration() -> Iterator[Case]:
        rng = _rng(cfg, s, "filtration")
        for t in range(cfg.budget(60)):
            q = OP_QUIVERS[t % 3]
            d1, d2 = _random_op(rng, q, 2), _random_op(rng, q, 2)
            comp = compose_ops(d1, d2)
            com = commutator(d1, d2)
            ok = comp.order <= d1.order + d2.order
            ok = ok and (not com.symbol or com.order <= d1.order + d2.order - 1)
            yield ok, _desc(d1=d1, d2=d2, composite=comp, commutator=com)

    def homomorphism() -> Iterator[Case]:
        rng = _rng(cfg, s, "action_homomorphism")
        for t in range(cfg.budget(60)):
            q = OP_QUIVERS[t % 3]
            d1, d2 = _random_op(rng, q, 2), _random_op(rng, q, 2)
            u = random_element(rng, q, rng.randint(0, 2), 3, 2)
            lhs = apply_op(compose_ops(d1, d2), u)
            rhs = apply_op(d1, apply_op(d2, u))
            yield lhs == rhs, _desc(d1=d1, d2=d2, u=u, lhs=lhs, rhs=rhs)

    def top_symbol() -> Iterator[Case]:
        rng = _rng(cfg, s, "symbol_detects_order")
        for t in range(cfg.budget(40)):
            q = OP_QUIVERS[t % 3]
            d = _random_op(rng, q, 2)
            k = d.order
            args = []
            while len(args) < k + 1:
                a = random_element(rng, q, 1, 2, 1, necks=0, strata=("base",))
                if a:
                    args.append(a)
            g = principal_symbol(d, args)
            yield not g, _desc(op=d, args=[str(a) for a in args], symbol=g)

    def shadow() -> Iterator[Case]:
        rng = _rng(cfg, s, "shadow_relations")
        basis = ("x", "y")
        for t in range(cfg.budget(30)):
            v = {b: random_coeff(rng) for b in basis if rng.random() < 0.8}
            w = {b: random_coeff(rng) for b in basis if rng.random() < 0.8}
            phi = {a: {b: random_coeff(rng) for b in basis if rng.random() < 0.6} for a in basis}
            psi = {a: {b: random_coeff(rng) for b in basis if rng.random() < 0.6} for a in basis}
            u: dict = {}
            for _ in range(3):
                word = tuple(rng.choice(basis) for _ in range(rng.randint(1, 3)))
                u[word] = u.get(word, 0) + random_coeff(rng)
            ok = not {k: c for k, c in t_commutator(t_lambda(v), t_lambda(w), 1, 1)(u).items() if c}
            lhs = t_commutator(t_derivation(phi), t_lambda(v), 0, 1)(u)
            ok = ok and _clean(lhs) == _clean(t_lambda(apply_phi(phi, v))(u))
            lhs = t_commutator(t_derivation(phi), t_derivation(psi), 0, 0)(u)
            ok = ok and _clean(lhs) == _clean(t_derivation(phi_bracket(phi, psi))(u))
            yield ok, _desc(v=v, w=w, phi=phi, psi=psi, u=u)

    def gamma2() -> Iterator[Case]:
        rng = _rng(cfg, s, "gamma2_bracket")
        for t in range(cfg.budget(4)):
            conn = random_torsion_free(rng, loops(2, star_parity=1), 2)
            gens = _generators(conn.quiver)
            for a in gens:
                for b in gens:
                    g = principal_symbol(lambda u: bv_operator(conn, u), [a, b])
                    br = wheeled_bracket(a, b).scale((-1) ** (parity(a) + 1))
                    yield g == br, _desc(connection=conn.to_json(), a=a, b=b, symbol=g, bracket=br)

    return [
        _run(s, "filtration", filtration()),
        _run(s, "action_homomorphism", homomorphism()),
        _run(s, "symbol_detects_order", top_symbol()),
        _run(s, "shadow_relations", shadow()),
        _run(s, "gamma2_bracket", gamma2()),
    ]


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


# --------------------------------------------------------------------------
# oracle: representation functor
# --------------------------------------------------------------------------
ORACLE_QUIVERS = (one_loop(), loops(2), cyclic_two())


def oracle_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "oracle"
    hi = max(1, min(cfg.max_len + 1, 5))

    def poisson() -> Iterator[Case]:
        rng = _rng(cfg, s, "poisson")
        for t in range(cfg.budget(30)):
            q = ORACLE_QUIVERS[t % 3]
            d = cfg.dims[t % len(cfg.dims)]
            a = _neck(q, _closed(rng, q, 1, hi))
            b = _neck(q, _closed(rng, q, 1, hi))
            pt = RepPoint.symbolic(q, DimVector.of(q, d))
            lhs = ev_scalar(necklace_bracket(a, b), pt)
            rhs = matrix_poisson(ev_scalar(a, pt), ev_scalar(b, pt))
            yield lhs == rhs, _desc(a=a, b=b, d=d, lhs=lhs, rhs=rhs)

    def laplacian() -> Iterator[Case]:
        rng = _rng(cfg, s, "laplacian")
        for t in range(cfg.budget(30)):
            q = ORACLE_QUIVERS[t % 3].with_options(star_parity=1)
            d = cfg.dims[t % len(cfg.dims)]
            u = _neck(q, _closed(rng, q, 1, hi))
            if rng.random() < 0.5:
                u = u * _neck(q, _closed(rng, q, 1, 2))
            pt = RepPoint.symbolic(q, DimVector.of(q, d))
            lhs = ev_scalar(bv_trivial(u), pt)
            rhs = odd_laplacian(ev_scalar(u, pt))
            yield lhs == rhs and not odd_laplacian(rhs), _desc(u=u, d=d, lhs=lhs, rhs=rhs)

    def homomorphism() -> Iterator[Case]:
        rng = _rng(cfg, s, "evaluation_homomorphism")
        for t in range(cfg.budget(30)):
            q = (loops(2), cyclic_two(), loops(2, star_parity=1))[t % 3]
            d = (1, 2, 3)[t % 3]
            u = random_element(rng, q, 1, 3, 2)
            v = random_element(rng, q, 1, 2, 1)
            pt = RepPoint.symbolic(q, DimVector.of(q, d))
            w = u * v
            ok = ev_wheel(w, pt) == ev_wheel(u, pt) * ev_wheel(v, pt)
            i, j = rng.randint(1, 2), rng.randint(1, 2)
            ok = ok and ev_wheel(contract(w, i, j), pt) == ev_wheel(w, pt).contract(i, j)
            yield ok, _desc(u=u, v=v, d=d, i=i, j=j)

    def rank() -> Iterator[Case]:
        cases = [
            (loops(2), {"v": 2}),
            (cyclic_two(), {"v": 2, "w": 3}),
            (kronecker(), {"v": 3, "w": 2}),
            (one_loop(), {"v": 3}),
        ]
        for q, dims in cases:
            dv = DimVector.of(q, dims)
            got = ev_scalar(rank_element(q), RepPoint.symbolic(q, dv))
            want = rep_dimension(q, dv)
            yield got == want, _desc(quiver=q, dims=dims, got=got, want=want)

    return [
        _run(s, "poisson", poisson()),
        _run(s, "laplacian", laplacian()),
        _run(s, "evaluation_homomorphism", homomorphism()),
        _run(s, "rank", rank()),
    ]


# --------------------------------------------------------------------------
# weil: sp(2) from symmetrized quadratic operators
# --------------------------------------------------------------------------
def weil_suite(cfg: CheckConfig) -> list[PropertyResult]:
    s = "weil"

    def relations() -> Iterator[Case]:
        q = one_loop()
        triple = sp2_triple()
        ops = sp2_weil(q)
        for a in "efh":
            yield ops[a] == weyl_image(q, triple[a]), _desc(name=a, op=ops[a])
            for b in "efh":
                lhs = commutator(ops[a], ops[b])
                rhs = weyl_image(q, weyl_commutator(triple[a], triple[b]))
                yield lhs == rhs, _desc(pair=a + b, lhs=lhs, rhs=rhs)

    return [_run(s, "sp2_relations", relations())]


SUITES: dict[str, Callable[[CheckConfig], list[PropertyResult]]] = {
    "wheel": wheel_suite,
    "doublepoisson": doublepoisson_suite,
    "bialgebra": bialgebra_suite,
    "bv": bv_suite,
    "curvature": curvature_suite,
    "diffops": diffops_suite,
    "oracle": oracle_suite,
    "weil": weil_suite,
}


def run_suite(name: str, cfg: CheckConfig = CheckConfig()) -> list[PropertyResult]:
    if name == "all":
        return [r for n in SUITES for r in SUITES[n](cfg)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg)
