"""Expression language for paths, necklaces, wheel elements and operators.

The grammar is documented in docs/grammar.md.  Parsing is quiver independent;
names are resolved when the tree is evaluated against a quiver.  A ``*``
written directly after a name belongs to the name (``x*`` is the star arrow),
so the product operator needs whitespace on its left after a name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .diffops import WheeledDiffOp, weil_element
from .paths import NCPoly, Path
from .perm import Permutation
from .quiver import Quiver, QuiverError
from .wheels import WheelElement, WheelError, closure, contract, wheel_act


class ParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column
        self.message = message


class EvalError(ValueError):
    pass


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Token:
    kind: str  # INT, NAME, OP, END
    text: str
    column: int  # 1-based


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*\*?)
  | (?P<op>[-+*#/()\[\]<>,])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind.upper(), m.group(), pos + 1))
        pos = m.end()
    out.append(Token("END", "", len(text) + 1))
    return out


# --------------------------------------------------------------------------
# Syntax tree
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    column: int


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * # juxt
    left: "Node"
    right: "Node"
    column: int


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Cyclic:
    arg: "Node"
    column: int


@dataclass(frozen=True)
class Wiring:
    cycles: tuple[tuple[int, ...], ...]
    entries: tuple["Node", ...]
    column: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"
    column: int


Node = Union[Num, Name, BinOp, Neg, Cyclic, Wiring, Call]

FUNCTIONS = ("dd", "mul", "op", "weil")
_ATOM_START = {"INT", "NAME"}
_ATOM_OPS = {"(", "[", "<"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str, opened: Token | None = None) -> Token:
        t = self.tok
        if t.kind == "OP" and t.text == text:
            return self.advance()
        if t.kind == "END" and opened is not None:
            raise ParseError(f"unclosed {opened.text!r}", opened.column)
        raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.column)

    def at(self, *texts: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text in texts

    def parse(self) -> Node:
        if self.tok.kind == "END":
            raise ParseError("empty expression", 1)
        node = self.sum()
        if self.tok.kind != "END":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.column)
        return node

    def sum(self) -> Node:
        if self.at("-"):
            self.advance()
            node: Node = Neg(self.tensor())
        else:
            node = self.tensor()
        while self.at("+", "-"):
            t = self.advance()
            node = BinOp(t.text, node, self.tensor(), t.column)
        return node

    def tensor(self) -> Node:
        node = self.product()
        while self.at("#"):
            t = self.advance()
            node = BinOp("#", node, self.product(), t.column)
        return node

    def product(self) -> Node:
        node = self.juxt()
        while self.at("*"):
            t = self.advance()
            node = BinOp("*", node, self.juxt(), t.column)
        return node

    def juxt(self) -> Node:
        node = self.unary()
        while self.tok.kind in _ATOM_START or (self.tok.kind == "OP" and self.tok.text in _ATOM_OPS):
            col = self.tok.column
            node = BinOp("juxt", node, self.atom(), col)
        return node

    def unary(self) -> Node:
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            if self.at("/"):
                self.advance()
                d = self.tok
                if d.kind != "INT":
                    raise ParseError("expected a denominator", d.column)
                self.advance()
                if int(d.text) == 0:
                    raise ParseError("zero denominator", d.column)
                return Num(Fraction(int(t.text), int(d.text)))
            return Num(Fraction(int(t.text)))
        if t.kind == "NAME":
            self.advance()
            if t.text == "perm" and self.at("("):
                return self.wiring(t)
            if t.text in FUNCTIONS and self.at("("):
                opened = self.advance()
                arg = self.inner(opened)
                self.expect(")", opened)
                return Call(t.text, arg, t.column)
            return Name(t.text, t.column)
        if self.at("("):
            opened = self.advance()
            node = self.inner(opened)
            self.expect(")", opened)
            return node
        if self.at("["):
            opened = self.advance()
            node = self.inner(opened)
            self.expect("]", opened)
            return Cyclic(node, t.column)
        if self.at("<"):
            return self.entries(t, ())
        if t.kind == "END":
            raise ParseError("unexpected end of input", t.column)
        raise ParseError(f"unexpected {t.text!r}", t.column)

    def inner(self, opened: Token) -> Node:
        if self.tok.kind == "END":
            raise ParseError(f"unclosed {opened.text!r}", opened.column)
        return self.sum()

    def wiring(self, start: Token) -> Node:
        opened = self.expect("(")
        cycles = []
        while self.at("("):
            inner = self.advance()
            pts = []
            while self.tok.kind == "INT":
                pts.append(int(self.advance().text))
            self.expect(")", inner)
            if pts:
                cycles.append(tuple(pts))
        self.expect(")", opened)
        if not self.at("<"):
            raise ParseError("expected '<' after perm(...)", self.tok.column)
        return self.entries(start, tuple(cycles))

    def entries(self, start: Token, cycles) -> Node:
        opened = self.expect("<")
        items = [self.inner(opened)]
        while self.at(","):
            self.advance()
            items.append(self.inner(opened))
        self.expect(">", opened)
        return Wiring(cycles, tuple(items), start.column)


def parse_expr(text: str) -> Node:
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------
Value = Union[Fraction, WheelElement, WheeledDiffOp]


def _as_wheel(q: Quiver, v: Value, column: int) -> WheelElement:
    if isinstance(v, Fraction):
        return WheelElement.scalar(q, v)
    if isinstance(v, WheelElement):
        return v
    raise EvalError(f"column {column}: expected a wheel element, got an operator")


def _as_op(q: Quiver, v: Value, column: int) -> WheeledDiffOp:
    if isinstance(v, WheeledDiffOp):
        return v
    if isinstance(v, Fraction):
        return WheeledDiffOp.identity(q).scale(v)
    raise EvalError(f"column {column}: expected an operator, got a wheel element")


def _scale(v: Value, c: Fraction) -> Value:
    return v * c if isinstance(v, Fraction) else v.scale(c)


def concat(u: WheelElement, v: WheelElement) -> WheelElement:
    """Product in A extended to F_1: glue the output of u to the input of v."""
    for w in (u, v):
        if w and w.degrees() != {1}:
            raise EvalError("juxtaposition joins F_1 elements (paths); use * for the wheel product")
    if not u or not v:
        return WheelElement(u.quiver)
    return contract(u * v, 1, 2)


def cyclic_closure(u: WheelElement) -> WheelElement:
    """[u]: glue output k to input k+1 and close up, giving an F_0 element."""
    degs = u.degrees()
    if not u:
        return u
    if len(degs) != 1 or 0 in degs:
        raise EvalError("[...] needs a homogeneous element of positive wheel degree")
    m = degs.pop()
    for _ in range(m - 1):
        u = contract(u, 1, 2)
    return closure(u)


class Evaluator:
    def __init__(self, q: Quiver):
        self.q = q

    def __call__(self, node: Node) -> Value:
        try:
            return self.eval(node)
        except (WheelError, QuiverError) as exc:
            raise EvalError(str(exc)) from exc

    def eval(self, node: Node) -> Value:
        q = self.q
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            return self.name(node)
        if isinstance(node, Neg):
            return _scale(self.eval(node.arg), Fraction(-1))
        if isinstance(node, Cyclic):
            return cyclic_closure(_as_wheel(q, self.eval(node.arg), node.column))
        if isinstance(node, Wiring):
            return self.wiring(node)
        if isinstance(node, Call):
            return self.call(node)
        a, b = self.eval(node.left), self.eval(node.right)
        col = node.column
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return {"+": a + b, "-": a - b, "*": a * b, "juxt": a * b, "#": a * b}[node.op]
        if node.op in ("*", "juxt", "#") and isinstance(a, Fraction):
            return _scale(b, a)
        if node.op in ("*", "juxt", "#") and isinstance(b, Fraction):
            return _scale(a, b)
        if isinstance(a, WheeledDiffOp) or isinstance(b, WheeledDiffOp):
            if node.op == "#":
                raise EvalError(f"column {col}: operators have no tensor product")
            x, y = _as_op(q, a, col), _as_op(q, b, col)
            return {"+": lambda: x + y, "-": lambda: x - y}.get(node.op, lambda: x @ y)()
        x, y = _as_wheel(q, a, col), _as_wheel(q, b, col)
        if node.op == "+":
            return x + y
        if node.op == "-":
            return x - y
        if node.op == "juxt":
            try:
                return concat(x, y)
            except EvalError as exc:
                raise EvalError(f"column {col}: {exc}") from None
        return x * y

    def name(self, node: Name) -> WheelElement:
        q = self.q
        if q.has_arrow(node.name):
            a = q.arrow(node.name)
            return WheelElement.from_path(q, Path(a.tail, a.head, (a.index,)))
        if node.name.startswith("e_") and node.name[2:] in q.vertices:
            v = node.name[2:]
            return WheelElement.from_path(q, Path(v, v, ()))
        raise EvalError(f"column {node.column}: unknown name {node.name!r}")

    def wiring(self, node: Wiring) -> WheelElement:
        q = self.q
        m = len(node.entries)
        parts = []
        for e in node.entries:
            w = _as_wheel(q, self.eval(e), node.column)
            if w and w.degrees() != {1}:
                raise EvalError(f"column {node.column}: entries of <...> must lie in F_1")
            parts.append(w)
        try:
            sigma = Permutation.from_cycles(m, node.cycles)
        except ValueError as exc:
            raise EvalError(f"column {node.column}: {exc}") from None
        out = parts[0]
        for p in parts[1:]:
            out = out * p
        return wheel_act(sigma, Permutation.identity(m), out)

    def call(self, node: Call) -> WheeledDiffOp:
        q = self.q
        w = _as_wheel(q, self.eval(node.arg), node.column)
        if node.func == "mul":
            return WheeledDiffOp.multiplier(w)
        if node.func == "dd":
            return WheeledDiffOp.theta(w)
        if node.func == "weil":
            return weil_element(w)
        return WheeledDiffOp(w)


def eval_expr(q: Quiver, node: Node | str) -> Value:
    if isinstance(node, str):
        node = parse_expr(node)
    return Evaluator(q)(node)


def parse_wheel(q: Quiver, text: str) -> WheelElement:
    v = eval_expr(q, text)
    if isinstance(v, WheeledDiffOp):
        raise EvalError("expected a wheel element, got an operator")
    return _as_wheel(q, v, 1)


def parse_op(q: Quiver, text: str) -> WheeledDiffOp:
    return _as_op(q, eval_expr(q, text), 1)


def parse_ncpoly(q: Quiver, text: str) -> NCPoly:
    """A linear combination of paths (an F_1 element without necklaces)."""
    return to_ncpoly(parse_wheel(q, text))


def to_ncpoly(w: WheelElement) -> NCPoly:
    out = NCPoly(w.quiver)
    for (perm, strands, necks), c in w.terms.items():
        if len(strands) != 1 or necks:
            raise EvalError("element is not a combination of paths")
        out = out + NCPoly(w.quiver, {strands[0]: c})
    return out
