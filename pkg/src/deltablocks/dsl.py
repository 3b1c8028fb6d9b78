"""Textual syntax for model libraries (.dbm), deltas (.dbd) and products (.dbp).

Hand-written lexer and recursive-descent parser, plus canonical renderers.
``render_*(parse_*(s))`` re-parses to a structurally equal value.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .delta import (
    AddConnection, AddModelRef, AddPort, AddSubsystem, After, And, AocExpr, BlockSel,
    ConnectionSel, Delta, DeltaOp, Direction, ModelSub, ModifyModel, ModifySubsystem, Not, Or,
    PortSel, ProductConfiguration, Remove, Replace, SubsystemSub, TrueAoc, conjoin,
)
from .model import (
    KEYWORDS, Boundary, ChildPort, Connection, Context, Endpoint, Model, ModelLibrary,
    ModelReference, Pos, Subsystem,
)


class ParseError(Exception):
    """Positioned failure while reading DSL text.

    ``code`` is ``SyntaxError`` for grammar violations, otherwise one of
    ``DuplicateName``, ``EmptyDelta``, ``DuplicateProductName``.
    """

    def __init__(self, code: str, pos: Pos, message: str, expected: tuple[str, ...] = ()):
        self.code = code
        self.pos = pos
        self.message = message
        self.expected = expected
        text = f"{pos}: {code}: {message}"
        if expected:
            text += f" (expected {', '.join(expected)})"
        super().__init__(text)


# -- lexer --------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str   # 'id', 'kw', 'sym', 'eof'
    text: str
    pos: Pos


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|&&|\|\||[{}(),:.!])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, line_start = 0, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        pos = Pos(line, i - line_start + 1)
        if m is None:
            raise ParseError("SyntaxError", pos, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        s = m.group()
        if kind == "id":
            tokens.append(Token("kw" if s in KEYWORDS else "id", s, pos))
        elif kind == "sym":
            tokens.append(Token("sym", s, pos))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = i + s.rindex("\n") + 1
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return tokens


# -- parser -------------------------------------------------------------------------

def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"

    def fail(self, *expected: str) -> ParseError:
        return ParseError("SyntaxError", self.tok.pos, f"unexpected {_describe(self.tok)}", expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            raise self.fail("identifier")
        self.i += 1
        return t.text

    # models

    def model(self) -> Model:
        pos = self.expect("model").pos
        name = self.ident()
        return Model(name, self.body(), pos)

    def body(self) -> Context:
        self.expect("{")
        b = _ContextBuilder()
        while not self.accept("}"):
            self.decl(b)
        return b.build()

    def decl(self, b: "_ContextBuilder") -> None:
        t = self.tok
        if self.accept("in") or self.accept("out"):
            target = b.in_ports if t.text == "in" else b.out_ports
            while True:
                pos = self.tok.pos
                name = self.ident()
                b.declare(name, pos)
                target.append(name)
                if not self.accept(","):
                    break
        elif self.accept("mref"):
            name = self.ident()
            self.expect(":")
            b.add_block(ModelReference(name, self.ident(), t.pos))
        elif self.accept("subsystem"):
            name = self.ident()
            b.add_block(Subsystem(name, self.body(), t.pos))
        elif self.accept("connect"):
            src = self.endpoint()
            self.expect("->")
            b.connections.append(Connection(src, self.endpoint(), t.pos))
        else:
            raise self.fail("'in'", "'out'", "'mref'", "'subsystem'", "'connect'", "'}'")

    def endpoint(self) -> Endpoint:
        first = self.ident()
        if self.accept("."):
            return ChildPort(first, self.ident())
        return Boundary(first)

    # deltas

    def delta(self) -> Delta:
        pos = self.expect("delta").pos
        name = self.ident()
        self.expect("{")
        aocs = []
        while self.accept("aoc"):
            aocs.append(self.aoc_expr())
        mods = []
        while self.at("modify"):
            mods.append(self.modify_model())
        if not self.at("}"):
            raise self.fail("'modify'", "'aoc'" if not mods else "'}'")
        if not mods:
            raise ParseError("EmptyDelta", self.tok.pos, f"delta {name!r} has no modify block")
        self.expect("}")
        return Delta(name, tuple(mods), conjoin(aocs), pos)

    def aoc_expr(self) -> AocExpr:
        # '||' binds weakest, then '&&', then '!'
        left = self.aoc_conj()
        while self.accept("||"):
            left = Or(left, self.aoc_conj())
        return left

    def aoc_conj(self) -> AocExpr:
        left = self.aoc_term()
        while self.accept("&&"):
            left = And(left, self.aoc_term())
        return left

    def aoc_term(self) -> AocExpr:
        negate = self.accept("!")
        if self.accept("after"):
            e: AocExpr = After(self.ident())
        elif self.accept("("):
            e = self.aoc_expr()
            self.expect(")")
        else:
            raise self.fail("'after'", "'('")
        return Not(e) if negate else e

    def modify_model(self) -> ModifyModel:
        pos = self.expect("modify").pos
        self.expect("model")
        name = self.ident()
        return ModifyModel(name, self.op_block(), pos)

    def op_block(self) -> tuple[DeltaOp, ...]:
        self.expect("{")
        ops = []
        while not self.accept("}"):
            ops.append(self.op())
        return tuple(ops)

    def op(self) -> DeltaOp:
        pos = self.tok.pos
        if self.accept("add"):
            if self.accept("in"):
                return AddPort(Direction.IN, self.ident(), pos)
            if self.accept("out"):
                return AddPort(Direction.OUT, self.ident(), pos)
            if self.accept("mref"):
                name = self.ident()
                self.expect(":")
                return AddModelRef(name, self.ident(), pos)
            if self.accept("subsystem"):
                name = self.ident()
                return AddSubsystem(name, self.body(), pos)
            if self.accept("connect"):
                src = self.endpoint()
                self.expect("->")
                return AddConnection(src, self.endpoint(), pos)
            raise self.fail("'in'", "'out'", "'mref'", "'subsystem'", "'connect'")
        if self.accept("remove"):
            weak = self.accept("weak")
            if self.accept("in"):
                return Remove(PortSel(Direction.IN, self.ident()), weak, pos)
            if self.accept("out"):
                return Remove(PortSel(Direction.OUT, self.ident()), weak, pos)
            if self.accept("block"):
                return Remove(BlockSel(self.ident()), weak, pos)
            if self.accept("connect"):
                src = self.endpoint()
                self.expect("->")
                return Remove(ConnectionSel(src, self.endpoint()), weak, pos)
            raise self.fail(*(["'weak'"] if not weak else []), "'in'", "'out'", "'block'", "'connect'")
        if self.accept("replace"):
            target = self.ident()
            self.expect("with")
            if self.accept("model"):
                ref = self.ident()
                self.expect("as")
                return Replace(target, ModelSub(ref, self.ident()), pos)
            if self.accept("subsystem"):
                name = self.ident()
                return Replace(target, SubsystemSub(name, self.body()), pos)
            raise self.fail("'model'", "'subsystem'")
        if self.accept("modify"):
            self.expect("subsystem")
            name = self.ident()
            return ModifySubsystem(name, self.op_block(), pos)
        raise self.fail("'add'", "'remove'", "'replace'", "'modify'", "'}'")

    # products

    def product(self) -> ProductConfiguration:
        pos = self.expect("product").pos
        name = self.ident()
        self.expect("{")
        self.expect("deltas")
        names: list[str] = []
        if self.tok.kind == "id":
            while True:
                dpos = self.tok.pos
                d = self.ident()
                if d in names:
                    raise ParseError("DuplicateName", dpos, f"delta {d!r} listed twice in product {name!r}")
                names.append(d)
                if not self.accept(","):
                    break
        self.expect("}")
        return ProductConfiguration(name, frozenset(names), pos)


class _ContextBuilder:
    def __init__(self):
        self.in_ports: list[str] = []
        self.out_ports: list[str] = []
        self.blocks: list = []
        self.connections: list[Connection] = []
        self._names: set[str] = set()

    def declare(self, name: str, pos: Pos) -> None:
        if name in self._names:
            raise ParseError("DuplicateName", pos, f"name {name!r} already declared in this context")
        self._names.add(name)

    def add_block(self, block) -> None:
        self.declare(block.name, block.pos)
        self.blocks.append(block)

    def build(self) -> Context:
        return Context(tuple(self.in_ports), tuple(self.out_ports),
                       tuple(self.blocks), tuple(self.connections))


def _guarded(fn):
    def wrapper(text: str):
        try:
            return fn(text)
        except RecursionError:
            raise ParseError("SyntaxError", Pos(1, 1), "input nested too deeply") from None
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_guarded
def parse_library(text: str) -> ModelLibrary:
    p = _Parser(text)
    models: list[Model] = []
    seen: set[str] = set()
    while not p.at_eof():
        if not p.at("model"):
            raise p.fail("'model'")
        m = p.model()
        if m.name in seen:
            raise ParseError("DuplicateName", m.pos, f"model {m.name!r} defined twice")
        seen.add(m.name)
        models.append(m)
    return ModelLibrary(tuple(models))


@_guarded
def parse_deltas(text: str) -> list[Delta]:
    """Parse every delta declared in ``text``."""
    p = _Parser(text)
    out: list[Delta] = []
    while not p.at_eof():
        if not p.at("delta"):
            raise p.fail("'delta'")
        d = p.delta()
        if any(o.name == d.name for o in out):
            raise ParseError("DuplicateName", d.pos, f"delta {d.name!r} defined twice")
        out.append(d)
    return out


def parse_delta(text: str) -> Delta:
    deltas = parse_deltas(text)
    if len(deltas) != 1:
        raise ParseError("SyntaxError", Pos(1, 1), f"expected exactly one delta, found {len(deltas)}")
    return deltas[0]


@_guarded
def parse_products(text: str) -> list[ProductConfiguration]:
    p = _Parser(text)
    out: list[ProductConfiguration] = []
    while not p.at_eof():
        if not p.at("product"):
            raise p.fail("'product'")
        prod = p.product()
        if any(o.name == prod.name for o in out):
            raise ParseError("DuplicateProductName", prod.pos, f"product {prod.name!r} defined twice")
        out.append(prod)
    return out


# -- rendering ----------------------------------------------------------------------

INDENT = "    "


def _render_context(ctx: Context, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = [f"{pad}in {p}" for p in ctx.in_ports]
    lines += [f"{pad}out {p}" for p in ctx.out_ports]
    for b in ctx.blocks:
        if isinstance(b, ModelReference):
            lines.append(f"{pad}mref {b.name} : {b.ref_model}")
        else:
            lines += _render_braced(f"{pad}subsystem {b.name}", _render_context(b.body, depth + 1), pad)
    lines += [f"{pad}connect {c.source} -> {c.target}" for c in ctx.connections]
    return lines


def _render_braced(head: str, inner: list[str], pad: str) -> list[str]:
    if not inner:
        return [head + " { }"]
    return [head + " {", *inner, pad + "}"]


def render_library(lib: ModelLibrary) -> str:
    chunks = ["\n".join(_render_braced(f"model {m.name}", _render_context(m.body, 1), "")) + "\n"
              for m in lib]
    return "\n".join(chunks)


_PREC = {Or: 1, And: 2, Not: 3, After: 4}


def render_aoc(expr: AocExpr, parent: int = 0) -> str:
    if isinstance(expr, After):
        return f"after {expr.delta}"
    if isinstance(expr, Not):
        inner = expr.expr
        body = render_aoc(inner) if isinstance(inner, After) else f"({render_aoc(inner)})"
        return "!" + body
    if isinstance(expr, (And, Or)):
        prec = _PREC[type(expr)]
        op = " && " if isinstance(expr, And) else " || "
        # left-associative: right operand of equal precedence needs parens
        s = render_aoc(expr.left, prec) + op + render_aoc(expr.right, prec + 1)
        return f"({s})" if prec < parent else s
    raise ValueError("the trivially true constraint has no textual form inside an expression")


def _endpoint_pair(a: Endpoint, b: Endpoint) -> str:
    return f"{a} -> {b}"


def _render_op(op: DeltaOp, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(op, AddPort):
        return [f"{pad}add {op.direction.value} {op.name}"]
    if isinstance(op, AddModelRef):
        return [f"{pad}add mref {op.name} : {op.ref_model}"]
    if isinstance(op, AddSubsystem):
        return _render_braced(f"{pad}add subsystem {op.name}", _render_context(op.body, depth + 1), pad)
    if isinstance(op, AddConnection):
        return [f"{pad}add connect {_endpoint_pair(op.source, op.target)}"]
    if isinstance(op, Remove):
        weak = "weak " if op.weak else ""
        sel = op.selector
        if isinstance(sel, PortSel):
            what = f"{sel.direction.value} {sel.name}"
        elif isinstance(sel, BlockSel):
            what = f"block {sel.name}"
        else:
            what = f"connect {_endpoint_pair(sel.source, sel.target)}"
        return [f"{pad}remove {weak}{what}"]
    if isinstance(op, Replace):
        sub = op.substitute
        if isinstance(sub, ModelSub):
            return [f"{pad}replace {op.target_block} with model {sub.ref_model} as {sub.new_block_name}"]
        return _render_braced(f"{pad}replace {op.target_block} with subsystem {sub.new_block_name}",
                              _render_context(sub.body, depth + 1), pad)
    if isinstance(op, ModifySubsystem):
        inner = [line for o in op.ops for line in _render_op(o, depth + 1)]
        return _render_braced(f"{pad}modify subsystem {op.name}", inner, pad)
    raise TypeError(f"not a delta operation: {op!r}")


def render_delta(delta: Delta) -> str:
    lines = [f"delta {delta.name} {{"]
    if not isinstance(delta.aoc, TrueAoc):
        lines.append(f"{INDENT}aoc {render_aoc(delta.aoc)}")
    for mm in delta.modifications:
        inner = [line for o in mm.ops for line in _render_op(o, 2)]
        lines += _render_braced(f"{INDENT}modify model {mm.target_model}", inner, INDENT)
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_products(products: Iterable[ProductConfiguration]) -> str:
    lines = []
    for p in products:
        names = ", ".join(sorted(p.deltas))
        lines.append(f"product {p.name} {{ deltas {names} }}" if names else f"product {p.name} {{ deltas }}")
    return "".join(line + "\n" for line in lines)
