"""Concrete text syntax: parsers and a canonical pretty-printer.

Global types ``p->q{ m1(int). G, stop. G' }``, local types ``q!{...}`` /
``q?{...}``, typing contexts ``s[p]: T, s[q]: T'`` and processes
``s[p][q]!m1(42). s[p][r]?{ m3(b). 0 }``. ``//`` starts a line comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import core
from .core import (
    BOOL, END, GEND, INT, STR, UNIT, BaseSort, Branch, Choice, Comm, End, Endpoint, GEnd,
    GRec, GVar, Rec, Select, SessionSort, TypingContext, Var, check_ident,
)
from .errors import DuplicateEndpoint, ParseError
from .proc.terms import (
    NIL, UNIT_LIT, BinOp, ChanVar, EChan, EVar, If, Lit, Mu, Nil, PArm, Par, PBranch,
    PSelect, PVar, Res, check_scoped,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: int
    end: int

    def line_col(self, text: str) -> tuple[int, int]:
        before = text[: self.start]
        line = before.count("\n") + 1
        col = self.start - (before.rfind("\n") + 1) + 1
        return line, col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<word>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<punct>->|==|[!?{}()\[\],.:|<>])
    """,
    re.VERBOSE,
)

_SORTS = {"int": INT, "str": STR, "bool": BOOL, "unit": UNIT}


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            span = SourceSpan(file, pos, pos + 1)
            raise ParseError(span, ["a token"], repr(text[pos]), text)
        kind = m.lastgroup
        if kind != "ws":
            tk = m.group()
            out.append(Token(tk if kind == "punct" else kind, tk, m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text: str, file: str):
        self.text = text
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    # -- token helpers --------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def fail(self, expected, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(SourceSpan(self.file, tok.start, tok.end), expected, tok.describe(), self.text)

    def accept(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def expect(self, kind: str, desc: str | None = None) -> Token:
        if self.peek().kind != kind:
            self.fail([desc or repr(kind)])
        return self.advance()

    def keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok.kind == "word" and tok.text == word:
            self.advance()
            return True
        return False

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "word":
            self.fail([what])
        self.advance()
        return check_ident(tok.text, what)

    def finish(self):
        if self.peek().kind != "eof":
            self.fail(["end of input"])

    # -- types ------------------------------------------------------------

    def sort(self):
        tok = self.peek()
        if tok.kind == "word" and tok.text in _SORTS:
            self.advance()
            return _SORTS[tok.text]
        if self.accept("<"):
            t = self.local()
            self.expect(">")
            return SessionSort(t)
        self.fail(["a sort"])

    def choices(self, cont):
        if self.accept("{"):
            items = [self.choice(cont)]
            while self.accept(","):
                items.append(self.choice(cont))
            self.expect("}", "',' or '}'")
            return items
        return [self.choice(cont)]

    def choice(self, cont) -> Choice:
        label = self.ident("label")
        sort = UNIT
        if self.accept("("):
            sort = self.sort()
            self.expect(")")
        self.expect(".")
        return Choice(label, sort, cont())

    def local(self):
        tok = self.peek()
        if tok.kind != "word":
            self.fail(["a local type"])
        nxt = self.peek(1).kind
        if nxt in ("!", "?"):
            peer = self.ident("role")
            op = self.advance().kind
            cls = Select if op == "!" else Branch
            return cls(peer, tuple(self.choices(self.local)))
        if tok.text == "rec":
            self.advance()
            var = self.ident("recursion variable")
            self.expect(".")
            return Rec(var, self.local())
        if tok.text == "end":
            self.advance()
            return END
        return Var(self.ident("recursion variable"))

    def global_(self):
        tok = self.peek()
        if tok.kind != "word":
            self.fail(["a global type"])
        if self.peek(1).kind == "->":
            sender = self.ident("role")
            self.advance()
            receiver = self.ident("role")
            return Comm(sender, receiver, tuple(self.choices(self.global_)))
        if tok.text == "rec":
            self.advance()
            var = self.ident("recursion variable")
            self.expect(".")
            return GRec(var, self.global_())
        if tok.text == "end":
            self.advance()
            return GEND
        return GVar(self.ident("recursion variable"))

    def context(self, stop: str = "eof") -> TypingContext:
        entries = {}
        if self.peek().kind == stop:
            return TypingContext()
        while True:
            session = self.ident("session")
            self.expect("[")
            role = self.ident("role")
            self.expect("]")
            self.expect(":")
            ep = Endpoint(session, role)
            if ep in entries:
                raise DuplicateEndpoint(ep)
            entries[ep] = self.local()
            if not self.accept(","):
                break
        return TypingContext(entries)

    # -- processes --------------------------------------------------------

    def process(self):
        left = self.prefix()
        while self.accept("|"):
            left = Par(left, self.prefix())
        return left

    def prefix(self):
        tok = self.peek()
        if tok.kind == "int" and tok.text == "0":
            self.advance()
            return NIL
        if tok.kind == "(":
            nxt = self.peek(1)
            self.advance()
            if nxt.kind == "word" and nxt.text == "new":
                self.advance()
                name = self.ident("session")
                self.expect(")")
                return Res(name, self.prefix())
            p = self.process()
            self.expect(")")
            return p
        if tok.kind != "word":
            self.fail(["a process"])
        if tok.text == "if":
            self.advance()
            cond = self.expr()
            if not self.keyword("then"):
                self.fail(["'then'"])
            then = self.prefix()
            if not self.keyword("else"):
                self.fail(["'else'"])
            return If(cond, then, self.prefix())
        if tok.text == "mu":
            self.advance()
            var = self.ident("process variable")
            ann = None
            if self.accept("["):
                ann = self.context(stop="]")
                self.expect("]", "',' or ']'")
            self.expect(".")
            return Mu(var, self.prefix(), ann)
        if self.peek(1).kind == "[":
            return self.action()
        return PVar(self.ident("process variable"))

    def action(self):
        name = self.ident("channel")
        self.expect("[")
        role = self.ident("role")
        self.expect("]")
        if self.accept("["):
            chan = Endpoint(name, role)
            peer = self.ident("role")
            self.expect("]")
        else:
            chan, peer = ChanVar(name), role
        if self.accept("!"):
            label = self.ident("label")
            arg = UNIT_LIT
            if self.accept("("):
                arg = self.expr()
                self.expect(")")
            self.expect(".")
            return PSelect(chan, peer, label, arg, self.prefix())
        if self.accept("?"):
            if self.accept("{"):
                arms = [self.arm(self.process)]
                while self.accept(","):
                    arms.append(self.arm(self.process))
                self.expect("}", "',' or '}'")
            else:
                arms = [self.arm(self.prefix)]
            return PBranch(chan, peer, tuple(arms))
        self.fail(["'!'", "'?'"])

    def arm(self, cont) -> PArm:
        label = self.ident("label")
        binder = None
        if self.accept("("):
            binder = self.ident("variable")
            self.expect(")")
        self.expect(".")
        return PArm(label, binder, cont())

    def expr(self):
        left = self.atom()
        if self.peek().kind in ("==", "<"):
            op = self.advance().kind
            return BinOp(op, left, self.atom())
        return left

    def atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Lit(INT, int(tok.text))
        if tok.kind == "string":
            self.advance()
            return Lit(STR, json.loads(tok.text))
        if tok.kind == "(":
            self.advance()
            if self.accept(")"):
                return UNIT_LIT
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "word":
            if tok.text in ("true", "false"):
                self.advance()
                return Lit(BOOL, tok.text == "true")
            name = self.ident("variable")
            if self.accept("["):
                role = self.ident("role")
                self.expect("]")
                return EChan(Endpoint(name, role))
            return EVar(name)
        self.fail(["an expression"])


def parse_global(text: str, file: str = "<input>"):
    p = _Parser(text, file)
    g = p.global_()
    p.finish()
    return core.validate_global(g)


def parse_local(text: str, file: str = "<input>"):
    p = _Parser(text, file)
    t = p.local()
    p.finish()
    return core.validate_local(t)


def parse_context(text: str, file: str = "<input>") -> TypingContext:
    p = _Parser(text, file)
    ctx = p.context()
    p.finish()
    return ctx


def parse_process(text: str, file: str = "<input>"):
    p = _Parser(text, file)
    proc = p.process()
    p.finish()
    return check_scoped(proc)


def parse_sort(text: str, file: str = "<input>"):
    p = _Parser(text, file)
    s = p.sort()
    p.finish()
    return s


# ---------------------------------------------------------------------------
# Printing


def _choices(branches, sep: str) -> str:
    parts = []
    for c in branches:
        payload = "" if c.sort == UNIT else f"({pretty(c.sort)})"
        parts.append(f"{c.label}{payload}. {pretty(c.cont)}")
    return "{" + sep.join(parts) + "}"


def pretty_partial(t) -> str:
    """Render a single-peer partial type, leaving the peer implicit."""
    if isinstance(t, (Select, Branch)):
        op = "!" if isinstance(t, Select) else "?"
        parts = []
        for c in t.branches:
            payload = "" if c.sort == UNIT else f"({pretty(c.sort)})"
            parts.append(f"{c.label}{payload}. {pretty_partial(c.cont)}")
        return op + "{" + ", ".join(parts) + "}"
    if isinstance(t, Rec):
        return f"rec {t.var}. {pretty_partial(t.body)}"
    return pretty(t)


def _expr(e, nested: bool = False) -> str:
    if isinstance(e, Lit):
        if e.sort == UNIT:
            return "()"
        if e.sort == BOOL:
            return "true" if e.value else "false"
        if e.sort == STR:
            return json.dumps(e.value)
        return str(e.value)
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EChan):
        return str(e.endpoint)
    if isinstance(e, BinOp):
        s = f"{_expr(e.left, True)} {e.op} {_expr(e.right, True)}"
        return f"({s})" if nested else s
    raise TypeError(f"cannot print {e!r}")


def _chan(c) -> str:
    return str(c)


def _proc(p, level: str) -> str:
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, PSelect):
        arg = "" if p.arg == UNIT_LIT else f"({_expr(p.arg)})"
        return f"{_chan(p.chan)}[{p.to}]!{p.label}{arg}. {_proc(p.cont, 'prefix')}"
    if isinstance(p, PBranch):
        arms = []
        for a in p.arms:
            binder = f"({a.binder})" if a.binder else ""
            arms.append(f"{a.label}{binder}. {_proc(a.cont, 'par')}")
        return f"{_chan(p.chan)}[{p.frm}]?{{{', '.join(arms)}}}"
    if isinstance(p, Par):
        s = f"{_proc(p.left, 'par')} | {_proc(p.right, 'prefix')}"
        return f"({s})" if level == "prefix" else s
    if isinstance(p, Res):
        return f"(new {p.session}) {_proc(p.body, 'prefix')}"
    if isinstance(p, If):
        return f"if {_expr(p.cond)} then {_proc(p.then, 'prefix')} else {_proc(p.orelse, 'prefix')}"
    if isinstance(p, Mu):
        ann = f"[{pretty(p.annotation)}]" if p.annotation is not None else ""
        return f"mu {p.var}{ann}. {_proc(p.body, 'prefix')}"
    if isinstance(p, PVar):
        return p.name
    raise TypeError(f"cannot print {p!r}")


def pretty(x) -> str:
    """Canonical text for a type, sort, context, endpoint or process."""
    if isinstance(x, BaseSort):
        return x.value
    if isinstance(x, SessionSort):
        return f"<{pretty(x.type)}>"
    if isinstance(x, (End, GEnd)):
        return "end"
    if isinstance(x, (Var, GVar)):
        return x.name
    if isinstance(x, (Rec, GRec)):
        return f"rec {x.var}. {pretty(x.body)}"
    if isinstance(x, Select):
        return f"{x.peer}!{_choices(x.branches, ', ')}"
    if isinstance(x, Branch):
        return f"{x.peer}?{_choices(x.branches, ', ')}"
    if isinstance(x, Comm):
        return f"{x.sender}->{x.receiver}{_choices(x.branches, ', ')}"
    if isinstance(x, TypingContext):
        return ", ".join(f"{ep}: {pretty(t)}" for ep, t in x.items())
    if isinstance(x, (Endpoint, ChanVar)):
        return str(x)
    if isinstance(x, (Lit, EVar, EChan, BinOp)):
        return _expr(x)
    return _proc(x, "par")
