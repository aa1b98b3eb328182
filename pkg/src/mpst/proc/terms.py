"""Process terms of the session calculus and the syntactic operations on
them (free names, substitution, scoping checks)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from ..core import BOOL, INT, STR, UNIT, BaseSort, Endpoint, TypingContext, check_ident
from ..errors import UnboundVariable, WellFormednessError


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Lit:
    sort: BaseSort
    value: object

    def __post_init__(self):
        expected = {INT: int, STR: str, BOOL: bool, UNIT: type(None)}[self.sort]
        if type(self.value) is not expected:
            raise WellFormednessError(f"literal {self.value!r} is not of sort {self.sort}")


UNIT_LIT = Lit(UNIT, None)


@dataclass(frozen=True)
class EVar:
    name: str


@dataclass(frozen=True)
class EChan:
    """A session endpoint used as a value (the argument of a delegation)."""

    endpoint: Endpoint


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in ("==", "<"):
            raise WellFormednessError(f"unknown operator {self.op!r}")


Expr = Union[Lit, EVar, EChan, BinOp]


# ---------------------------------------------------------------------------
# Processes


@dataclass(frozen=True)
class ChanVar:
    """A channel received through delegation, bound by a branch binder."""

    name: str

    def __str__(self) -> str:
        return self.name


ChanRef = Union[Endpoint, ChanVar]


@dataclass(frozen=True)
class Nil:
    def __str__(self) -> str:
        return "0"


NIL = Nil()


@dataclass(frozen=True)
class PSelect:
    chan: ChanRef
    to: str
    label: str
    arg: Expr
    cont: "Process"

    def __post_init__(self):
        check_ident(self.to, "role")
        check_ident(self.label, "label")


@dataclass(frozen=True)
class PArm:
    label: str
    binder: Optional[str]
    cont: "Process"


@dataclass(frozen=True)
class PBranch:
    chan: ChanRef
    frm: str
    arms: tuple[PArm, ...]

    def __post_init__(self):
        check_ident(self.frm, "role")
        arms = tuple(self.arms)
        if not arms:
            raise WellFormednessError("branch with no arms")
        labels = [a.label for a in arms]
        if len(set(labels)) != len(labels):
            raise WellFormednessError(f"duplicate labels in branch: {labels}")
        for a in arms:
            check_ident(a.label, "label")
            if a.binder is not None:
                check_ident(a.binder, "variable")
        object.__setattr__(self, "arms", arms)

    def arm(self, label: str) -> PArm | None:
        for a in self.arms:
            if a.label == label:
                return a
        return None


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Res:
    session: str
    body: "Process"

    def __post_init__(self):
        check_ident(self.session, "session")


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Process"
    orelse: "Process"


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Process"
    annotation: Optional[TypingContext] = None

    def __post_init__(self):
        check_ident(self.var, "process variable")


@dataclass(frozen=True)
class PVar:
    name: str


Process = Union[Nil, PSelect, PBranch, Par, Res, If, Mu, PVar]


def _str(self) -> str:
    from ..syntax import pretty

    return pretty(self)


for _cls in (PSelect, PBranch, Par, Res, If, Mu, PVar):
    _cls.__str__ = _str


# ---------------------------------------------------------------------------
# Names


def expr_names(e: Expr) -> set:
    if isinstance(e, EVar):
        return {e.name}
    if isinstance(e, BinOp):
        return expr_names(e.left) | expr_names(e.right)
    return set()


def free_channels(p: Process) -> frozenset:
    """Endpoints and channel variables a process may use without binding them."""
    if isinstance(p, PSelect):
        out = {p.chan} | free_channels(p.cont)
        if isinstance(p.arg, EChan):
            out.add(p.arg.endpoint)
        elif isinstance(p.arg, EVar):
            out.add(ChanVar(p.arg.name))
        return frozenset(out)
    if isinstance(p, PBranch):
        out = {p.chan}
        for a in p.arms:
            inner = free_channels(a.cont)
            if a.binder is not None:
                inner = inner - {ChanVar(a.binder)}
            out |= inner
        return frozenset(out)
    if isinstance(p, Par):
        return free_channels(p.left) | free_channels(p.right)
    if isinstance(p, Res):
        return free_channels(p.body)
    if isinstance(p, If):
        return free_channels(p.then) | free_channels(p.orelse)
    if isinstance(p, Mu):
        return free_channels(p.body)
    return frozenset()


def check_scoped(p: Process, values: frozenset = frozenset(), pvars: frozenset = frozenset()) -> Process:
    """Reject unbound value, channel, or process variables and unguarded recursion."""
    _scoped(p, values, pvars, frozenset())
    return p


def _scoped(p, values, pvars, unguarded) -> None:
    def need(names):
        for n in names:
            if n not in values:
                raise UnboundVariable(n)

    if isinstance(p, Nil):
        return
    if isinstance(p, PSelect):
        if isinstance(p.chan, ChanVar):
            need([p.chan.name])
        need(expr_names(p.arg))
        _scoped(p.cont, values, pvars, frozenset())
    elif isinstance(p, PBranch):
        if isinstance(p.chan, ChanVar):
            need([p.chan.name])
        for a in p.arms:
            inner = values | {a.binder} if a.binder else values
            _scoped(a.cont, inner, pvars, frozenset())
    elif isinstance(p, Par):
        _scoped(p.left, values, pvars, unguarded)
        _scoped(p.right, values, pvars, unguarded)
    elif isinstance(p, Res):
        _scoped(p.body, values, pvars, unguarded)
    elif isinstance(p, If):
        need(expr_names(p.cond))
        _scoped(p.then, values, pvars, unguarded)
        _scoped(p.orelse, values, pvars, unguarded)
    elif isinstance(p, Mu):
        _scoped(p.body, values, pvars | {p.var}, unguarded | {p.var})
    elif isinstance(p, PVar):
        if p.name not in pvars:
            raise UnboundVariable(p.name)
        if p.name in unguarded:
            raise WellFormednessError(f"unguarded recursion on {p.name!r}")
    else:
        raise WellFormednessError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# Substitution


def subst_expr(e: Expr, name: str, value) -> Expr:
    if isinstance(e, EVar) and e.name == name:
        return value
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_expr(e.left, name, value), subst_expr(e.right, name, value))
    return e


def subst_value(p: Process, name: str, value) -> Process:
    """Substitute a closed value (a Lit or EChan) for the variable ``name``."""
    if isinstance(p, PSelect):
        chan = p.chan
        if isinstance(chan, ChanVar) and chan.name == name:
            if not isinstance(value, EChan):
                raise WellFormednessError(f"{name} used as a channel but bound to {value!r}")
            chan = value.endpoint
        return PSelect(chan, p.to, p.label, subst_expr(p.arg, name, value),
                       subst_value(p.cont, name, value))
    if isinstance(p, PBranch):
        chan = p.chan
        if isinstance(chan, ChanVar) and chan.name == name:
            if not isinstance(value, EChan):
                raise WellFormednessError(f"{name} used as a channel but bound to {value!r}")
            chan = value.endpoint
        arms = tuple(a if a.binder == name else PArm(a.label, a.binder, subst_value(a.cont, name, value))
                     for a in p.arms)
        return PBranch(chan, p.frm, arms)
    if isinstance(p, Par):
        return Par(subst_value(p.left, name, value), subst_value(p.right, name, value))
    if isinstance(p, Res):
        if isinstance(value, EChan) and value.endpoint.session == p.session:
            # the binder would capture the substituted channel: rename it first
            used = free_sessions(p.body) | {p.session}
            fresh = next(f"{p.session}{i}" for i in itertools.count(1) if f"{p.session}{i}" not in used)
            return Res(fresh, subst_value(rename_session(p.body, p.session, fresh), name, value))
        return Res(p.session, subst_value(p.body, name, value))
    if isinstance(p, If):
        return If(subst_expr(p.cond, name, value), subst_value(p.then, name, value),
                  subst_value(p.orelse, name, value))
    if isinstance(p, Mu):
        return Mu(p.var, subst_value(p.body, name, value), p.annotation)
    return p


def subst_proc(p: Process, var: str, q: Process) -> Process:
    """Replace process variable ``var`` by ``q`` (used to unfold ``mu``)."""
    if isinstance(p, PVar):
        return q if p.name == var else p
    if isinstance(p, PSelect):
        return PSelect(p.chan, p.to, p.label, p.arg, subst_proc(p.cont, var, q))
    if isinstance(p, PBranch):
        return PBranch(p.chan, p.frm, tuple(PArm(a.label, a.binder, subst_proc(a.cont, var, q))
                                            for a in p.arms))
    if isinstance(p, Par):
        return Par(subst_proc(p.left, var, q), subst_proc(p.right, var, q))
    if isinstance(p, Res):
        return Res(p.session, subst_proc(p.body, var, q))
    if isinstance(p, If):
        return If(p.cond, subst_proc(p.then, var, q), subst_proc(p.orelse, var, q))
    if isinstance(p, Mu):
        if p.var == var:
            return p
        return Mu(p.var, subst_proc(p.body, var, q), p.annotation)
    return p


def rename_session(p: Process, old: str, new: str) -> Process:
    """Rename free occurrences of session ``old`` to ``new``."""

    def ep(e):
        return Endpoint(new, e.role) if isinstance(e, Endpoint) and e.session == old else e

    def ex(e):
        if isinstance(e, EChan):
            return EChan(ep(e.endpoint))
        if isinstance(e, BinOp):
            return BinOp(e.op, ex(e.left), ex(e.right))
        return e

    if isinstance(p, PSelect):
        return PSelect(ep(p.chan), p.to, p.label, ex(p.arg), rename_session(p.cont, old, new))
    if isinstance(p, PBranch):
        return PBranch(ep(p.chan), p.frm, tuple(PArm(a.label, a.binder, rename_session(a.cont, old, new))
                                                for a in p.arms))
    if isinstance(p, Par):
        return Par(rename_session(p.left, old, new), rename_session(p.right, old, new))
    if isinstance(p, Res):
        if p.session == old:
            return p
        return Res(p.session, rename_session(p.body, old, new))
    if isinstance(p, If):
        return If(p.cond, rename_session(p.then, old, new), rename_session(p.orelse, old, new))
    if isinstance(p, Mu):
        return Mu(p.var, rename_session(p.body, old, new), p.annotation)
    return p


def free_sessions(p: Process) -> frozenset:
    """Session names occurring free (outside any restriction binding them)."""
    if isinstance(p, Res):
        return free_sessions(p.body) - {p.session}
    if isinstance(p, Par):
        return free_sessions(p.left) | free_sessions(p.right)
    if isinstance(p, If):
        return free_sessions(p.then) | free_sessions(p.orelse)
    if isinstance(p, Mu):
        return free_sessions(p.body)
    out = set()
    if isinstance(p, PSelect):
        if isinstance(p.chan, Endpoint):
            out.add(p.chan.session)
        if isinstance(p.arg, EChan):
            out.add(p.arg.endpoint.session)
        out |= free_sessions(p.cont)
    elif isinstance(p, PBranch):
        if isinstance(p.chan, Endpoint):
            out.add(p.chan.session)
        for a in p.arms:
            out |= free_sessions(a.cont)
    return frozenset(out)
