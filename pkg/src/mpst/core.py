"""Abstract syntax for global and local session types, typing contexts, and
the handful of operations every other module builds on (unfolding,
composition, subtyping).

All values are immutable. Choice-carrying nodes keep their branches in
source order for printing but compare as unordered label maps.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Union

from .errors import DuplicateEndpoint, OverlappingEndpoint, WellFormednessError

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")

RESERVED = frozenset(
    {"rec", "end", "mu", "new", "if", "then", "else", "true", "false",
     "int", "str", "bool", "unit"}
)


def check_ident(name: str, what: str = "identifier") -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise WellFormednessError(f"invalid {what} {name!r}")
    if name in RESERVED:
        raise WellFormednessError(f"{what} {name!r} is a reserved word")
    return name


def _pretty(x) -> str:
    from .syntax import pretty

    return pretty(x)


# ---------------------------------------------------------------------------
# Sorts


class BaseSort(Enum):
    INT = "int"
    STR = "str"
    BOOL = "bool"
    UNIT = "unit"

    def __str__(self) -> str:
        return self.value


INT = BaseSort.INT
STR = BaseSort.STR
BOOL = BaseSort.BOOL
UNIT = BaseSort.UNIT


@dataclass(frozen=True)
class SessionSort:
    """Payload carrying a session endpoint (delegation)."""

    type: "LocalType"

    def __post_init__(self):
        validate_local(self.type)

    def __str__(self) -> str:
        return _pretty(self)


Sort = Union[BaseSort, SessionSort]


def sort_key(s: Sort) -> str:
    return str(s)


# ---------------------------------------------------------------------------
# Choices


@dataclass(frozen=True)
class Choice:
    label: str
    sort: Sort
    cont: object


def _init_choices(node, branches) -> None:
    if isinstance(branches, Mapping):
        items = []
        for label, val in branches.items():
            if isinstance(val, Choice):
                items.append(val)
            else:
                sort, cont = val
                items.append(Choice(label, sort, cont))
        branches = items
    branches = tuple(branches)
    if not branches:
        raise WellFormednessError("empty choice")
    seen = set()
    for c in branches:
        check_ident(c.label, "label")
        if c.label in seen:
            raise WellFormednessError(f"duplicate label {c.label!r}")
        seen.add(c.label)
        if not isinstance(c.sort, (BaseSort, SessionSort)):
            raise WellFormednessError(f"invalid sort {c.sort!r}")
    key = tuple(sorted(branches, key=lambda c: c.label))
    fv = frozenset().union(*(c.cont.fv for c in branches))
    object.__setattr__(node, "branches", branches)
    object.__setattr__(node, "_key", key)
    object.__setattr__(node, "_by_label", {c.label: c for c in branches})
    object.__setattr__(node, "fv", fv)


class _ChoiceMixin:
    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.branches)

    def get(self, label: str) -> Choice | None:
        return self._by_label.get(label)

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and self._hash == other._hash
                and self._sig == other._sig and self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return _pretty(self)


# ---------------------------------------------------------------------------
# Local types


@dataclass(frozen=True, eq=False)
class Select(_ChoiceMixin):
    """Internal choice ``peer!{...}``: send one of the labels to ``peer``."""

    peer: str
    branches: tuple[Choice, ...]

    def __post_init__(self):
        check_ident(self.peer, "role")
        _init_choices(self, self.branches)
        object.__setattr__(self, "_sig", self.peer)
        object.__setattr__(self, "_hash", hash(("!", self.peer, self._key)))


@dataclass(frozen=True, eq=False)
class Branch(_ChoiceMixin):
    """External choice ``peer?{...}``: receive one of the labels from ``peer``."""

    peer: str
    branches: tuple[Choice, ...]

    def __post_init__(self):
        check_ident(self.peer, "role")
        _init_choices(self, self.branches)
        object.__setattr__(self, "_sig", self.peer)
        object.__setattr__(self, "_hash", hash(("?", self.peer, self._key)))


@dataclass(frozen=True)
class Rec:
    var: str
    body: "LocalType"
    fv: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        check_ident(self.var, "recursion variable")
        object.__setattr__(self, "fv", self.body.fv - {self.var})

    def __str__(self) -> str:
        return _pretty(self)


@dataclass(frozen=True)
class Var:
    name: str
    fv: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        check_ident(self.name, "recursion variable")
        object.__setattr__(self, "fv", frozenset({self.name}))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class End:
    fv = frozenset()

    def __str__(self) -> str:
        return "end"


END = End()

LocalType = Union[Select, Branch, Rec, Var, End]


# ---------------------------------------------------------------------------
# Global types


@dataclass(frozen=True, eq=False)
class Comm(_ChoiceMixin):
    """``sender->receiver{...}``: sender picks a label and sends it to receiver."""

    sender: str
    receiver: str
    branches: tuple[Choice, ...]

    def __post_init__(self):
        check_ident(self.sender, "role")
        check_ident(self.receiver, "role")
        if self.sender == self.receiver:
            raise WellFormednessError("self-communication")
        _init_choices(self, self.branches)
        object.__setattr__(self, "_sig", (self.sender, self.receiver))
        object.__setattr__(self, "_hash", hash(("->", self.sender, self.receiver, self._key)))


@dataclass(frozen=True)
class GRec:
    var: str
    body: "GlobalType"
    fv: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        check_ident(self.var, "recursion variable")
        object.__setattr__(self, "fv", self.body.fv - {self.var})

    def __str__(self) -> str:
        return _pretty(self)


@dataclass(frozen=True)
class GVar:
    name: str
    fv: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        check_ident(self.name, "recursion variable")
        object.__setattr__(self, "fv", frozenset({self.name}))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GEnd:
    fv = frozenset()

    def __str__(self) -> str:
        return "end"


GEND = GEnd()

GlobalType = Union[Comm, GRec, GVar, GEnd]


# ---------------------------------------------------------------------------
# Well-formedness


def _check_wf(t, bound: frozenset, unguarded: frozenset) -> None:
    if isinstance(t, (Rec, GRec)):
        _check_wf(t.body, bound | {t.var}, unguarded | {t.var})
    elif isinstance(t, (Var, GVar)):
        if t.name not in bound:
            raise WellFormednessError(f"unbound recursion variable {t.name!r}")
        if t.name in unguarded:
            raise WellFormednessError(f"non-contractive recursion on {t.name!r}")
    elif isinstance(t, (Select, Branch, Comm)):
        for c in t.branches:
            _check_wf(c.cont, bound, frozenset())
    elif not isinstance(t, (End, GEnd)):
        raise WellFormednessError(f"not a session type: {t!r}")


def validate_local(t: LocalType) -> LocalType:
    """Raise WellFormednessError unless ``t`` is a closed, contractive local type."""
    if not isinstance(t, (Select, Branch, Rec, Var, End)):
        raise WellFormednessError(f"not a local type: {t!r}")
    _check_wf(t, frozenset(), frozenset())
    return t


def validate_global(g: GlobalType) -> GlobalType:
    if not isinstance(g, (Comm, GRec, GVar, GEnd)):
        raise WellFormednessError(f"not a global type: {g!r}")
    _check_wf(g, frozenset(), frozenset())
    return g


# ---------------------------------------------------------------------------
# Unfolding


def substitute(t, var: str, replacement):
    """Replace free occurrences of ``var`` in ``t``; ``replacement`` must be closed."""
    if var not in t.fv:
        return t
    if isinstance(t, (Var, GVar)):
        return replacement
    if isinstance(t, Rec):
        return Rec(t.var, substitute(t.body, var, replacement))
    if isinstance(t, GRec):
        return GRec(t.var, substitute(t.body, var, replacement))
    branches = tuple(Choice(c.label, c.sort, substitute(c.cont, var, replacement))
                     for c in t.branches)
    if isinstance(t, Comm):
        return Comm(t.sender, t.receiver, branches)
    return type(t)(t.peer, branches)


def unfold(t: LocalType) -> LocalType:
    """One-step unfolding of a top-level ``rec``; other types are returned as is."""
    if isinstance(t, Rec):
        return substitute(t.body, t.var, t)
    return t


def head(t: LocalType) -> LocalType:
    """Unfold until the top constructor is not ``rec``."""
    while isinstance(t, Rec):
        t = substitute(t.body, t.var, t)
    return t


def is_end(t: LocalType) -> bool:
    return isinstance(head(t), End)


# ---------------------------------------------------------------------------
# Endpoints and typing contexts


@dataclass(frozen=True, order=True)
class Endpoint:
    session: str
    role: str

    def __post_init__(self):
        check_ident(self.session, "session")
        check_ident(self.role, "role")

    def __str__(self) -> str:
        return f"{self.session}[{self.role}]"


class TypingContext(Mapping):
    """Finite map from endpoints to local types, iterated in sorted order."""

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping | Iterable = (), *, validate: bool = True):
        items = entries.items() if isinstance(entries, Mapping) else entries
        d: dict = {}
        for ep, t in items:
            if not isinstance(ep, Endpoint):
                raise TypeError(f"context keys must be endpoints, got {ep!r}")
            if ep in d:
                raise DuplicateEndpoint(ep)
            if validate:
                validate_local(t)
            d[ep] = t
        self._entries = dict(sorted(d.items()))
        self._hash = None

    def __getitem__(self, ep: Endpoint) -> LocalType:
        return self._entries[ep]

    def __iter__(self) -> Iterator[Endpoint]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other):
        if isinstance(other, TypingContext):
            return self is other or self._entries == other._entries
        return Mapping.__eq__(self, other)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"TypingContext({{{', '.join(f'{k}: {v}' for k, v in self.items())}}})"

    def __str__(self) -> str:
        return _pretty(self)

    def update(self, changes: Mapping) -> "TypingContext":
        d = dict(self._entries)
        d.update(changes)
        return TypingContext(d, validate=False)

    def without(self, endpoints: Iterable[Endpoint]) -> "TypingContext":
        drop = set(endpoints)
        return TypingContext(((k, v) for k, v in self._entries.items() if k not in drop),
                             validate=False)

    def restrict(self, session: str) -> "TypingContext":
        return TypingContext(((k, v) for k, v in self._entries.items() if k.session == session),
                             validate=False)

    def sessions(self) -> list[str]:
        return sorted({ep.session for ep in self._entries})


EMPTY = TypingContext()


def compose(d1: TypingContext, d2: TypingContext) -> TypingContext:
    """Union of two contexts with disjoint domains."""
    for ep in d1:
        if ep in d2:
            raise OverlappingEndpoint(ep)
    return TypingContext(list(d1.items()) + list(d2.items()), validate=False)


# ---------------------------------------------------------------------------
# Subtyping


def sorts_agree(a: Sort, b: Sort) -> bool:
    """Payload agreement: equality on base sorts, mutual subtyping on session sorts."""
    if isinstance(a, SessionSort) and isinstance(b, SessionSort):
        return subtype(a.type, b.type) and subtype(b.type, a.type)
    return a == b


def subtype(a: LocalType, b: LocalType) -> bool:
    """Synchronous session subtyping ``a <= b``, decided coinductively.

    Outputs are covariant in the label set (``a`` may send fewer labels),
    inputs contravariant (``a`` must accept every label of ``b``).
    """
    return _subtype(a, b, set())


def _subtype(a, b, assumed: set) -> bool:
    if a == b or (a, b) in assumed:
        return True
    assumed.add((a, b))
    a, b = head(a), head(b)
    if isinstance(a, End) or isinstance(b, End):
        return isinstance(a, End) and isinstance(b, End)
    if type(a) is not type(b) or a.peer != b.peer:
        return False
    small, large = (a, b) if isinstance(a, Select) else (b, a)
    for c in small.branches:
        other = large.get(c.label)
        if other is None or not sorts_agree(c.sort, other.sort):
            return False
        left, right = (c.cont, other.cont) if small is a else (other.cont, c.cont)
        if not _subtype(left, right, assumed):
            return False
    return True


# ---------------------------------------------------------------------------
# Judgement environment


@dataclass(frozen=True)
class ProcessEnv:
    """Value variables with their sorts, and process variables with their
    parameter sorts and declared context annotation."""

    values: Mapping = field(default_factory=dict)
    procs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.values) & set(self.procs)
        if clash:
            raise WellFormednessError(f"names used as both value and process variables: {sorted(clash)}")

    def with_value(self, name: str, sort: Sort) -> "ProcessEnv":
        return ProcessEnv({**self.values, name: sort}, self.procs)

    def with_proc(self, name: str, params: tuple, annotation) -> "ProcessEnv":
        return ProcessEnv(self.values, {**self.procs, name: (tuple(params), annotation)})


@dataclass(frozen=True)
class Judgement:
    theta: ProcessEnv
    guarantee: TypingContext
    rely: TypingContext
    process: object

    def __post_init__(self):
        for ep in self.guarantee:
            if ep in self.rely:
                raise OverlappingEndpoint(ep)
