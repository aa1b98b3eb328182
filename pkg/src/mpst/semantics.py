"""Synchronous reduction of typing contexts and the reachable transition system."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import total_ordering

from .core import Branch, End, Endpoint, Select, SessionSort, Sort, TypingContext, head, sort_key, sorts_agree, subtype
from .errors import NotEnabled, StateLimitExceeded

DEFAULT_MAX_STATES = 1_000_000


@total_ordering
@dataclass(frozen=True)
class CtxAction:
    """One synchronisation ``session: sender->receiver: label(payload)``."""

    session: str
    sender: str
    receiver: str
    label: str
    payload: Sort

    def key(self) -> tuple:
        return (self.session, self.sender, self.receiver, self.label, sort_key(self.payload))

    def __lt__(self, other: "CtxAction") -> bool:
        return self.key() < other.key()

    @property
    def endpoints(self) -> tuple[Endpoint, Endpoint]:
        return Endpoint(self.session, self.sender), Endpoint(self.session, self.receiver)

    def involves(self, ep: Endpoint) -> bool:
        return ep.session == self.session and ep.role in (self.sender, self.receiver)

    def __str__(self) -> str:
        return f"{self.session}: {self.sender}->{self.receiver}: {self.label}({self.payload})"


def payload_compatible(sent: Sort, expected: Sort, payload_sub: bool = False) -> bool:
    """Exact agreement by default; with ``payload_sub`` a delegated session
    type only needs to be a subtype of the expected one."""
    if payload_sub and isinstance(sent, SessionSort) and isinstance(expected, SessionSort):
        return subtype(sent.type, expected.type)
    return sorts_agree(sent, expected)


def _heads(ctx: TypingContext) -> dict:
    return {ep: head(t) for ep, t in ctx.items()}


def _enabled(heads: dict, payload_sub: bool) -> list[CtxAction]:
    out = []
    for ep, t in heads.items():
        if not isinstance(t, Select):
            continue
        other = heads.get(Endpoint(ep.session, t.peer))
        if not isinstance(other, Branch) or other.peer != ep.role:
            continue
        for c in t.branches:
            o = other.get(c.label)
            if o is not None and payload_compatible(c.sort, o.sort, payload_sub):
                out.append(CtxAction(ep.session, ep.role, t.peer, c.label, c.sort))
    out.sort()
    return out


def enabled(ctx: TypingContext, payload_sub: bool = False) -> list[CtxAction]:
    """All synchronisations available in ``ctx``, in action order."""
    return _enabled(_heads(ctx), payload_sub)


def step(ctx: TypingContext, action: CtxAction, payload_sub: bool = False) -> TypingContext:
    """Fire ``action``: both participating endpoints move to their continuations."""
    src, dst = action.endpoints
    if src not in ctx or dst not in ctx:
        raise NotEnabled(action)
    out_t, in_t = head(ctx[src]), head(ctx[dst])
    if not (isinstance(out_t, Select) and out_t.peer == action.receiver
            and isinstance(in_t, Branch) and in_t.peer == action.sender):
        raise NotEnabled(action)
    c_out, c_in = out_t.get(action.label), in_t.get(action.label)
    if (c_out is None or c_in is None or c_out.sort != action.payload
            or not payload_compatible(c_out.sort, c_in.sort, payload_sub)):
        raise NotEnabled(action)
    return ctx.update({src: c_out.cont, dst: c_in.cont})


def canonical(ctx: TypingContext) -> TypingContext:
    """Unfold every entry to head form and drop finished endpoints."""
    entries = []
    for ep, t in ctx.items():
        h = head(t)
        if not isinstance(h, End):
            entries.append((ep, h))
    return TypingContext(entries, validate=False)


def is_final(ctx: TypingContext) -> bool:
    return all(isinstance(head(t), End) for t in ctx.values())


@dataclass(frozen=True)
class CtxLTS:
    """Reachable states of a context, numbered in breadth-first discovery order."""

    states: tuple[TypingContext, ...]
    initial: int
    edges: tuple[tuple[int, CtxAction, int], ...]
    parents: tuple

    def successors(self, i: int) -> list[tuple[CtxAction, int]]:
        return [(a, d) for s, a, d in self.edges if s == i]

    def adjacency(self) -> list[list[tuple[CtxAction, int]]]:
        adj = [[] for _ in self.states]
        for s, a, d in self.edges:
            adj[s].append((a, d))
        return adj

    def trace_to(self, i: int) -> list[CtxAction]:
        """Actions along the breadth-first tree path from the initial state."""
        trace = []
        while self.parents[i] is not None:
            i, action = self.parents[i]
            trace.append(action)
        trace.reverse()
        return trace

    def to_json(self) -> dict:
        from .syntax import pretty

        return {
            "initial": self.initial,
            "states": [{"id": i, "context": pretty(s)} for i, s in enumerate(self.states)],
            "edges": [{"src": s, "action": str(a), "dst": d} for s, a, d in self.edges],
        }

    def to_dot(self) -> str:
        from .syntax import pretty

        lines = ["digraph lts {", "  node [shape=box];"]
        for i, s in enumerate(self.states):
            label = pretty(s) or "(empty)"
            shape = " peripheries=2" if i == self.initial else ""
            lines.append(f"  {i} [label={json.dumps(label)}{shape}];")
        for s, a, d in self.edges:
            lines.append(f"  {s} -> {d} [label={json.dumps(str(a))}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def reachable(ctx: TypingContext, max_states: int = DEFAULT_MAX_STATES,
              payload_sub: bool = False) -> CtxLTS:
    start = canonical(ctx)
    index = {start: 0}
    states = [start]
    parents: list = [None]
    edges = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        state = states[i]
        for action in _enabled(dict(state.items()), payload_sub):
            nxt = canonical(step(state, action, payload_sub))
            j = index.get(nxt)
            if j is None:
                if len(states) >= max_states:
                    raise StateLimitExceeded(max_states)
                j = len(states)
                index[nxt] = j
                states.append(nxt)
                parents.append((i, action))
                queue.append(j)
            edges.append((i, action, j))
    return CtxLTS(tuple(states), 0, tuple(edges), tuple(parents))
