"""Safety notions for typing contexts.

``is_live`` is the semantic check over context reductions; ``is_consistent``
is the classical syntactic check based on pairwise duality of partial
projections. Each returns a Verdict carrying a replayable witness on failure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import (
    END, Branch, Choice, Endpoint, LocalType, Rec, Select, TypingContext, Var, head, sorts_agree,
)
from .errors import PartialUndefined
from .semantics import DEFAULT_MAX_STATES, CtxLTS, payload_compatible, reachable


@dataclass(frozen=True)
class Verdict:
    property: str
    holds: bool
    witness: Optional[dict] = None
    states_explored: int = 0

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "holds": self.holds,
            "witness": _jsonable(self.witness),
            "states_explored": self.states_explored,
        }


def _jsonable(x):
    from .syntax import pretty, pretty_partial

    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, _Partial):
        return pretty_partial(x.type)
    try:
        return pretty(x)
    except TypeError:
        return str(x)


@dataclass(frozen=True)
class _Partial:
    """Marks a partial type in a witness so it prints without its peer."""

    type: LocalType


# ---------------------------------------------------------------------------
# Liveness


def _incompatible_output(state: TypingContext, ep: Endpoint, payload_sub: bool) -> Optional[str]:
    """A label ``ep`` may send that its waiting receiver cannot accept."""
    t = state[ep]
    if not isinstance(t, Select):
        return None
    other = state.get(Endpoint(ep.session, t.peer))
    if not isinstance(other, Branch) or other.peer != ep.role:
        return None
    for c in t.branches:
        o = other.get(c.label)
        if o is None or not payload_compatible(c.sort, o.sort, payload_sub):
            return c.label
    return None


def _can_fire(lts: CtxLTS) -> dict:
    """For each endpoint, the set of states from which some path fires it."""
    preds = [[] for _ in lts.states]
    firing: dict = {}
    for s, a, d in lts.edges:
        preds[d].append(s)
        for ep in a.endpoints:
            firing.setdefault(ep, set()).add(s)
    reach = {}
    for ep, seeds in firing.items():
        seen = set(seeds)
        queue = deque(seeds)
        while queue:
            i = queue.popleft()
            for p in preds[i]:
                if p not in seen:
                    seen.add(p)
                    queue.append(p)
        reach[ep] = seen
    return reach


def is_live(ctx: TypingContext, max_states: int = DEFAULT_MAX_STATES,
            payload_sub: bool = False) -> Verdict:
    """Every pending endpoint of every reachable state can eventually fire,
    and no output offered to a waiting receiver lacks a matching input."""
    lts = reachable(ctx, max_states, payload_sub)
    reach = _can_fire(lts)
    n = len(lts.states)
    for i, state in enumerate(lts.states):
        for ep in state:
            if i not in reach.get(ep, ()):
                return _live_failure(lts, i, ep, "endpoint can never fire", n)
            label = _incompatible_output(state, ep, payload_sub)
            if label is not None:
                return _live_failure(lts, i, ep, f"output {label!r} has no compatible input", n)
    return Verdict("liveness", True, None, n)


def _live_failure(lts: CtxLTS, i: int, ep: Endpoint, reason: str, n: int) -> Verdict:
    witness = {
        "state_id": i,
        "state": lts.states[i],
        "endpoint": ep,
        "trace": lts.trace_to(i),
        "reason": reason,
    }
    return Verdict("liveness", False, witness, n)


def is_deadlock_free(ctx: TypingContext, max_states: int = DEFAULT_MAX_STATES,
                     payload_sub: bool = False) -> Verdict:
    lts = reachable(ctx, max_states, payload_sub)
    has_out = {s for s, _, _ in lts.edges}
    n = len(lts.states)
    for i, state in enumerate(lts.states):
        # canonical states drop finished entries, so a final state is empty
        if len(state) and i not in has_out:
            witness = {"state_id": i, "state": state, "trace": lts.trace_to(i),
                       "reason": "non-final state with no reduction"}
            return Verdict("deadlock-freedom", False, witness, n)
    return Verdict("deadlock-freedom", True, None, n)


# ---------------------------------------------------------------------------
# Consistency


def partial_project(t: LocalType, onto: str) -> LocalType:
    """The view of ``t`` restricted to interactions with ``onto``.

    The result is a local type whose choices all have ``onto`` as peer.
    Actions with other peers are erased; their branches must then project
    to identical partial types.
    """
    return _partial(t, onto, ())


def _partial(t, onto, path):
    if isinstance(t, (Var,)) or t == END:
        return t
    if isinstance(t, Rec):
        body = _partial(t.body, onto, path)
        if isinstance(body, Var) and body.name == t.var:
            return END
        if t.var not in body.fv:
            return body
        return Rec(t.var, body)
    conts = [(c, _partial(c.cont, onto, path + (c.label,))) for c in t.branches]
    if t.peer == onto:
        return type(t)(onto, tuple(Choice(c.label, c.sort, p) for c, p in conts))
    first = conts[0][1]
    for c, p in conts[1:]:
        if p != first:
            raise PartialUndefined(path + (c.label,), first, p)
    return first


def dual(a: LocalType, b: LocalType) -> bool:
    """Exact duality of two partial types, decided coinductively."""
    return _dual(a, b, set())


def _dual(a, b, assumed: set) -> bool:
    if (a, b) in assumed:
        return True
    assumed.add((a, b))
    a, b = head(a), head(b)
    if a == END or b == END:
        return a == END and b == END
    if not ((isinstance(a, Select) and isinstance(b, Branch))
            or (isinstance(a, Branch) and isinstance(b, Select))):
        return False
    if set(a.labels) != set(b.labels):
        return False
    for c in a.branches:
        o = b.get(c.label)
        if not sorts_agree(c.sort, o.sort) or not _dual(c.cont, o.cont, assumed):
            return False
    return True


def is_consistent(ctx: TypingContext) -> Verdict:
    """Every pair of endpoints in a session has dual partial projections."""
    for session in ctx.sessions():
        eps = [ep for ep in ctx if ep.session == session]
        for i, p in enumerate(eps):
            for q in eps[i + 1:]:
                failure = _check_pair(ctx, p, q)
                if failure is not None:
                    return Verdict("consistency", False, failure, 0)
    return Verdict("consistency", True, None, 0)


def _check_pair(ctx, p: Endpoint, q: Endpoint) -> Optional[dict]:
    views = []
    for a, b in ((p, q), (q, p)):
        try:
            views.append(partial_project(ctx[a], b.role))
        except PartialUndefined as exc:
            return {
                "pair": [p, q],
                "reason": f"partial projection of {a} onto {b.role} undefined",
                "path": list(exc.path),
                "conflict": [_Partial(exc.left), _Partial(exc.right)],
            }
    if not dual(views[0], views[1]):
        return {"pair": [p, q], "reason": "partial projections are not dual",
                "left": _Partial(views[0]), "right": _Partial(views[1])}
    return None
