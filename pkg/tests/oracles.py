"""Slow, obviously-correct reference implementations used to cross-check the fast paths."""

from __future__ import annotations

from collections import deque

from mpst.core import END, Branch, Endpoint, Select, TypingContext, head
from mpst.semantics import enabled, payload_compatible, step


def _canon(ctx: TypingContext) -> TypingContext:
    return TypingContext([(ep, head(t)) for ep, t in ctx.items() if head(t) != END], validate=False)


def explore(ctx: TypingContext, limit: int = 10_000):
    """Plain BFS over context reductions; returns (states, transitions) or None past ``limit``."""
    start = _canon(ctx)
    seen = {start}
    order = [start]
    trans = {}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        trans[s] = []
        for a in enabled(s):
            d = _canon(step(s, a))
            trans[s].append((a, d))
            if d not in seen:
                if len(seen) >= limit:
                    return None
                seen.add(d)
                order.append(d)
                queue.append(d)
    return order, trans


def _fires_eventually(trans, start, ep: Endpoint) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for a, d in trans[s]:
            if a.involves(ep):
                return True
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return False


def _bad_output(state, ep) -> bool:
    t = state[ep]
    if not isinstance(t, Select):
        return False
    other = state.get(Endpoint(ep.session, t.peer))
    if not isinstance(other, Branch) or other.peer != ep.role:
        return False
    return any(other.get(c.label) is None or not payload_compatible(c.sort, other.get(c.label).sort)
               for c in t.branches)


def naive_live(ctx: TypingContext, limit: int = 10_000):
    """Liveness by a fresh search per (state, endpoint); None when over ``limit`` states."""
    res = explore(ctx, limit)
    if res is None:
        return None
    order, trans = res
    for s in order:
        for ep in s:
            if not _fires_eventually(trans, s, ep) or _bad_output(s, ep):
                return False
    return True


def naive_deadlock_free(ctx: TypingContext) -> bool:
    order, trans = explore(ctx)
    return all(len(s) == 0 or trans[s] for s in order)


def tree_nodes(ctx: TypingContext, bound: int = 10_000) -> int:
    """Nodes of the unshared reduction tree (only finite for acyclic systems)."""
    count = 0
    stack = [_canon(ctx)]
    while stack:
        count += 1
        if count > bound:
            raise RuntimeError("reduction tree too large")
        s = stack.pop()
        stack.extend(_canon(step(s, a)) for a in enabled(s))
    return count


def isomorphic(lts_a, lts_b) -> bool:
    """Parallel BFS pairing states by action; both systems are action-deterministic."""
    if len(lts_a.states) != len(lts_b.states) or len(lts_a.edges) != len(lts_b.edges):
        return False
    adj_a, adj_b = lts_a.adjacency(), lts_b.adjacency()
    pair = {lts_a.initial: lts_b.initial}
    used = {lts_b.initial}
    queue = deque([lts_a.initial])
    while queue:
        i = queue.popleft()
        j = pair[i]
        out_a = {a: d for a, d in adj_a[i]}
        out_b = {a: d for a, d in adj_b[j]}
        if out_a.keys() != out_b.keys():
            return False
        for a, d in out_a.items():
            e = out_b[a]
            if d in pair:
                if pair[d] != e:
                    return False
            else:
                if e in used:
                    return False
                pair[d] = e
                used.add(e)
                queue.append(d)
    return len(pair) == len(lts_a.states)
