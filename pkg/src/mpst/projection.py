"""Top-down projection of global types onto roles."""

from __future__ import annotations

from .core import (
    END, Branch, Choice, Comm, End, Endpoint, GEnd, GlobalType, GRec, GVar, LocalType, Rec,
    Select, TypingContext, Var,
)
from .errors import ProjectionUndefined, Unmergeable

FULL = "full"
PLAIN = "plain"


def roles(g: GlobalType) -> tuple[str, ...]:
    """All roles occurring as sender or receiver, sorted."""
    found: set[str] = set()
    _collect_roles(g, found)
    return tuple(sorted(found))


def _collect_roles(g, found: set) -> None:
    if isinstance(g, Comm):
        found.add(g.sender)
        found.add(g.receiver)
        for c in g.branches:
            _collect_roles(c.cont, found)
    elif isinstance(g, GRec):
        _collect_roles(g.body, found)


def merge(a: LocalType, b: LocalType, mode: str = FULL) -> LocalType:
    """Merge the projections of two sibling branches.

    Full merge unions label-disjoint inputs from the same peer and merges
    shared labels recursively; everything else must coincide. Plain merge
    only accepts identical types.
    """
    if mode == PLAIN:
        if a == b:
            return a
        raise Unmergeable(a, b)
    if isinstance(a, End) and isinstance(b, End):
        return a
    if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
        return a
    if isinstance(a, Rec) and isinstance(b, Rec) and a.var == b.var:
        return Rec(a.var, merge(a.body, b.body, mode))
    if isinstance(a, Select) and isinstance(b, Select):
        if a == b:
            return a
        raise Unmergeable(a, b)
    if isinstance(a, Branch) and isinstance(b, Branch) and a.peer == b.peer:
        out = []
        for c in a.branches:
            other = b.get(c.label)
            if other is None:
                out.append(c)
                continue
            if c.sort != other.sort:
                raise Unmergeable(a, b)
            out.append(Choice(c.label, c.sort, merge(c.cont, other.cont, mode)))
        out.extend(c for c in b.branches if a.get(c.label) is None)
        return Branch(a.peer, tuple(out))
    raise Unmergeable(a, b)


def _involved(g, role: str) -> bool:
    if isinstance(g, Comm):
        if role in (g.sender, g.receiver):
            return True
        return any(_involved(c.cont, role) for c in g.branches)
    if isinstance(g, GRec):
        return _involved(g.body, role)
    return False


def project(g: GlobalType, role: str, mode: str = FULL) -> LocalType:
    """The local type of ``role`` in ``g``; raises ProjectionUndefined when a merge fails."""
    return _project(g, role, mode, ())


def _project(g, role, mode, path) -> LocalType:
    if isinstance(g, GEnd):
        return END
    if isinstance(g, GVar):
        return Var(g.name)
    if isinstance(g, GRec):
        if not _involved(g.body, role) and not g.fv:
            return END
        body = _project(g.body, role, mode, path)
        if isinstance(body, Var) and body.name == g.var:
            return END
        if g.var not in body.fv:
            return body
        return Rec(g.var, body)
    if g.sender == role or g.receiver == role:
        conts = tuple(Choice(c.label, c.sort, _project(c.cont, role, mode, path + (c.label,)))
                      for c in g.branches)
        if g.sender == role:
            return Select(g.receiver, conts)
        return Branch(g.sender, conts)
    result = None
    for c in g.branches:
        t = _project(c.cont, role, mode, path + (c.label,))
        if result is None:
            result = t
            continue
        try:
            result = merge(result, t, mode)
        except Unmergeable as exc:
            raise ProjectionUndefined(role, path + (c.label,),
                                      f"cannot merge {exc.left} with {exc.right}",
                                      exc.left, exc.right) from None
    return result


def project_all(g: GlobalType, session: str = "s", mode: str = FULL) -> TypingContext:
    return TypingContext({Endpoint(session, r): project(g, r, mode) for r in roles(g)},
                         validate=False)
