"""Operational semantics of processes.

Reduction looks through the spine of parallel compositions and
restrictions; a communication needs an output and an input on the same
session binding, so two restrictions of the same name never talk to each
other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from ..core import BOOL, INT, Endpoint
from ..errors import StuckExpr
from .terms import (
    NIL, BinOp, EChan, EVar, If, Lit, Mu, Par, PBranch, PSelect, Process, Res, free_sessions,
    rename_session, subst_proc, subst_value,
)


@dataclass(frozen=True)
class ProcAction:
    """A process reduction: ``comm`` (a synchronisation) or the administrative
    ``if`` and ``mu`` steps."""

    kind: str
    session: Optional[str] = None
    sender: Optional[str] = None
    receiver: Optional[str] = None
    label: Optional[str] = None
    value: object = None
    renamed: Optional[tuple[str, str]] = None

    def __str__(self) -> str:
        if self.kind == "comm":
            from ..syntax import pretty

            return f"{self.session}: {self.sender}->{self.receiver}: {self.label}({pretty(self.value)})"
        return self.kind


def evaluate(e):
    """Evaluate a closed expression to a literal or channel value."""
    if isinstance(e, (Lit, EChan)):
        return e
    if isinstance(e, EVar):
        raise StuckExpr(e, "free variable")
    if isinstance(e, BinOp):
        left, right = evaluate(e.left), evaluate(e.right)
        if not (isinstance(left, Lit) and isinstance(right, Lit) and left.sort == right.sort):
            raise StuckExpr(e, "operands of different sorts")
        if e.op == "==":
            return Lit(BOOL, left.value == right.value)
        if left.sort != INT:
            raise StuckExpr(e, "'<' needs integers")
        return Lit(BOOL, left.value < right.value)
    raise StuckExpr(e)


def _spine(p: Process, path: tuple, scope: dict):
    """Yield (path, leaf, scope) for every thread reachable through Par and Res."""
    if isinstance(p, Par):
        yield from _spine(p.left, path + (0,), scope)
        yield from _spine(p.right, path + (1,), scope)
    elif isinstance(p, Res):
        yield from _spine(p.body, path + ("r",), {**scope, p.session: path})
    else:
        yield path, p, scope


def _replace(p: Process, path: tuple, new: Process) -> Process:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step == 0:
        return Par(_replace(p.left, rest, new), p.right)
    if step == 1:
        return Par(p.left, _replace(p.right, rest, new))
    return Res(p.session, _replace(p.body, rest, new))


def _node(p: Process, path: tuple) -> Process:
    for step in path:
        p = p.left if step == 0 else p.right if step == 1 else p.body
    return p


def _sessions(p) -> set:
    out = set(free_sessions(p))
    for _, leaf, scope in _spine(p, (), {}):
        out |= set(scope)
    if isinstance(p, Res):
        out.add(p.session)
    return out


def _fresh(name: str, used: set) -> str:
    for i in itertools.count(1):
        cand = f"{name}{i}"
        if cand not in used:
            return cand


def proc_step(p: Process) -> list[tuple[ProcAction, Process]]:
    """All one-step reducts of ``p``."""
    leaves = list(_spine(p, (), {}))
    out = []
    for path, leaf, _ in leaves:
        if isinstance(leaf, If):
            v = evaluate(leaf.cond)
            if not (isinstance(v, Lit) and v.sort == BOOL):
                raise StuckExpr(leaf.cond, "guard is not a boolean")
            out.append((ProcAction("if"), _replace(p, path, leaf.then if v.value else leaf.orelse)))
        elif isinstance(leaf, Mu):
            out.append((ProcAction("mu", label=leaf.var),
                        _replace(p, path, subst_proc(leaf.body, leaf.var, leaf))))
    for (pi, out_leaf, si), (pj, in_leaf, sj) in itertools.permutations(leaves, 2):
        if not (isinstance(out_leaf, PSelect) and isinstance(in_leaf, PBranch)):
            continue
        src, dst = out_leaf.chan, in_leaf.chan
        if not (isinstance(src, Endpoint) and isinstance(dst, Endpoint)):
            continue
        if (src.session != dst.session or si.get(src.session) != sj.get(dst.session)
                or dst.role != out_leaf.to or in_leaf.frm != src.role):
            continue
        arm = in_leaf.arm(out_leaf.label)
        if arm is None:
            continue
        value = evaluate(out_leaf.arg)
        out.append(_communicate(p, pi, out_leaf, si, pj, arm, sj, value))
    return out


def _communicate(p, pi, out_leaf, si, pj, arm, sj, value):
    src = out_leaf.chan
    extrude = renamed = None
    if isinstance(value, EChan):
        name = value.endpoint.session
        res_path = si.get(name)
        if res_path is not None and sj.get(name) != res_path:
            extrude = res_path
            # rename only if lifting the binder would capture another use of the name
            if name in _sessions(_replace(p, res_path, NIL)):
                fresh = _fresh(name, _sessions(p))
                renamed = (name, fresh)
                value = EChan(Endpoint(fresh, value.endpoint.role))
    action = ProcAction("comm", src.session, src.role, out_leaf.to, out_leaf.label, value, renamed)
    received = subst_value(arm.cont, arm.binder, value) if arm.binder else arm.cont
    q = _replace(_replace(p, pi, out_leaf.cont), pj, received)
    if extrude is not None:
        # scope extrusion: lift the sender-side restriction to the root
        res = _node(q, extrude)
        name = renamed[1] if renamed else res.session
        body = rename_session(res.body, res.session, name) if renamed else res.body
        q = Res(name, _replace(q, extrude, body))
    return action, q
