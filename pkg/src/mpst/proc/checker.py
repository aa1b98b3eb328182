"""Rely/guarantee type checking of processes.

A judgement ``theta |- P : guarantee / rely`` checks that ``P`` uses the
channels in ``guarantee`` as their types prescribe, assuming the rest of
the system behaves as ``rely``. Parallel composition splits the guarantee
and moves each side's share into the sibling's rely; restriction demands
that the combined contexts of the restricted session are live.
"""

from __future__ import annotations

import itertools
from typing import Optional

from ..core import (
    BOOL, EMPTY, INT, BaseSort, Branch, Endpoint, Judgement, ProcessEnv, Select, SessionSort,
    TypingContext, compose, head, is_end, subtype,
)
from ..errors import TypingError
from ..safety import Verdict, is_live
from ..semantics import DEFAULT_MAX_STATES
from .terms import (
    ChanVar, EChan, EVar, If, Lit, Mu, Nil, Par, PBranch, PSelect, PVar, Res,
    free_channels,
)

LIVENESS_MODES = ("res", "top", "all")


def _endpoint_ctx(*parts: dict) -> TypingContext:
    return TypingContext([(k, v) for d in parts for k, v in d.items() if isinstance(k, Endpoint)],
                         validate=False)


def _equivalent(a: dict, b: dict) -> bool:
    live_a = {k: v for k, v in a.items() if not is_end(v)}
    live_b = {k: v for k, v in b.items() if not is_end(v)}
    if live_a.keys() != live_b.keys():
        return False
    return all(subtype(v, live_b[k]) and subtype(live_b[k], v) for k, v in live_a.items())


class _Checker:
    def __init__(self, liveness_at: str = "res", max_states: int = DEFAULT_MAX_STATES):
        if liveness_at not in LIVENESS_MODES:
            raise ValueError(f"liveness_at must be one of {LIVENESS_MODES}")
        self.liveness_at = liveness_at
        self.max_states = max_states

    def expr_sort(self, theta: ProcessEnv, e, path, proc) -> BaseSort:
        if isinstance(e, Lit):
            return e.sort
        if isinstance(e, EVar):
            if e.name not in theta.values:
                raise TypingError("T-EXPR", "UnboundVariable", f"no value variable {e.name!r}", path, proc)
            return theta.values[e.name]
        if isinstance(e, EChan):
            raise TypingError("T-EXPR", "SortMismatch", f"channel {e.endpoint} used as a plain value",
                              path, proc)
        left = self.expr_sort(theta, e.left, path, proc)
        right = self.expr_sort(theta, e.right, path, proc)
        if left != right or (e.op == "<" and left != INT):
            raise TypingError("T-EXPR", "SortMismatch", f"cannot apply {e.op} to {left} and {right}",
                              path, proc)
        return BOOL

    def require_live(self, ctx: TypingContext, rule: str, path, proc) -> None:
        verdict = is_live(ctx, self.max_states)
        if not verdict.holds:
            from ..safety import _jsonable

            w = _jsonable(verdict.witness)
            raise TypingError(rule, "ContextNotLive",
                              f"{w['endpoint']} {w['reason']} (state {w['state']!r})", path, proc)

    def lookup(self, g: dict, r: dict, key, rule, path, proc):
        if key not in g:
            where = "owned by the environment" if key in r else "not in the guarantee context"
            raise TypingError(rule, "UnknownEndpoint", f"{key} is {where}", path, proc)
        return head(g[key])

    def check(self, theta: ProcessEnv, g: dict, r: dict, p, path: tuple) -> None:
        if self.liveness_at == "all":
            self.require_live(_endpoint_ctx(g, r), "T-LIVE", path, p)
        if isinstance(p, Nil):
            for k, t in g.items():
                if not is_end(t):
                    raise TypingError("T-NIL", "NotEnd", f"{k} still has type {t}", path, p)
        elif isinstance(p, PSelect):
            self.check_select(theta, g, r, p, path)
        elif isinstance(p, PBranch):
            self.check_branch(theta, g, r, p, path)
        elif isinstance(p, Par):
            self.check_par(theta, g, r, p, path)
        elif isinstance(p, Res):
            if self.liveness_at in ("res", "all"):
                own = {k: v for k, v in g.items() if isinstance(k, Endpoint) and k.session == p.session}
                env = {k: v for k, v in r.items() if isinstance(k, Endpoint) and k.session == p.session}
                self.require_live(_endpoint_ctx(own, env), "T-RES", path, p)
            self.check(theta, g, r, p.body, path + ("new",))
        elif isinstance(p, If):
            if self.expr_sort(theta, p.cond, path, p) != BOOL:
                raise TypingError("T-IF", "SortMismatch", "guard is not a boolean", path, p)
            self.check(theta, g, r, p.then, path + ("then",))
            self.check(theta, g, r, p.orelse, path + ("else",))
        elif isinstance(p, Mu):
            ann = dict(p.annotation.items()) if p.annotation is not None else dict(g)
            if not _equivalent(g, ann):
                raise TypingError("T-MU", "AnnotationMismatch",
                                  "annotation differs from the current guarantee", path, p)
            inner = ProcessEnv({k: v for k, v in theta.values.items() if k != p.var},
                               {**theta.procs, p.var: ((), ann)})
            self.check(inner, ann, r, p.body, path + ("mu",))
        elif isinstance(p, PVar):
            if p.name not in theta.procs:
                raise TypingError("T-PVAR", "UnknownProcessVar", p.name, path, p)
            _, ann = theta.procs[p.name]
            if not _equivalent(g, ann):
                raise TypingError("T-PVAR", "AnnotationMismatch",
                                  f"guarantee at {p.name} differs from its annotation", path, p)
        else:
            raise TypeError(f"not a process: {p!r}")

    def check_select(self, theta, g, r, p: PSelect, path) -> None:
        t = self.lookup(g, r, p.chan, "T-SEL", path, p)
        if not isinstance(t, Select):
            raise TypingError("T-SEL", "WrongAction", f"{p.chan} has type {t}, not an output", path, p)
        if t.peer != p.to:
            raise TypingError("T-SEL", "PeerMismatch", f"{p.chan} outputs to {t.peer}, not {p.to}", path, p)
        choice = t.get(p.label)
        if choice is None:
            raise TypingError("T-SEL", "LabelNotInType",
                              f"{p.label} not among {', '.join(t.labels)}", path, p)
        g2 = dict(g)
        delegated = self.delegated(theta, g, p.arg)
        if delegated is not None:
            if not isinstance(choice.sort, SessionSort):
                raise TypingError("T-SEL", "SortMismatch", f"{p.label} carries {choice.sort}, not a channel",
                                  path, p)
            if delegated == p.chan or delegated not in g:
                raise TypingError("T-SEL", "UnknownEndpoint", f"cannot delegate {delegated}", path, p)
            dt = g[delegated]
            if not (subtype(dt, choice.sort.type) and subtype(choice.sort.type, dt)):
                raise TypingError("T-SEL", "SortMismatch",
                                  f"{delegated} has type {dt}, payload expects {choice.sort.type}", path, p)
            del g2[delegated]
        else:
            sort = self.expr_sort(theta, p.arg, path, p)
            if sort != choice.sort:
                raise TypingError("T-SEL", "SortMismatch",
                                  f"{p.label} carries {choice.sort}, argument has sort {sort}", path, p)
        g2[p.chan] = choice.cont
        self.check(theta, g2, r, p.cont, path + (p.label,))

    @staticmethod
    def delegated(theta, g, arg):
        if isinstance(arg, EChan):
            return arg.endpoint
        if isinstance(arg, EVar) and arg.name not in theta.values and ChanVar(arg.name) in g:
            return ChanVar(arg.name)
        return None

    def check_branch(self, theta, g, r, p: PBranch, path) -> None:
        t = self.lookup(g, r, p.chan, "T-BRA", path, p)
        if not isinstance(t, Branch):
            raise TypingError("T-BRA", "WrongAction", f"{p.chan} has type {t}, not an input", path, p)
        if t.peer != p.frm:
            raise TypingError("T-BRA", "PeerMismatch", f"{p.chan} inputs from {t.peer}, not {p.frm}",
                              path, p)
        for c in t.branches:
            arm = p.arm(c.label)
            if arm is None:
                raise TypingError("T-BRA", "MissingBranch", f"no arm for label {c.label}", path, p)
            g2 = dict(g)
            g2[p.chan] = c.cont
            values = dict(theta.values)
            if arm.binder is not None:
                g2.pop(ChanVar(arm.binder), None)
                values.pop(arm.binder, None)
                if isinstance(c.sort, SessionSort):
                    g2[ChanVar(arm.binder)] = c.sort.type
                else:
                    values[arm.binder] = c.sort
            inner = ProcessEnv(values, {k: v for k, v in theta.procs.items() if k != arm.binder})
            self.check(inner, g2, r, arm.cont, path + (c.label,))

    def check_par(self, theta, g, r, p: Par, path) -> None:
        used_l = free_channels(p.left) & g.keys()
        used_r = free_channels(p.right) & g.keys()
        shared = used_l & used_r
        if shared:
            raise TypingError("T-PAR", "SplitNotFound",
                              f"{', '.join(sorted(map(str, shared)))} used on both sides", path, p)
        spare = [k for k in g if k not in used_l and k not in used_r]
        # finished entries may go either way; only live ones need a search
        loose = [k for k in spare if not is_end(g[k])]
        fixed_left = set(used_l) | {k for k in spare if is_end(g[k])}
        candidates = list(itertools.product((0, 1), repeat=len(loose)))
        last: Optional[TypingError] = None
        for choice in candidates:
            left_keys = fixed_left | {k for k, side in zip(loose, choice) if side == 0}
            d1 = {k: v for k, v in g.items() if k in left_keys}
            d2 = {k: v for k, v in g.items() if k not in left_keys}
            try:
                self.check(theta, d1, {**r, **d2}, p.left, path + ("left",))
                self.check(theta, d2, {**r, **d1}, p.right, path + ("right",))
                return
            except TypingError as exc:
                last = exc
        if len(candidates) == 1:
            raise last
        raise TypingError("T-PAR", "SplitNotFound",
                          f"none of {len(candidates)} splits type both sides (last: {last})", path, p)


def _failure(exc: TypingError) -> Verdict:
    from ..syntax import pretty

    witness = {
        "rule": exc.rule,
        "error": exc.kind,
        "detail": exc.detail,
        "path": list(exc.path),
        "subterm": pretty(exc.subterm) if exc.subterm is not None else None,
    }
    return Verdict("typing", False, witness, 0)


def typecheck(j: Judgement, liveness_at: str = "res", max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Decide ``theta |- P : guarantee / rely``; the failing rule instance is the witness."""
    checker = _Checker(liveness_at, max_states)
    try:
        checker.check(j.theta, dict(j.guarantee.items()), dict(j.rely.items()), j.process, ())
    except TypingError as exc:
        return _failure(exc)
    return Verdict("typing", True, None, 0)


def check_system(p, ctx: TypingContext, rely: TypingContext = EMPTY, liveness_at: str = "res",
                 max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Top-level check: the combined context is live and ``P`` types against it."""
    live = is_live(compose(ctx, rely), max_states)
    states = live.states_explored
    if not live.holds:
        witness = {"rule": "T-SYSTEM", "error": "ContextNotLive", "detail": live.witness["reason"],
                   "path": [], "subterm": None, "liveness": live.witness}
        return Verdict("typing", False, witness, states)
    verdict = typecheck(Judgement(ProcessEnv(), ctx, rely, p), liveness_at, max_states)
    return Verdict(verdict.property, verdict.holds, verdict.witness, states)
