"""Executable subject reduction: explore every reduction of a typed system
and re-check typability against the mirrored context after each step."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..core import EMPTY, Endpoint, SessionSort, TypingContext
from ..errors import MPSTError, NoMatchingCtxAction, TypingError
from ..semantics import DEFAULT_MAX_STATES, enabled, step
from .checker import check_system
from .reduction import ProcAction, proc_step
from .terms import EChan, Lit


def mirror_context(ctx: TypingContext, action: ProcAction) -> TypingContext:
    """The context after the type-level counterpart of a process reduction."""
    if action.kind != "comm":
        return ctx
    if action.renamed is not None:
        old, new = action.renamed
        ctx = TypingContext([(Endpoint(new, ep.role) if ep.session == old else ep, t)
                             for ep, t in ctx.items()], validate=False)
    for a in enabled(ctx):
        if (a.session, a.sender, a.receiver, a.label) != (
                action.session, action.sender, action.receiver, action.label):
            continue
        value = action.value
        if isinstance(value, Lit) and value.sort != a.payload:
            break
        if isinstance(value, EChan) and not isinstance(a.payload, SessionSort):
            break
        return step(ctx, a)
    raise NoMatchingCtxAction(action)


@dataclass
class SRReport:
    explored: int = 0
    reductions: int = 0
    failures: list = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "explored": self.explored,
            "reductions": self.reductions,
            "failures": [{"trace": f["trace"], "error": f["error"]} for f in self.failures],
            "truncated": self.truncated,
        }


def sr_probe(p, ctx: TypingContext, depth: int, liveness_at: str = "res",
             max_states: int = DEFAULT_MAX_STATES) -> SRReport:
    """Follow every reduction sequence of length <= ``depth`` from a system
    accepted by check_system, re-checking each reduct.

    No consistency requirement is imposed anywhere; failures list the
    offending trace and the error.
    """
    initial = check_system(p, ctx, EMPTY, liveness_at, max_states)
    if not initial.holds:
        w = initial.witness
        raise TypingError(w["rule"], w["error"], "initial system rejected: " + str(w["detail"]))
    report = SRReport()
    start = (p, ctx)
    seen = {start: ()}
    queue = deque([(start, 0)])
    while queue:
        (proc, gamma), d = queue.popleft()
        report.explored += 1
        trace = seen[(proc, gamma)]
        try:
            steps = proc_step(proc)
        except MPSTError as exc:
            report.failures.append(_failure(trace, exc, proc, gamma))
            continue
        if d >= depth:
            report.truncated = report.truncated or bool(steps)
            continue
        for action, reduct in steps:
            report.reductions += 1
            here = trace + (str(action),)
            try:
                gamma2 = mirror_context(gamma, action)
            except NoMatchingCtxAction as exc:
                report.failures.append(_failure(here, exc, reduct, gamma))
                continue
            verdict = check_system(reduct, gamma2, EMPTY, liveness_at, max_states)
            if not verdict.holds:
                w = verdict.witness
                report.failures.append({"trace": list(here), "error": f"{w['error']}: {w['detail']}",
                                        "process": reduct, "context": gamma2})
                continue
            key = (reduct, gamma2)
            if key not in seen:
                seen[key] = here
                queue.append((key, d + 1))
    return report


def _failure(trace, exc, proc, ctx) -> dict:
    return {"trace": list(trace), "error": f"{type(exc).__name__}: {exc}", "process": proc, "context": ctx}
