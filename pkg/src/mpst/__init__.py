"""Multiparty session types: projection, context reduction, liveness versus
consistency, and rely/guarantee process typing."""

from .core import (
    BOOL, EMPTY, END, GEND, INT, STR, UNIT, BaseSort, Branch, Choice, Comm, End, Endpoint, GEnd,
    GRec, GVar, Judgement, ProcessEnv, Rec, Select, SessionSort, TypingContext, Var, compose,
    head, subtype, unfold, validate_global, validate_local,
)
from .errors import MPSTError
from .projection import merge, project, project_all, roles
from .safety import Verdict, dual, is_consistent, is_deadlock_free, is_live, partial_project
from .semantics import CtxAction, CtxLTS, enabled, is_final, reachable, step
from .syntax import parse_context, parse_global, parse_local, parse_process, pretty

__version__ = "0.1.0"
