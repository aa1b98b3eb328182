"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MPSTError(Exception):
    """Base class for all errors raised by this package."""


class WellFormednessError(MPSTError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class OverlappingEndpoint(MPSTError):
    def __init__(self, endpoint):
        super().__init__(f"endpoint {endpoint} occurs in both contexts")
        self.endpoint = endpoint


class DuplicateEndpoint(MPSTError):
    def __init__(self, endpoint):
        super().__init__(f"duplicate endpoint {endpoint}")
        self.endpoint = endpoint


class ParseError(MPSTError):
    def __init__(self, span, expected, found, text: str = ""):
        self.span = span
        self.expected = list(expected)
        self.found = found
        self._text = text
        super().__init__(self.render())

    def render(self) -> str:
        line, col = self.span.line_col(self._text)
        exp = " or ".join(self.expected) if self.expected else "nothing"
        return f"{self.span.file}:{line}:{col}: expected {exp}, found {self.found}"


class UnboundVariable(MPSTError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class Unmergeable(MPSTError):
    def __init__(self, left, right):
        super().__init__(f"cannot merge {left} with {right}")
        self.left = left
        self.right = right


class ProjectionUndefined(MPSTError):
    def __init__(self, role, path, reason: str, left=None, right=None):
        where = ".".join(path) if path else "<root>"
        super().__init__(f"projection onto {role} undefined at {where}: {reason}")
        self.role = role
        self.path = tuple(path)
        self.reason = reason
        self.left = left
        self.right = right


class NotEnabled(MPSTError):
    def __init__(self, action):
        super().__init__(f"action {action} is not enabled")
        self.action = action


class StateLimitExceeded(MPSTError):
    def __init__(self, limit: int):
        super().__init__(f"state limit of {limit} exceeded")
        self.limit = limit


class PartialUndefined(MPSTError):
    def __init__(self, path, left=None, right=None):
        where = ".".join(path) if path else "<root>"
        super().__init__(f"partial projection undefined at {where}: {left} vs {right}")
        self.path = tuple(path)
        self.left = left
        self.right = right


class StuckExpr(MPSTError):
    def __init__(self, expr, reason: str = "not closed or ill-sorted"):
        super().__init__(f"cannot evaluate {expr}: {reason}")
        self.expr = expr


class NoMatchingCtxAction(MPSTError):
    def __init__(self, action):
        super().__init__(f"context enables no action matching {action}")
        self.action = action


class TypingError(MPSTError):
    """A failed rule instance of the process type checker.

    ``kind`` is one of SplitNotFound, UnknownEndpoint, LabelNotInType,
    SortMismatch, ContextNotLive, PeerMismatch, WrongAction, MissingBranch,
    NotEnd, UnknownProcessVar, AnnotationMismatch.
    """

    def __init__(self, rule: str, kind: str, detail: str, path=(), subterm=None):
        super().__init__(f"{rule}: {kind}: {detail}")
        self.rule = rule
        self.kind = kind
        self.detail = detail
        self.path = tuple(path)
        self.subterm = subterm
