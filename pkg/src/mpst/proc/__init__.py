"""The session calculus: terms, reduction, rely/guarantee typing, and the
subject-reduction probe."""

from .checker import LIVENESS_MODES, check_system, typecheck
from .probe import SRReport, mirror_context, sr_probe
from .reduction import ProcAction, evaluate, proc_step
from .terms import (
    NIL, UNIT_LIT, BinOp, ChanVar, EChan, EVar, If, Lit, Mu, Nil, PArm, Par, PBranch, PSelect,
    PVar, Process, Res, free_channels,
)

__all__ = [
    "LIVENESS_MODES", "NIL", "UNIT_LIT", "BinOp", "ChanVar", "EChan", "EVar", "If", "Lit", "Mu",
    "Nil", "PArm", "PBranch", "PSelect", "PVar", "Par", "ProcAction", "Process", "Res", "SRReport",
    "check_system", "evaluate", "free_channels", "mirror_context", "proc_step", "sr_probe",
    "typecheck",
]
