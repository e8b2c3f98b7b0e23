"""Exact hypergeometric tail probabilities and certified bound checks."""
from .errors import DomainError, EmptyTail, HyptailError, InvalidParams, InvalidSpec
from .hyp import (
    DiscreteDist,
    HypParams,
    HypProfile,
    bin_dist,
    hyp_bin_dist,
    hyp_dist,
    mad_closed_bin,
    mad_closed_hyp,
    mad_direct,
    profile,
    tail,
    tail_via_factorial_identity,
    tce,
    total_variation,
)
from .kernel import Interval, Status, Verdict, certify, eval_interval
from .bounds import BoundCheck, BoundId, check_all, check_conjectures, check_robbins
from .orders import OrderKind, OrderWitness, check_tce_conj, lr_order, st_order
from .sweep import GridSpec, SmugglerResult, SweepReport, emit_report, optimize_smuggler, probe_conjecture, run_sweep

__all__ = [
    "BoundCheck", "BoundId", "DiscreteDist", "DomainError", "EmptyTail", "GridSpec", "HypParams",
    "HypProfile", "HyptailError", "Interval", "InvalidParams", "InvalidSpec", "OrderKind",
    "OrderWitness", "SmugglerResult", "Status", "SweepReport", "Verdict", "bin_dist", "certify",
    "check_all", "check_conjectures", "check_robbins", "check_tce_conj", "emit_report",
    "eval_interval", "hyp_bin_dist", "hyp_dist", "lr_order", "mad_closed_bin", "mad_closed_hyp",
    "mad_direct", "optimize_smuggler", "probe_conjecture", "profile", "run_sweep", "st_order",
    "tail", "tail_via_factorial_identity", "tce", "total_variation",
]
