"""Perfect distinguishability of two channels by finitely many uses.

Two channels with Kraus operators ``E_i`` and ``F_j`` fail to be perfectly
distinguishable exactly when they are (entanglement-assisted) joint, or when
the identity lies in ``span{E_i^dag F_j}``. The span test is exact linear
algebra. Jointness is decided through the minimum of the common-part
functional over pure inputs on ``d (x) d``, which is a nonconvex search.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import KrausChannel, apply_extended_pure, require_pair
from .metrics import _common_part
from .search import OptimizerConfig, SearchResult, minimize_over_states

EPS_SPAN = 1e-7
EPS_DISJOINT = 1e-7
EPS_JOINT = 1e-6


class Verdict(str, enum.Enum):
    PERFECT = "PerfectlyDistinguishable"
    NOT_PERFECT = "NotPerfect"
    UNRESOLVED = "Unresolved"


class Reason(str, enum.Enum):
    JOINT = "Joint"
    IDENTITY_IN_SPAN = "IdentityInSpan"


@dataclass
class SpanCheckResult:
    in_span: bool
    residual: float
    coefficients: np.ndarray  # m x s, least-squares solution


@dataclass
class CommonPartSearch:
    eta_hat: float
    witness: np.ndarray  # pure input vector on d (x) d, ancilla first
    low_confidence: bool
    search: SearchResult

    @property
    def note(self):
        return "minimum over a nonconvex search: an upper estimate of the true infimum"


@dataclass
class DistinguishVerdict:
    verdict: Verdict
    reasons: frozenset
    span: SpanCheckResult
    common: CommonPartSearch
    notes: list = field(default_factory=list)

    @property
    def witness(self):
        return self.common.witness if self.verdict is Verdict.PERFECT else None

    @property
    def coefficients(self):
        return self.span.coefficients if self.span.in_span else None

    def summary(self) -> str:
        if self.reasons:
            return f"{self.verdict.value} {{{', '.join(sorted(r.value for r in self.reasons))}}}"
        return self.verdict.value


def span_operators(first: KrausChannel, second: KrausChannel) -> np.ndarray:
    """Stack of ``E_i^dag F_j`` with shape (m, s, d, d)."""
    return np.einsum("ikj,lkm->iljm", first.stack.conj(), second.stack)


def span_criterion(first: KrausChannel, second: KrausChannel, tol: float = EPS_SPAN) -> SpanCheckResult:
    """Least-squares test of ``I in span{E_i^dag F_j}``.

    ``residual`` is the trace norm of ``sum c_ij E_i^dag F_j - I`` at the
    least-squares coefficients.
    """
    d = require_pair(first, second)
    ops = span_operators(first, second)
    m, s = ops.shape[:2]
    A = ops.reshape(m * s, d * d).T
    c, *_ = np.linalg.lstsq(A, np.eye(d, dtype=complex).ravel(), rcond=None)
    R = (A @ c).reshape(d, d) - np.eye(d)
    residual = linalg.trace_norm(R)
    return SpanCheckResult(residual <= tol, residual, c.reshape(m, s))


def extended_outputs(first: KrausChannel, second: KrausChannel, psi):
    return apply_extended_pure(first, psi), apply_extended_pure(second, psi)


def common_part_at(first: KrausChannel, second: KrausChannel, psi) -> float:
    A, B = extended_outputs(first, second, psi)
    return _common_part(linalg.hermitian_part(A), linalg.hermitian_part(B))[0]


def min_common_part(first: KrausChannel, second: KrausChannel, cfg: OptimizerConfig = OptimizerConfig()):
    """Search pure inputs on ``d (x) d`` for the smallest common part of the two outputs."""
    d = require_pair(first, second)
    res = minimize_over_states(
        lambda psi: common_part_at(first, second, psi),
        d * d,
        cfg,
        seeds=[linalg.maximally_entangled(d)],
        stop_value=EPS_DISJOINT * 1e-2,
    )
    eta = max(res.value, 0.0)
    # confident when the search stopped at zero or a second restart reproduces the minimum
    agree = sum(v <= res.value + 1e-6 for v in res.history)
    low = eta > EPS_DISJOINT * 1e-2 and agree < 2
    return CommonPartSearch(eta, res.point, low, res)


def perfect_distinguishability(
    first: KrausChannel,
    second: KrausChannel,
    cfg: OptimizerConfig = OptimizerConfig(),
    eps_span: float = EPS_SPAN,
    eps_disjoint: float = EPS_DISJOINT,
    eps_joint: float = EPS_JOINT,
) -> DistinguishVerdict:
    span = span_criterion(first, second, eps_span)
    common = min_common_part(first, second, cfg)
    reasons = set()
    if span.in_span:
        reasons.add(Reason.IDENTITY_IN_SPAN)
    if common.eta_hat >= eps_joint:
        reasons.add(Reason.JOINT)
    notes = ["inputs restricted to pure states on d (x) d"]
    if reasons:
        verdict = Verdict.NOT_PERFECT
    elif common.eta_hat <= eps_disjoint:
        verdict = Verdict.PERFECT
    else:
        verdict = Verdict.UNRESOLVED
        notes.append(f"common part {common.eta_hat:.3e} lies between the disjoint and joint thresholds")
    if common.low_confidence:
        notes.append("common-part minimum found by a single restart only")
    return DistinguishVerdict(verdict, frozenset(reasons), span, common, notes)
