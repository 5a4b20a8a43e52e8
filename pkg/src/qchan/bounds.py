"""Upper and lower bounds on the error exponent for discriminating channels.

Worked example: identity vs the fully depolarizing qubit channel.
The Kraus operators of ``depolarizing(p)`` are ``sqrt(1 - 3p/4) I`` and
``sqrt(p/4) sigma_k``. The only combination of ``E_i^dag F_j`` giving the
identity uses the ``I`` component, so ``c = (1/sqrt(1 - 3p/4), 0, 0, 0)``,
``chi = 1/sqrt(1 - 3p/4)`` and ``mu = 1 - 3p/4``. On the Schmidt family
``sqrt(l)|00> + sqrt(1-l)|11>`` at ``p = 1`` the common part is
``(3/2 - sqrt(1/4 + 3 l (1-l)))/2``, smallest at ``l = 1/2`` where it equals
1/4. Both branches give ``log 4``. The Choi outputs ``Phi`` and ``I/4`` have
state Chernoff quantity ``log 4`` (attained at ``s = 0``), so the parallel
lower bound meets the upper bound and the exponent is ``2 log 2``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import KrausChannel, apply_extended_pure, require_pair
from .distinguish import (
    DistinguishVerdict,
    Reason,
    Verdict,
    perfect_distinguishability,
    span_criterion,
    span_operators,
)
from .errors import DomainError, ValidationError
from .metrics import state_chernoff
from .search import OptimizerConfig, minimize_over_states

FORMAT_VERSION = 1
ZETA_ITERS = 10_000
FEASIBILITY_TOL = 1e-10
REPORT_DIGITS = 12


@dataclass
class ZetaResult:
    chi: float
    zeta: float
    mu: float
    upper_mu: float
    coefficients: np.ndarray  # m x s with sum c_ij E_i^dag F_j = I
    row_scales: np.ndarray  # chi_i = sqrt(m) |c_i.|, zero for dropped rows
    completion: float  # sum_i |c_i. / chi_i|^2, at most 1 for a valid extension
    residual: float
    flags: list = field(default_factory=list)


@dataclass
class LowerResult:
    value: float
    witness: np.ndarray
    s_star: float


@dataclass
class BoundsReport:
    verdict: DistinguishVerdict
    eta: float | None = None
    chi: float | None = None
    zeta: float | None = None
    mu: float | None = None
    upper_eta: float | None = None
    upper_mu: float | None = None
    upper: float = math.inf
    lower: float | None = None
    zeta_detail: ZetaResult | None = None
    lower_detail: LowerResult | None = None
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "verdict": self.verdict.verdict.value,
            "reasons": sorted(r.value for r in self.verdict.reasons),
            "eta": _num(self.eta),
            "chi": _num(self.chi),
            "zeta": _num(self.zeta),
            "mu": _num(self.mu),
            "upper_eta": _num(self.upper_eta),
            "upper_mu": _num(self.upper_mu),
            "upper": _num(self.upper),
            "lower": _num(self.lower),
            "confidence": list(self.flags),
        }


@dataclass
class MultiBoundsReport:
    pairwise: dict  # (i, j) -> BoundsReport for i < j
    multi_upper: float
    nu: float
    worst_pair: tuple | None
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "pairwise": {f"{i},{j}": r.to_dict() for (i, j), r in sorted(self.pairwise.items())},
            "multi_upper": _num(self.multi_upper),
            "nu": _num(self.nu),
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "confidence": list(self.flags),
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{REPORT_DIGITS}g}")


def dumps(report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def _neg_log(x: float) -> float:
    if x <= 0:
        return math.inf
    return 0.0 if x >= 1 - 1e-12 else -math.log(x)


def eta_bound(verdict: DistinguishVerdict):
    """``(eta, -log eta)`` from a verdict whose reasons include Joint."""
    if Reason.JOINT not in verdict.reasons:
        raise DomainError("the eta branch needs a joint pair")
    eta = min(verdict.common.eta_hat, 1.0)
    return eta, _neg_log(eta)


def _min_max_rows(A: np.ndarray, b: np.ndarray, m: int, s: int, iters: int):
    """Projected subgradient for min_c max_i |c_i.|_2 subject to A vec(c) = b."""
    Ap = np.linalg.pinv(A)
    c = Ap @ b
    null = np.eye(m * s) - Ap @ A

    def worst(x):
        norms = np.linalg.norm(x.reshape(m, s), axis=1)
        return float(norms.max()), int(np.argmax(norms))

    best, best_val = c.copy(), worst(c)[0]
    for k in range(1, iters + 1):
        val, i = worst(c)
        if val == 0.0:
            break
        g = np.zeros((m, s), dtype=complex)
        g[i] = c.reshape(m, s)[i] / val
        c = c - (null @ g.ravel()) / k
        # re-project to keep round-off from drifting off the constraint
        c = c - Ap @ (A @ c - b)
        val = worst(c)[0]
        if val < best_val:
            best, best_val = c.copy(), val
    return best.reshape(m, s)


def zeta_bound(first: KrausChannel, second: KrausChannel, tol: float = 1e-7, iters: int = ZETA_ITERS) -> ZetaResult:
    """Fidelity contraction constant from a coefficient representation of the identity.

    With ``sum c_ij E_i^dag F_j = I`` and rows scaled by
    ``chi_i = sqrt(m) |c_i.|``, the operators ``sum_j c_ij F_j / chi_i``
    extend to a Kraus representation of the second channel, giving
    ``zeta = 1/max chi_i``.
    """
    d = require_pair(first, second)
    if not span_criterion(first, second, tol).in_span:
        raise DomainError("identity is not in the span of E_i^dag F_j")
    ops = span_operators(first, second)
    m, s = ops.shape[:2]
    A = ops.reshape(m * s, d * d).T
    b = np.eye(d, dtype=complex).ravel()
    c = _min_max_rows(A, b, m, s, iters)
    norms = np.linalg.norm(c, axis=1)
    live = norms > 1e-12 * max(norms.max(), 1.0)
    scales = np.where(live, math.sqrt(m) * norms, 0.0)
    chi = float(scales.max())
    completion = float(np.sum((norms[live] / scales[live]) ** 2))
    residual = linalg.trace_norm((A @ c.ravel() - b).reshape(d, d))
    zeta = 1.0 / chi
    mu = zeta * zeta
    flags = []
    if completion > 1 + FEASIBILITY_TOL:
        flags.append(f"row scaling not completable: {completion:.3e}")
    if residual > tol:
        flags.append(f"coefficient solve residual {residual:.3e}")
    if zeta > 1 + 1e-9:
        flags.append(f"zeta {zeta:.6g} exceeds 1")
    return ZetaResult(chi, zeta, mu, _neg_log(mu), c, scales, completion, residual, flags)


def parallel_lower(first: KrausChannel, second: KrausChannel, cfg: OptimizerConfig = OptimizerConfig(), ceiling=None) -> LowerResult:
    """Best state Chernoff quantity of the extended outputs over pure inputs.

    The search stops early once it reaches ``ceiling`` (a proven upper bound).
    """
    d = require_pair(first, second)

    def objective(psi):
        rho = linalg.hermitian_part(apply_extended_pure(first, psi))
        sigma = linalg.hermitian_part(apply_extended_pure(second, psi))
        return -state_chernoff(rho, sigma)[0]

    stop = -math.inf if ceiling is None or math.isinf(ceiling) else -ceiling + 1e-9
    res = minimize_over_states(objective, d * d, cfg, seeds=[linalg.maximally_entangled(d)], stop_value=stop)
    psi = res.point
    rho = linalg.hermitian_part(apply_extended_pure(first, psi))
    sigma = linalg.hermitian_part(apply_extended_pure(second, psi))
    value, s_star = state_chernoff(rho, sigma)
    return LowerResult(max(value, 0.0) + 0.0, psi, s_star)


def chernoff_envelope(
    first: KrausChannel,
    second: KrausChannel,
    cfg: OptimizerConfig = OptimizerConfig(),
    with_lower: bool = True,
    verdict: DistinguishVerdict | None = None,
) -> BoundsReport:
    """Upper bound ``min(-log eta, -log mu)`` over the branches that apply, plus the parallel lower bound."""
    verdict = perfect_distinguishability(first, second, cfg) if verdict is None else verdict
    rep = BoundsReport(verdict)
    rep.flags.extend(verdict.notes[1:])
    if Reason.JOINT in verdict.reasons:
        rep.eta, rep.upper_eta = eta_bound(verdict)
        rep.flags.append("eta is an upper estimate from a nonconvex search")
    if Reason.IDENTITY_IN_SPAN in verdict.reasons:
        z = zeta_bound(first, second)
        rep.zeta_detail = z
        rep.chi, rep.zeta, rep.mu, rep.upper_mu = z.chi, z.zeta, z.mu, z.upper_mu
        rep.flags.extend(z.flags)
    branches = [u for u in (rep.upper_eta, rep.upper_mu) if u is not None]
    rep.upper = min(branches) if branches else math.inf
    if verdict.verdict is Verdict.UNRESOLVED:
        rep.flags.append("upper unreliable: verdict unresolved")
    if with_lower:
        low = parallel_lower(first, second, cfg, ceiling=rep.upper)
        rep.lower, rep.lower_detail = low.value, low
    return rep


def multi_bounds(channels, cfg: OptimizerConfig = OptimizerConfig(), with_lower: bool = False) -> MultiBoundsReport:
    """Pairwise envelopes; the multi-channel upper bound is the smallest pairwise one."""
    channels = list(channels)
    if len(channels) < 2:
        raise ValidationError("need at least two channels")
    for ch in channels[1:]:
        require_pair(channels[0], ch)
    pairwise = {}
    for i, j in itertools.combinations(range(len(channels)), 2):
        pairwise[(i, j)] = chernoff_envelope(channels[i], channels[j], cfg, with_lower=with_lower)
    worst = min(pairwise, key=lambda k: (pairwise[k].upper, k))
    multi_upper = pairwise[worst].upper
    flags = []
    if any(r.verdict.verdict is Verdict.UNRESOLVED for r in pairwise.values()):
        flags.append("some pair unresolved")
    if math.isinf(multi_upper):
        return MultiBoundsReport(pairwise, multi_upper, 0.0, None, flags)
    return MultiBoundsReport(pairwise, multi_upper, math.exp(-multi_upper), worst, flags)
