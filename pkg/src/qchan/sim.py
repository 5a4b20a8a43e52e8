"""Simulated n-use discrimination protocols, error curves and inequality checks.

Every strategy pushes all hypothesis branches through the same operations,
since the experimenter cannot condition on the unknown channel. Errors are
computed exactly from density matrices. Curves report the running minimum
over n (a protocol may always ignore later uses) next to the raw value.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .bounds import BoundsReport, MultiBoundsReport
from .channel import KrausChannel, apply_extended, require_pair
from .errors import ResourceError, ValidationError
from .metrics import as_priors, helstrom_value, pretty_good_measurement, state_chernoff, uniform_priors
from .search import OptimizerConfig, minimize_over_unitaries

MAX_DENSE_DIM = 4096
MAX_STRUCTURED_DIM = 2**22
ZERO_ERROR = 1e-14
FLOOR_TOL = 1e-6
KINDS = ("parallel", "adaptive", "sequential")


@dataclass(frozen=True)
class Strategy:
    """``parallel``: i.i.d. uses on a fixed input. ``sequential``: uses chained on one
    register with identity interleavers. ``adaptive``: uses chained with a greedy
    unitary on the register before each later use."""

    kind: str = "parallel"
    input: np.ndarray | None = None  # pure vector on ancilla (x) system; maximally entangled by default
    ancilla_dim: int | None = None
    inner: OptimizerConfig = OptimizerConfig(restarts=4, max_iters=300)
    extrapolate: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown strategy {self.kind!r}; expected one of {KINDS}")
        if self.ancilla_dim is not None and self.ancilla_dim < 1:
            raise ValidationError("ancilla_dim must be at least 1")

    @property
    def label(self) -> str:
        return self.kind

    def initial(self, d: int) -> np.ndarray:
        da = d if self.ancilla_dim is None else self.ancilla_dim
        if self.input is None:
            r = min(da, d)
            psi = np.zeros(da * d, dtype=complex)
            for i in range(r):
                psi[i * d + i] = 1.0
            return psi / math.sqrt(r)
        psi = np.asarray(self.input, dtype=complex).ravel()
        if psi.size != da * d:
            raise ValidationError(f"input has length {psi.size}, expected {da * d}")
        return psi / np.linalg.norm(psi)


@dataclass
class CurveEntry:
    n: int
    p_err: float  # running minimum over uses up to n
    p_raw: float
    strategy: str
    priors: tuple
    extrapolated: bool = False


@dataclass
class ErrorCurve:
    entries: list = field(default_factory=list)
    eta: float | None = None
    mu: float | None = None
    floor_scale: float = 1.0  # multi-channel floors use nu^n/(2s)

    def floor_eta(self, n: int):
        return None if self.eta is None else self.eta**n / 2 * self.floor_scale

    def floor_mu(self, n: int):
        return None if self.mu is None else self.mu**n / 4

    @property
    def ns(self):
        return [e.n for e in self.entries]

    @property
    def values(self):
        return np.array([e.p_err for e in self.entries])


@dataclass
class Check:
    name: str
    n: int | None
    ok: bool
    margin: float
    detail: str = ""


@dataclass
class CheckList:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, n, lhs, rhs, tol, detail=""):
        """Record ``lhs >= rhs - tol``."""
        margin = lhs - rhs
        self.checks.append(Check(name, n, bool(margin >= -tol), float(margin), detail))

    def extend(self, other: "CheckList"):
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class FitResult:
    slope: float
    r2: float
    flag: str = ""
    used: int = 0


# exact Helstrom error for i.i.d. copies


def _kron_power(v: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1, dtype=v.dtype)
    for _ in range(n):
        out = np.multiply.outer(out, v).ravel()
    return out


def _pure_vector(rho):
    lam, V = linalg.hermitian_eig(rho, validate=False)
    if lam[1:].size and lam[1] > 1e-12 * lam[0]:
        return None
    return V[:, 0] * math.sqrt(max(lam[0], 0.0))


def _pure_vs_mixed(v, sigma, n, a, b):
    """``1/2 (1 - |a P - b D|_1)`` for ``P = (vv^dag)^(x)n`` and ``D = sigma^(x)n``."""
    w, W = linalg.hermitian_eig(sigma, validate=False)
    w = np.clip(w, 0.0, None)
    ov = _kron_power(np.abs(W.conj().T @ v) ** 2, n)
    dk = _kron_power(w, n)

    def f(lam):
        return a * np.sum(ov / (lam + b * dk)) - 1.0

    lo = a * 1e-18
    with np.errstate(divide="ignore"):
        top = 0.0 if f(lo) <= 0 else brentq(f, lo, a, xtol=1e-17, rtol=4 * np.finfo(float).eps)
    norm = 2 * top - (a - b)
    return max(0.5 * (1 - norm), 0.0)


def _commuting_basis(rho, sigma):
    if np.max(np.abs(rho @ sigma - sigma @ rho)) > 1e-12:
        return None
    _, V = linalg.hermitian_eig(rho + (math.sqrt(5) - 1) / 2 * sigma, validate=False)
    p = np.real(np.einsum("ki,kl,li->i", V.conj(), rho, V))
    q = np.real(np.einsum("ki,kl,li->i", V.conj(), sigma, V))
    return np.clip(p, 0, None), np.clip(q, 0, None)


def iid_helstrom(rho, sigma, n: int, priors=(0.5, 0.5)) -> float:
    """Minimal error for ``rho^(x)n`` vs ``sigma^(x)n`` without forming the product when avoidable."""
    a, b = as_priors(priors, 2)
    D = rho.shape[0]
    if np.max(np.abs(rho - sigma)) <= 1e-14:
        return float(min(a, b))
    size = D**n
    v = _pure_vector(rho)
    if v is not None and size <= MAX_STRUCTURED_DIM:
        return _pure_vs_mixed(v, sigma, n, a, b)
    v = _pure_vector(sigma)
    if v is not None and size <= MAX_STRUCTURED_DIM:
        return _pure_vs_mixed(v, rho, n, b, a)
    diag = _commuting_basis(rho, sigma)
    if diag is not None and size <= MAX_STRUCTURED_DIM:
        p, q = (_kron_power(x, n) for x in diag)
        return max(0.5 * (1 - float(np.sum(np.abs(a * p - b * q)))), 0.0)
    if size > MAX_DENSE_DIM:
        raise ResourceError(f"joint dimension {size} exceeds the dense cap {MAX_DENSE_DIM}")
    M = a * rho - b * sigma
    R, S = rho, sigma
    for _ in range(n - 1):
        R, S = np.kron(R, rho), np.kron(S, sigma)
        M = a * R - b * S
    if not np.any(M.imag):
        M = M.real
    return max(0.5 * (1 - float(np.sum(np.abs(np.linalg.eigvalsh(M))))), 0.0)


# branch evolution


def _greedy_unitary(states, channels, inner: OptimizerConfig):
    dim = states[0].shape[0]

    def objective(U):
        outs = [apply_extended(ch, U @ r @ U.conj().T) for ch, r in zip(channels, states)]
        return -sum(linalg.trace_norm(x - y) for x, y in itertools.combinations(outs, 2))

    return minimize_over_unitaries(objective, dim, inner).point


def chained_states(channels, strategy: Strategy, n_max: int, seed: int = 0):
    """Register states of every branch after n = 1..n_max uses (sequential or adaptive)."""
    d = channels[0].dim_in
    psi = strategy.initial(d)
    rho0 = np.outer(psi, psi.conj())
    states = [rho0] * len(channels)
    out = []
    for n in range(1, n_max + 1):
        if strategy.kind == "adaptive" and n > 1:
            inner = replace(strategy.inner, seed=seed * 1000 + n)
            U = _greedy_unitary(states, channels, inner)
            states = [U @ r @ U.conj().T for r in states]
        states = [linalg.hermitian_part(apply_extended(ch, r)) for ch, r in zip(channels, states)]
        out.append(states)
    return out


def _validate_channels(channels):
    channels = list(channels)
    if len(channels) < 2:
        raise ValidationError("need at least two channels")
    for ch in channels[1:]:
        require_pair(channels[0], ch)
    return channels


def _pair_errors(first, second, priors_list, strategy, n_max, cfg):
    """Raw Helstrom errors per n for each prior vector, all on the same branch states."""
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    d = first.dim_in
    raw = {tuple(p): [] for p in priors_list}
    extrapolated = []
    if strategy.kind == "parallel":
        psi = strategy.initial(d)
        rho = np.outer(psi, psi.conj())
        r1 = linalg.hermitian_part(apply_extended(first, rho))
        s1 = linalg.hermitian_part(apply_extended(second, rho))
        rate = None
        for n in range(1, n_max + 1):
            try:
                for p in raw:
                    raw[p].append(iid_helstrom(r1, s1, n, p))
                extrapolated.append(False)
            except ResourceError:
                if not strategy.extrapolate or n == 1:
                    raise
                if rate is None:
                    rate = state_chernoff(r1, s1)[0]
                for p in raw:
                    raw[p].append(raw[p][-1] * math.exp(-rate))
                extrapolated.append(True)
    else:
        for states in chained_states([first, second], strategy, n_max, cfg.seed):
            for p in raw:
                raw[p].append(helstrom_value(states[0], states[1], p))
            extrapolated.append(False)
    return raw, extrapolated


def _curve(raw, extrapolated, strategy, priors) -> ErrorCurve:
    curve = ErrorCurve()
    best = math.inf
    for n, (p, ext) in enumerate(zip(raw, extrapolated), start=1):
        p = float(p)
        best = min(best, p)
        curve.entries.append(CurveEntry(n, best, p, strategy.label, tuple(float(x) for x in priors), ext))
    return curve


def run_discrimination(
    first: KrausChannel,
    second: KrausChannel,
    priors=(0.5, 0.5),
    strategy: Strategy = Strategy(),
    n_max: int = 6,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> ErrorCurve:
    require_pair(first, second)
    priors = tuple(as_priors(priors, 2))
    raw, ext = _pair_errors(first, second, [priors], strategy, n_max, cfg)
    return _curve(raw[priors], ext, strategy, priors)


def run_priors(first, second, priors_list, strategy=Strategy(), n_max=6, cfg=OptimizerConfig()) -> dict:
    """Curves for several prior vectors, all evaluated on one run of the strategy."""
    require_pair(first, second)
    keys = [tuple(float(x) for x in as_priors(p, 2)) for p in priors_list]
    raw, ext = _pair_errors(first, second, keys, strategy, n_max, cfg)
    return {k: _curve(raw[k], ext, strategy, k) for k in keys}


def run_with_uniform(first, second, priors, strategy=Strategy(), n_max=6, cfg=OptimizerConfig()):
    """Curves for ``priors`` and for uniform priors from one run of the same strategy."""
    key = tuple(float(x) for x in as_priors(priors, 2))
    curves = run_priors(first, second, [key, (0.5, 0.5)], strategy, n_max, cfg)
    return curves[key], curves[(0.5, 0.5)]


def attach_floors(curve: ErrorCurve, report: BoundsReport) -> ErrorCurve:
    curve.eta, curve.mu = report.eta, report.mu
    return curve


def fit_exponent(curve: ErrorCurve) -> FitResult:
    """Least-squares slope of ``-log p_err`` against n (with intercept)."""
    pts = [(e.n, e.p_err) for e in curve.entries if e.p_err > ZERO_ERROR]
    if not pts:
        return FitResult(math.inf, float("nan"), "all entries zero", 0)
    if len(pts) < 3:
        raise ValidationError(f"need at least 3 entries with positive error, got {len(pts)}")
    x = np.array([n for n, _ in pts], dtype=float)
    y = -np.log([p for _, p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1 - ss_res / ss_tot
    return FitResult(float(slope) + 0.0, r2, "", len(pts))


def validate_theorems(curve: ErrorCurve, report: BoundsReport, uniform: ErrorCurve | None = None, tol: float = FLOOR_TOL) -> CheckList:
    """Per-n floor checks for uniform priors and the prior sandwich against ``uniform``."""
    out = CheckList()
    priors = curve.entries[0].priors if curve.entries else (0.5, 0.5)
    is_uniform = abs(priors[0] - priors[1]) <= 1e-12
    for e in curve.entries:
        out.add("range", e.n, max(priors) - e.p_err, 0.0, 1e-12, "p_err <= max prior")
        out.add("range", e.n, e.p_err, 0.0, 1e-12, "p_err >= 0")
        if e.extrapolated:
            out.notes.append(f"n={e.n}: extrapolated entry skipped by floor checks")
            continue
        if is_uniform and report.eta is not None:
            out.add("floor_eta", e.n, e.p_err, report.eta**e.n / 2, tol)
        if is_uniform and report.zeta is not None:
            out.add("floor_mu", e.n, e.p_err, report.zeta ** (2 * e.n) / 4, tol)
    if uniform is not None and not is_uniform:
        hi, lo = max(priors), min(priors)
        for e, u in zip(curve.entries, uniform.entries):
            out.add("sandwich_lower", e.n, e.p_err, 2 * lo * u.p_err, 1e-12)
            out.add("sandwich_upper", e.n, 2 * hi * u.p_err, e.p_err, 1e-12)
    return out


# several channels


@dataclass
class MultiEntry:
    n: int
    p_err: float  # running minimum of the pretty good measurement error
    p_raw: float
    lower: float  # running minimum of the bracket's lower end
    p_uniform: float
    strategy: str
    priors: tuple


@dataclass
class MultiCurve:
    entries: list = field(default_factory=list)
    nu: float | None = None
    s: int = 2

    def floor(self, n):
        return None if self.nu is None else self.nu**n / (2 * self.s)


def _multi_states(channels, strategy, n_max, cfg):
    if strategy.kind != "parallel":
        yield from chained_states(channels, strategy, n_max, cfg.seed)
        return
    d = channels[0].dim_in
    psi = strategy.initial(d)
    rho = np.outer(psi, psi.conj())
    singles = [linalg.hermitian_part(apply_extended(ch, rho)) for ch in channels]
    states = singles
    for n in range(1, n_max + 1):
        if n > 1:
            if states[0].shape[0] * singles[0].shape[0] > MAX_DENSE_DIM:
                raise ResourceError(f"joint dimension exceeds the dense cap {MAX_DENSE_DIM} at n={n}")
            states = [np.kron(x, y) for x, y in zip(states, singles)]
        yield states


def _povm_error(povm, states, priors):
    return max(povm.error(states, priors), 0.0)


def run_multi(channels, priors=None, strategy: Strategy = Strategy(), n_max: int = 4, cfg=OptimizerConfig(), report: MultiBoundsReport | None = None, tol: float = FLOOR_TOL):
    """Error curve for identifying one of several channels, with the reduction checks.

    For two channels the error is exact; otherwise it is the pretty good
    measurement error, and half of it bounds the optimum from below.
    """
    channels = _validate_channels(channels)
    s = len(channels)
    priors = uniform_priors(s) if priors is None else as_priors(priors, s)
    uni = uniform_priors(s)
    order = np.sort(priors)
    curve = MultiCurve(nu=report.nu if report and report.worst_pair else None, s=s)
    checks = CheckList()
    pair = report.worst_pair if report else None
    if pair:
        checks.notes.append(f"worst pair {pair} by smallest pairwise upper bound")
    best = best_low = best_pair = math.inf
    for n, states in enumerate(_multi_states(channels, strategy, n_max, cfg), start=1):
        if s == 2:
            p = helstrom_value(states[0], states[1], priors)
            pu = helstrom_value(states[0], states[1], uni)
            low = p
            same = []
        else:
            pgm = pretty_good_measurement(states, priors)
            pgm_u = pretty_good_measurement(states, uni)
            p = _povm_error(pgm, states, priors)
            pu = _povm_error(pgm_u, states, uni)
            low = p / 2
            same = [(_povm_error(m, states, priors), _povm_error(m, states, uni)) for m in (pgm, pgm_u)]
        best, best_low = min(best, p), min(best_low, low)
        curve.entries.append(MultiEntry(n, best, p, best_low, pu, strategy.label, tuple(float(x) for x in priors)))
        if pair:
            i, j = pair
            best_pair = min(best_pair, helstrom_value(states[i], states[j], (0.5, 0.5)))
            if np.allclose(priors, uni):
                checks.add("pair_reduction", n, best, 2 / s * best_pair, tol, f"pair {pair}")
                checks.add("floor_nu", n, best, curve.floor(n), tol)
        for pp, pu_same in same:
            checks.add("sandwich_lower", n, pp, s * order[0] * pu_same, 1e-12, "same measurement")
            checks.add("sandwich_upper", n, s * order[-1] * pu_same, pp, 1e-12, "same measurement")
        if s == 2 and not np.allclose(priors, uni):
            checks.add("sandwich_lower", n, p, 2 * order[0] * pu, 1e-12)
            checks.add("sandwich_upper", n, 2 * order[-1] * pu, p, 1e-12)
    return curve, checks


# CSV export

HEADER = ["n", "p_err", "floor_eta", "floor_mu", "strategy", "prior0", "prior1", "extrapolated"]


def _fmt(x):
    return "" if x is None else repr(float(x))


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(curve, MultiCurve):
        s = curve.s
        w.writerow(HEADER[:6] + [f"prior{i}" for i in range(1, s)] + ["extrapolated"])
        for e in curve.entries:
            w.writerow([e.n, _fmt(e.p_err), _fmt(curve.floor(e.n)), "", e.strategy, *map(_fmt, e.priors), "false"])
        return buf.getvalue()
    w.writerow(HEADER)
    for e in curve.entries:
        w.writerow(
            [e.n, _fmt(e.p_err), _fmt(curve.floor_eta(e.n)), _fmt(curve.floor_mu(e.n)), e.strategy, _fmt(e.priors[0]), _fmt(e.priors[1]), str(e.extrapolated).lower()]
        )
    return buf.getvalue()
