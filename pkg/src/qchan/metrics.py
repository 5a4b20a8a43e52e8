"""State-level distinguishability quantities.

Includes trace distance, fidelity, the Helstrom error, the common-part
functional ``T(A, B) = max{Tr X : 0 <= X <= A, X <= B}``, the quantum Chernoff
quantity for states and the pretty-good-measurement error bracket for several
hypotheses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NumericError, ValidationError

PRIOR_TOL = 1e-12
POVM_TOL = 1e-8
# eigenvalue of P_A + P_B counted as 2, i.e. a shared support direction
INTERSECT_TOL = 1e-9
ORTHOGONAL_TOL = 1e-14
CHERNOFF_GRID = 101
CHERNOFF_STOP = 1e-6


def as_priors(weights, size=None) -> np.ndarray:
    w = np.asarray(weights, dtype=float).ravel()
    if size is not None and w.size != size:
        raise ValidationError(f"expected {size} prior weights, got {w.size}")
    if w.size < 2:
        raise ValidationError("a prior needs at least two weights")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError("prior weights must be strictly positive (degenerate priors are excluded)")
    if abs(w.sum() - 1.0) > PRIOR_TOL:
        raise ValidationError(f"prior weights sum to {w.sum()!r}, expected 1")
    return w


def uniform_priors(s: int) -> np.ndarray:
    return np.full(s, 1.0 / s)


def _pair(rho, sigma):
    rho = linalg.as_density(rho, "rho")
    sigma = linalg.as_density(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError(f"state dimensions differ: {rho.shape[0]} vs {sigma.shape[0]}")
    return rho, sigma


@dataclass(frozen=True)
class Povm:
    elements: tuple

    def __post_init__(self):
        els = tuple(linalg.hermitian_part(np.asarray(M, dtype=complex)) for M in self.elements)
        object.__setattr__(self, "elements", els)

    def check(self, tol=POVM_TOL):
        d = self.elements[0].shape[0]
        for i, M in enumerate(self.elements):
            if np.linalg.eigvalsh(M)[0] < -tol:
                raise ValidationError(f"POVM element {i} is not positive semidefinite")
        total = sum(self.elements)
        if np.max(np.abs(total - np.eye(d))) > tol:
            raise ValidationError("POVM elements do not sum to the identity")
        return self

    def error(self, states, priors) -> float:
        """Average probability of guessing the wrong index."""
        success = sum(p * np.vdot(M, rho).real for p, M, rho in zip(priors, self.elements, states))
        return float(1.0 - success)


def trace_distance(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return 0.5 * linalg.trace_norm(rho - sigma)


def fidelity(rho, sigma) -> float:
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))``."""
    rho, sigma = _pair(rho, sigma)
    return _fidelity(rho, sigma)


def _fidelity(rho, sigma) -> float:
    # nuclear norm of sqrt(rho) sqrt(sigma); avoids taking roots of rounding noise
    sv = np.linalg.svd(linalg.psd_sqrt(rho) @ linalg.psd_sqrt(sigma), compute_uv=False)
    return float(min(np.sum(sv), 1.0))


def helstrom_error(rho0, rho1, priors=(0.5, 0.5)):
    """Minimal two-outcome error ``(1 - ||p0 rho0 - p1 rho1||_1) / 2`` and the optimal POVM.

    ``M0`` projects onto the positive eigenspace of ``p0 rho0 - p1 rho1``.
    """
    rho0, rho1 = _pair(rho0, rho1)
    p0, p1 = as_priors(priors, 2)
    lam, V = np.linalg.eigh(p0 * rho0 - p1 * rho1)
    pos = V[:, lam > 0]
    M0 = pos @ pos.conj().T
    M1 = np.eye(rho0.shape[0]) - M0
    p_err = 0.5 * (1.0 - float(np.sum(np.abs(lam))))
    return max(p_err, 0.0), Povm((M0, M1))


def helstrom_value(rho0, rho1, priors=(0.5, 0.5)) -> float:
    """Helstrom error without validation or POVM construction (hot loops)."""
    p0, p1 = priors
    lam = np.linalg.eigvalsh(p0 * rho0 - p1 * rho1)
    return max(0.5 * (1.0 - float(np.sum(np.abs(lam)))), 0.0)


def common_part_upper(A, B) -> float:
    """``(Tr A + Tr B - ||A - B||_1) / 2``.

    This is the dual value of the projector pair built from the negative
    eigenspace of ``A - B``; it bounds :func:`common_part` from above and is
    attained exactly when ``A - (A - B)_+`` is positive semidefinite.
    """
    A = linalg.as_psd(A, "A")
    B = linalg.as_psd(B, "B")
    return 0.5 * (np.trace(A).real + np.trace(B).real - linalg.trace_norm(A - B))


def common_part(A, B):
    """Largest trace of a common positive lower bound: ``max Tr X, 0 <= X <= A, X <= B``.

    Returns ``(value, X)``. The value is zero exactly when the supports of
    ``A`` and ``B`` meet only in the zero vector.
    """
    A = linalg.as_psd(A, "A")
    B = linalg.as_psd(B, "B")
    if A.shape != B.shape:
        raise ValidationError(f"dimensions differ: {A.shape[0]} vs {B.shape[0]}")
    return _common_part(A, B)


def _helstrom_witness(A, B, scale):
    lam, V = np.linalg.eigh(A - B)
    pos = V[:, lam > 0]
    X = A - (pos * lam[lam > 0]) @ pos.conj().T
    X = linalg.hermitian_part(X)
    mu, W = np.linalg.eigh(X)
    if mu[0] >= -1e-10 * scale:
        mu = np.clip(mu, 0.0, None)
        return (W * mu) @ W.conj().T
    return None


def _common_part(A, B):
    scale = max(np.trace(A).real, np.trace(B).real, 1e-300)
    if np.max(np.abs(A - B)) <= 1e-14 * scale:
        return float(np.trace(A).real), A.copy()
    X = _helstrom_witness(A, B, scale)
    if X is not None:
        return float(np.trace(X).real), X
    lamA, VA = linalg.psd_eig(A)
    lamB, VB = linalg.psd_eig(B)
    if lamA.size == 0 or lamB.size == 0:
        return 0.0, np.zeros_like(A)
    mu, W = np.linalg.eigh(VA @ VA.conj().T + VB @ VB.conj().T)
    S = W[:, mu >= 2.0 - INTERSECT_TOL]
    k = S.shape[1]
    if k == 0:
        return 0.0, np.zeros_like(A)
    # shorted operators: Y <= A with supp Y in S  <=>  Y <= (S^dag A^+ S)^-1
    GA = S.conj().T @ ((VA / lamA) @ VA.conj().T) @ S
    GB = S.conj().T @ ((VB / lamB) @ VB.conj().T) @ S
    Ar = np.linalg.inv(linalg.hermitian_part(GA))
    Br = np.linalg.inv(linalg.hermitian_part(GB))
    if k == 1:
        val = float(min(Ar[0, 0].real, Br[0, 0].real))
        return val, val * (S @ S.conj().T)
    Y = _helstrom_witness(linalg.hermitian_part(Ar), linalg.hermitian_part(Br), scale)
    if Y is None:
        Y = _barrier_common_part(linalg.hermitian_part(Ar), linalg.hermitian_part(Br))
    X = linalg.hermitian_part(S @ Y @ S.conj().T)
    return float(np.trace(Y).real), X


def _hermitian_basis(k: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of k x k Hermitian matrices, as flattened columns."""
    cols = []
    for i in range(k):
        E = np.zeros((k, k), dtype=complex)
        E[i, i] = 1.0
        cols.append(E.ravel())
    r = 1 / math.sqrt(2)
    for i in range(k):
        for j in range(i + 1, k):
            E = np.zeros((k, k), dtype=complex)
            E[i, j] = E[j, i] = r
            cols.append(E.ravel())
            E = np.zeros((k, k), dtype=complex)
            E[i, j], E[j, i] = -1j * r, 1j * r
            cols.append(E.ravel())
    return np.array(cols).T


def _barrier_common_part(A, B, gap_tol=1e-11, max_newton=60):
    """Log-barrier Newton path for ``max Tr Y`` over ``0 < Y < A, Y < B`` (A, B positive definite)."""
    k = A.shape[0]
    basis = _hermitian_basis(k)
    tr_vec = np.array([np.trace(basis[:, a].reshape(k, k)).real for a in range(k * k)])
    scale = max(np.trace(A).real, np.trace(B).real)
    An, Bn = A / scale, B / scale

    def slacks(Y):
        return (Y, An - Y, Bn - Y)

    def feasible(Y):
        try:
            for Z in slacks(Y):
                np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            return False
        return True

    lo = min(np.linalg.eigvalsh(An)[0], np.linalg.eigvalsh(Bn)[0])
    Y = 0.5 * lo * np.eye(k, dtype=complex)
    t = 1.0
    while 3 * k / t > gap_tol:
        t_next = t * 30.0
        Yc, dec = _center(Y, t_next, slacks, feasible, basis, tr_vec, max_newton)
        if dec > 1e-6:
            # the Hessian condition number grows like t^2; keep the last well-centred point
            if t < 1e6:
                raise NumericError(f"barrier centering did not converge (decrement {dec:.2e})")
            break
        Y, t = Yc, t_next
    return linalg.hermitian_part(Y) * scale


def _center(Y, t, slacks, feasible, basis, tr_vec, max_newton):
    k = Y.shape[0]
    dec = math.inf
    for _ in range(max_newton):
        invs = [np.linalg.inv(Z) for Z in slacks(Y)]
        G = -invs[0] + invs[1] + invs[2]
        grad = -t * tr_vec + np.real(basis.conj().T @ G.ravel())
        H = np.zeros((k * k, k * k))
        for Zi in invs:
            H += np.real(basis.conj().T @ np.kron(Zi, Zi.T) @ basis)
        step = -np.linalg.solve(H, grad)
        dec = float(-grad @ step)
        if dec / 2 < 1e-10:
            break
        D = linalg.hermitian_part((basis @ step).reshape(k, k))
        # damped step stays inside the Dikin ellipsoid of the self-concordant barrier
        a = 1.0 / (1.0 + math.sqrt(dec)) if dec > 1 / 16 else 1.0
        while not feasible(Y + a * D):
            a *= 0.5
            if a < 1e-12:
                return Y, math.inf
        Y = Y + a * D
    return Y, dec


def _support_overlaps(rho, sigma):
    lr, Vr = linalg.psd_eig(rho)
    ls, Vs = linalg.psd_eig(sigma)
    O = np.abs(Vr.conj().T @ Vs) ** 2
    return lr, ls, O


def state_chernoff_objective(rho, sigma, s: float) -> float:
    """``Tr rho^s sigma^(1-s)`` with the support convention ``0^0 = 0``."""
    lr, ls, O = _support_overlaps(linalg.hermitian_part(rho), linalg.hermitian_part(sigma))
    return float(np.sum(np.outer(lr**s, ls ** (1 - s)) * O))


def state_chernoff(rho, sigma):
    """Quantum Chernoff quantity ``max_s -log Tr rho^s sigma^(1-s)`` and its maximiser.

    Returns ``(math.inf, 0.5)`` when the supports are orthogonal.
    """
    rho, sigma = _pair(rho, sigma)
    lr, ls, O = _support_overlaps(rho, sigma)
    if O.sum() <= ORTHOGONAL_TOL:
        return math.inf, 0.5
    llr, lls = np.log(lr), np.log(ls)

    def q(s):
        return float(np.sum(np.exp(np.add.outer(s * llr, (1 - s) * lls)) * O))

    grid = np.linspace(0.0, 1.0, CHERNOFF_GRID)
    S = grid[:, None, None]
    vals = np.einsum("gij,ij->g", np.exp(S * llr[:, None] + (1 - S) * lls), O)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best_s, best_q = float(grid[i]), float(vals[i])
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    qc, qd = q(c), q(d)
    while b - a > CHERNOFF_STOP:
        if qc < qd:
            b, d, qd = d, c, qc
            c = b - g * (b - a)
            qc = q(c)
        else:
            a, c, qc = c, d, qd
            d = a + g * (b - a)
            qd = q(d)
    for s, val in ((c, qc), (d, qd)):
        if val < best_q:
            best_s, best_q = float(s), val
    if best_q <= 0:
        return math.inf, best_s
    if best_q >= 1 - 1e-12:  # round-off level: treat as identical on the overlap
        return 0.0, best_s
    return -math.log(best_q), best_s


def pretty_good_measurement(states, priors) -> Povm:
    """``M_i = S^-1/2 p_i rho_i S^-1/2`` with ``S = sum p_i rho_i``; the part of the
    identity outside supp(S) is added to element 0."""
    S = sum(p * r for p, r in zip(priors, states))
    lam, V = linalg.psd_eig(linalg.hermitian_part(S))
    Sih = (V / np.sqrt(lam)) @ V.conj().T
    els = [Sih @ (p * r) @ Sih for p, r in zip(priors, states)]
    els[0] = els[0] + np.eye(S.shape[0]) - V @ V.conj().T
    return Povm(tuple(els))


def multi_error(states, priors=None):
    """Bracket ``(lower, upper, povm)`` on the minimal error of identifying one of several states.

    Two states give the exact Helstrom value. For three or more, ``upper`` is
    the error of the pretty good measurement (returned) and ``lower = upper/2``.
    """
    states = [linalg.as_density(r, f"state {i}") for i, r in enumerate(states)]
    if len(states) < 2:
        raise ValidationError("need at least two states")
    if any(r.shape != states[0].shape for r in states):
        raise ValidationError("state dimensions differ")
    priors = uniform_priors(len(states)) if priors is None else as_priors(priors, len(states))
    if len(states) == 2:
        p, povm = helstrom_error(states[0], states[1], priors)
        return p, p, povm
    povm = pretty_good_measurement(states, priors)
    upper = max(povm.error(states, priors), 0.0)
    return upper / 2, upper, povm
