"""Dense complex matrix kernel.

All matrices are plain ``numpy`` arrays. Tensor products use the row-major
Kronecker convention with subsystem A as the left factor, so that entry
``(iA*rB + iB, jA*cB + jB)`` of ``A (x) B`` is ``A[iA, jA] * B[iB, jB]``.
Every module in the package inherits this ordering.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericError, ValidationError

EPS_HERM = 1e-9
EPS_PSD = 1e-9
EPS_TR = 1e-9
# support decisions: eigenvalues below EPS_RANK * lambda_max count as zero
EPS_RANK = 1e-10


def as_matrix(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise ValidationError(f"{name} must be a non-empty 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} has non-finite entries")
    return M


def as_square(M, name="matrix") -> np.ndarray:
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {M.shape}")
    return M


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def as_hermitian(M, name="operator", tol=EPS_HERM) -> np.ndarray:
    """Validate Hermiticity (relative to the matrix scale) and symmetrise."""
    M = as_square(M, name)
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.conj().T)) > tol * scale:
        raise ValidationError(f"{name} is not Hermitian")
    return hermitian_part(M)


def as_psd(M, name="operator", tol=EPS_PSD) -> np.ndarray:
    M = as_hermitian(M, name)
    lam_min = np.linalg.eigvalsh(M)[0]
    if lam_min < -tol * max(1.0, float(np.abs(np.trace(M)))):
        raise ValidationError(f"{name} is not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return M


def as_density(M, name="state", tol=EPS_TR) -> np.ndarray:
    M = as_psd(M, name)
    tr = np.trace(M).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"{name} has trace {tr!r}, expected 1")
    return M


def pure_state(vec) -> np.ndarray:
    """Density operator of a (normalised) state vector."""
    v = np.asarray(vec, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValidationError("state vector must be non-zero and finite")
    v = v / nrm
    return np.outer(v, v.conj())


def maximally_entangled(d: int) -> np.ndarray:
    """Vector sum_i |ii>/sqrt(d) on C^d (x) C^d."""
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def hermitian_eig(H, validate=True):
    """Eigenvalues in descending order and the matching unitary eigenvector matrix.

    ``H == V @ diag(lam) @ V^dagger`` up to round-off.
    """
    if validate:
        H = as_hermitian(H)
    try:
        lam, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return lam[::-1].copy(), V[:, ::-1].copy()


def support_cutoff(lam: np.ndarray) -> float:
    top = float(np.max(np.abs(lam))) if lam.size else 0.0
    return EPS_RANK * top


def psd_eig(A):
    """Eigen-decomposition of a PSD matrix restricted to its numerical support.

    Returns ``(lam, V)`` with only the eigenpairs above the rank cutoff.
    """
    lam, V = hermitian_eig(A, validate=False)
    keep = lam > support_cutoff(lam)
    return lam[keep], V[:, keep]


def support_projector(A) -> np.ndarray:
    _, V = psd_eig(hermitian_part(np.asarray(A, dtype=complex)))
    return V @ V.conj().T


def trace_norm(M) -> float:
    """Sum of singular values of a square matrix."""
    M = as_square(M)
    if np.allclose(M, M.conj().T, rtol=0, atol=1e-14 * max(1.0, float(np.max(np.abs(M))))):
        return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(M)))))
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def matrix_power_psd(A, s: float) -> np.ndarray:
    """``A**s`` for PSD ``A`` and ``s`` in [0, 1].

    Only eigenvalues on the numerical support are raised; the rest map to 0
    for every ``s``, so ``A**0`` is the support projector.
    """
    if not 0.0 <= s <= 1.0:
        raise ValidationError(f"exponent must lie in [0, 1], got {s}")
    A = as_psd(A)
    lam, V = psd_eig(A)
    return (V * lam**s) @ V.conj().T


def psd_sqrt(A) -> np.ndarray:
    lam, V = psd_eig(hermitian_part(np.asarray(A, dtype=complex)))
    return (V * np.sqrt(lam)) @ V.conj().T


def pinv_psd(A) -> np.ndarray:
    lam, V = psd_eig(hermitian_part(np.asarray(A, dtype=complex)))
    return (V / lam) @ V.conj().T


def tensor(A, B) -> np.ndarray:
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def partial_trace(M, dims, keep="A") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``dA (x) dB``."""
    dA, dB = (int(d) for d in dims)
    M = as_square(M)
    if M.shape[0] != dA * dB:
        raise ValidationError(f"operator of dimension {M.shape[0]} does not factor as {dA}x{dB}")
    T = M.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ajbj->ab", T)
    if keep == "B":
        return np.einsum("iaib->ab", T)
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed density operator of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph
