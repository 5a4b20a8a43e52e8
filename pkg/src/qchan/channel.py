"""Quantum operations in Kraus form.

Channel documents are UTF-8 JSON::

    {
      "name": "depolarizing",
      "dim_in": 2,
      "dim_out": 2,
      "kraus": [ [[[re, im], [re, im]], [[re, im], [re, im]]], ... ]
    }

``kraus`` is a list of matrices, each a list of ``dim_out`` rows of
``dim_in`` entries, each entry a ``[re, im]`` pair. Ancillas are always the
LEFT tensor factor: the extension of ``E`` acts as ``I_anc (x) K_i``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import ChannelFormatError, CptpError, ValidationError

CPTP_TOL = 1e-8

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus: tuple
    name: str = ""
    defect: float = field(default=0.0, compare=False)

    def __post_init__(self):
        ops = tuple(linalg.as_matrix(K, f"Kraus operator {i}") for i, K in enumerate(self.kraus))
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        for i, K in enumerate(ops):
            if K.shape != shape:
                raise ValidationError(f"Kraus operator {i} has shape {K.shape}, expected {shape}")
            K.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def stack(self) -> np.ndarray:
        return np.stack(self.kraus)

    def __len__(self):
        return len(self.kraus)

    def __eq__(self, other):
        if not isinstance(other, KrausChannel):
            return NotImplemented
        return (
            self.name == other.name
            and len(self) == len(other)
            and all(np.array_equal(a, b) for a, b in zip(self.kraus, other.kraus))
        )

    __hash__ = None

    def __repr__(self):
        return f"KrausChannel(name={self.name!r}, dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={len(self)})"


def cptp_defect(ch: KrausChannel) -> float:
    S = np.einsum("kji,kjl->il", ch.stack.conj(), ch.stack)
    return linalg.trace_norm(S - np.eye(ch.dim_in))


def validate_cptp(ch: KrausChannel, tol: float = CPTP_TOL):
    """Return ``(valid, defect)`` with defect the trace norm of ``sum K^dag K - I``."""
    defect = cptp_defect(ch)
    return defect <= tol, defect


def require_pair(first: KrausChannel, second: KrausChannel):
    if first.dim_in != second.dim_in or first.dim_out != second.dim_out:
        raise ValidationError(
            f"channel dimensions differ: {first.dim_in}->{first.dim_out} vs {second.dim_in}->{second.dim_out}"
        )
    if first.dim_in != first.dim_out:
        raise ValidationError("discrimination requires channels with dim_in == dim_out")
    return first.dim_in


def apply(ch: KrausChannel, rho) -> np.ndarray:
    rho = linalg.as_square(rho, "state")
    if rho.shape[0] != ch.dim_in:
        raise ValidationError(f"state dimension {rho.shape[0]} != channel input dimension {ch.dim_in}")
    K = ch.stack
    return np.einsum("kij,jl,kml->im", K, rho, K.conj(), optimize=True)


def apply_extended(ch: KrausChannel, rho) -> np.ndarray:
    """Apply ``I_anc (x) ch`` to an operator on ``anc (x) dim_in``."""
    rho = linalg.as_square(rho, "state")
    n = rho.shape[0]
    if n % ch.dim_in:
        raise ValidationError(f"state dimension {n} is not a multiple of channel input dimension {ch.dim_in}")
    da = n // ch.dim_in
    K = ch.stack
    R = rho.reshape(da, ch.dim_in, da, ch.dim_in)
    out = np.einsum("kij,ajbl,kml->aibm", K, R, K.conj(), optimize=True)
    m = da * ch.dim_out
    return out.reshape(m, m)


def apply_extended_pure(ch: KrausChannel, psi) -> np.ndarray:
    """Output of ``I (x) ch`` on the pure input vector ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    da = psi.size // ch.dim_in
    P = psi.reshape(da, ch.dim_in)
    # branch vectors (I (x) K_k)|psi>, shape (k, da, dout)
    W = np.einsum("kij,aj->kai", ch.stack, P).reshape(len(ch), da * ch.dim_out)
    return W.T @ W.conj()


def choi(ch: KrausChannel) -> np.ndarray:
    """Choi state ``(I (x) ch)(Phi)`` on ``dim_in (x) dim_out``, trace one."""
    return apply_extended_pure(ch, linalg.maximally_entangled(ch.dim_in))


def compose(*channels: KrausChannel, name="") -> KrausChannel:
    """Sequential composition; the first argument acts first."""
    ops = [np.eye(channels[0].dim_in, dtype=complex)]
    for ch in channels:
        ops = [K @ A for A in ops for K in ch.kraus]
    return KrausChannel(tuple(ops), name or "*".join(c.name for c in channels))


# --- presets ---------------------------------------------------------------


def identity(d: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=complex),), f"identity:{d}")


def unitary(U, name="unitary") -> KrausChannel:
    U = linalg.as_square(U, "unitary")
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10):
        raise ValidationError("matrix is not unitary")
    return KrausChannel((U,), name)


def weyl_operators(d: int):
    """Generalised Pauli (Weyl) operators X^a Z^b, (a, b) row-major."""
    w = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    Z = np.diag(w ** np.arange(d))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(d) for b in range(d)]


def depolarizing(d: int = 2, p: float = 1.0) -> KrausChannel:
    """``rho -> (1 - p) rho + p Tr(rho) I/d``; qubit Kraus are the Paulis."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing parameter must lie in [0, 1], got {p}")
    ops = [PAULI[k] for k in "IXYZ"] if d == 2 else weyl_operators(d)
    weights = [1 - p + p / d**2] + [p / d**2] * (d * d - 1)
    return KrausChannel(tuple(math.sqrt(w) * W for w, W in zip(weights, ops)), f"depolarizing:{d}:{p:g}")


def amplitude_damping(gamma: float) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"damping parameter must lie in [0, 1], got {gamma}")
    K0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((K0, K1), f"amplitude-damping:{gamma:g}")


def phase_gate(theta: float) -> KrausChannel:
    return KrausChannel((np.diag([1.0, np.exp(1j * theta)]).astype(complex),), f"phase:{theta:g}")


def random_channel(d: int, m: int, rng: np.random.Generator, d_out: int | None = None) -> KrausChannel:
    """Kraus blocks of a Haar-like random isometry ``C^d -> C^m (x) C^d_out``."""
    d_out = d if d_out is None else d_out
    Z = rng.normal(size=(m * d_out, d)) + 1j * rng.normal(size=(m * d_out, d))
    Q, _ = np.linalg.qr(Z)
    return KrausChannel(tuple(Q[i * d_out : (i + 1) * d_out] for i in range(m)), f"random:{d}:{m}")


def from_preset(spec: str) -> KrausChannel:
    """Build a channel from ``identity:d``, ``depolarizing:d:p``,
    ``amplitude-damping:gamma``, ``phase:theta`` or ``unitary:NAME|PATH``."""
    kind, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "identity":
            return identity(int(args[0]) if args else 2)
        if kind == "depolarizing":
            if len(args) == 1:
                return depolarizing(2, float(args[0]))
            return depolarizing(int(args[0]), float(args[1]))
        if kind == "amplitude-damping":
            return amplitude_damping(float(args[0]))
        if kind == "phase":
            return phase_gate(float(args[0]))
        if kind == "unitary":
            key = rest.upper()
            if key in PAULI:
                return unitary(PAULI[key], f"unitary:{key}")
            return unitary(load_matrix(Path(rest)), f"unitary:{Path(rest).name}")
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ChannelFormatError(f"bad preset {spec!r}: {exc}") from exc
    raise ChannelFormatError(f"unknown preset {spec!r}")


# --- serialisation ---------------------------------------------------------


def _encode_matrix(M: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _decode_matrix(obj, where, rows=None, cols=None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ChannelFormatError("matrix must be a non-empty list of rows", where)
    if rows is not None and len(obj) != rows:
        raise ChannelFormatError(f"expected {rows} rows, found {len(obj)}", where)
    ncols = cols if cols is not None else (len(obj[0]) if isinstance(obj[0], list) else -1)
    out = np.empty((len(obj), max(ncols, 0)), dtype=complex)
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != ncols:
            raise ChannelFormatError(f"row {r} must have {ncols} entries", f"{where}, row {r}")
        for c, z in enumerate(row):
            ok = (
                isinstance(z, list)
                and len(z) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            )
            if not ok:
                raise ChannelFormatError("entry must be a [re, im] pair of numbers", f"{where}, row {r}, col {c}")
            out[r, c] = complex(z[0], z[1])
    if not np.all(np.isfinite(out)):
        raise ChannelFormatError("non-finite entry", where)
    return out


def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "name": ch.name,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [_encode_matrix(K) for K in ch.kraus],
    }


def serialize_channel(ch: KrausChannel) -> str:
    return json.dumps(channel_to_dict(ch), indent=1) + "\n"


def parse_channel(text: str, tol: float = CPTP_TOL, force: bool = False) -> KrausChannel:
    """Parse a channel document and check trace preservation.

    With ``force=True`` a defect above ``tol`` is kept on the result as
    ``channel.defect`` instead of raising :class:`CptpError`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ChannelFormatError("top level must be an object")
    for key in ("dim_in", "dim_out", "kraus"):
        if key not in doc:
            raise ChannelFormatError(f"missing field {key!r}")
    din, dout = doc["dim_in"], doc["dim_out"]
    if not all(isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in (din, dout)):
        raise ChannelFormatError("dim_in and dim_out must be positive integers")
    if not isinstance(doc["kraus"], list) or not doc["kraus"]:
        raise ChannelFormatError("kraus must be a non-empty list", "kraus")
    ops = tuple(
        _decode_matrix(K, f"kraus[{i}]", rows=dout, cols=din) for i, K in enumerate(doc["kraus"])
    )
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ChannelFormatError("name must be a string", "name")
    ch = KrausChannel(ops, name)
    valid, defect = validate_cptp(ch, tol)
    if not valid and not force:
        raise CptpError(defect, tol)
    return KrausChannel(ops, name, defect=defect)


def load_channel(path, tol: float = CPTP_TOL, force: bool = False) -> KrausChannel:
    return parse_channel(Path(path).read_text(encoding="utf-8"), tol=tol, force=force)


def save_channel(ch: KrausChannel, path):
    Path(path).write_text(serialize_channel(ch), encoding="utf-8")


def load_matrix(path) -> np.ndarray:
    """Read a bare matrix document: a list of rows of ``[re, im]`` pairs."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    return _decode_matrix(obj, str(path))


def parse_state(text: str) -> np.ndarray:
    """State document: ``{"matrix": [...]}`` (density operator) or ``{"vector": [[re, im], ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    if isinstance(doc, dict) and "vector" in doc:
        vec = _decode_matrix([doc["vector"]], "vector")[0]
        return linalg.pure_state(vec)
    if isinstance(doc, dict) and "matrix" in doc:
        return linalg.as_density(_decode_matrix(doc["matrix"], "matrix"))
    raise ChannelFormatError("state document needs a 'matrix' or 'vector' field")


def serialize_state(rho) -> str:
    return json.dumps({"matrix": _encode_matrix(np.asarray(rho, dtype=complex))}) + "\n"
