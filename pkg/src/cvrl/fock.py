"""Dense linear algebra on truncated multimode Fock spaces.

Each mode keeps the basis ``|0>, ..., |cutoff-1>``; an operator on
``modes`` modes is a dense complex matrix of side ``cutoff**modes`` with
the first mode as the most significant index (``numpy.kron`` order).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import config
from .errors import InvalidDimensionError, InvalidStateError, ResourceLimitError

__all__ = [
    "FockOperator",
    "DensityState",
    "as_matrix",
    "ladder_ops",
    "tensor",
    "tensor_power",
    "swap_operator",
    "cyclic_shift_operator",
    "cyclic_shift_permutation",
    "norms",
    "von_neumann_entropy",
    "purity",
    "fock_state",
    "thermal_state",
    "sorted_eigh",
    "save_operator",
    "load_operator",
    "operator_to_bytes",
    "operator_from_bytes",
]


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator on ``modes`` truncated modes.

    ``hermitian`` is a promise checked at construction time, not a request
    to symmetrise.
    """

    cutoff: int
    modes: int
    data: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        side = self.cutoff**self.modes
        if self.modes < 1 or self.cutoff < 1:
            raise InvalidDimensionError("cutoff and modes must be positive")
        if data.shape != (side, side):
            raise InvalidDimensionError(
                f"expected a {side}x{side} matrix for cutoff={self.cutoff}, "
                f"modes={self.modes}; got shape {data.shape}"
            )
        if self.hermitian:
            err = np.max(np.abs(data - data.conj().T)) if side else 0.0
            if err > config.HERMITIAN_TOL:
                raise InvalidStateError(f"operator flagged Hermitian but |A - A^dag| = {err:.3e}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def side(self) -> int:
        return self.data.shape[0]

    @property
    def H(self) -> "FockOperator":
        return FockOperator(self.cutoff, self.modes, self.data.conj().T, self.hermitian)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def __matmul__(self, other):
        other_data = as_matrix(other)
        return FockOperator(self.cutoff, self.modes, self.data @ other_data)

    def __repr__(self):
        return f"FockOperator(cutoff={self.cutoff}, modes={self.modes}, hermitian={self.hermitian})"


@dataclass(frozen=True, eq=False)
class DensityState:
    """Positive, (nearly) unit-trace operator plus the weight lost to truncation.

    The trace of the stored block plus ``tail_mass`` must equal one: states
    are projected onto the truncated space, never renormalised.
    """

    op: FockOperator
    tail_mass: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.op.hermitian:
            raise InvalidStateError("density operators must be flagged Hermitian")
        if self.tail_mass < 0:
            raise InvalidStateError("tail_mass must be non-negative")
        tr = self.op.trace().real
        if abs(tr + self.tail_mass - 1.0) > config.TRACE_TOL:
            raise InvalidStateError(
                f"trace {tr:.12f} plus tail mass {self.tail_mass:.3e} differs from 1"
            )
        w = np.linalg.eigvalsh(self.op.data)
        if w[0] < -config.PSD_TOL:
            raise InvalidStateError(f"density has negative eigenvalue {w[0]:.3e}")

    @classmethod
    def from_matrix(cls, rho, cutoff=None, modes=1, tail_mass=0.0, label="", symmetrize=True):
        rho = np.asarray(rho, dtype=np.complex128)
        if symmetrize:
            rho = 0.5 * (rho + rho.conj().T)
        if cutoff is None:
            cutoff = int(round(rho.shape[0] ** (1.0 / modes)))
        return cls(FockOperator(cutoff, modes, rho, hermitian=True), float(tail_mass), label)

    @property
    def data(self) -> np.ndarray:
        return self.op.data

    @property
    def cutoff(self) -> int:
        return self.op.cutoff

    @property
    def modes(self) -> int:
        return self.op.modes

    def __repr__(self):
        lab = f", label={self.label!r}" if self.label else ""
        return f"DensityState(cutoff={self.cutoff}, modes={self.modes}, tail_mass={self.tail_mass:.3e}{lab})"


def as_matrix(x) -> np.ndarray:
    """Dense complex matrix behind a FockOperator, DensityState or array."""
    if isinstance(x, DensityState):
        return x.op.data
    if isinstance(x, FockOperator):
        return x.data
    return np.asarray(x, dtype=np.complex128)


def _check_side(cutoff, modes):
    side = cutoff**modes
    if side > config.MAX_SIDE:
        raise ResourceLimitError(
            f"cutoff {cutoff} on {modes} modes needs side {side} > budget {config.MAX_SIDE}"
        )
    return side


def ladder_ops(cutoff: int):
    """Annihilation and creation operators on ``|0>..|cutoff-1>``."""
    if cutoff < 2:
        raise InvalidDimensionError("cutoff must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(np.complex128)
    return FockOperator(cutoff, 1, a), FockOperator(cutoff, 1, a.conj().T)


def tensor(A, B) -> FockOperator:
    A = A.op if isinstance(A, DensityState) else A
    B = B.op if isinstance(B, DensityState) else B
    if A.cutoff != B.cutoff:
        raise InvalidDimensionError("tensor factors must share the per-mode cutoff")
    modes = A.modes + B.modes
    _check_side(A.cutoff, modes)
    return FockOperator(
        A.cutoff, modes, np.kron(A.data, B.data), hermitian=A.hermitian and B.hermitian
    )


def tensor_power(A, m: int):
    if isinstance(A, DensityState):
        op = tensor_power(A.op, m)
        tail = 1.0 - op.trace().real
        return DensityState(op, max(tail, 0.0), label=f"{A.label}^{m}" if A.label else "")
    return reduce(tensor, [A] * m)


def cyclic_shift_permutation(m: int, cutoff: int) -> np.ndarray:
    """Column index of the single nonzero entry in each row of ``V_m``.

    ``V_m |j1, j2, ..., jm> = |j2, ..., jm, j1>`` so that
    ``tr[V_m (A1 x ... x Am)] = tr[A1 A2 ... Am]``.
    """
    if m < 1:
        raise InvalidDimensionError("shift operator needs m >= 1")
    side = _check_side(cutoff, m)
    digits = np.indices((cutoff,) * m).reshape(m, side)
    # row i = (i1..im) has its 1 in column j with j_{k+1} = i_k, i.e. j = (i_m, i_1, ..., i_{m-1})
    src = np.roll(digits, 1, axis=0)
    return np.ravel_multi_index(tuple(src), (cutoff,) * m)


def cyclic_shift_operator(m: int, cutoff: int) -> FockOperator:
    if cutoff < 2:
        raise InvalidDimensionError("cutoff must be at least 2")
    perm = cyclic_shift_permutation(m, cutoff)
    side = perm.size
    V = np.zeros((side, side), dtype=np.complex128)
    V[np.arange(side), perm] = 1.0
    return FockOperator(cutoff, m, V, hermitian=m <= 2)


def swap_operator(cutoff: int) -> FockOperator:
    return cyclic_shift_operator(2, cutoff)


def norms(A):
    """Trace norm, operator norm and Hilbert-Schmidt norm of ``A``."""
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    return float(np.sum(s)), float(s[0]) if s.size else 0.0, float(np.sqrt(np.sum(s**2)))


def sorted_eigh(A):
    """Ascending eigen-decomposition with a deterministic eigenvector phase.

    Each eigenvector is rotated so its first component above 1e-12 in
    magnitude is real and positive.
    """
    w, U = np.linalg.eigh(as_matrix(A))
    idx = np.argmax(np.abs(U) > 1e-12, axis=0)
    lead = U[idx, np.arange(U.shape[1])]
    phase = np.where(np.abs(lead) > 0, lead / np.where(np.abs(lead) > 0, np.abs(lead), 1), 1)
    return w, U / phase[None, :]


def _spectrum(rho):
    w = np.linalg.eigvalsh(as_matrix(rho))
    if w.size and w[0] < -config.PSD_TOL:
        raise InvalidStateError(f"density has negative eigenvalue {w[0]:.3e}")
    return w


def von_neumann_entropy(rho, base=None) -> float:
    """-sum(p log p) over eigenvalues above 1e-14 (nats unless ``base`` given)."""
    w = _spectrum(rho)
    w = w[w > config.ENTROPY_EIG_CUTOFF]
    S = float(-np.sum(w * np.log(w)))
    if base is not None:
        S /= np.log(base)
    return float(S) + 0.0


def purity(rho) -> float:
    M = as_matrix(rho)
    return float(np.real(np.vdot(M.conj().T, M)))


def fock_state(n: int, cutoff: int) -> DensityState:
    if not 0 <= n < cutoff:
        raise InvalidDimensionError(f"|{n}> does not fit below cutoff {cutoff}")
    rho = np.zeros((cutoff, cutoff), dtype=np.complex128)
    rho[n, n] = 1.0
    return DensityState(FockOperator(cutoff, 1, rho, hermitian=True), 0.0, label=f"fock:{n}")


def thermal_state(nbar: float, cutoff: int) -> DensityState:
    k = np.arange(cutoff)
    if nbar == 0:
        p = (k == 0).astype(float)
        tail = 0.0
    else:
        ratio = nbar / (nbar + 1.0)
        p = ratio**k / (nbar + 1.0)
        tail = ratio**cutoff
    return DensityState(
        FockOperator(cutoff, 1, np.diag(p).astype(np.complex128), hermitian=True),
        float(tail),
        label=f"thermal:{nbar:g}",
    )


# --- binary operator format -------------------------------------------------

_MAGIC = b"FOCKOP1\x00"
_HEADER = struct.Struct("<8sII")


def operator_to_bytes(A: FockOperator) -> bytes:
    return _HEADER.pack(_MAGIC, A.cutoff, A.modes) + np.ascontiguousarray(
        A.data, dtype="<c16"
    ).tobytes()


def operator_from_bytes(buf: bytes) -> FockOperator:
    if len(buf) < _HEADER.size:
        raise InvalidDimensionError("buffer shorter than the 16-byte header")
    magic, cutoff, modes = _HEADER.unpack_from(buf)
    if magic != _MAGIC:
        raise InvalidDimensionError(f"bad magic {magic!r}")
    side = cutoff**modes
    payload = buf[_HEADER.size:]
    if len(payload) != side * side * 16:
        raise InvalidDimensionError(
            f"payload of {len(payload)} bytes does not match side {side}"
        )
    data = np.frombuffer(payload, dtype="<c16").reshape(side, side).astype(np.complex128)
    herm = bool(np.max(np.abs(data - data.conj().T)) <= config.HERMITIAN_TOL) if side else True
    return FockOperator(int(cutoff), int(modes), data, hermitian=herm)


def save_operator(A: FockOperator, path) -> None:
    with open(path, "wb") as fh:
        fh.write(operator_to_bytes(A))


def load_operator(path) -> FockOperator:
    with open(path, "rb") as fh:
        return operator_from_bytes(fh.read())
