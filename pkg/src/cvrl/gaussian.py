"""Single-mode Gaussian states: parameters, moments, Fock matrices, Wigner.

Conventions
-----------
Quadratures are ``x = (a + a^dag)/sqrt(2)`` and ``y = (a - a^dag)/(i sqrt(2))``.
The covariance matrix is normalised so the vacuum has ``V = I`` (twice the
symmetrised second central moments). Many libraries use ``hbar = 2`` or a
vacuum of ``I/2`` instead; convert before comparing.

A Gaussian state is parametrised as ``D(alpha) S(xi) tau(nbar) S^dag D^dag``
with ``xi = r exp(i phi)``, which gives

    V  = (2 nbar + 1) R(phi/2) diag(exp(-2r), exp(2r)) R(phi/2)^T
    mu = sqrt(2) (Re alpha, Im alpha)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import _kernels, config
from .errors import CutoffTooSmallError, InvalidStateError
from .fock import DensityState, FockOperator, as_matrix, ladder_ops, tensor

__all__ = [
    "GaussianParams",
    "MomentForm",
    "VACUUM",
    "symplectic_form",
    "bona_fide_check",
    "params_to_moments",
    "moments_to_params",
    "fock_matrix",
    "synthesize",
    "synthesize_product",
    "recommended_cutoff",
    "moments_of",
    "reference_gaussian",
    "gaussian_wigner",
    "gaussian_entropy",
    "symplectic_eigenvalues",
    "gaussian_unitary",
    "apply_gaussian_unitary",
    "hermite_functions",
    "quadrature_distribution",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GaussianParams:
    """Single-mode Gaussian state ``(nbar, r, phi, alpha)``."""

    nbar: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    alpha: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.nbar < 0 or self.r < 0:
            raise InvalidStateError("nbar and r must be non-negative")
        object.__setattr__(self, "nbar", float(self.nbar))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "phi", float(self.phi) % _TWO_PI)
        ax, ay = self.alpha
        object.__setattr__(self, "alpha", (float(ax), float(ay)))

    @classmethod
    def from_vector(cls, x):
        """From the optimiser vector ``(nbar, r, phi, ax, ay)``."""
        return cls(max(x[0], 0.0), max(x[1], 0.0), x[2], (x[3], x[4]))

    def as_vector(self):
        return np.array([self.nbar, self.r, self.phi, self.alpha[0], self.alpha[1]])

    @property
    def energy(self) -> float:
        """Mean photon number."""
        return (
            (self.nbar + 0.5) * math.cosh(2 * self.r) - 0.5
            + self.alpha[0] ** 2 + self.alpha[1] ** 2
        )

    def to_json(self):
        return {"nbar": self.nbar, "r": self.r, "phi": self.phi, "alpha": list(self.alpha)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["nbar"], obj["r"], obj["phi"], tuple(obj["alpha"]))


VACUUM = GaussianParams()


@dataclass(frozen=True, eq=False)
class MomentForm:
    mu: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        V = np.asarray(self.V, dtype=float)
        if V.shape != (mu.size, mu.size) or mu.size % 2:
            raise InvalidStateError(f"incompatible moment shapes {mu.shape}, {V.shape}")
        if not np.allclose(V, V.T, atol=1e-12, rtol=0):
            raise InvalidStateError("covariance matrix must be symmetric")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "V", 0.5 * (V + V.T))

    def to_json(self):
        return {"mu": self.mu.tolist(), "V": self.V.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(np.array(obj["mu"]), np.array(obj["V"]))


def symplectic_form(m: int = 1) -> np.ndarray:
    if m < 1:
        raise ValueError("need at least one mode")
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def bona_fide_check(V) -> bool:
    """True iff ``V + i Omega >= 0`` up to 1e-9."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise InvalidStateError(f"covariance must be square with even side, got {V.shape}")
    if not np.allclose(V, V.T, atol=1e-12, rtol=0):
        raise InvalidStateError("covariance matrix must be symmetric")
    Om = symplectic_form(V.shape[0] // 2)
    return bool(np.linalg.eigvalsh(V + 1j * Om)[0] >= -config.BONA_FIDE_TOL)


def _rot(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def params_to_moments(p: GaussianParams) -> MomentForm:
    R = _rot(p.phi / 2)
    V = (2 * p.nbar + 1) * R @ np.diag([math.exp(-2 * p.r), math.exp(2 * p.r)]) @ R.T
    mu = math.sqrt(2.0) * np.array(p.alpha)
    return MomentForm(mu, V)


def moments_to_params(m: MomentForm) -> GaussianParams:
    if m.mu.size != 2:
        raise InvalidStateError("only single-mode moments convert to GaussianParams")
    if not bona_fide_check(m.V):
        raise InvalidStateError("covariance violates the bona fide condition")
    nu = math.sqrt(max(np.linalg.det(m.V), 0.0))
    nbar = max((nu - 1.0) / 2.0, 0.0)
    w, U = np.linalg.eigh(m.V / nu)
    if w[1] - w[0] < 1e-12:
        r, phi = 0.0, 0.0
    else:
        r = -0.5 * math.log(w[0])
        vx, vy = U[:, 0]
        phi = (2.0 * math.atan2(vy, vx)) % _TWO_PI
    alpha = (m.mu[0] / math.sqrt(2.0), m.mu[1] / math.sqrt(2.0))
    return GaussianParams(nbar, max(r, 0.0), phi, alpha)


def _bargmann(mu, V):
    """Quadratic form ``(A, b)`` and prefactor of the Fock generating function."""
    W = np.array([[1.0, 1.0j], [1.0, -1.0j]]) / math.sqrt(2.0)
    Q = W @ (0.5 * V) @ W.conj().T + 0.5 * np.eye(2)
    Qi = np.linalg.inv(Q)
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    A = X - Qi @ X
    beta = np.array([mu[0] + 1j * mu[1], mu[0] - 1j * mu[1]]) / math.sqrt(2.0)
    b = Qi @ beta
    scale = np.exp(-0.5 * (beta.conj() @ Qi @ beta)) / np.sqrt(np.linalg.det(Q).real)
    return A, b, scale


def fock_matrix(mu, V, cutoff: int, backend=None) -> np.ndarray:
    """Exact ``<m|rho|n>`` for ``m, n < cutoff`` of the Gaussian ``(mu, V)``.

    No truncation error enters the retained block; only the tail is dropped.
    """
    A, b, scale = _bargmann(np.asarray(mu, float), np.asarray(V, float))
    kernel = _kernels.gaussian_fock_block if backend is None else _kernels.IMPLEMENTATIONS[backend]
    rho = kernel(
        complex(A[0, 0]), complex(A[0, 1]), complex(A[1, 1]),
        complex(b[0]), complex(b[1]), complex(scale), int(cutoff),
    )
    return 0.5 * (rho + rho.conj().T)


def recommended_cutoff(p: GaussianParams) -> int:
    """Heuristic cutoff ``4 (2 nbar + 1) e^{2r} + 8 |alpha|^2``."""
    ax, ay = p.alpha
    return int(math.ceil(4 * (2 * p.nbar + 1) * math.exp(2 * p.r) + 8 * (ax * ax + ay * ay)))


def synthesize(p: GaussianParams, cutoff: int, tail_tol: float = None) -> DensityState:
    """Truncated Fock-basis density matrix of ``p``.

    Raises CutoffTooSmallError when more than ``tail_tol`` probability falls
    beyond the cutoff.
    """
    tail_tol = config.TAIL_TOL if tail_tol is None else tail_tol
    m = params_to_moments(p)
    rho = fock_matrix(m.mu, m.V, cutoff)
    tail = max(1.0 - float(np.trace(rho).real), 0.0)
    if tail > tail_tol:
        raise CutoffTooSmallError(
            f"cutoff {cutoff} drops probability {tail:.3e} > {tail_tol:.1e} "
            f"(heuristic suggests cutoff >= {recommended_cutoff(p)})",
            tail_mass=tail,
        )
    return DensityState(FockOperator(cutoff, 1, rho, hermitian=True), tail, label="gaussian")


def synthesize_product(params, cutoff: int, tail_tol: float = None) -> DensityState:
    ops = [synthesize(p, cutoff, tail_tol).op for p in params]
    op = ops[0]
    for o in ops[1:]:
        op = tensor(op, o)
    return DensityState(op, max(1.0 - op.trace().real, 0.0), label="gaussian-product")


def moments_of(rho) -> MomentForm:
    """First moments and covariance of a single-mode state.

    Built from ``<a>``, ``<a^2>`` and ``<a^dag a>``, which the retained block
    determines exactly; expectations are divided by the retained trace.
    """
    M = as_matrix(rho)
    N = M.shape[0]
    n = np.arange(N)
    tr = np.trace(M).real
    ea = np.sum(np.diagonal(M, -1) * np.sqrt(n[1:])) / tr
    ea2 = np.sum(np.diagonal(M, -2) * np.sqrt(n[1:-1] * n[2:])) / tr
    en = np.sum(np.diagonal(M).real * n) / tr
    mx, my = math.sqrt(2.0) * ea.real, math.sqrt(2.0) * ea.imag
    vxx = 2 * ea2.real + 2 * en + 1 - mx * mx * 2
    vyy = -2 * ea2.real + 2 * en + 1 - my * my * 2
    vxy = 2 * ea2.imag - 2 * mx * my
    return MomentForm(np.array([mx, my]), np.array([[vxx, vxy], [vxy, vyy]]))


def reference_gaussian(rho) -> GaussianParams:
    return moments_to_params(moments_of(rho))


def gaussian_wigner(m: MomentForm, point) -> float:
    r = np.asarray(point, dtype=float) - m.mu
    modes = m.mu.size // 2
    det = np.linalg.det(m.V)
    if det <= 0:
        raise InvalidStateError("singular covariance matrix")
    return float(np.exp(-r @ np.linalg.solve(m.V, r)) / (math.pi**modes * math.sqrt(det)))


def symplectic_eigenvalues(V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    Om = symplectic_form(V.shape[0] // 2)
    ev = np.abs(np.linalg.eigvals(1j * Om @ V))
    return np.sort(ev)[::2]


def _g(nu):
    if nu <= 0:
        return 0.0
    return (1 + nu) * math.log1p(nu) - nu * math.log(nu)


def gaussian_entropy(m: MomentForm, base=None) -> float:
    """Von Neumann entropy from the symplectic spectrum of ``V``."""
    if not bona_fide_check(m.V):
        raise InvalidStateError("covariance violates the bona fide condition")
    if m.V.shape == (2, 2):
        nus = [math.sqrt(max(np.linalg.det(m.V), 1.0))]
    else:
        nus = symplectic_eigenvalues(m.V)
    S = sum(_g((max(nt, 1.0) - 1.0) / 2.0) for nt in nus)
    if base is not None:
        S /= math.log(base)
    return S


def gaussian_unitary(cutoff: int, r=0.0, phi=0.0, alpha=(0.0, 0.0), theta=0.0, pad: int = None):
    """``D(alpha) S(r e^{i phi}) R(theta)`` built by matrix exponentials.

    The exponentials are taken on a padded space of ``cutoff + pad`` levels and
    the result is returned at full padded size; callers project afterwards.
    """
    if pad is None:
        pad = max(60, 2 * cutoff)
    M = cutoff + pad
    a, ad = (o.data for o in ladder_ops(M))
    n = np.arange(M)
    U = np.diag(np.exp(-1j * theta * n))
    if r:
        xi = r * np.exp(1j * phi)
        U = expm(0.5 * (np.conj(xi) * a @ a - xi * ad @ ad)) @ U
    al = complex(alpha[0], alpha[1])
    if al:
        U = expm(al * ad - np.conj(al) * a) @ U
    return U


def apply_gaussian_unitary(rho, r=0.0, phi=0.0, alpha=(0.0, 0.0), theta=0.0, pad: int = None):
    """Conjugate a single-mode state by a Gaussian unitary, then truncate."""
    M = as_matrix(rho)
    N = M.shape[0]
    U = gaussian_unitary(N, r, phi, alpha, theta, pad)
    big = np.zeros((U.shape[0],) * 2, dtype=np.complex128)
    big[:N, :N] = M
    out = (U @ big @ U.conj().T)[:N, :N]
    out = 0.5 * (out + out.conj().T)
    tail = max(1.0 - np.trace(out).real, 0.0)
    return DensityState(FockOperator(N, 1, out, hermitian=True), tail, label="transformed")


def hermite_functions(xs, cutoff: int) -> np.ndarray:
    """Position wavefunctions ``<x|n>`` for ``n < cutoff``, shape (cutoff, len(xs))."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    psi = np.zeros((cutoff, xs.size))
    psi[0] = math.pi**-0.25 * np.exp(-0.5 * xs**2)
    if cutoff > 1:
        psi[1] = math.sqrt(2.0) * xs * psi[0]
    for n in range(1, cutoff - 1):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * xs * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
    return psi


def quadrature_distribution(rho, xs) -> np.ndarray:
    """Homodyne density ``<x|rho|x>`` of a single-mode state."""
    M = as_matrix(rho)
    psi = hermite_functions(xs, M.shape[0])
    return np.einsum("mk,mn,nk->k", psi, M, psi).real
