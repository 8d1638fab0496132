"""Multi-copy witnesses of non-Gaussianity built from permutation operators.

For a state ``rho`` and ``eps > 0`` smaller than the squared
Hilbert-Schmidt distance from ``rho`` to every Gaussian state, the two-copy
operator

    W = V_2 + (tr[rho^2] - eps) I - 2 rho (x) I

satisfies ``tr[W eta^(x)2] = tr[(rho - eta)^2] - eps``: negative on
``rho``, non-negative on Gaussians. The four-copy operator does the same
with ``tr[(rho - eta)^4]``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh
from scipy.stats import qmc

from . import config
from .errors import IndistinguishableError, InvalidDimensionError, WitnessViolationError
from .fock import FockOperator, _check_side, as_matrix, cyclic_shift_permutation, purity
from .gaussian import GaussianParams, fock_matrix, params_to_moments, reference_gaussian
from .optimize import OptimizerConfig, gaussian_seeds, multistart
from .robustness import _pad, _sigma_block

__all__ = [
    "WitnessReport",
    "SoundnessReport",
    "epsilon_bound",
    "two_copy_witness",
    "four_copy_witness",
    "evaluate",
    "check_witness_soundness",
    "robustness_lower_from_witness",
    "build_witness",
    "DEFAULT_PROBE_BOX",
]

# Gaussian probes for soundness sampling; the search box in OptimizerConfig
# is mostly infeasible at two-copy cutoffs
DEFAULT_PROBE_BOX = {
    "nbar": [0.0, 2.0],
    "r": [0.0, 1.0],
    "phi": [0.0, 2 * math.pi],
    "ax": [-3.0, 3.0],
    "ay": [-3.0, 3.0],
}


@dataclass
class WitnessReport:
    W: FockOperator
    m: int
    epsilon: float
    op_norm: float
    evaluations: list = field(default_factory=list)
    heuristic_flags: list = field(default_factory=list)
    state_label: str = ""

    def digest(self) -> str:
        """SHA-256 of the witness matrix bytes, for provenance records."""
        return hashlib.sha256(np.ascontiguousarray(self.W.data).tobytes()).hexdigest()

    def to_json(self):
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "op_norm": self.op_norm,
            "cutoff": self.W.cutoff,
            "state": self.state_label,
            "sha256": self.digest(),
            "evaluations": [{"label": lab, "value": val} for lab, val in self.evaluations],
            "heuristic_flags": list(self.heuristic_flags),
        }


@dataclass
class SoundnessReport:
    min_value: float
    argmin: GaussianParams
    n_sobol: int
    n_adversarial: int
    sobol_min: float
    adversarial_min: float

    def to_json(self):
        return {
            "min_value": self.min_value,
            "argmin": self.argmin.to_json(),
            "n_sobol": self.n_sobol,
            "n_adversarial": self.n_adversarial,
            "sobol_min": self.sobol_min,
            "adversarial_min": self.adversarial_min,
        }


def _op_norm(H):
    """Largest absolute eigenvalue of a Hermitian matrix."""
    if H.shape[0] <= 1024:
        w = np.linalg.eigvalsh(H)
        return float(max(abs(w[0]), abs(w[-1])))
    op = LinearOperator(H.shape, matvec=lambda v: H @ v, dtype=H.dtype)
    w = eigsh(op, k=1, which="LM", tol=0, return_eigenvectors=False)
    return float(abs(w[0]))


def _distance_objective(R, cfg, power):
    # sigma may live on a larger working cutoff than rho, which is zero-padded
    pr = purity(R)
    N = R.shape[0]

    def objective(p):
        sig = _sigma_block(p, N, cfg)
        if sig is None:
            return math.inf
        if power == 2:
            return pr - 2.0 * np.vdot(R, sig[:N, :N]).real + np.vdot(sig, sig).real
        return float(np.sum(np.linalg.eigvalsh(_pad(R, sig.shape[0]) - sig) ** power))

    return objective


def epsilon_bound(rho, cfg: OptimizerConfig = None, safety: float = 0.5, power: int = 2):
    """Heuristic ``eps = safety * min_sigma tr[(rho - sigma)^power]`` over Gaussians.

    ``power`` is 2 for the two-copy witness and 4 for the four-copy one. The
    minimum is only the best one a multistart search found, so this is
    not a certified lower bound; soundness is re-checked by
    :func:`check_witness_soundness`. Returns ``(eps, best_params)``.
    """
    cfg = cfg or OptimizerConfig()
    R = as_matrix(rho)
    cutoff = R.shape[0]
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    objective = _distance_objective(R, cfg, power)
    try:
        center = reference_gaussian(rho)
    except ValueError:
        center = GaussianParams()
    seeds = gaussian_seeds(center, cfg, feasible=lambda p: math.isfinite(objective(p)))
    best = multistart(objective, seeds, cfg)[0]
    if not best.value > 1e-10:
        raise IndistinguishableError(
            f"tr[(rho - sigma)^{power}] = {best.value:.3e} at the Gaussian {best.best}; "
            "the state cannot be told apart from a Gaussian at this cutoff"
        )
    return safety * best.value, best.best


def _cutoff_of(rho, R):
    return getattr(rho, "cutoff", R.shape[0])


def _add_shift(W, m, cutoff, weight, total):
    """``W += weight * (V_m (x) I^(total-m))``, symmetrised when ``V_m`` is not Hermitian."""
    perm = cyclic_shift_permutation(m, cutoff)
    rest = cutoff ** (total - m)
    rows = np.arange(perm.size * rest)
    cols = (perm[:, None] * rest + np.arange(rest)[None, :]).ravel()
    if m <= 2:
        W[rows, cols] += weight
    else:
        W[rows, cols] += 0.5 * weight
        W[cols, rows] += 0.5 * weight


def _shift_times(m, cutoff, B):
    """``V_m B`` for a matrix ``B`` on ``m`` factors: a row permutation."""
    return B[cyclic_shift_permutation(m, cutoff), :]


def two_copy_witness(rho, epsilon: float, label: str = "") -> WitnessReport:
    """``W = V_2 + (tr[rho^2] - eps) I - 2 rho (x) I``, symmetrised."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    R = as_matrix(rho)
    N = _cutoff_of(rho, R)
    if N**2 > config.MAX_SIDE:
        raise InvalidDimensionError(f"two-copy side {N**2} exceeds {config.MAX_SIDE}")
    W = np.kron(-2.0 * R, np.eye(N))
    _add_shift(W, 2, N, 1.0, 2)
    W[np.diag_indices_from(W)] += purity(R) - epsilon
    W = 0.5 * (W + W.conj().T)
    op = FockOperator(N, 2, W, hermitian=True)
    return WitnessReport(op, 2, float(epsilon), _op_norm(W),
                         state_label=label or getattr(rho, "label", ""))


def four_copy_witness(rho, epsilon: float, label: str = "") -> WitnessReport:
    """Hermitised four-copy witness ``(W~ + W~^dag) / 2`` with

    ``W~ = (tr[rho^4] - eps) I - 4 rho^3 (x) I^3 + 4 (V_2 (x) I^2)(rho^2 (x) I^3)
    + 2 (V_2 (x) I^2)(rho (x) rho (x) I^2) - 4 (V_3 (x) I)(rho (x) I^3) + V_4``.

    Every term except ``V_4`` acts trivially on the last factor, so they are
    assembled on three factors and expanded once.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    R = as_matrix(rho)
    N = _cutoff_of(rho, R)
    _check_side(N, 4)
    I1 = np.eye(N)
    R2 = R @ R
    R3 = R2 @ R
    t4 = float(np.trace(R2 @ R2).real)
    K = -4.0 * np.kron(np.kron(R3, I1), I1)
    K2 = 4.0 * _shift_times(2, N, np.kron(R2, I1)) + 2.0 * _shift_times(2, N, np.kron(R, R))
    K += np.kron(K2, I1)
    K += -4.0 * _shift_times(3, N, np.kron(np.kron(R, I1), I1))
    K = 0.5 * (K + K.conj().T)
    W = np.kron(K, I1)
    del K
    _add_shift(W, 4, N, 1.0, 4)
    W[np.diag_indices_from(W)] += t4 - epsilon
    op = FockOperator(N, 4, W, hermitian=True)
    return WitnessReport(op, 4, float(epsilon), _op_norm(W),
                         state_label=label or getattr(rho, "label", ""))


def evaluate(w, eta, label: str = None) -> float:
    """``tr[W eta^(x)m]`` by contracting one copy at a time.

    If ``label`` is given the value is appended to ``w.evaluations``.
    """
    W = w.W if isinstance(w, WitnessReport) else w
    m, N = W.modes, W.cutoff
    E = as_matrix(eta)
    if E.shape != (N, N):
        raise InvalidDimensionError(f"probe has shape {E.shape}, witness factors are {N}x{N}")
    # T[i1..im, j1..jm]; contracting (i_k, j_k) with eta[j_k, i_k] each time
    T = W.data.reshape((N,) * (2 * m))
    for k in range(m):
        T = np.tensordot(T, E, axes=([0, m - k], [1, 0]))
    val = float(np.real(T))
    if label is not None and isinstance(w, WitnessReport):
        w.evaluations.append((label, val))
    return val


def _witness_objective(w, tail_tol):
    N = w.W.cutoff

    def objective(p):
        m = params_to_moments(p)
        sig = fock_matrix(m.mu, m.V, N)
        if 1.0 - np.trace(sig).real > tail_tol:
            return math.inf
        return evaluate(w, sig)

    return objective


def _sobol_params(n, box, seed, feasible):
    keys = ("nbar", "r", "phi", "ax", "ay")
    lo = np.array([box[k][0] for k in keys])
    hi = np.array([box[k][1] for k in keys])
    sampler = qmc.Sobol(d=5, scramble=True, seed=seed)
    # the drawn total must stay a power of two: first 2^m points, then doubling
    m = max(int(math.ceil(math.log2(max(n, 2)))), 6)
    out = []
    for _ in range(12):
        for u in sampler.random_base2(m):
            p = GaussianParams.from_vector(lo + u * (hi - lo))
            if feasible(p):
                out.append(p)
                if len(out) == n:
                    return out
        m = int(round(math.log2(sampler.num_generated)))
    return out


def check_witness_soundness(
    w: WitnessReport,
    cfg: OptimizerConfig = None,
    n_sobol: int = 500,
    n_adversarial: int = 50,
    adversarial_evals: int = 500,
    box: dict = None,
    tol: float = 1e-8,
    raise_on_violation: bool = True,
) -> SoundnessReport:
    """Minimum of ``tr[W sigma^(x)m]`` over sampled and optimised Gaussians.

    ``n_sobol`` feasible points come from a scrambled Sobol sequence over
    ``box``; the ``n_adversarial`` lowest of them (plus the vacuum) seed a
    multistart minimisation with ``adversarial_evals`` evaluations per
    start. A value below ``-tol`` raises
    WitnessViolationError carrying the offending parameters.
    """
    cfg = cfg or OptimizerConfig()
    box = box or DEFAULT_PROBE_BOX
    objective = _witness_objective(w, cfg.tail_tol)
    sample = _sobol_params(n_sobol, box, cfg.seed, lambda p: math.isfinite(objective(p)))
    values = [objective(p) for p in sample]
    order = sorted(range(len(sample)), key=lambda i: (values[i], i))
    sobol_min = values[order[0]] if order else math.inf
    seeds = [GaussianParams()] + [sample[i] for i in order[: max(n_adversarial - 1, 0)]]
    adv_cfg = OptimizerConfig(**{**cfg.to_json(), "max_evals": adversarial_evals})
    records = multistart(objective, seeds[:n_adversarial], adv_cfg) if n_adversarial else []
    adv_min = records[0].value if records else math.inf
    if adv_min < sobol_min:
        best_val, best_p = adv_min, records[0].best
    else:
        best_val, best_p = sobol_min, sample[order[0]] if order else GaussianParams()
    report = SoundnessReport(best_val, best_p, len(sample), len(records), sobol_min, adv_min)
    if raise_on_violation and best_val < -tol:
        raise WitnessViolationError(
            f"tr[W sigma^(x){w.m}] = {best_val:.3e} < 0 at {best_p}", params=best_p, value=best_val
        )
    return report


def robustness_lower_from_witness(rho, w: WitnessReport) -> float:
    """``(max(0, -tr[W rho^(x)m] / ||W||))^(1/m)``, a lower bound on the robustness."""
    v = evaluate(w, rho)
    return max(0.0, -v / w.op_norm) ** (1.0 / w.m)


def build_witness(rho, m: int = 2, cfg: OptimizerConfig = None, safety: float = 0.5) -> WitnessReport:
    """Pick a heuristic epsilon for ``rho``, build its ``m``-copy witness and evaluate it on ``rho``."""
    if m not in (2, 4):
        raise ValueError("only two- and four-copy witnesses are available")
    eps, nearest = epsilon_bound(rho, cfg, safety=safety, power=m)
    w = (two_copy_witness if m == 2 else four_copy_witness)(rho, eps)
    w.heuristic_flags.append(
        f"epsilon = {safety:g} x best multistart tr[(rho - sigma)^{m}]; not a certified bound"
    )
    w.heuristic_flags.append(f"nearest Gaussian found: {json.dumps(nearest.to_json())}")
    evaluate(w, rho, label=w.state_label or "rho")
    return w
