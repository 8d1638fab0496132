"""Binary channel-discrimination tasks in which a non-Gaussian state beats every Gaussian.

From a witness ``W`` on ``m`` copies, ``X = I - W / ||W||`` is positive, and
the two channels

    Psi_0(eta) = (1/2 + t/(2||X||)) |0><0| + (1/2 - t/(2||X||)) |1><1|
    Psi_1(eta) = (1/2 - t/(2||X||)) |0><0| + (1/2 + t/(2||X||)) |1><1|,

with ``t = tr[X eta^(x)m]``, are told apart with probability
``(1 + |t| / ||X||) / 2``. Every Gaussian has ``t <= 1``, which caps its
success probability at ``(1 + 1/||X||) / 2``; the witnessed state exceeds it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError
from .fock import FockOperator, as_matrix
from .gaussian import GaussianParams, fock_matrix, params_to_moments
from .optimize import OptimizerConfig, gaussian_seeds, multistart
from .robustness import dmax, optimal_observable, robustness_gaussian
from .witness import WitnessReport, _op_norm, evaluate

__all__ = [
    "DiscriminationTask",
    "task_from_witness",
    "channel_outputs",
    "helstrom_p_succ",
    "p_succ_binary",
    "gaussian_cap",
    "gaussian_sup_p_succ",
    "advantage_ratio",
    "worst_case_single_copy",
    "worst_case_infimum",
    "CSV_FIELDS",
    "task_row",
]

CSV_FIELDS = ("state_label", "d_or_n", "epsilon", "x_norm", "p_rho", "cap", "ratio", "theorem2_cap")


@dataclass
class DiscriminationTask:
    X: FockOperator
    m: int
    x_norm: float
    prior: tuple = (0.5, 0.5)
    description: str = ""
    provenance: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "m": self.m,
            "x_norm": self.x_norm,
            "prior": list(self.prior),
            "description": self.description,
            "provenance": dict(self.provenance),
        }


def task_from_witness(w: WitnessReport) -> DiscriminationTask:
    """Task with ``X = I - W / ||W||``.

    The spectrum of ``X`` lies in ``[0, 2]``: ``W``'s eigenvalues lie in
    ``[-||W||, ||W||]``.
    """
    if not w.op_norm > 0:
        raise ValueError("witness has zero operator norm")
    X = -w.W.data / w.op_norm
    X[np.diag_indices_from(X)] += 1.0
    X = 0.5 * (X + X.conj().T)
    op = FockOperator(w.W.cutoff, w.m, X, hermitian=True)
    return DiscriminationTask(
        op, w.m, _op_norm(X),
        description=f"{w.m}-copy witness task for {w.state_label or 'unlabelled state'}",
        provenance={"witness_sha256": w.digest(), "epsilon": w.epsilon, "w_norm": w.op_norm},
    )


def _expectation(t: DiscriminationTask, eta) -> float:
    E = as_matrix(eta)
    if E.shape != (t.X.cutoff, t.X.cutoff):
        raise InvalidDimensionError(
            f"probe has shape {E.shape}; the task acts on {t.m} copies of "
            f"{t.X.cutoff}-dimensional states"
        )
    return evaluate(t.X, E)


def channel_outputs(t: DiscriminationTask, eta):
    """Diagonals of ``Psi_0(eta^(x)m)`` and ``Psi_1(eta^(x)m)`` on ``{|0>, |1>}``."""
    s = _expectation(t, eta) / (2.0 * t.x_norm)
    return np.array([0.5 + s, 0.5 - s]), np.array([0.5 - s, 0.5 + s])


def helstrom_p_succ(p0, p1, prior=(0.5, 0.5)) -> float:
    """Optimal success probability for two commuting (classical) outputs."""
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    return 0.5 * (1.0 + float(np.sum(np.abs(prior[0] * p0 - prior[1] * p1))))


def p_succ_binary(t: DiscriminationTask, eta) -> float:
    """``(1 + |tr[X eta^(x)m]| / ||X||) / 2`` via the Helstrom formula."""
    out0, out1 = channel_outputs(t, eta)
    return helstrom_p_succ(out0, out1, t.prior)


def gaussian_cap(t: DiscriminationTask) -> float:
    """Largest success probability any Gaussian can reach on a witness task."""
    return 0.5 * (1.0 + 1.0 / t.x_norm)


def gaussian_sup_p_succ(t: DiscriminationTask, cfg: OptimizerConfig = None, center=None):
    """Best Gaussian success probability found by multistart search.

    A lower bound on the true supremum, reported for diagnostics; the
    advantage certificate uses :func:`gaussian_cap`. Returns
    ``(value, GaussianParams)``.
    """
    cfg = cfg or OptimizerConfig()
    N = t.X.cutoff

    def objective(p):
        m = params_to_moments(p)
        sig = fock_matrix(m.mu, m.V, N)
        if 1.0 - np.trace(sig).real > cfg.tail_tol:
            return math.inf
        return -p_succ_binary(t, sig)

    seeds = gaussian_seeds(center or GaussianParams(), cfg,
                           feasible=lambda p: math.isfinite(objective(p)))
    best = multistart(objective, seeds, cfg)[0]
    return -best.value, best.best


def advantage_ratio(t: DiscriminationTask, rho) -> float:
    """Success probability of ``rho`` over the Gaussian cap."""
    return p_succ_binary(t, rho) / gaussian_cap(t)


def worst_case_single_copy(rho, sigma, floor: float = None):
    """Best single-copy advantage of ``rho`` over one fixed Gaussian ``sigma``.

    Uses the optimal observable ``X`` and returns ``(ratio, X)`` with
    ``ratio = tr[rho X] / tr[sigma X] = exp(Dmax(rho || sigma))``.
    """
    R = as_matrix(rho)
    if isinstance(sigma, GaussianParams):
        m = params_to_moments(sigma)
        S = fock_matrix(m.mu, m.V, R.shape[0])
    else:
        S = as_matrix(sigma)
    X = optimal_observable(R, S, floor)
    num = float(np.vdot(X.data, R).real)
    den = float(np.vdot(X.data, S).real)
    return num / den, X


def worst_case_infimum(rho, grid=(), cfg: OptimizerConfig = None):
    """Smallest fixed-Gaussian advantage over ``grid`` and a multistart search.

    Only an upper estimate of the infimum over all Gaussians. Returns
    ``(value, GaussianParams, source)`` where ``source`` is ``"grid"`` or
    ``"multistart"``.
    """
    R = as_matrix(rho)
    best = (math.inf, None, "grid")
    for p in grid:
        m = params_to_moments(p)
        d = dmax(R, fock_matrix(m.mu, m.V, R.shape[0]))
        if math.exp(d) < best[0]:
            best = (math.exp(d), p, "grid")
    res = robustness_gaussian(rho, cfg)
    if 1.0 + res.value < best[0]:
        best = (1.0 + res.value, res.argmin, "multistart")
    return best


def task_row(t: DiscriminationTask, rho, robustness_value: float, label: str, d_or_n) -> dict:
    """One CSV row (see ``CSV_FIELDS``) for a witness-derived task."""
    p = p_succ_binary(t, rho)
    cap = gaussian_cap(t)
    return {
        "state_label": label,
        "d_or_n": d_or_n,
        "epsilon": t.provenance.get("epsilon"),
        "x_norm": t.x_norm,
        "p_rho": p,
        "cap": cap,
        "ratio": p / cap,
        "theorem2_cap": (1.0 + robustness_value) ** t.m,
    }
