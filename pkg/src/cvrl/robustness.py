"""Max-relative entropy, generalized robustness over Gaussian states and bounds on it.

``R(rho) = inf_sigma exp(Dmax(rho || sigma)) - 1`` is estimated by a
multistart search over single-mode Gaussian parameters. Any value found is
an upper bound on the infimum; the lower bounds here (relative entropy,
homodyne marginals) bracket it from below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from . import config
from .errors import InvalidDimensionError, NoFeasibleGaussianError
from .fock import DensityState, FockOperator, as_matrix, von_neumann_entropy
from .gaussian import (
    GaussianParams,
    fock_matrix,
    gaussian_entropy,
    moments_of,
    params_to_moments,
    reference_gaussian,
    synthesize,
)
from .optimize import OptimizerConfig, gaussian_seeds, multistart

__all__ = [
    "RobustnessResult",
    "OptimizerConfig",
    "dmax",
    "rel_entropy",
    "rel_entropy_nongaussianity",
    "robustness_fixed",
    "robustness_gaussian",
    "pure_robustness_fixed",
    "multi_copy_robustness",
    "optimal_observable",
    "lower_bound_homodyne",
]


@dataclass
class RobustnessResult:
    """Best robustness found by the Gaussian search (an upper bound)."""

    value: float
    argmin: GaussianParams
    dmax: float
    sigma_cutoff: int = None
    multistart_log: list = field(default_factory=list)
    status: str = "converged"
    label: str = "upper bound (best found)"

    def to_json(self):
        return {
            "value": self.value,
            "dmax": self.dmax,
            "sigma_cutoff": self.sigma_cutoff,
            "argmin": self.argmin.to_json(),
            "status": self.status,
            "label": self.label,
            "multistart_log": [rec.to_json() for rec in self.multistart_log],
        }


def _support(sigma, floor):
    w, U = np.linalg.eigh(sigma)
    keep = w > floor
    return w[keep], U[:, keep]


def _dmax_matrices(rho, sigma, floor):
    w, U = _support(sigma, floor)
    if w.size == 0:
        return math.inf
    P = U.conj().T @ rho @ U
    leak = np.trace(rho).real - np.trace(P).real
    if leak > 10 * floor:
        return math.inf
    s = 1.0 / np.sqrt(w)
    M = s[:, None] * P * s[None, :]
    lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1]
    if lam <= 0:
        return -math.inf
    return math.log(lam)


def _check_pair(rho, sigma):
    R, S = as_matrix(rho), as_matrix(sigma)
    if R.shape != S.shape:
        raise InvalidDimensionError(f"dimension mismatch {R.shape} vs {S.shape}")
    return R, S


def dmax(rho, sigma, floor: float = None) -> float:
    """``log lambda_max(sigma^-1/2 rho sigma^-1/2)`` on the support of ``sigma``.

    ``sigma``'s eigenvalues at or below ``floor`` span its numerical kernel;
    if ``rho`` puts more than ``10 * floor`` weight there the result is
    ``math.inf``.
    """
    floor = config.SIGMA_FLOOR if floor is None else floor
    R, S = _check_pair(rho, sigma)
    return _dmax_matrices(R, S, floor)


def rel_entropy(rho, sigma, floor: float = None) -> float:
    """Umegaki relative entropy ``tr[rho (log rho - log sigma)]`` in nats."""
    floor = config.SIGMA_FLOOR if floor is None else floor
    R, S = _check_pair(rho, sigma)
    w, U = _support(S, floor)
    P = U.conj().T @ R @ U
    if np.trace(R).real - np.trace(P).real > 10 * floor:
        return math.inf
    lr = np.linalg.eigvalsh(R)
    lr = lr[lr > config.ENTROPY_EIG_CUTOFF]
    cross = float(np.real(np.sum(np.diagonal(P) * np.log(w))))
    return float(np.sum(lr * np.log(lr))) - cross


def rel_entropy_nongaussianity(rho) -> float:
    """``S(reference Gaussian) - S(rho)``: the relative entropy to the closest Gaussian."""
    return gaussian_entropy(moments_of(rho)) - von_neumann_entropy(rho)


def _as_sigma(sigma, cutoff, tail_tol=None):
    if isinstance(sigma, GaussianParams):
        return synthesize(sigma, cutoff, tail_tol).data
    return as_matrix(sigma)


def robustness_fixed(rho, sigma, floor: float = None) -> float:
    """``exp(Dmax(rho || sigma)) - 1`` for one Gaussian ``sigma`` (params or state)."""
    R = as_matrix(rho)
    d = dmax(R, _as_sigma(sigma, R.shape[0]), floor)
    return math.expm1(d) if math.isfinite(d) else (math.inf if d > 0 else -1.0)


def pure_robustness_fixed(psi, sigma, floor: float = None) -> float:
    """``<psi|sigma^-1|psi> - 1`` on the numerical support of ``sigma``."""
    floor = config.SIGMA_FLOOR if floor is None else floor
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"state vector has norm {nrm:.12f}")
    w, U = _support(_as_sigma(sigma, psi.size), floor)
    c = U.conj().T @ psi
    if 1.0 - float(np.vdot(c, c).real) > 10 * floor:
        return math.inf
    return float(np.sum(np.abs(c) ** 2 / w)) - 1.0


def multi_copy_robustness(R: float, m: int) -> float:
    """Robustness of ``m`` copies from the single-copy value: ``(1+R)^m - 1``."""
    if R < 0 or m < 1:
        raise ValueError("need R >= 0 and m >= 1")
    return (1.0 + R) ** m - 1.0


def optimal_observable(rho, sigma, floor: float = None) -> FockOperator:
    """Projector ``X`` maximising ``tr[rho X] / tr[sigma X]`` over ``0 <= X <= I``.

    The optimum is the top eigenvector ``v`` of ``sigma^-1/2 rho sigma^-1/2``
    mapped back as ``sigma^-1/2 v`` and normalised; the ratio then equals
    ``exp(Dmax(rho || sigma))``.
    """
    floor = config.SIGMA_FLOOR if floor is None else floor
    R, S = _check_pair(rho, sigma)
    if not math.isfinite(_dmax_matrices(R, S, floor)):
        raise ValueError("rho is not supported on sigma; the ratio is unbounded")
    w, U = _support(S, floor)
    s = 1.0 / np.sqrt(w)
    M = s[:, None] * (U.conj().T @ R @ U) * s[None, :]
    _, vecs = np.linalg.eigh(0.5 * (M + M.conj().T))
    u = U @ (s * vecs[:, -1])
    u /= np.linalg.norm(u)
    X = np.outer(u, u.conj())
    cutoff = rho.cutoff if isinstance(rho, (DensityState, FockOperator)) else R.shape[0]
    modes = rho.modes if isinstance(rho, (DensityState, FockOperator)) else 1
    return FockOperator(cutoff, modes, 0.5 * (X + X.conj().T), hermitian=True)


def _sigma_block(p, cutoff, cfg):
    """Fock matrix of ``p`` on the smallest working cutoff that holds all but ``cfg.tail_tol``.

    The working cutoff lies in ``[cutoff, max(cfg.sigma_pad * cutoff,
    cfg.sigma_min_cutoff)]``, with no padding at all when ``sigma_pad`` is 1.
    Returns None when even the largest one loses too much probability.
    """
    m = params_to_moments(p)
    sig = fock_matrix(m.mu, m.V, cutoff)
    if 1.0 - np.trace(sig).real <= cfg.tail_tol:
        return sig
    if cfg.sigma_pad <= 1:
        return None
    limit, M = max(cfg.sigma_pad * cutoff, cfg.sigma_min_cutoff), cutoff
    while True:
        if M >= limit:
            return None
        M = min(2 * M, limit)
        sig = fock_matrix(m.mu, m.V, M)
        ok = np.nonzero(1.0 - np.cumsum(np.diagonal(sig).real) <= cfg.tail_tol)[0]
        if ok.size:
            break
    M = max(int(ok[0]) + 1, cutoff)
    return sig[:M, :M]


def _pad(A, M):
    """Zero-pad a square matrix to side ``M``."""
    if A.shape[0] == M:
        return A
    out = np.zeros((M, M), dtype=A.dtype)
    out[: A.shape[0], : A.shape[0]] = A
    return out


def _gaussian_objective(R, cutoff, cfg):
    # For rho = F F^dag of rank k, lambda_max(sigma^-1/2 rho sigma^-1/2) is the
    # top eigenvalue of the k x k matrix F^dag sigma^-1 F. Search-only shortcut;
    # reported values go through the full dmax.
    lam, vec = np.linalg.eigh(R)
    keep = lam > 1e-15 * max(lam[-1], 1e-300)
    lowrank = keep.sum() <= cutoff // 4
    F = vec[:, keep] * np.sqrt(lam[keep]) if lowrank else None
    trace = float(np.sum(lam[keep])) if lowrank else 0.0

    def objective(p):
        sig = _sigma_block(p, cutoff, cfg)
        if sig is None:
            return math.inf
        M = sig.shape[0]
        if not lowrank:
            return _dmax_matrices(_pad(R, M), sig, cfg.floor)
        w, U = _support(sig, cfg.floor)
        C = U[:cutoff].conj().T @ F
        if trace - np.sum(np.abs(C) ** 2) > 10 * cfg.floor:
            return math.inf
        G = (C.conj().T / w) @ C
        top = np.linalg.eigvalsh(0.5 * (G + G.conj().T))[-1]
        return math.log(top) if top > 0 else -math.inf

    return objective


def robustness_gaussian(rho, cfg: OptimizerConfig = None) -> RobustnessResult:
    """Minimise ``Dmax(rho || sigma)`` over single-mode Gaussian ``sigma``.

    Seeds: the reference Gaussian (same first and second moments), the
    vacuum, ``cfg.extra_seeds`` and random draws around the reference.
    Candidates are synthesized on a working cutoff of up to
    ``cfg.sigma_pad`` times the state's, and at least ``cfg.sigma_min_cutoff``
    (the state is zero-padded), and rejected if they still lose more than ``cfg.tail_tol`` probability.
    """
    cfg = cfg or OptimizerConfig()
    R = as_matrix(rho)
    cutoff = R.shape[0]
    if getattr(rho, "modes", 1) != 1:
        raise InvalidDimensionError("Gaussian search is single-mode")
    objective = _gaussian_objective(R, cutoff, cfg)
    try:
        center = reference_gaussian(rho)
    except ValueError:
        center = GaussianParams()
    seeds = gaussian_seeds(center, cfg, feasible=lambda p: math.isfinite(objective(p)))
    records = multistart(objective, seeds, cfg)
    best = records[0]
    if not math.isfinite(best.value):
        raise NoFeasibleGaussianError(
            f"D_max is infinite at every one of {len(records)} starts; "
            f"cutoff {cutoff} is probably too small"
        )
    sig = _sigma_block(best.best, cutoff, cfg)
    d = _dmax_matrices(_pad(R, sig.shape[0]), sig, cfg.floor)
    # truncation noise can push the minimum a hair below zero for free states
    d = max(d, 0.0)
    return RobustnessResult(
        value=math.expm1(d),
        argmin=best.best,
        dmax=d,
        sigma_cutoff=sig.shape[0],
        multistart_log=records,
        status="converged" if best.converged else "budget-exhausted",
    )


# --- homodyne lower bound ----------------------------------------------------


def _inner_log_ratio(logp, x, center, a_max):
    """``min_{1 <= a <= a_max} log[p(x) / g_a(x)]`` for a Gaussian ``g_a`` centred at ``center``.

    ``g_a(x) = exp(-(x - c)^2 / a) / sqrt(pi a)`` is the position marginal of
    a Gaussian with variance ``a / 2`` (``a = 1`` is the vacuum).
    """
    t = (x - center) ** 2

    def h(a):
        return t / a + 0.5 * math.log(math.pi * a)

    # h is unimodal in a with stationary point a = 2 t
    a_star = min(max(2.0 * t, 1.0), a_max)
    return logp + h(a_star), a_star


def lower_bound_homodyne(
    marginal,
    center: float = None,
    xs=None,
    a_max: float = None,
    full_output: bool = False,
    numeric_inner: bool = False,
):
    """Lower bound on ``R`` from one homodyne (position) marginal.

    For every Gaussian ``sigma`` and every ``x``,
    ``1 + R >= p_rho(x) / p_sigma(x)`` minimised over Gaussian marginals.
    The Gaussian mean is pinned to the mean of ``marginal`` and its variance
    parameter ``a`` is restricted to ``a >= 1``; the bound is the supremum
    over ``x`` of the inner minimum, minus one, clipped at zero.

    Parameters
    ----------
    marginal : callable
        Vectorised position density ``x -> p(x)``.
    center : float, optional
        Gaussian mean; defaults to the mean of ``marginal`` on ``xs``.
    xs : array, optional
        Scan grid, default ``[-8, 8]`` with step 0.01 shifted to ``center``.
    a_max : float
        Upper limit for the variance parameter.
    full_output : bool
        Also return ``(x_opt, a_opt)``.
    numeric_inner : bool
        Solve the inner problem with a bounded scalar minimiser instead of
        the stationary-point formula (used as a cross-check).
    """
    a_max = config.HOMODYNE_A_MAX if a_max is None else a_max
    step, span = config.HOMODYNE_X_STEP, config.HOMODYNE_X_SPAN
    if center is None:
        grid = np.arange(-span - 20.0, span + 20.0 + step / 2, step)
        p = np.asarray(marginal(grid), float)
        norm = trapezoid(p, grid)
        center = float(trapezoid(grid * p, grid) / norm) if norm > 0 else 0.0
    if xs is None:
        xs = center + np.arange(-span, span + step / 2, step)
    xs = np.asarray(xs, float)

    def inner(x):
        px = float(marginal(np.array([x]))[0])
        if px <= 0:
            return -math.inf, 1.0
        logp = math.log(px)
        if not numeric_inner:
            return _inner_log_ratio(logp, x, center, a_max)
        t = (x - center) ** 2
        res = minimize_scalar(
            lambda la: t * math.exp(-la) + 0.5 * (math.log(math.pi) + la),
            bounds=(0.0, math.log(a_max)), method="bounded", options={"xatol": 1e-12},
        )
        return logp + float(res.fun), math.exp(res.x)

    vals = np.array([inner(x)[0] for x in xs])
    k = int(np.argmax(vals))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
    x_opt, best = xs[k], vals[k]
    if hi > lo:
        res = minimize_scalar(lambda x: -inner(x)[0], bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best:
            x_opt, best = float(res.x), float(-res.fun)
    value = max(math.expm1(best), 0.0) if math.isfinite(best) else 0.0
    if full_output:
        return value, float(x_opt), inner(x_opt)[1]
    return value
