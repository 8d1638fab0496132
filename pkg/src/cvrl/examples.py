"""Closed forms for Fock states and incoherent mixtures of two coherent states.

The mixture is

    rho_{q,d} = (1+q)/2 |a_d><a_d| + (1-q)/2 |a_-d><a_-d|,   a_{+-d} = +-d/sqrt(2),

whose Wigner function is two Gaussians centred at ``(+-d, 0)``. It is
Gaussian only when ``d = 0`` or ``|q| = 1``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln
from scipy.stats import poisson

from . import config
from .errors import CutoffTooSmallError
from .fock import DensityState, FockOperator
from .gaussian import MomentForm

__all__ = [
    "fock_robustness",
    "multimode_fock_robustness",
    "MixtureSpec",
    "coherent_vector",
    "mixture_state",
    "mixture_qubit",
    "mixture_eigenvalues",
    "mixture_wigner",
    "mixture_marginal",
    "mixture_reference",
    "mixture_entropy",
    "reference_entropy",
    "relent_bound",
    "homodyne_objective",
    "homodyne_bound",
    "homodyne_inner_numeric",
    "xopt_inequality_check",
    "figure_data",
]

_SQRT2 = math.sqrt(2.0)


def fock_robustness(n: int) -> float:
    """``(n+1)^(n+1) / n^n - 1`` with ``0^0 = 1``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return (n + 1) ** (n + 1) / n**n - 1.0


def multimode_fock_robustness(ns) -> float:
    prod = 1.0
    for n in ns:
        prod *= fock_robustness(n) + 1.0
    return prod - 1.0


@dataclass(frozen=True)
class MixtureSpec:
    q: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.q <= 1.0:
            raise ValueError(f"q={self.q} outside [-1, 1]")
        if self.d < 0:
            raise ValueError(f"d={self.d} must be non-negative")

    @property
    def is_gaussian(self) -> bool:
        return self.d == 0 or abs(self.q) == 1

    @property
    def label(self) -> str:
        return f"mixture:q={self.q:g},d={self.d:g}"


def coherent_vector(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)`` for ``n < cutoff``."""
    n = np.arange(cutoff)
    alpha = complex(alpha)
    if alpha == 0:
        return (n == 0).astype(np.complex128)
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def mixture_state(s: MixtureSpec, cutoff: int = None, tail_tol: float = None) -> DensityState:
    """Fock-basis ``rho_{q,d}``, projected (not renormalised) with its exact tail."""
    cutoff = config.CUTOFF_SINGLE if cutoff is None else cutoff
    tail_tol = config.TAIL_TOL if tail_tol is None else tail_tol
    # both components share the Poisson photon statistics with mean d^2/2
    tail = float(poisson.sf(cutoff - 1, s.d**2 / 2.0))
    if tail > tail_tol:
        raise CutoffTooSmallError(
            f"cutoff {cutoff} drops probability {tail:.3e} of {s.label}", tail_mass=tail
        )
    plus = coherent_vector(s.d / _SQRT2, cutoff)
    minus = coherent_vector(-s.d / _SQRT2, cutoff)
    rho = 0.5 * (1 + s.q) * np.outer(plus, plus.conj()) + 0.5 * (1 - s.q) * np.outer(minus, minus.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return DensityState(FockOperator(cutoff, 1, rho, hermitian=True), tail, label=s.label)


def mixture_qubit(s: MixtureSpec) -> np.ndarray:
    """``rho_{q,d}`` in the orthonormal basis of normalised even/odd cat states."""
    e = math.exp(-s.d**2)
    off = s.q * math.sqrt(1.0 - e * e)
    return 0.5 * np.array([[1.0 + e, off], [off, 1.0 - e]])


def mixture_eigenvalues(s: MixtureSpec):
    """``(lambda_-, lambda_+) = (1 -+ sqrt(q^2 + e^{-2d^2}(1-q^2))) / 2``."""
    root = math.sqrt(s.q**2 + math.exp(-2 * s.d**2) * (1 - s.q**2))
    return 0.5 * (1 - root), 0.5 * (1 + root)


def mixture_wigner(s: MixtureSpec, x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    g = lambda c: np.exp(-((x - c) ** 2) - y**2)  # noqa: E731
    return ((1 + s.q) * g(s.d) + (1 - s.q) * g(-s.d)) / (2 * math.pi)


def mixture_marginal(s: MixtureSpec):
    """Position distribution ``x -> int W(x, y) dy``."""
    c = 1.0 / (2 * math.sqrt(math.pi))

    def p(x):
        x = np.asarray(x, float)
        return c * ((1 + s.q) * np.exp(-((x - s.d) ** 2)) + (1 - s.q) * np.exp(-((x + s.d) ** 2)))

    return p


def mixture_reference(s: MixtureSpec) -> MomentForm:
    """Moments of the Gaussian sharing ``rho_{q,d}``'s first and second moments."""
    return MomentForm(
        np.array([s.d * s.q, 0.0]), np.diag([2 * s.d**2 * (1 - s.q**2) + 1.0, 1.0])
    )


def _xlogx(v):
    return v * math.log(v) if v > 0 else 0.0


def reference_entropy(s: MixtureSpec) -> float:
    """``(1+nu) log(1+nu) - nu log nu`` with ``nu = (-1 + sqrt(1 + 2d^2(1-q^2)))/2``."""
    nu = 0.5 * (-1.0 + math.sqrt(1.0 + 2 * s.d**2 * (1 - s.q**2)))
    return _xlogx(1.0 + nu) - _xlogx(nu)


def mixture_entropy(s: MixtureSpec) -> float:
    lm, lp = mixture_eigenvalues(s)
    return -_xlogx(lm) - _xlogx(lp)


def relent_bound(s: MixtureSpec) -> float:
    """``exp(S(reference) - S(rho_{q,d})) - 1``, a lower bound on the robustness."""
    return max(math.expm1(reference_entropy(s) - mixture_entropy(s)), 0.0)


def _log_homodyne_objective(x, d):
    return 0.5 - (d + x) ** 2 + np.logaddexp(4 * d * x, 0.0) + np.log(x / _SQRT2)


def homodyne_objective(x, d):
    """``e^{1/2-(d+x)^2} (e^{4dx} + 1) x / sqrt(2)`` for ``x > 0``.

    This is the q = 0 marginal ratio after the inner minimisation over the
    Gaussian variance, whose optimum sits at ``a = 2 x^2``.
    """
    x = np.asarray(x, float)
    with np.errstate(divide="ignore"):
        return np.exp(_log_homodyne_objective(x, d))


def homodyne_bound(d: float, step: float = None):
    """Homodyne lower bound on the robustness of ``rho_{0,d}`` and its maximiser.

    Scans ``x`` over ``(0, d + 6]`` then refines around the best grid point
    with a bounded Brent search. Returns ``(max(sup - 1, 0), x_opt)``.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    step = config.HOMODYNE_X_STEP if step is None else step
    xs = np.arange(step, d + 6.0 + step / 2, step)
    vals = _log_homodyne_objective(xs, d)
    k = int(np.argmax(vals))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
    res = minimize_scalar(lambda x: -_log_homodyne_objective(x, d), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    x_opt, best = (float(res.x), -float(res.fun)) if -res.fun >= vals[k] else (float(xs[k]), float(vals[k]))
    return max(math.expm1(best), 0.0), x_opt


def homodyne_inner_numeric(x: float, d: float, a_max: float = None):
    """``min_{a >= 1} p(x) / g_a(x)`` for the q = 0 marginal, by 1-D search.

    ``g_a(x) = e^{-x^2/a} / sqrt(pi a)``. Returns ``(ratio, a_opt)``; used to
    check the analytic optimum ``a = 2 x^2``.
    """
    a_max = config.HOMODYNE_A_MAX if a_max is None else a_max
    p = float(mixture_marginal(MixtureSpec(0.0, d))(x))
    res = minimize_scalar(
        lambda la: x * x * math.exp(-la) + 0.5 * (math.log(math.pi) + la),
        bounds=(0.0, math.log(a_max)), method="bounded", options={"xatol": 1e-12},
    )
    return p * math.exp(float(res.fun)), math.exp(float(res.x))


def xopt_inequality_check(d: float, tol: float = 1e-6) -> bool:
    """Whether ``2 x_opt^2 >= 2 d^2 + 1 + tanh(sqrt(d))^8`` (up to ``tol``)."""
    _, x = homodyne_bound(d)
    return 2 * x * x + tol >= 2 * d * d + 1 + math.tanh(math.sqrt(d)) ** 8


def _map(fn, items):
    workers = config.worker_count()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def figure_data(which: str, grid, q: float = 0.0, optimizer=None, cutoff: int = None):
    """Rows for the Fock-state table (``fig3``) or the mixture bounds table (``fig4``).

    ``fig3`` rows: n, closed_form, optimizer_value, rel_err (the last two are
    ``None`` unless ``optimizer`` is an OptimizerConfig). ``fig4`` rows: d,
    relent_bound, homodyne_bound, x_opt; the homodyne columns are only
    defined for ``q = 0`` and are ``None`` otherwise.
    """
    grid = list(grid)
    if which == "fig3":
        def row(n):
            n = int(n)
            closed = fock_robustness(n)
            out = {"n": n, "closed_form": closed, "optimizer_value": None, "rel_err": None}
            if optimizer is not None:
                from .fock import fock_state
                from .robustness import robustness_gaussian

                N = cutoff if cutoff is not None else max(60, 8 * n + 40)
                val = robustness_gaussian(fock_state(n, N), optimizer).value
                out["optimizer_value"] = val
                out["rel_err"] = abs(val - closed) / closed if closed else abs(val)
            return out
    elif which == "fig4":
        def row(d):
            d = float(d)
            out = {"d": d, "relent_bound": relent_bound(MixtureSpec(q, d)),
                   "homodyne_bound": None, "x_opt": None}
            if q == 0:
                out["homodyne_bound"], out["x_opt"] = homodyne_bound(d)
            return out
    else:
        raise ValueError(f"unknown figure {which!r}; expected 'fig3' or 'fig4'")
    # optimizer runs already use the worker pool internally
    if which == "fig3" and optimizer is not None:
        return [row(n) for n in grid]
    return _map(row, grid)
