"""Multistart derivative-free search over single-mode Gaussian parameters.

Every search in the package (robustness, witness epsilon, adversarial
witness probes, discrimination suprema) goes through :func:`multistart`.
Starts are independent, so they can run on a thread pool; the merged
result is ordered by ``(value, start index)`` and therefore does not
depend on scheduling.
"""
from __future__ import annotations

import copy
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import config
from .gaussian import VACUUM, GaussianParams

__all__ = ["OptimizerConfig", "StartRecord", "multistart", "gaussian_seeds", "param_bounds"]

_PARAM_NAMES = ("nbar", "r", "phi", "ax", "ay")


@dataclass
class OptimizerConfig:
    starts: int = config.OPTIMIZER["starts"]
    max_evals: int = config.OPTIMIZER["max_evals"]
    xtol: float = config.OPTIMIZER["xtol"]
    ftol: float = config.OPTIMIZER["ftol"]
    seed: int = config.OPTIMIZER["seed"]
    box: dict = field(default_factory=lambda: copy.deepcopy(config.OPTIMIZER["box"]))
    tail_tol: float = config.OPTIMIZER_TAIL_TOL
    floor: float = config.SIGMA_FLOOR
    sigma_pad: int = config.OPTIMIZER_SIGMA_PAD
    sigma_min_cutoff: int = config.OPTIMIZER_SIGMA_MIN_CUTOFF
    extra_seeds: list = field(default_factory=list)
    workers: int = None

    def __post_init__(self):
        base = copy.deepcopy(config.OPTIMIZER["box"])
        base.update(self.box or {})
        self.box = {k: [float(v[0]), float(v[1])] for k, v in base.items()}
        if self.starts < 1 or self.max_evals < 1:
            raise ValueError("starts and max_evals must be positive")
        if self.sigma_pad < 1:
            raise ValueError("sigma_pad must be at least 1")
        if self.sigma_min_cutoff < 1:
            raise ValueError("sigma_min_cutoff must be at least 1")

    def to_json(self):
        return {
            "starts": self.starts,
            "max_evals": self.max_evals,
            "xtol": self.xtol,
            "ftol": self.ftol,
            "seed": self.seed,
            "box": self.box,
            "tail_tol": self.tail_tol,
            "floor": self.floor,
            "sigma_pad": self.sigma_pad,
            "sigma_min_cutoff": self.sigma_min_cutoff,
        }

    @classmethod
    def from_json(cls, obj):
        keys = ("starts", "max_evals", "xtol", "ftol", "seed", "box", "tail_tol", "floor", "sigma_pad",
                "sigma_min_cutoff")
        return cls(**{k: obj[k] for k in keys if k in obj})


@dataclass
class StartRecord:
    index: int
    start: GaussianParams
    best: GaussianParams
    value: float
    nfev: int
    converged: bool

    def to_json(self):
        return {
            "index": self.index,
            "start": self.start.to_json(),
            "best": self.best.to_json(),
            "value": _json_float(self.value),
            "nfev": self.nfev,
            "converged": self.converged,
        }


def _json_float(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def param_bounds(cfg: OptimizerConfig):
    # phi is periodic and left unbounded; GaussianParams wraps it
    b = cfg.box
    return [tuple(b["nbar"]), tuple(b["r"]), (None, None), tuple(b["ax"]), tuple(b["ay"])]


def _clip_to_box(x, cfg):
    lo = np.array([cfg.box[k][0] for k in _PARAM_NAMES])
    hi = np.array([cfg.box[k][1] for k in _PARAM_NAMES])
    y = np.clip(x, lo, hi)
    y[2] = x[2] % (2 * math.pi)
    return y


def gaussian_seeds(center: GaussianParams, cfg: OptimizerConfig, feasible=None, include_vacuum=True):
    """Deterministic start list: ``center``, vacuum, ``cfg.extra_seeds``, then random draws.

    Random draws are centred on ``center`` and, when ``feasible`` is given,
    redrawn until the objective is finite there (bounded number of tries).
    """
    seeds = [center]
    if include_vacuum:
        seeds.append(VACUUM)
    seeds.extend(cfg.extra_seeds)
    rng = np.random.default_rng(cfg.seed)
    c = center.as_vector()
    tries = 0
    while len(seeds) < cfg.starts and tries < 50 * cfg.starts:
        tries += 1
        x = np.array([
            rng.uniform(0.0, max(1.0, 2.0 * c[0])),
            rng.uniform(0.0, min(1.0, cfg.box["r"][1])),
            rng.uniform(0.0, 2 * math.pi),
            c[3] + rng.normal(0.0, 0.5),
            c[4] + rng.normal(0.0, 0.5),
        ])
        p = GaussianParams.from_vector(_clip_to_box(x, cfg))
        if feasible is not None and not feasible(p):
            continue
        seeds.append(p)
    return seeds[: max(cfg.starts, 1 + include_vacuum + len(cfg.extra_seeds))]


def multistart(objective, seeds, cfg: OptimizerConfig, workers=None):
    """Minimise ``objective(GaussianParams) -> float`` from every seed.

    Non-finite objective values act as walls. Returns StartRecords sorted
    by ``(value, index)``.
    """
    bounds = param_bounds(cfg)

    def f(x):
        try:
            v = objective(GaussianParams.from_vector(_clip_to_box(x, cfg)))
        except (ValueError, np.linalg.LinAlgError, FloatingPointError):
            return math.inf
        return v if v == v else math.inf

    def run(item):
        i, p = item
        x0 = _clip_to_box(p.as_vector(), cfg)
        f0 = f(x0)
        if not math.isfinite(f0):
            return StartRecord(i, p, p, math.inf, 1, False)
        with np.errstate(invalid="ignore", over="ignore"):
            res = minimize(
                f, x0, method="Nelder-Mead", bounds=bounds,
                options={
                    "maxfev": cfg.max_evals, "xatol": cfg.xtol, "fatol": cfg.ftol,
                    "adaptive": True, "initial_simplex": _initial_simplex(x0, cfg),
                },
            )
        best_x, best_v = (res.x, float(res.fun)) if res.fun <= f0 else (x0, f0)
        return StartRecord(
            i, p, GaussianParams.from_vector(_clip_to_box(best_x, cfg)), best_v,
            int(res.nfev) + 1, bool(res.success),
        )

    workers = workers or cfg.workers or config.worker_count()
    items = list(enumerate(seeds))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run, items))
    else:
        records = [run(it) for it in items]
    return sorted(records, key=lambda rec: (rec.value, rec.index))


def _initial_simplex(x0, cfg):
    """Simplex stepping inward so no vertex leaves the box."""
    steps = np.array([0.1, 0.05, 0.3, 0.1, 0.1])
    lo = np.array([cfg.box[k][0] for k in _PARAM_NAMES])
    hi = np.array([cfg.box[k][1] for k in _PARAM_NAMES])
    sim = [x0.copy()]
    for k in range(5):
        v = x0.copy()
        step = steps[k]
        if k != 2 and v[k] + step > hi[k]:
            step = -step
        v[k] += step
        if k != 2:
            v[k] = min(max(v[k], lo[k]), hi[k])
        sim.append(v)
    return np.array(sim)
