import math

import numpy as np
import pytest

from cvrl.gaussian import VACUUM, GaussianParams
from cvrl.optimize import OptimizerConfig, StartRecord, gaussian_seeds, multistart, param_bounds


def quadratic(target):
    t = target.as_vector()

    def f(p):
        v = p.as_vector()
        return float(np.sum((v[[0, 1, 3, 4]] - t[[0, 1, 3, 4]]) ** 2))

    return f


def test_config_box_merges_over_defaults():
    cfg = OptimizerConfig(box={"nbar": [0, 3]})
    assert cfg.box["nbar"] == [0.0, 3.0]
    assert cfg.box["r"] == [0.0, 2.0]
    with pytest.raises(ValueError):
        OptimizerConfig(starts=0)


def test_config_json_round_trip():
    cfg = OptimizerConfig(starts=5, seed=9, box={"r": [0, 1]})
    back = OptimizerConfig.from_json(cfg.to_json())
    assert back.to_json() == cfg.to_json()


def test_phi_is_unbounded():
    assert param_bounds(OptimizerConfig())[2] == (None, None)


def test_seeds_are_deterministic_and_ordered():
    cfg = OptimizerConfig(starts=6, seed=3)
    c = GaussianParams(nbar=1.0)
    a, b = gaussian_seeds(c, cfg), gaussian_seeds(c, cfg)
    assert a == b
    assert len(a) == 6
    assert a[0] == c and a[1] == VACUUM


def test_seeds_respect_feasibility():
    cfg = OptimizerConfig(starts=5)
    seeds = gaussian_seeds(VACUUM, cfg, feasible=lambda p: p.nbar < 0.5)
    assert all(p.nbar < 0.5 for p in seeds[2:])


def test_multistart_finds_quadratic_minimum():
    target = GaussianParams(0.7, 0.3, 0.0, (0.4, -0.2))
    cfg = OptimizerConfig(starts=3, max_evals=2000)
    recs = multistart(quadratic(target), gaussian_seeds(VACUUM, cfg), cfg)
    assert recs[0].value < 1e-10
    assert all(isinstance(r, StartRecord) for r in recs)
    assert [r.value for r in recs] == sorted(r.value for r in recs)


def test_infinite_start_is_recorded_not_optimised():
    cfg = OptimizerConfig(starts=2)
    recs = multistart(lambda p: math.inf, [VACUUM, VACUUM], cfg)
    assert all(r.value == math.inf and r.nfev == 1 for r in recs)
    assert [r.index for r in recs] == [0, 1]
    assert recs[0].to_json()["value"] == "inf"


def test_thread_pool_gives_identical_result():
    target = GaussianParams(1.1, 0.2, 0.0, (0.0, 0.5))
    cfg = OptimizerConfig(starts=4, max_evals=300)
    seeds = gaussian_seeds(VACUUM, cfg)
    serial = multistart(quadratic(target), seeds, cfg, workers=1)
    pooled = multistart(quadratic(target), seeds, cfg, workers=4)
    assert [(r.index, r.value) for r in serial] == [(r.index, r.value) for r in pooled]


def test_best_stays_in_box():
    cfg = OptimizerConfig(starts=2, box={"nbar": [0, 1]})
    recs = multistart(lambda p: -p.nbar, [VACUUM, GaussianParams(nbar=0.5)], cfg)
    assert recs[0].best.nbar == pytest.approx(1.0)
    assert 0 <= recs[0].best.phi < 2 * math.pi
