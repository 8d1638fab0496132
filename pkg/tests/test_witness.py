import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvrl.errors import IndistinguishableError, InvalidDimensionError, ResourceLimitError, WitnessViolationError
from cvrl.fock import fock_state
from cvrl.gaussian import GaussianParams, synthesize
from cvrl.optimize import OptimizerConfig
from cvrl.witness import (
    WitnessReport,
    build_witness,
    check_witness_soundness,
    epsilon_bound,
    evaluate,
    four_copy_witness,
    robustness_lower_from_witness,
    two_copy_witness,
)

from conftest import random_density


def dense_power_trace(W, eta, m):
    big = eta
    for _ in range(m - 1):
        big = np.kron(big, eta)
    return float(np.trace(W @ big).real)


@pytest.fixture(scope="module")
def w2_fock1():
    rho = fock_state(1, 8)
    return rho, two_copy_witness(rho, 0.3)


def test_two_copy_witness_is_hermitian(w2_fock1):
    _, w = w2_fock1
    assert w.W.hermitian and w.W.modes == 2
    np.testing.assert_allclose(w.W.data, w.W.data.conj().T, atol=0)
    assert w.op_norm == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(w.W.data))))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_two_copy_identity(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(5, rng)
    eta = random_density(5, rng, rank=int(rng.integers(1, 6)))
    eps = 0.05
    w = two_copy_witness(rho, eps)
    D = rho - eta
    expected = float(np.trace(D @ D).real) - eps
    assert evaluate(w, eta) == pytest.approx(expected, abs=1e-12)
    assert evaluate(w, eta) == pytest.approx(dense_power_trace(w.W.data, eta, 2), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_four_copy_identity(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(4, rng)
    eta = random_density(4, rng)
    eps = 0.01
    w = four_copy_witness(rho, eps)
    D = rho - eta
    expected = float(np.trace(np.linalg.matrix_power(D, 4)).real) - eps
    assert evaluate(w, eta) == pytest.approx(expected, abs=1e-12)
    assert evaluate(w, eta) == pytest.approx(dense_power_trace(w.W.data, eta, 4), abs=1e-12)


def test_witness_rejects_bad_input():
    with pytest.raises(ValueError):
        two_copy_witness(fock_state(1, 4), 0.0)
    with pytest.raises(ResourceLimitError):
        four_copy_witness(fock_state(1, 9), 0.1)
    with pytest.raises(InvalidDimensionError):
        two_copy_witness(fock_state(1, 65), 0.1)


def test_evaluate_checks_shape_and_logs(w2_fock1):
    rho, w = w2_fock1
    with pytest.raises(InvalidDimensionError):
        evaluate(w, np.eye(3) / 3)
    before = len(w.evaluations)
    v = evaluate(w, rho, label="self")
    assert w.evaluations[before:] == [("self", v)]
    assert v == pytest.approx(-0.3, abs=1e-12)


def test_digest_tracks_content():
    rho = fock_state(1, 5)
    a, b = two_copy_witness(rho, 0.1), two_copy_witness(rho, 0.1)
    assert a.digest() == b.digest()
    assert a.digest() != two_copy_witness(rho, 0.2).digest()
    js = a.to_json()
    assert js["sha256"] == a.digest() and js["m"] == 2


def test_epsilon_bound_for_fock_state():
    cfg = OptimizerConfig(starts=3, max_evals=400)
    eps, nearest = epsilon_bound(fock_state(1, 12), cfg)
    # tr[(rho - sigma)^2] >= 0 is minimised away from zero for a Fock state
    assert 0.1 < eps < 1.0
    assert isinstance(nearest, GaussianParams)
    eps4, _ = epsilon_bound(fock_state(1, 12), cfg, power=4)
    assert 0 < eps4 < eps


def test_epsilon_bound_indistinguishable():
    with pytest.raises(IndistinguishableError):
        epsilon_bound(synthesize(GaussianParams(nbar=0.2), 15), OptimizerConfig(starts=2, max_evals=300))
    with pytest.raises(ValueError):
        epsilon_bound(fock_state(1, 5), power=3)


def test_soundness_passes_for_honest_epsilon():
    cfg = OptimizerConfig(starts=3, max_evals=400)
    w = build_witness(fock_state(1, 10), 2, cfg)
    rep = check_witness_soundness(w, cfg, n_sobol=64, n_adversarial=4, adversarial_evals=200)
    assert rep.min_value >= -1e-8
    assert rep.n_sobol == 64 and rep.n_adversarial == 4
    assert rep.min_value <= rep.sobol_min


def test_soundness_catches_oversized_epsilon():
    w = two_copy_witness(fock_state(1, 10), 1.5)
    with pytest.raises(WitnessViolationError) as info:
        check_witness_soundness(w, n_sobol=32, n_adversarial=2, adversarial_evals=100)
    assert isinstance(info.value.params, GaussianParams)
    assert info.value.value < 0
    rep = check_witness_soundness(w, n_sobol=32, n_adversarial=0, raise_on_violation=False)
    assert rep.min_value < 0


def test_build_witness_records_heuristics():
    cfg = OptimizerConfig(starts=2, max_evals=300)
    w = build_witness(fock_state(2, 8), 2, cfg)
    assert isinstance(w, WitnessReport)
    assert any("not a certified bound" in f for f in w.heuristic_flags)
    label, value = w.evaluations[-1]
    assert label == "fock:2"
    assert value == pytest.approx(-w.epsilon, abs=1e-12)
    with pytest.raises(ValueError):
        build_witness(fock_state(2, 8), 3, cfg)


def test_witness_lower_bound_below_robustness():
    rho = fock_state(1, 10)
    w = build_witness(rho, 2, OptimizerConfig(starts=2, max_evals=300))
    lb = robustness_lower_from_witness(rho, w)
    assert 0 < lb <= 3.0
    assert lb == pytest.approx(math.sqrt(w.epsilon / w.op_norm))
