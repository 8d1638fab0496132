"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL summary that the terminal summary
prints after the run. Expensive objects (witnesses, optimizer runs) are
cached at module level and shared between criteria.
"""
import functools
import math
import time

import numpy as np
import pytest

from cvrl.discrimination import advantage_ratio, gaussian_cap, p_succ_binary, task_from_witness
from cvrl.examples import (
    MixtureSpec,
    figure_data,
    fock_robustness,
    homodyne_bound,
    homodyne_inner_numeric,
    mixture_state,
    relent_bound,
)
from cvrl.fock import fock_state, thermal_state
from cvrl.optimize import OptimizerConfig
from cvrl.robustness import (
    dmax,
    lower_bound_homodyne,
    pure_robustness_fixed,
    rel_entropy_nongaussianity,
    robustness_gaussian,
)
from cvrl.gaussian import quadrature_distribution
from cvrl.witness import (
    build_witness,
    check_witness_soundness,
    evaluate,
    four_copy_witness,
    robustness_lower_from_witness,
    two_copy_witness,
)

from conftest import ACCEPTANCE_LINES, random_density

THREE_STATES = ("fock:1", "mixture:q=0,d=1", "mixture:q=0,d=2.5")
SHIPPED = ("fock:1", "fock:2", "fock:3", "mixture:q=0,d=1", "mixture:q=0,d=2", "mixture:q=0,d=2.5")


def record(k, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def make_state(label, cutoff):
    kind, _, body = label.partition(":")
    if kind == "fock":
        return fock_state(int(body), cutoff)
    kv = dict(part.split("=") for part in body.split(","))
    return mixture_state(MixtureSpec(float(kv["q"]), float(kv["d"])), cutoff)


def spec_of(label):
    kv = dict(part.split("=") for part in label.partition(":")[2].split(","))
    return MixtureSpec(float(kv["q"]), float(kv["d"]))


@functools.lru_cache(maxsize=None)
def witness(label, cutoff=20):
    rho = make_state(label, cutoff)
    t0 = time.perf_counter()
    w = build_witness(rho, 2, OptimizerConfig())
    task = task_from_witness(w)
    ratio = advantage_ratio(task, rho)
    return rho, w, task, ratio, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def robustness(label, cutoff, starts=12):
    t0 = time.perf_counter()
    res = robustness_gaussian(make_state(label, cutoff), OptimizerConfig(starts=starts))
    return res.value, time.perf_counter() - t0


def relent_value(label, cutoff):
    return math.expm1(max(rel_entropy_nongaussianity(make_state(label, cutoff)), 0.0))


def homodyne_value(label, cutoff):
    rho = make_state(label, cutoff)
    return lower_bound_homodyne(lambda x: quadrature_distribution(rho, np.atleast_1d(x)))


def lower_bounds(label):
    """Relative-entropy and homodyne bounds as the package reports them."""
    if label.startswith("mixture"):
        s = spec_of(label)
        return relent_bound(s), homodyne_bound(s.d)[0]
    return relent_value(label, 60), homodyne_value(label, 60)


# --- criteria ---------------------------------------------------------------------------


def test_01_fock_closed_form():
    ok, parts = True, []
    for n in (1, 2, 3):
        val, secs = robustness(f"fock:{n}", 60)
        rel = abs(val - fock_robustness(n)) / fock_robustness(n)
        ok &= rel < 0.01 and secs < 60
        parts.append(f"n={n} R={val:.6f} rel_err={rel:.1e} {secs:.1f}s")
    assert record(1, "Fock closed form", ok, "; ".join(parts))


def test_02_pure_state_shortcut():
    worst = 0.0
    for n in range(1, 7):
        N = 8 * n + 40
        psi = np.zeros(N)
        psi[n] = 1.0
        worst = max(worst, abs(pure_robustness_fixed(psi, thermal_state(n, N)) - fock_robustness(n)))
    assert record(2, "pure-state shortcut", worst <= 1e-9, f"n=1..6 max |err| = {worst:.1e}")


def test_03_witness_identity():
    rng = np.random.default_rng(2024)
    rho = random_density(6, rng)
    eps = 0.05
    w2 = two_copy_witness(rho, eps)
    err2 = 0.0
    for _ in range(100):
        eta = random_density(6, rng, rank=int(rng.integers(1, 7)))
        D = rho - eta
        err2 = max(err2, abs(evaluate(w2, eta) - (np.trace(D @ D).real - eps)))
    w4 = four_copy_witness(rho, eps)
    err4 = 0.0
    for _ in range(25):
        eta = random_density(6, rng, rank=int(rng.integers(1, 7)))
        D = rho - eta
        err4 = max(err4, abs(evaluate(w4, eta) - (np.trace(np.linalg.matrix_power(D, 4)).real - eps)))
    ok = err2 <= 1e-9 and err4 <= 1e-9
    assert record(3, "witness identity", ok, f"W2 max err {err2:.1e} (100 eta); W4 max err {err4:.1e} (25 eta)")


def test_04_witness_soundness():
    ok, parts = True, []
    for label in THREE_STATES:
        _, w, _, _, _ = witness(label)
        rep = check_witness_soundness(w, OptimizerConfig(), n_sobol=500, n_adversarial=50,
                                      raise_on_violation=False)
        ok &= rep.min_value >= -1e-8 and rep.n_sobol == 500 and rep.n_adversarial == 50
        parts.append(f"{label} min={rep.min_value:.3e}")
    assert record(4, "witness soundness", ok, "; ".join(parts))


def test_05_certificate():
    ok, parts = True, []
    for label in THREE_STATES:
        rho, _, task, ratio, secs = witness(label)
        assert p_succ_binary(task, rho) == pytest.approx(ratio * gaussian_cap(task))
        ok &= ratio > 1 + 1e-9 and secs < 120
        parts.append(f"{label} ratio={ratio:.6f} {secs:.1f}s")
    assert record(5, "advantage certificate", ok, "; ".join(parts))


def test_06_ratio_below_robustness_cap():
    ok, parts = True, []
    for label in THREE_STATES:
        _, _, _, ratio, _ = witness(label)
        R = robustness(label, 60 if label.startswith("fock") else 40)[0]
        ok &= ratio <= (1 + R) ** 2 + 1e-6
        parts.append(f"{label} {ratio:.4f} <= {(1 + R) ** 2:.4f}")
    assert record(6, "ratio <= (1+R)^2", ok, "; ".join(parts))


def test_07_additivity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 13))
        rho, sigma = random_density(n, rng), random_density(n, rng)
        worst = max(worst, abs(dmax(np.kron(rho, rho), np.kron(sigma, sigma)) - 2 * dmax(rho, sigma)))
    assert record(7, "D_max additivity", worst <= 1e-8, f"20 pairs, dims 2-12, max err {worst:.1e}")


def _bisection(rho, sigma):
    def feasible(g):
        return np.linalg.eigvalsh(g * sigma - rho)[0] >= -1e-13

    lo, hi = 0.0, 1.0
    while not feasible(hi):
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if feasible(mid) else (mid, hi)
        if hi - lo < 1e-14 * hi:
            break
    return math.log(hi)


def test_08_bisection_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        rho, sigma = random_density(n, rng), random_density(n, rng)
        worst = max(worst, abs(dmax(rho, sigma) - _bisection(rho, sigma)))
    assert record(8, "D_max bisection oracle", worst <= 1e-6, f"50 pairs, dims 2-6, max err {worst:.1e}")


def test_09_mixture_bounds():
    ds = [round(0.1 * k, 10) for k in range(51)]
    rows = figure_data("fig4", ds, q=0.0)
    order_ok = all(r["homodyne_bound"] >= r["relent_bound"] for r in rows if r["d"] >= 0.6 - 1e-12)
    inner_err = 0.0
    for r in rows:
        if r["d"] > 0:
            _, a_num = homodyne_inner_numeric(r["x_opt"], r["d"])
            inner_err = max(inner_err, abs(a_num - max(2 * r["x_opt"] ** 2, 1.0)) / a_num)
    tail = [r for r in rows if 4.0 - 1e-9 <= r["d"] <= 5.0 + 1e-9]
    slope = np.polyfit([r["d"] for r in tail], [r["homodyne_bound"] for r in tail], 1)[0]
    target = math.sqrt(math.e / 2)
    ok = order_ok and inner_err <= 1e-6 and abs(slope / target - 1) <= 0.03
    detail = (f"ordering {'holds' if order_ok else 'violated'} for d>=0.6; inner a rel err {inner_err:.1e}; "
              f"slope on [4,5] {slope:.4f} vs {target:.4f} ({100 * abs(slope / target - 1):.2f}%)")
    assert record(9, "mixture bounds", ok, detail)


def test_10_fock_slope():
    ns = np.arange(5, 31)
    slope = np.polyfit(ns, [fock_robustness(int(n)) for n in ns], 1)[0]
    rel = abs(slope / math.e - 1)
    assert record(10, "Fock slope", rel <= 0.02, f"slope {slope:.5f} vs e = {math.e:.5f} ({100 * rel:.2f}%)")


def test_11_sandwich():
    ok, parts = True, []
    for label in SHIPPED:
        rho, w, _, _, _ = witness(label)
        obi = robustness_lower_from_witness(rho, w)
        lower = max(lower_bounds(label))
        R = robustness(label, 60 if label.startswith("fock") else 40)[0]
        good = obi <= lower + 1e-9 and lower <= R + 1e-6
        ok &= good
        parts.append(f"{label} {obi:.4f} <= {lower:.4f} <= {R:.4f}")
    assert record(11, "bound sandwich", ok, "; ".join(parts))


def test_12_truncation_stability():
    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    worst, where = 0.0, ""
    for label in THREE_STATES:
        pairs = {
            "robustness": (robustness(label, 40, 4)[0], robustness(label, 80, 4)[0]),
            "witness bound": tuple(
                robustness_lower_from_witness(*witness(label, N)[:2]) for N in (20, 40)
            ),
            "relent": (relent_value(label, 40), relent_value(label, 80)),
            "homodyne": (homodyne_value(label, 40), homodyne_value(label, 80)),
        }
        for name, (a, b) in pairs.items():
            r = rel(a, b)
            if r >= worst:
                worst, where = r, f"{label} {name}"
    assert record(12, "truncation stability", worst < 1e-3, f"max relative change {worst:.1e} ({where})")
