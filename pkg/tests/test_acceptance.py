"""End-to-end checks of the package's headline numeric claims.

Each test prints one PASS/FAIL line (run pytest with -s to see them all).
The Monte Carlo fixtures are module-scoped because the large scans take
about a minute; everything downstream reads from them.
"""

import math

import numpy as np
import pytest

from kmarkets import (
    Constant,
    KMarkets,
    PerturbedConditional,
    PerturbedUniform,
    PowerSimulated,
    UniformJoint,
    concavity_margin,
    crossing_scan,
    deficiency_curve,
    expected_revenue,
    fit_rate,
    gilbert_varshamov,
    hellinger_sq,
    kl_divergence,
    kmarkets_strategy,
    lemma_c3_check,
    marginal_perturbation_report,
    optimal_3pd_policy,
    optimal_uniform_price,
    revenue_deficiency,
    uniform_strategy,
    welfare,
)
from kmarkets.families import C_STAR, Packing

BASE_SEED = 1729
CROSSING_SIZES = [2 ** e for e in range(6, 16)]
RATE_SIZES = [2 ** e for e in range(7, 15)]
WELFARE_SIZES = [256, 1024, 4096]


def _report(num, ok, detail):
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def crossing():
    return crossing_scan(
        PowerSimulated(), CROSSING_SIZES, k=4, reps=2000, base_seed=BASE_SEED
    )


@pytest.fixture(scope="module")
def theory_curve():
    return deficiency_curve(
        PowerSimulated(), kmarkets_strategy(schedule="theory"),
        RATE_SIZES, 2000, BASE_SEED,
    )


@pytest.fixture(scope="module")
def welfare_curves():
    uni = deficiency_curve(
        PowerSimulated(), uniform_strategy(), WELFARE_SIZES, 1000, BASE_SEED,
        kind="welfare",
    )
    km = deficiency_curve(
        PowerSimulated(), kmarkets_strategy(k=4), WELFARE_SIZES, 1000, BASE_SEED,
        kind="welfare",
    )
    return uni, km


def test_01_uniform_family_baseline_exact():
    p, r = optimal_uniform_price(UniformJoint())
    ok = abs(p - 0.5) <= 1e-9 and abs(r - 0.25) <= 1e-9
    _report(1, ok, f"p*={p!r} R*={r!r}")


def test_02_power_policy_matches_closed_form():
    pol = optimal_3pd_policy(PowerSimulated())
    xs = np.linspace(0.0, 1.0, 101)
    closed = (xs + 2.0) ** (-1.0 / (xs + 1.0))
    err = float(np.abs(np.interp(xs, pol.x_grid, pol.prices) - closed).max())

    # confirm the closed form itself against a million-point revenue scan
    ps = np.linspace(0.0, 1.0, 1_000_001)
    brute_err = 0.0
    for x, want in zip(xs, closed):
        best = ps[np.argmax(ps * (1.0 - ps ** (x + 1.0)))]
        brute_err = max(brute_err, abs(best - want))

    ok = err <= 1e-6 and brute_err <= 2e-6
    _report(2, ok, f"policy_err={err:.3g} closed_form_vs_scan={brute_err:.3g}")


def test_03_power_revenue_levels():
    r3 = expected_revenue(PowerSimulated(), optimal_3pd_policy(PowerSimulated()))
    ru = optimal_uniform_price(PowerSimulated())[1]
    ok = abs(r3 - 0.322992) <= 1e-3 and abs(ru - 0.322343) <= 1e-3
    _report(3, ok, f"R_3pd={r3:.9f} R_uni={ru:.9f}")


def test_04_uniform_deficiency_rate(crossing):
    pts = [p for p in crossing.uniform_curve if 2 ** 7 <= p.n <= 2 ** 14]
    fit = fit_rate(pts)
    ok = -0.80 <= fit.slope <= -0.55
    _report(4, ok, f"slope={fit.slope:.4f} r2={fit.r_squared:.4f}")


def test_05_scheduled_kmarkets_rate(theory_curve):
    fit = fit_rate(theory_curve)
    ok = -0.65 <= fit.slope <= -0.38
    _report(5, ok, f"slope={fit.slope:.4f} r2={fit.r_squared:.4f}")


def test_06_crossing_exists_and_small_n_gap(crossing):
    u0, k0 = crossing.uniform_curve[0], crossing.kmarkets_curve[0]
    diff = u0.mean_revenue - k0.mean_revenue
    se = math.hypot(u0.std_error, k0.std_error)
    ok = crossing.n_crossing is not None and diff >= 3.0 * se
    _report(
        6, ok,
        f"crossing_n={crossing.n_crossing} small_n_gap={diff:.5f} ({diff / se:.1f} se)",
    )


def test_07_hellinger_bound_holds():
    worst = 0.0
    ok = True
    for a in (0.5, 1.0, 1.5):
        for d in (0.01, 0.05, 0.1):
            rep = marginal_perturbation_report(a, d)
            ratio = rep.hellinger_sq / rep.analytic_bound
            worst = max(worst, ratio)
            ok = ok and rep.hellinger_sq <= rep.analytic_bound * (1.0 + 1e-3)
    _report(7, ok, f"worst hellinger/bound ratio={worst:.4f}")


def test_08_conditional_hellinger_scaling():
    deltas = np.array([0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.2])
    h = np.array([
        hellinger_sq(PerturbedConditional(a=1.0, delta=float(d), x0=0.5), UniformJoint())
        for d in deltas
    ])
    slope = float(np.polyfit(np.log(deltas), np.log(h), 1)[0])
    ok = abs(slope - 4.0) <= 0.1
    _report(8, ok, f"slope={slope:.4f}")


def test_09_packing_kl_scaling():
    ms = [8, 16, 32, 64]
    kls = []
    for m in ms:
        base = Packing(m=m, a=1.0, alpha=tuple([0] * m))
        bump = Packing(m=m, a=1.0, alpha=tuple(1 if i % 8 == 0 else 0 for i in range(m)))
        kls.append(kl_divergence(bump, base))
    slope = float(np.polyfit(np.log(ms), np.log(kls), 1)[0])
    ok = abs(slope + 3.0) <= 0.15
    _report(9, ok, f"slope={slope:.4f}")


def test_10_codebook_sizes_and_distance():
    ok = True
    counts = {}
    for m in (8, 16, 24):
        cb = gilbert_varshamov(m)
        d = -(-m // 8)
        counts[m] = cb.words.shape[0]
        ok = ok and cb.words.shape[0] >= 2 ** (m // 8)
        rng = np.random.default_rng(m)
        probes = rng.choice(cb.words.shape[0], size=32, replace=False)
        for i in probes:
            dist = (cb.words ^ cb.words[i]).sum(axis=1)
            dist[i] = m + 1
            ok = ok and int(dist.min()) >= d
    _report(10, ok, f"words={counts}")


def test_11_price_localization_lemma():
    ok = True
    worst_margin = -np.inf
    for b in (-1.5, -1.0, -0.5, 0.5, 1.0, 1.5):
        for d in (0.005, 0.01, 0.02):
            res = lemma_c3_check(b, d)
            margin = concavity_margin(b, d)
            worst_margin = max(worst_margin, margin)
            ok = ok and res.inside and margin <= -C_STAR + 1e-3
    _report(11, ok, f"all inside, worst concavity margin={worst_margin:.3f}")


def test_12_welfare_losses_shrink(welfare_curves):
    ok = True
    drops = []
    for curve in welfare_curves:
        for a, b in zip(curve, curve[1:]):
            gap = a.mean_deficiency - b.mean_deficiency
            se = math.hypot(a.std_error, b.std_error)
            drops.append(gap / se)
            ok = ok and gap >= 3.0 * se

    rng = np.random.default_rng(2718)
    specs = (UniformJoint(), PowerSimulated(), PerturbedUniform(a=1.0, delta=0.1))
    for i in range(50):
        spec = specs[i % 3]
        k = int(rng.integers(1, 7))
        pf = KMarkets(k=k, prices=tuple(rng.random(k))) if k > 1 else Constant(float(rng.random()))
        ok = ok and welfare(spec, pf) >= expected_revenue(spec, pf) - 1e-9
    _report(12, ok, f"min drop={min(drops):.1f} se; welfare >= revenue on 50 policies")


def test_13_runs_are_reproducible():
    a = revenue_deficiency(PowerSimulated(), kmarkets_strategy(k=4), 512, 60, BASE_SEED)
    b = revenue_deficiency(PowerSimulated(), kmarkets_strategy(k=4), 512, 60, BASE_SEED)
    serial = deficiency_curve(
        PowerSimulated(), uniform_strategy(), [128, 256, 512], 60, BASE_SEED
    )
    parallel = deficiency_curve(
        PowerSimulated(), uniform_strategy(), [128, 256, 512], 60, BASE_SEED, workers=2
    )
    ok = a == b and serial == parallel
    _report(13, ok, "serial reruns and 2-worker runs are bit-identical")
