"""Acceptance suite: one test per release criterion, each printing a
PASS line with the measured quantities (run with ``pytest -s`` to see them).

The stopping-grid criterion runs a 20-replicate smoke profile by default;
set UNSEENBOUND_FULL_ACCEPTANCE=1 to run the full 200-replicate profile
(about 10-15 minutes on one core).
"""

import math
import os
import time

import numpy as np
import pytest

from unseenbound import (
    BoundedConfig,
    IncidenceSample,
    SeededStream,
    UnboundedConfig,
    accumulation_curve,
    bonferroni_bound,
    bounded_dd_bound,
    contaminate,
    derive_stream,
    draw_counts,
    draw_incidence_matrix,
    epsilon_star,
    heuristic_threshold,
    lambert_w0,
    m_b_statistic,
    make_prevalences,
    mmax_exact,
    oracle_r_star,
    least_favourable_threshold,
    stopping_experiment,
    u_r,
    unbounded_bound,
    worst_case_bound,
    worstcase_impossibility_demo,
)
from unseenbound.cli import main
from unseenbound.estimators import brute_force_curve
from unseenbound.stopping import StoppingPolicy

FULL = os.environ.get("UNSEENBOUND_FULL_ACCEPTANCE") == "1"


def _sample_from_counts(counts: np.ndarray, n: int, declared_M=None) -> IncidenceSample:
    nz = np.nonzero(counts)[0]
    return IncidenceSample(
        n=n, counts={f"s{j + 1}": int(counts[j]) for j in nz}, declared_M=declared_M
    )


def _three_reported(counts: np.ndarray, n: int, M: int, alpha=0.05, beta=1e-5):
    sample = _sample_from_counts(counts, n, declared_M=M)
    bonf = min(bonferroni_bound(n, M, alpha), 1.0)
    bdd = bounded_dd_bound(sample, M, BoundedConfig.default(alpha)).reported_value
    unb = unbounded_bound(sample, UnboundedConfig(alpha, beta)).reported_value
    return bonf, bdd, unb


def test_criterion_01_closed_form_spot_values():
    t0 = time.perf_counter()
    bonf = bonferroni_bound(2000, 10000, 0.05)
    assert bonf == pytest.approx(0.00610304, abs=1e-8)
    wc = worst_case_bound(2000, 10000, 0.05)
    assert wc == pytest.approx(0.0061035, abs=1e-6)
    thr = heuristic_threshold(1000, 1500, 0.05, simplified=True)
    assert thr == pytest.approx(15.4634, abs=0.005)
    sample = IncidenceSample(n=1000, counts={f"s{i}": 1000 for i in range(10)})
    est = unbounded_bound(sample, UnboundedConfig(alpha=0.05, beta=1e-5))
    assert est.raw_value == pytest.approx(0.009943, abs=1e-4)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\n[criterion 1] PASS: bonf={bonf:.8f} wc={wc:.8f} thr={thr:.4f} "
          f"unb={est.raw_value:.6f} in {elapsed * 1000:.1f} ms")


SCENARIOS_9 = (
    [("zipf", g) for g in (0.25, 0.5, 1.02)]
    + [("geometric", a) for a in (0.005, 0.1, 0.25)]
    + [("homogeneous", c) for c in (2, 20, 1000)]
)


def test_criterion_02_coverage_suite():
    t0 = time.perf_counter()
    n, M, reps = 2000, 5000, 100
    floor = 0.95 - 3 * math.sqrt(0.05 * 0.95 / reps)
    report = []
    for kind, param in SCENARIOS_9:
        model = make_prevalences(kind, param, M)
        hits = np.zeros(3)
        for rep in range(reps):
            stream = derive_stream(2024, f"acc2|{kind}|{param:.10g}", rep)
            counts = draw_counts(model, n, stream)
            mmax = mmax_exact(model, counts)
            vals = _three_reported(counts, n, M)
            hits += [v >= mmax for v in vals]
        cov = hits / reps
        assert (cov >= floor).all(), f"{kind}({param}): coverage {cov} below {floor:.4f}"
        report.append(f"{kind}({param})={cov.min():.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    print(f"\n[criterion 2] PASS: min coverage per scenario >= {floor:.4f} "
          f"[{'; '.join(report)}] in {elapsed:.1f} s")


def test_criterion_03_interval_length_ordering():
    n, M, reps = 2000, 10000, 100
    means = {}
    for gamma in (0.25, 1.02):
        model = make_prevalences("zipf", gamma, M)
        acc = np.zeros(3)
        for rep in range(reps):
            stream = derive_stream(2025, f"acc3|{gamma:.10g}", rep)
            acc += _three_reported(draw_counts(model, n, stream), n, M)
        means[gamma] = acc / reps
    bonf, bdd, unb = means[0.25]
    assert bdd < bonf < unb, f"light tail ordering violated: {means[0.25]}"
    bonf2, bdd2, unb2 = means[1.02]
    assert unb2 < bdd2, f"heavy tail ordering violated: {means[1.02]}"
    rel = abs(bdd2 - bonf2) / bonf2
    assert rel < 0.02, f"bounded/bonferroni split {rel:.4f} not negligible"
    print(f"\n[criterion 3] PASS: gamma=0.25 means (bonf,bdd,unb)=({bonf:.5f},{bdd:.5f},{unb:.5f}); "
          f"gamma=1.02 ({bonf2:.5f},{bdd2:.5f},{unb2:.5f}), reldiff={rel:.4f}")


def test_criterion_04_exact_threshold_identity():
    for n, k0 in [(100, 1), (1000, 10), (10000, 100)]:
        for alpha in (0.01, 0.05):
            t = least_favourable_threshold(n, k0, alpha)
            cover = (-math.expm1(n * math.log1p(-t))) ** k0
            assert cover == pytest.approx(1 - alpha, abs=1e-12), (n, k0, alpha)
    ratios = []
    for alpha in (0.01, 0.05):
        t = least_favourable_threshold(10000, 100, alpha)
        ratios.append(t * 10000 / math.log(100 / alpha))
        assert 0.95 <= ratios[-1] <= 1.05
    print(f"\n[criterion 4] PASS: coverage identity to 1e-12 on six (n,k0,alpha); "
          f"t*n/log(k0/alpha) at n=1e4: {ratios[0]:.4f}, {ratios[1]:.4f}")


def test_criterion_05_tightness_sandwich():
    t0 = time.perf_counter()
    S, alpha = 1.0, 0.05
    ratios = []
    for n in (10 ** 4, 10 ** 5, 10 ** 6):
        r = oracle_r_star(n, S, alpha)
        upper = u_r(n, r, S, alpha)
        lower = epsilon_star(n, S, alpha)
        assert lower <= upper, f"n={n}: lower {lower} above upper {upper}"
        ratios.append(upper / lower)
        assert 1.0 <= ratios[-1] <= 1.3
    assert ratios == sorted(ratios, reverse=True), f"ratios not decreasing: {ratios}"
    r6 = oracle_r_star(10 ** 6, S, alpha)
    pin = u_r(10 ** 6, r6, S, alpha) * 10 ** 6 / r6
    assert 0.99 <= pin <= 1.01
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"\n[criterion 5] PASS: ratios={['%.4f' % r for r in ratios]} decreasing; "
          f"u*n/r*={pin:.5f} at n=1e6; {elapsed:.1f} s")


def test_criterion_06_no_constant_bound_is_valid():
    gen = SeededStream(606).generator()
    reps = 10 ** 5
    checked = []
    for trial in range(20):
        n = int(gen.integers(5, 101))
        alpha = float(gen.uniform(0.02, 0.25))
        u_feas = -math.expm1(math.log(0.001) / n)  # keeps the vector small
        U = float(gen.uniform(0.001, u_feas))
        model, exceed = worstcase_impossibility_demo(n, alpha, U)
        assert exceed > alpha
        # Monte Carlo of the unseen pattern: species j unobserved w.p. (1-p_j)^n
        p_unseen = np.exp(n * np.log1p(-np.minimum(model.probs, 1 - 1e-16)))
        unseen = gen.random((reps, model.M)) < p_unseen
        mmax = np.where(unseen.any(axis=1), (model.probs * unseen).max(axis=1), 0.0)
        freq = float((mmax >= U).mean())
        se = math.sqrt(exceed * (1 - exceed) / reps)
        assert abs(freq - exceed) <= 3 * se, (n, alpha, U, exceed, freq)
        checked.append((n, alpha, U, exceed, freq))
    worst = max(abs(f - e) / math.sqrt(e * (1 - e) / reps) for *_, e, f in checked)
    print(f"\n[criterion 6] PASS: 20 adversarial configurations, exceedance > alpha, "
          f"max |MC - exact| = {worst:.2f} SE")


Q_GRID = [0.0, 1e-4, 5e-4, 1e-3, 2.5e-3, 5e-3]


def _table_grid(reps: int):
    eps, alpha, target, n_max, M = 0.005, 0.05, 0.99, 10_000, 1500
    scenarios = [
        ("zipf", make_prevalences("zipf", 1.05, M)),
        ("homog-0.006", make_prevalences("homogeneous", 1 / 0.006, M)),
        ("homog-0.05", make_prevalences("homogeneous", 1 / 0.05, M)),
        ("tgeom", make_prevalences("truncated-geometric", 0.05, M)),
    ]
    policies = [
        ("bounded", StoppingPolicy("mmax_bounded", n_max, epsilon=eps, alpha=alpha)),
        ("unbounded", StoppingPolicy("mmax_unbounded", n_max, epsilon=eps, alpha=alpha)),
        ("coverage", StoppingPolicy("coverage", n_max, coverage_target=target)),
    ]
    return stopping_experiment(
        scenarios, policies, Q_GRID, reps=reps, n_max=n_max,
        master_seed=51, relevance_eps=eps,
    )


def _check_table(rows, reps: int) -> str:
    up_slack = 0.05 + 3 * math.sqrt(0.05 * 0.95 / reps)
    down_floor = 0.95 - 3 * math.sqrt(0.95 * 0.05 / reps)
    cells = {(r.scenario, r.policy, r.q): r for r in rows}
    for (scen, pol, q), r in cells.items():
        if pol in ("bounded", "unbounded"):
            assert r.type1 <= up_slack, f"{scen}/{pol}/q={q}: type1 {r.type1} > {up_slack:.3f}"
    for q in Q_GRID:
        if q <= 1e-3:
            assert cells[("tgeom", "coverage", q)].type1 >= down_floor
        assert cells[("homog-0.006", "coverage", q)].type1 >= down_floor
        assert cells[("homog-0.05", "coverage", q)].type1 >= down_floor
        assert cells[("zipf", "coverage", q)].type1 <= up_slack
    worst_mmax = max(r.type1 for r in rows if r.policy != "coverage")
    return (f"mmax type1 <= {up_slack:.3f} (worst {worst_mmax:.3f}); coverage rule "
            f">= {down_floor:.3f} on light tails, <= {up_slack:.3f} on the heavy tail")


def test_criterion_07_stopping_grid_smoke():
    t0 = time.perf_counter()
    reps = 20
    rows = _table_grid(reps)
    summary = _check_table(rows, reps)
    elapsed = time.perf_counter() - t0
    print(f"\n[criterion 7·smoke] PASS (reps={reps}): {summary}; {elapsed:.0f} s")


@pytest.mark.skipif(not FULL, reason="set UNSEENBOUND_FULL_ACCEPTANCE=1 for the 200-rep profile")
def test_criterion_07_stopping_grid_full():
    t0 = time.perf_counter()
    reps = 200
    rows = _table_grid(reps)
    summary = _check_table(rows, reps)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1800.0
    print(f"\n[criterion 7·full] PASS (reps={reps}): {summary}; {elapsed:.0f} s")


def test_criterion_08_alphabet_overshoot_robustness():
    n, M_true = 1000, 5000
    model = make_prevalences("zipf", 1.02, M_true)
    counts = draw_counts(model, n, SeededStream(808))
    cfg = BoundedConfig.default(0.05)

    def at(m_add: int) -> float:
        sample = _sample_from_counts(counts, n)
        return bounded_dd_bound(sample, M_true + m_add, cfg).raw_value

    base = at(0)
    changes = {m: at(m) / base - 1 for m in (10, 10 ** 3, 10 ** 4, 5 * 10 ** 4, 10 ** 5, 10 ** 6)}
    assert abs(changes[10]) < 0.05
    assert abs(changes[10 ** 3]) < 0.05
    for m_add, ch in changes.items():
        if m_add < 10 * M_true:
            assert ch <= 0.20, f"m_add={m_add} degrades early: {ch:.3f}"
    assert changes[5 * 10 ** 4] > 0.20 or changes[10 ** 5] > 0.20
    pretty = {m: f"{c * 100:+.1f}%" for m, c in changes.items()}
    print(f"\n[criterion 8] PASS: relative change vs spurious categories {pretty}")


def test_criterion_09_property_suites(tmp_path, capsys):
    # mass conservation + singleton structure under contamination
    model = make_prevalences("zipf", 1.2, 40)
    mat = draw_incidence_matrix(model, 25, SeededStream(909, 1))
    out, n_err = contaminate(mat, 0.4, SeededStream(909, 2))
    assert out.sum() == mat.sum()
    assert (out[:, mat.shape[1]:].sum(axis=0) == 1).all()

    # effective-alphabet statistic shrinks when any count grows
    s1 = IncidenceSample(n=10, counts={"a": 2, "b": 5})
    s2 = IncidenceSample(n=10, counts={"a": 3, "b": 5})
    assert m_b_statistic(s2, 6, 2.3) <= m_b_statistic(s1, 6, 2.3)

    # accumulation curve: monotone, exact at small n against enumeration
    gen = np.random.default_rng(3)
    small = (gen.random((5, 6)) < 0.5).astype(int)
    curve = accumulation_curve(small)
    np.testing.assert_allclose(curve, brute_force_curve(small), atol=1e-12)
    assert (np.diff(curve) >= -1e-12).all()

    # Lambert W residual across thirteen decades
    for k in range(-6, 7):
        x = 10.0 ** k
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, x)

    # every CLI command is byte-deterministic under a fixed seed
    data = tmp_path / "in.csv"
    data.write_text("a,b\n1,0\n0,1\n1,1\n")
    pairs = []
    for tag in ("x", "y"):
        si = tmp_path / f"si_{tag}.csv"
        main(["simulate-intervals", "--scenario", "zipf", "--param", "1.0", "--n", "200",
              "--M-grid", "30", "--reps", "2", "--seed", "3", "--out", str(si)])
        cr = tmp_path / f"cr_{tag}.csv"
        main(["compare-regimes", "--n", "300", "--M", "150", "--reps", "1", "--seed", "3",
              "--out", str(cr)])
        ss = tmp_path / f"ss_{tag}.csv"
        main(["simulate-stopping", "--reps", "1", "--n-max", "200", "--scenarios",
              "homog-0.05", "--policies", "coverage", "--q-grid", "0", "--seed", "3",
              "--out", str(ss)])
        cu = tmp_path / f"cu_{tag}.csv"
        main(["diagnose", "--input", str(data), "--format", "dense", "--perms", "4",
              "--seed", "3", "--curve-out", str(cu)])
        pairs.append((si.read_bytes(), cr.read_bytes(), ss.read_bytes(), cu.read_bytes()))
    capsys.readouterr()  # swallow the diagnose JSON emitted on stdout
    assert pairs[0] == pairs[1]
    print("\n[criterion 9] PASS: contamination invariants, statistic monotonicity, "
          "exact small-n curve, Lambert residual <= 1e-12, CLI byte-determinism")
