import numpy as np
import pytest

from fdpv.core import KMismatch, PiecewiseSpec, Segmentation, Target
from fdpv.simgen import (
    RNG_ALGORITHM,
    Scenario,
    builtin_scenario,
    change_point_se,
    draw_truth,
    gen_piecewise_mean,
    gen_piecewise_regression,
    load_scenario,
    make_rng,
    mise,
    monte_carlo,
)


def _toy(sigma=1.0):
    return PiecewiseSpec(n=5000, change_points=[800, 1700, 2500, 3300, 4200],
                         params=[0.0, 1.0, 0.3, 1.4, 0.6, -0.2], sigma=sigma)


def test_noiseless_paths():
    spec = _toy(0.0)
    np.testing.assert_array_equal(gen_piecewise_mean(spec, 1).values, spec.piecewise())
    reg = PiecewiseSpec(n=100, change_points=[50], params=[1.0, -2.0], sigma=0.0,
                        target="slope", delta=0.5, intercept=3.0)
    y = gen_piecewise_regression(reg, 0).values
    x = 0.5 * np.arange(1, 101)
    np.testing.assert_allclose(y, np.where(np.arange(1, 101) <= 50, 1.0, -2.0) * x + 3.0)
    cont = gen_piecewise_regression(reg, 0, continuous=True).values
    # lines meet at the change point: the jump there equals one slope step
    assert cont[50] - cont[49] == pytest.approx(-2.0 * 0.5)
    icpt = PiecewiseSpec(n=60, change_points=[30], params=[0.0, 4.0], sigma=0.0,
                         target="intercept", slope=0.25)
    np.testing.assert_allclose(gen_piecewise_regression(icpt, 0).values,
                               0.25 * np.arange(1, 61) + np.where(np.arange(1, 61) <= 30, 0.0, 4.0))


def test_seed_determinism():
    a = gen_piecewise_mean(_toy(), 42).values
    b = gen_piecewise_mean(_toy(), 42).values
    c = gen_piecewise_mean(_toy(), 43).values
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RNG_ALGORITHM.endswith("Philox")
    assert make_rng(7).standard_normal() == make_rng(7).standard_normal()


def test_segment_means_clt():
    spec = PiecewiseSpec(n=300, change_points=[100, 220], params=[0.0, 2.0, -1.0], sigma=1.5)
    lengths = np.diff(spec.boundaries)
    for seed in range(1000):
        x = gen_piecewise_mean(spec, seed).values
        for (lo, hi), mu, L in zip(zip(spec.boundaries[:-1], spec.boundaries[1:]), spec.params, lengths):
            assert abs(x[lo:hi].mean() - mu) <= 4 * 1.5 / np.sqrt(L)


def test_regression_slopes_clt():
    spec = PiecewiseSpec(n=1400, change_points=[350, 700, 1050], params=[1.0, 4.5, 0.5, 3.0],
                         sigma=30.0, target="slope", delta=1.0)
    x = np.arange(1, 1401, dtype=float)
    for seed in range(200):
        y = gen_piecewise_regression(spec, seed, continuous=True).values
        for (lo, hi), a in zip(zip(spec.boundaries[:-1], spec.boundaries[1:]), spec.params):
            xs = x[lo:hi]
            se = 30.0 / np.sqrt(((xs - xs.mean()) ** 2).sum())
            assert abs(np.polyfit(xs, y[lo:hi], 1)[0] - a) <= 4.5 * se


def test_variance_target_generator():
    spec = PiecewiseSpec(n=20000, change_points=[10000], params=[1.0, 4.0], target="variance")
    x = gen_piecewise_mean(spec, 3).values
    assert x[:10000].var() == pytest.approx(1.0, rel=0.05)
    assert x[10000:].var() == pytest.approx(4.0, rel=0.05)


def test_mise_and_se_examples():
    truth = PiecewiseSpec(n=5000, change_points=[2500], params=[0.0, 1.0])
    exact = Segmentation(5000, [2500], (0.0, 1.0))
    assert mise(truth, exact) == 0.0
    assert change_point_se(truth, exact) == 0.0
    for h in (1, 5, 37):
        off = Segmentation(5000, [2500 + h], (0.0, 1.0))
        assert mise(truth, off) == pytest.approx(h / 5000, rel=1e-15)
        assert change_point_se(truth, off) == pytest.approx((h / 5000) ** 2, rel=1e-15)
    assert change_point_se(truth, Segmentation(5000, [2505], (0.0, 1.0))) == pytest.approx(1e-6)
    with pytest.raises(KMismatch):
        change_point_se(truth, Segmentation(5000, [], (0.5,)))


def test_metrics_shift_invariant():
    rng = np.random.default_rng(0)
    truth = _toy()
    est = Segmentation(5000, [790, 1720, 2500, 3290, 4230], tuple(rng.normal(size=6)))
    shifted_truth = PiecewiseSpec(n=5000, change_points=truth.change_points, params=truth.params + 7.5)
    shifted_est = Segmentation(5000, est.change_points, tuple(np.add(est.segment_estimates, 7.5)))
    assert mise(shifted_truth, shifted_est) == pytest.approx(mise(truth, est), rel=1e-10)
    assert change_point_se(shifted_truth, shifted_est) == change_point_se(truth, est)


def test_draw_truth():
    t = draw_truth(5000, 5, (0.5, 1.25), 11)
    assert t.change_points.tolist() == [833, 1667, 2500, 3333, 4167]
    assert np.all((np.abs(t.jumps) >= 0.5) & (np.abs(t.jumps) <= 1.25))
    assert t.min_segment_length > 2 * 300


def test_noiseless_single_replication():
    sc = Scenario(name="clean", n=5000, n_changes=5, jump_range=(0.5, 1.25), sigma=0.0,
                  window=300, known_sigma=False, replications=1, seed=1)
    rep = monte_carlo("fdpv", sc)
    assert rep.correct_k_rate == 1.0
    assert rep.mean_mise == pytest.approx(0.0, abs=1e-25)
    assert rep.mean_se == 0.0
    assert rep.k_histogram == {5: 1}


def test_reproducible_across_workers():
    sc = builtin_scenario("toy_mean")
    a = monte_carlo("fdpv", sc, replications=12, base_seed=5, workers=1)
    b = monte_carlo("fdpv", sc, replications=12, base_seed=5, workers=3)
    strip = lambda rep: [{k: v for k, v in r.items() if k != "seconds"} for r in rep.rows]
    assert strip(a) == strip(b)
    assert (a.k_histogram, a.correct_k_rate, a.mean_se, a.mean_mise) == (
        b.k_histogram, b.correct_k_rate, b.mean_se, b.mean_mise)
    assert sum(a.k_histogram.values()) == 12


def test_order_independent_replications():
    sc = builtin_scenario("toy_mean")
    full = monte_carlo("plsc", sc, replications=4, base_seed=100)
    tail = monte_carlo("plsc", sc, replications=2, base_seed=102)
    assert [r["k_hat"] for r in full.rows[2:]] == [r["k_hat"] for r in tail.rows]
    assert [r["mise"] for r in full.rows[2:]] == [r["mise"] for r in tail.rows]


def test_scenario_files(tmp_path):
    for name in ("toy_mean", "slope_large", "slope_small"):
        sc = builtin_scenario(name)
        p = tmp_path / f"{name}.json"
        import json
        p.write_text(json.dumps(sc.to_dict()))
        assert load_scenario(p) == sc
    assert builtin_scenario("slope_large").target is Target.SLOPE


def test_report_csv(tmp_path):
    rep = monte_carlo("fdpv", builtin_scenario("toy_mean"), replications=3)
    p = tmp_path / "rows.csv"
    rep.write_rows_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "replication,seed,k_hat,correct,se,mise,seconds"
    assert len(lines) == 4
    d = rep.to_dict()
    assert d["rng"] == RNG_ALGORITHM and "rows" not in d
