import math

import numpy as np
import pytest

from pulseplan import (
    ScenarioSpec,
    build_availability_table,
    default_prf_set,
    default_radar_config,
    fit_complexity,
    gen_scenario,
    run_scaling,
)
from pulseplan.io import scenario_to_text
from pulseplan.radar import availability_arrays


class TestGeneration:
    def test_same_seed_same_bytes(self):
        spec = ScenarioSpec(n_tasks=30, seed=9, cluster_count=2)
        a = scenario_to_text(*gen_scenario(spec))
        b = scenario_to_text(*gen_scenario(spec))
        assert a == b

    def test_different_seed_differs(self):
        a = scenario_to_text(*gen_scenario(ScenarioSpec(n_tasks=30, seed=1)))
        b = scenario_to_text(*gen_scenario(ScenarioSpec(n_tasks=30, seed=2)))
        assert a != b

    def test_zero_tasks_is_valid(self):
        cfg, prfs, tasks = gen_scenario(ScenarioSpec(n_tasks=0, seed=0))
        assert tasks == ()
        assert scenario_to_text(cfg, prfs, tasks).startswith("pulseplan-scenario v1")

    def test_every_emitted_task_is_schedulable(self):
        cfg, prfs, tasks = gen_scenario(ScenarioSpec(n_tasks=120, seed=3))
        table = build_availability_table(tasks, prfs, cfg)
        assert table.unschedulable == ()
        assert len(tasks) == 120

    def test_keep_unschedulable_keeps_raw_draws(self):
        spec = ScenarioSpec(n_tasks=200, seed=4, keep_unschedulable=True)
        cfg, prfs, tasks = gen_scenario(spec)
        table = build_availability_table(tasks, prfs, cfg)
        # raw draws include a few untrackable tasks at these defaults
        assert len(tasks) == 200

    def test_schedulable_fraction_of_raw_draws(self):
        # measured over a thousand raw draws against the availability mask;
        # the default ladder keeps well over nine in ten draws trackable
        cfg = default_radar_config()
        prfs = default_prf_set()
        rng = np.random.default_rng(5)
        n = 1000
        r = rng.uniform(20e3, 120e3, n)
        sr = rng.uniform(10, 50, n)
        vt = rng.uniform(-300, 300, n)
        sf = rng.uniform(10, 60, n)
        av = availability_arrays(r, sr, vt, sf, prfs, cfg)[0]
        frac = av.any(axis=1).mean()
        assert frac >= 0.9, f"schedulable fraction {frac:.3f}"

    def test_scan_points_stay_in_unit_disk(self):
        for spec in (ScenarioSpec(n_tasks=80, seed=6),
                     ScenarioSpec(n_tasks=80, seed=7, cluster_count=3,
                                  cluster_radius=0.4)):
            _, _, tasks = gen_scenario(spec)
            for t in tasks:
                assert t.u ** 2 + t.v ** 2 <= 1.0


class TestFitter:
    def test_nlogn_slope(self):
        sizes = [1000 * 2 ** i for i in range(7)]
        times = [2.5e-6 * n * math.log2(n) for n in sizes]
        exp, r2 = fit_complexity(sizes, times)
        assert 1.0 <= exp <= 1.15
        assert r2 > 0.999

    def test_quadratic_log_slope(self):
        sizes = [250, 500, 1000, 2000, 4000]
        times = [1e-9 * n * n * math.log2(n) for n in sizes]
        exp, _ = fit_complexity(sizes, times)
        assert 2.0 <= exp <= 2.2

    def test_pure_quadratic_slope(self):
        sizes = [250, 500, 1000, 2000, 4000]
        times = [1e-9 * n * n for n in sizes]
        exp, _ = fit_complexity(sizes, times)
        assert 1.95 <= exp <= 2.05

    def test_constant_time_slope_near_zero(self):
        sizes = [100, 200, 400, 800]
        times = [0.37] * 4
        exp, _ = fit_complexity(sizes, times)
        assert abs(exp) < 1e-9

    def test_rejects_degenerate_input(self):
        with pytest.raises(ValueError):
            fit_complexity([10], [1.0])
        with pytest.raises(ValueError):
            fit_complexity([10, 20], [0.0, 1.0])


class TestScalingHarness:
    def test_refuses_fewer_than_four_sizes(self):
        with pytest.raises(ValueError):
            run_scaling("edbf", "rangetree", [100, 200, 400], reps=1)

    def test_refuses_unsorted_sizes(self):
        with pytest.raises(ValueError):
            run_scaling("edbf", "rangetree", [100, 400, 200, 800], reps=1)

    def test_small_edbf_run_monotone_and_instrumented(self):
        report = run_scaling("edbf", "rangetree", [100, 200, 400, 800], reps=2)
        sizes = [row.size for row in report.rows]
        assert sizes == [100, 200, 400, 800]
        ops = [row.backend_ops for row in report.rows]
        assert all(b > a for a, b in zip(ops, ops[1:]))
        n_intlv = default_radar_config().n_intlv
        assert all(row.bi_max_iterations <= 2 * n_intlv for row in report.rows)
        assert report.counter_exponent == pytest.approx(1.0, abs=0.25)
        text = report.to_text()
        assert text.startswith("pulseplan-scaling v1")
        assert "counter_exponent=" in text

    def test_small_sdbf_run(self):
        report = run_scaling("sdbf", "rangetree", [50, 100, 200, 400], reps=1)
        assert [row.size for row in report.rows] == [50, 100, 200, 400]
        assert all(row.looks > 0 for row in report.rows)
