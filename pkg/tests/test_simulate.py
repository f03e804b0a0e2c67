from __future__ import annotations

import dataclasses

import pytest

from sippuff.arm import TaskSpec, Waypoint, get_task
from sippuff.config import default_config
from sippuff.harness.bench import bench_report
from sippuff.harness.virtual_user import (
    SimulationTimeoutError,
    VirtualUserModel,
    simulate_session,
)


MINI_TASK = TaskSpec(
    id="mini",
    description="one short hop and a grab",
    waypoints=(
        Waypoint(x=0.15, y=0.0, z=0.6, grip="none", tol_m=0.05),
        Waypoint(x=0.15, y=0.0, z=0.6, grip="close", tol_m=0.05),
    ),
)


def test_same_seed_reproduces_metrics_exactly(config):
    user = VirtualUserModel(rng_seed=7)
    first = simulate_session(MINI_TASK, "asp", user, config)
    second = simulate_session(MINI_TASK, "asp", user, config)
    assert first == second


def test_different_seeds_differ(config):
    runs = {
        simulate_session(MINI_TASK, "bsp", VirtualUserModel(rng_seed=seed), config).completion_ms
        for seed in range(6)
    }
    assert len(runs) > 1


def test_asp_completes_all_shipped_tasks(config):
    for task_id in ("task1_jar", "task2_spoon", "task3_bottle"):
        metrics = simulate_session(
            get_task(task_id), "asp", VirtualUserModel(rng_seed=0), config
        )
        assert metrics.completion_ms > 0
        assert metrics.mode_selection_count >= 4
        assert metrics.moving_ms + metrics.wasted_ms == metrics.completion_ms


def test_bsp_completes_task_and_wastes_more_time(config):
    asp = simulate_session(get_task("task1_jar"), "asp", VirtualUserModel(rng_seed=3), config)
    bsp = simulate_session(get_task("task1_jar"), "bsp", VirtualUserModel(rng_seed=3), config)
    assert bsp.wasted_ms > asp.wasted_ms
    assert bsp.completion_ms > asp.completion_ms


def test_session_guard_raises_on_impossible_budget(config):
    with pytest.raises(SimulationTimeoutError):
        simulate_session(
            get_task("task1_jar"),
            "bsp",
            VirtualUserModel(rng_seed=0),
            config,
            time_limit_ms=5_000,
        )


def test_user_model_must_straddle_long_threshold(config):
    user = VirtualUserModel(short_peak_ms=450)  # >= long_threshold_ms
    with pytest.raises(ValueError):
        simulate_session(MINI_TASK, "asp", user, config)


def test_bench_report_shapes_and_pairing(config):
    report = bench_report([MINI_TASK], VirtualUserModel(), config, seeds=4)
    assert report.seeds == [0, 1, 2, 3]
    [comparison] = report.comparisons
    assert set(comparison.by_interface) == {"asp", "bsp"}
    assert comparison.completion_p_less is not None
    records = report.to_records()
    session_records = [r for r in records if r["record"] == "session"]
    assert len(session_records) == 8  # 1 task x 2 interfaces x 4 seeds
    assert "completion ms" in report.to_text()


def test_bench_identical_interfaces_report_no_difference(config):
    report = bench_report(
        [MINI_TASK], VirtualUserModel(), config, seeds=3, interfaces=("asp", "asp")
    )
    [comparison] = report.comparisons
    assert comparison.completion_p_less == 1.0
    assert comparison.moving_p_two_sided == 1.0


def test_bench_needs_two_seeds(config):
    with pytest.raises(ValueError):
        bench_report([MINI_TASK], VirtualUserModel(), config, seeds=1)


def test_longer_scroll_period_never_speeds_bsp_up(config):
    seeds = list(range(5))
    means = []
    for period in (1500, 2500):
        cfg = dataclasses.replace(config, bsp_scroll_period_ms=period)
        totals = [
            simulate_session(MINI_TASK, "bsp", VirtualUserModel(rng_seed=s), cfg).completion_ms
            for s in seeds
        ]
        means.append(sum(totals) / len(totals))
    assert means[1] >= means[0]
