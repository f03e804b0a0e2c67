"""Paired interface benchmark: the same seeded virtual user runs each task
under both interfaces, and completion/moving/wasted times are summarized
with exact paired signed-rank p-values.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from ..arm import TaskSpec
from ..config import EngineConfig
from ..session import ASP, BSP, SessionMetrics
from .stats import ALT_LESS, ALT_TWO_SIDED, AllDifferencesZeroError, wilcoxon_signed_rank
from .virtual_user import DEFAULT_TICK_MS, VirtualUserModel, simulate_session


@dataclass
class InterfaceSummary:
    task_id: str
    interface: str
    seeds: list[int]
    runs: list[SessionMetrics]

    def _values(self, key: str) -> list[int]:
        return [getattr(m, key) for m in self.runs]

    def aggregate(self, key: str) -> dict:
        values = self._values(key)
        return {
            "mean": statistics.fmean(values),
            "sd": statistics.stdev(values) if len(values) > 1 else 0.0,
            "min": min(values),
            "max": max(values),
        }


@dataclass
class TaskComparison:
    task_id: str
    by_interface: dict[str, InterfaceSummary]
    completion_p_less: float | None = None
    moving_p_two_sided: float | None = None


@dataclass
class BenchReport:
    seeds: list[int]
    interfaces: tuple[str, ...]
    comparisons: list[TaskComparison] = field(default_factory=list)

    def to_records(self) -> list[dict]:
        records: list[dict] = []
        for comparison in self.comparisons:
            for interface, summary in comparison.by_interface.items():
                for seed, metrics in zip(summary.seeds, summary.runs):
                    records.append(
                        {
                            "record": "session",
                            "task": comparison.task_id,
                            "interface": interface,
                            "seed": seed,
                            **metrics.as_dict(),
                        }
                    )
            records.append(
                {
                    "record": "comparison",
                    "task": comparison.task_id,
                    "completion_p_less": comparison.completion_p_less,
                    "moving_p_two_sided": comparison.moving_p_two_sided,
                }
            )
        return records

    def to_text(self) -> str:
        lines = []
        header = (
            f"{'task':<14}{'interface':<11}{'completion ms':>20}"
            f"{'moving ms':>18}{'wasted ms':>18}"
        )
        lines.append(header)
        lines.append("-" * len(header))
        for comparison in self.comparisons:
            for interface, summary in comparison.by_interface.items():
                com = summary.aggregate("completion_ms")
                mov = summary.aggregate("moving_ms")
                was = summary.aggregate("wasted_ms")
                lines.append(
                    f"{comparison.task_id:<14}{interface:<11}"
                    f"{com['mean']:>12.0f} ±{com['sd']:>6.0f}"
                    f"{mov['mean']:>11.0f} ±{mov['sd']:>5.0f}"
                    f"{was['mean']:>11.0f} ±{was['sd']:>5.0f}"
                )
            if comparison.completion_p_less is not None:
                lines.append(
                    f"{'':<14}paired p (completion, asp<bsp): "
                    f"{comparison.completion_p_less:.6g}; "
                    f"p (moving, two-sided): {comparison.moving_p_two_sided:.6g}"
                )
        return "\n".join(lines) + "\n"

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for record in self.to_records():
                fh.write(json.dumps(record) + "\n")


def _paired_p(pairs: list[tuple[float, float]], alternative: str) -> float:
    # Identical interfaces drop every difference; report "no difference".
    try:
        return wilcoxon_signed_rank(pairs, alternative).p_value
    except AllDifferencesZeroError:
        return 1.0


def bench_report(
    tasks: list[TaskSpec],
    user: VirtualUserModel,
    config: EngineConfig,
    seeds: int | list[int] = 8,
    interfaces: tuple[str, ...] = (ASP, BSP),
    tick_ms: int = DEFAULT_TICK_MS,
) -> BenchReport:
    seed_list = sorted(seeds) if isinstance(seeds, list) else list(range(seeds))
    if len(seed_list) < 2:
        raise ValueError("bench needs at least 2 seeds")
    report = BenchReport(seeds=seed_list, interfaces=interfaces)
    for task in tasks:
        by_interface: dict[str, InterfaceSummary] = {}
        for interface in dict.fromkeys(interfaces):
            runs = [
                simulate_session(task, interface, user.with_seed(seed), config, tick_ms=tick_ms)
                for seed in seed_list
            ]
            by_interface[interface] = InterfaceSummary(task.id, interface, seed_list, runs)
        comparison = TaskComparison(task_id=task.id, by_interface=by_interface)
        if len(interfaces) == 2:
            a_runs = by_interface[interfaces[0]].runs
            b_runs = by_interface[interfaces[1]].runs
            comparison.completion_p_less = _paired_p(
                [(a.completion_ms, b.completion_ms) for a, b in zip(a_runs, b_runs)],
                ALT_LESS,
            )
            comparison.moving_p_two_sided = _paired_p(
                [(a.moving_ms, b.moving_ms) for a, b in zip(a_runs, b_runs)],
                ALT_TWO_SIDED,
            )
        report.comparisons.append(comparison)
    return report
