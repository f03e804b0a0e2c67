"""Command-line entry points.

    sippuff validate-library <config>
    sippuff replay <recording> --config <file> [--out-dir DIR]
    sippuff simulate --task <id> --interface asp|bsp --seed N
    sippuff bench --tasks id [id ...] --seeds N --out <path>
    sippuff stats --pairs <file> --alt less|greater|two_sided
    sippuff serve --port N [--store DIR] [--static DIR]

Pairs files for ``stats`` are text with one ``a,b`` pair per line (an
optional ``a,b`` header is skipped).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arm import get_task, shipped_tasks
from .config import ConfigError, default_config, load_config
from .control import binding_table
from .harness import (
    AllDifferencesZeroError,
    RecordingError,
    SimulationTimeoutError,
    VirtualUserModel,
    bench_report,
    replay_recording,
    simulate_session,
    wilcoxon_signed_rank,
    write_traces,
)


def _load_config(path: str | None):
    return load_config(path) if path else default_config()


def _cmd_validate_library(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    rows = binding_table(config.library)
    print(f"ok: {len(rows)} sequence(s), t_match_ms={config.library.t_match_ms}")
    for uds_id, codes, mode in rows:
        codes_text = ",".join(str(c) for c in codes)
        print(f"  {uds_id:<12} [{codes_text}] -> {mode}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    try:
        result = replay_recording(args.recording, config)
    except RecordingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    stem = Path(args.recording).stem
    paths = write_traces(result, args.out_dir, stem)
    print(json.dumps(result.metrics.as_dict()))
    for kind, path in paths.items():
        print(f"{kind}: {path}", file=sys.stderr)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    task = get_task(args.task)
    user = VirtualUserModel(rng_seed=args.seed)
    try:
        metrics = simulate_session(task, args.interface, user, config, tick_ms=args.tick_ms)
    except SimulationTimeoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"task": task.id, "interface": args.interface, "seed": args.seed,
                      **metrics.as_dict()}))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    tasks = [get_task(task_id) for task_id in args.tasks]
    user = VirtualUserModel()
    report = bench_report(tasks, user, config, seeds=args.seeds, tick_ms=args.tick_ms)
    if args.out:
        report.write_jsonl(args.out)
        print(f"records: {args.out}", file=sys.stderr)
    print(report.to_text(), end="")
    return 0


def _read_pairs(path: str) -> list[tuple[float, float]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or (number == 1 and text.replace(" ", "") == "a,b"):
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {number}: expected 'a,b', got {line!r}")
            pairs.append((float(parts[0]), float(parts[1])))
    return pairs


def _cmd_stats(args: argparse.Namespace) -> int:
    try:
        pairs = _read_pairs(args.pairs)
        result = wilcoxon_signed_rank(pairs, args.alt)
    except AllDifferencesZeroError:
        print("error: all paired differences are zero; test undefined", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"n": result.n, "w_plus": result.statistic,
                      "alternative": args.alt, "p_value": result.p_value}))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .gateway import serve

    serve(args.port, store_path=args.store, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sippuff")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-library", help="check a configuration document")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate_library)

    p = sub.add_parser("replay", help="replay a recorded signal file")
    p.add_argument("recording")
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", default="traces")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("simulate", help="run one virtual-user session")
    p.add_argument("--task", required=True, choices=sorted(shipped_tasks()))
    p.add_argument("--interface", required=True, choices=["asp", "bsp"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--tick-ms", type=int, default=20)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="paired interface benchmark")
    p.add_argument("--tasks", nargs="+", required=True)
    p.add_argument("--seeds", type=int, default=8)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--tick-ms", type=int, default=20)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="exact paired signed-rank test")
    p.add_argument("--pairs", required=True)
    p.add_argument("--alt", default="two_sided", choices=["less", "greater", "two_sided"])
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("serve", help="run the session gateway")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", default=None)
    p.add_argument("--static", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
