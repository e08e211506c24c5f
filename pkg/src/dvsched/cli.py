"""Command line front end.

Subcommands:

  pareto    exact (area, power) front for one graph, mode and slack
  compare   fronts for all three modes side by side, with coverage stats
  sweep     fronts across a range of slack values, optional 3-axis merge
  budget    one constrained schedule via list scheduling or first-fit search
  oracle    brute-force front for small graphs (cross-checking aid)
  validate  check a schedule file against the timing rules and cost it

Exit codes: 0 success, 2 bad input (parse, validation, argument errors),
3 enumeration refused because the state space is too large, 4 a search hit
its time limit (partial results are still written).

CSV outputs are deterministic: fixed column order, rows fully sorted,
floats rendered with six decimals.  Wall-clock measurements only ever go
to the JSON sidecar, never the CSV, so identical runs produce identical
CSV bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from .bb import SearchConfig, SearchReport, bb_first, bb_pareto
from .dfg import (
    Dfg,
    DfgError,
    Schedule,
    TimingInfo,
    compute_timing,
    parse_dfg,
    validate_schedule,
)
from .listsched import Budget, Priority, list_schedule
from .oracle import EnumerationBound, StateSpaceTooLarge, oracle_front
from .power import (
    POWER_EPS,
    ArchMode,
    CostTuple,
    LibraryError,
    ParetoSet,
    ResourceLibrary,
    dominates3,
    load_resource_library,
    schedule_cost,
)

MODE_ORDER = (ArchMode.SINGLE_VDD, ArchMode.MULTI_VDD, ArchMode.FGDVS)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3
EXIT_TIME_LIMIT = 4


# ---------------------------------------------------------------------------
# input loading and shared formatting


def _load_graph(path: str) -> Dfg:
    return parse_dfg(Path(path).read_text(encoding="utf-8"))


def _load_library(path: str) -> ResourceLibrary:
    return load_resource_library(Path(path).read_text(encoding="utf-8"))


def _parse_area_budget(text: str) -> dict[str, int]:
    caps: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        op, sep, raw = part.partition("=")
        if not sep or not op.strip():
            raise ValueError(f"bad area budget entry {part!r}, expected TYPE=COUNT")
        try:
            count = int(raw)
        except ValueError:
            raise ValueError(f"bad area budget count {raw!r} for {op.strip()!r}") from None
        caps[op.strip()] = count
    if not caps:
        raise ValueError("empty area budget")
    return caps


def _make_budget(args: argparse.Namespace) -> Budget:
    caps = _parse_area_budget(args.area_budget) if args.area_budget else None
    return Budget(area_caps=caps, power_cap=args.power_budget)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _schedule_str(schedule: Schedule) -> str:
    return ";".join(f"{v}:{t}:{d}" for v, (t, d) in sorted(schedule.items()))


def _schedule_json(schedule: Schedule) -> dict[str, list[int]]:
    return {str(v): [t, d] for v, (t, d) in sorted(schedule.items())}


def _csv_header(op_types: Sequence[str]) -> list[str]:
    head = [
        "mode",
        "k",
        "latency",
        "area_total",
        "power_total",
        "power_dynamic",
        "power_leakage",
        "power_switching",
    ]
    head.extend(f"area_{op}" for op in op_types)
    head.append("schedule")
    return head


def _csv_row(
    mode: ArchMode,
    k: int,
    cost: CostTuple,
    schedule: Schedule,
    op_types: Sequence[str],
) -> list[str]:
    row = [
        mode.value,
        str(k),
        str(cost.latency),
        str(cost.area_total),
        _fmt(cost.power),
        _fmt(cost.dynamic),
        _fmt(cost.leakage),
        _fmt(cost.switching),
    ]
    row.extend(str(cost.area_by_type.get(op, 0)) for op in op_types)
    row.append(_schedule_str(schedule))
    return row


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    # csv.writer would add \r\n quoting variance for nothing; fields are
    # comma-free by construction.
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _front_json(front: ParetoSet) -> list[dict]:
    out = []
    for entry in front.sorted_entries():
        c = entry.cost
        out.append(
            {
                "area": c.area_total,
                "area_by_type": dict(sorted(c.area_by_type.items())),
                "power": c.power,
                "dynamic": c.dynamic,
                "leakage": c.leakage,
                "switching": c.switching,
                "latency": c.latency,
                "schedule": _schedule_json(entry.schedule),
            }
        )
    return out


def _report_json(report: SearchReport) -> dict:
    data = {
        "completed": report.completed,
        "elapsed": report.elapsed,
        "nodes_expanded": report.nodes_expanded,
        "budget_prunes": report.budget_prunes,
        "dominance_prunes": report.dominance_prunes,
        "front_size": len(report.front),
        "front": _front_json(report.front),
    }
    if report.first_solution is not None:
        cost, schedule, at = report.first_solution
        data["first_solution"] = {
            "area": cost.area_total,
            "power": cost.power,
            "elapsed": at,
            "schedule": _schedule_json(schedule),
        }
    return data


def _write_json(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _print_front(front: ParetoSet, op_types: Sequence[str]) -> None:
    for entry in front.sorted_entries():
        c = entry.cost
        per_type = " ".join(
            f"{op}={c.area_by_type.get(op, 0)}" for op in op_types if c.area_by_type.get(op, 0)
        )
        print(
            f"  area={c.area_total:<3d} power={_fmt(c.power)} "
            f"(dyn={_fmt(c.dynamic)} leak={_fmt(c.leakage)} sw={_fmt(c.switching)}) "
            f"[{per_type}]"
        )


def _search(
    g: Dfg,
    timing: TimingInfo,
    lib: ResourceLibrary,
    mode: ArchMode,
    args: argparse.Namespace,
) -> SearchReport:
    cfg = SearchConfig(
        mode=mode,
        budget=_make_budget(args),
        time_limit=args.time_limit,
        emit_first_solution=getattr(args, "emit_first", False),
    )
    return bb_pareto(g, timing, lib, cfg)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pareto(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    timing = compute_timing(g, args.k)
    mode = ArchMode(args.mode)
    report = _search(g, timing, lib, mode, args)
    ops = lib.op_types()

    print(
        f"{g.name}: mode={mode.value} k={args.k} latency_bound={timing.latency_bound} "
        f"front={len(report.front)} expanded={report.nodes_expanded} "
        f"elapsed={report.elapsed:.3f}s"
        + ("" if report.completed else " [time limit hit, front is partial]")
    )
    _print_front(report.front, ops)

    if args.out:
        rows = [
            _csv_row(mode, args.k, e.cost, e.schedule, ops)
            for e in report.front.sorted_entries()
        ]
        _write_csv(args.out, _csv_header(ops), rows)
    if args.json:
        data = {
            "command": "pareto",
            "dfg": g.name,
            "mode": mode.value,
            "k": args.k,
            "latency_bound": timing.latency_bound,
        }
        data.update(_report_json(report))
        _write_json(args.json, data)
    return EXIT_OK if report.completed else EXIT_TIME_LIMIT


def cmd_compare(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    timing = compute_timing(g, args.k)
    ops = lib.op_types()

    reports: dict[ArchMode, SearchReport] = {}
    for mode in MODE_ORDER:
        reports[mode] = _search(g, timing, lib, mode, args)

    for mode in MODE_ORDER:
        rep = reports[mode]
        tag = "" if rep.completed else " [partial]"
        print(f"{g.name}: mode={mode.value} front={len(rep.front)}{tag}")
        _print_front(rep.front, ops)

    multi = reports[ArchMode.MULTI_VDD].front.sorted_entries()
    fg = reports[ArchMode.FGDVS].front.sorted_entries()
    covered = 0
    for m in multi:
        if any(
            f.cost.area_total <= m.cost.area_total
            and f.cost.power <= m.cost.power + POWER_EPS
            for f in fg
        ):
            covered += 1
    pct = 100.0 * covered / len(multi) if multi else 100.0
    print(
        f"coverage: fgdvs matches or beats {covered}/{len(multi)} "
        f"multi-vdd points ({pct:.1f}%)"
    )

    if args.out:
        rows = []
        for mode in MODE_ORDER:
            rows.extend(
                _csv_row(mode, args.k, e.cost, e.schedule, ops)
                for e in reports[mode].front.sorted_entries()
            )
        _write_csv(args.out, _csv_header(ops), rows)
    if args.json:
        data = {
            "command": "compare",
            "dfg": g.name,
            "k": args.k,
            "latency_bound": timing.latency_bound,
            "coverage": {
                "multi_points": len(multi),
                "covered_by_fgdvs": covered,
                "percent": pct,
            },
            "runs": {m.value: _report_json(reports[m]) for m in MODE_ORDER},
        }
        _write_json(args.json, data)
    return EXIT_OK if all(r.completed for r in reports.values()) else EXIT_TIME_LIMIT


def cmd_sweep(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    mode = ArchMode(args.mode)
    ops = lib.op_types()

    runs: list[tuple[int, TimingInfo, SearchReport]] = []
    for k in range(args.k_max + 1):
        timing = compute_timing(g, k)
        runs.append((k, timing, _search(g, timing, lib, mode, args)))

    # One summary row per slack: the front's area and power extremes.
    header = [
        "mode",
        "k",
        "latency",
        "front_size",
        "min_area",
        "max_area",
        "min_power",
        "max_power",
    ]
    rows = []
    for k, timing, rep in runs:
        tag = "" if rep.completed else " [partial]"
        print(
            f"{g.name}: mode={mode.value} k={k} latency_bound={timing.latency_bound} "
            f"front={len(rep.front)}{tag}"
        )
        _print_front(rep.front, ops)
        pts = rep.front.cost_points()
        if pts:
            areas = [a for a, _p in pts]
            powers = [p for _a, p in pts]
            rows.append(
                [
                    mode.value,
                    str(k),
                    str(timing.latency_bound),
                    str(len(pts)),
                    str(min(areas)),
                    str(max(areas)),
                    _fmt(min(powers)),
                    _fmt(max(powers)),
                ]
            )
        else:
            rows.append(
                [mode.value, str(k), str(timing.latency_bound), "0", "", "", "", ""]
            )
    if args.out:
        _write_csv(args.out, header, rows)

    front3_rows: list[list[str]] = []
    merged: list[tuple[CostTuple, Schedule, int]] = []
    if args.front3:
        # Fold every point across slacks into one non-dominated set over
        # (latency, area, power); ties keep the smallest-k entry.
        for k, _timing, rep in runs:
            for entry in rep.front.sorted_entries():
                c, s = entry.cost, entry.schedule
                if any(dominates3(mc, c) or _triple_equal(mc, c) for mc, _ms, _mk in merged):
                    continue
                merged = [(mc, ms, mk) for mc, ms, mk in merged if not dominates3(c, mc)]
                merged.append((c, s, k))
        merged.sort(key=lambda item: (item[0].latency, item[0].area_total, item[0].power))
        front3_rows = [_csv_row(mode, k, c, s, ops) for c, s, k in merged]
        path = args.front3 if isinstance(args.front3, str) else None
        if path is None and args.out:
            path = str(Path(args.out).with_suffix(".front3.csv"))
        if path:
            _write_csv(path, _csv_header(ops), front3_rows)
        print(f"merged latency/area/power front: {len(merged)} points")

    if args.json:
        data = {
            "command": "sweep",
            "dfg": g.name,
            "mode": mode.value,
            "k_max": args.k_max,
            "runs": [
                {"k": k, "latency_bound": t.latency_bound, **_report_json(rep)}
                for k, t, rep in runs
            ],
        }
        if args.front3:
            data["front3"] = [
                {
                    "k": k,
                    "latency": c.latency,
                    "area": c.area_total,
                    "power": c.power,
                    "schedule": _schedule_json(s),
                }
                for c, s, k in merged
            ]
        _write_json(args.json, data)
    return EXIT_OK if all(rep.completed for _k, _t, rep in runs) else EXIT_TIME_LIMIT


def _triple_equal(c1: CostTuple, c2: CostTuple) -> bool:
    return (
        c1.area_total == c2.area_total
        and c1.latency == c2.latency
        and abs(c1.power - c2.power) <= POWER_EPS
    )


def cmd_budget(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    timing = compute_timing(g, args.k)
    mode = ArchMode(args.mode)
    budget = _make_budget(args)
    base = {
        "command": "budget",
        "dfg": g.name,
        "mode": mode.value,
        "k": args.k,
        "algorithm": args.algorithm,
    }

    if args.algorithm == "bb":
        cfg = SearchConfig(mode=mode, budget=budget, time_limit=args.time_limit)
        report = bb_pareto(g, timing, lib, cfg)
        tag = "" if report.completed else " [partial]"
        print(f"{g.name}: budget-constrained front, {len(report.front)} points{tag}")
        _print_front(report.front, lib.op_types())
        if args.json:
            _write_json(args.json, {**base, **_report_json(report)})
        return EXIT_OK if report.completed else EXIT_TIME_LIMIT

    if args.algorithm == "list":
        t0 = time.perf_counter()
        schedule = list_schedule(g, timing, lib, mode, budget, Priority(args.priority))
        elapsed = time.perf_counter() - t0
        if schedule is None:
            print(f"{g.name}: INFEASIBLE ({elapsed:.4f}s, priority={args.priority})")
            if args.json:
                _write_json(
                    args.json, {**base, "feasible": False, "elapsed": elapsed}
                )
            return EXIT_OK
    else:  # bb-first
        cfg = SearchConfig(mode=mode, budget=budget, time_limit=args.time_limit)
        hit = bb_first(g, timing, lib, cfg)
        if hit is None:
            if args.time_limit is not None:
                # Distinguish "proved infeasible" from "ran out of time".
                probe = bb_pareto(g, timing, lib, cfg)
                if not probe.completed:
                    print("no schedule found before the time limit", file=sys.stderr)
                    return EXIT_TIME_LIMIT
            print(f"{g.name}: NONE")
            if args.json:
                _write_json(args.json, {**base, "feasible": False})
            return EXIT_OK
        _c, schedule, elapsed = hit

    cost = schedule_cost(g, schedule, lib, mode, timing.latency_bound)
    print(
        f"{g.name}: ({cost.area_total}, {_fmt(cost.power)}) "
        f"{elapsed:.4f}s ({args.algorithm})"
    )
    for v in sorted(schedule):
        t, d = schedule[v]
        print(f"  node {v} ({g.nodes[v]}): start={t} cycles={d}")
    if args.json:
        _write_json(
            args.json,
            {
                **base,
                "feasible": True,
                "area": cost.area_total,
                "power": cost.power,
                "elapsed": elapsed,
                "schedule": _schedule_json(schedule),
            },
        )
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    timing = compute_timing(g, args.k)
    mode = ArchMode(args.mode)
    bound = EnumerationBound(max_nodes=args.max_nodes, max_states=args.max_states)
    front = oracle_front(g, timing, lib, mode, _make_budget(args), bound)
    ops = lib.op_types()

    print(
        f"{g.name}: oracle mode={mode.value} k={args.k} "
        f"latency_bound={timing.latency_bound} front={len(front)}"
    )
    _print_front(front, ops)
    if args.out:
        rows = [
            _csv_row(mode, args.k, e.cost, e.schedule, ops)
            for e in front.sorted_entries()
        ]
        _write_csv(args.out, _csv_header(ops), rows)
    if args.json:
        _write_json(
            args.json,
            {
                "command": "oracle",
                "dfg": g.name,
                "mode": mode.value,
                "k": args.k,
                "latency_bound": timing.latency_bound,
                "front_size": len(front),
                "front": _front_json(front),
            },
        )
    return EXIT_OK


def _parse_schedule_file(path: str) -> list[Schedule]:
    """Read one schedule, or every schedule from a sidecar JSON."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    schedules: list[Schedule] = []
    if "front" in data or "runs" in data:
        fronts = []
        if "front" in data:
            fronts.append(data["front"])
        for run in (data.get("runs") or {}).values() if isinstance(data.get("runs"), dict) else (data.get("runs") or []):
            if "front" in run:
                fronts.append(run["front"])
        for front in fronts:
            for item in front:
                schedules.append(_coerce_schedule(item["schedule"]))
        if "schedule" in data:
            schedules.append(_coerce_schedule(data["schedule"]))
    elif "schedule" in data:
        schedules.append(_coerce_schedule(data["schedule"]))
    else:
        schedules.append(_coerce_schedule(data))
    if not schedules:
        raise ValueError(f"{path}: no schedules found")
    return schedules


def _coerce_schedule(raw: dict) -> Schedule:
    sched: Schedule = {}
    for key, val in raw.items():
        v = int(key)
        t, d = int(val[0]), int(val[1])
        sched[v] = (t, d)
    return sched


def cmd_validate(args: argparse.Namespace) -> int:
    g = _load_graph(args.dfg)
    lib = _load_library(args.lib)
    timing = compute_timing(g, args.k)
    mode = ArchMode(args.mode)
    schedules = _parse_schedule_file(args.schedule)

    allowed = lib.allowed_durations()
    failures = 0
    for idx, schedule in enumerate(schedules):
        label = f"schedule {idx + 1}/{len(schedules)}"
        violation = validate_schedule(g, timing, schedule, allowed)
        if violation is not None:
            failures += 1
            print(f"{label}: INVALID [{violation.rule}] {violation.message}")
            continue
        cost = schedule_cost(g, schedule, lib, mode, timing.latency_bound)
        print(
            f"{label}: ok area={cost.area_total} power={_fmt(cost.power)} "
            f"(dyn={_fmt(cost.dynamic)} leak={_fmt(cost.leakage)} "
            f"sw={_fmt(cost.switching)})"
        )
    if failures:
        print(f"{failures}/{len(schedules)} schedules failed validation")
        return EXIT_INPUT
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, *, mode: bool = True) -> None:
    p.add_argument("--dfg", required=True, help="data-flow graph file")
    p.add_argument("--lib", required=True, help="resource library file")
    p.add_argument("--k", type=int, default=0, help="latency slack beyond the critical path (default 0)")
    if mode:
        p.add_argument(
            "--mode",
            choices=[m.value for m in ArchMode],
            default=ArchMode.FGDVS.value,
            help="architecture cost model (default fgdvs)",
        )


def _add_budget_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--area-budget",
        metavar="TYPE=N[,TYPE=N...]",
        help="per-type unit caps, e.g. mul=2,add=1",
    )
    p.add_argument("--power-budget", type=float, metavar="MW", help="total power cap")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="CSV", help="write the front as CSV")
    p.add_argument("--json", metavar="FILE", help="write a JSON sidecar with run details")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dvsched",
        description="Voltage-aware operator scheduling on data-flow graphs.",
    )
    parser.add_argument(
        "--seed", type=int, default=None, help=argparse.SUPPRESS
    )  # reserved; all algorithms are deterministic
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pareto", help="exact area/power front for one configuration")
    _add_common(p)
    _add_budget_args(p)
    _add_output_args(p)
    p.add_argument("--time-limit", type=float, metavar="SEC", help="search time limit")
    p.add_argument(
        "--emit-first",
        action="store_true",
        help="record the first feasible schedule found in the JSON sidecar",
    )
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("compare", help="fronts for all three modes on one graph")
    _add_common(p, mode=False)
    _add_budget_args(p)
    _add_output_args(p)
    p.add_argument("--time-limit", type=float, metavar="SEC", help="per-mode time limit")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="fronts across slack values 0..k-max")
    _add_common(p)
    _add_budget_args(p)
    _add_output_args(p)
    p.add_argument("--k-max", type=int, default=2, help="largest slack to try (default 2)")
    p.add_argument("--time-limit", type=float, metavar="SEC", help="per-slack time limit")
    p.add_argument(
        "--front3",
        nargs="?",
        const=True,
        metavar="CSV",
        help="also merge all slacks into a latency/area/power front "
        "(path optional; defaults next to --out)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("budget", help="find one schedule under a budget")
    _add_common(p)
    _add_budget_args(p)
    p.add_argument(
        "--algorithm",
        choices=["list", "bb-first", "bb"],
        default="list",
        help="list scheduler, first solution found by branch-and-bound, "
        "or the full budget-constrained front (default list)",
    )
    p.add_argument(
        "--priority",
        choices=[pr.value for pr in Priority],
        default=Priority.MIN_DURATION.value,
        help="list scheduler duration preference (default min-duration)",
    )
    p.add_argument("--time-limit", type=float, metavar="SEC", help="search time limit (bb only)")
    p.add_argument("--json", metavar="FILE", help="write result as JSON")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("oracle", help="brute-force front for small graphs")
    _add_common(p)
    _add_budget_args(p)
    _add_output_args(p)
    p.add_argument(
        "--max-nodes",
        type=int,
        default=EnumerationBound.max_nodes,
        help=f"refuse graphs larger than this (default {EnumerationBound.max_nodes})",
    )
    p.add_argument(
        "--max-states",
        type=int,
        default=EnumerationBound.max_states,
        help="refuse state spaces larger than this",
    )
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="check a schedule file and report its cost")
    _add_common(p)
    p.add_argument(
        "--schedule",
        required=True,
        metavar="JSON",
        help="schedule file: {\"node\": [start, cycles], ...} or a JSON sidecar",
    )
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StateSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (DfgError, LibraryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
