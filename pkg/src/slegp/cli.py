"""Command line front end: ``slegp run | sweep | figures``."""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

from slegp import experiments
from slegp.engine import SeriesPoint, SimConfig, run
from slegp.errors import ConfigurationError
from slegp.experiments import SweepRow

SERIES_HEADER = ("tick", "delivered", "throughput")
SWEEP_HEADER = ("param", "mean_throughput", "std_throughput", "seeds")

SWEEPABLE = {
    "messages": "messages",
    "min-gm": "min_gm",
    "min-go": "min_go",
    "bandwidth": "bandwidth",
    "switch-prob": "switch_prob",
    "range": "radio_range",
}

FIGURE_FILES = (
    "throughput_vs_messages.csv",
    "throughput_vs_gm_min.csv",
    "throughput_vs_go_min.csv",
    "throughput_vs_minutes.csv",
)


def _number(text: str) -> str:
    value = float(text)
    return str(int(value)) if value.is_integer() else repr(value)


def _series_row(p: SeriesPoint) -> List[str]:
    return [str(p.tick), str(p.delivered), f"{p.throughput:.6f}"]


def _sweep_row(r: SweepRow) -> List[str]:
    return [_number(r.param), f"{r.mean_throughput:.6f}", f"{r.std_throughput:.6f}", str(r.seeds)]


def render_csv(table: Sequence, kind: str) -> str:
    header, fmt = {"series": (SERIES_HEADER, _series_row), "sweep": (SWEEP_HEADER, _sweep_row)}[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(fmt(row) for row in table)
    return buf.getvalue()


def write_csv(table: Sequence, path: str, kind: str = "series") -> None:
    """Write a run series or sweep table; ``-`` means stdout."""
    text = render_csv(table, kind)
    if path == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _value_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    d = SimConfig()
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("simulation")
    g.add_argument("--n", type=int, default=d.n, help="devices per direction")
    g.add_argument("--circuit-length", type=float, default=d.circuit_length, metavar="M")
    g.add_argument("--spacing", type=float, default=d.spacing, metavar="M")
    g.add_argument("--speed", type=float, default=d.speed, metavar="M/S")
    g.add_argument("--messages", type=int, default=d.messages, help="personal messages per device")
    g.add_argument("--min-go", type=int, default=d.min_go, metavar="S")
    g.add_argument("--min-gm", type=int, default=d.min_gm, metavar="S")
    g.add_argument("--switch-prob", type=float, default=d.switch_prob)
    g.add_argument("--range", type=float, default=d.radio_range, dest="radio_range", metavar="M")
    g.add_argument("--bandwidth", type=int, default=d.bandwidth, help="send slots per device per tick")
    g.add_argument("--ticks", type=int, default=d.total_ticks, dest="total_ticks", metavar="S")
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--max-members", type=int, default=d.max_members, help="group size cap (0: none)")
    g.add_argument("--join-delay", type=int, default=d.join_delay, metavar="S",
                   help="ticks between attaching and exchanging")

    multi = argparse.ArgumentParser(add_help=False)
    multi.add_argument("--seeds", type=_positive_int, default=10, help="seeds per point: seed .. seed+k-1")
    multi.add_argument("--jobs", type=_positive_int, default=1, help="concurrent simulation runs")

    parser = argparse.ArgumentParser(prog="slegp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="one run, per-tick throughput CSV")
    p_run.add_argument("--out", default="-", help="CSV path (default: stdout)")

    p_sweep = sub.add_parser("sweep", parents=[common, multi], help="sweep one parameter")
    p_sweep.add_argument("--param", choices=sorted(SWEEPABLE), required=True)
    p_sweep.add_argument("--values", type=_value_list, required=True)
    p_sweep.add_argument("--out", default="-", help="CSV path (default: stdout)")

    p_fig = sub.add_parser("figures", parents=[common, multi], help="all four figure sweeps")
    p_fig.add_argument("--out", default="results", help="output directory")
    p_fig.add_argument("--series-minutes", type=int, default=60,
                       help="horizon of the elapsed-time figure")
    return parser


def parse_config(args: Optional[Sequence[str]] = None) -> Tuple[str, SimConfig, argparse.Namespace]:
    ns = build_parser().parse_args(args)
    config = SimConfig(
        n=ns.n,
        circuit_length=ns.circuit_length,
        spacing=ns.spacing,
        speed=ns.speed,
        messages=ns.messages,
        min_go=ns.min_go,
        min_gm=ns.min_gm,
        switch_prob=ns.switch_prob,
        radio_range=ns.radio_range,
        bandwidth=ns.bandwidth,
        total_ticks=ns.total_ticks,
        seed=ns.seed,
        max_members=ns.max_members,
        join_delay=ns.join_delay,
    ).validate()
    return ns.command, config, ns


def _cast(field: str, value: float):
    return int(value) if field in ("messages", "min_gm", "min_go", "bandwidth") else value


def _cmd_run(config: SimConfig, ns) -> None:
    result = run(config)
    write_csv(result.series, ns.out, "series")
    print(f"throughput at tick {config.total_ticks}: {result.final_throughput:.6f}", file=sys.stderr)


def _cmd_sweep(config: SimConfig, ns) -> None:
    field = SWEEPABLE[ns.param]
    values = [_cast(field, v) for v in ns.values]
    seeds = experiments.seed_list(config.seed, ns.seeds)
    rows = experiments.sweep(config, field, values, seeds, ns.jobs)
    write_csv(rows, ns.out, "sweep")


def _cmd_figures(config: SimConfig, ns) -> None:
    seeds = experiments.seed_list(config.seed, ns.seeds)
    out = ns.out
    tables = [
        experiments.sweep_personal_messages(config, seeds=seeds, jobs=ns.jobs),
        experiments.sweep_gm_min(replace(config, min_go=9), seeds=seeds, jobs=ns.jobs),
        experiments.sweep_go_min(replace(config, min_gm=7), seeds=seeds, jobs=ns.jobs),
    ]
    series_base = replace(
        config, messages=1, min_go=9, min_gm=7, total_ticks=max(ns.series_minutes, 60) * 60
    )
    if series_base.total_ticks < 3600:
        series_base = replace(series_base, total_ticks=3600)
    ts = experiments.time_series_experiment(series_base, seeds=seeds, jobs=ns.jobs)
    tables.append(ts.rows)
    for name, rows in zip(FIGURE_FILES, tables):
        write_csv(rows, os.path.join(out, name), "sweep")

    for label, rows in zip(("messages", "min_gm", "min_go"), tables):
        peak = experiments.peak_row(rows)
        print(f"{label}: peak mean throughput {peak.mean_throughput:.6f} at {_number(peak.param)}")

    def fmt(v):
        return "not reached" if v is None else f"{v:.2f} min"

    print(f"90% delivered after {fmt(ts.mean_minutes_to_90)} (mean over {len(seeds)} seeds)")
    print(f"100% delivered after {fmt(ts.mean_minutes_to_100)} (mean over {len(seeds)} seeds)")


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "figures": _cmd_figures}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        command, config, ns = parse_config(argv)
    except ConfigurationError as exc:
        print(f"slegp: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[command](config, ns)
    except ConfigurationError as exc:
        print(f"slegp: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        target = exc.filename or getattr(ns, "out", "?")
        print(f"slegp: cannot write {target}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
