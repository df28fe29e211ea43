"""Scenario-sweep command line tool.

Runs the simulator over a grid of one axis (node count, misbehaving ratio,
simulation time, or attack interval) x seeds x defense on/off, and writes
one CSV row per cell plus a companion ``*_summary.csv`` with per-cell means
across seeds. Rows are emitted in deterministic cell order, so identical
invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .config import ConfigError, SimConfig, parse_config
from .engine import run
from .metrics import (
    RunMetrics,
    detection_metrics,
    network_lifetime,
    pdr_percent,
    residual_energy_percent,
    throughput_kbps,
)

CSV_HEADER = ("axis,value,seed,defense,throughput_kbps,pdr_pct,lifetime_s,"
              "residual_pct,dr_pct,tpr_pct,tnr_pct,fpr_pct,fnr_pct")

AXES = {
    "node_count": ("node_count", int),
    "misbehaving_ratio": ("misbehaving_ratio", float),
    "sim_time": ("sim_time_s", float),
    "attack_interval": ("attack_interval_s", float),
}

# Grid used when a sweep axis is named without explicit values.
DEFAULT_GRIDS = {
    "misbehaving_ratio": [0.0, 0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75],
    "attack_interval": [1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
}

SCENARIOS = {
    "baseline": {"misbehaving_ratio": 0.0, "defense_enabled": True},
    "attack": {"misbehaving_ratio": 0.35, "defense_enabled": False},
    "defended": {"misbehaving_ratio": 0.35, "defense_enabled": True},
}


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    replications: int
    base: SimConfig
    defense: str = "both"  # on | off | both

    def validate(self) -> "SweepSpec":
        if self.axis != "none":
            if self.axis not in AXES:
                raise ConfigError(f"unknown sweep axis (choose from {sorted(AXES)})", key=self.axis)
            if not self.values:
                raise ConfigError("sweep values must be non-empty", key=self.axis)
            if list(self.values) != sorted(set(self.values)):
                raise ConfigError("sweep values must be strictly increasing", key=self.axis)
        if self.replications < 1:
            raise ConfigError("replications must be >= 1", key="seeds")
        if self.defense not in ("on", "off", "both"):
            raise ConfigError("defense must be on, off or both", key="defense")
        return self


@dataclass(frozen=True)
class ResultRow:
    axis: str
    value: float
    seed: int
    defense: str
    throughput_kbps: float
    pdr_pct: float
    lifetime_s: float
    residual_pct: float
    dr_pct: float
    tpr_pct: float
    tnr_pct: float
    fpr_pct: float
    fnr_pct: float

    def csv(self) -> str:
        nums = (self.throughput_kbps, self.pdr_pct, self.lifetime_s, self.residual_pct,
                self.dr_pct, self.tpr_pct, self.tnr_pct, self.fpr_pct, self.fnr_pct)
        return ",".join([self.axis, f"{self.value:.6f}", str(self.seed), self.defense]
                        + [f"{x:.6f}" for x in nums])


def row_from_metrics(axis: str, value: float, seed: int, defense: str,
                     metrics: RunMetrics) -> ResultRow:
    dr, tpr, tnr, fpr, fnr = detection_metrics(metrics.confusion)
    return ResultRow(
        axis=axis, value=value, seed=seed, defense=defense,
        throughput_kbps=throughput_kbps(metrics),
        pdr_pct=pdr_percent(metrics),
        lifetime_s=network_lifetime(metrics),
        residual_pct=residual_energy_percent(metrics),
        dr_pct=dr, tpr_pct=tpr, tnr_pct=tnr, fpr_pct=fpr, fnr_pct=fnr,
    )


def sweep_cells(spec: SweepSpec):
    """Deterministic cell order: axis value, then seed, then defense flag."""
    flags = {"on": (True,), "off": (False,), "both": (True, False)}[spec.defense]
    values = spec.values if spec.axis != "none" else (None,)
    for value in values:
        for i in range(spec.replications):
            for flag in flags:
                yield value, spec.base.rng_seed + i, flag


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    spec.validate()
    rows = []
    for value, seed, flag in sweep_cells(spec):
        overrides = {"rng_seed": seed, "defense_enabled": flag}
        axis_name = spec.axis
        out_value = 0.0
        if value is not None:
            field_name, conv = AXES[spec.axis]
            overrides[field_name] = conv(value)
            out_value = float(value)
        cfg = replace(spec.base, **overrides).validate()
        try:
            metrics = run(cfg)
            rows.append(row_from_metrics(axis_name, out_value, seed,
                                         "on" if flag else "off", metrics))
        except Exception as exc:
            raise RuntimeError(
                f"cell axis={axis_name} value={out_value} seed={seed} "
                f"defense={'on' if flag else 'off'}: {exc}"
            ) from exc
    return rows


def write_csv(rows: list[ResultRow], path: str | Path) -> None:
    path = Path(path)
    lines = [CSV_HEADER] + [row.csv() for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_summary_csv(rows: list[ResultRow], path: str | Path) -> None:
    """Per-(axis value, defense flag) means across seeds."""
    path = Path(path)
    groups: dict[tuple, list[ResultRow]] = {}
    order = []
    for row in rows:
        key = (row.axis, row.value, row.defense)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    header = ("axis,value,defense,replications,throughput_kbps,pdr_pct,lifetime_s,"
              "residual_pct,dr_pct,tpr_pct,tnr_pct,fpr_pct,fnr_pct")
    lines = [header]
    for key in order:
        bucket = groups[key]
        means = [
            sum(getattr(r, name) for r in bucket) / len(bucket)
            for name in ("throughput_kbps", "pdr_pct", "lifetime_s", "residual_pct",
                         "dr_pct", "tpr_pct", "tnr_pct", "fpr_pct", "fnr_pct")
        ]
        lines.append(",".join([key[0], f"{key[1]:.6f}", key[2], str(len(bucket))]
                              + [f"{x:.6f}" for x in means]))
    path.write_text("\n".join(lines) + "\n")


def summary_path(out_path: str | Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + "_summary" + (out_path.suffix or ".csv"))


def _parse_sweep_arg(arg: str) -> tuple[str, list]:
    if "=" in arg:
        axis, _, raw = arg.partition("=")
        axis = axis.strip()
        if axis not in AXES:
            raise ConfigError(f"unknown sweep axis (choose from {sorted(AXES)})", key=axis)
        conv = AXES[axis][1]
        try:
            values = [conv(v) for v in raw.split(",") if v.strip()]
        except ValueError:
            raise ConfigError("sweep values must be numeric", key=axis) from None
        return axis, values
    axis = arg.strip()
    if axis not in AXES:
        raise ConfigError(f"unknown sweep axis (choose from {sorted(AXES)})", key=axis)
    if axis not in DEFAULT_GRIDS:
        raise ConfigError("this axis has no default grid; pass axis=v1,v2,...", key=axis)
    return axis, list(DEFAULT_GRIDS[axis])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sleepguard",
        description="Clustered WSN denial-of-sleep simulator and defense sweep runner.",
    )
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--scenario", choices=sorted(SCENARIOS),
                        help="named preset applied over the config")
    parser.add_argument("--sweep", metavar="AXIS[=v1,v2,...]",
                        help="sweep axis: node_count, misbehaving_ratio, sim_time, "
                             "attack_interval; misbehaving_ratio and attack_interval "
                             "have default grids")
    parser.add_argument("--seeds", type=int, default=1,
                        help="replications per cell (seeds rng_seed, rng_seed+1, ...)")
    parser.add_argument("--defense", choices=("on", "off", "both"), default="both")
    parser.add_argument("--out", default="results.csv", help="output CSV path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        base = parse_config(args.config) if args.config else SimConfig()
        if args.scenario:
            base = replace(base, **SCENARIOS[args.scenario]).validate()
        if args.sweep:
            axis, values = _parse_sweep_arg(args.sweep)
        else:
            axis, values = "none", ()
        spec = SweepSpec(axis=axis, values=tuple(values), replications=args.seeds,
                         base=base, defense=args.defense).validate()
        rows = run_sweep(spec)
        write_csv(rows, args.out)
        write_summary_csv(rows, summary_path(args.out))
    except (ConfigError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {args.out} "
          f"(summary: {summary_path(args.out)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
