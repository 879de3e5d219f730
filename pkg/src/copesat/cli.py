"""Command-line front end.

    copesat sweep   --topology cross --nc --mpr 2 --p 0.05:0.05:3 --seed 7 --out nc.csv
    copesat maxima  --topology x --nc --mpr 4 --traffic broadcast --shares
    copesat figure  cross-nodefair --seed 7 --out fig3.csv

Every flag can also be set in a flat ``key = value`` file passed with
``--config``; flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, fields
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analysis import gain_decomposition, max_throughput
from .engine import SimConfig, sweep, trace_sweep
from .mac_sched import (FLOW_FAIR, MAC_CHOICES, MacPolicy, MprConfig, UnsupportedConfiguration,
                        flow_fair_shares)
from .topology import TopologyError, build_component
from .traffic import TRAFFIC_TYPES

FIGURES = ("cross-nodefair", "x-nodefair", "cross-flowfair", "x-flowfair", "gain-vs-m")

# (series, nc, m) drawn by every throughput-vs-load figure
CURVE_SERIES = (
    ("routing", False, 1),
    ("nc", True, 1),
    ("mpr2", False, 2),
    ("mpr4", False, 4),
    ("nc+mpr2", True, 2),
    ("nc+mpr4", True, 4),
)
GAIN_MS = (1, 2, 4)

SWEEP_HEADER = ("P", "mean_S", "std_S", "config_id")


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    topology: str = "cross"
    n: int = 5
    x1: int | None = None
    nc: bool = False
    mpr: int = 1
    cap2: bool = False
    mac: str = "node-fair"
    traffic: str = "unicast"
    p: str = "0.05:0.05:3"
    iters: int = 1000
    seed: int | None = None
    g: int = 100
    horizon: int | None = None  # defaults to g
    workers: int = 1
    out: str | None = None
    trace: str | None = None
    plot_script: str | None = None
    render: bool = True
    shares: bool = False
    all: bool = False

    def validate(self, need_seed=False, check_component=True):
        if self.topology not in ("cross", "x"):
            raise SpecError(f"--topology must be cross or x, got {self.topology!r}")
        if self.mac not in MAC_CHOICES:
            raise SpecError(f"--mac must be one of {', '.join(MAC_CHOICES)}")
        if self.traffic not in TRAFFIC_TYPES:
            raise SpecError(f"--traffic must be one of {', '.join(TRAFFIC_TYPES)}")
        for name in ("n", "mpr", "iters", "g", "workers"):
            if getattr(self, name) < 1:
                raise SpecError(f"--{name} must be >= 1")
        if self.horizon is not None and self.horizon < 1:
            raise SpecError("--horizon must be >= 1")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise SpecError("--seed must be an unsigned 64-bit integer")
        if need_seed and self.seed is None:
            raise SpecError("--seed is required for simulations")
        try:
            if check_component:
                build_component(self.topology, self.n, self.x1)
        except TopologyError as exc:
            raise SpecError(str(exc)) from None
        parse_grid(self.p)
        for path in (self.out, self.trace, self.plot_script):
            _check_writable(path)
        return self

    def sim_config(self, **overrides) -> SimConfig:
        values = dict(
            kind=self.topology, n=self.n, x1=self.x1, traffic=self.traffic, nc=self.nc,
            mpr=MprConfig(self.mpr, self.cap2), mac=MacPolicy.parse(self.mac),
            horizon=self.horizon or self.g, g=self.g, iterations=self.iters,
            seed=self.seed or 0,
        )
        values.update(overrides)
        return SimConfig(**values)


SPEC_TYPES = {f.name: f.type for f in fields(ExperimentSpec)}
BOOL_KEYS = {"nc", "cap2", "render", "shares", "all"}
INT_KEYS = {"n", "x1", "mpr", "iters", "seed", "g", "horizon", "workers"}


def _check_writable(path):
    if path is None or path == "-":
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise SpecError(f"cannot write {path}: directory {parent} is missing or read-only")


def parse_grid(text: str) -> list:
    """``start:step:end`` inclusive, in exact decimal steps."""
    try:
        start, step, end = (Decimal(part) for part in text.split(":"))
    except (ValueError, InvalidOperation):
        raise SpecError(f"--p expects start:step:end, got {text!r}") from None
    if start < 0 or end < start:
        raise SpecError(f"--p needs 0 <= start <= end, got {text!r}")
    if start == end:
        return [start]
    if step <= 0:
        raise SpecError(f"--p step must be positive, got {step}")
    count = int((end - start) / step) + 1
    return [start + i * step for i in range(count)]


def _fmt_p(p: Decimal) -> str:
    return f"{p.normalize():f}"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _dec(q: Fraction) -> str:
    return _fmt(float(q))


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Unknown keys are errors."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in SPEC_TYPES:
            raise SpecError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value, f"{path}:{lineno}")
    return values


def _coerce(key, value, where):
    if key in BOOL_KEYS:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise SpecError(f"{where}: {key} expects a boolean, got {value!r}")
    if key in INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise SpecError(f"{where}: {key} expects an integer, got {value!r}") from None
    return value


def build_spec(args) -> ExperimentSpec:
    values = read_config(args.config) if args.config else {}
    for key in SPEC_TYPES:
        given = getattr(args, key, None)
        if given is not None:
            values[key] = given
    return ExperimentSpec(**values)


# --- output helpers -------------------------------------------------------------

class _Output:
    """Open ``path`` for writing, or borrow stdout for ``None`` / ``-``."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path in (None, "-"):
            self.fh = sys.stdout
        else:
            self.fh = open(self.path, "w", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()


def _write_rows(path, header, rows):
    with _Output(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _companions(spec, default_stem=None):
    """PNG path and plot-script path that go with the CSV output."""
    stem = Path(spec.out).with_suffix("") if spec.out not in (None, "-") else default_stem
    png = Path(f"{stem}.png") if stem is not None and spec.render else None
    return png, spec.plot_script


def _emit_plot_script(path, csv_path, png, gain=False):
    from .plotting import plot_script

    target = png or Path(csv_path).with_suffix(".png")
    Path(path).write_text(plot_script(csv_path, target, gain=gain))


# --- commands -------------------------------------------------------------------

def _curve_rows(config, grid, workers, series=None):
    curve = sweep(config, [Fraction(p) for p in grid], workers)
    rows = []
    for p, (_, mean, std) in zip(grid, curve.points):
        row = (_fmt_p(p), _fmt(mean), _fmt(std), config.config_id)
        rows.append(((series,) if series is not None else ()) + row)
    return rows


def cmd_sweep(spec: ExperimentSpec) -> int:
    spec.validate(need_seed=True)
    config = spec.sim_config()
    grid = parse_grid(spec.p)
    rows = _curve_rows(config, grid, spec.workers)
    _write_rows(spec.out, SWEEP_HEADER, rows)
    if spec.trace:
        with open(spec.trace, "w", newline="") as fh:
            trace_sweep(config, [Fraction(p) for p in grid], fh, [_fmt_p(p) for p in grid])
    png, script = _companions(spec)
    if png is not None:
        from .plotting import render_curves

        point = _star(config)
        render_curves([dict(zip(SWEEP_HEADER, r)) for r in rows], png, config.config_id,
                      {"": point} if point else None)
    if script:
        _emit_plot_script(script, spec.out or "sweep.csv", png)
    return 0


def _star(config):
    try:
        pt = max_throughput(config.kind, config.nc, config.mpr.m, config.traffic,
                            config.mpr.broadcast_cap2, n=config.n)
    except UnsupportedConfiguration:
        return None
    return pt.p_star, pt.s_max


MAXIMA_HEADER = (
    "kind", "n", "nc", "m", "traffic", "cap2",
    "p_star", "p_star_dec", "s_max", "s_max_dec", "s_sat", "s_sat_dec",
    "literal_s_edge", "literal_s_center", "generalized_s_edge", "generalized_s_center", "status",
)
SHARE_EXTRA = ("literal_s_edge_dec", "literal_s_center_dec", "literal_normalization",
               "generalized_s_edge_dec", "generalized_s_center_dec", "generalized_slot_sum")


def _maxima_configs(spec):
    if not spec.all:
        return [(spec.topology, spec.nc, spec.mpr, spec.traffic, spec.cap2)]
    out = []
    for kind in ("cross", "x"):
        for nc in (False, True):
            for m in (1, 2, 4):
                for traffic in TRAFFIC_TYPES:
                    out.append((kind, nc, m, traffic, False))
                    if traffic == "broadcast" and m > 2:
                        out.append((kind, nc, m, traffic, True))
    return out


def maxima_rows(spec: ExperimentSpec):
    rows = []
    for kind, nc, m, traffic, cap2 in _maxima_configs(spec):
        head = (kind, spec.n, int(nc), m, traffic, int(cap2))
        x1 = spec.x1 if kind == "x" else None
        try:
            pt = max_throughput(kind, nc, m, traffic, cap2, n=spec.n)
            component = build_component(kind, spec.n, x1)
            lit = flow_fair_shares(component, nc, m, traffic, "literal", cap2)
            gen = flow_fair_shares(component, nc, m, traffic, "generalized", cap2)
        except (UnsupportedConfiguration, TopologyError) as exc:
            width = len(MAXIMA_HEADER) - len(head) - 1 + (len(SHARE_EXTRA) if spec.shares else 0)
            rows.append(head + ("-",) * width + (f"unsupported: {exc}",))
            continue
        status = "extrapolated" if pt.extrapolated else "ok"
        row = head + (
            str(pt.p_star), _dec(pt.p_star), str(pt.s_max), _dec(pt.s_max),
            str(pt.s_sat), _dec(pt.s_sat),
            str(lit.s_edge), str(lit.s_center), str(gen.s_edge), str(gen.s_center),
        )
        if spec.shares:
            row += (_dec(lit.s_edge), _dec(lit.s_center), str(lit.normalization()),
                    _dec(gen.s_edge), _dec(gen.s_center), str(gen.slot_sum()))
        rows.append(row + (status,))
    return rows


def cmd_maxima(spec: ExperimentSpec) -> int:
    spec.validate(check_component=False)
    header = MAXIMA_HEADER[:-1] + (SHARE_EXTRA if spec.shares else ()) + MAXIMA_HEADER[-1:]
    _write_rows(spec.out, header, maxima_rows(spec))
    return 0


def _figure_mac(name, spec):
    if name.endswith("nodefair"):
        return MacPolicy()
    policy = MacPolicy.parse(spec.mac)
    return policy if policy.kind == FLOW_FAIR else MacPolicy.parse("flow-fair-generalized")


def gain_rows(kind, traffic, n=5):
    rows = []
    for m in GAIN_MS:
        gains = gain_decomposition(kind, m, traffic, n=n)
        for series, value in gains.items():
            rows.append((series, m, str(value), _dec(value)))
    return rows


def cmd_figure(name: str, spec: ExperimentSpec, topology_given=False) -> int:
    if name not in FIGURES:
        raise SpecError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    if spec.out is None:
        spec.out = f"{name}.csv"
    if name == "gain-vs-m":
        spec.validate()
        kind = spec.topology if topology_given else "x"
        rows = gain_rows(kind, spec.traffic, spec.n)
        header = ("series", "m", "value", "decimal")
        _write_rows(spec.out, header, rows)
        png, script = _companions(spec, name)
        if png is not None:
            from .plotting import render_gain

            render_gain([dict(zip(header, r)) for r in rows], png,
                        f"{kind} component, {spec.traffic}")
        if script:
            _emit_plot_script(script, spec.out, png, gain=True)
        return 0

    spec.validate(need_seed=True)
    kind = name.split("-")[0]
    mac = _figure_mac(name, spec)
    grid = parse_grid(spec.p)
    rows, stars = [], {}
    for series, nc, m in CURVE_SERIES:
        config = spec.sim_config(kind=kind, x1=spec.x1 if kind == "x" else None, nc=nc,
                                 mpr=MprConfig(m, spec.cap2), mac=mac)
        rows += _curve_rows(config, grid, spec.workers, series)
        point = _star(config)
        if point:
            stars[series] = point
    header = ("series",) + SWEEP_HEADER
    _write_rows(spec.out, header, rows)
    png, script = _companions(spec, name)
    if png is not None:
        from .plotting import render_curves

        render_curves([dict(zip(header, r)) for r in rows], png, f"{kind} component, {mac.name}",
                      stars)
    if script:
        _emit_plot_script(script, spec.out, png)
    return 0


# --- argument parsing -----------------------------------------------------------

def _add_common(parser):
    g = parser.add_argument_group("experiment")
    g.add_argument("--config", metavar="PATH", help="flat key=value file; flags override it")
    g.add_argument("--topology", choices=("cross", "x"))
    g.add_argument("--n", type=int, help="nodes including the center (default 5)")
    g.add_argument("--x1", type=int, help="size of the first edge set of an X component")
    g.add_argument("--nc", action=argparse.BooleanOptionalAction, default=None,
                   help="XOR coding at the center")
    g.add_argument("--mpr", type=int, metavar="M", help="multi-packet reception order (default 1)")
    g.add_argument("--cap2", action=argparse.BooleanOptionalAction, default=None,
                   help="schedule at most two edge transmitters per slot")
    g.add_argument("--mac", choices=MAC_CHOICES)
    g.add_argument("--traffic", choices=TRAFFIC_TYPES)
    r = parser.add_argument_group("run")
    r.add_argument("--p", metavar="START:STEP:END", help="offered-load grid (default 0.05:0.05:3)")
    r.add_argument("--iters", type=int, help="Monte Carlo iterations per load (default 1000)")
    r.add_argument("--seed", type=int, help="master seed (required for simulations)")
    r.add_argument("--g", type=int, help="load granularity G (default 100)")
    r.add_argument("--horizon", type=int, help="slots per run (default G)")
    r.add_argument("--workers", type=int, help="worker processes (default 1)")
    o = parser.add_argument_group("output")
    o.add_argument("--out", metavar="PATH", help="CSV output (default stdout; figures: NAME.csv)")
    o.add_argument("--trace", metavar="PATH", help="per-slot trace of the first iteration")
    o.add_argument("--plot-script", dest="plot_script", metavar="PATH",
                   help="write a standalone matplotlib script for the CSV")
    o.add_argument("--render", action=argparse.BooleanOptionalAction, default=None,
                   help="render a PNG next to the CSV (default on)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copesat",
        description="Throughput of coded, multi-packet-reception relay components.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo throughput vs offered load")
    _add_common(p)

    p = sub.add_parser("maxima", help="analytic maxima and flow-fair shares")
    _add_common(p)
    p.add_argument("--shares", action=argparse.BooleanOptionalAction, default=None,
                   help="add share decimals and normalization checks")
    p.add_argument("--all", action=argparse.BooleanOptionalAction, default=None,
                   help="tabulate every kind/coding/m/traffic combination")

    p = sub.add_parser("figure", help="preset families of curves")
    p.add_argument("name", choices=FIGURES)
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = build_spec(args)
        if args.command == "sweep":
            return cmd_sweep(spec)
        if args.command == "maxima":
            return cmd_maxima(spec)
        return cmd_figure(args.name, spec, topology_given=args.topology is not None
                          or "topology" in (read_config(args.config) if args.config else {}))
    except (SpecError, UnsupportedConfiguration, TopologyError, ValueError) as exc:
        print(f"copesat: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"copesat: error: {exc}", file=sys.stderr)
        return 1
