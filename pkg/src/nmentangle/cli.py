"""Command-line entry point: simulate, figure, sweep, verify."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, parse_config, parse_options
from .csvio import emit_csv
from .regimes import MODES, TIME_AXES, SweepSpec, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# panel presets: R value and time axis
PANELS = {
    "a": (100.0, "tau"),
    "b": (1.0, "tau"),
    "c": (0.01, "tau-prime"),
    "d": (0.001, "tau-prime"),
}
PANEL_Q_TAU = (0.0, 1.0, 5.0, 20.0)
# tau' = tau / Q^2 is undefined at Q = 0, so the rescaled panels swap it for Q = 10
PANEL_Q_TAU_PRIME = (1.0, 5.0, 10.0, 20.0)
PANEL_SAMPLES = 500
PANEL_T_MAX = 5.0


def _meta(spec: SweepSpec, **extra) -> dict:
    meta = {
        "version": __version__,
        "mode": spec.mode,
        "evolution_mode": {"exact-paper": "paper-literal", "exact-trace": "trace-conserving"}.get(spec.mode),
        "time_axis": spec.time_axis,
        "theta": spec.theta,
        "Q": list(spec.Q_values),
        "R": list(spec.R_values),
        "gamma_M": spec.gamma_M,
        "samples": len(spec.times),
        "t_max": spec.times[-1],
        "regime_thresholds": vars(spec.thresholds) | {"summary": spec.thresholds.describe()},
    }
    meta.update(extra)
    return meta


def _write_outputs(spec: SweepSpec, out: str | None, meta: dict) -> int:
    records = run_sweep(spec)
    if out is None:
        n = emit_csv(records, sys.stdout)
        sys.stdout.flush()
        print(f"# {meta['regime_thresholds']['summary']}", file=sys.stderr)
        return n
    path = Path(out)
    with open(path, "wb") as fh:
        n = emit_csv(records, fh)
    meta_path = path.with_name(path.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return n


def _config_from_args(args) -> RunConfig:
    if args.config:
        flags = [k for k in _SIM_KEYS if getattr(args, k) is not None]
        if flags:
            raise ConfigError("--config cannot be combined with parameter options: " + ", ".join(flags))
        return parse_config(Path(args.config).read_text(encoding="utf-8"))
    return parse_options({k if k != "lam" else "lambda": getattr(args, k) for k in _SIM_KEYS})


_SIM_KEYS = ("Q", "R", "J", "lam", "gamma_M", "theta", "mode", "time_axis", "t_max", "samples", "workers")


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    out = args.out or cfg.output
    spec = cfg.sweep_spec()
    _write_outputs(spec, out, _meta(spec, defaults_used=list(cfg.defaults_used)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    out = args.out or cfg.output
    spec = cfg.sweep_spec()
    _write_outputs(spec, out, _meta(spec, defaults_used=list(cfg.defaults_used), config=str(args.config)))
    return EXIT_OK


def panel_spec(panel: str) -> SweepSpec:
    R, axis = PANELS[panel]
    Qs = PANEL_Q_TAU if axis == "tau" else PANEL_Q_TAU_PRIME
    times = tuple(PANEL_T_MAX * i / (PANEL_SAMPLES - 1) for i in range(PANEL_SAMPLES))
    return SweepSpec(Q_values=Qs, R_values=(R,), times=times, theta=math.pi / 2, mode="figure", time_axis=axis)


def cmd_figure(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for panel in args.panel:
        spec = panel_spec(panel)
        t0 = time.perf_counter()
        path = outdir / f"panel_{panel}.csv"
        meta = _meta(spec, panel=panel, Q_note="preset choice of Q values; R and time axis define the panel")
        _write_outputs(spec, str(path), meta)
        print(f"panel {panel}: {path} ({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import render_report, run_all

    results = run_all()
    for r in results:
        print(r.line())
    report = render_report(results)
    if args.report:
        Path(args.report).write_text(report)
    else:
        adjudication = next(r for r in results if r.key == "C6")
        print("\n".join(adjudication.details))
    failed = [r.key for r in results if not r.passed]
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmentangle",
        description="Entanglement decay of two Heisenberg-coupled qubits in Lorentzian baths.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="concurrence series for one or more (Q, R) points")
    sim.add_argument("--config", help="key = value run file (excludes the parameter options)")
    sim.add_argument("--Q", help="J / lambda; comma-separated list allowed")
    sim.add_argument("--R", help="lambda / gamma_M; comma-separated list allowed")
    sim.add_argument("--J", help="coupling (with --lambda and --gamma-M)")
    sim.add_argument("--lambda", dest="lam", help="bath width")
    sim.add_argument("--gamma-M", dest="gamma_M", help="Markovian decay rate")
    sim.add_argument("--theta", help="initial-state angle in radians (default pi/2)")
    sim.add_argument("--mode", choices=MODES)
    sim.add_argument("--time-axis", dest="time_axis", choices=TIME_AXES)
    sim.add_argument("--t-max", dest="t_max", help="end of the time grid (default 5)")
    sim.add_argument("--samples", help="grid points (default 500)")
    sim.add_argument("--workers", help="threads for multi-point runs")
    sim.add_argument("--out", help="CSV path (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    fig = sub.add_parser("figure", help="write the preset panels as CSV")
    fig.add_argument("--panel", nargs="+", choices=sorted(PANELS), default=sorted(PANELS))
    fig.add_argument("--out", required=True, help="output directory")
    fig.set_defaults(func=cmd_figure)

    sw = sub.add_parser("sweep", help="run a Q x R sweep from a config file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", help="CSV path (default: config 'output' key, else stdout)")
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="run the cross-check suite")
    ver.add_argument("--report", help="write the full report here")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
