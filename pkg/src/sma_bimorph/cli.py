"""Command-line front end: reproduce every figure-level artifact as CSV.

Commands
    simulate   tip-displacement trace of the configured drive
    sweep      AMADO over the frequency x duty-cycle grid
    power      instantaneous/average electrical power of the drive
    calibrate  fit free parameters to the configured AMADO targets
    swim       swimmer trajectory and speed-vs-frequency scan

Exit codes: 0 success, 2 configuration error, 3 numeric/solver error.
All outputs are deterministic functions of the config text and command;
--threads only changes wall time.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import swimmer as swim_mod
from .calibration import calibrate
from .config import ScenarioConfig, parse_config
from .csvio import (POWER_SCHEMA, SPEED_SCAN_SCHEMA, SWEEP_SCHEMA, TRACE_SCHEMA,
                    TRAJECTORY_SCHEMA, write_csv)
from .drive import PwmConfig, average_power, make_pwm_pair
from .errors import ConfigError, SimulationError
from .mechanics import run_mode_trace
from .metrology import FirSpec, compute_amado, design_fir, filter_zero_phase, run_sweep
from .sma import Environment


def _fir(cfg: ScenarioConfig) -> FirSpec:
    return FirSpec(order=cfg.fir_order, cutoff=cfg.fir_cutoff, fs=cfg.pwm.sample_rate)


def cmd_simulate(cfg: ScenarioConfig, out_dir: Path, threads: int) -> list[Path]:
    trace = run_mode_trace(cfg.pwm, cfg.circuit, cfg.props, cfg.env, cfg.geom,
                           cfg.duration)
    filtered = filter_zero_phase(design_fir(_fir(cfg)), trace.delta)
    rows = zip(trace.t, trace.delta * 1e3, filtered * 1e3)
    return [write_csv(out_dir / f"{cfg.scenario}_trace.csv", TRACE_SCHEMA, rows)]


def cmd_sweep(cfg: ScenarioConfig, out_dir: Path, threads: int) -> list[Path]:
    table = run_sweep(cfg.sweep_frequencies, cfg.sweep_duty_cycles, cfg.circuit,
                      cfg.props, cfg.env, cfg.geom, run_length=cfg.run_length,
                      steady_window=cfg.steady_window, fir=_fir(cfg),
                      sample_rate=cfg.pwm.sample_rate, threads=threads)
    for (f, dc), message in sorted(table.errors.items()):
        print(f"sweep cell (f={f:g} Hz, DC={dc:g}) failed: {message}", file=sys.stderr)
    rows = [(r.frequency, r.duty_cycle * 100.0, r.amado, r.std, r.normalized)
            for r in table.rows]
    for (f, dc) in sorted(table.errors):
        rows.append((f, dc * 100.0, math.nan, math.nan, math.nan))
    rows.sort(key=lambda row: (row[0], row[1]))
    return [write_csv(out_dir / f"{cfg.scenario}_sweep.csv", SWEEP_SCHEMA, rows)]


def cmd_power(cfg: ScenarioConfig, out_dir: Path, threads: int) -> list[Path]:
    trace = make_pwm_pair(cfg.pwm, cfg.circuit, cfg.duration)
    power = average_power(trace, cfg.circuit)
    print(f"peak p_a = {power.p_a.max():.6f} W, average p_a = {power.p_bar:.6f} W")
    rows = zip(trace.t, trace.v_t, trace.v_b, trace.i_t, trace.i_b, power.p_a)
    return [write_csv(out_dir / f"{cfg.scenario}_power.csv", POWER_SCHEMA, rows)]


def cmd_calibrate(cfg: ScenarioConfig, out_dir: Path, threads: int) -> list[Path]:
    result = calibrate(cfg.calibration, cfg.circuit, cfg.props, cfg.env, cfg.geom)
    lines = [f"scenario: {cfg.scenario}",
             f"converged: {'yes' if result.converged else 'no (budget exhausted)'}",
             f"evaluations: {result.evaluations}",
             f"loss: {result.loss!r}",
             "fitted parameters:"]
    for name in cfg.calibration.free:
        lines.append(f"  {name} = {result.parameters[name]!r}")
    lines.append("per-target relative residuals:")
    for (f, dc, target), residual in zip(cfg.calibration.targets, result.residuals):
        lines.append(f"  f={f:g} Hz, DC={dc * 100:g}%: target {target:g} mm, "
                     f"residual {residual:+.6f}")
    report = out_dir / f"{cfg.scenario}_calibration.txt"
    report.parent.mkdir(parents=True, exist_ok=True)
    report.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    return [report]


def cmd_swim(cfg: ScenarioConfig, out_dir: Path, threads: int) -> list[Path]:
    water_env = Environment(t_amb=cfg.env.t_amb,
                            convection_multiplier=cfg.swim_convection_multiplier)
    fir = _fir(cfg)

    def tail_amplitude(frequency):
        pwm = PwmConfig(frequency=frequency, duty_cycle=cfg.swimmer.duty_cycle,
                        on_height=cfg.pwm.on_height, phase_shift=cfg.pwm.phase_shift,
                        mode="bimorph", sample_rate=cfg.pwm.sample_rate)
        trace = run_mode_trace(pwm, cfg.circuit, cfg.props, water_env, cfg.geom,
                               cfg.run_length)
        res = compute_amado(trace.delta, frequency, cfg.run_length, cfg.steady_window,
                            fs=cfg.pwm.sample_rate, fir=fir)
        return cfg.swimmer.tail_gain * (res.amado * 1e-3) / 2.0

    # trajectory at the configured drive frequency; the soft tail transmits
    # only the fundamental of the actuator motion, so the swimmer is driven
    # sinusoidally at the amplitude taken from the displacement trace
    amp = tail_amplitude(cfg.swim_drive_frequency)
    dt = 1.0 / cfg.pwm.sample_rate
    n = int(round(cfg.steady_window * cfg.pwm.sample_rate))
    t = np.arange(n) * dt
    tail = amp * np.sin(2.0 * np.pi * cfg.swim_drive_frequency * t)
    history = swim_mod.run_swimmer(tail, cfg.swimmer, dt)[1:]
    rows = ((k * dt, st.x * 1e3, st.y * 1e3, math.degrees(st.psi), st.v * 1e3)
            for k, st in enumerate(history))
    paths = [write_csv(out_dir / f"{cfg.scenario}_trajectory.csv", TRAJECTORY_SCHEMA, rows)]

    # scan at the fixed trajectory amplitude: the measured best operating
    # band (3 to 4 Hz) is compared at one tail stroke, and the quadratic
    # thrust law then gives speed rising with frequency
    scan_rows = []
    for f in cfg.swim_scan_frequencies:
        v = swim_mod.steady_speed(f, amp, cfg.swimmer)
        scan_rows.append((f, v * 1e3))
    paths.append(write_csv(out_dir / f"{cfg.scenario}_speed_scan.csv",
                           SPEED_SCAN_SCHEMA, scan_rows))
    return paths


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "power": cmd_power,
    "calibrate": cmd_calibrate,
    "swim": cmd_swim,
}


def run_scenario(cfg: ScenarioConfig, command: str, out_dir=None, threads: int = 1):
    """Execute one subcommand; returns the list of written artifact paths."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {sorted(COMMANDS)}")
    target = Path(out_dir) if out_dir is not None else Path(cfg.out_dir)
    return COMMANDS[command](cfg, target, max(1, threads))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bimorph",
        description="SMA bimorph actuator / microswimmer simulation toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None,
                        help="YAML scenario file (defaults reproduce the "
                             "characterization protocol)")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default: run.out_dir from the config)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for sweep cells; affects wall time only")
    args = parser.parse_args(argv)

    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for warning in cfg.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    try:
        paths = run_scenario(cfg, args.command, out_dir=args.out, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
