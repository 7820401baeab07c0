"""Scenario configuration: strict YAML ingestion with full defaults.

The file is a two-level mapping, section -> key -> value.  Unknown
sections or keys are rejected with the offending key path; every value is
type-checked and the module invariants run before any simulation starts.
An empty file (or empty string) yields the characterization protocol the
hardware used: 2 kHz sampling, 15 V supply / 250 mA on-state, 30 s runs
with a 15 s steady window, the published frequency and duty-cycle grid.
"""

import math
from dataclasses import dataclass, field

import yaml

from .calibration import FREE_PARAMETERS, CalibrationProblem
from .drive import CircuitParams, PwmConfig
from .errors import ConfigError, ParameterError
from .mechanics import ActuatorGeometry
from .sma import Environment, WireProperties
from .swimmer import SwimmerParams

_NUMBER = (int, float)


def _schema():
    """section -> key -> (expected type tag, default)."""
    return {
        "drive": {
            "frequency_hz": ("number", 1.0),
            "duty_cycle_pct": ("number", 10.0),
            "on_height_v": ("number", 15.0),
            "phase_shift": ("number", 0.5),
            "mode": ("string", "bimorph"),
            "sample_rate_hz": ("number", 2000.0),
            "duration_s": ("number", 30.0),
            "r_a_ohm": ("number", 4.45),
            "i_limit_a": ("number", 0.250),
            "i_on_a": ("number", 0.250),
        },
        "sma": {
            "diameter_m": ("number", 38.1e-6),
            "active_length_m": ("number", 12.4e-3),
            "parallel_strands": ("integer", 2),
            "density_kg_m3": ("number", 6450.0),
            "specific_heat_j_kg_k": ("number", 500.0),
            "convection_w_m2_k": ("number", 150.0),
            "m_f_k": ("number", 313.15),
            "m_s_k": ("number", 333.15),
            "a_s_k": ("number", 343.15),
            "a_f_k": ("number", 363.15),
            "stress_coeff_m_pa_k": ("number", 7.0e6),
            "stress_coeff_a_pa_k": ("number", 7.0e6),
            "modulus_austenite_pa": ("number", 75.0e9),
            "modulus_martensite_pa": ("number", 28.0e9),
            "max_recoverable_strain": ("number", 0.04),
            "resistivity_ohm_m": ("number", 8.2e-7),
            "pre_strain": ("number", 4.0e-4),
            "latent_heat_j_kg": ("number", 0.0),
        },
        "environment": {
            "ambient_k": ("number", 293.15),
            "convection_multiplier": ("number", 1.0),
        },
        "geometry": {
            "length_m": ("number", 14e-3),
            "wire_angle_deg": ("number", 3.0),
            "moment_arm_m": ("number", 1.6e-3),
            "beam_stiffness_nm_rad": ("number", 8e-3),
            "tip_gain_m_rad": ("number", 17e-3),
            "mass_kg": ("number", 10e-6),
            "volume_m3": ("number", 4.8e-9),
            "mount_offset_m": ("number", 5e-3),
            "beam_radius_m": ("number", 7.5e-5),
            "anchor_standoff_m": ("number", 1e-4),
        },
        "metrology": {
            "fir_order": ("integer", 1000),
            "fir_cutoff_hz": ("number", 100.0),
            "run_s": ("number", 30.0),
            "steady_window_s": ("number", 15.0),
            "frequencies_hz": ("number_list", [1.0, 5.0, 10.0, 15.0, 20.0]),
            "duty_cycles_pct": ("number_list", [float(d) for d in range(1, 11)]),
        },
        "swimmer": {
            "body_length_m": ("number", 34e-3),
            "mass_kg": ("number", 30e-6),
            "head_lateral_cda_m2": ("number", 2e-4),
            "tail_lateral_cda_m2": ("number", 2e-5),
            "thrust_coeff": ("number", 1.4e-8),
            "longitudinal_cda_m2": ("number", 1e-4),
            "linear_drag_n_s_m": ("number", 1e-5),
            "water_density_kg_m3": ("number", 998.0),
            "kinematic_viscosity_m2_s": ("number", 1.0e-6),
            "duty_cycle": ("number", 0.12),
            "tail_gain_rad_m": ("number", 200.0),
            "tail_lever_m": ("number", 13e-3),
            "head_lever_m": ("number", 12e-3),
            "yaw_ref_speed_m_s": ("number", 0.1),
            "drive_frequency_hz": ("number", 3.0),
            "water_convection_multiplier": ("number", 1.5),
            "scan_frequencies_hz": ("number_list", [1.0, 2.0, 3.0, 4.0]),
        },
        "calibration": {
            "free_parameters": ("string_list", ["g_tip", "h", "k_beam"]),
            "targets": ("target_list", [[1.0, 10.0, 7.08]]),
            "budget": ("integer", 150),
            "bounds": ("bounds_map", {}),
            "run_s": ("number", 30.0),
            "steady_window_s": ("number", 15.0),
        },
        "run": {
            "scenario": ("string", "default"),
            "out_dir": ("string", "out"),
        },
    }


def _check_type(path, tag, value):
    if tag == "number":
        if isinstance(value, bool) or not isinstance(value, _NUMBER):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if tag == "integer":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if tag == "string":
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if tag == "number_list":
        if not isinstance(value, list) or not value or any(
                isinstance(v, bool) or not isinstance(v, _NUMBER) for v in value):
            raise ConfigError(f"{path}: expected a non-empty list of numbers, got {value!r}")
        return [float(v) for v in value]
    if tag == "string_list":
        if not isinstance(value, list) or not value or any(
                not isinstance(v, str) for v in value):
            raise ConfigError(f"{path}: expected a non-empty list of strings, got {value!r}")
        return list(value)
    if tag == "target_list":
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{path}: expected a non-empty list of targets, got {value!r}")
        out = []
        for i, item in enumerate(value):
            if not isinstance(item, list) or len(item) != 3 or any(
                    isinstance(v, bool) or not isinstance(v, _NUMBER) for v in item):
                raise ConfigError(
                    f"{path}[{i}]: expected [frequency_hz, dc_pct, amado_mm], got {item!r}")
            out.append([float(v) for v in item])
        return out
    if tag == "bounds_map":
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping of parameter -> [lo, hi]")
        out = {}
        for name, pair in value.items():
            if name not in FREE_PARAMETERS:
                raise ConfigError(
                    f"{path}.{name}: unknown parameter; choose from {sorted(FREE_PARAMETERS)}")
            if not isinstance(pair, list) or len(pair) != 2 or any(
                    isinstance(v, bool) or not isinstance(v, _NUMBER) for v in pair):
                raise ConfigError(f"{path}.{name}: expected [lo, hi], got {pair!r}")
            out[name] = (float(pair[0]), float(pair[1]))
        return out
    raise AssertionError(f"unhandled schema tag {tag}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated configuration for every subcommand."""

    pwm: PwmConfig
    circuit: CircuitParams
    duration: float
    props: WireProperties
    env: Environment
    geom: ActuatorGeometry
    fir_order: int
    fir_cutoff: float
    run_length: float
    steady_window: float
    sweep_frequencies: tuple
    sweep_duty_cycles: tuple     # fractions
    swimmer: SwimmerParams
    swim_drive_frequency: float
    swim_convection_multiplier: float
    swim_scan_frequencies: tuple
    calibration: CalibrationProblem
    scenario: str
    out_dir: str
    warnings: tuple = field(default_factory=tuple)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate YAML config text; empty text gives all defaults."""
    try:
        raw = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"top level must be a mapping of sections, got {type(raw).__name__}")

    schema = _schema()
    values = {section: {key: default for key, (_, default) in keys.items()}
              for section, keys in schema.items()}
    for section, content in raw.items():
        if section not in schema:
            raise ConfigError(f"{section}: unknown section")
        if content is None:
            continue
        if not isinstance(content, dict):
            raise ConfigError(f"{section}: expected a mapping of keys")
        for key, value in content.items():
            if key not in schema[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
            tag = schema[section][key][0]
            values[section][key] = _check_type(f"{section}.{key}", tag, value)

    warnings = []
    d = values["drive"]
    s = values["sma"]
    e = values["environment"]
    g = values["geometry"]
    m = values["metrology"]
    w = values["swimmer"]
    c = values["calibration"]
    r = values["run"]

    def build(section, factory, **kwargs):
        try:
            return factory(**kwargs)
        except ParameterError as exc:
            raise ConfigError(f"{section}: {exc}") from exc

    pwm = build("drive", PwmConfig,
                frequency=d["frequency_hz"], duty_cycle=d["duty_cycle_pct"] / 100.0,
                on_height=d["on_height_v"], phase_shift=d["phase_shift"],
                mode=d["mode"], sample_rate=d["sample_rate_hz"])
    circuit = build("drive", CircuitParams,
                    r_a=d["r_a_ohm"], i_limit=d["i_limit_a"], i_on=d["i_on_a"])
    if d["duration_s"] <= 0:
        raise ConfigError(f"drive.duration_s: must be > 0, got {d['duration_s']}")

    props = build("sma", WireProperties,
                  diameter=s["diameter_m"], active_length=s["active_length_m"],
                  parallel_strands=s["parallel_strands"], density=s["density_kg_m3"],
                  specific_heat=s["specific_heat_j_kg_k"], h=s["convection_w_m2_k"],
                  m_f=s["m_f_k"], m_s=s["m_s_k"], a_s=s["a_s_k"], a_f=s["a_f_k"],
                  c_m=s["stress_coeff_m_pa_k"], c_a=s["stress_coeff_a_pa_k"],
                  e_a=s["modulus_austenite_pa"], e_m=s["modulus_martensite_pa"],
                  eps_l=s["max_recoverable_strain"], resistivity=s["resistivity_ohm_m"],
                  pre_strain=s["pre_strain"], latent_heat=s["latent_heat_j_kg"])
    env = build("environment", Environment,
                t_amb=e["ambient_k"], convection_multiplier=e["convection_multiplier"])
    geom = build("geometry", ActuatorGeometry,
                 length=g["length_m"], alpha=math.radians(g["wire_angle_deg"]),
                 r_m=g["moment_arm_m"], k_beam=g["beam_stiffness_nm_rad"],
                 g_tip=g["tip_gain_m_rad"], mass=g["mass_kg"], volume=g["volume_m3"],
                 mount_offset=g["mount_offset_m"], beam_radius=g["beam_radius_m"],
                 anchor_standoff=g["anchor_standoff_m"])

    if m["steady_window_s"] > m["run_s"]:
        raise ConfigError("metrology.steady_window_s: exceeds run_s")
    for key in ("fir_cutoff_hz",):
        if not 0.0 < m[key] < d["sample_rate_hz"] / 2.0:
            raise ConfigError(f"metrology.{key}: must be in (0, sample_rate/2)")
    if m["fir_order"] <= 0 or m["fir_order"] % 2 != 0:
        raise ConfigError(f"metrology.fir_order: must be a positive even integer")

    swimmer = build("swimmer", SwimmerParams,
                    body_length=w["body_length_m"], mass=w["mass_kg"],
                    head_lateral_cda=w["head_lateral_cda_m2"],
                    tail_lateral_cda=w["tail_lateral_cda_m2"],
                    thrust_coeff=w["thrust_coeff"],
                    longitudinal_cda=w["longitudinal_cda_m2"],
                    linear_drag=w["linear_drag_n_s_m"], rho=w["water_density_kg_m3"],
                    nu=w["kinematic_viscosity_m2_s"], duty_cycle=w["duty_cycle"],
                    tail_gain=w["tail_gain_rad_m"], tail_lever=w["tail_lever_m"],
                    head_lever=w["head_lever_m"], yaw_ref_speed=w["yaw_ref_speed_m_s"])
    if w["water_convection_multiplier"] < 1.0:
        raise ConfigError("swimmer.water_convection_multiplier: must be >= 1")

    try:
        calibration = CalibrationProblem(
            free=tuple(c["free_parameters"]),
            targets=tuple((t[0], t[1] / 100.0, t[2]) for t in c["targets"]),
            bounds=dict(c["bounds"]), budget=c["budget"],
            run_length=c["run_s"], steady_window=c["steady_window_s"])
    except ParameterError as exc:
        raise ConfigError(f"calibration: {exc}") from exc

    # characterization above 10% duty cycle in dry air risks a stuck actuation state
    if pwm.duty_cycle > 0.10 and env.convection_multiplier == 1.0:
        warnings.append(
            f"drive.duty_cycle_pct = {d['duty_cycle_pct']:g} exceeds 10% in dry air; "
            "the physical actuator can get stuck in one actuation state")

    return ScenarioConfig(
        pwm=pwm, circuit=circuit, duration=d["duration_s"], props=props, env=env,
        geom=geom, fir_order=m["fir_order"], fir_cutoff=m["fir_cutoff_hz"],
        run_length=m["run_s"], steady_window=m["steady_window_s"],
        sweep_frequencies=tuple(m["frequencies_hz"]),
        sweep_duty_cycles=tuple(dc / 100.0 for dc in m["duty_cycles_pct"]),
        swimmer=swimmer, swim_drive_frequency=w["drive_frequency_hz"],
        swim_convection_multiplier=w["water_convection_multiplier"],
        swim_scan_frequencies=tuple(w["scan_frequencies_hz"]),
        calibration=calibration, scenario=r["scenario"], out_dir=r["out_dir"],
        warnings=tuple(warnings))
