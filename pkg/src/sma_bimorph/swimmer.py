"""Planar quasi-steady locomotion model of the tail-flapping swimmer.

The swimmer rides the water surface on support pads; motion is restricted
to the plane.  Thrust scales with the square of tail angular speed,
opposed by a quadratic-plus-linear longitudinal drag.  The rigid head
carries a much larger lateral drag product than the tail, modeled as a
yaw damping that anchors the heading while the tail flaps: symmetric
flapping produces no net turn, one-sided (unimorph) flapping does.

No attempt is made to resolve the fluid: vortex shedding and added-mass
memory are out of scope, the model only reproduces the force-balance
arithmetic and the monotone speed trends.
"""

import math
from dataclasses import dataclass, replace

from .errors import NumericError, ParameterError


@dataclass(frozen=True)
class SwimmerParams:
    """Body constants and lumped hydrodynamic products.

    The *_cda products are drag-coefficient times reference-area, m^2;
    water density is folded in at use.  thrust_coeff maps squared tail
    angular speed to mean thrust, N s^2/rad^2.
    """

    body_length: float = 34e-3          # m
    mass: float = 30e-6                 # kg
    head_lateral_cda: float = 2e-4      # m^2, must dominate the tail product
    tail_lateral_cda: float = 2e-5      # m^2
    thrust_coeff: float = 1.4e-8        # N s^2 / rad^2
    longitudinal_cda: float = 1e-4      # m^2
    linear_drag: float = 1e-5           # N s / m
    rho: float = 998.0                  # kg / m^3
    nu: float = 1.0e-6                  # m^2 / s
    duty_cycle: float = 0.12            # drive DC used over water
    tail_gain: float = 200.0            # rad of tail angle per m of tip travel
    tail_lever: float = 13e-3           # m, tail hydrodynamic lever
    head_lever: float = 12e-3           # m, head hydrodynamic lever
    yaw_ref_speed: float = 0.1          # m/s, linearization speed for yaw damping

    def __post_init__(self):
        for name in ("body_length", "mass", "head_lateral_cda", "tail_lateral_cda",
                     "thrust_coeff", "longitudinal_cda", "rho", "nu",
                     "tail_gain", "tail_lever", "head_lever", "yaw_ref_speed"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.linear_drag < 0:
            raise ParameterError(f"linear_drag must be >= 0, got {self.linear_drag}")
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ParameterError(f"duty_cycle must be in [0, 1], got {self.duty_cycle}")
        if self.head_lateral_cda <= self.tail_lateral_cda:
            raise ParameterError(
                "head lateral drag product must exceed the tail product "
                f"({self.head_lateral_cda} <= {self.tail_lateral_cda})")

    @property
    def yaw_damping(self):
        """N m s / rad, proportional to the head lateral drag product."""
        return 0.5 * self.rho * self.head_lateral_cda * self.head_lever ** 2 \
            * self.yaw_ref_speed


@dataclass(frozen=True)
class SwimmerState:
    x: float = 0.0           # m
    y: float = 0.0           # m
    psi: float = 0.0         # rad, heading
    v: float = 0.0           # m/s, forward speed
    tail_angle: float = 0.0  # rad


def _drag(v, params):
    return 0.5 * params.rho * params.longitudinal_cda * v * v + params.linear_drag * v


def steady_speed(frequency: float, amplitude: float, params: SwimmerParams) -> float:
    """Forward speed where mean thrust k (a 2 pi f)^2 balances drag.

    Closed form when one drag term is absent, bisection otherwise.
    """
    if frequency < 0 or amplitude < 0:
        raise ParameterError("frequency and amplitude must be >= 0")
    thrust = params.thrust_coeff * (amplitude * 2.0 * math.pi * frequency) ** 2
    if thrust == 0.0:
        return 0.0
    quad = 0.5 * params.rho * params.longitudinal_cda
    if params.linear_drag == 0.0:
        return math.sqrt(thrust / quad)
    if params.longitudinal_cda == 0.0:
        return thrust / params.linear_drag
    lo = 0.0
    hi = math.sqrt(thrust / quad) + thrust / params.linear_drag
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if _drag(mid, params) < thrust:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_thrust_coefficient(frequency: float, amplitude: float, target_speed: float,
                           params: SwimmerParams) -> SwimmerParams:
    """Thrust coefficient that makes steady_speed hit target_speed exactly."""
    if frequency <= 0 or amplitude <= 0 or target_speed <= 0:
        raise ParameterError("frequency, amplitude and target_speed must be > 0")
    k = _drag(target_speed, params) / (amplitude * 2.0 * math.pi * frequency) ** 2
    return replace(params, thrust_coeff=k)


def step_swimmer(state: SwimmerState, tail_command: float, params: SwimmerParams,
                 dt: float) -> SwimmerState:
    """Advance the planar pose one step under a commanded tail angle.

    Thrust uses the instantaneous squared tail rate (factor 2 so its mean
    over a sinusoid matches the steady_speed form); yaw reacts to the
    tail's lateral drag moment and to thrust-vector deflection, both odd
    in the tail motion, damped by the head's lateral drag.
    """
    if not 0.0 < dt <= 1e-3:
        raise ParameterError(f"dt must be in (0, 1 ms], got {dt}")
    tail_rate = (tail_command - state.tail_angle) / dt
    thrust = 2.0 * params.thrust_coeff * tail_rate * tail_rate
    accel = (thrust - _drag(state.v, params)) / params.mass
    v = state.v + dt * accel
    if v < 0.0:
        v = 0.0

    # lateral tail speed taken at the area centroid, half the tip lever
    centroid = 0.5 * params.tail_lever
    m_flap = 0.5 * params.rho * params.tail_lateral_cda * centroid ** 2 \
        * params.tail_lever * tail_rate * abs(tail_rate)
    m_steer = -thrust * math.sin(tail_command) * params.tail_lever
    psi_rate = (m_flap + m_steer) / params.yaw_damping

    psi = state.psi + dt * psi_rate
    x = state.x + dt * v * math.cos(state.psi)
    y = state.y + dt * v * math.sin(state.psi)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(psi) and math.isfinite(v)):
        raise NumericError("swimmer state became non-finite")
    return SwimmerState(x=x, y=y, psi=psi, v=v, tail_angle=tail_command)


def run_swimmer(tail_commands, params: SwimmerParams, dt: float,
                state: SwimmerState | None = None):
    """Step through a tail-angle command trace; returns the state history."""
    if state is None:
        state = SwimmerState()
    history = [state]
    for command in tail_commands:
        state = step_swimmer(state, float(command), params, dt)
        history.append(state)
    return history


def reynolds(v: float, length: float, nu: float) -> float:
    """Reynolds number v L / nu."""
    if nu <= 0:
        raise ParameterError(f"nu must be > 0, got {nu}")
    return v * length / nu


def body_lengths_per_second(v: float, body_length: float) -> float:
    """Speed normalized by body length."""
    if body_length <= 0:
        raise ParameterError(f"body_length must be > 0, got {body_length}")
    return v / body_length
