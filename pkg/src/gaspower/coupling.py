"""Gas-to-power link and the quasi-static co-simulation loop.

A gas-fired generator at the slack bus draws the volumetric gas flow

    heat_rate(P) = a0 + a1 P + a2 P^2      [m^3/s at reference density rho0]

for the slack real power P [p.u.]. Converted through rho0 / A (pipe
cross-section) this becomes the momentum-flux extraction applied at the
linked gas junction. Electric transients are fast compared to the gas
dynamics, so the power flow is re-solved once per gas time step with frozen
demand schedules, and the resulting extraction is held constant during the
step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, InvalidDemandError
from .ibox import ibox_step
from .network import GasSimulation, Junction
from .powerflow import PowerFlowSolution, PowerGrid, solve_newton
from .riemann import _JunctionProblem


@dataclass
class GasPowerLink:
    """Connection between a gas junction and the slack bus."""

    gas_node: str
    power_bus: str
    a0: float
    a1: float
    a2: float
    rho0: float            # reference density of the volumetric flow [kg/m^3]
    area: float            # cross-section of the junction pipes [m^2]

    def __post_init__(self):
        if self.rho0 <= 0.0 or self.area <= 0.0:
            raise ConfigError("link needs positive reference density and area")


def heat_rate(power: float, link: GasPowerLink) -> float:
    """Volumetric gas consumption of the generator at real power ``power``."""
    value = link.a0 + link.a1 * power + link.a2 * power * power
    if value < 0.0:
        raise ConfigError(
            f"heat rate {value:g} is negative at P={power:g}; "
            f"coefficients ({link.a0}, {link.a1}, {link.a2}) are inconsistent"
        )
    return value


@dataclass(frozen=True)
class DemandSchedule:
    """Piecewise-linear (P, Q) demand trajectory of one bus."""

    bus: str
    times: tuple[float, ...]
    p_values: tuple[float, ...]
    q_values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.p_values) or len(self.times) != len(self.q_values):
            raise ConfigError(f"schedule for {self.bus}: length mismatch")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigError(
                f"schedule for {self.bus}: breakpoints must strictly increase"
            )

    def at(self, t: float) -> tuple[float, float]:
        p = float(np.interp(t, self.times, self.p_values))
        q = float(np.interp(t, self.times, self.q_values))
        return p, q


class ExtractionHolder:
    """Constant-in-step extraction handle the co-simulation updates."""

    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def __call__(self, t: float) -> float:
        return self.value


def _link_junction(sim: GasSimulation, node: str) -> Junction:
    for junction in sim.junctions:
        if junction.node == node:
            return junction
    raise ConfigError(f"gas node {node!r} is not a junction of the network")


def link_max_extraction(sim: GasSimulation, junction: Junction) -> float:
    """Largest extraction the junction supports for the current end states."""
    ports_in = junction.incoming_ports()
    ports_out = junction.outgoing_ports()
    data_in = [sim.grids[p.pipe_index].end_state("end") for p in ports_in]
    data_out = [sim.grids[p.pipe_index].end_state("start") for p in ports_out]
    problem = _JunctionProblem(
        data_in, data_out, 0.0, sim.law,
        in_ratios=tuple(p.pressure_ratio for p in ports_in),
        out_ratios=tuple(p.pressure_ratio for p in ports_out),
    )
    return problem.max_extraction()


def cosim_step(sim: GasSimulation, grid: PowerGrid, link: GasPowerLink,
               schedules: list[DemandSchedule], t: float, dt: float,
               stepper=ibox_step,
               warm: PowerFlowSolution | None = None) -> PowerFlowSolution:
    """One coupled step: demands -> power flow -> extraction -> gas step.

    Returns the power-flow solution used during the step. Aborts with
    ``InvalidDemandError`` when the converted extraction exceeds what the
    linked junction can physically supply.
    """
    for schedule in schedules:
        bus = grid.buses[grid.index(schedule.bus)]
        bus.P, bus.Q = schedule.at(t)

    pf = solve_newton(grid, initial=warm if warm is not None else "flat")
    p_slack = float(pf.P[grid.slack_index])
    eps_q = heat_rate(p_slack, link) * link.rho0 / link.area

    junction = _link_junction(sim, link.gas_node)
    eps_cap = link_max_extraction(sim, junction)
    if eps_q >= eps_cap:
        raise InvalidDemandError(
            f"generator at {link.gas_node} needs extraction {eps_q:g} "
            f"but the junction supports at most {eps_cap:g} "
            f"(slack P = {p_slack:g} p.u. at t = {t:g})",
            epsilon_max=eps_cap,
        )
    holder = junction.extraction
    if not isinstance(holder, ExtractionHolder):
        holder = ExtractionHolder()
        junction.extraction = holder
    holder.value = eps_q

    stepper(sim, dt)
    return pf


def find_stationary_state(sim: GasSimulation, dt_start: float = 10.0,
                          dt_max: float = 1e5, growth: float = 2.0,
                          tol: float = 1e-10, max_steps: int = 400) -> None:
    """March the network to a steady state with growing implicit steps.

    Boundary data and extractions must be constant in time. Convergence is
    declared when the per-step state change rate ||dU||_inf / dt drops below
    ``tol``; the simulation clock is reset to zero afterwards.
    """
    dt = dt_start
    previous = sim.state_vector()
    for _ in range(max_steps):
        ibox_step(sim, dt)
        current = sim.state_vector()
        rate = float(np.max(np.abs(current - previous))) / dt
        previous = current
        if rate < tol:
            sim.t = 0.0
            return
        dt = min(dt * growth, dt_max)
    raise ConvergenceError(
        f"no stationary state within {max_steps} steps "
        f"(last rate {rate:.3e}, tol {tol:g})"
    )
