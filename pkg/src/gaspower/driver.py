"""Build runnable simulations from scenarios and drive them to completion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import (
    DemandSchedule,
    ExtractionHolder,
    GasPowerLink,
    cosim_step,
    find_stationary_state,
)
from .cweno import cweno3_step
from .errors import ConfigError, SchemaError
from .friction import FrictionModel
from .ibox import ibox_step
from .network import (
    BoundaryCondition,
    GasSimulation,
    Junction,
    JunctionPort,
    Pipe,
    PipeGrid,
)
from .output import ProfileOutput, TimeSeriesOutput
from .powerflow import Bus, PowerGrid, TransmissionLine, solve_newton
from .scenario import Scenario


def _series_function(value: tuple):
    """Turn a boundary value spec into a function of time."""
    if len(value) >= 1 and isinstance(value[0], tuple):
        times = np.array([t for t, _ in value])
        vals = np.array([v for _, v in value])
        return lambda t: float(np.interp(t, times, vals))
    v = float(value[0])
    return lambda t: v


def build_gas_simulation(scenario: Scenario, scheme: str | None = None,
                         ) -> GasSimulation:
    """Instantiate grids, junction topology and boundaries for a scenario."""
    scheme = scheme or scenario.numerics.scheme
    staggering = "cells" if scheme == "cweno3" else "nodes"

    grids = []
    for spec in scenario.pipes:
        pipe = Pipe(spec.id, spec.from_node, spec.to_node,
                    spec.length, spec.diameter, spec.roughness)
        if scenario.numerics.n_cells is not None:
            n = scenario.numerics.n_cells
        else:
            n = max(2, int(round(spec.length / scenario.numerics.dx)))
        grids.append(PipeGrid(pipe, n, scenario.law, staggering=staggering))

    for init in scenario.initial:
        for grid in grids:
            if grid.pipe.id == init.pipe:
                grid.fill(init.rho, init.q)
    if scenario.stationary_init:
        # Seed the steady-state march from the first pressure-type boundary.
        rho_seed = 1.0
        for bc in scenario.boundaries:
            if bc.kind == "pressure":
                rho_seed = scenario.law.rho_from_pressure(float(bc.value[0]))
                break
            if bc.kind == "density":
                rho_seed = float(bc.value[0])
                break
        for grid in grids:
            if scenario.initial and any(i.pipe == grid.pipe.id
                                        for i in scenario.initial):
                continue
            grid.fill(rho_seed, 0.0)

    ratio = {(c.node, c.pipe): c.ratio for c in scenario.compressors}

    # Every node with at least two pipe ends (or an extraction) is a junction.
    ends_at: dict[str, list[JunctionPort]] = {}
    for k, g in enumerate(grids):
        ends_at.setdefault(g.pipe.node_from, []).append(
            JunctionPort(k, "start", ratio.get((g.pipe.node_from, g.pipe.id), 1.0))
        )
        ends_at.setdefault(g.pipe.node_to, []).append(
            JunctionPort(k, "end", ratio.get((g.pipe.node_to, g.pipe.id), 1.0))
        )
    extraction_nodes = {e.node: e.epsilon for e in scenario.extractions}
    if scenario.coupling is not None:
        extraction_nodes.setdefault(scenario.coupling.gas_node, 0.0)

    junctions = []
    boundary_nodes = {b.node for b in scenario.boundaries}
    for node, ports in sorted(ends_at.items()):
        if node in boundary_nodes:
            if len(ports) > 1:
                raise SchemaError(
                    f"node {node}: boundary conditions only apply to nodes "
                    f"with a single pipe end"
                )
            continue
        if len(ports) >= 2 or node in extraction_nodes:
            holder = ExtractionHolder(extraction_nodes.get(node, 0.0))
            junctions.append(Junction(node, ports, extraction=holder))
        else:
            raise SchemaError(f"node {node}: dangling pipe end without boundary")

    boundaries = {}
    for bc in scenario.boundaries:
        ports = ends_at[bc.node]
        port = ports[0]
        if bc.kind == "state":
            rho0, q0 = bc.value
            condition = BoundaryCondition("state", lambda t, s=(rho0, q0): s)
        else:
            condition = BoundaryCondition(bc.kind, _series_function(bc.value))
        boundaries[(port.pipe_index, port.end)] = condition

    return GasSimulation(
        grids=grids,
        junctions=junctions,
        boundaries=boundaries,
        friction=FrictionModel(eta=scenario.friction.eta,
                               enabled=scenario.friction.enabled),
    )


def build_power_grid(scenario: Scenario) -> PowerGrid:
    if not scenario.buses:
        raise SchemaError("scenario has no power grid")
    buses = [
        Bus(id=b.id, kind=b.type, P=b.P, Q=b.Q, V=b.V,
            phi=b.phi if b.phi is not None else 0.0, G=b.G, B=b.B)
        for b in scenario.buses
    ]
    lines = [TransmissionLine(l.from_bus, l.to_bus, l.G, l.B)
             for l in scenario.lines]
    return PowerGrid(buses, lines)


def build_link(scenario: Scenario, sim: GasSimulation) -> GasPowerLink:
    c = scenario.coupling
    if c is None:
        raise SchemaError("scenario has no coupling section")
    area = None
    for junction in sim.junctions:
        if junction.node == c.gas_node:
            area = sim.grids[junction.ports[0].pipe_index].pipe.area
    if area is None:
        raise ConfigError(f"coupling node {c.gas_node!r} is not a junction")
    return GasPowerLink(gas_node=c.gas_node, power_bus=c.power_bus,
                        a0=c.a0, a1=c.a1, a2=c.a2, rho0=c.rho0, area=area)


class _ProbeSet:
    """Resolve 'kind@where' quantity ids against the simulation objects."""

    def __init__(self, scenario: Scenario, sim: GasSimulation,
                 grid: PowerGrid | None, link: GasPowerLink | None):
        self.sim = sim
        self.grid = grid
        self.link = link
        self.series = [TimeSeriesOutput(q) for q in scenario.outputs.series]
        self._gas_port: dict[str, tuple[int, str]] = {}
        for junction in sim.junctions:
            port = junction.ports[0]
            self._gas_port[junction.node] = (port.pipe_index, port.end)
        for (pipe_index, end) in sim.boundaries:
            g = sim.grids[pipe_index]
            node = g.pipe.node_from if end == "start" else g.pipe.node_to
            self._gas_port[node] = (pipe_index, end)
        self._last_pf = None
        self._last_eps = {j.node: j.extraction_at(0.0) for j in sim.junctions}

    def update_power(self, pf) -> None:
        self._last_pf = pf

    def sample(self, t: float) -> None:
        for out in self.series:
            out.append(t, self._evaluate(out.quantity))

    def _evaluate(self, quantity: str) -> float:
        if "@" not in quantity:
            raise SchemaError(f"output quantity {quantity!r} is not kind@where")
        kind, where = quantity.split("@", 1)
        if kind in ("pressure", "rho", "q", "inflow"):
            if where not in self._gas_port:
                raise SchemaError(f"no gas node {where!r} for probe {quantity!r}")
            pipe_index, end = self._gas_port[where]
            grid = self.sim.grids[pipe_index]
            state = grid.end_state(end)
            if kind == "pressure":
                return float(self.sim.law.p(state.rho))
            if kind == "rho":
                return state.rho
            return state.q
        if kind == "epsilon":
            for junction in self.sim.junctions:
                if junction.node == where:
                    return junction.extraction_at(self.sim.t)
            raise SchemaError(f"no junction {where!r} for probe {quantity!r}")
        if kind in ("P", "Q", "V", "phi"):
            if self.grid is None or self._last_pf is None:
                raise SchemaError(f"probe {quantity!r} needs a power grid")
            if where == "slack":
                k = self.grid.slack_index
            else:
                k = self.grid.index(where)
            return float(getattr(self._last_pf, kind)[k])
        raise SchemaError(f"unknown probe kind {kind!r} in {quantity!r}")


@dataclass
class RunResult:
    series: list[TimeSeriesOutput]
    profiles: list[ProfileOutput]
    sim: GasSimulation
    power_history: list | None = None

    @property
    def outputs(self):
        return list(self.series) + list(self.profiles)


def _profile_due(scenario: Scenario, t: float, dt: float):
    for p in scenario.outputs.profiles:
        if abs(t - p.time) <= 0.5 * dt * (1.0 + 1e-9):
            yield p


def _take_profiles(scenario: Scenario, sim: GasSimulation, t: float,
                   dt: float, collected: list, seen: set) -> None:
    for spec in _profile_due(scenario, t, dt):
        key = (spec.time, spec.pipe)
        if key in seen:
            continue
        seen.add(key)
        for grid in sim.grids:
            if spec.pipe is not None and grid.pipe.id != spec.pipe:
                continue
            collected.append(ProfileOutput(
                quantity=f"rho@{grid.pipe.id}:t={spec.time:g}",
                x=grid.x.copy(), rho=grid.rho.copy(),
            ))


def run_gas_simulation(scenario: Scenario) -> RunResult:
    """Gas-only run of a scenario with the configured scheme."""
    sim = build_gas_simulation(scenario)
    stepper = cweno3_step if scenario.numerics.scheme == "cweno3" else ibox_step
    if scenario.stationary_init:
        find_stationary_state(sim)
    dt = scenario.numerics.dt
    n_steps = int(round(scenario.numerics.t_end / dt))
    every = max(1, int(round((scenario.numerics.sample_every or dt) / dt)))

    probes = _ProbeSet(scenario, sim, None, None)
    profiles: list[ProfileOutput] = []
    seen: set = set()
    probes.sample(0.0)
    _take_profiles(scenario, sim, 0.0, dt, profiles, seen)
    for k in range(n_steps):
        stepper(sim, dt)
        if (k + 1) % every == 0 or k + 1 == n_steps:
            probes.sample(sim.t)
        _take_profiles(scenario, sim, sim.t, dt, profiles, seen)
    return RunResult(series=probes.series, profiles=profiles, sim=sim)


def run_powerflow(scenario: Scenario):
    grid = build_power_grid(scenario)
    return solve_newton(grid)


def run_cosim(scenario: Scenario) -> RunResult:
    """Coupled gas/power run: stationary gas start, scheduled demands."""
    sim = build_gas_simulation(scenario)
    grid = build_power_grid(scenario)
    link = build_link(scenario, sim)
    schedules = [DemandSchedule(s.bus, s.times, s.P, s.Q)
                 for s in scenario.schedules]
    stepper = cweno3_step if scenario.numerics.scheme == "cweno3" else ibox_step

    # Initial condition: power flow at t=0 fixes the extraction, then the gas
    # network is relaxed to the matching steady state.
    for schedule in schedules:
        bus = grid.buses[grid.index(schedule.bus)]
        bus.P, bus.Q = schedule.at(0.0)
    pf = solve_newton(grid)
    from .coupling import heat_rate  # local import avoids a cycle at module load

    junction = next(j for j in sim.junctions if j.node == link.gas_node)
    holder = junction.extraction
    holder.value = heat_rate(float(pf.P[grid.slack_index]), link) \
        * link.rho0 / link.area
    if scenario.stationary_init:
        find_stationary_state(sim)

    dt = scenario.numerics.dt
    n_steps = int(round(scenario.numerics.t_end / dt))
    every = max(1, int(round((scenario.numerics.sample_every or dt) / dt)))

    probes = _ProbeSet(scenario, sim, grid, link)
    probes.update_power(pf)
    profiles: list[ProfileOutput] = []
    seen: set = set()
    probes.sample(0.0)
    _take_profiles(scenario, sim, 0.0, dt, profiles, seen)
    history = [(0.0, pf)]
    for k in range(n_steps):
        pf = cosim_step(sim, grid, link, schedules, sim.t, dt,
                        stepper=stepper, warm=pf)
        probes.update_power(pf)
        if (k + 1) % every == 0 or k + 1 == n_steps:
            probes.sample(sim.t)
            history.append((sim.t, pf))
        _take_profiles(scenario, sim, sim.t, dt, profiles, seen)
    return RunResult(series=probes.series, profiles=profiles, sim=sim,
                     power_history=history)
