"""Network plumbing: grids, boundary completion, topology validation."""

import math

import pytest

from gaspower.errors import DomainError
from gaspower.laxcurves import GasState, lax_left, lax_right
from gaspower.network import (
    BoundaryCondition,
    GasSimulation,
    Junction,
    JunctionPort,
    Pipe,
    PipeGrid,
    apply_boundary,
    constant,
    flux,
    flux_jacobian,
    ramp,
)
from gaspower.pressure import GammaLaw, IsothermalLaw


def test_pipe_geometry():
    pipe = Pipe("P", "a", "b", length=1000.0, diameter=0.6, roughness=5e-5)
    assert pipe.area == pytest.approx(math.pi * 0.09, rel=1e-14)
    with pytest.raises(DomainError):
        Pipe("bad", "a", "b", length=-1.0)


def test_grid_staggering_layouts():
    pipe = Pipe("P", "a", "b", 1.0)
    cells = PipeGrid(pipe, 10, IsothermalLaw(1.0))
    nodes = PipeGrid(pipe, 10, IsothermalLaw(1.0), staggering="nodes")
    assert cells.x.size == 10 and nodes.x.size == 11
    assert cells.x[0] == pytest.approx(0.05)
    assert nodes.x[0] == 0.0 and nodes.x[-1] == pytest.approx(1.0)


def test_grid_subsonic_check():
    grid = PipeGrid(Pipe("P", "a", "b", 1.0), 4, IsothermalLaw(1.0)).fill(1.0, 2.0)
    with pytest.raises(DomainError):
        grid.check_subsonic()


def test_flux_jacobian_matches_finite_differences():
    law = GammaLaw(1.0, 1.4)
    rho, q = 3.0, 1.2
    a21, a22 = (float(v) for v in flux_jacobian(rho, q, law))
    h = 1e-7
    f_rho = (flux(rho + h, q, law)[1] - flux(rho - h, q, law)[1]) / (2 * h)
    f_q = (flux(rho, q + h, law)[1] - flux(rho, q - h, law)[1]) / (2 * h)
    assert a21 == pytest.approx(float(f_rho), rel=1e-6)
    assert a22 == pytest.approx(float(f_q), rel=1e-6)


# -- boundary completion --------------------------------------------------------


def test_stationary_boundary_reproduces_cell_state():
    """Matching inflow pressure / outflow momentum leave the state alone."""
    law = GammaLaw(1.0, 1.4)
    interior = GasState(2.0, 0.4)
    p_match = float(law.p(2.0))
    left = apply_boundary(interior, BoundaryCondition("pressure", constant(p_match)),
                          0.0, law, end="start")
    assert left.rho == pytest.approx(2.0, rel=1e-12)
    assert left.q == pytest.approx(0.4, abs=1e-12)
    right = apply_boundary(interior, BoundaryCondition("flow", constant(0.4)),
                           0.0, law, end="end")
    assert right.rho == pytest.approx(2.0, rel=1e-10)
    assert right.q == pytest.approx(0.4, abs=1e-14)


def test_boundary_states_lie_on_the_wave_curves():
    law = GammaLaw(1.0, 1.4)
    interior = GasState(2.0, 0.4)
    left = apply_boundary(interior, BoundaryCondition("density", constant(2.5)),
                          0.0, law, end="start")
    assert left.q == pytest.approx(lax_right(2.5, interior, law), rel=1e-12)
    right = apply_boundary(interior, BoundaryCondition("flow", constant(-0.3)),
                           0.0, law, end="end")
    assert lax_left(right.rho, interior, law) == pytest.approx(-0.3, abs=1e-12)


def test_outflow_ramp_values():
    """Momentum prescribed at the outflow follows the ramp 0 -> 0.2 on [0, 0.1]."""
    bc = BoundaryCondition("flow", ramp(0.0, 0.1, 0.0, 0.2))
    assert bc.value(0.05) == pytest.approx(0.1)
    assert bc.value(0.2) == pytest.approx(0.2)
    law = GammaLaw(1.0 / 1.4, 1.4)
    interior = GasState(1.0, 0.05)
    state = apply_boundary(interior, bc, 0.05, law, end="end")
    assert state.q == pytest.approx(0.1, abs=1e-14)
    assert state.rho < interior.rho  # outflow rarefies the pipe end


def test_network_scale_boundary_values():
    """60 bar inflow and the volumetric outflow of the network benchmark."""
    law = IsothermalLaw(340.0)
    rho_in = law.rho_from_pressure(60e5)
    assert rho_in == pytest.approx(60e5 / 340.0**2, rel=1e-14)  # 51.903 kg/m^3
    area = math.pi * 0.6**2 / 4.0
    q_out = 100.0 * 0.785 / area
    assert q_out == pytest.approx(277.637, abs=1e-3)
    interior = GasState(rho_in, q_out)
    state = apply_boundary(interior, BoundaryCondition("pressure", constant(60e5)),
                           0.0, law, end="start")
    assert state.rho == pytest.approx(rho_in, rel=1e-14)


def test_state_boundary_passthrough():
    bc = BoundaryCondition("state", constant((3.0, -1.0)))
    state = apply_boundary(GasState(1.0, 0.0), bc, 0.0, IsothermalLaw(1.0), "end")
    assert (state.rho, state.q) == (3.0, -1.0)


def test_unknown_boundary_kind_rejected():
    with pytest.raises(DomainError):
        BoundaryCondition("voltage", constant(1.0))


# -- simulation wiring ----------------------------------------------------------


def _two_pipe_sim(law, junction_kwargs=None):
    a = PipeGrid(Pipe("A", "n0", "n1", 1.0), 4, law).fill(1.0, 0.0)
    b = PipeGrid(Pipe("B", "n1", "n2", 1.0), 4, law).fill(1.0, 0.0)
    return GasSimulation(
        grids=[a, b],
        junctions=[Junction("n1", [JunctionPort(0, "end"), JunctionPort(1, "start")],
                            **(junction_kwargs or {}))],
        boundaries={(0, "start"): BoundaryCondition("state", constant((1.0, 0.0))),
                    (1, "end"): BoundaryCondition("state", constant((1.0, 0.0)))},
    )


def test_dangling_pipe_end_rejected():
    law = IsothermalLaw(1.0)
    grid = PipeGrid(Pipe("A", "n0", "n1", 1.0), 4, law).fill(1.0, 0.0)
    with pytest.raises(DomainError):
        GasSimulation(grids=[grid], boundaries={
            (0, "start"): BoundaryCondition("state", constant((1.0, 0.0)))})


def test_unequal_junction_areas_rejected():
    law = IsothermalLaw(1.0)
    a = PipeGrid(Pipe("A", "n0", "n1", 1.0, diameter=0.6), 4, law).fill(1.0, 0.0)
    b = PipeGrid(Pipe("B", "n1", "n2", 1.0, diameter=0.4), 4, law).fill(1.0, 0.0)
    with pytest.raises(DomainError):
        GasSimulation(
            grids=[a, b],
            junctions=[Junction("n1", [JunctionPort(0, "end"),
                                       JunctionPort(1, "start")])],
            boundaries={(0, "start"): BoundaryCondition("state", constant((1.0, 0.0))),
                        (1, "end"): BoundaryCondition("state", constant((1.0, 0.0)))},
        )


def test_wavespeed_and_mass_bookkeeping(unit_isothermal):
    sim = _two_pipe_sim(unit_isothermal)
    assert sim.max_wavespeed() == pytest.approx(1.0)
    # two unit pipes at rho=1 with unit cross-section hold two mass units
    assert sim.total_mass() == pytest.approx(2.0 * math.pi / 4.0, rel=1e-12)
