"""Scenario-to-simulation wiring: topology derivation, probes, schemes."""

from importlib.resources import files

import pytest

from gaspower.driver import build_gas_simulation, build_link, run_gas_simulation
from gaspower.errors import SchemaError
from gaspower.scenario import load_scenario, scenario_from_dict

BUNDLED = files("gaspower") / "scenarios"


def _mini(**overrides):
    base = {
        "name": "mini",
        "pressure_law": "isothermal(1)",
        "pipes": [{"id": "A", "from": "n0", "to": "n1", "length": 1.0},
                  {"id": "B", "from": "n1", "to": "n2", "length": 1.0}],
        "initial": [{"pipe": "A", "rho": 1.0, "q": 0.0},
                    {"pipe": "B", "rho": 1.0, "q": 0.0}],
        "boundary": [{"node": "n0", "kind": "density", "value": 1.0},
                     {"node": "n2", "kind": "flow", "value": 0.0}],
        "numerics": {"scheme": "cweno3", "dt": 1e-3, "dx": 0.05, "t_end": 0.01},
    }
    base.update(overrides)
    return scenario_from_dict(base)


def test_interior_nodes_become_junctions():
    sim = build_gas_simulation(_mini())
    assert len(sim.junctions) == 1
    junction = sim.junctions[0]
    assert junction.node == "n1"
    assert {(p.pipe_index, p.end) for p in junction.ports} == {(0, "end"),
                                                               (1, "start")}
    assert set(sim.boundaries) == {(0, "start"), (1, "end")}


def test_extraction_attaches_to_the_junction():
    scn = _mini(extraction=[{"node": "n1", "epsilon": 0.25}])
    sim = build_gas_simulation(scn)
    assert sim.junctions[0].extraction_at(0.0) == 0.25


def test_compressor_ratio_reaches_the_port():
    scn = _mini(compressors=[{"node": "n1", "pipe": "A", "ratio": 1.07}])
    sim = build_gas_simulation(scn)
    ratios = {(p.pipe_index, p.end): p.pressure_ratio
              for p in sim.junctions[0].ports}
    assert ratios[(0, "end")] == 1.07
    assert ratios[(1, "start")] == 1.0


def test_cell_count_override():
    scn = _mini(numerics={"scheme": "cweno3", "dt": 1e-3, "n_cells": 17,
                          "t_end": 0.01})
    sim = build_gas_simulation(scn)
    assert all(g.n == 17 for g in sim.grids)


def test_scheme_selects_the_staggering():
    assert build_gas_simulation(_mini()).grids[0].staggering == "cells"
    scn = _mini(numerics={"scheme": "ibox", "dt": 1e-2, "dx": 0.05,
                          "t_end": 0.1})
    assert build_gas_simulation(scn).grids[0].staggering == "nodes"


def test_boundary_on_interior_node_rejected():
    scn = _mini(boundary=[{"node": "n1", "kind": "flow", "value": 0.0},
                          {"node": "n0", "kind": "density", "value": 1.0},
                          {"node": "n2", "kind": "flow", "value": 0.0}])
    with pytest.raises(SchemaError):
        build_gas_simulation(scn)


def test_probe_series_are_recorded():
    scn = _mini(outputs={"series": ["rho@n1", "q@n2", "pressure@n0"]})
    result = run_gas_simulation(scn)
    assert {s.quantity for s in result.series} == {"rho@n1", "q@n2",
                                                   "pressure@n0"}
    assert all(len(s.times) >= 2 for s in result.series)


def test_unknown_probe_is_a_schema_error():
    scn = _mini(outputs={"series": ["rho@nowhere"]})
    with pytest.raises(SchemaError):
        run_gas_simulation(scn)


def test_link_area_comes_from_the_junction_pipes():
    scn = load_scenario(BUNDLED / "gaslib9.scn")
    sim = build_gas_simulation(scn)
    link = build_link(scn, sim)
    assert link.area == pytest.approx(0.2827433388230814, rel=1e-12)
    assert link.rho0 == 0.785
