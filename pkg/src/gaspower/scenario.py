"""Scenario files: a single YAML document with named sections.

Sections: ``gas_nodes`` (optional id list), ``pipes``, ``initial``,
``boundary``, ``extraction``, ``compressors``, ``buses``/``lines`` (power
topology), ``coupling``, ``schedules``, ``numerics``, ``outputs``,
``friction``, and the top-level ``name``/``pressure_law``. Field names copy
the conventional column headers (pipes carry from/to, length/diameter/
roughness; buses carry type, P, Q, V, phi and the diagonal G, B entries;
lines carry from/to/G/B).

Units: gas quantities are SI; pressures may be given as the string
"<number> bar" and are converted to Pa. Power quantities are per-unit.
Time is in the same unit as ``numerics.dt``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from .errors import SchemaError
from .pressure import PressureLaw, parse_law

BAR = 1e5  # Pa


def _value_with_unit(raw, path: str) -> float:
    """Parse a scalar that may carry a 'bar' suffix."""
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    if isinstance(raw, str):
        text = raw.strip()
        if text.endswith("bar"):
            try:
                return float(text[:-3].strip()) * BAR
            except ValueError:
                pass
        try:
            return float(text)
        except ValueError:
            pass
    raise SchemaError(f"{path}: expected a number (optionally '<x> bar'), got {raw!r}")


class _Section:
    """Mapping wrapper that reports full field paths on errors."""

    def __init__(self, data, path: str):
        if not isinstance(data, dict):
            raise SchemaError(f"{path}: expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path

    def require(self, key: str):
        if key not in self.data:
            raise SchemaError(f"{self.path}: missing field {key!r}")
        return self.data[key]

    def get(self, key: str, default=None):
        return self.data.get(key, default)

    def number(self, key: str, default=None) -> float:
        raw = self.require(key) if default is None else self.data.get(key, default)
        return _value_with_unit(raw, f"{self.path}.{key}")

    def string(self, key: str, default=None) -> str:
        raw = self.require(key) if default is None else self.data.get(key, default)
        if not isinstance(raw, str):
            raise SchemaError(f"{self.path}.{key}: expected a string, got {raw!r}")
        return raw


@dataclass(frozen=True)
class PipeSpec:
    id: str
    from_node: str
    to_node: str
    length: float          # [m]
    diameter: float        # [m]
    roughness: float       # [m]


@dataclass(frozen=True)
class InitialSpec:
    pipe: str
    rho: float
    q: float


@dataclass(frozen=True)
class BoundarySpec:
    """value: constant, or tuple of (t, v) pairs interpolated linearly.

    For kind='state' the value is the constant pair (rho, q).
    """

    node: str
    kind: str              # pressure | density | flow | state
    value: tuple


@dataclass(frozen=True)
class ExtractionSpec:
    node: str
    epsilon: float         # momentum-flux units


@dataclass(frozen=True)
class CompressorSpec:
    node: str
    pipe: str
    ratio: float


@dataclass(frozen=True)
class BusSpec:
    id: str
    type: str
    P: float | None
    Q: float | None
    V: float | None
    phi: float | None
    G: float
    B: float


@dataclass(frozen=True)
class LineSpec:
    id: str
    from_bus: str
    to_bus: str
    G: float
    B: float


@dataclass(frozen=True)
class CouplingSpec:
    gas_node: str
    power_bus: str
    a0: float
    a1: float
    a2: float
    rho0: float


@dataclass(frozen=True)
class ScheduleSpec:
    bus: str
    times: tuple[float, ...]
    P: tuple[float, ...]
    Q: tuple[float, ...]


@dataclass(frozen=True)
class NumericsSpec:
    scheme: str            # cweno3 | ibox
    dt: float
    t_end: float
    dx: float | None = None
    n_cells: int | None = None
    sample_every: float | None = None


@dataclass(frozen=True)
class ProfileSpec:
    time: float
    pipe: str | None = None    # None: all pipes


@dataclass(frozen=True)
class OutputsSpec:
    series: tuple[str, ...] = ()
    profiles: tuple[ProfileSpec, ...] = ()


@dataclass(frozen=True)
class FrictionSpec:
    enabled: bool = False
    eta: float = 1e-5


@dataclass(frozen=True)
class Scenario:
    name: str
    law: PressureLaw
    pipes: tuple[PipeSpec, ...]
    initial: tuple[InitialSpec, ...]
    boundaries: tuple[BoundarySpec, ...]
    extractions: tuple[ExtractionSpec, ...] = ()
    compressors: tuple[CompressorSpec, ...] = ()
    buses: tuple[BusSpec, ...] = ()
    lines: tuple[LineSpec, ...] = ()
    coupling: CouplingSpec | None = None
    schedules: tuple[ScheduleSpec, ...] = ()
    numerics: NumericsSpec = NumericsSpec("cweno3", 1e-3, 1.0)
    outputs: OutputsSpec = OutputsSpec()
    friction: FrictionSpec = FrictionSpec()
    gas_nodes: tuple[str, ...] = ()
    stationary_init: bool = False

    def pipe(self, pipe_id: str) -> PipeSpec:
        for p in self.pipes:
            if p.id == pipe_id:
                return p
        raise SchemaError(f"unknown pipe {pipe_id!r}")


def _parse_pipe(entry, path: str) -> PipeSpec:
    sec = _Section(entry, path)
    length = (sec.number("length_km") * 1e3 if "length_km" in sec.data
              else sec.number("length"))
    diameter = (sec.number("diameter_mm") * 1e-3 if "diameter_mm" in sec.data
                else sec.number("diameter", 1.0))
    roughness = (sec.number("roughness_mm") * 1e-3 if "roughness_mm" in sec.data
                 else sec.number("roughness", 0.0))
    return PipeSpec(
        id=sec.string("id"),
        from_node=sec.string("from"),
        to_node=sec.string("to"),
        length=length,
        diameter=diameter,
        roughness=roughness,
    )


def _parse_value_series(raw, path: str) -> tuple:
    """Constant -> (v,); list of [t, v] pairs -> ((t, v), ...)."""
    if isinstance(raw, (int, float, str)):
        return (_value_with_unit(raw, path),)
    if isinstance(raw, list):
        out = []
        last_t = None
        for k, pair in enumerate(raw):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise SchemaError(f"{path}[{k}]: expected a [time, value] pair")
            t = _value_with_unit(pair[0], f"{path}[{k}].time")
            v = _value_with_unit(pair[1], f"{path}[{k}].value")
            if last_t is not None and t <= last_t:
                raise SchemaError(f"{path}[{k}]: times must strictly increase")
            last_t = t
            out.append((t, v))
        if not out:
            raise SchemaError(f"{path}: empty time series")
        return tuple(out)
    raise SchemaError(f"{path}: expected a number or a list of [t, v] pairs")


def _parse_boundary(entry, path: str) -> BoundarySpec:
    sec = _Section(entry, path)
    kind = sec.string("kind")
    if kind == "state":
        value = (sec.number("rho"), sec.number("q"))
    else:
        value = _parse_value_series(sec.require("value"), f"{path}.value")
    return BoundarySpec(node=sec.string("node"), kind=kind, value=value)


def _parse_bus(entry, path: str) -> BusSpec:
    sec = _Section(entry, path)
    opt = lambda key: (None if key not in sec.data or sec.data[key] is None
                       else sec.number(key))
    return BusSpec(
        id=sec.string("id"),
        type=sec.string("type"),
        P=opt("P"), Q=opt("Q"), V=opt("V"), phi=opt("phi"),
        G=sec.number("G", 0.0), B=sec.number("B", 0.0),
    )


def load_scenario(path) -> Scenario:
    """Load and fully validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"scenario file {path} does not exist")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise SchemaError(f"{path}: not valid YAML: {exc}") from exc
    if raw is None:
        raise SchemaError(f"{path}: file is empty")
    return scenario_from_dict(raw, str(path))


def scenario_from_dict(raw: dict, origin: str = "<dict>") -> Scenario:
    top = _Section(raw, origin)
    try:
        law = parse_law(top.string("pressure_law"))
    except Exception as exc:
        raise SchemaError(f"{origin}.pressure_law: {exc}") from exc

    pipes = tuple(
        _parse_pipe(e, f"{origin}.pipes[{k}]")
        for k, e in enumerate(top.require("pipes"))
    )
    if len({p.id for p in pipes}) != len(pipes):
        raise SchemaError(f"{origin}.pipes: duplicate pipe ids")

    initial = tuple(
        InitialSpec(
            pipe=_Section(e, f"{origin}.initial[{k}]").string("pipe"),
            rho=_Section(e, f"{origin}.initial[{k}]").number("rho"),
            q=_Section(e, f"{origin}.initial[{k}]").number("q"),
        )
        for k, e in enumerate(top.get("initial", []) or [])
    )
    boundaries = tuple(
        _parse_boundary(e, f"{origin}.boundary[{k}]")
        for k, e in enumerate(top.get("boundary", []) or [])
    )
    extractions = tuple(
        ExtractionSpec(
            node=_Section(e, f"{origin}.extraction[{k}]").string("node"),
            epsilon=_Section(e, f"{origin}.extraction[{k}]").number("epsilon"),
        )
        for k, e in enumerate(top.get("extraction", []) or [])
    )
    compressors = tuple(
        CompressorSpec(
            node=_Section(e, f"{origin}.compressors[{k}]").string("node"),
            pipe=_Section(e, f"{origin}.compressors[{k}]").string("pipe"),
            ratio=_Section(e, f"{origin}.compressors[{k}]").number("ratio"),
        )
        for k, e in enumerate(top.get("compressors", []) or [])
    )

    buses = tuple(
        _parse_bus(e, f"{origin}.buses[{k}]")
        for k, e in enumerate(top.get("buses", []) or [])
    )
    lines = tuple(
        LineSpec(
            id=_Section(e, f"{origin}.lines[{k}]").string("id"),
            from_bus=_Section(e, f"{origin}.lines[{k}]").string("from"),
            to_bus=_Section(e, f"{origin}.lines[{k}]").string("to"),
            G=_Section(e, f"{origin}.lines[{k}]").number("G"),
            B=_Section(e, f"{origin}.lines[{k}]").number("B"),
        )
        for k, e in enumerate(top.get("lines", []) or [])
    )

    coupling = None
    if top.get("coupling") is not None:
        c = _Section(top.get("coupling"), f"{origin}.coupling")
        coupling = CouplingSpec(
            gas_node=c.string("gas_node"),
            power_bus=c.string("power_bus"),
            a0=c.number("a0"), a1=c.number("a1"), a2=c.number("a2"),
            rho0=c.number("rho0"),
        )

    schedules = []
    for k, e in enumerate(top.get("schedules", []) or []):
        sec = _Section(e, f"{origin}.schedules[{k}]")
        times = tuple(float(t) for t in sec.require("times"))
        p_vals = tuple(float(v) for v in sec.require("P"))
        q_vals = tuple(float(v) for v in sec.require("Q"))
        if len(times) != len(p_vals) or len(times) != len(q_vals):
            raise SchemaError(f"{origin}.schedules[{k}]: length mismatch")
        schedules.append(ScheduleSpec(bus=sec.string("bus"), times=times,
                                      P=p_vals, Q=q_vals))

    num = _Section(top.require("numerics"), f"{origin}.numerics")
    scheme = num.string("scheme")
    if scheme not in ("cweno3", "ibox"):
        raise SchemaError(f"{origin}.numerics.scheme: unknown scheme {scheme!r}")
    numerics = NumericsSpec(
        scheme=scheme,
        dt=num.number("dt"),
        t_end=num.number("t_end"),
        dx=num.number("dx") if "dx" in num.data else None,
        n_cells=int(num.data["n_cells"]) if "n_cells" in num.data else None,
        sample_every=(num.number("sample_every")
                      if "sample_every" in num.data else None),
    )
    if numerics.dx is None and numerics.n_cells is None:
        raise SchemaError(f"{origin}.numerics: need dx or n_cells")
    if numerics.dt <= 0.0 or numerics.t_end <= 0.0:
        raise SchemaError(f"{origin}.numerics: dt and t_end must be positive")

    series, profiles = (), ()
    if top.get("outputs") is not None:
        out = _Section(top.get("outputs"), f"{origin}.outputs")
        series = tuple(str(s) for s in out.get("series", []) or [])
        profiles = tuple(
            ProfileSpec(
                time=_Section(e, f"{origin}.outputs.profiles[{k}]").number("time"),
                pipe=e.get("pipe"),
            )
            for k, e in enumerate(out.get("profiles", []) or [])
        )

    friction = FrictionSpec()
    if top.get("friction") is not None:
        f = _Section(top.get("friction"), f"{origin}.friction")
        friction = FrictionSpec(
            enabled=bool(f.get("enabled", False)),
            eta=f.number("eta", 1e-5),
        )

    scenario = Scenario(
        name=top.string("name", path_default_name(origin)),
        law=law,
        pipes=pipes,
        initial=initial,
        boundaries=boundaries,
        extractions=extractions,
        compressors=compressors,
        buses=buses,
        lines=lines,
        coupling=coupling,
        schedules=tuple(schedules),
        numerics=numerics,
        outputs=OutputsSpec(series=series, profiles=profiles),
        friction=friction,
        gas_nodes=tuple(str(n) for n in top.get("gas_nodes", []) or []),
        stationary_init=bool(top.get("stationary_init", False)),
    )
    _validate(scenario, origin)
    return scenario


def path_default_name(origin: str) -> str:
    stem = Path(origin).stem
    return stem if stem and stem != "<dict>" else "scenario"


def _validate(s: Scenario, origin: str) -> None:
    nodes = {p.from_node for p in s.pipes} | {p.to_node for p in s.pipes}
    if s.gas_nodes:
        missing = nodes - set(s.gas_nodes)
        if missing:
            raise SchemaError(
                f"{origin}.gas_nodes: pipes reference undeclared nodes {sorted(missing)}"
            )
    pipe_ids = {p.id for p in s.pipes}
    for k, init in enumerate(s.initial):
        if init.pipe not in pipe_ids:
            raise SchemaError(f"{origin}.initial[{k}]: unknown pipe {init.pipe!r}")
        if init.rho <= 0.0:
            raise SchemaError(f"{origin}.initial[{k}]: density must be positive")
    for k, b in enumerate(s.boundaries):
        if b.node not in nodes:
            raise SchemaError(f"{origin}.boundary[{k}]: unknown node {b.node!r}")
        if b.kind not in ("pressure", "density", "flow", "state"):
            raise SchemaError(f"{origin}.boundary[{k}]: unknown kind {b.kind!r}")
    for k, e in enumerate(s.extractions):
        if e.node not in nodes:
            raise SchemaError(f"{origin}.extraction[{k}]: unknown node {e.node!r}")
    for k, comp in enumerate(s.compressors):
        if comp.node not in nodes:
            raise SchemaError(f"{origin}.compressors[{k}]: unknown node {comp.node!r}")
        if comp.pipe not in pipe_ids:
            raise SchemaError(f"{origin}.compressors[{k}]: unknown pipe {comp.pipe!r}")
        if comp.ratio <= 0.0:
            raise SchemaError(f"{origin}.compressors[{k}]: ratio must be positive")

    if s.buses:
        ids = [b.id for b in s.buses]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"{origin}.buses: duplicate ids")
        slack = [b for b in s.buses if b.type == "slack"]
        if len(slack) != 1:
            raise SchemaError(
                f"{origin}.buses: need exactly one slack bus, found {len(slack)}"
            )
        known = set(ids)
        for k, line in enumerate(s.lines):
            if line.from_bus not in known or line.to_bus not in known:
                raise SchemaError(f"{origin}.lines[{k}]: unknown bus reference")
    if s.coupling is not None:
        if not s.buses:
            raise SchemaError(f"{origin}.coupling: no power grid in scenario")
        if s.coupling.gas_node not in nodes:
            raise SchemaError(
                f"{origin}.coupling.gas_node: unknown node {s.coupling.gas_node!r}"
            )
        if s.coupling.power_bus not in {b.id for b in s.buses}:
            raise SchemaError(
                f"{origin}.coupling.power_bus: unknown bus {s.coupling.power_bus!r}"
            )
    for k, sched in enumerate(s.schedules):
        if s.buses and sched.bus not in {b.id for b in s.buses}:
            raise SchemaError(f"{origin}.schedules[{k}]: unknown bus {sched.bus!r}")

    if not s.initial and not s.stationary_init:
        raise SchemaError(
            f"{origin}: scenario needs an initial section or stationary_init"
        )


def scenario_to_dict(s: Scenario) -> dict:
    """Serializable form; load(scenario_from_dict(...)) round-trips."""
    out: dict = {
        "name": s.name,
        "pressure_law": s.law.spec(),
        "pipes": [
            {"id": p.id, "from": p.from_node, "to": p.to_node,
             "length": p.length, "diameter": p.diameter, "roughness": p.roughness}
            for p in s.pipes
        ],
        "numerics": {
            key: value for key, value in (
                ("scheme", s.numerics.scheme),
                ("dt", s.numerics.dt),
                ("t_end", s.numerics.t_end),
                ("dx", s.numerics.dx),
                ("n_cells", s.numerics.n_cells),
                ("sample_every", s.numerics.sample_every),
            ) if value is not None
        },
    }
    if s.gas_nodes:
        out["gas_nodes"] = list(s.gas_nodes)
    if s.initial:
        out["initial"] = [asdict(i) for i in s.initial]
    if s.boundaries:
        entries = []
        for b in s.boundaries:
            if b.kind == "state":
                entries.append({"node": b.node, "kind": b.kind,
                                "rho": b.value[0], "q": b.value[1]})
            elif len(b.value) == 1:
                entries.append({"node": b.node, "kind": b.kind,
                                "value": b.value[0]})
            else:
                entries.append({"node": b.node, "kind": b.kind,
                                "value": [[t, v] for t, v in b.value]})
        out["boundary"] = entries
    if s.extractions:
        out["extraction"] = [asdict(e) for e in s.extractions]
    if s.compressors:
        out["compressors"] = [asdict(c) for c in s.compressors]
    if s.buses:
        out["buses"] = [
            {key: value for key, value in
             [("id", b.id), ("type", b.type), ("P", b.P), ("Q", b.Q),
              ("V", b.V), ("phi", b.phi), ("G", b.G), ("B", b.B)]
             if value is not None}
            for b in s.buses
        ]
    if s.lines:
        out["lines"] = [
            {"id": l.id, "from": l.from_bus, "to": l.to_bus, "G": l.G, "B": l.B}
            for l in s.lines
        ]
    if s.coupling is not None:
        out["coupling"] = asdict(s.coupling)
    if s.schedules:
        out["schedules"] = [
            {"bus": sc.bus, "times": list(sc.times),
             "P": list(sc.P), "Q": list(sc.Q)}
            for sc in s.schedules
        ]
    if s.outputs.series or s.outputs.profiles:
        block: dict = {}
        if s.outputs.series:
            block["series"] = list(s.outputs.series)
        if s.outputs.profiles:
            block["profiles"] = [
                {key: value for key, value in
                 [("time", p.time), ("pipe", p.pipe)] if value is not None}
                for p in s.outputs.profiles
            ]
        out["outputs"] = block
    if s.friction.enabled or s.friction.eta != 1e-5:
        out["friction"] = {"enabled": s.friction.enabled, "eta": s.friction.eta}
    if s.stationary_init:
        out["stationary_init"] = True
    return out


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(
        yaml.safe_dump(scenario_to_dict(s), sort_keys=False, width=100)
    )
