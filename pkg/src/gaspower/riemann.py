"""Interface and junction Riemann solvers built on the wave curves.

A junction couples pipe traces through equality of pressure (one common
trace density for unit pressure ratios) and conservation of mass, optionally
with a prescribed extraction ``epsilon >= 0`` drawn at the node. The scalar
junction function

    D(rho) = sum_in lax_left_i(rho) - sum_out lax_right_j(rho)

is concave for well-posed pressure laws; solutions live on its decreasing
branch, located right of the function's maximum. Admissibility requires the
trace density to exceed the junction minimal density (the largest per-pipe
``rho_min``), and sub-sonic traces additionally require it to stay below the
smallest per-pipe ``rho_max``.

Ports may carry a pressure ratio r != 1 (an ideal compressor boosting that
pipe's trace pressure into the node by the factor r); the trace density of
such a port is p^{-1}(p(rho)/r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from scipy.optimize import brentq

from .errors import (
    DomainError,
    InadmissibleError,
    InvalidDemandError,
    NoSolutionError,
)
from .laxcurves import (
    GasState,
    Side,
    WaveType,
    lambda1,
    lambda2,
    lax_left,
    lax_left_deriv,
    lax_right,
    lax_right_deriv,
    require_subsonic,
    rho_max,
    rho_min,
)
from .pressure import PressureLaw

_BRACKET_CAP = 1e12  # bracket expansion bound, relative to the density scale


@dataclass
class JunctionSolution:
    """Traces and diagnostics of one junction Riemann solve.

    All traces of unit-ratio ports share the density ``rho_star`` (hence a
    common pressure); incoming and outgoing momenta balance the extraction.
    ``rho_max_junction`` (and the derived ``subsonic_traces`` flag) is
    evaluated on first access; locating it needs a density scan that the
    time-stepping hot path never consumes.
    """

    rho_star: float
    epsilon: float
    incoming: tuple[GasState, ...]
    outgoing: tuple[GasState, ...]
    incoming_traces: tuple[GasState, ...]
    outgoing_traces: tuple[GasState, ...]
    incoming_waves: tuple[WaveType, ...]
    outgoing_waves: tuple[WaveType, ...]
    rho_min_junction: float
    admissible: bool
    law: PressureLaw = field(repr=False)
    _rho_max_fn: Callable[[], float] = field(repr=False, default=lambda: math.inf)
    _rho_max_cache: float | None = field(repr=False, default=None)

    @property
    def rho_max_junction(self) -> float:
        if self._rho_max_cache is None:
            self._rho_max_cache = self._rho_max_fn()
        return self._rho_max_cache

    @property
    def subsonic_traces(self) -> bool:
        return self.rho_star < self.rho_max_junction

    @property
    def left(self) -> GasState:
        return self.incoming[0]

    @property
    def right(self) -> GasState:
        return self.outgoing[0]

    @property
    def left_trace(self) -> GasState:
        return self.incoming_traces[0]

    @property
    def right_trace(self) -> GasState:
        return self.outgoing_traces[0]

    @property
    def wave_pair(self) -> tuple[WaveType, WaveType]:
        return (self.incoming_waves[0], self.outgoing_waves[0])

    def flux_residual(self) -> float:
        """Mass-conservation defect sum(q_in) - sum(q_out) - epsilon."""
        q_in = sum(v.q for v in self.incoming_traces)
        q_out = sum(v.q for v in self.outgoing_traces)
        return q_in - q_out - self.epsilon


def _port_density_maps(law: PressureLaw, ratio: float):
    """Map junction density -> trace density for a port of pressure ratio r.

    Returns (h, h'): h(rho) = p^{-1}(p(rho)/r) with derivative by implicit
    differentiation. Unit ratios short-circuit to the identity.
    """
    if ratio == 1.0:
        return (lambda r: r), (lambda r: 1.0)

    def h(rho: float) -> float:
        return law.rho_from_pressure(float(law.p(rho)) / ratio)

    def dh(rho: float) -> float:
        y = h(rho)
        return float(law.dp(rho)) / (ratio * float(law.dp(y)))

    return h, dh


class _JunctionProblem:
    """Scalar formulation of one junction solve."""

    def __init__(self, incoming, outgoing, epsilon, law,
                 in_ratios=None, out_ratios=None):
        incoming = tuple(incoming)
        outgoing = tuple(outgoing)
        if not incoming and not outgoing:
            raise DomainError("junction needs at least one pipe")
        if epsilon < 0.0:
            raise DomainError(f"extraction must be non-negative, got {epsilon}")
        for k, state in enumerate(incoming):
            require_subsonic(state, law, f"incoming state {k}")
        for k, state in enumerate(outgoing):
            require_subsonic(state, law, f"outgoing state {k}")
        self.incoming = incoming
        self.outgoing = outgoing
        self.epsilon = float(epsilon)
        self.law = law
        self.in_ratios = tuple(in_ratios) if in_ratios else (1.0,) * len(incoming)
        self.out_ratios = tuple(out_ratios) if out_ratios else (1.0,) * len(outgoing)
        self.in_maps = [_port_density_maps(law, r) for r in self.in_ratios]
        self.out_maps = [_port_density_maps(law, r) for r in self.out_ratios]
        self.scale = max(s.rho for s in incoming + outgoing)
        self._limits()

    def _limits(self):
        """Junction minimal density now; the maximal one stays lazy."""
        law = self.law
        ports = [(s, Side.IN, r) for s, r in zip(self.incoming, self.in_ratios)]
        ports += [(s, Side.OUT, r) for s, r in zip(self.outgoing, self.out_ratios)]
        rho_min_j = 0.0
        for state, side, ratio in ports:
            # Pull per-pipe bounds back through the port map (increasing).
            rho_min_j = max(rho_min_j,
                            self._pullback(ratio, rho_min(state, side, law)))
        self.rho_min_junction = rho_min_j

        def rho_max_junction() -> float:
            value = math.inf
            for state, side, ratio in ports:
                value = min(value,
                            self._pullback(ratio, rho_max(state, side, law)))
            return value

        self.rho_max_fn = rho_max_junction

    def _pullback(self, ratio: float, value: float) -> float:
        """Junction density whose port trace density equals ``value``."""
        if ratio == 1.0 or value == 0.0 or value == math.inf:
            return value
        return self.law.rho_from_pressure(ratio * float(self.law.p(value)))

    def imbalance(self, rho: float) -> float:
        """D(rho): incoming minus outgoing momentum at junction density rho."""
        total = 0.0
        for state, (h, _) in zip(self.incoming, self.in_maps):
            total += lax_left(h(rho), state, self.law)
        for state, (h, _) in zip(self.outgoing, self.out_maps):
            total -= lax_right(h(rho), state, self.law)
        return total

    def imbalance_deriv(self, rho: float) -> float:
        total = 0.0
        for state, (h, dh) in zip(self.incoming, self.in_maps):
            total += lax_left_deriv(h(rho), state, self.law) * dh(rho)
        for state, (h, dh) in zip(self.outgoing, self.out_maps):
            total -= lax_right_deriv(h(rho), state, self.law) * dh(rho)
        return total

    def argmax(self) -> float:
        """Locate the maximum of D by bisecting its (decreasing) derivative."""
        lo = 1e-9 * self.scale
        if self.imbalance_deriv(lo) <= 0.0:
            return lo
        hi = self.scale
        while self.imbalance_deriv(hi) > 0.0:
            hi *= 4.0
            if hi > _BRACKET_CAP * self.scale:
                # D keeps increasing on the whole search range.
                return hi
        return brentq(self.imbalance_deriv, lo, hi, rtol=1e-14)

    def max_extraction(self) -> float:
        """Supremum of solvable extractions: D at the junction minimal density."""
        floor = max(self.rho_min_junction, 1e-9 * self.scale)
        return self.imbalance(floor)

    def solve(self, strict_admissibility: bool) -> JunctionSolution:
        eps = self.epsilon

        if eps > 0.0:
            eps_max = self.max_extraction()
            if eps >= eps_max:
                raise InvalidDemandError(
                    f"extraction {eps:g} is at or above the junction maximum "
                    f"{eps_max:g}", epsilon_max=eps_max,
                )
            lo = max(self.rho_min_junction, 1e-9 * self.scale)
        else:
            lo = self.argmax()
            if self.imbalance(lo) < 0.0:
                raise NoSolutionError(
                    "junction curves have no intersection (imbalance is "
                    f"negative at its maximum, rho={lo:g})"
                )

        target = lambda r: self.imbalance(r) - eps
        hi = max(2.0 * lo, self.scale)
        while target(hi) > 0.0:
            hi *= 2.0
            if hi > _BRACKET_CAP * self.scale:
                raise NoSolutionError(
                    f"no sign change of the junction function up to rho={hi:g}"
                )
        if target(lo) < 0.0:
            # Degenerate: maximum itself is the root (within float noise).
            rho_star = lo
        else:
            rho_star = brentq(target, lo, hi, xtol=1e-24, rtol=1e-15)

        admissible = rho_star > self.rho_min_junction
        if strict_admissibility and not admissible:
            raise InadmissibleError(
                f"junction density {rho_star:g} is at or below the minimal "
                f"density {self.rho_min_junction:g}; max extraction "
                f"{self.max_extraction():g}"
            )

        law = self.law
        in_traces, in_waves = [], []
        for state, (h, _) in zip(self.incoming, self.in_maps):
            r = h(rho_star)
            in_traces.append(GasState(r, lax_left(r, state, law)))
            in_waves.append(WaveType.RAREFACTION if r <= state.rho else WaveType.SHOCK)
        out_traces, out_waves = [], []
        for state, (h, _) in zip(self.outgoing, self.out_maps):
            r = h(rho_star)
            out_traces.append(GasState(r, lax_right(r, state, law)))
            out_waves.append(WaveType.RAREFACTION if r <= state.rho else WaveType.SHOCK)

        return JunctionSolution(
            rho_star=float(rho_star),
            epsilon=eps,
            incoming=self.incoming,
            outgoing=self.outgoing,
            incoming_traces=tuple(in_traces),
            outgoing_traces=tuple(out_traces),
            incoming_waves=tuple(in_waves),
            outgoing_waves=tuple(out_waves),
            rho_min_junction=self.rho_min_junction,
            admissible=admissible,
            law=law,
            _rho_max_fn=self.rho_max_fn,
        )


def solve_interface(left: GasState, right: GasState,
                    law: PressureLaw) -> JunctionSolution:
    """Solve the two-state interface problem (zero extraction).

    The unique intersection density of the two wave curves is bracketed on
    the decreasing branch and refined to machine precision; the solution may
    carry ``admissible=False`` when that density does not exceed the junction
    minimal density.
    """
    problem = _JunctionProblem([left], [right], 0.0, law)
    return problem.solve(strict_admissibility=False)


def solve_gas_power_junction(left: GasState, right: GasState, epsilon: float,
                             law: PressureLaw) -> JunctionSolution:
    """Two-pipe junction with a prescribed gas extraction ``epsilon >= 0``.

    Of the up to two densities where the curve gap equals ``epsilon``, the
    one on the decreasing branch is returned; the other would carry waves
    into the junction. Demands at or above :func:`max_extraction` raise
    ``InvalidDemandError`` with the admissible supremum attached.
    """
    if epsilon == 0.0:
        return solve_interface(left, right, law)
    problem = _JunctionProblem([left], [right], epsilon, law)
    return problem.solve(strict_admissibility=False)


def solve_multi_junction(incoming: Sequence[GasState], outgoing: Sequence[GasState],
                         epsilon: float, law: PressureLaw, *,
                         in_pressure_ratios: Sequence[float] | None = None,
                         out_pressure_ratios: Sequence[float] | None = None,
                         ) -> JunctionSolution:
    """General junction with any number of pipes and optional extraction.

    Inadmissible configurations raise; a solution whose density reaches the
    smallest per-pipe ``rho_max`` is returned with ``subsonic_traces=False``.
    Pressure ratios model ideal compressors on individual ports.
    """
    ratios_in = tuple(in_pressure_ratios) if in_pressure_ratios else None
    ratios_out = tuple(out_pressure_ratios) if out_pressure_ratios else None
    problem = _JunctionProblem(incoming, outgoing, epsilon, law,
                               in_ratios=ratios_in, out_ratios=ratios_out)
    return problem.solve(strict_admissibility=True)


def max_extraction(left: GasState, right: GasState, law: PressureLaw) -> float:
    """Supremum of extractions solvable for the given two-pipe data."""
    problem = _JunctionProblem([left], [right], 0.0, law)
    return problem.max_extraction()


def wave_thresholds(left: GasState, right: GasState,
                    law: PressureLaw) -> tuple[float, float, float]:
    """Extraction levels separating the junction solution structures.

    Returns ``(eps_ss_upper, eps_rs_upper, eps_max)``: the curve gap at the
    larger datum density (below which both waves are shocks), at the smaller
    datum density (below which the wave on the denser side is a shock), and
    at the junction minimal density (at or above which no admissible solution
    exists).
    """
    problem = _JunctionProblem([left], [right], 0.0, law)
    hi = max(left.rho, right.rho)
    lo = min(left.rho, right.rho)
    return (
        problem.imbalance(hi),
        problem.imbalance(lo),
        problem.max_extraction(),
    )


def _invert_fan(deriv, lo: float, hi: float, xi: float) -> float:
    """Solve deriv(rho) = xi for rho inside a rarefaction fan."""
    return brentq(lambda r: deriv(r) - xi, lo, hi, rtol=1e-14)


def sample_solution(sol: JunctionSolution, xi: float) -> GasState:
    """Evaluate the self-similar two-pipe solution at speed ``xi = x/t``.

    Defined for one incoming and one outgoing pipe. The junction sits at
    xi = 0; exactly on a discontinuity the right-side state is returned.
    """
    if len(sol.incoming) != 1 or len(sol.outgoing) != 1:
        raise DomainError("sampling is defined for 1-in/1-out junctions only")
    if not sol.admissible:
        raise InadmissibleError("cannot sample an inadmissible junction solution")
    law = sol.law
    left, right = sol.left, sol.right
    v_l, v_r = sol.left_trace, sol.right_trace

    if xi < 0.0:
        if sol.incoming_waves[0] is WaveType.SHOCK:
            if v_l.rho == left.rho:
                speed = lambda1(left, law)
            else:
                speed = (v_l.q - left.q) / (v_l.rho - left.rho)
            return left if xi < speed else v_l
        head = lambda1(left, law)
        tail = lambda1(v_l, law)
        if xi < head:
            return left
        if xi >= tail:
            return v_l
        rho = _invert_fan(lambda r: lax_left_deriv(r, left, law),
                          v_l.rho, left.rho, xi)
        return GasState(rho, lax_left(rho, left, law))

    if sol.outgoing_waves[0] is WaveType.SHOCK:
        if v_r.rho == right.rho:
            speed = lambda2(right, law)
        else:
            speed = (right.q - v_r.q) / (right.rho - v_r.rho)
        return v_r if xi < speed else right
    head = lambda2(v_r, law)
    tail = lambda2(right, law)
    if xi < head:
        return v_r
    if xi >= tail:
        return right
    rho = _invert_fan(lambda r: lax_right_deriv(r, right, law),
                      v_r.rho, right.rho, xi)
    return GasState(rho, lax_right(rho, right, law))
