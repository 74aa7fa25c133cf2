"""Wave curves for the isentropic flow equations.

For a left datum ``(rho_l, q_l)`` the states reachable through a single
1-wave form the curve ``lax_left``; mirrored, ``lax_right`` collects the
states reachable from a right datum through a single 2-wave. Both consist of
a rarefaction branch (integral of c(s)/s) below the datum density and a shock
branch (square root of the auxiliary :func:`f_shock`) above it, joined with
C^1 regularity at the datum.

Junction admissibility is governed by two per-pipe densities derived from
these curves: ``rho_min``, where the curve's derivative vanishes (waves below
it would run into the junction), and ``rho_max``, where the opposite
eigenvalue along the curve changes sign (traces beyond it are super-sonic).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, InadmissibleError, NumericsError
from .pressure import PressureLaw


@dataclass(frozen=True)
class GasState:
    """Density [kg/m^3] and momentum [kg/(m^2 s)] of a gas parcel."""

    rho: float
    q: float

    def __post_init__(self):
        if not (self.rho > 0.0):
            raise DomainError(f"density must be positive, got {self.rho!r}")

    @property
    def u(self) -> float:
        """Flow velocity q/rho."""
        return self.q / self.rho

    def mirrored(self) -> "GasState":
        return GasState(self.rho, -self.q)

    def is_subsonic(self, law: PressureLaw) -> bool:
        return abs(self.u) < float(law.c(self.rho))


class WaveType(enum.Enum):
    SHOCK = "shock"
    RAREFACTION = "rarefaction"

    def __str__(self):  # compact r/s notation used in reports
        return "s" if self is WaveType.SHOCK else "r"


class Side(enum.Enum):
    """Orientation of a pipe at a junction: flow into it or out of it."""

    IN = "in"
    OUT = "out"


def require_subsonic(state: GasState, law: PressureLaw, what: str = "state") -> None:
    c = float(law.c(state.rho))
    if not abs(state.u) < c:
        raise DomainError(
            f"{what} ({state.rho:g}, {state.q:g}) is not sub-sonic: "
            f"|u|={abs(state.u):g} >= c={c:g}"
        )


def lambda1(state: GasState, law: PressureLaw) -> float:
    """Slow characteristic speed u - c."""
    return state.u - float(law.c(state.rho))


def lambda2(state: GasState, law: PressureLaw) -> float:
    """Fast characteristic speed u + c."""
    return state.u + float(law.c(state.rho))


def f_shock(rho: float, rho_l: float, law: PressureLaw) -> float:
    """Shock auxiliary (rho/rho_l)(rho - rho_l)(p(rho) - p(rho_l)) >= 0."""
    if rho < rho_l:
        raise DomainError(f"shock branch needs rho >= rho_l, got {rho} < {rho_l}")
    value = (rho / rho_l) * (rho - rho_l) * (float(law.p(rho)) - float(law.p(rho_l)))
    # Monotonicity of p makes this non-negative; clip float noise at the kink.
    return max(0.0, value)


def _f_shock_deriv(rho: float, rho_l: float, law: PressureLaw) -> float:
    dp = float(law.p(rho)) - float(law.p(rho_l))
    return (2.0 * rho - rho_l) / rho_l * dp + (rho / rho_l) * (rho - rho_l) * float(
        law.dp(rho)
    )


def rarefaction_integral(law: PressureLaw, rho: float, rho_ref: float) -> float:
    """Integral of c(s)/s over [rho, rho_ref] (signed).

    Closed form when p' is a pure power of density; adaptive quadrature with
    absolute tolerance 1e-12 otherwise.
    """
    if rho <= 0.0 or rho_ref <= 0.0:
        raise DomainError("rarefaction integral needs positive densities")
    if rho == rho_ref:
        return 0.0
    form = law.power_form()
    if form is not None:
        alpha, delta = form
        root_alpha = math.sqrt(alpha)
        if delta == 0.0:
            return root_alpha * math.log(rho_ref / rho)
        half = 0.5 * delta
        return root_alpha * (rho_ref**half - rho**half) / half
    lo, hi = math.log(rho), math.log(rho_ref)
    anti = _sound_speed_antiderivative(law)
    if anti is not None and _ANTI_LO <= min(lo, hi) and max(lo, hi) <= _ANTI_HI:
        return float(anti(hi) - anti(lo))
    return _quad_log_integral(law, lo, hi)


def _quad_log_integral(law: PressureLaw, lo: float, hi: float) -> float:
    # Substituting s = e^u turns the possibly singular c(s)/s into the
    # smooth integrand c(e^u), which adaptive quadrature handles well even
    # for intervals reaching far towards vacuum.
    value, abserr = quad(
        lambda u: float(law.c(math.exp(u))), lo, hi,
        epsabs=1e-12, epsrel=1e-12, limit=200,
    )
    if abserr > 1e-8 * max(1.0, abs(value)):
        raise NumericsError(
            f"rarefaction integral on [{math.exp(lo):g}, {math.exp(hi):g}] "
            f"for {law.label} reached error estimate {abserr:.2e}"
        )
    return value


_ANTI_LO = math.log(1e-12)
_ANTI_HI = math.log(1e12)


def _sound_speed_antiderivative(law: PressureLaw):
    """Cached spline antiderivative of c(e^u), validated against quadrature.

    Laws whose sound speed is too wild for the spline (verification fails)
    fall back to adaptive quadrature permanently.
    """
    cached = getattr(law, "_rarefaction_antiderivative", "missing")
    if cached != "missing":
        return cached
    try:
        from scipy.interpolate import CubicSpline

        u = np.linspace(_ANTI_LO, _ANTI_HI, 5600)
        values = np.asarray(law.c(np.exp(u)), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("sound speed not finite on the cache range")
        anti = CubicSpline(u, values).antiderivative()
        for a, b in ((0.3, 1.7), (-7.0, -1.0), (1.0, 9.0), (-13.0, 0.5)):
            exact = _quad_log_integral(law, a, b)
            if abs(float(anti(b) - anti(a)) - exact) > 1e-9 * max(1.0, abs(exact)):
                raise ValueError("spline antiderivative too inaccurate")
    except Exception:
        anti = None
    law._rarefaction_antiderivative = anti
    return anti


def lax_left(rho: float, left: GasState, law: PressureLaw) -> float:
    """Momentum on the 1-wave curve through ``left`` at density ``rho``."""
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho!r}")
    if rho <= left.rho:
        return rho * (left.u + rarefaction_integral(law, rho, left.rho))
    return rho * left.u - math.sqrt(f_shock(rho, left.rho, law))


def lax_right(rho: float, right: GasState, law: PressureLaw) -> float:
    """Momentum on the 2-wave curve through ``right`` at density ``rho``."""
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho!r}")
    if rho <= right.rho:
        return rho * (right.u - rarefaction_integral(law, rho, right.rho))
    return rho * right.u + math.sqrt(f_shock(rho, right.rho, law))


def lax_left_deriv(rho: float, left: GasState, law: PressureLaw) -> float:
    """d/drho of :func:`lax_left`.

    At the branch kink rho == rho_l the rarefaction-side limit u - c(rho_l)
    is returned (the branches agree there in value and first derivative).
    """
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho!r}")
    if rho <= left.rho:
        return (
            left.u
            + rarefaction_integral(law, rho, left.rho)
            - float(law.c(rho))
        )
    f = f_shock(rho, left.rho, law)
    if f == 0.0:
        return left.u - float(law.c(left.rho))
    return left.u - _f_shock_deriv(rho, left.rho, law) / (2.0 * math.sqrt(f))


def lax_right_deriv(rho: float, right: GasState, law: PressureLaw) -> float:
    """d/drho of :func:`lax_right` (rarefaction-side limit at the kink)."""
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho!r}")
    if rho <= right.rho:
        return (
            right.u
            - rarefaction_integral(law, rho, right.rho)
            + float(law.c(rho))
        )
    f = f_shock(rho, right.rho, law)
    if f == 0.0:
        return right.u + float(law.c(right.rho))
    return right.u + _f_shock_deriv(rho, right.rho, law) / (2.0 * math.sqrt(f))


def _curve_deriv_in_coords(side: Side):
    """In-side derivative function; the out side mirrors onto it."""
    if side is Side.IN:
        return lax_left_deriv
    return lax_right_deriv


def rho_min(state: GasState, side: Side, law: PressureLaw) -> float:
    """Density below which the pipe's junction wave would have the wrong sign.

    Root of the relevant curve derivative when it exists (unique for concave
    curves), 0 otherwise. Refined to |drho| <= 1e-12 * max(1, rho).
    """
    require_subsonic(state, law)
    if side is Side.OUT:
        # lax_right'(rho; U) = -lax_left'(rho; mirror U): same root.
        return rho_min(state.mirrored(), Side.IN, law)
    lo = 1e-9 * state.rho
    g_lo = lax_left_deriv(lo, state, law)
    if not math.isfinite(g_lo) or g_lo <= 0.0:
        return 0.0
    # Sub-sonic datum: derivative at the datum density is u - c < 0.
    hi = state.rho
    root = brentq(
        lambda r: lax_left_deriv(r, state, law), lo, hi,
        xtol=1e-15 * max(1.0, state.rho), rtol=1e-15,
    )
    return float(root)


def rho_max(state: GasState, side: Side, law: PressureLaw,
            search_factor: float = 1e6) -> float:
    """Smallest density at which the trace turns super-sonic, +inf if none.

    For an in-side pipe this is the first sign change of the fast eigenvalue
    along the 1-curve; the search scans log-spaced densities up to
    ``search_factor * state.rho`` and reports +inf beyond that bound.
    """
    require_subsonic(state, law)
    if side is Side.OUT:
        return rho_max(state.mirrored(), Side.IN, law, search_factor)

    def fast_eig(r: float) -> float:
        return lax_left(r, state, law) / r + float(law.c(r))

    grid = np.geomspace(1e-9 * state.rho, search_factor * state.rho, 800)
    values = np.array([fast_eig(r) for r in grid])
    negative = np.nonzero(values < 0.0)[0]
    if negative.size == 0:
        return math.inf
    k = int(negative[0])
    if k == 0:
        return float(grid[0])
    root = brentq(fast_eig, grid[k - 1], grid[k],
                  xtol=1e-15 * max(1.0, state.rho), rtol=1e-15)
    return float(root)


def classify_wave(rho_star: float, state: GasState, side: Side,
                  law: PressureLaw) -> WaveType:
    """Wave type connecting a junction trace at ``rho_star`` to ``state``.

    Rarefaction for rho_star <= rho (branches coincide at equality), shock
    above. Densities at or below ``rho_min`` are inadmissible.
    """
    if rho_star <= 0.0:
        raise DomainError(f"density must be positive, got {rho_star!r}")
    floor = rho_min(state, side, law)
    if rho_star <= floor:
        raise InadmissibleError(
            f"trace density {rho_star:g} at or below junction minimum {floor:g}"
        )
    return WaveType.RAREFACTION if rho_star <= state.rho else WaveType.SHOCK
