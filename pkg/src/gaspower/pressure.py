"""Pressure laws for isentropic pipe flow and a numeric well-posedness checker.

A pressure law is any strictly increasing ``p(rho)`` on ``rho > 0``; strict
hyperbolicity of the flow equations requires ``p'(rho) > 0`` everywhere. The
checker in :func:`check_sufficient_conditions` evaluates, on a log-spaced
density grid, a set of sufficient conditions under which interface and
junction Riemann problems with sub-sonic data have a unique solution:

* concavity of the wave curves, expressed through
  ``2 p' + rho p'' >= 0`` and ``6 p' + 6 rho p'' + rho^2 p''' >= 0``;
* decay of the curves at large density, via unbounded pressure growth or
  the bound ``p' <= -p/rho``;
* controlled behaviour near vacuum, via a negative limit of ``rho * p(rho)``
  or one of three tameness conditions on the sound speed ``c = sqrt(p')``.

Any positive linear combination of laws passing these conditions passes them
again (they form a convex cone), which :func:`combine` exploits.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

# Inequality slack, relative to the magnitude of the terms being compared.
# Exact-boundary laws (e.g. p'(rho) ~ rho^2) evaluate to zero up to float
# cancellation, which scales with the term size on a grid spanning 1e-6..1e6.
REL_TOL = 1e-12


class PressureLaw:
    """Strictly increasing pressure as a function of density.

    Subclasses supply ``p`` and ``dp``; second and third derivatives default
    to central differences with step ``1e-4 * rho``. All evaluators accept
    floats or numpy arrays of positive densities.
    """

    label = "pressure-law"

    def p(self, rho):
        raise NotImplementedError

    def dp(self, rho):
        raise NotImplementedError

    def d2p(self, rho):
        h = 1e-4 * rho
        return (self.dp(rho + h) - self.dp(rho - h)) / (2.0 * h)

    def d3p(self, rho):
        h = 1e-4 * rho
        return (self.dp(rho + h) - 2.0 * self.dp(rho) + self.dp(rho - h)) / (h * h)

    def c(self, rho):
        """Sound speed sqrt(p'(rho))."""
        return np.sqrt(self.dp(rho))

    def power_form(self):
        """Return (alpha, delta) if ``p'(rho) = alpha * rho**delta``, else None.

        Used for closed-form rarefaction integrals and analytic inverses.
        """
        return None

    def rho_from_pressure(self, pressure: float) -> float:
        """Invert the (monotone) pressure law; DomainError outside its range."""
        lo, hi = 1e-9, 1e9
        for _ in range(80):
            if self.p(lo) <= pressure:
                break
            lo *= 0.5
        else:
            raise DomainError(f"pressure {pressure!r} below range of {self.label}")
        for _ in range(80):
            if self.p(hi) >= pressure:
                break
            hi *= 2.0
        else:
            raise DomainError(f"pressure {pressure!r} above range of {self.label}")
        if self.p(lo) == pressure:
            return lo
        return brentq(lambda r: self.p(r) - pressure, lo, hi, rtol=1e-15)

    def spec(self) -> str:
        """Canonical parseable description, see :func:`parse_law`."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec()}>"

    def __eq__(self, other):
        return isinstance(other, PressureLaw) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())


class GammaLaw(PressureLaw):
    """p(rho) = kappa * rho**gamma.

    Requires kappa * gamma > 0 so that p' > 0 (this admits the inverse-type
    laws with negative kappa and gamma).
    """

    def __init__(self, kappa: float, gamma: float, label: str | None = None):
        if kappa * gamma <= 0.0:
            raise DomainError(
                f"gamma law needs kappa*gamma > 0, got kappa={kappa}, gamma={gamma}"
            )
        self.kappa = float(kappa)
        self.gamma = float(gamma)
        self.label = label or f"gamma(kappa={kappa:g}, gamma={gamma:g})"

    def p(self, rho):
        return self.kappa * rho**self.gamma

    def dp(self, rho):
        return self.kappa * self.gamma * rho ** (self.gamma - 1.0)

    def d2p(self, rho):
        g = self.gamma
        return self.kappa * g * (g - 1.0) * rho ** (g - 2.0)

    def d3p(self, rho):
        g = self.gamma
        return self.kappa * g * (g - 1.0) * (g - 2.0) * rho ** (g - 3.0)

    def power_form(self):
        return (self.kappa * self.gamma, self.gamma - 1.0)

    def rho_from_pressure(self, pressure):
        ratio = pressure / self.kappa
        if ratio <= 0.0:
            raise DomainError(f"pressure {pressure!r} outside range of {self.label}")
        return ratio ** (1.0 / self.gamma)

    def spec(self):
        return f"gamma({self.kappa!r},{self.gamma!r})"


class IsothermalLaw(PressureLaw):
    """p(rho) = c^2 * rho with constant acoustic speed c."""

    def __init__(self, c: float):
        if c <= 0.0:
            raise DomainError(f"acoustic speed must be positive, got {c}")
        self.c0 = float(c)
        self.label = f"isothermal(c={c:g})"

    def p(self, rho):
        return self.c0 * self.c0 * rho

    def dp(self, rho):
        return self.c0 * self.c0 * np.ones_like(np.asarray(rho, dtype=float))

    def d2p(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))

    def d3p(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))

    def c(self, rho):
        return self.c0 * np.ones_like(np.asarray(rho, dtype=float))

    def power_form(self):
        return (self.c0 * self.c0, 0.0)

    def rho_from_pressure(self, pressure):
        if pressure <= 0.0:
            raise DomainError(f"pressure {pressure!r} outside range of {self.label}")
        return pressure / (self.c0 * self.c0)

    def spec(self):
        return f"isothermal({self.c0!r})"


class LogLaw(PressureLaw):
    """p(rho) = ln(rho); the gamma->0 member of the generalized family."""

    label = "log"

    def p(self, rho):
        return np.log(rho)

    def dp(self, rho):
        return 1.0 / np.asarray(rho, dtype=float)

    def d2p(self, rho):
        return -1.0 / np.asarray(rho, dtype=float) ** 2

    def d3p(self, rho):
        return 2.0 / np.asarray(rho, dtype=float) ** 3

    def power_form(self):
        return (1.0, -1.0)

    def rho_from_pressure(self, pressure):
        return math.exp(pressure)

    def spec(self):
        return "log"


class GeneralizedGammaLaw(PressureLaw):
    """Law defined through its derivative ``p'(rho) = alpha * rho**delta``.

    Integrating gives ``p = alpha rho^(delta+1)/(delta+1)`` for delta != -1
    and ``p = alpha ln(rho)`` for delta == -1. ``valid`` mirrors the closed
    admissibility characterization: alpha > 0 and |delta| <= 2.
    """

    def __init__(self, alpha: float, delta: float):
        if alpha == 0.0:
            raise DomainError("alpha must be nonzero")
        self.alpha = float(alpha)
        self.delta = float(delta)
        self.label = f"generalized(alpha={alpha:g}, delta={delta:g})"

    @property
    def valid(self) -> bool:
        return self.alpha > 0.0 and abs(self.delta) <= 2.0

    def p(self, rho):
        if self.delta == -1.0:
            return self.alpha * np.log(rho)
        g = self.delta + 1.0
        return self.alpha / g * rho**g

    def dp(self, rho):
        return self.alpha * rho**self.delta

    def d2p(self, rho):
        return self.alpha * self.delta * rho ** (self.delta - 1.0)

    def d3p(self, rho):
        d = self.delta
        return self.alpha * d * (d - 1.0) * rho ** (d - 2.0)

    def power_form(self):
        return (self.alpha, self.delta)

    def rho_from_pressure(self, pressure):
        if self.delta == -1.0:
            return math.exp(pressure / self.alpha)
        g = self.delta + 1.0
        ratio = pressure * g / self.alpha
        if ratio <= 0.0:
            raise DomainError(f"pressure {pressure!r} outside range of {self.label}")
        return ratio ** (1.0 / g)

    def spec(self):
        return f"generalized({self.alpha!r},{self.delta!r})"


class SumGammaLaw(PressureLaw):
    """p(rho) = (1/10) * sum_{i=1..10} rho^(1+i/5) / (1+i/5).

    Scaled so that p'(1) = 1, like the other benchmark laws.
    """

    label = "sum_gamma"
    _exponents = np.array([1.0 + i / 5.0 for i in range(1, 11)])

    def p(self, rho):
        rho = np.asarray(rho, dtype=float)
        e = self._exponents.reshape((-1,) + (1,) * rho.ndim)
        return 0.1 * np.sum(rho**e / e, axis=0)

    def dp(self, rho):
        rho = np.asarray(rho, dtype=float)
        e = self._exponents.reshape((-1,) + (1,) * rho.ndim)
        return 0.1 * np.sum(rho ** (e - 1.0), axis=0)

    def d2p(self, rho):
        rho = np.asarray(rho, dtype=float)
        e = self._exponents.reshape((-1,) + (1,) * rho.ndim)
        return 0.1 * np.sum((e - 1.0) * rho ** (e - 2.0), axis=0)

    def d3p(self, rho):
        rho = np.asarray(rho, dtype=float)
        e = self._exponents.reshape((-1,) + (1,) * rho.ndim)
        return 0.1 * np.sum((e - 1.0) * (e - 2.0) * rho ** (e - 3.0), axis=0)

    def spec(self):
        return "sum_gamma"


class GammaIntegralLaw(PressureLaw):
    """p(rho) = (rho^3 - rho)/ln(rho), i.e. the gamma-law averaged over
    exponents 1..3.

    Shipped as a curiosity; it is *not* asserted to pass the well-posedness
    checker. The removable singularity at rho = 1 is evaluated by series.
    """

    label = "gamma_integral"

    def _split(self, rho):
        rho = np.asarray(rho, dtype=float)
        u = np.log(rho)
        near = np.abs(u) < 1e-5
        return rho, u, near

    def p(self, rho):
        rho, u, near = self._split(rho)
        safe_u = np.where(near, 1.0, u)
        direct = (rho**3 - rho) / safe_u
        # (e^{3u}-e^{u})/u = 2 + 4u + 13/3 u^2 + 10/3 u^3 + O(u^4)
        series = 2.0 + 4.0 * u + (13.0 / 3.0) * u**2 + (10.0 / 3.0) * u**3
        out = np.where(near, series, direct)
        return out if out.ndim else float(out)

    def dp(self, rho):
        rho, u, near = self._split(rho)
        safe_u = np.where(near, 1.0, u)
        direct = ((3.0 * rho**2 - 1.0) * safe_u - (rho**3 - rho) / rho) / safe_u**2
        # d/drho with rho = e^u: 4 + 26/3 u + 10 u^2 + O(u^3), times e^{-u}... the
        # series below is for dp at rho = e^u directly.
        series = (4.0 + (26.0 / 3.0) * u + 10.0 * u**2) / rho
        out = np.where(near, series, direct)
        return out if out.ndim else float(out)

    def spec(self):
        return "gamma_integral"


class LinearCombinationLaw(PressureLaw):
    """Pointwise positive linear combination of pressure laws."""

    def __init__(self, laws, weights):
        laws = tuple(laws)
        weights = tuple(float(w) for w in weights)
        if not laws:
            raise DomainError("linear combination needs at least one law")
        if len(weights) != len(laws):
            raise DomainError("one weight per law required")
        if any(w <= 0.0 for w in weights):
            raise DomainError(f"weights must be positive, got {weights}")
        self.laws = laws
        self.weights = weights
        self.label = "combination(" + ", ".join(l.label for l in laws) + ")"

    def _sum(self, attr, rho):
        total = self.weights[0] * getattr(self.laws[0], attr)(rho)
        for w, law in zip(self.weights[1:], self.laws[1:]):
            total = total + w * getattr(law, attr)(rho)
        return total

    def p(self, rho):
        return self._sum("p", rho)

    def dp(self, rho):
        return self._sum("dp", rho)

    def d2p(self, rho):
        return self._sum("d2p", rho)

    def d3p(self, rho):
        return self._sum("d3p", rho)

    def power_form(self):
        forms = [law.power_form() for law in self.laws]
        if any(f is None for f in forms):
            return None
        deltas = {f[1] for f in forms}
        if len(deltas) > 1:
            return None
        alpha = sum(w * f[0] for w, f in zip(self.weights, forms))
        return (alpha, forms[0][1])

    def spec(self):
        terms = ",".join(f"{w!r}*{law.spec()}" for w, law in zip(self.weights, self.laws))
        return f"linear_combination({terms})"


def inverse_law() -> GammaLaw:
    """p(rho) = -1/rho (a gamma law with kappa = gamma = -1); p'(1) = 1."""
    return GammaLaw(-1.0, -1.0, label="inverse")


def sound_speed(law: PressureLaw, rho: float) -> float:
    """c(rho) = sqrt(p'(rho)); densities must be strictly positive."""
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError(f"density must be positive, got {rho!r}")
    return law.c(rho)


def combine(laws, weights) -> LinearCombinationLaw:
    """Positive linear combination of pressure laws.

    If every member passes :func:`check_sufficient_conditions`, so does the
    combination (the conditions are positively linear in p).
    """
    return LinearCombinationLaw(laws, weights)


def classify_generalized_gamma(alpha: float, delta: float) -> bool:
    """Closed-form admissibility of p'(rho) = alpha * rho**delta.

    True exactly when alpha > 0 and |delta| <= 2, boundary included.
    """
    return alpha > 0.0 and abs(delta) <= 2.0


def default_grid(head: float = 1e-6, tail: float = 1e6, n: int = 10_000) -> np.ndarray:
    """Log-spaced density grid used by the well-posedness checker."""
    return np.geomspace(head, tail, n)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the sufficient-condition checks for one pressure law.

    The two ``concave_*`` flags are the curvature inequalities; the two
    ``pressure_*`` flags are the alternative large-density conditions; the
    remaining four are the alternative near-vacuum conditions. ``inconclusive``
    is set when a limit test could not fit a clean trend (the corresponding
    flag is then conservatively False).
    """

    law_label: str
    concave_rarefaction: bool        # 2 p' + rho p''           >= 0
    concave_shock: bool              # 6 p' + 6 rho p'' + rho^2 p''' >= 0
    pressure_unbounded: bool         # p -> +inf  as rho -> inf
    pressure_decay_bound: bool       # p' <= -p/rho  everywhere
    vacuum_limit_negative: bool      # rho * p(rho) -> -p0 < 0
    sound_speed_vanishes_tamely: bool   # c -> 0 and 2 p' - rho p'' >= 0
    sound_speed_finite_limit: bool      # 0 < lim c < inf
    sound_speed_integrable_blowup: bool  # rho^eta c -> (0, inf), eta in (0,1)
    inconclusive: bool
    worst_violation: float
    grid_head: float
    grid_tail: float
    grid_size: int

    @property
    def concavity_ok(self) -> bool:
        return self.concave_rarefaction and self.concave_shock

    @property
    def growth_ok(self) -> bool:
        return self.pressure_unbounded or self.pressure_decay_bound

    @property
    def vacuum_ok(self) -> bool:
        return (
            self.vacuum_limit_negative
            or self.sound_speed_vanishes_tamely
            or self.sound_speed_finite_limit
            or self.sound_speed_integrable_blowup
        )

    @property
    def valid(self) -> bool:
        return self.concavity_ok and self.growth_ok and self.vacuum_ok

    def summary(self) -> str:
        rows = [
            ("concave (rarefaction part)", self.concave_rarefaction),
            ("concave (shock part)", self.concave_shock),
            ("pressure unbounded", self.pressure_unbounded),
            ("pressure decay bound", self.pressure_decay_bound),
            ("vacuum limit negative", self.vacuum_limit_negative),
            ("sound speed vanishes tamely", self.sound_speed_vanishes_tamely),
            ("sound speed finite limit", self.sound_speed_finite_limit),
            ("sound speed integrable blow-up", self.sound_speed_integrable_blowup),
        ]
        lines = [f"pressure law: {self.law_label}"]
        lines += [f"  {name:32s} {'yes' if ok else 'no'}" for name, ok in rows]
        lines.append(f"  worst violation: {self.worst_violation:.3e}")
        if self.inconclusive:
            lines.append("  note: at least one limit trend was inconclusive")
        lines.append(f"  => {'VALID' if self.valid else 'INVALID'}")
        return "\n".join(lines)


def _nonneg(expr: np.ndarray, scale: np.ndarray) -> tuple[bool, float]:
    """Check expr >= 0 up to REL_TOL * max(1, scale); return (ok, worst)."""
    slack = REL_TOL * np.maximum(1.0, scale)
    violation = np.maximum(0.0, -(expr + slack))
    worst = float(np.max(violation / np.maximum(1.0, scale))) if violation.size else 0.0
    return bool(np.all(expr >= -slack)), worst


def check_sufficient_conditions(law: PressureLaw, rho_grid=None) -> ValidityReport:
    """Evaluate the well-posedness conditions numerically on a density grid.

    Pointwise inequalities are checked at every grid point with a slack of
    ``REL_TOL`` relative to the magnitude of the compared terms. The limits
    rho -> 0 and rho -> inf are classified from the trend of the grid-endpoint
    decades, with a factor-of-ten extrapolation consistency check; a trend
    that fits no clean pattern yields ``inconclusive`` instead of a guess.
    """
    grid = default_grid() if rho_grid is None else np.asarray(rho_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("density grid must be a 1-d array with >= 2 points")
    if np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise DomainError("density grid must be positive and strictly increasing")

    try:
        p = np.asarray(law.p(grid), dtype=float)
        dp = np.asarray(law.dp(grid), dtype=float)
        d2p = np.asarray(law.d2p(grid), dtype=float)
        d3p = np.asarray(law.d3p(grid), dtype=float)
    except Exception as exc:  # propagate with the offending density range
        raise DomainError(
            f"evaluation of {law.label} failed on grid "
            f"[{grid[0]:g}, {grid[-1]:g}]: {exc}"
        ) from exc
    bad = ~np.isfinite(p) | ~np.isfinite(dp)
    if np.any(bad):
        raise DomainError(
            f"{law.label} is not finite at rho={grid[bad][0]:g}"
        )
    if np.any(dp <= 0.0):
        idx = int(np.argmax(dp <= 0.0))
        raise DomainError(
            f"{law.label} is not strictly increasing at rho={grid[idx]:g}"
        )

    worst = 0.0
    growth_trend_gray = False
    vacuum_trend_gray = False

    # Curvature inequalities, pointwise on the grid.
    expr1 = 2.0 * dp + grid * d2p
    scale1 = 2.0 * np.abs(dp) + np.abs(grid * d2p)
    c1a, w = _nonneg(expr1, scale1)
    worst = max(worst, w)

    expr2 = 6.0 * dp + 6.0 * grid * d2p + grid**2 * d3p
    scale2 = 6.0 * np.abs(dp) + 6.0 * np.abs(grid * d2p) + np.abs(grid**2 * d3p)
    c1b, w = _nonneg(expr2, scale2)
    worst = max(worst, w)

    # Large-density behaviour: decade-increment trend extended one factor of
    # ten beyond the tail, so slowly decaying transients (e.g. a bounded
    # component next to a logarithmic one) cannot mask the true growth.
    tail = grid[-1]
    p_at = [float(law.p(t)) for t in (tail, 10.0 * tail, 100.0 * tail)]
    d2, d1 = p_at[1] - p_at[0], p_at[2] - p_at[1]
    if d1 > 0.0 and d2 > 0.0 and d1 >= 0.95 * d2:
        unbounded = True
    elif d1 <= 0.0 or (d2 > 0.0 and d1 <= 0.85 * d2):
        unbounded = False
    else:
        unbounded = False
        growth_trend_gray = True

    expr_decay = -p / grid - dp
    scale_decay = np.abs(p / grid) + np.abs(dp)
    decay_bound, w = _nonneg(expr_decay, scale_decay)
    worst = max(worst, w)

    # Near-vacuum behaviour at the grid head: geometric extrapolation of
    # rho * p(rho) from three decades (exact for power-plus-constant tails,
    # which removes slowly decaying transients before the sign test).
    head = grid[0]
    v1, v2, v3 = (s * head * float(law.p(s * head)) for s in (1.0, 10.0, 100.0))
    g1, g2 = v1 - v2, v2 - v3
    if abs(g1) <= 1e-12 * max(1.0, abs(v1)):
        limit = v1
        transient = 0.0
    elif g2 != 0.0 and 0.0 < g1 / g2 <= 0.95:
        r = g1 / g2
        transient = -g1 * r / (1.0 - r)
        limit = v1 - transient
    else:
        limit = math.inf  # diverging or unclassifiable: not a finite limit
        transient = 0.0
    vacuum_negative = (
        math.isfinite(limit)
        and limit < 0.0
        and abs(limit) >= 1e-3 * abs(transient)
    )

    c_h = float(law.c(head))
    c_10h = float(law.c(10.0 * head))
    c_100h = float(law.c(100.0 * head))
    # Local power exponent of c ~ rho^(-s) over the first two decades.
    s1 = math.log10(c_h / c_10h)
    s2 = math.log10(c_10h / c_100h)
    tame_vanish = finite_limit = integrable_blowup = False
    if abs(s1 - s2) > 0.02:
        vacuum_trend_gray = True
    else:
        s = 0.5 * (s1 + s2)
        if s <= -0.005:  # c decreasing towards 0 near vacuum
            expr3 = 2.0 * dp - grid * d2p
            scale3 = 2.0 * np.abs(dp) + np.abs(grid * d2p)
            tame_vanish, w = _nonneg(expr3, scale3)
            worst = max(worst, w)
        elif abs(s) < 0.005:
            finite_limit = c_h > 0.0 and math.isfinite(c_h)
        elif s < 0.985:
            integrable_blowup = True
        elif s <= 1.005:
            vacuum_trend_gray = True
        # s beyond ~1: blow-up too strong for an integrable exponent

    # A gray trend only matters when no definite condition already settles
    # the corresponding alternative.
    vacuum_any = vacuum_negative or tame_vanish or finite_limit or integrable_blowup
    inconclusive = (growth_trend_gray and not decay_bound) or (
        vacuum_trend_gray and not vacuum_any
    )

    return ValidityReport(
        law_label=law.label,
        concave_rarefaction=c1a,
        concave_shock=c1b,
        pressure_unbounded=unbounded,
        pressure_decay_bound=decay_bound,
        vacuum_limit_negative=vacuum_negative,
        sound_speed_vanishes_tamely=tame_vanish,
        sound_speed_finite_limit=finite_limit,
        sound_speed_integrable_blowup=integrable_blowup,
        inconclusive=inconclusive,
        worst_violation=worst,
        grid_head=float(grid[0]),
        grid_tail=float(grid[-1]),
        grid_size=int(grid.size),
    )


# -- textual law selection ---------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse_law(text: str) -> PressureLaw:
    """Build a pressure law from a selector string.

    Grammar (whitespace-insensitive)::

        law  ::= name | name "(" args ")"
        args ::= number-list            for gamma/isothermal/generalized
               | term ("," term)*       for linear_combination
        term ::= [number "*"] law

    Known names: gamma(kappa,gamma), isothermal(c), inverse, log, sum_gamma,
    gamma_integral, generalized(alpha,delta), linear_combination(...).
    """
    law, pos = _parse_law(text, 0)
    if text[pos:].strip():
        raise DomainError(f"trailing input in law spec: {text[pos:]!r}")
    return law


def _skip_ws(text, pos):
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_number(text, pos):
    m = re.match(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", text[pos:])
    if not m:
        raise DomainError(f"expected a number at {text[pos:]!r}")
    return float(m.group(0)), pos + m.end()


def _parse_law(text, pos):
    pos = _skip_ws(text, pos)
    m = _NAME_RE.match(text, pos)
    if not m:
        raise DomainError(f"expected a law name at {text[pos:]!r}")
    name = m.group(0).lower()
    pos = _skip_ws(text, m.end())
    args_present = pos < len(text) and text[pos] == "("

    if name == "inverse":
        return inverse_law(), pos
    if name == "log":
        return LogLaw(), pos
    if name == "sum_gamma":
        return SumGammaLaw(), pos
    if name == "gamma_integral":
        return GammaIntegralLaw(), pos

    if not args_present:
        raise DomainError(f"law {name!r} requires arguments")
    pos += 1  # consume "("

    if name in ("gamma", "isothermal", "generalized"):
        numbers = []
        while True:
            pos = _skip_ws(text, pos)
            value, pos = _parse_number(text, pos)
            numbers.append(value)
            pos = _skip_ws(text, pos)
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            break
        if pos >= len(text) or text[pos] != ")":
            raise DomainError(f"expected ')' at {text[pos:]!r}")
        pos += 1
        if name == "gamma":
            if len(numbers) != 2:
                raise DomainError("gamma(kappa,gamma) takes two arguments")
            return GammaLaw(numbers[0], numbers[1]), pos
        if name == "isothermal":
            if len(numbers) != 1:
                raise DomainError("isothermal(c) takes one argument")
            return IsothermalLaw(numbers[0]), pos
        if len(numbers) != 2:
            raise DomainError("generalized(alpha,delta) takes two arguments")
        return GeneralizedGammaLaw(numbers[0], numbers[1]), pos

    if name == "linear_combination":
        laws, weights = [], []
        while True:
            pos = _skip_ws(text, pos)
            weight = 1.0
            save = pos
            try:
                weight, pos = _parse_number(text, pos)
                pos = _skip_ws(text, pos)
                if pos < len(text) and text[pos] == "*":
                    pos += 1
                else:
                    weight, pos = 1.0, save
            except DomainError:
                pos = save
            law, pos = _parse_law(text, pos)
            laws.append(law)
            weights.append(weight)
            pos = _skip_ws(text, pos)
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            break
        if pos >= len(text) or text[pos] != ")":
            raise DomainError(f"expected ')' at {text[pos:]!r}")
        return LinearCombinationLaw(laws, weights), pos + 1

    raise DomainError(f"unknown pressure law {name!r}")
