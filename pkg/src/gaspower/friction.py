"""Turbulent wall friction for pipe flow.

The momentum source is S(rho, q) = -lambda(q)/(2 d) * q|q|/rho with the
friction factor lambda given implicitly by the Prandtl-Colebrook relation

    1/sqrt(lambda) = -2 log10( 2.51/(Re sqrt(lambda)) + k/(3.71 d) ),

where Re = d|q|/eta. The relation degenerates as Re -> 0, so below a small
Reynolds floor the product lambda * q|q| is replaced by the straight line
through the origin matching the floor value, which keeps S continuous and
odd in q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_LN10 = math.log(10.0)


def colebrook_friction_factor(reynolds, diameter: float, roughness: float,
                              tol: float = 1e-14, max_iter: int = 200):
    """Friction factor from the Prandtl-Colebrook relation (vectorized).

    Fixed-point iteration on x = 1/sqrt(lambda), started from lambda = 0.02;
    stops when the update falls below ``tol``. Reynolds numbers enter by
    magnitude and must be positive.
    """
    re = np.abs(np.asarray(reynolds, dtype=float))
    if np.any(re <= 0.0):
        raise DomainError("Colebrook relation needs a nonzero Reynolds number")
    kappa = roughness / (3.71 * diameter)
    x = np.full_like(re, 1.0 / math.sqrt(0.02))
    for _ in range(max_iter):
        x_new = -2.0 * np.log10(2.51 * x / re + kappa)
        if np.all(np.abs(x_new - x) <= tol * np.maximum(1.0, np.abs(x_new))):
            x = x_new
            break
        x = x_new
    lam = 1.0 / (x * x)
    return lam if lam.ndim else float(lam)


def _colebrook_dlambda_dre(lam, re, diameter: float, roughness: float):
    """d lambda / d Re by implicit differentiation of the fixed point."""
    kappa = roughness / (3.71 * diameter)
    x = 1.0 / np.sqrt(lam)
    u = 2.51 * x / re + kappa
    a = 2.0 / _LN10
    dx_dre = (a * 2.51 * x / (u * re * re)) / (1.0 + a * 2.51 / (u * re))
    return -2.0 / x**3 * dx_dre


def friction_source(rho, q, pipe, model: "FrictionModel | None" = None):
    """Momentum source of a pipe: -lambda(q)/(2 d) * q|q|/rho.

    ``pipe`` supplies diameter and roughness; ``model`` the viscosity and
    regularization (defaults to the standard model).
    """
    model = model if model is not None else FrictionModel()
    return model.source(rho, q, pipe.diameter, pipe.roughness)


@dataclass
class FrictionModel:
    """Momentum friction source with Reynolds-floor regularization."""

    eta: float = 1e-5          # dynamic viscosity [kg/(m s)]
    enabled: bool = True
    re_floor: float = 100.0

    def __post_init__(self):
        if self.eta <= 0.0:
            raise DomainError(f"viscosity must be positive, got {self.eta}")

    def _weighted_drag(self, q, diameter: float, roughness: float):
        """lambda(q) * q|q|, linearly interpolated to 0 below the Re floor."""
        q = np.asarray(q, dtype=float)
        q_floor = self.re_floor * self.eta / diameter
        lam_floor = colebrook_friction_factor(self.re_floor, diameter, roughness)
        drag_floor = lam_floor * q_floor * q_floor
        re = np.maximum(np.abs(q) * diameter / self.eta, self.re_floor)
        lam = colebrook_friction_factor(re, diameter, roughness)
        turbulent = lam * q * np.abs(q)
        linear = drag_floor * q / q_floor
        return np.where(np.abs(q) < q_floor, linear, turbulent)

    def source(self, rho, q, diameter: float, roughness: float):
        """S(rho, q); zero when friction is disabled."""
        rho = np.asarray(rho, dtype=float)
        if not self.enabled:
            return np.zeros_like(rho)
        return -self._weighted_drag(q, diameter, roughness) / (2.0 * diameter * rho)

    def source_with_derivatives(self, rho, q, diameter: float, roughness: float):
        """(S, dS/drho, dS/dq) for implicit time integration."""
        rho = np.asarray(rho, dtype=float)
        q = np.asarray(q, dtype=float)
        if not self.enabled:
            z = np.zeros_like(rho)
            return z, z.copy(), z.copy()
        s = self.source(rho, q, diameter, roughness)
        ds_drho = -s / rho

        q_floor = self.re_floor * self.eta / diameter
        lam_floor = colebrook_friction_factor(self.re_floor, diameter, roughness)
        drag_floor = lam_floor * q_floor * q_floor
        re = np.maximum(np.abs(q) * diameter / self.eta, self.re_floor)
        lam = colebrook_friction_factor(re, diameter, roughness)
        dlam_dre = _colebrook_dlambda_dre(lam, re, diameter, roughness)
        dre_dq = diameter / self.eta * np.sign(q)
        ddrag_dq = dlam_dre * dre_dq * q * np.abs(q) + 2.0 * lam * np.abs(q)
        ddrag_dq = np.where(np.abs(q) < q_floor, drag_floor / q_floor, ddrag_dq)
        ds_dq = -ddrag_dq / (2.0 * diameter * rho)
        return s, ds_drho, ds_dq
