"""Problem definitions: coefficients, fluxes, initial/boundary data, domains.

A PDEProblem describes
    c(x) v_t - a v_xxt + alpha v_x + beta v_xx + gamma f(v)_x = F(x, t)
on a physical interval (A, B) with Dirichlet values (S_L, S_R).
map_to_reference rescales everything onto (-1, 1), where the solvers live.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class AffineDomainMap:
    """Affine bijection between a physical interval (A, B) and (-1, 1)."""

    A: float
    B: float

    def __post_init__(self):
        if not self.B > self.A:
            raise ValueError("degenerate interval: need A < B")

    @property
    def scale(self):
        """d(xi)/dx = 2 / (B - A)."""
        return 2.0 / (self.B - self.A)

    def to_reference(self, x):
        return (2.0 * np.asarray(x, dtype=float) - (self.A + self.B)) / (self.B - self.A)

    def from_reference(self, xi):
        return self.A + (np.asarray(xi, dtype=float) + 1.0) * (self.B - self.A) / 2.0


@dataclass(frozen=True)
class PDEProblem:
    """Coefficients and data of one initial-boundary value problem."""

    domain: Tuple[float, float] = (-1.0, 1.0)
    c: float = 1.0
    a: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    flux: Optional[Callable] = None
    source: Optional[Callable] = None
    boundary: Tuple[float, float] = (0.0, 0.0)
    v0: Callable = field(default=lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    flux_shift: Optional[Callable] = None

    def __post_init__(self):
        xs = np.linspace(self.domain[0], self.domain[1], 17)
        for name, coeff in (("a", self.a), ("c", self.c)):
            vals = coeff(xs) if callable(coeff) else np.full_like(xs, float(coeff))
            if not np.all(np.asarray(vals) > 0):
                raise ValueError(f"coefficient {name} must be positive on the domain")


def map_to_reference(problem):
    """Rescale a problem onto (-1, 1); derivative orders pick up scale powers.

    With s = 2/(B-A) and xi the reference coordinate, the transformed
    equation is c v_t - a s^2 v_xixit + alpha s v_xi + beta s^2 v_xixi
    + gamma s f(v)_xi = F(x(xi), t). Returns (reference problem, map).
    """
    A, B = problem.domain
    dom = AffineDomainMap(A, B)
    if (A, B) == (-1.0, 1.0):
        return problem, dom
    s = dom.scale

    def wrap_x(fn):
        return None if fn is None else (lambda xi: fn(dom.from_reference(xi)))

    def wrap_xt(fn):
        return None if fn is None else (lambda xi, t: fn(dom.from_reference(xi), t))

    scale_coeff = (lambda fn, p: (lambda xi: fn(dom.from_reference(xi)) * s**p)
                   if callable(fn) else fn * s**p)
    ref = replace(
        problem,
        domain=(-1.0, 1.0),
        c=wrap_x(problem.c) if callable(problem.c) else problem.c,
        a=scale_coeff(problem.a, 2),
        alpha=scale_coeff(problem.alpha, 1),
        beta=scale_coeff(problem.beta, 2),
        gamma=scale_coeff(problem.gamma, 1),
        source=wrap_xt(problem.source),
        v0=wrap_x(problem.v0),
        flux_shift=wrap_x(problem.flux_shift),
    )
    return ref, dom


def flux_burgers(v):
    """f(v) = v^2."""
    v = np.asarray(v, dtype=float)
    return v * v


def flux_porous(v):
    """Two-phase flow fractional flux, clamped to [0, 1] outside the unit range.

    f(v) = v^2 / (v^2 + 2 (1-v)^2) on [0, 1]; 0 below, 1 above. Continuous,
    S-shaped, nondecreasing, with f(0) = 0 and f(1) = 1.
    """
    v = np.asarray(v, dtype=float)
    vc = np.clip(v, 0.0, 1.0)
    out = vc**2 / (vc**2 + 2.0 * (1.0 - vc) ** 2)
    if out.ndim == 0:
        return float(out)
    return out


def builtin_initial_data(name, S_L=None, S_R=None):
    """Named initial data used by the experiment registry.

    square_pulse          indicator of |x| <= 1/2
    tent                  1 - |x|
    piecewise_quadratic   1 + 2x + x^2 on [-1,0], 1 + 2x - 3x^2 on [0,1]
    riemann               S_L for x < 0, S_R for x >= 0
    sin_pi                sin(pi x)
    sech                  1 / cosh(x)
    """
    if name == "square_pulse":
        return lambda x: np.where(np.abs(np.asarray(x, dtype=float)) <= 0.5, 1.0, 0.0)
    if name == "tent":
        return lambda x: 1.0 - np.abs(np.asarray(x, dtype=float))
    if name == "piecewise_quadratic":
        def pq(x):
            x = np.asarray(x, dtype=float)
            return np.where(x <= 0, 1.0 + 2.0 * x + x**2, 1.0 + 2.0 * x - 3.0 * x**2)
        return pq
    if name == "riemann":
        if S_L is None or S_R is None:
            raise ValueError("riemann data needs S_L and S_R")
        return lambda x: np.where(np.asarray(x, dtype=float) < 0, float(S_L), float(S_R))
    if name == "sin_pi":
        return lambda x: np.sin(np.pi * np.asarray(x, dtype=float))
    if name == "sech":
        return lambda x: 1.0 / np.cosh(np.asarray(x, dtype=float))
    raise ValueError(f"unknown initial data name {name!r}")


def lift_boundary(problem):
    """Homogenize constant Dirichlet data by subtracting the linear lift.

    With l(xi) = S_L + (S_R - S_L)(xi + 1)/2 and w = v - l, the w-problem has
    zero boundary values, initial data v0 - l, source F - alpha l', and the
    flux evaluated at w + l (recorded in flux_shift). l'' = l_t = 0, so no
    other terms appear. Expects a problem already on (-1, 1).
    """
    if problem.domain != (-1.0, 1.0):
        raise ValueError("lift_boundary expects a reference-domain problem")
    S_L, S_R = problem.boundary
    if S_L == 0.0 and S_R == 0.0:
        return problem, (lambda xi: np.zeros_like(np.asarray(xi, dtype=float)))

    def lift(xi):
        xi = np.asarray(xi, dtype=float)
        return S_L + (S_R - S_L) * (xi + 1.0) / 2.0

    dlift = (S_R - S_L) / 2.0
    alpha = problem.alpha
    old_source = problem.source

    def source(xi, t):
        xi = np.asarray(xi, dtype=float)
        base = old_source(xi, t) if old_source is not None else np.zeros_like(xi)
        return base - alpha * dlift

    old_v0 = problem.v0
    homog = replace(
        problem,
        boundary=(0.0, 0.0),
        v0=lambda xi: old_v0(xi) - lift(xi),
        source=source,
        flux_shift=lift,
    )
    return homog, lift
