"""SDIRK-SSP time stepping, forward Euler, and the SSP step-size bound.

Systems are advanced in the form M V' = R(V, t). The two-stage singly
diagonally implicit tableau

    A = [[gamma, 0], [1 - 2 gamma, gamma]],  b = (1/2, 1/2),  c = (gamma, 1 - gamma)

is second order for gamma = 1/2 (implicit midpoint flavor) and third order
for gamma = (3 + sqrt(3))/6. Linear systems solve each stage directly via
the shifted operator (M - dt gamma L); nonlinear systems run a fixed-point
iteration on M y = M r + dt gamma R(y, t_stage).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .operators import ShenSystem, bn_eigenvalues


class NumericalError(RuntimeError):
    """Divergent iteration or non-finite state during time integration."""


@dataclass(frozen=True)
class ButcherTableau:
    A: tuple
    b: tuple
    c: tuple
    gamma: float
    order: int

    def __post_init__(self):
        g = self.gamma
        if self.A[0][0] != g or self.A[1][1] != g or self.A[0][1] != 0.0:
            raise ValueError("tableau must be singly diagonally implicit")
        if abs(sum(self.b) - 1.0) > 1e-15:
            raise ValueError("weights must sum to 1")

    @property
    def stages(self):
        return len(self.b)


def tableau_gamma_half():
    g = 0.5
    return ButcherTableau(A=((g, 0.0), (1.0 - 2.0 * g, g)), b=(0.5, 0.5),
                          c=(g, 1.0 - g), gamma=g, order=2)


def tableau_third_order():
    g = (3.0 + np.sqrt(3.0)) / 6.0
    return ButcherTableau(A=((g, 0.0), (1.0 - 2.0 * g, g)), b=(0.5, 0.5),
                          c=(g, 1.0 - g), gamma=g, order=3)


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iters: int = 100
    linear: Optional[bool] = None  # None: take the system's own flag

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


class SdirkStepper:
    """Advances one system with one tableau; owns iteration statistics.

    Stage solves cache their factorizations on the system (keyed by the
    shift dt*gamma), so repeated steps at fixed dt factor once.
    """

    def __init__(self, system, tableau, config):
        self.system = system
        self.tableau = tableau
        self.config = config
        self.last_iterations = []

    def _solve_stage_linear(self, r, t_stage, shift):
        sys = self.system
        forcing = sys.rhs(np.zeros(sys.dim), t_stage)
        return sys.stage_solve(shift, sys.mass_apply(r) + shift * forcing)

    def _solve_stage_fixed_point(self, r, t_stage, shift, V_ref):
        sys, cfg = self.system, self.config
        y = np.array(V_ref, dtype=float)
        guard = 1e6 * max(1.0, float(np.max(np.abs(V_ref))))
        for m in range(cfg.max_iters):
            y_new = r + shift * sys.mass_solve(sys.rhs(y, t_stage))
            delta = float(np.max(np.abs(y_new - y)))
            bound = cfg.abs_tol + cfg.rel_tol * float(np.max(np.abs(y)))
            y = y_new
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > guard:
                raise NumericalError("fixed-point iteration diverged")
            if delta <= bound:
                self.last_iterations.append(m + 1)
                return y
        raise NumericalError(
            f"fixed-point iteration cap {cfg.max_iters} hit (last update {delta:.2e})")

    def step(self, V, t):
        tab, cfg = self.tableau, self.config
        dt = cfg.dt
        shift = dt * tab.gamma
        linear = cfg.linear if cfg.linear is not None else self.system.is_linear
        self.last_iterations = []
        F = []
        for i in range(tab.stages):
            r = V.copy()
            for j in range(i):
                r += dt * tab.A[i][j] * F[j]
            t_stage = t + tab.c[i] * dt
            if linear:
                y = self._solve_stage_linear(r, t_stage, shift)
                self.last_iterations.append(0)
            else:
                y = self._solve_stage_fixed_point(r, t_stage, shift, V)
            F.append((y - r) / shift)
        out = V.copy()
        for bi, Fi in zip(tab.b, F):
            out += dt * bi * Fi
        return out


def sdirk_step(system, tableau, config, V, t):
    """One SDIRK step of M V' = R(V, t) from (V, t)."""
    return SdirkStepper(system, tableau, config).step(np.asarray(V, dtype=float), t)


class EulerStepper:
    """Forward Euler with the same stepping interface as SdirkStepper."""

    def __init__(self, system, config):
        self.system = system
        self.config = config
        self.last_iterations = []

    def step(self, V, t):
        return forward_euler_step(self.system, self.config.dt, V, t)


def forward_euler_step(system, dt, V, t):
    """V + dt * M^{-1} R(V, t)."""
    return V + dt * system.mass_solve(system.rhs(np.asarray(V, dtype=float), t))


def ssp_timestep_bound(shen: ShenSystem):
    """Forward-Euler step size keeping the Shen iteration norm-monotone.

    Euler reads V+ = (I - b dt K_N^{-1}) V with K_N = a I + B_N symmetric
    positive definite, so each eigenmode is damped by 1 - b dt/mu with
    mu = a + lambda an eigenvalue of K_N. The returned bound mu_min / b
    keeps every factor inside [0, 1]; it tends to a/b as N grows.
    """
    return (shen.a + bn_eigenvalues(shen.N)[0]) / shen.b


@dataclass
class IntegrationResult:
    final: np.ndarray
    n_steps: int
    snapshots: dict = field(default_factory=dict)


def integrate(system, stepper, config, V0, t_end, snapshot_times=()):
    """Step from t=0 to t_end = n_steps * dt; optionally record snapshots.

    Snapshot times must themselves be integer multiples of dt; states are
    recorded after the matching step (time 0 records the initial state).
    """
    dt = config.dt
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-12 * max(1.0, abs(t_end)):
        raise ValueError(f"t_end {t_end} is not an integer multiple of dt {dt}")
    snap_steps = {}
    for ts in snapshot_times:
        k = int(round(ts / dt))
        if abs(k * dt - ts) > 1e-12 * max(1.0, abs(ts)) or not 0 <= k <= n_steps:
            raise ValueError(f"snapshot time {ts} is not a step multiple within range")
        snap_steps[k] = float(ts)
    V = np.array(V0, dtype=float)
    result = IntegrationResult(final=V, n_steps=n_steps)
    if 0 in snap_steps:
        result.snapshots[snap_steps[0]] = V.copy()
    for k in range(n_steps):
        V = stepper.step(V, k * dt)
        if not np.all(np.isfinite(V)):
            raise NumericalError(
                f"non-finite state after step {k + 1} (max |V| = {np.max(np.abs(V))})")
        if k + 1 in snap_steps:
            result.snapshots[snap_steps[k + 1]] = V.copy()
    result.final = V
    return result
