"""Discrete error norms on the Chebyshev evaluation grid, and rate tables.

Solutions are compared at x_j = cos(j pi / P), j = 0..P, with sums running
over j = 1..P and the scale h = 2/N taken from the solver resolution, not
the evaluation grid:

    l2   = (h sum e_j^2)^{1/2}
    h1   = (h sum (e_j^2 + e'_j^2))^{1/2}
    linf = max |e_j|

Numeric derivatives come from spectral differentiation of the interpolant;
exact derivatives are analytic (chain-ruled onto reference coordinates when
the problem lives on a mapped interval). Collocation runs are instead
measured in the weighted discrete inner product at the solver's own nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grids import diff_matrix, interpolant_eval
from .operators import shen_reconstruct


@dataclass(frozen=True)
class ErrorReport:
    l2: float
    h1: float
    linf: float
    N: int
    P: int
    T: float
    dt: Optional[float] = None
    method: str = ""
    experiment: str = ""
    integrator: str = ""

    def __post_init__(self):
        if self.l2 < 0 or self.h1 < 0 or self.linf < 0:
            raise ValueError("norms must be nonnegative")


def _exact_callables(exact, t, domain_map):
    """Normalize the exact-solution argument to reference-coordinate callables."""
    if domain_map is None:
        to_phys = lambda xi: xi
        chain = 1.0
    else:
        to_phys = domain_map.from_reference
        chain = 1.0 / domain_map.scale
    if hasattr(exact, "eval"):  # sine series, defined on (-1, 1) directly
        return (lambda xi: exact.eval(to_phys(xi), t),
                lambda xi: exact.eval(to_phys(xi), t, deriv=True) * chain)
    if hasattr(exact, "value"):  # manufactured solution
        return (lambda xi: exact.value(to_phys(xi), t),
                lambda xi: exact.deriv(to_phys(xi), t) * chain)
    value_fn, deriv_fn = exact
    return (lambda xi: value_fn(to_phys(xi), t),
            lambda xi: deriv_fn(to_phys(xi), t) * chain)


def _as_nodal(grid, values):
    values = np.asarray(values, dtype=float)
    if values.shape == (grid.N + 1,):
        return values
    if values.shape == (grid.N - 1,):
        # Shen coefficient vector; nodal sampling of a degree-N polynomial
        # at the N+1 grid nodes is lossless
        return shen_reconstruct(values, grid.nodes)
    raise ValueError(f"field shape {values.shape} fits neither nodal nor Shen layout")


def error_norms(grid, values, exact, T, N=None, P=512, domain_map=None,
                method="", experiment="", integrator="", dt=None):
    """ErrorReport for a nodal (or Shen-coefficient) field against `exact` at T."""
    nodal = _as_nodal(grid, values)
    N = grid.N if N is None else N
    xi = np.cos(np.arange(P + 1) * np.pi / P)
    fe, fpe = _exact_callables(exact, T, domain_map)
    e = interpolant_eval(grid, nodal, xi) - fe(xi)
    ed = interpolant_eval(grid, diff_matrix(grid) @ nodal, xi) - fpe(xi)
    h = 2.0 / N
    l2 = float(np.sqrt(h * np.sum(e[1:] ** 2)))
    h1 = float(np.sqrt(h * np.sum(e[1:] ** 2 + ed[1:] ** 2)))
    linf = float(np.max(np.abs(e[1:])))
    return ErrorReport(l2=l2, h1=h1, linf=linf, N=N, P=P, T=T, dt=dt,
                       method=method, experiment=experiment, integrator=integrator)


def weighted_error_norms(grid, values, exact, T, domain_map=None,
                         method="", experiment="", integrator="", dt=None):
    """ErrorReport in the weighted discrete inner product at the grid nodes.

    Sums carry the physical-interval Jacobian (B - A)/2 and the H1 part uses
    the physical derivative, so mapped-domain runs are measured in the
    original variables; on (-1, 1) both factors are 1.
    """
    nodal = np.asarray(values, dtype=float)
    if nodal.shape != (grid.N + 1,):
        raise ValueError("weighted norms need the full nodal vector")
    scale = domain_map.scale if domain_map is not None else 1.0
    fe, fpe = _exact_callables(exact, T, domain_map)
    e = nodal - fe(grid.nodes)
    ed = (diff_matrix(grid) @ nodal - fpe(grid.nodes)) * scale
    w = grid.weights / scale
    l2 = float(np.sqrt(np.sum(e**2 * w)))
    h1 = float(np.sqrt(np.sum((e**2 + ed**2) * w)))
    linf = float(np.max(np.abs(e)))
    return ErrorReport(l2=l2, h1=h1, linf=linf, N=grid.N, P=grid.N, T=T, dt=dt,
                       method=method, experiment=experiment, integrator=integrator)


def convergence_rates(errors):
    """rate_k = log2(e_k / e_{k+1}) down an error ladder (halving parameter)."""
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise ValueError("need at least two errors")
    if any(e <= 0 for e in errors):
        raise ValueError("errors must be positive")
    return [float(np.log2(errors[k] / errors[k + 1])) for k in range(len(errors) - 1)]
