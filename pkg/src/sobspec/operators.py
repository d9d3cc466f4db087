"""Semidiscrete operator assembly for the three spatial discretizations.

All systems produced here share one interface consumed by the time steppers:

    dim          number of unknowns
    is_linear    True when rhs(V, t) = L V + g(t)
    rhs(V, t)    right-hand side of M dV/dt = R(V, t)
    mass_solve(r)            solve M y = r
    stage_solve(shift, r)    solve (M - shift L) y = r   (linear systems only)

The Galerkin and collocation systems work in interior unknowns with the
boundary values reattached through pad(); the Shen system works in basis
coefficients.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal, lu_factor, lu_solve, solve_banded

from .grids import diff_matrix, eval_orthopoly


def _as_nodal(coeff, x):
    """Evaluate a coefficient (callable or constant) on the nodes."""
    if callable(coeff):
        vals = np.asarray(coeff(x), dtype=float)
        return np.broadcast_to(vals, x.shape).astype(float)
    return np.full_like(x, float(coeff))


class GniOperators:
    """Quadrature matrices of the nodal Galerkin method on a Legendre grid.

    M_N is the diagonal of quadrature weights; K1(s) = D^T diag(s w) and
    K2(s) = D^T diag(s w) D with nodewise coefficient samples s; the
    convection matrix is C_N = -K1(1). On interior rows these satisfy
    K1(1) = -M_N D and K2(1) = -M_N D^2 (discrete integration by parts),
    which ties the assembled system to its collocation form.
    """

    def __init__(self, grid):
        if grid.family != "legendre":
            raise ValueError("GN-I assembly requires a Legendre Gauss-Lobatto grid")
        self.grid = grid
        self.M_N = grid.weights
        self.D = diff_matrix(grid)
        self.boundary = (0, grid.N)
        self.C_N = -self.k1(np.ones_like(grid.weights))

    def k0(self, coeff_nodes):
        return np.diag(coeff_nodes * self.M_N)

    def k1(self, coeff_nodes):
        return self.D.T * (coeff_nodes * self.M_N)[None, :]

    def k2(self, coeff_nodes):
        return self.D.T @ ((coeff_nodes * self.M_N)[:, None] * self.D)

    def gamma_term(self, gamma_nodes):
        return gamma_nodes * self.M_N


def assemble_gni_general(grid, c, a):
    """General GN-I assembly: mass side K0(c) + K2(a) plus rhs evaluators.

    c and a are coefficient callables (or constants) sampled at the nodes.
    The returned pair is (mass_matrix, operators); state-dependent
    coefficients enter through the operators' k1/k2/gamma_term evaluators
    applied to nodewise samples of the coefficient at the current state.
    """
    ops = GniOperators(grid)
    x = grid.nodes
    c_nodes = _as_nodal(c, x)
    a_nodes = _as_nodal(a, x)
    if not (np.all(np.isfinite(c_nodes)) and np.all(np.isfinite(a_nodes))):
        raise ValueError("coefficient evaluation produced non-finite values")
    mass = ops.k0(c_nodes) + ops.k2(a_nodes)
    return mass, ops


class DenseSemidiscreteSystem:
    """Interior-unknown system M dV/dt = R(V, t) with dense direct solves."""

    def __init__(self, M, rhs_fn, linear=None, grid=None, boundary=(0.0, 0.0)):
        self.M = M
        self._rhs = rhs_fn
        self.linear = linear  # (L, g) with R(V, t) = L V + g(t), or None
        self.grid = grid
        self.boundary = boundary
        self.dim = M.shape[0]
        self._mass_lu = None
        self._stage_cache = {}

    @property
    def is_linear(self):
        return self.linear is not None

    def rhs(self, V, t):
        return self._rhs(V, t)

    def mass_apply(self, V):
        return self.M @ V

    def mass_solve(self, r):
        if self._mass_lu is None:
            self._mass_lu = lu_factor(self.M)
        return lu_solve(self._mass_lu, r)

    def stage_solve(self, shift, r):
        if self.linear is None:
            raise ValueError("stage_solve is only available for linear systems")
        key = float(shift)
        if key not in self._stage_cache:
            L, _ = self.linear
            self._stage_cache[key] = lu_factor(self.M - shift * L)
        return lu_solve(self._stage_cache[key], r)

    def pad(self, V):
        """Reattach boundary values to an interior vector."""
        full = np.empty(self.dim + 2)
        full[0], full[-1] = self.boundary
        full[1:-1] = V
        return full


def _interior_linear_parts(A_full, boundary, forcing):
    """Split a full-grid linear operator into interior L and affine g(t)."""
    L = A_full[1:-1, 1:-1]
    b_cols = A_full[1:-1, [0, -1]] @ np.asarray(boundary, dtype=float)

    def g(t):
        return b_cols + forcing(t)

    return L, g


def assemble_gni_bbm(grid, a, alpha, beta, gamma, flux, source=None,
                     boundary=(0.0, 0.0), flux_shift=None):
    """GN-I system for v_t - a v_xxt + alpha v_x + beta v_xx + gamma f(v)_x = F.

    Interior unknowns; the mass side is (M_N + a K2)[int, int] and the right
    side keeps the full-grid quadrature matrices so that boundary columns of
    the flux and convection terms enter correctly for nonzero boundary data.
    flux_shift, when given, evaluates the flux at V + shift(x) (boundary
    lifting for Riemann-type data).
    """
    ops = GniOperators(grid)
    x = grid.nodes
    w = grid.weights
    ones = np.ones_like(w)
    K1 = ops.k1(ones)
    K2 = ops.k2(ones)
    M_sys = (np.diag(w) + a * K2)[1:-1, 1:-1]
    shift_nodes = _as_nodal(flux_shift, x) if flux_shift is not None else None

    A_full = alpha * K1 + beta * K2

    def forcing(t):
        if source is None:
            return np.zeros(grid.N - 1)
        return (w * source(x, t))[1:-1]

    if flux is None or gamma == 0.0:
        L, g = _interior_linear_parts(A_full, boundary, forcing)

        def rhs_lin(V, t):
            return L @ V + g(t)

        return DenseSemidiscreteSystem(M_sys, rhs_lin, linear=(L, g),
                                       grid=grid, boundary=boundary)

    def rhs_nonlin(V, t):
        full = np.empty(grid.N + 1)
        full[0], full[-1] = boundary
        full[1:-1] = V
        fv = flux(full + shift_nodes) if shift_nodes is not None else flux(full)
        r = A_full @ full + gamma * (K1 @ fv)
        if source is not None:
            r += w * source(x, t)
        return r[1:-1]

    return DenseSemidiscreteSystem(M_sys, rhs_nonlin, grid=grid, boundary=boundary)


def boundary_projector(N):
    """Z_N: zeroes the first and last nodal entries (idempotent)."""
    z = np.ones(N + 1)
    z[0] = z[N] = 0.0
    return np.diag(z)


class CollocationOperators:
    """Differentiation matrices and boundary bookkeeping on a Chebyshev grid."""

    def __init__(self, grid):
        if grid.family != "chebyshev":
            raise ValueError("collocation assembly requires a Chebyshev grid")
        self.grid = grid
        self.D = diff_matrix(grid)
        self.D2 = self.D @ self.D
        self.Z = boundary_projector(grid.N)
        self.interior = slice(1, grid.N)


def assemble_collocation(grid, a, alpha, beta, gamma, flux, source=None,
                         boundary=(0.0, 0.0)):
    """Chebyshev collocation system, interior unknowns, pinned boundary.

    (I - a D~^2) dV/dt = -(alpha D + beta D^2) V - gamma D f(V) + F on the
    interior rows, with boundary nodal entries held at the prescribed values.
    """
    if a <= 0:
        raise ValueError("the time-derivative smoothing coefficient must be positive")
    ops = CollocationOperators(grid)
    x = grid.nodes
    n_int = grid.N - 1
    M_sys = np.eye(n_int) - a * ops.D2[1:-1, 1:-1]

    A_full = -(alpha * ops.D + beta * ops.D2)

    def forcing(t):
        if source is None:
            return np.zeros(n_int)
        return source(x, t)[1:-1]

    if flux is None or gamma == 0.0:
        L, g = _interior_linear_parts(A_full, boundary, forcing)

        def rhs_lin(V, t):
            return L @ V + g(t)

        return DenseSemidiscreteSystem(M_sys, rhs_lin, linear=(L, g),
                                       grid=grid, boundary=boundary)

    def rhs_nonlin(V, t):
        full = np.empty(grid.N + 1)
        full[0], full[-1] = boundary
        full[1:-1] = V
        r = A_full @ full - gamma * (ops.D @ flux(full))
        if source is not None:
            r += source(x, t)
        return r[1:-1]

    return DenseSemidiscreteSystem(M_sys, rhs_nonlin, grid=grid, boundary=boundary)


def _shen_c(k):
    return 1.0 / np.sqrt(4.0 * k + 6.0)


def shen_matrices(N, a, b):
    """Shen-basis system for the linear equation: K_N dV/dt = -b V.

    The basis phi_k = c_k (L_k - L_{k+2}), c_k = 1/sqrt(4k+6), k = 0..N-2,
    satisfies the boundary conditions termwise and makes the stiffness side
    the identity. B_N is the (N-1)^2 mass matrix with
        b_jj = c_j^2 (2/(2j+1) + 2/(2j+5)),  b_{j,j+2} = -c_j c_{j+2} 2/(2j+5),
    coupling only equal parities, and K_N = a I + B_N.
    """
    if N < 2:
        raise ValueError("Shen basis needs degree at least 2")
    if a <= 0 or b <= 0:
        raise ValueError("equation constants must be positive")
    j = np.arange(N - 1, dtype=float)
    c = _shen_c(j)
    diag = c**2 * (2.0 / (2.0 * j + 1.0) + 2.0 / (2.0 * j + 5.0))
    joff = j[: max(N - 3, 0)]
    off = -_shen_c(joff) * _shen_c(joff + 2.0) * 2.0 / (2.0 * joff + 5.0)
    B = np.diag(diag)
    if off.size:
        B += np.diag(off, 2) + np.diag(off, -2)
    return ShenSystem(N, a, b, B, diag, off)


class ShenSystem:
    """Linear semidiscrete system in the Shen coefficient basis.

    Fields B (dense copy for inspection), K = a I + B, S = b I. Solves use
    the parity-split tridiagonal structure: even and odd coefficient indices
    decouple, each giving a symmetric tridiagonal block.
    """

    def __init__(self, N, a, b, B, diag, off):
        self.N = N
        self.a = a
        self.b = b
        self.B = B
        self.K = a * np.eye(N - 1) + B
        self.S = b * np.eye(N - 1)
        self._diag = diag
        self._off = off
        self.dim = N - 1
        self.grid = None
        self._stage_cache = {}

    @property
    def is_linear(self):
        return True

    @property
    def linear(self):
        return (-self.S, lambda t: np.zeros(self.dim))

    def rhs(self, V, t):
        return -self.b * V

    def mass_apply(self, V):
        out = self.a * V + self._diag * V
        if self._off.size:
            out[:-2] += self._off * V[2:]
            out[2:] += self._off * V[:-2]
        return out

    def _banded_solve(self, shift_diag, r):
        # (a + shift_diag) I + B on each parity block, tridiagonal form
        out = np.empty_like(r)
        for parity in (0, 1):
            idx = np.arange(parity, self.dim, 2)
            if idx.size == 0:
                continue
            d = self.a + shift_diag + self._diag[idx]
            e = self._off[idx[:-1]] if idx.size > 1 else np.empty(0)
            ab = np.zeros((3, idx.size))
            ab[0, 1:] = e
            ab[1] = d
            ab[2, :-1] = e
            out[idx] = solve_banded((1, 1), ab, r[idx])
        return out

    def mass_solve(self, r):
        return self._banded_solve(0.0, r)

    def stage_solve(self, shift, r):
        # M - shift L = K + shift b I
        return self._banded_solve(shift * self.b, r)


def shen_reconstruct(coefficients, x):
    """Evaluate v(x) = sum_k V_k c_k (L_k(x) - L_{k+2}(x)).

    The Legendre values are generated once by the upward recurrence, so the
    cost is O((N+2) len(x)) rather than one polynomial pass per mode.
    """
    V = np.asarray(coefficients, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    n_modes = V.size
    out = np.zeros_like(xs)
    pm, p = np.ones_like(xs), xs.copy()
    leg = [pm, p]
    for j in range(1, n_modes + 2):
        pm, p = p, ((2 * j + 1) * xs * p - j * pm) / (j + 1)
        leg.append(p)
    for k in range(n_modes):
        out += V[k] * _shen_c(k) * (leg[k] - leg[k + 2])
    return float(out[0]) if scalar else out


def shen_from_nodal(grid, values_interior):
    """Shen coefficients whose reconstruction interpolates interior node values.

    Solves Phi V = values with Phi[j, k] = phi_k(x_j) at the interior
    Legendre Gauss-Lobatto nodes; for data vanishing at the endpoints this
    is the same polynomial the nodal methods start from.
    """
    x_int = grid.nodes[1:-1]
    n_modes = grid.N - 1
    Phi = np.empty((x_int.size, n_modes))
    for k in range(n_modes):
        Phi[:, k] = _shen_c(k) * (eval_orthopoly("legendre", k, x_int)
                                  - eval_orthopoly("legendre", k + 2, x_int))
    return np.linalg.solve(Phi, values_interior)


def bn_eigenvalues(N):
    """All eigenvalues of B_N, ascending, via parity-split tridiagonal solves."""
    if N < 3:
        raise ValueError("need degree at least 3 for a nontrivial spectrum")
    sys = shen_matrices(N, 1.0, 1.0)
    vals = []
    for parity in (0, 1):
        idx = np.arange(parity, N - 1, 2)
        if idx.size == 0:
            continue
        d = sys._diag[idx]
        e = sys._off[idx[:-1]] if idx.size > 1 else np.empty(0)
        vals.append(eigh_tridiagonal(d, e, eigvals_only=True))
    return np.sort(np.concatenate(vals))
