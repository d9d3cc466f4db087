"""Gauss-Lobatto grids, orthogonal polynomials, and nodal interpolation tools.

Everything in this module lives on the reference interval [-1, 1]. A grid
bundles nodes, quadrature weights, and barycentric weights for a polynomial
family; differentiation matrices and interpolant evaluation are built on top
of the barycentric form, which stays stable at high degree.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct

_FAMILIES = ("legendre", "chebyshev")


def _check_family(family):
    if family not in _FAMILIES:
        raise ValueError(f"unknown polynomial family {family!r}; expected one of {_FAMILIES}")


def eval_orthopoly(family, k, x):
    """Evaluate the degree-k Legendre or Chebyshev polynomial at x.

    Uses the three-term recurrences
        (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1},
        T_{k+1} = 2 x T_k - T_{k-1}.
    """
    _check_family(family)
    if k < 0:
        raise ValueError("polynomial degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    pm, p = np.ones_like(x), x.copy()
    if k == 0:
        return pm
    for j in range(1, k):
        if family == "legendre":
            pm, p = p, ((2 * j + 1) * x * p - j * pm) / (j + 1)
        else:
            pm, p = p, 2 * x * p - pm
    return p


def eval_orthopoly_derivative(family, k, x, order=1):
    """Evaluate d/dx or d^2/dx^2 of the degree-k polynomial at x.

    Differentiated recurrences:
        L'_{k+1} = L'_{k-1} + (2k+1) L_k,          L''_{k+1} = L''_{k-1} + (2k+1) L'_k,
        T'_{k+1} = 2 T_k + 2x T'_k - T'_{k-1},     T''_{k+1} = 4 T'_k + 2x T''_k - T''_{k-1}.
    """
    _check_family(family)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if k < 0:
        raise ValueError("polynomial degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    zero = np.zeros_like(x)
    if k == 0:
        return zero
    # carry (value, first derivative[, second derivative]) through the recurrence
    vm, v = np.ones_like(x), x.copy()
    dm, d = zero.copy(), np.ones_like(x)
    sm, s = zero.copy(), zero.copy()
    for j in range(1, k):
        if family == "legendre":
            vn = ((2 * j + 1) * x * v - j * vm) / (j + 1)
            dn = dm + (2 * j + 1) * v
            sn = sm + (2 * j + 1) * d
        else:
            vn = 2 * x * v - vm
            dn = 2 * v + 2 * x * d - dm
            sn = 4 * d + 2 * x * s - sm
        vm, v, dm, d, sm, s = v, vn, d, dn, s, sn
    return d if order == 1 else s


class GaussLobattoGrid:
    """Gauss-Lobatto nodes, quadrature weights, and barycentric weights.

    Attributes
    ----------
    family : str
        "legendre" or "chebyshev".
    N : int
        Polynomial degree; the grid has N+1 nodes including both endpoints.
    nodes, weights, bary : ndarray, shape (N+1,)
        Ascending nodes, quadrature weights, and barycentric weights.
    """

    def __init__(self, family, N, nodes, weights, bary):
        self.family = family
        self.N = int(N)
        self.nodes = nodes
        self.weights = weights
        self.bary = bary
        self._diff = None

    def __repr__(self):
        return f"GaussLobattoGrid(family={self.family!r}, N={self.N})"


def legendre_gl_grid(N):
    """Legendre Gauss-Lobatto grid of degree N (N >= 1).

    Interior nodes are the roots of L_N', found by Newton iteration started
    from the Chebyshev Gauss-Lobatto points. L_N'' comes from the Legendre
    ODE (1-x^2) L_N'' = 2x L_N' - N(N+1) L_N. The residual floor of L_N'
    scales like |L_N''|*eps, unreachable as a pure tolerance for N >~ 64, so
    the iteration also stops when the update stalls at rounding level.
    """
    if N < 1:
        raise ValueError("degree must be at least 1")
    if N == 1:
        nodes = np.array([-1.0, 1.0])
        return GaussLobattoGrid("legendre", 1, nodes, np.array([1.0, 1.0]), np.array([-0.5, 0.5]))
    j = np.arange(1, N)
    x = -np.cos(np.pi * j / N)
    for _ in range(100):
        lN = eval_orthopoly("legendre", N, x)
        dlN = eval_orthopoly_derivative("legendre", N, x)
        d2lN = (2 * x * dlN - N * (N + 1) * lN) / (1 - x * x)
        dx = dlN / d2lN
        x -= dx
        if np.all((np.abs(dlN) <= 1e-14) | (np.abs(dx) <= 4 * np.finfo(float).eps)):
            break
    x = (x - x[::-1]) / 2.0  # enforce exact symmetry about the origin
    nodes = np.concatenate(([-1.0], x, [1.0]))
    lN_nodes = eval_orthopoly("legendre", N, nodes)
    weights = 2.0 / (N * (N + 1) * lN_nodes**2)
    # nodes are the roots of q = (1-x^2) L_N'; q' = -N(N+1) L_N, so the
    # barycentric weights are proportional to 1/L_N(x_j)
    bary = 1.0 / lN_nodes
    return GaussLobattoGrid("legendre", N, nodes, weights, bary)


def chebyshev_gl_grid(N):
    """Chebyshev Gauss-Lobatto grid of degree N, nodes ascending.

    Nodes are cos(j pi / N) reordered ascending; the sine form below gives
    exact +-symmetry in floating point. Quadrature weights are pi/N in the
    interior and pi/(2N) at the endpoints (the discrete weighted product).
    """
    if N < 1:
        raise ValueError("degree must be at least 1")
    j = np.arange(N + 1)
    nodes = np.sin(np.pi * (2.0 * j - N) / (2.0 * N))
    weights = np.full(N + 1, np.pi / N)
    weights[0] = weights[N] = np.pi / (2 * N)
    bary = (-1.0) ** j
    bary[0] *= 0.5
    bary[N] *= 0.5
    return GaussLobattoGrid("chebyshev", N, nodes, weights, bary)


def discrete_inner_product(grid, u, v):
    """Quadrature inner product sum_j u_j v_j w_j on the grid's nodes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != grid.nodes.shape or v.shape != grid.nodes.shape:
        raise ValueError("nodal vectors must match the grid size")
    return float(np.dot(u * grid.weights, v))


def nodal_basis_eval(grid, j, x):
    """Evaluate the j-th Lagrange cardinal function of a Legendre grid.

    psi_j(x) = (1-x^2) L_N'(x) / (N(N+1) L_N(x_j) (x_j - x)), with the
    removable singularity at x = x_j filled by the exact value 1.
    """
    if grid.family != "legendre":
        raise ValueError("nodal basis closed form applies to Legendre grids")
    N = grid.N
    xj = grid.nodes[j]
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    at_node = np.abs(x - xj) < 1e-14
    xs = x[~at_node]
    dlN = eval_orthopoly_derivative("legendre", N, xs)
    lNj = eval_orthopoly("legendre", N, np.array([xj]))[0]
    out[~at_node] = (1 - xs**2) * dlN / (N * (N + 1) * lNj * (xj - xs))
    out[at_node] = 1.0
    return float(out[0]) if scalar else out


def diff_matrix(grid):
    """First-derivative collocation matrix from the barycentric weights.

    Off-diagonal entries are (b_k/b_j)/(x_j - x_k); diagonals close the rows
    to zero sum (exactness on constants). The result is cached on the grid.
    """
    if grid._diff is None:
        x, b = grid.nodes, grid.bary
        dx = x[:, None] - x[None, :]
        np.fill_diagonal(dx, 1.0)
        D = (b[None, :] / b[:, None]) / dx
        np.fill_diagonal(D, 0.0)
        np.fill_diagonal(D, -D.sum(axis=1))
        grid._diff = D
    return grid._diff


def interpolant_eval(grid, values, x):
    """Evaluate the grid interpolant of nodal values at arbitrary points.

    Barycentric second form; points that coincide with a node (within
    rounding) return the stored nodal value exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError("nodal vector must match the grid size")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    pts = np.atleast_1d(x)
    diff = pts[:, None] - grid.nodes[None, :]
    hit_rows, hit_cols = np.nonzero(np.abs(diff) < 1e-14)
    diff[hit_rows, :] = 1.0
    # hit rows are overwritten below; their dummy weights may still sum to
    # zero exactly (alternating Chebyshev weights), so silence that division
    with np.errstate(divide="ignore", invalid="ignore"):
        w = grid.bary[None, :] / diff
        out = (w @ values) / w.sum(axis=1)
    out[hit_rows] = values[hit_cols]
    return float(out[0]) if scalar else out


def _cheb_scale(N):
    cbar = np.ones(N + 1)
    cbar[0] = cbar[N] = 2.0
    return cbar


def _cheb_dense_forward(N):
    k = np.arange(N + 1)
    cbar = _cheb_scale(N)
    return (2.0 / (N * np.outer(cbar, cbar))) * np.cos(np.outer(k, k) * np.pi / N)


def cheb_nodal_to_coeffs(values, method="fft"):
    """Chebyshev coefficients of the interpolant through ascending nodal values.

    The fast path is a type-I DCT on the values reordered to the angular
    (descending-x) convention; the dense path applies the explicit cosine
    matrix. Both compute c_k with v(x) = sum_k c_k T_k(x).
    """
    values = np.asarray(values, dtype=float)
    N = values.size - 1
    if N < 1:
        raise ValueError("need at least two nodal values")
    v_theta = values[::-1]
    if method == "fft":
        return dct(v_theta, type=1) / (N * _cheb_scale(N))
    if method == "dense":
        return _cheb_dense_forward(N) @ v_theta
    raise ValueError(f"unknown transform method {method!r}")


def cheb_coeffs_to_nodal(coeffs, method="fft"):
    """Invert cheb_nodal_to_coeffs, returning values at ascending nodes."""
    coeffs = np.asarray(coeffs, dtype=float)
    N = coeffs.size - 1
    if N < 1:
        raise ValueError("need at least two coefficients")
    if method == "fft":
        u = coeffs / 2.0
        u[0] = coeffs[0]
        u[N] = coeffs[N]
        v_theta = dct(u, type=1)
    elif method == "dense":
        k = np.arange(N + 1)
        v_theta = np.cos(np.outer(k, k) * np.pi / N) @ coeffs
    else:
        raise ValueError(f"unknown transform method {method!r}")
    return v_theta[::-1]
