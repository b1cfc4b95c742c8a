"""Reference-element machinery on the unit square (0,1)^2.

Provides tensor Gauss-Legendre quadrature, shifted-Legendre evaluation
tables, Gauss-Lobatto nodes, and the C^0-in-t / Hermite-in-x finite
element: tensor polynomials Q_p with point-value functionals on an
interior grid plus x-derivative functionals on the two vertical sides.
The element is unisolvent for p >= 3 and carries the interpolation
operator used by the convergence studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "QuadratureRule",
    "DofSet",
    "Basis",
    "ElementMap",
    "gauss_legendre_1d",
    "gauss_legendre_2d",
    "gauss_lobatto_points",
    "legendre_table",
    "tensor_table",
    "lagrange_table",
    "dual_basis",
    "interpolate",
    "interpolation_error_norms",
    "UnsupportedOrderError",
]

MIN_ORDER = 3  # unisolvency of the DOF set needs p >= 3

DUALITY_TOL = 1e-10


class UnsupportedOrderError(ValueError):
    """Raised for polynomial orders outside the supported range."""


def legendre_table(s, degree: int, nderiv: int = 0) -> np.ndarray:
    """Orthonormal shifted Legendre values/derivatives on [0,1].

    Returns an array of shape (nderiv+1, degree+1, len(s)) where entry
    [d, k] holds the d-th derivative of the k-th polynomial at the given
    points.  The polynomials are L2-orthonormal on the unit interval.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    x = 2.0 * s - 1.0
    out = np.empty((nderiv + 1, degree + 1, s.size))
    for k in range(degree + 1):
        coef = np.zeros(k + 1)
        coef[k] = np.sqrt(2.0 * k + 1.0)
        for d in range(nderiv + 1):
            c = npleg.legder(coef, d) if d > 0 else coef
            # chain rule for the [0,1] -> [-1,1] map
            out[d, k] = (2.0**d) * npleg.legval(x, c)
    return out


def gauss_lobatto_points(n: int) -> np.ndarray:
    """n Gauss-Lobatto points on [0,1], endpoints included (n >= 2)."""
    if n < 2:
        raise ValueError("Gauss-Lobatto rule needs at least 2 points")
    if n == 2:
        interior = np.array([])
    else:
        # interior nodes are the roots of P'_{n-1}, i.e. of the
        # Jacobi(1,1) polynomial of degree n-2
        interior, _ = roots_jacobi(n - 2, 1.0, 1.0)
    pts = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    return 0.5 * (pts + 1.0)


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor Gauss-Legendre rule on the unit square.

    points has shape (n, 2); weights are positive and sum to one, so the
    rule integrates exactly over (0,1)^2 for all of Q_{2q-1}.
    """

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def t(self) -> np.ndarray:
        return self.points[:, 1]

    def integrate(self, values) -> complex:
        return np.sum(self.weights * np.asarray(values))


def gauss_legendre_1d(q: int) -> tuple[np.ndarray, np.ndarray]:
    """q-point Gauss-Legendre nodes and weights on [0,1] (weights sum to 1)."""
    if q < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = roots_legendre(q)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre_2d(q: int) -> QuadratureRule:
    """Tensor product of the q-point Gauss rule, exact on Q_{2q-1}."""
    s, w = gauss_legendre_1d(q)
    xg, tg = np.meshgrid(s, s, indexing="ij")
    wg = np.outer(w, w)
    pts = np.column_stack([xg.ravel(), tg.ravel()])
    return QuadratureRule(points=pts, weights=wg.ravel(), order=q)


def tensor_table(rule_x, rule_t, degree: int, dx: int = 0, dt: int = 0) -> np.ndarray:
    """Evaluate the tensor orthonormal Legendre basis of Q_degree.

    rule_x, rule_t are 1d point arrays of equal length n (interpreted as
    the coordinates of n scattered points).  Returns shape
    ((degree+1)**2, n) with basis index a*(degree+1)+b for the product
    of x-polynomial a and t-polynomial b.
    """
    tx = legendre_table(rule_x, degree, dx)[dx]
    tt = legendre_table(rule_t, degree, dt)[dt]
    return (tx[:, None, :] * tt[None, :, :]).reshape((degree + 1) ** 2, -1)


def lagrange_table(nodes: np.ndarray, s) -> np.ndarray:
    """Lagrange basis for the given 1d nodes, evaluated at points s.

    Returns shape (len(nodes), len(s)).  Direct product formula; fine for
    the short Gauss-Lobatto node sets used on skeleton edges.
    """
    nodes = np.asarray(nodes, dtype=float)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    n = nodes.size
    out = np.ones((n, s.size))
    for m in range(n):
        for j in range(n):
            if j != m:
                out[m] *= (s - nodes[j]) / (nodes[m] - nodes[j])
    return out


@dataclass(frozen=True)
class DofSet:
    """Degrees of freedom of the Q_p element on the unit square.

    Point values are taken at the grid (i/(p-2), j/p) for
    i = 0..p-2, j = 0..p; x-derivative values at (0, j/p) and (1, j/p).
    These (p+1)^2 functionals determine Q_p uniquely for p >= 3.
    """

    p: int
    value_points: np.ndarray  # ((p-1)(p+1), 2)
    deriv_points: np.ndarray  # (2(p+1), 2) rows for d/dx functionals

    @property
    def size(self) -> int:
        return len(self.value_points) + len(self.deriv_points)

    def apply(self, w: Callable, w_x: Callable | None = None,
              fd_step: float = 1e-6) -> np.ndarray:
        """Evaluate every functional on a scalar field w(x, t).

        The derivative functionals use the analytic w_x when supplied and
        fall back to central differences of step fd_step otherwise.
        """
        vals = np.asarray(w(self.value_points[:, 0], self.value_points[:, 1]))
        xd, td = self.deriv_points[:, 0], self.deriv_points[:, 1]
        if w_x is not None:
            ders = np.asarray(w_x(xd, td))
        else:
            ders = (np.asarray(w(xd + fd_step, td))
                    - np.asarray(w(xd - fd_step, td))) / (2.0 * fd_step)
        return np.concatenate([vals, ders])


def _make_dofset(p: int) -> DofSet:
    if p < MIN_ORDER:
        raise UnsupportedOrderError(f"element order must be >= {MIN_ORDER}, got {p}")
    xi = np.arange(p - 1) / (p - 2)
    tj = np.arange(p + 1) / p
    xv, tv = np.meshgrid(xi, tj, indexing="ij")
    value_points = np.column_stack([xv.ravel(), tv.ravel()])
    left = np.column_stack([np.zeros(p + 1), tj])
    right = np.column_stack([np.ones(p + 1), tj])
    return DofSet(p=p, value_points=value_points,
                  deriv_points=np.vstack([left, right]))


@dataclass(frozen=True)
class Basis:
    """Shape functions of Q_p dual to the DOF set.

    Each shape function is stored by its coefficients in the tensor
    orthonormal Legendre basis; modal_coeffs[:, k] belongs to the k-th
    functional.  vandermonde_cond reports the conditioning of the DOF
    matrix that was inverted.
    """

    p: int
    dofs: DofSet
    modal_coeffs: np.ndarray
    vandermonde_cond: float = field(default=np.nan)

    @property
    def size(self) -> int:
        return self.dofs.size

    def evaluate(self, x, t, dx: int = 0, dt: int = 0) -> np.ndarray:
        """Values (or derivatives) of all shape functions at scattered points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        modal = tensor_table(x, t, self.p, dx=dx, dt=dt)
        return self.modal_coeffs.T @ modal

    def combine(self, coeffs, x, t, dx: int = 0, dt: int = 0) -> np.ndarray:
        """Evaluate sum_k coeffs[k] * phi_k at the given points."""
        return np.asarray(coeffs) @ self.evaluate(x, t, dx=dx, dt=dt)


def dual_basis(p: int) -> Basis:
    """Construct the shape-function basis dual to the DOF set of order p."""
    dofs = _make_dofset(p)
    n = (p + 1) ** 2
    # Vandermonde of the functionals applied to the modal Legendre basis
    vander = np.empty((n, n))
    nv = len(dofs.value_points)
    vander[:nv] = tensor_table(dofs.value_points[:, 0], dofs.value_points[:, 1], p).T
    vander[nv:] = tensor_table(dofs.deriv_points[:, 0], dofs.deriv_points[:, 1],
                               p, dx=1).T
    cond = float(np.linalg.cond(vander))
    coeffs = np.linalg.inv(vander)
    basis = Basis(p=p, dofs=dofs, modal_coeffs=coeffs, vandermonde_cond=cond)
    _check_duality(basis, vander)
    return basis


def _check_duality(basis: Basis, vander: np.ndarray) -> None:
    err = np.max(np.abs(vander @ basis.modal_coeffs - np.eye(basis.size)))
    if err > DUALITY_TOL:
        raise ArithmeticError(
            f"duality identity violated at p={basis.p}: max deviation {err:.3e}")


def interpolate(basis: Basis, w: Callable, w_x: Callable | None = None,
                fd_step: float = 1e-6) -> np.ndarray:
    """Coefficient vector of the interpolant of w in the dual basis.

    The coefficients are just the DOF values, since the shape functions
    are dual to the functionals.  Evaluate the interpolant with
    basis.combine(coeffs, x, t).
    """
    return basis.dofs.apply(w, w_x, fd_step=fd_step)


@dataclass(frozen=True)
class ElementMap:
    """Affine map from the unit square onto an axis-aligned element."""

    x0: float
    t0: float
    hx: float
    ht: float

    def to_physical(self, xhat, that):
        return self.x0 + self.hx * np.asarray(xhat), self.t0 + self.ht * np.asarray(that)

    def to_reference(self, x, t):
        return (np.asarray(x) - self.x0) / self.hx, (np.asarray(t) - self.t0) / self.ht

    def pullback(self, w: Callable) -> Callable:
        """w composed with the map, as a field on the reference square."""
        def what(xhat, that):
            x, t = self.to_physical(xhat, that)
            return w(x, t)
        return what

    def pullback_dx(self, w_x: Callable) -> Callable:
        """Reference x-derivative of the pullback (scales by hx)."""
        def what_x(xhat, that):
            x, t = self.to_physical(xhat, that)
            return self.hx * np.asarray(w_x(x, t))
        return what_x


def interpolation_error_norms(maps, basis: Basis, w: Callable, w_x: Callable,
                              w_t: Callable, w_xx: Callable,
                              quad_order: int) -> tuple[float, float, float]:
    """L2 norms of (w - Pi w), d/dt(w - Pi w), d^2/dx^2(w - Pi w).

    maps is an iterable of ElementMap covering the domain; the interpolant
    is built element by element from the pulled-back DOF values, which
    coincides with the conforming global interpolant because interface
    functionals evaluate the same field from both sides.
    """
    rule = gauss_legendre_2d(quad_order)
    xq, tq = rule.x, rule.t
    tab0 = basis.evaluate(xq, tq)
    tab_t = basis.evaluate(xq, tq, dt=1)
    tab_xx = basis.evaluate(xq, tq, dx=2)
    err0 = err_t = err_xx = 0.0
    for em in maps:
        coeffs = interpolate(basis, em.pullback(w), em.pullback_dx(w_x))
        xg, tg = em.to_physical(xq, tq)
        jac = em.hx * em.ht
        d0 = w(xg, tg) - coeffs @ tab0
        dt_ = em.ht * w_t(xg, tg) - coeffs @ tab_t
        dxx = em.hx**2 * w_xx(xg, tg) - coeffs @ tab_xx
        err0 += jac * np.sum(rule.weights * np.abs(d0) ** 2)
        err_t += jac / em.ht**2 * np.sum(rule.weights * np.abs(dt_) ** 2)
        err_xx += jac / em.hx**4 * np.sum(rule.weights * np.abs(dxx) ** 2)
    return np.sqrt(err0), np.sqrt(err_t), np.sqrt(err_xx)
