"""Practical DPG assembly and solve for the spacetime Schrodinger problem.

Per element the method computes a Hermitian Gram matrix G of the
adjoint-graph inner product (v, w) + (Av, Aw) on the enriched broken
test space, a rectangular matrix B of the ultraweak form, and a load l.
Eliminating the optimal test functions element-locally yields the
Hermitian positive-definite normal equations

    S = sum_K B^H G^{-1} B,    r = sum_K B^H G^{-1} l,

whose per-element residual Riesz norms provide the built-in error
indicator eta_K.  On a uniform grid G and B are identical for every
element, so they are built once and only loads, boundary lifting and
index maps vary element to element.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fe_spaces import DofMap
from .mesh import Mesh, Skeleton
from .physics import ManufacturedCase, SchrodingerOperator
from .ref_element import (gauss_legendre_1d, gauss_legendre_2d, lagrange_table,
                          legendre_table, tensor_table)

__all__ = ["ElementMatrices", "DpgSystem", "Solution", "SolveReport",
           "CondEstimate", "element_matrices", "assemble", "solve",
           "l2_error", "l2_error_per_element", "condition_estimate",
           "skeleton_pairing", "boundary_pairing", "AssemblyError",
           "SolverError", "DIRECT_SOLVE_TOL", "ITERATIVE_SOLVE_TOL"]

DIRECT_SOLVE_TOL = 1e-12
ITERATIVE_SOLVE_TOL = 1e-10
DIRECT_SIZE_LIMIT = 200_000
GRAM_JITTER = 1e-14


class AssemblyError(RuntimeError):
    """Element Gram factorization failed; signals under-integration."""


class SolverError(RuntimeError):
    """Global factorization or iteration failed."""


def pairing_coefficients(beta: float, n_x: int, n_t: int) -> tuple[complex, float, float]:
    """Prefactors of the three boundary-pairing terms on one edge.

    Returns (c_trace_v, c_trace_dxv, c_flux_v) such that the pairing
    contribution is

        c_trace_v  * int q+  conj(v)
      + c_trace_dxv* int q+  conj(dv/dx)
      + c_flux_v   * int q|  conj(v)

    for outward normal (n_x, n_t); the spatial terms carry the beta/2
    weight coming from integrating the dispersion term by parts.
    """
    return 1j * n_t, 0.5 * beta * n_x, -0.5 * beta * n_x


# ---------------------------------------------------------------------------
# reference tables shared by all elements of a uniform mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _LocalOperators:
    """Element-independent G, B and bookkeeping for one discretization."""

    gram: np.ndarray                 # (n_test, n_test) Hermitian
    gram_cho: tuple                  # cho_factor of gram
    b: np.ndarray                    # (n_test, n_loc)
    s_loc: np.ndarray                # B^H G^{-1} B, (n_loc, n_loc)
    ginv_b: np.ndarray               # G^{-1} B
    n_u: int
    n_trace_loc: int
    n_flux_loc: int
    quad_order: int

    @property
    def n_loc(self) -> int:
        return self.b.shape[1]


def _local_trace_layout(p: int):
    """Local column layout of the per-element trace unknowns.

    Vertices first (bl, br, tl, tr), then the interior nodes of the
    bottom, top, left, right edges.  Returns the per-edge column lists in
    canonical edge order (left-to-right / bottom-to-top), which aligns
    with DofMap.edge_trace_dofs.
    """
    ni = p - 1
    bot = [0] + list(range(4, 4 + ni)) + [1]
    top = [2] + list(range(4 + ni, 4 + 2 * ni)) + [3]
    left = [0] + list(range(4 + 2 * ni, 4 + 3 * ni)) + [2]
    right = [1] + list(range(4 + 3 * ni, 4 + 4 * ni)) + [3]
    return {"bottom": bot, "top": top, "left": left, "right": right}


def _build_local_operators(dofmap: DofMap, beta: float, q: int) -> _LocalOperators:
    p, dp, fo = dofmap.p, dofmap.dp, dofmap.flux_order
    hx, ht = dofmap.mesh.hx, dofmap.mesh.ht
    deg_test = p + dp
    n_test = (deg_test + 1) ** 2
    n_u = p * p
    n_trace_loc = 4 * p
    n_flux_loc = 2 * (fo + 1)
    n_loc = n_u + n_trace_loc + n_flux_loc

    rule = gauss_legendre_2d(q)
    w2 = rule.weights
    v0 = tensor_table(rule.x, rule.t, deg_test)
    v_t = tensor_table(rule.x, rule.t, deg_test, dt=1)
    v_xx = tensor_table(rule.x, rule.t, deg_test, dx=2)
    a_v = 1j / ht * v_t - 0.5 * beta / hx**2 * v_xx

    jac = hx * ht
    gram = jac * ((v0 * w2) @ v0.T + (a_v.conj() * w2) @ a_v.T)
    gram = 0.5 * (gram + gram.conj().T)

    b = np.zeros((n_test, n_loc), dtype=complex)

    # field block: (phi, A v)_K
    u0 = tensor_table(rule.x, rule.t, p - 1)
    b[:, :n_u] = jac * (a_v.conj() * w2) @ u0.T

    # edge tables at the 1d Gauss points
    s1, w1 = gauss_legendre_1d(q)
    zeros, ones = np.zeros_like(s1), np.ones_like(s1)
    edge_vals = {
        "bottom": tensor_table(s1, zeros, deg_test),
        "top": tensor_table(s1, ones, deg_test),
        "left": tensor_table(zeros, s1, deg_test),
        "right": tensor_table(ones, s1, deg_test),
    }
    edge_dx = {
        "left": tensor_table(zeros, s1, deg_test, dx=1),
        "right": tensor_table(ones, s1, deg_test, dx=1),
    }
    normals = {"bottom": (0, -1), "top": (0, 1), "left": (-1, 0), "right": (1, 0)}
    lengths = {"bottom": hx, "top": hx, "left": ht, "right": ht}

    ltr = lagrange_table(dofmap.trace_nodes, s1)        # (p+1, q)
    lfl = legendre_table(s1, fo)[0]                     # (fo+1, q)
    layout = _local_trace_layout(p)

    for name, cols in layout.items():
        n_x, n_t = normals[name]
        length = lengths[name]
        c_v, c_dxv, _ = pairing_coefficients(beta, n_x, n_t)
        contrib = c_v * length * (edge_vals[name].conj() * w1) @ ltr.T
        if n_x != 0:
            # physical x-derivative of the test function scales by 1/hx
            contrib += c_dxv * length / hx * (edge_dx[name].conj() * w1) @ ltr.T
        for m, col in enumerate(cols):
            b[:, n_u + col] += contrib[:, m]

    flux_off = n_u + n_trace_loc
    for name, sl in (("left", slice(flux_off, flux_off + fo + 1)),
                     ("right", slice(flux_off + fo + 1, flux_off + 2 * (fo + 1)))):
        n_x, n_t = normals[name]
        _, _, c_f = pairing_coefficients(beta, n_x, n_t)
        b[:, sl] = c_f * lengths[name] * (edge_vals[name].conj() * w1) @ lfl.T

    try:
        cho = sla.cho_factor(gram, lower=True)
    except sla.LinAlgError:
        jitter = GRAM_JITTER * np.trace(gram).real / n_test
        try:
            cho = sla.cho_factor(gram + jitter * np.eye(n_test), lower=True)
        except sla.LinAlgError as exc:  # pragma: no cover - should not happen
            raise AssemblyError(f"Gram factorization failed: {exc}") from exc

    ginv_b = sla.cho_solve(cho, b)
    s_loc = b.conj().T @ ginv_b
    s_loc = 0.5 * (s_loc + s_loc.conj().T)
    return _LocalOperators(gram=gram, gram_cho=cho, b=b, s_loc=s_loc,
                           ginv_b=ginv_b, n_u=n_u, n_trace_loc=n_trace_loc,
                           n_flux_loc=n_flux_loc, quad_order=q)


def _element_maps(dofmap: DofMap):
    """Per-element global indices and constrained slots for the local columns.

    Returns (gidx, cslot): two (n_elements, n_loc) integer arrays.  A
    local column with gidx >= 0 couples to that free unknown; otherwise
    cslot gives the constrained-data slot feeding the lifting.
    """
    mesh, skel, p = dofmap.mesh, dofmap.skeleton, dofmap.p
    fo = dofmap.flux_order
    n_u = p * p
    n_loc = n_u + 4 * p + 2 * (fo + 1)
    nel = mesh.n_elements
    gidx = np.full((nel, n_loc), -1, dtype=int)
    cslot = np.full((nel, n_loc), -1, dtype=int)
    layout = _local_trace_layout(p)
    edge_names = ("bottom", "top", "left", "right")

    for e in range(nel):
        ix, it = mesh.element_index(e)
        gidx[e, :n_u] = dofmap.field_dofs(e)
        edges = dict(zip(edge_names, (edge for edge, _ in skel.element_edges(ix, it))))
        for name in edge_names:
            tids = dofmap.edge_trace_dofs(edges[name])
            free, con = dofmap.trace_global(tids)
            cols = n_u + np.asarray(layout[name])
            gidx[e, cols] = free
            cslot[e, cols] = con
        flux_off = n_u + 4 * p
        gidx[e, flux_off:flux_off + fo + 1] = dofmap.flux_dofs(edges["left"])
        gidx[e, flux_off + fo + 1:] = dofmap.flux_dofs(edges["right"])
    return gidx, cslot


def _element_loads(dofmap: DofMap, beta: float, forcing, q_load: int) -> np.ndarray:
    """Load vectors (f, v_i)_K for all elements at once."""
    mesh = dofmap.mesh
    deg_test = dofmap.p + dofmap.dp
    rule = gauss_legendre_2d(q_load)
    v0 = tensor_table(rule.x, rule.t, deg_test)          # real
    x0, t0 = mesh.corners()
    xq = x0[:, None] + mesh.hx * rule.x[None, :]
    tq = t0[:, None] + mesh.ht * rule.t[None, :]
    if forcing is None:
        return np.zeros((mesh.n_elements, v0.shape[0]), dtype=complex)
    fvals = np.asarray(forcing(xq, tq), dtype=complex)
    fvals = np.broadcast_to(fvals, xq.shape)
    return mesh.hx * mesh.ht * fvals @ (rule.weights[:, None] * v0.T)


@dataclass(frozen=True)
class ElementMatrices:
    """Gram, ultraweak B and load of a single element (inspection view)."""

    gram: np.ndarray
    b: np.ndarray
    load: np.ndarray       # (f, v_i)_K with constrained-data lifting applied
    raw_load: np.ndarray   # (f, v_i)_K before lifting


@dataclass
class DpgSystem:
    """Assembled normal equations over the free unknowns."""

    dofmap: DofMap
    beta: float
    matrix: sp.csr_matrix
    rhs: np.ndarray
    local: _LocalOperators
    gidx: np.ndarray
    cslot: np.ndarray
    loads: np.ndarray                # (n_elements, n_test)
    constrained_values: np.ndarray   # (n_constrained,)
    q_load: int

    @property
    def n_free(self) -> int:
        return self.matrix.shape[0]

    def element_solution(self, x: np.ndarray, e: int) -> np.ndarray:
        """Local trial coefficients of element e, constrained slots filled."""
        idx, con = self.gidx[e], self.cslot[e]
        out = np.empty(self.local.n_loc, dtype=complex)
        m = idx >= 0
        out[m] = x[idx[m]]
        out[~m] = self.constrained_values[con[~m]]
        return out


def element_matrices(mesh: Mesh, skeleton: Skeleton, dofmap: DofMap, case=None,
                     op: SchrodingerOperator | None = None,
                     element: tuple[int, int] = (0, 0),
                     forcing=None, boundary_data=None,
                     q: int | None = None, q_load: int | None = None) -> ElementMatrices:
    """Matrices of one element, mainly for tests and inspection."""
    system = assemble(mesh, skeleton, dofmap, case=case, op=op, forcing=forcing,
                      boundary_data=boundary_data, q=q, q_load=q_load)
    e = mesh.element_id(*element)
    raw = system.loads[e]
    idx, con = system.gidx[e], system.cslot[e]
    m = idx >= 0
    lifted = raw - system.local.b[:, ~m] @ system.constrained_values[con[~m]]
    return ElementMatrices(gram=system.local.gram, b=system.local.b,
                           load=lifted, raw_load=raw)


def assemble(mesh: Mesh, skeleton: Skeleton, dofmap: DofMap, case=None,
             op: SchrodingerOperator | None = None, forcing=None,
             boundary_data=None, q: int | None = None,
             q_load: int | None = None) -> DpgSystem:
    """Assemble the Hermitian normal-equation system.

    Either pass a manufactured case (which supplies beta, the forcing and
    the exact inflow data) or give forcing/boundary_data closures plus an
    operator carrying beta.  Interior skeleton unknowns receive
    contributions from both adjacent elements with opposite normals.
    """
    if isinstance(case, ManufacturedCase):
        beta = op.beta if op is not None else case.beta
        forcing = case.f if forcing is None else forcing
        boundary_data = case.u if boundary_data is None else boundary_data
    else:
        beta = (op or SchrodingerOperator()).beta
    q = q if q is not None else dofmap.p + dofmap.dp + 1
    q_load = q_load if q_load is not None else q

    local = _build_local_operators(dofmap, beta, q)
    gidx, cslot = _element_maps(dofmap)
    loads = _element_loads(dofmap, beta, forcing, q_load)
    if boundary_data is None:
        gvals = np.zeros(dofmap.n_constrained, dtype=complex)
    else:
        gvals = dofmap.boundary_values(boundary_data)

    n_free = dofmap.n_free
    rhs = np.zeros(n_free, dtype=complex)
    rows, cols, data = [], [], []
    s_loc = local.s_loc
    for e in range(mesh.n_elements):
        idx = gidx[e]
        m = idx >= 0
        ifree = idx[m]
        block = s_loc[np.ix_(m, m)]
        rows.append(np.repeat(ifree, ifree.size))
        cols.append(np.tile(ifree, ifree.size))
        data.append(block.ravel())
        r_loc = local.ginv_b.conj().T @ loads[e]
        contrib = r_loc[m]
        if not m.all():
            gv = gvals[cslot[e, ~m]]
            contrib = contrib - s_loc[np.ix_(m, ~m)] @ gv
        np.add.at(rhs, ifree, contrib)

    matrix = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_free, n_free), dtype=complex).tocsr()
    return DpgSystem(dofmap=dofmap, beta=beta, matrix=matrix, rhs=rhs,
                     local=local, gidx=gidx, cslot=cslot, loads=loads,
                     constrained_values=gvals, q_load=q_load)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

@dataclass
class Solution:
    """Discrete solution split into its three blocks.

    field_coeffs holds the per-element coefficients of the orthonormal
    tensor Legendre basis of Q_{p-1}; trace_values the full skeleton
    trace (free and constrained slots merged); flux_coeffs the per-edge
    flux expansions.
    """

    dofmap: DofMap
    field_coeffs: np.ndarray   # (n_elements, p*p)
    trace_values: np.ndarray   # (n_trace,)
    flux_coeffs: np.ndarray    # (n_vertical_edges, flux_order+1)

    def field_at(self, x, t) -> np.ndarray:
        """Evaluate the broken field at scattered physical points."""
        mesh = self.dofmap.mesh
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ix = np.clip((x / mesh.hx).astype(int), 0, mesh.nx - 1)
        it = np.clip((t / mesh.ht).astype(int), 0, mesh.nt - 1)
        xhat = x / mesh.hx - ix
        that = t / mesh.ht - it
        out = np.empty(x.shape, dtype=complex)
        eids = it * mesh.nx + ix
        for e in np.unique(eids):
            m = eids == e
            tab = tensor_table(xhat[m], that[m], self.dofmap.p - 1)
            out[m] = self.field_coeffs[e] @ tab
        return out


@dataclass
class SolveReport:
    """Solution plus residual diagnostics of one solve."""

    solution: Solution
    residual_rel: float
    eta_elements: np.ndarray
    eta: float
    stats: dict
    cond_estimate: float | None = None

    @property
    def coefficients(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = self.solution
        return s.field_coeffs, s.trace_values, s.flux_coeffs


def solve(system: DpgSystem, method: str = "auto", tol: float | None = None,
          with_condition_estimate: bool = False) -> SolveReport:
    """Solve the normal equations and compute the per-element indicators."""
    n = system.n_free
    if method == "auto":
        method = "direct" if n <= DIRECT_SIZE_LIMIT else "cg"
    if tol is None:
        tol = DIRECT_SOLVE_TOL if method == "direct" else ITERATIVE_SOLVE_TOL

    t0 = time.perf_counter()
    rhs_norm = float(np.linalg.norm(system.rhs))
    stats = {"method": method, "n_free": n}
    if rhs_norm == 0.0:
        x = np.zeros(n, dtype=complex)
        rel = 0.0
    elif method == "direct":
        try:
            lu = spla.splu(system.matrix.tocsc())
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from exc
        x = lu.solve(system.rhs)
        rel = float(np.linalg.norm(system.rhs - system.matrix @ x)) / rhs_norm
        refinements = 0
        while rel > tol and refinements < 3:
            x = x + lu.solve(system.rhs - system.matrix @ x)
            rel = float(np.linalg.norm(system.rhs - system.matrix @ x)) / rhs_norm
            refinements += 1
        stats["refinement_steps"] = refinements
    elif method == "cg":
        diag = system.matrix.diagonal().real
        precond = spla.LinearOperator((n, n), matvec=lambda v: v / diag,
                                      dtype=complex)
        x, info = spla.cg(system.matrix, system.rhs, rtol=tol, atol=0.0,
                          maxiter=20 * n, M=precond)
        if info != 0:
            raise SolverError(f"conjugate gradients did not converge (info={info})")
        rel = float(np.linalg.norm(system.rhs - system.matrix @ x)) / rhs_norm
        stats["cg_info"] = info
    else:
        raise ValueError(f"unknown solve method {method!r}")
    stats["wall_time"] = time.perf_counter() - t0

    dofmap = system.dofmap
    nel = dofmap.mesh.n_elements
    eta_sq = np.empty(nel)
    for e in range(nel):
        x_loc = system.element_solution(x, e)
        res = system.loads[e] - system.local.b @ x_loc
        z = sla.cho_solve(system.local.gram_cho, res)
        eta_sq[e] = max(float(np.real(np.vdot(res, z))), 0.0)

    p = dofmap.p
    field = x[:dofmap.n_field].reshape(nel, p * p)
    trace = np.empty(dofmap.n_trace, dtype=complex)
    free_mask = dofmap.trace_free >= 0
    trace[free_mask] = x[dofmap.n_field + dofmap.trace_free[free_mask]]
    trace[~free_mask] = system.constrained_values[
        dofmap.trace_constrained[~free_mask]]
    flux = x[dofmap.n_field + dofmap.n_trace_free:].reshape(
        dofmap.skeleton.n_vertical, dofmap.n_flux_local)

    report = SolveReport(
        solution=Solution(dofmap=dofmap, field_coeffs=field,
                          trace_values=trace, flux_coeffs=flux),
        residual_rel=rel, eta_elements=np.sqrt(eta_sq),
        eta=float(np.sqrt(eta_sq.sum())), stats=stats)
    if with_condition_estimate:
        report.cond_estimate = condition_estimate(system.matrix).value
    return report


# ---------------------------------------------------------------------------
# errors and diagnostics
# ---------------------------------------------------------------------------

def l2_error_per_element(solution: Solution, u_exact: Callable,
                         q_err: int | None = None) -> np.ndarray:
    """Per-element squared L2 distance between the field and u_exact."""
    dofmap = solution.dofmap
    mesh = dofmap.mesh
    q = q_err if q_err is not None else dofmap.p + dofmap.dp + 5
    rule = gauss_legendre_2d(q)
    tab = tensor_table(rule.x, rule.t, dofmap.p - 1)
    x0, t0 = mesh.corners()
    xq = x0[:, None] + mesh.hx * rule.x[None, :]
    tq = t0[:, None] + mesh.ht * rule.t[None, :]
    exact = np.asarray(u_exact(xq, tq), dtype=complex)
    uh = solution.field_coeffs @ tab
    diff2 = np.abs(uh - exact) ** 2
    return mesh.hx * mesh.ht * diff2 @ rule.weights


def l2_error(report: SolveReport, u_exact: Callable,
             q_err: int | None = None) -> float:
    """Global L2 error of the solved field against an exact solution."""
    per_el = l2_error_per_element(report.solution, u_exact, q_err=q_err)
    return float(np.sqrt(per_el.sum()))


@dataclass(frozen=True)
class CondEstimate:
    value: float
    lam_max: float
    lam_min: float
    converged: bool


def _rayleigh_iterate(matvec, n: int, max_iter: int, rtol: float):
    v = np.cos(0.7 * np.arange(n)) + 0.5
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = matvec(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, True
        v_new = w / nw
        lam_new = float(np.real(np.vdot(v_new, matvec(v_new))))
        if lam != 0.0 and abs(lam_new - lam) <= rtol * abs(lam_new):
            return lam_new, True
        lam, v = lam_new, v_new
    return lam, False


def condition_estimate(matrix, max_iter: int = 50, rtol: float = 1e-3) -> CondEstimate:
    """Estimate lam_max / lam_min of a Hermitian PD sparse matrix.

    Accepts either a sparse matrix or an assembled DpgSystem.  Power
    iteration for the top of the spectrum, inverse iteration through a
    sparse factorization for the bottom; both stop when the Rayleigh
    quotient settles to 0.1% or after max_iter sweeps.
    """
    if isinstance(matrix, DpgSystem):
        matrix = matrix.matrix
    matrix = sp.csr_matrix(matrix)
    n = matrix.shape[0]
    if n == 1:
        return CondEstimate(1.0, float(matrix[0, 0].real), float(matrix[0, 0].real), True)
    lam_max, ok_max = _rayleigh_iterate(lambda v: matrix @ v, n, max_iter, rtol)
    lu = spla.splu(matrix.tocsc())
    inv_lam, ok_min = _rayleigh_iterate(lu.solve, n, max_iter, rtol)
    lam_min = 1.0 / inv_lam if inv_lam != 0.0 else np.inf
    value = lam_max / lam_min if lam_min > 0 else np.inf
    return CondEstimate(value=float(value), lam_max=float(lam_max),
                        lam_min=float(lam_min), converged=ok_max and ok_min)


# ---------------------------------------------------------------------------
# skeleton pairing with smooth fields (sign-consistency diagnostics)
# ---------------------------------------------------------------------------

def _edge_quadrature(edge, q: int):
    (xa, ta), (xb, tb) = edge.endpoints
    s, w = gauss_legendre_1d(q)
    x = xa + s * (xb - xa)
    t = ta + s * (tb - ta)
    length = float(np.hypot(xb - xa, tb - ta))
    return x, t, w, length


def _pairing_on_edge(edge, n_x, n_t, beta, qplus, qflux, v, v_x, q, hx):
    x, t, w, length = _edge_quadrature(edge, q)
    c_v, c_dxv, c_f = pairing_coefficients(beta, n_x, n_t)
    acc = c_v * np.sum(w * qplus(x, t) * np.conj(v(x, t)))
    if n_x != 0:
        acc += c_dxv * np.sum(w * qplus(x, t) * np.conj(v_x(x, t)))
        acc += c_f * np.sum(w * qflux(x, t) * np.conj(v(x, t)))
    return length * acc


def skeleton_pairing(mesh: Mesh, skeleton: Skeleton, beta: float,
                     qplus: Callable, qflux: Callable, v: Callable,
                     v_x: Callable, q: int = 8) -> complex:
    """sum_K <q, v>_(dK) for closures q+ = qplus, q| = qflux and test v.

    Interior edges are visited once from each side with opposite
    normals, so for single-valued data and a globally smooth test field
    their contributions cancel and only the domain boundary survives.
    """
    total = 0.0 + 0.0j
    for it in range(mesh.nt):
        for ix in range(mesh.nx):
            for edge, (n_x, n_t) in skeleton.element_edges(ix, it):
                total += _pairing_on_edge(edge, n_x, n_t, beta, qplus, qflux,
                                          v, v_x, q, mesh.hx)
    return total


def boundary_pairing(mesh: Mesh, skeleton: Skeleton, beta: float,
                     qplus: Callable, qflux: Callable, v: Callable,
                     v_x: Callable, q: int = 8) -> complex:
    """The same pairing over the domain boundary only (outward normals)."""
    total = 0.0 + 0.0j
    for edge in skeleton.vertical:
        if edge.i == 0:
            total += _pairing_on_edge(edge, -1, 0, beta, qplus, qflux, v, v_x, q, mesh.hx)
        elif edge.i == mesh.nx:
            total += _pairing_on_edge(edge, 1, 0, beta, qplus, qflux, v, v_x, q, mesh.hx)
    for edge in skeleton.horizontal:
        if edge.j == 0:
            total += _pairing_on_edge(edge, 0, -1, beta, qplus, qflux, v, v_x, q, mesh.hx)
        elif edge.j == mesh.nt:
            total += _pairing_on_edge(edge, 0, 1, beta, qplus, qflux, v, v_x, q, mesh.hx)
    return total
