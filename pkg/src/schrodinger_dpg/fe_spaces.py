"""Global discrete spaces and degree-of-freedom numbering.

Three trial blocks: the broken field (per-element Q_{p-1}, complex,
never coupled across elements), the skeleton trace (continuous degree-p
polynomials on all edges, nodal at Gauss-Lobatto points, with the
inflow-boundary values held in constrained slots), and the flux on
vertical edges (degree p-1 for the practical variant or p for the ideal
one, independent edge to edge).  The enriched broken test space
Q_{p+dp} is local to each element and never numbered globally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mesh import HORIZONTAL, VERTICAL, Edge, Mesh, Skeleton
from .ref_element import MIN_ORDER, UnsupportedOrderError, gauss_lobatto_points

__all__ = ["DofMap", "build_dofmap", "trace_dof_values", "BoundaryData",
           "InconsistentBoundaryDataError", "VARIANTS"]

VARIANTS = ("practical", "ideal")

VERTEX_DATA_TOL = 1e-10


class InconsistentBoundaryDataError(ValueError):
    """Boundary data from two adjacent inflow edges disagrees at a vertex."""


@dataclass(frozen=True)
class BoundaryData:
    """Inflow data given per boundary part: u0(x) at t=0, ul(t), ur(t)."""

    u0: Callable
    ul: Callable
    ur: Callable

    def on_edge(self, edge: Edge) -> Callable:
        if edge.orientation == HORIZONTAL:
            return lambda x, t: self.u0(x)
        if edge.i == 0:
            return lambda x, t: self.ul(t)
        return lambda x, t: self.ur(t)


@dataclass(frozen=True)
class DofMap:
    """Contiguous global numbering: field block, then trace, then flux.

    Trace DOFs located on the closed inflow boundary (sides and bottom,
    including the top corners of the side edges) are constrained; they
    keep a separate slot numbering used when lifting boundary data.
    """

    mesh: Mesh
    skeleton: Skeleton
    p: int
    dp: int
    variant: str
    flux_order: int
    trace_nodes: np.ndarray            # Gauss-Lobatto nodes on [0,1], p+1 of them
    n_vertices: int
    n_trace: int                       # all trace DOFs, free + constrained
    trace_free: np.ndarray             # (n_trace,) free index within trace block or -1
    trace_constrained: np.ndarray      # (n_trace,) constrained slot or -1
    trace_points: np.ndarray           # (n_trace, 2) physical location of each DOF
    n_trace_free: int = field(default=0)
    n_constrained: int = field(default=0)

    # block sizes
    @property
    def n_field_local(self) -> int:
        return self.p * self.p

    @property
    def n_field(self) -> int:
        return self.mesh.n_elements * self.n_field_local

    @property
    def n_flux_local(self) -> int:
        return self.flux_order + 1

    @property
    def n_flux(self) -> int:
        return self.skeleton.n_vertical * self.n_flux_local

    @property
    def n_test_local(self) -> int:
        return (self.p + self.dp + 1) ** 2

    @property
    def n_free(self) -> int:
        return self.n_field + self.n_trace_free + self.n_flux

    # ---- numbering helpers ----
    def field_dofs(self, e: int) -> np.ndarray:
        n = self.n_field_local
        return np.arange(e * n, (e + 1) * n)

    def vertex_id(self, i: int, j: int) -> int:
        return j * (self.mesh.nx + 1) + i

    def edge_trace_dofs(self, edge: Edge) -> np.ndarray:
        """Trace DOF ids along an edge in canonical order (p+1 entries)."""
        p, m = self.p, self.mesh
        ids = np.empty(p + 1, dtype=int)
        if edge.orientation == VERTICAL:
            ids[0] = self.vertex_id(edge.i, edge.j)
            ids[-1] = self.vertex_id(edge.i, edge.j + 1)
            base = self.n_vertices + self.skeleton.vertical_id(edge.i, edge.j) * (p - 1)
        else:
            ids[0] = self.vertex_id(edge.i, edge.j)
            ids[-1] = self.vertex_id(edge.i + 1, edge.j)
            base = (self.n_vertices + self.skeleton.n_vertical * (p - 1)
                    + self.skeleton.horizontal_id(edge.i, edge.j) * (p - 1))
        ids[1:-1] = base + np.arange(p - 1)
        return ids

    def flux_dofs(self, edge: Edge) -> np.ndarray:
        """Global indices of the flux DOFs on a vertical edge."""
        if edge.orientation != VERTICAL:
            raise ValueError("flux unknowns live on vertical edges only")
        n = self.n_flux_local
        base = (self.n_field + self.n_trace_free
                + self.skeleton.vertical_id(edge.i, edge.j) * n)
        return np.arange(base, base + n)

    def trace_global(self, trace_ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map trace-block ids to (global free index or -1, constrained slot or -1)."""
        free = self.trace_free[trace_ids].copy()
        mask = free >= 0
        free[mask] += self.n_field
        return free, self.trace_constrained[trace_ids]

    def constrained_points(self) -> np.ndarray:
        """Physical locations of the constrained trace DOFs, slot order."""
        pts = np.empty((self.n_constrained, 2))
        sel = self.trace_constrained >= 0
        pts[self.trace_constrained[sel]] = self.trace_points[sel]
        return pts

    def boundary_values(self, data) -> np.ndarray:
        """Constrained-slot values interpolating the inflow data.

        data is either a single callable g(x, t) or a BoundaryData giving
        the three parts separately; in the latter case the parts must
        agree at shared vertices to within 1e-10.
        """
        values = np.full(self.n_constrained, np.nan + 0j, dtype=complex)
        for edge in list(self.skeleton.horizontal) + list(self.skeleton.vertical):
            if not edge.on_gamma:
                continue
            g = data.on_edge(edge) if isinstance(data, BoundaryData) else data
            ids = self.edge_trace_dofs(edge)
            slots = self.trace_constrained[ids]
            vals = trace_dof_values(self, edge, g)
            for slot, v in zip(slots, vals):
                if slot < 0:
                    continue
                if not np.isnan(values[slot].real):
                    if abs(values[slot] - v) > VERTEX_DATA_TOL:
                        raise InconsistentBoundaryDataError(
                            f"vertex data mismatch {values[slot]} vs {v}")
                    continue
                values[slot] = v
        return np.nan_to_num(values)


def trace_dof_values(dofmap: DofMap, edge: Edge, g: Callable) -> np.ndarray:
    """Degree-p interpolant data of g on one edge: values at its nodes."""
    (xa, ta), (xb, tb) = edge.endpoints
    s = dofmap.trace_nodes
    x = xa + s * (xb - xa)
    t = ta + s * (tb - ta)
    return np.asarray(g(x, t), dtype=complex) + np.zeros(len(s), dtype=complex)


def build_dofmap(mesh: Mesh, skeleton: Skeleton, p: int, dp: int = 1,
                 variant: str = "practical") -> DofMap:
    if p < MIN_ORDER:
        raise UnsupportedOrderError(f"trial order must be >= {MIN_ORDER}, got {p}")
    if dp < 1:
        raise ValueError(f"test enrichment must be >= 1, got {dp}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; options: {VARIANTS}")
    flux_order = p - 1 if variant == "practical" else p

    nx, nt, hx, ht = mesh.nx, mesh.nt, mesh.hx, mesh.ht
    n_vertices = (nx + 1) * (nt + 1)
    n_trace = n_vertices + (skeleton.n_vertical + skeleton.n_horizontal) * (p - 1)

    constrained = np.zeros(n_trace, dtype=bool)
    points = np.empty((n_trace, 2))

    vi = np.arange(n_vertices) % (nx + 1)
    vj = np.arange(n_vertices) // (nx + 1)
    points[:n_vertices, 0] = vi * hx
    points[:n_vertices, 1] = vj * ht
    constrained[:n_vertices] = (vi == 0) | (vi == nx) | (vj == 0)

    nodes = gauss_lobatto_points(p + 1)
    interior = nodes[1:-1]
    pos = n_vertices
    for edge in skeleton.vertical:
        points[pos:pos + p - 1, 0] = edge.endpoints[0][0]
        points[pos:pos + p - 1, 1] = edge.endpoints[0][1] + interior * ht
        constrained[pos:pos + p - 1] = edge.on_gamma
        pos += p - 1
    for edge in skeleton.horizontal:
        points[pos:pos + p - 1, 0] = edge.endpoints[0][0] + interior * hx
        points[pos:pos + p - 1, 1] = edge.endpoints[0][1]
        constrained[pos:pos + p - 1] = edge.on_gamma
        pos += p - 1

    trace_free = np.full(n_trace, -1, dtype=int)
    trace_free[~constrained] = np.arange(np.count_nonzero(~constrained))
    trace_constrained = np.full(n_trace, -1, dtype=int)
    trace_constrained[constrained] = np.arange(np.count_nonzero(constrained))

    return DofMap(
        mesh=mesh, skeleton=skeleton, p=p, dp=dp, variant=variant,
        flux_order=flux_order, trace_nodes=nodes,
        n_vertices=n_vertices, n_trace=n_trace,
        trace_free=trace_free, trace_constrained=trace_constrained,
        trace_points=points,
        n_trace_free=int(np.count_nonzero(~constrained)),
        n_constrained=int(np.count_nonzero(constrained)),
    )
