"""Uniform rectangular spacetime meshes of (0,L) x (0,T) and their skeletons.

Elements are axis-aligned rectangles indexed by (ix, it) with element id
it*nx + ix.  Skeleton edges are stored once (never duplicated per
element) and classified by orientation and by membership in the inflow
boundary (sides and bottom) and its adjoint counterpart (sides and top);
vertical boundary edges belong to both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Mesh", "Skeleton", "Edge", "build_mesh", "build_skeleton",
           "VERTICAL", "HORIZONTAL"]

VERTICAL = "vertical"
HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class Mesh:
    L: float
    T: float
    nx: int
    nt: int

    @property
    def hx(self) -> float:
        return self.L / self.nx

    @property
    def ht(self) -> float:
        return self.T / self.nt

    @property
    def is_square(self) -> bool:
        """True when elements are spacetime squares (the analyzed setting)."""
        return np.isclose(self.hx, self.ht, rtol=1e-12, atol=0.0)

    @property
    def n_elements(self) -> int:
        return self.nx * self.nt

    def element_id(self, ix: int, it: int) -> int:
        return it * self.nx + ix

    def element_index(self, e: int) -> tuple[int, int]:
        return e % self.nx, e // self.nx

    def element_corner(self, ix: int, it: int) -> tuple[float, float]:
        """Lower-left corner of element (ix, it)."""
        return ix * self.hx, it * self.ht

    def corners(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower-left corners of all elements, in element-id order."""
        ix = np.arange(self.n_elements) % self.nx
        it = np.arange(self.n_elements) // self.nx
        return ix * self.hx, it * self.ht


def build_mesh(L: float, T: float, nx: int, nt: int) -> Mesh:
    if L <= 0 or T <= 0:
        raise ValueError(f"domain extents must be positive, got L={L}, T={T}")
    if nx < 1 or nt < 1:
        raise ValueError(f"element counts must be >= 1, got nx={nx}, nt={nt}")
    return Mesh(L=float(L), T=float(T), nx=int(nx), nt=int(nt))


@dataclass(frozen=True)
class Edge:
    """One closed mesh edge with its classification.

    Vertical edge (i, j) is the segment x = i*hx, t in [j, j+1]*ht;
    horizontal edge (i, j) is t = j*ht, x in [i, i+1]*hx.  The canonical
    parameterization runs bottom-to-top resp. left-to-right.
    """

    orientation: str
    i: int
    j: int
    endpoints: tuple[tuple[float, float], tuple[float, float]]
    on_gamma: bool
    on_gamma_star: bool

    @property
    def interior(self) -> bool:
        return not (self.on_gamma or self.on_gamma_star)

    @property
    def tags(self) -> frozenset:
        tags = set()
        if self.on_gamma:
            tags.add("gamma")
        if self.on_gamma_star:
            tags.add("gamma_star")
        return frozenset(tags) if tags else frozenset({"interior"})


@dataclass(frozen=True)
class Skeleton:
    """Classified edges of a mesh plus the element -> edge adjacency."""

    mesh: Mesh
    vertical: list
    horizontal: list

    @property
    def n_vertical(self) -> int:
        return len(self.vertical)

    @property
    def n_horizontal(self) -> int:
        return len(self.horizontal)

    def vertical_id(self, i: int, j: int) -> int:
        return j * (self.mesh.nx + 1) + i

    def horizontal_id(self, i: int, j: int) -> int:
        return j * self.mesh.nx + i

    def element_edges(self, ix: int, it: int):
        """The four edges of an element with outward normals (n_x, n_t).

        Order: bottom, top, left, right.
        """
        return [
            (self.horizontal[self.horizontal_id(ix, it)], (0, -1)),
            (self.horizontal[self.horizontal_id(ix, it + 1)], (0, 1)),
            (self.vertical[self.vertical_id(ix, it)], (-1, 0)),
            (self.vertical[self.vertical_id(ix + 1, it)], (1, 0)),
        ]

    def elements_of_edge(self, edge: Edge) -> list:
        """Element ids adjacent to an edge (two for interior edges)."""
        m = self.mesh
        adj = []
        if edge.orientation == VERTICAL:
            if edge.i > 0:
                adj.append(m.element_id(edge.i - 1, edge.j))
            if edge.i < m.nx:
                adj.append(m.element_id(edge.i, edge.j))
        else:
            if edge.j > 0:
                adj.append(m.element_id(edge.i, edge.j - 1))
            if edge.j < m.nt:
                adj.append(m.element_id(edge.i, edge.j))
        return adj


def build_skeleton(mesh: Mesh) -> Skeleton:
    nx, nt, hx, ht = mesh.nx, mesh.nt, mesh.hx, mesh.ht
    vertical = []
    for j in range(nt):
        for i in range(nx + 1):
            side = i == 0 or i == nx
            vertical.append(Edge(
                orientation=VERTICAL, i=i, j=j,
                endpoints=((i * hx, j * ht), (i * hx, (j + 1) * ht)),
                on_gamma=side, on_gamma_star=side))
    horizontal = []
    for j in range(nt + 1):
        for i in range(nx):
            horizontal.append(Edge(
                orientation=HORIZONTAL, i=i, j=j,
                endpoints=((i * hx, j * ht), ((i + 1) * hx, j * ht)),
                on_gamma=(j == 0), on_gamma_star=(j == nt)))
    # reorder flat lists to id order (built in id order already)
    return Skeleton(mesh=mesh, vertical=vertical, horizontal=horizontal)
