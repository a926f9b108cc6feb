"""Global unknown numbering for the four discrete spaces.

Per degree k the component pattern is:

* Xgrad: one value per vertex, P^(k-1) on edges, faces, elements;
* Xcurl: P^k on edges, R^(k-1) and Rc^k on faces and elements;
* Xdiv:  P^k on faces, G^(k-1) and Gc^k on elements;
* Pk:    P^k on elements.

Components are laid out lowest-dimensional entities first, entity index
ascending, so the DDR(0) reductions read off the leading block.  Degenerate
degrees (P^-1, Rc^0, ...) stay in the table as genuine zero-dimensional
components so that k = 0 flows through the same code paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .monomials import n_monomials
from .spaces import space_dim

SPACES = ("Xgrad", "Xcurl", "Xdiv", "Pk")


@dataclass(frozen=True)
class Component:
    entity_kind: str   # vertex | edge | face | cell
    entity: int
    part: str          # val | poly | R | Rc | G | Gc
    dim: int
    offset: int


class DofLayout:
    """Component table of one discrete space on one mesh."""

    def __init__(self, space: str, degree: int, mesh):
        if space not in SPACES:
            raise DomainError(f"unknown space {space!r}")
        if degree < 0:
            raise DomainError("degree must be >= 0")
        self.space = space
        self.degree = degree
        self.mesh = mesh
        comps: list[Component] = []
        off = 0

        def add(kind, ent, part, dim):
            nonlocal off
            comps.append(Component(kind, ent, part, dim, off))
            off += dim

        k = degree
        if space == "Xgrad":
            for v in range(mesh.n_vertices):
                add("vertex", v, "val", 1)
            for e in range(mesh.n_edges):
                add("edge", e, "poly", n_monomials(1, k - 1))
            for f in range(mesh.n_faces):
                add("face", f, "poly", n_monomials(2, k - 1))
            for t in range(mesh.n_elements):
                add("cell", t, "poly", n_monomials(3, k - 1))
        elif space == "Xcurl":
            for e in range(mesh.n_edges):
                add("edge", e, "poly", n_monomials(1, k))
            for f in range(mesh.n_faces):
                add("face", f, "R", space_dim("R", k - 1, 2))
                add("face", f, "Rc", space_dim("Rc", k, 2))
            for t in range(mesh.n_elements):
                add("cell", t, "R", space_dim("R", k - 1, 3))
                add("cell", t, "Rc", space_dim("Rc", k, 3))
        elif space == "Xdiv":
            for f in range(mesh.n_faces):
                add("face", f, "poly", n_monomials(2, k))
            for t in range(mesh.n_elements):
                add("cell", t, "G", space_dim("G", k - 1, 3))
                add("cell", t, "Gc", space_dim("Gc", k, 3))
        else:  # Pk
            for t in range(mesh.n_elements):
                add("cell", t, "poly", n_monomials(3, k))

        self.components = tuple(comps)
        self.total = off
        self._index = {(c.entity_kind, c.entity, c.part): c for c in comps}

    def component(self, kind: str, entity: int, part: str) -> Component:
        return self._index[(kind, entity, part)]

    def indices(self, kind: str, entity: int, part: str) -> np.ndarray:
        c = self.component(kind, entity, part)
        return np.arange(c.offset, c.offset + c.dim)

    def entity_components(self, kind: str, entity: int) -> list[Component]:
        return [c for c in self.components if c.entity_kind == kind and c.entity == entity]

    def restriction(self, kind: str, entity: int) -> "LocalMap":
        """Local dof map gathering the entity's own and boundary components.

        Order: vertices ascending, edges ascending, faces ascending, cell;
        per entity the component order matches the global layout.
        """
        mesh = self.mesh
        if kind == "edge":
            vs = [int(v) for v in mesh.edges[entity]]
            es, fs, cs = [entity], [], []
        elif kind == "face":
            vs = sorted(set(mesh.face_loops[entity]))
            es, fs, cs = sorted(mesh.face_edges[entity]), [entity], []
        elif kind == "cell":
            vs = list(mesh.element_vertices(entity))
            es = list(mesh.element_edges(entity))
            fs = sorted(mesh.element_faces[entity])
            cs = [entity]
        else:
            raise DomainError(f"no restriction to entity kind {kind!r}")

        comps: list[Component] = []
        for ekind, ents in (("vertex", vs), ("edge", es), ("face", fs), ("cell", cs)):
            for ent in ents:
                comps.extend(self.entity_components(ekind, ent))
        return LocalMap(self, comps)


class LocalMap:
    """Restriction of a global layout to one entity's closure."""

    def __init__(self, layout: DofLayout, comps: list[Component]):
        self.layout = layout
        self.components = tuple(comps)
        self.globals = (np.concatenate([np.arange(c.offset, c.offset + c.dim) for c in comps])
                        if comps else np.zeros(0, dtype=int))
        self.total = int(self.globals.size)
        self._local: dict[tuple[str, int, str], np.ndarray] = {}
        off = 0
        for c in comps:
            self._local[(c.entity_kind, c.entity, c.part)] = np.arange(off, off + c.dim)
            off += c.dim

    def local_indices(self, kind: str, entity: int, part: str) -> np.ndarray:
        return self._local[(kind, entity, part)]

    def embed(self, sub: "LocalMap") -> np.ndarray:
        """Positions of a sub-restriction's dofs inside this one."""
        pos = {int(g): i for i, g in enumerate(self.globals)}
        return np.asarray([pos[int(g)] for g in sub.globals], dtype=int)

    def gather(self, vector: np.ndarray) -> np.ndarray:
        """Extract the local dofs from a global vector (or matrix rows)."""
        return np.asarray(vector)[self.globals]
