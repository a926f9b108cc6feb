"""Legacy ASCII VTK export of the mesh with per-element vector fields.

Elements are written as VTK polyhedron cells (type 42, face-stream
encoding), so general polyhedral meshes round-trip into standard viewers.
Vector fields (one 3-vector per element, e.g. the potential of a lifted
cohomology generator evaluated at the element centroid) go to CELL_DATA.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh

VTK_POLYHEDRON = 42


def write_vtk(path: str, mesh: Mesh, cell_fields: dict[str, np.ndarray] | None = None,
              title: str = "polyhedral mesh") -> None:
    cell_fields = cell_fields or {}
    lines = ["# vtk DataFile Version 2.0", title[:255], "ASCII",
             "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {mesh.n_vertices} double")
    for v in mesh.vertices:
        lines.append(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")

    entries = []
    for faces in mesh.element_faces:
        body = [len(faces)]
        for f in faces:
            loop = mesh.face_loops[f]
            body.append(len(loop))
            body.extend(loop)
        entries.append([len(body)] + body)
    size = sum(len(e) for e in entries)
    lines.append(f"CELLS {mesh.n_elements} {size}")
    for e in entries:
        lines.append(" ".join(str(x) for x in e))
    lines.append(f"CELL_TYPES {mesh.n_elements}")
    lines.extend(str(VTK_POLYHEDRON) for _ in range(mesh.n_elements))

    if cell_fields:
        lines.append(f"CELL_DATA {mesh.n_elements}")
        lines.append(f"FIELD cohomology {len(cell_fields)}")
        for name, values in cell_fields.items():
            values = np.asarray(values, dtype=float).reshape(mesh.n_elements, 3)
            lines.append(f"{name} 3 {mesh.n_elements} double")
            for row in values:
                lines.append(f"{row[0]:.17g} {row[1]:.17g} {row[2]:.17g}")

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
