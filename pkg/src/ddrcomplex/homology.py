"""Integer cochain complex of the mesh cell structure and its cohomology.

The mesh is a CW complex (vertices, edges, faces, elements as 0/1/2/3-cells).
Coboundary matrices use the orientation table signs:

* d0[E, V] = +1 at the head vertex of t_E, -1 at the tail;
* d1[F, E] = -omega_FE  (the sign that makes the degree-0 curl diagram commute);
* d2[T, F] = +omega_TF.

Everything here is exact: integer matrices, fraction-free ranks (Python
integers never overflow), rational kernel bases, and integer generator
representatives certified by rank identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CertificationError, DdrError, DomainError
from .mesh import Mesh, OrientationTable


@dataclass(frozen=True)
class CochainComplexInt:
    d0: np.ndarray   # (E, V) int
    d1: np.ndarray   # (F, E) int
    d2: np.ndarray   # (T, F) int

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.d0.shape[1], self.d0.shape[0], self.d1.shape[0], self.d2.shape[0])

    def boundary(self, i: int) -> np.ndarray:
        if i not in (0, 1, 2):
            raise DomainError(f"no coboundary of index {i}")
        return (self.d0, self.d1, self.d2)[i]


@dataclass(frozen=True)
class BettiVector:
    b0: int
    b1: int
    b2: int
    b3: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.b0, self.b1, self.b2, self.b3)


@dataclass(frozen=True)
class DeRhamScaling:
    """Diagonal measure scalings identifying DDR(0) vectors with cochains."""

    edge: np.ndarray    # |E|
    face: np.ndarray    # |F|
    cell: np.ndarray    # |T|


def build_cochain_complex(mesh: Mesh, orientation: OrientationTable) -> CochainComplexInt:
    d0 = np.zeros((mesh.n_edges, mesh.n_vertices), dtype=np.int64)
    for e, (v1, v2) in enumerate(mesh.edges):
        d0[e, v2] = 1
        d0[e, v1] = -1
    d1 = np.zeros((mesh.n_faces, mesh.n_edges), dtype=np.int64)
    for f in range(mesh.n_faces):
        for pos, e in enumerate(mesh.face_edges[f]):
            d1[f, e] = -orientation.face_edge_sign[f][pos]
    d2 = np.zeros((mesh.n_elements, mesh.n_faces), dtype=np.int64)
    for t in range(mesh.n_elements):
        for pos, f in enumerate(mesh.element_faces[t]):
            d2[t, f] = orientation.cell_face_sign[t][pos]
    if np.any(d1 @ d0) or np.any(d2 @ d1):
        raise DdrError("coboundary composition is nonzero: inconsistent orientation data")
    return CochainComplexInt(d0, d1, d2)


def integer_rank(mat: np.ndarray) -> int:
    """Exact rank over the rationals via fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in np.asarray(mat)]
    if not a or not a[0]:
        return 0
    rows, cols = len(a), len(a[0])
    rank = 0
    prev = 1
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def betti_numbers(complex_: CochainComplexInt) -> BettiVector:
    v, e, f, t = complex_.counts
    r0 = integer_rank(complex_.d0)
    r1 = integer_rank(complex_.d1)
    r2 = integer_rank(complex_.d2)
    return BettiVector(
        b0=v - r0,
        b1=(e - r1) - r0,
        b2=(f - r2) - r1,
        b3=t - r2,
    )


def _rational_nullspace(mat: np.ndarray) -> list[list[Fraction]]:
    """Exact kernel basis (one vector per free column after RREF)."""
    a = [[Fraction(int(x)) for x in row] for row in np.asarray(mat)]
    rows = len(a)
    cols = len(a[0]) if rows else np.asarray(mat).shape[1]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in range(cols):
        if free in pivot_cols:
            continue
        vec = [Fraction(0)] * cols
        vec[free] = Fraction(1)
        for pr, pc in pivots:
            vec[pc] = -a[pr][free]
        basis.append(vec)
    return basis


def _clear_denominators(vec: list[Fraction]) -> list[int]:
    lcm = 1
    for x in vec:
        if x.denominator != 1:
            lcm = lcm // math.gcd(lcm, x.denominator) * x.denominator
    return [int(x * lcm) for x in vec]


def cohomology_generators(complex_: CochainComplexInt, i: int) -> list[np.ndarray]:
    """Integer representatives of H^i generators (i in {1, 2}), certified.

    Exact linear algebra: kernel of d_i modulo image of d_(i-1); each kept
    kernel vector must raise the rank of [image basis | generators] by one.
    """
    if i not in (1, 2):
        raise DomainError("generators are computed for cohomology indices 1 and 2")
    d_out = complex_.boundary(i)
    d_in = complex_.boundary(i - 1)
    betti = betti_numbers(complex_).as_tuple()[i]
    kernel = _rational_nullspace(d_out)
    if not kernel and betti:
        raise CertificationError("kernel smaller than the Betti number")

    r_in = integer_rank(d_in)
    cols = [[Fraction(int(x)) for x in d_in[:, j]] for j in range(d_in.shape[1])]
    ncand = len(cols)
    stacked = np.asarray(cols + kernel, dtype=object).T  # rows = cochain entries
    keep = _independent_columns_count(stacked, first_block=ncand, target_rank=r_in,
                                      want=betti)
    gens = [np.asarray(_clear_denominators(kernel[j]), dtype=np.int64) for j in keep]

    certify = np.concatenate([d_in, np.asarray(gens, dtype=np.int64).T], axis=1) \
        if gens else d_in
    if integer_rank(certify) != r_in + len(gens):
        raise CertificationError("generators not independent modulo the incoming image")
    for g in gens:
        if np.any(d_out @ g):
            raise CertificationError("generator not in the kernel of the outgoing coboundary")
    if len(gens) != betti:
        raise CertificationError(f"expected {betti} generators, selected {len(gens)}")
    return gens


def _independent_columns_count(mat: np.ndarray, first_block: int, target_rank: int,
                               want: int) -> list[int]:
    """Indices (relative to the second block) of columns adding rank beyond the first block."""
    rows, cols = mat.shape
    work = mat.copy()
    pivot_rows: list[int] = []
    kept_cols: list[int] = []
    selected: list[int] = []
    for j in range(cols):
        col = work[:, j]
        for pr, pc in zip(pivot_rows, kept_cols):
            f = col[pr]
            if f:
                col = col - f * work[:, pc]
        pivot = next((idx for idx in range(rows) if col[idx] != 0), None)
        if pivot is None:
            continue
        work[:, j] = col / col[pivot]
        pivot_rows.append(pivot)
        kept_cols.append(j)
        if j >= first_block:
            selected.append(j - first_block)
            if len(selected) == want:
                break
    return selected


def de_rham_scaling(orientation: OrientationTable) -> DeRhamScaling:
    return DeRhamScaling(edge=orientation.edge_length.copy(),
                         face=orientation.face_area.copy(),
                         cell=orientation.cell_volume.copy())


def de_rham_map(direction: str, space: str, scaling: DeRhamScaling,
                vector: np.ndarray) -> np.ndarray:
    """Diagonal identification of DDR(0) vectors with integer cochains.

    forward: vertex values id, edge values * |E|, face * |F|, element * |T|;
    inverse divides.  forward(inverse(x)) == x exactly (IEEE x/x = 1).
    """
    diag = {
        "Xgrad": None,
        "Xcurl": scaling.edge,
        "Xdiv": scaling.face,
        "Pk": scaling.cell,
    }.get(space, "missing")
    if isinstance(diag, str):
        raise DomainError(f"unknown space {space!r}")
    vector = np.asarray(vector, dtype=float)
    if diag is None:
        return vector.copy()
    if vector.shape[0] != diag.shape[0]:
        raise DomainError("vector length does not match the space layout")
    if direction == "forward":
        return vector * diag
    if direction == "inverse":
        return vector / diag
    raise DomainError(f"direction must be forward or inverse, got {direction!r}")
