"""Integer cochain complex, exact ranks, Betti numbers, generators, de Rham maps."""

import numpy as np
import pytest

from ddrcomplex import (
    DdrError,
    betti_numbers,
    build_cochain_complex,
    build_voxel_mesh,
    builtin_pattern,
    cohomology_generators,
    compute_orientation,
    corrupt_orientation,
    de_rham_map,
    de_rham_scaling,
    integer_rank,
)

from conftest import complex_for, mesh_and_orientation


def test_coboundary_shapes_and_rows(cube):
    mesh, orient = cube
    cc = build_cochain_complex(mesh, orient)
    assert cc.d0.shape == (12, 8)
    assert ((cc.d0 == 1).sum(axis=1) == 1).all()
    assert ((cc.d0 == -1).sum(axis=1) == 1).all()
    assert np.abs(cc.d1 @ cc.d0).max() == 0
    assert np.abs(cc.d2 @ cc.d1).max() == 0


def test_cube_integer_ranks(cube):
    mesh, orient = cube
    cc = build_cochain_complex(mesh, orient)
    assert (integer_rank(cc.d0), integer_rank(cc.d1), integer_rank(cc.d2)) == (7, 5, 1)


def test_integer_rank_basics():
    assert integer_rank(np.eye(3, dtype=int)) == 3
    assert integer_rank(np.zeros((4, 5), dtype=int)) == 0
    # large-entry matrix exercises arbitrary-precision arithmetic
    big = np.asarray([[10 ** 12, 1], [1, 10 ** 12]], dtype=object)
    assert integer_rank(big) == 2


@pytest.mark.parametrize("name,expected", [
    ("cube", (1, 0, 0, 0)), ("ring", (1, 1, 0, 0)), ("cavity", (1, 0, 1, 0))])
def test_betti_numbers(name, expected):
    mesh, orient = mesh_and_orientation(name)
    b = betti_numbers(build_cochain_complex(mesh, orient))
    assert b.as_tuple() == expected
    assert b.b0 - b.b1 + b.b2 - b.b3 == mesh.euler_characteristic


def test_generators_cube_empty(cube):
    mesh, orient = cube
    cc = build_cochain_complex(mesh, orient)
    assert cohomology_generators(cc, 1) == []
    assert cohomology_generators(cc, 2) == []


def test_generator_ring_h1(ring):
    mesh, orient = ring
    cc = build_cochain_complex(mesh, orient)
    gens = cohomology_generators(cc, 1)
    assert len(gens) == 1
    g = gens[0]
    assert np.abs(cc.d1 @ g).max() == 0
    stacked = np.concatenate([cc.d0, g[:, None]], axis=1)
    assert integer_rank(stacked) == integer_rank(cc.d0) + 1


def test_generator_cavity_h2(cavity):
    mesh, orient = cavity
    cc = build_cochain_complex(mesh, orient)
    gens = cohomology_generators(cc, 2)
    assert len(gens) == 1
    g = gens[0]
    assert np.abs(cc.d2 @ g).max() == 0
    stacked = np.concatenate([cc.d1, g[:, None]], axis=1)
    assert integer_rank(stacked) == integer_rank(cc.d1) + 1


def test_de_rham_map_quarter_edge():
    mesh = build_voxel_mesh(builtin_pattern("cube"), h=0.25)
    orient = compute_orientation(mesh)
    scaling = de_rham_scaling(orient)
    v = np.ones(mesh.n_edges)
    cochain = de_rham_map("forward", "Xcurl", scaling, v)
    assert np.abs(cochain - 0.25).max() < 1e-15


def test_de_rham_roundtrip(ring):
    mesh, orient = ring
    scaling = de_rham_scaling(orient)
    rng = np.random.default_rng(11)
    for space in ("Xgrad", "Xcurl", "Xdiv", "Pk"):
        n = {"Xgrad": mesh.n_vertices, "Xcurl": mesh.n_edges,
             "Xdiv": mesh.n_faces, "Pk": mesh.n_elements}[space]
        v = rng.standard_normal(n)
        w = de_rham_map("inverse", space, scaling, de_rham_map("forward", space, scaling, v))
        assert np.array_equal(w, v)  # x * d / d == x exactly for these measures


@pytest.mark.parametrize("name", ["cube", "ring", "cavity"])
def test_diagram_commutation(name):
    mesh, orient = mesh_and_orientation(name)
    c0 = complex_for(name, 0)
    cc = build_cochain_complex(mesh, orient)
    sc = de_rham_scaling(orient)
    kc, kd, kp = np.diag(sc.edge), np.diag(sc.face), np.diag(sc.cell)
    G0, C0, D0 = (m.toarray() for m in (c0.gradient, c0.curl, c0.divergence))
    assert np.abs(kc @ G0 - cc.d0).max() < 1e-13
    assert np.abs(kd @ C0 - cc.d1 @ kc).max() < 1e-13
    assert np.abs(kp @ D0 - cc.d2 @ kd).max() < 1e-13
    assert np.abs(c0.head_column - 1.0).max() == 0.0  # kappa_grad I0 = i_R


def test_flipped_sign_breaks_cochain_build(cube):
    mesh, orient = cube
    bad = corrupt_orientation(orient, "omega_tf:0:2")
    with pytest.raises(DdrError):
        build_cochain_complex(mesh, bad)
