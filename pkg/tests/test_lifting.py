"""Reduction/extension identities, zero-reduction exactness, generator lifting."""

import numpy as np
import pytest

from ddrcomplex import (
    lift_generators,
    numeric_rank,
    reduce_vector,
    reduction_matrix,
    zero_reduction_basis,
)

from conftest import complex_for, extensions_for, mesh_and_orientation

SPACES = ("Xgrad", "Xcurl", "Xdiv", "Pk")


@pytest.mark.parametrize("name,k", [("cube", 1), ("cube", 2), ("ring", 1), ("cavity", 1)])
def test_reduction_after_extension_is_identity(name, k):
    high = complex_for(name, k)
    ext = extensions_for(name, k)
    for space in SPACES:
        e = ext.matrix(space)
        r = reduction_matrix(high, space)
        eye = np.eye(e.shape[1])
        assert np.abs((r @ e) - eye).max() < 1e-12


def test_reduction_of_interpolate_is_vertex_values():
    c = complex_for("cube", 2)
    mesh, _ = mesh_and_orientation("cube")
    vec = c.interpolate_grad(lambda p: p[0] * p[1] + 2.0)
    red = reduce_vector(c, "Xgrad", vec)
    expected = np.asarray([p[0] * p[1] + 2.0 for p in mesh.vertices])
    assert np.abs(red - expected).max() < 1e-13


def test_extension_of_constant_is_interpolate():
    # extending constant vertex data gives the degree-k interpolate of it
    for name, k in (("cube", 2), ("ring", 1)):
        high = complex_for(name, k)
        ext = extensions_for(name, k)
        mesh, _ = mesh_and_orientation(name)
        c = 2.75
        lifted = ext.matrix("Xgrad") @ np.full(mesh.n_vertices, c)
        expected = c * high.head_column
        assert np.abs(lifted - expected).max() < 1e-11


def test_extension_of_zero_is_zero():
    ext = extensions_for("ring", 1)
    for space in SPACES:
        m = ext.matrix(space)
        assert np.abs(m @ np.zeros(m.shape[1])).max() == 0.0


@pytest.mark.parametrize("name,k", [("cube", 1), ("cube", 2), ("ring", 1),
                                    ("ring", 2), ("cavity", 1)])
def test_extension_cochain_identities(name, k):
    high = complex_for(name, k)
    low = complex_for(name, 0)
    ext = extensions_for(name, k)
    e = {s: ext.matrix(s).toarray() for s in SPACES}
    gk, ck, dk = high.gradient, high.curl, high.divergence
    g0, c0, d0 = low.gradient, low.curl, low.divergence
    assert np.abs(gk @ e["Xgrad"] - e["Xcurl"] @ g0.toarray()).max() < 1e-10
    assert np.abs(ck @ e["Xcurl"] - e["Xdiv"] @ c0.toarray()).max() < 1e-10
    assert np.abs(dk @ e["Xdiv"] - e["Pk"] @ d0.toarray()).max() < 1e-10
    assert np.abs(high.head_column - e["Xgrad"] @ low.head_column).max() < 1e-11


@pytest.mark.parametrize("name,k", [("cube", 1), ("ring", 1), ("ring", 2), ("cavity", 1)])
def test_reduction_cochain_identities(name, k):
    high = complex_for(name, k)
    low = complex_for(name, 0)
    r = {s: reduction_matrix(high, s).toarray() for s in SPACES}
    gk, ck, dk = high.gradient.toarray(), high.curl.toarray(), high.divergence.toarray()
    g0, c0, d0 = low.gradient.toarray(), low.curl.toarray(), low.divergence.toarray()
    assert np.abs(r["Xgrad"] @ high.head_column - low.head_column).max() < 1e-12
    assert np.abs(r["Xcurl"] @ gk - g0 @ r["Xgrad"]).max() < 1e-10
    assert np.abs(r["Xdiv"] @ ck - c0 @ r["Xcurl"]).max() < 1e-10
    assert np.abs(r["Pk"] @ dk - d0 @ r["Xdiv"]).max() < 1e-10


def test_random_vector_cochain_identity():
    # the matrix identity applied to a concrete random degree-0 vector
    ext = extensions_for("ring", 2)
    high = complex_for("ring", 2)
    low = complex_for("ring", 0)
    rng = np.random.default_rng(5)
    q0 = rng.standard_normal(low.layout("Xgrad").total)
    lhs = high.gradient @ (ext.matrix("Xgrad") @ q0)
    rhs = ext.matrix("Xcurl") @ (low.gradient @ q0)
    assert np.abs(lhs - rhs).max() < 1e-10
    v0 = low.gradient @ q0
    lhs = high.curl @ (ext.matrix("Xcurl") @ v0)
    rhs = ext.matrix("Xdiv") @ (low.curl @ v0)
    assert np.abs(lhs - rhs).max() < 1e-10


def test_zero_reduction_bases_are_kernels():
    high = complex_for("ring", 2)
    for space in SPACES:
        basis = zero_reduction_basis(high, space).toarray()
        red = reduction_matrix(high, space).toarray()
        assert np.abs(red @ basis).max() < 1e-13
        lay = high.layout(space)
        assert basis.shape == (lay.total, lay.total - red.shape[0])
        assert np.linalg.matrix_rank(basis) == basis.shape[1]


@pytest.mark.parametrize("name,k", [("ring", 1), ("ring", 2), ("cavity", 1),
                                    ("cavity", 2), ("cube", 2)])
def test_zero_reduction_subcomplex_exact(name, k):
    high = complex_for(name, k)
    bg = zero_reduction_basis(high, "Xgrad").toarray()
    bc = zero_reduction_basis(high, "Xcurl").toarray()
    bd = zero_reduction_basis(high, "Xdiv").toarray()
    bp = zero_reduction_basis(high, "Pk").toarray()
    rg = numeric_rank(high.gradient @ bg).rank
    rc = numeric_rank(high.curl @ bc).rank
    rd = numeric_rank(high.divergence @ bd).rank
    assert rg == bg.shape[1]                    # injective head
    assert bc.shape[1] - rc == rg               # ker = im at the curl stage
    assert bd.shape[1] - rd == rc               # ker = im at the div stage
    assert rd == bp.shape[1]                    # onto the zero-mean tail


@pytest.mark.parametrize("name,k,index,count", [
    ("cube", 2, 1, 0), ("cube", 2, 2, 0),
    ("ring", 1, 1, 1), ("ring", 2, 1, 1), ("ring", 1, 2, 0),
    ("cavity", 1, 2, 1), ("cavity", 1, 1, 0)])
def test_lift_generators(name, k, index, count):
    high = complex_for(name, k)
    low = complex_for(name, 0)
    lifted = lift_generators(high, low, index)
    assert len(lifted.vectors) == count
    assert lifted.space == ("Xcurl" if index == 1 else "Xdiv")
    outgoing = high.curl if index == 1 else high.divergence
    for vec, cert in zip(lifted.vectors, lifted.certificates):
        assert np.linalg.norm(outgoing @ vec) <= 1e-9 * np.linalg.norm(vec)
        assert cert["independence_rank"] == cert["image_rank"] + 1


@pytest.mark.parametrize("k", [1, 2])
def test_potentials_reproduce_extended_constant_fields(k):
    # extending constant tangential/flux data and reconstructing the potential
    # must return the constant field (degree-0 consistency carried to degree k)
    high = complex_for("cube", k)
    ext = extensions_for("cube", k)
    mesh, orient = mesh_and_orientation("cube")
    const = np.asarray([0.3, -0.7, 1.1])
    rule = high.rule("cell", 0)
    basis = high.basis("cell", 0, k, vector=True)

    vk = ext.matrix("Xcurl") @ (orient.edge_tangent @ const)
    ops = high.cell_curl_ops(0)
    vals = np.einsum("pax,a->px", basis.eval_vector(rule.points),
                     ops.potential @ ops.lmap.gather(vk))
    assert np.abs(vals - const[None, :]).max() < 1e-11

    wk = ext.matrix("Xdiv") @ (orient.face_normal @ const)
    dops = high.cell_div_ops(0)
    vals = np.einsum("pax,a->px", basis.eval_vector(rule.points),
                     dops.potential @ dops.lmap.gather(wk))
    assert np.abs(vals - const[None, :]).max() < 1e-11
