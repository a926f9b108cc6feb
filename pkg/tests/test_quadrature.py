"""Quadrature certificates: positive weights, measures, certified exactness.

The exactness oracle is analytic: every builtin entity is an axis-aligned
segment/rectangle/cube, so monomial integrals factor into 1D integrals
x^p over [a, b], evaluated in closed form.
"""

import itertools

import numpy as np
import pytest

from ddrcomplex import QuadratureDegreeError, entity_rule
from ddrcomplex.quadrature import _gauss01

from conftest import mesh_and_orientation


def box_monomial_integral(lo, hi, alpha):
    out = 1.0
    for a, b, p in zip(lo, hi, alpha):
        out *= (b ** (p + 1) - a ** (p + 1)) / (p + 1)
    return out


def entity_box(mesh, kind, index):
    if kind == "edge":
        pts = mesh.vertices[mesh.edges[index]]
    elif kind == "face":
        pts = mesh.vertices[list(mesh.face_loops[index])]
    else:
        pts = mesh.vertices[list(mesh.element_vertices(index))]
    return pts.min(axis=0), pts.max(axis=0)


@pytest.mark.parametrize("kind,index", [("edge", 3), ("face", 2), ("cell", 0)])
@pytest.mark.parametrize("degree", [1, 2, 3, 5, 8])
def test_exactness_on_cube_entities(kind, index, degree):
    mesh, orient = mesh_and_orientation("cube")
    rule = entity_rule(mesh, orient, kind, index, degree)
    assert (rule.weights > 0).all()
    lo, hi = entity_box(mesh, kind, index)
    measure = orient.entity_measure(kind, index)
    assert abs(rule.measure - measure) < 1e-12 * max(measure, 1)
    for alpha in itertools.product(range(degree + 1), repeat=3):
        if sum(alpha) > degree:
            continue
        if any(p > 0 and lo[ax] == hi[ax] for ax, p in enumerate(alpha)):
            # flat direction: the monomial is constant x^p with x = lo[ax]
            pass
        exact = 1.0
        for ax in range(3):
            if lo[ax] == hi[ax]:
                exact *= lo[ax] ** alpha[ax]
            else:
                exact *= (hi[ax] ** (alpha[ax] + 1) - lo[ax] ** (alpha[ax] + 1)) / (alpha[ax] + 1)
        got = (rule.weights * np.prod(rule.points ** np.asarray(alpha)[None, :], axis=1)).sum()
        assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))


def test_unit_edge_s_squared():
    mesh, orient = mesh_and_orientation("cube")
    rule = entity_rule(mesh, orient, "edge", 0, 2)
    svals = (rule.points - mesh.vertices[mesh.edges[0][0]]) @ orient.edge_tangent[0]
    assert abs((rule.weights * svals ** 2).sum() - 1 / 3) < 1e-14


def test_unit_cube_x2y():
    mesh, orient = mesh_and_orientation("cube")
    rule = entity_rule(mesh, orient, "cell", 0, 3)
    val = (rule.weights * rule.points[:, 0] ** 2 * rule.points[:, 1]).sum()
    assert abs(val - 1 / 6) < 1e-13


def test_face_xy_integral():
    mesh, orient = mesh_and_orientation("cube")
    # find the z=0 face and integrate x*y over it: 1/4
    for f in range(mesh.n_faces):
        if abs(orient.face_normal[f][2]) > 0.9 and orient.face_center[f][2] < 0.25:
            rule = entity_rule(mesh, orient, "face", f, 2)
            val = (rule.weights * rule.points[:, 0] * rule.points[:, 1]).sum()
            assert abs(val - 0.25) < 1e-13
            return
    raise AssertionError("no z=0 face found")


def test_degree_capability_error():
    with pytest.raises(QuadratureDegreeError):
        _gauss01(200)


@pytest.mark.parametrize("name", ["ring", "cavity"])
def test_measures_sum(name):
    mesh, orient = mesh_and_orientation(name)
    total = sum(entity_rule(mesh, orient, "cell", t, 2).measure
                for t in range(mesh.n_elements))
    assert abs(total - orient.cell_volume.sum()) < 1e-12
