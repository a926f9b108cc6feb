"""Shared fixtures: builtin meshes and cached operator assemblies.

The heavyweight objects (DdrComplex instances, extension maps) are cached
per (mesh, degree) for the whole session; they are immutable after
construction, so sharing is safe.
"""

import pytest

from ddrcomplex import (
    DdrComplex,
    ExtensionMaps,
    build_voxel_mesh,
    builtin_pattern,
    compute_orientation,
)

_MESHES = {}
_COMPLEXES = {}
_EXTENSIONS = {}


def mesh_and_orientation(name):
    if name not in _MESHES:
        mesh = build_voxel_mesh(builtin_pattern(name))
        _MESHES[name] = (mesh, compute_orientation(mesh))
    return _MESHES[name]


def complex_for(name, degree):
    key = (name, degree)
    if key not in _COMPLEXES:
        mesh, orient = mesh_and_orientation(name)
        _COMPLEXES[key] = DdrComplex(mesh, orient, degree)
    return _COMPLEXES[key]


def extensions_for(name, degree):
    key = (name, degree)
    if key not in _EXTENSIONS:
        _EXTENSIONS[key] = ExtensionMaps(complex_for(name, degree), complex_for(name, 0))
    return _EXTENSIONS[key]


@pytest.fixture(scope="session")
def cube():
    return mesh_and_orientation("cube")


@pytest.fixture(scope="session")
def ring():
    return mesh_and_orientation("ring")


@pytest.fixture(scope="session")
def cavity():
    return mesh_and_orientation("cavity")
