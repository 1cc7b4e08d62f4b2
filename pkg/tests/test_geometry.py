"""Domain specs, mesh construction, refinement, and the export format."""

import math

import numpy as np
import pytest

from spectral_bounds import geometry
from spectral_bounds.errors import ParameterError

import pipelines


def test_rhombus_spec_geometry():
    spec = geometry.make_rhombus(8)
    beta = 2.0 * math.pi / 8
    assert spec.area == pytest.approx(math.sin(beta), rel=1e-15)
    assert spec.width == pytest.approx(math.sin(beta), rel=1e-15)
    assert spec.diameter == pytest.approx(2.0 * math.cos(beta / 2.0), rel=1e-15)
    assert spec.centrally_symmetric

    spec6 = geometry.make_rhombus(6)
    assert spec6.diameter == pytest.approx(math.sqrt(3.0), rel=1e-15)

    spec100 = geometry.make_rhombus(100)
    assert spec100.area == pytest.approx(math.sin(math.pi / 50.0), rel=1e-15)


def test_rectangle_spec_geometry():
    sq = geometry.make_rectangle(1.0, 1.0)
    assert sq.area == 1.0
    assert sq.diameter == pytest.approx(math.sqrt(2.0), rel=1e-15)

    r21 = geometry.make_rectangle(2.0, 1.0)
    assert r21.width == 1.0
    assert r21.diameter == pytest.approx(math.sqrt(5.0), rel=1e-15)
    assert 0.0 < r21.width <= r21.diameter


def test_regular_polygon_spec_geometry():
    sq = geometry.make_regular_polygon(4, 1.0 / math.sqrt(2.0))
    assert sq.area == pytest.approx(1.0, rel=1e-15)

    gon = geometry.make_regular_polygon(64, 1.0)
    assert abs(gon.area - math.pi) / math.pi < 2e-3

    tri = geometry.make_regular_polygon(3, 1.0)
    assert tri.area == pytest.approx(3.0 * math.sqrt(3.0) / 4.0, rel=1e-15)
    assert not tri.centrally_symmetric


def test_spec_validation():
    with pytest.raises(ParameterError):
        geometry.make_rhombus(4)
    with pytest.raises(ParameterError):
        geometry.make_rectangle(1.0, 2.0)
    with pytest.raises(ParameterError):
        geometry.make_rectangle(1.0, 0.0)
    with pytest.raises(ParameterError):
        geometry.make_regular_polygon(2)
    with pytest.raises(ParameterError):
        geometry.make_regular_polygon(5, -1.0)


@pytest.mark.parametrize("spec", [
    geometry.make_rhombus(8),
    geometry.make_rhombus(64),
    pipelines.SQUARE,
    pipelines.RECT21,
    geometry.make_regular_polygon(3, 1.0),
    pipelines.GON64,
])
@pytest.mark.parametrize("level", [0, 2])
def test_mesh_invariants(spec, level):
    mesh = pipelines.mesh(spec, level)
    stats = geometry.validate_mesh(mesh, area=spec.area)
    assert stats["area"] == pytest.approx(spec.area, rel=1e-12)
    assert mesh.refinement_level == level


def test_refinement_counts_and_edge_lengths():
    base = pipelines.mesh(pipelines.SQUARE, 0)
    fine = geometry.refine(base)
    assert fine.element_count == 4 * base.element_count
    assert geometry.max_edge_length(fine) == pytest.approx(
        geometry.max_edge_length(base) / 2.0, rel=1e-12)
    finer = geometry.refine(fine)
    assert finer.element_count == 16 * base.element_count

    lvl3 = pipelines.mesh(pipelines.SQUARE, 3)
    assert lvl3.element_count == base.element_count * 4 ** 3


def test_rhombus_diagonal_chain_every_level():
    """The short diagonal must be a tagged edge chain at every level."""
    for level in range(4):
        mesh = pipelines.mesh(geometry.make_rhombus(8), level)
        diag = [(i, j) for i, j, tag in mesh.boundary_edges
                if tag == geometry.DIAGONAL]
        assert diag, "no diagonal edges tagged"
        edges = geometry.undirected_edges(mesh)
        for i, j in diag:
            key = (min(i, j), max(i, j))
            assert key in edges, "tagged diagonal pair is not a mesh edge"
        # The chain covers the full short diagonal: its summed length is the
        # diagonal length 2 sin(pi / 8), and every node on it has x = const.
        nodes = mesh.nodes
        total = sum(np.linalg.norm(nodes[i] - nodes[j]) for i, j in diag)
        assert total == pytest.approx(2.0 * math.sin(math.pi / 8.0), rel=1e-12)
        xs = {round(float(nodes[i][0]), 12) for i, j in diag for i in (i, j)}
        assert len(xs) == 1


def test_half_rhombus_is_submesh():
    full = pipelines.mesh(geometry.make_rhombus(8), 2)
    half = geometry.triangulate_half_rhombus(8, 2)
    geometry.validate_mesh(half, area=full.spec.area / 2.0)
    # every half-rhombus element appears in the full mesh with matching
    # coordinates (the sub-complex property used by the mixed eigenproblem)
    full_tris = {tuple(sorted(map(tuple, full.nodes[el]))) for el in full.elements}
    half_tris = {tuple(sorted(map(tuple, half.nodes[el]))) for el in half.elements}
    assert half_tris <= full_tris
    assert len(half_tris) * 2 == len(full_tris)
    tags = {tag for _, _, tag in half.boundary_edges}
    assert tags == {geometry.OUTER, geometry.DIAGONAL}


def test_scaled_mesh():
    mesh = pipelines.mesh(pipelines.SQUARE, 1)
    double = geometry.scaled(mesh, 2.0)
    assert np.allclose(double.nodes, 2.0 * mesh.nodes)
    assert float(np.sum(geometry.element_areas(double))) == pytest.approx(
        4.0, rel=1e-12)
    with pytest.raises(ParameterError):
        geometry.scaled(mesh, 0.0)


def test_mesh_export_format():
    mesh = pipelines.mesh(pipelines.SQUARE, 0)
    text = geometry.mesh_to_text(mesh)
    lines = text.splitlines()
    assert lines[0] == f"N {mesh.node_count}"
    coords = lines[1].split()
    assert len(coords) == 2
    # 17 significant digits round-trip doubles exactly
    assert float(coords[0]) == mesh.nodes[0, 0]
    e_at = 1 + mesh.node_count
    assert lines[e_at] == f"E {mesh.element_count}"
    b_at = e_at + 1 + mesh.element_count
    assert lines[b_at] == f"B {len(mesh.boundary_edges)}"
    # nodal column variant appends one value per node line
    with_values = geometry.mesh_to_text(mesh, np.arange(mesh.node_count) * 1.0)
    assert len(with_values.splitlines()[1].split()) == 3
