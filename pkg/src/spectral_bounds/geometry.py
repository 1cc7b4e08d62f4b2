"""Planar domains and structured triangle meshes.

Domains come in three families: rhombi with unit side and acute angle 2*pi/m,
axis-aligned rectangles, and regular polygons inscribed in a circle. Meshes
are produced by uniform midpoint (red) refinement of a small hand-built base
triangulation, so every refinement is nested in the previous one. Rhombus
meshes carry the short diagonal as a tagged edge chain at every level; the
half-rhombus triangle used for the mixed eigenvalue problem is literally a
sub-complex of the rhombus mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

OUTER = "outer"
DIAGONAL = "diagonal"


@dataclass(frozen=True)
class DomainSpec:
    """One of: rhombus(m), rectangle(a, b), regular_polygon(k, radius)."""

    kind: str
    m: int | None = None
    a: float | None = None
    b: float | None = None
    k: int | None = None
    radius: float | None = None

    @property
    def area(self) -> float:
        if self.kind == "rhombus":
            return math.sin(2.0 * math.pi / self.m)
        if self.kind == "rectangle":
            return self.a * self.b
        return 0.5 * self.k * self.radius ** 2 * math.sin(2.0 * math.pi / self.k)

    @property
    def width(self) -> float:
        """Minimal distance between parallel supporting lines."""
        if self.kind == "rhombus":
            return math.sin(2.0 * math.pi / self.m)
        if self.kind == "rectangle":
            return self.b
        k, r = self.k, self.radius
        apothem = r * math.cos(math.pi / k)
        return 2.0 * apothem if k % 2 == 0 else r + apothem

    @property
    def diameter(self) -> float:
        if self.kind == "rhombus":
            return 2.0 * math.cos(math.pi / self.m)
        if self.kind == "rectangle":
            return math.hypot(self.a, self.b)
        k, r = self.k, self.radius
        return 2.0 * r if k % 2 == 0 else 2.0 * r * math.cos(math.pi / (2 * k))

    @property
    def centrally_symmetric(self) -> bool:
        if self.kind == "regular_polygon":
            return self.k % 2 == 0
        return True

    @property
    def label(self) -> str:
        if self.kind == "rhombus":
            return f"rhombus_{self.m}"
        if self.kind == "rectangle":
            return f"rectangle_{self.a:g}x{self.b:g}"
        return f"polygon_{self.k}_r{self.radius:g}"


def make_rhombus(m: int) -> DomainSpec:
    """Unit-side rhombus with acute angle 2*pi/m (m >= 5)."""
    if m < 5:
        raise ParameterError(f"rhombus requires m >= 5, got {m}")
    return DomainSpec(kind="rhombus", m=int(m))


def make_rectangle(a: float, b: float) -> DomainSpec:
    if not (a >= b > 0.0):
        raise ParameterError(f"rectangle requires a >= b > 0, got a={a}, b={b}")
    return DomainSpec(kind="rectangle", a=float(a), b=float(b))


def make_regular_polygon(k: int, radius: float = 1.0) -> DomainSpec:
    if k < 3:
        raise ParameterError(f"polygon requires k >= 3, got {k}")
    if radius <= 0.0:
        raise ParameterError(f"polygon radius must be positive, got {radius}")
    return DomainSpec(kind="regular_polygon", k=int(k), radius=float(radius))


@dataclass
class Mesh:
    """Conforming triangle mesh with counterclockwise elements.

    boundary_edges holds tagged node pairs. The tag is "outer" for edges of
    the domain boundary and "diagonal" for the rhombus short-diagonal chain
    (which is interior to the rhombus but becomes true boundary on the
    half-rhombus sub-mesh).
    """

    nodes: np.ndarray
    elements: np.ndarray
    boundary_edges: list[tuple[int, int, str]]
    refinement_level: int = 0
    spec: DomainSpec | None = field(default=None, repr=False)

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def element_count(self) -> int:
        return self.elements.shape[0]


def element_areas(mesh: Mesh) -> np.ndarray:
    """Signed areas; positive for counterclockwise elements."""
    p = mesh.nodes[mesh.elements]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def undirected_edges(mesh: Mesh) -> dict[tuple[int, int], int]:
    """Multiplicity of each undirected element edge."""
    counts: dict[tuple[int, int], int] = {}
    for tri in mesh.elements:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(min(a, b)), int(max(a, b)))
            counts[key] = counts.get(key, 0) + 1
    return counts


def max_edge_length(mesh: Mesh) -> float:
    p = mesh.nodes[mesh.elements]
    lengths = [np.linalg.norm(p[:, i] - p[:, j], axis=1)
               for i, j in ((0, 1), (1, 2), (2, 0))]
    return float(np.max(lengths))


def validate_mesh(mesh: Mesh, area: float | None = None) -> dict:
    """Check orientation, conformity and the Euler relation; return stats.

    Raises ParameterError on any violation. The Euler count V - E + F = 1
    holds for a simply connected triangulated disk.
    """
    areas = element_areas(mesh)
    if np.any(areas <= 0.0):
        raise ParameterError("mesh has non-positive element areas")
    counts = undirected_edges(mesh)
    if any(c > 2 for c in counts.values()):
        raise ParameterError("mesh edge shared by more than two elements")
    euler = mesh.node_count - len(counts) + mesh.element_count
    if euler != 1:
        raise ParameterError(f"Euler relation violated: V - E + F = {euler}")
    boundary = {k for k, c in counts.items() if c == 1}
    tagged = {(min(i, j), max(i, j)) for i, j, _ in mesh.boundary_edges}
    if not boundary <= tagged:
        raise ParameterError("untagged boundary edges present")
    total = float(np.sum(areas))
    if area is not None and abs(total - area) > 1e-12 * max(area, 1.0):
        raise ParameterError(f"mesh area {total} != domain area {area}")
    return {"area": total, "edges": len(counts), "boundary_edges": len(boundary)}


def _base_mesh(spec: DomainSpec) -> Mesh:
    if spec.kind == "rectangle":
        a, b = spec.a, spec.b
        nodes = np.array([[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]])
        elements = np.array([[0, 1, 2], [0, 2, 3]])
        edges = [(0, 1, OUTER), (1, 2, OUTER), (2, 3, OUTER), (3, 0, OUTER)]
    elif spec.kind == "regular_polygon":
        k, r = spec.k, spec.radius
        angles = 2.0 * math.pi * np.arange(k) / k
        ring = np.column_stack([r * np.cos(angles), r * np.sin(angles)])
        nodes = np.vstack([[0.0, 0.0], ring])
        elements = np.array([[0, 1 + i, 1 + (i + 1) % k] for i in range(k)])
        edges = [(1 + i, 1 + (i + 1) % k, OUTER) for i in range(k)]
    else:
        # Rhombus A B C D with A at the origin and the long diagonal on the
        # positive x axis; both diagonals meet at O, giving four triangles.
        half = math.pi / spec.m
        c, s = math.cos(half), math.sin(half)
        nodes = np.array([[0.0, 0.0],   # A
                          [c, s],       # B
                          [2 * c, 0.0],  # C
                          [c, -s],      # D
                          [c, 0.0]])    # O
        elements = np.array([[0, 4, 1], [4, 2, 1], [0, 3, 4], [4, 3, 2]])
        edges = [(0, 1, OUTER), (1, 2, OUTER), (2, 3, OUTER), (3, 0, OUTER),
                 (1, 4, DIAGONAL), (4, 3, DIAGONAL)]
    return Mesh(nodes=nodes, elements=elements, boundary_edges=edges,
                refinement_level=0, spec=spec)


def _half_rhombus_base(m: int) -> Mesh:
    """Triangle A B D of the rhombus: the two left base triangles."""
    half = math.pi / m
    c, s = math.cos(half), math.sin(half)
    nodes = np.array([[0.0, 0.0], [c, s], [c, -s], [c, 0.0]])
    elements = np.array([[0, 3, 1], [0, 2, 3]])
    edges = [(0, 1, OUTER), (2, 0, OUTER), (1, 3, DIAGONAL), (3, 2, DIAGONAL)]
    return Mesh(nodes=nodes, elements=elements, boundary_edges=edges,
                refinement_level=0, spec=make_rhombus(m))


def refine(mesh: Mesh) -> Mesh:
    """Uniform midpoint refinement: each triangle into four similar ones."""
    nodes = [tuple(xy) for xy in mesh.nodes]
    midpoint: dict[tuple[int, int], int] = {}

    def mid(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        idx = midpoint.get(key)
        if idx is None:
            idx = len(nodes)
            nodes.append(tuple(0.5 * (mesh.nodes[i] + mesh.nodes[j])))
            midpoint[key] = idx
        return idx

    elements = []
    for i0, i1, i2 in mesh.elements:
        m01, m12, m20 = mid(i0, i1), mid(i1, i2), mid(i2, i0)
        elements.extend([(i0, m01, m20), (i1, m12, m01),
                         (i2, m20, m12), (m01, m12, m20)])
    edges = []
    for i, j, tag in mesh.boundary_edges:
        k = mid(i, j)
        edges.extend([(i, k, tag), (k, j, tag)])
    return Mesh(nodes=np.array(nodes), elements=np.array(elements, dtype=int),
                boundary_edges=edges, refinement_level=mesh.refinement_level + 1,
                spec=mesh.spec)


def triangulate(spec: DomainSpec, level: int = 0) -> Mesh:
    """Base triangulation refined ``level`` times."""
    if level < 0:
        raise ParameterError(f"refinement level must be >= 0, got {level}")
    mesh = _base_mesh(spec)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def triangulate_half_rhombus(m: int, level: int = 0) -> Mesh:
    """Mesh of the half-rhombus triangle, diagonal side tagged for Dirichlet.

    At every level this is the sub-complex of triangulate(make_rhombus(m))
    lying left of the short diagonal.
    """
    if m < 5:
        raise ParameterError(f"rhombus requires m >= 5, got {m}")
    if level < 0:
        raise ParameterError(f"refinement level must be >= 0, got {level}")
    mesh = _half_rhombus_base(m)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def scaled(mesh: Mesh, factor: float) -> Mesh:
    """Mesh with all coordinates multiplied by ``factor``."""
    if factor <= 0.0:
        raise ParameterError(f"scale factor must be positive, got {factor}")
    return replace(mesh, nodes=mesh.nodes * factor, spec=None)


def mesh_to_text(mesh: Mesh, nodal_values: np.ndarray | None = None) -> str:
    """Plain-text mesh export; node lines carry an extra value column if given.

    Format: "N <count>" then one "x y [v]" line per node, "E <count>" then one
    "i j k" line per element, "B <count>" then one "i j tag" line per tagged
    edge. Floats use 17 significant digits so the mesh round-trips exactly.
    """
    if nodal_values is not None and len(nodal_values) != mesh.node_count:
        raise ParameterError("nodal value column length does not match mesh")
    lines = [f"N {mesh.node_count}"]
    for idx, (x, y) in enumerate(mesh.nodes):
        line = f"{x:.17g} {y:.17g}"
        if nodal_values is not None:
            line += f" {nodal_values[idx]:.17g}"
        lines.append(line)
    lines.append(f"E {mesh.element_count}")
    lines.extend(f"{i} {j} {k}" for i, j, k in mesh.elements)
    lines.append(f"B {len(mesh.boundary_edges)}")
    lines.extend(f"{i} {j} {tag}" for i, j, tag in mesh.boundary_edges)
    return "\n".join(lines) + "\n"
