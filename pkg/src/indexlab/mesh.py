"""Oriented triangle meshes, Euler characteristic and angle defects.

A :class:`SimplicialSurface` is immutable: vertices are a float array, faces are
ordered index triples whose order carries the orientation. Validation happens
at construction so every other routine can trust the invariants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, LookupFailure, MeshError, NumericError, ParseError

Edge = tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class SimplicialSurface:
    vertices: np.ndarray
    triangles: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise MeshError(f"vertices must be an (n, 3) array, got shape {verts.shape}")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        tris = tuple(tuple(int(i) for i in t) for t in self.triangles)
        object.__setattr__(self, "triangles", tris)
        self._validate()

    # -- validation ---------------------------------------------------------
    def _validate(self):
        nv = len(self.vertices)
        directed: dict[Edge, int] = {}
        incidence: dict[Edge, int] = {}
        for f, tri in enumerate(self.triangles):
            if len(tri) != 3:
                raise MeshError(f"face {f} is not a triangle: {tri}")
            if len(set(tri)) != 3:
                raise MeshError(f"face {f} is degenerate (repeated vertex): {tri}")
            if min(tri) < 0 or max(tri) >= nv:
                raise MeshError(f"face {f} references a missing vertex: {tri}")
            for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                if (u, v) in directed:
                    raise MeshError(
                        f"edge {edge_key(u, v)} is traversed twice in the same direction "
                        f"(faces {directed[(u, v)]} and {f}); orientation is inconsistent"
                    )
                directed[(u, v)] = f
                k = edge_key(u, v)
                incidence[k] = incidence.get(k, 0) + 1
                if incidence[k] > 2:
                    raise MeshError(f"non-manifold edge {k}: more than two incident faces")
        if self.triangles:
            t = np.array(self.triangles)
            a, b, c = self.vertices[t[:, 0]], self.vertices[t[:, 1]], self.vertices[t[:, 2]]
            cross = np.linalg.norm(np.cross(b - a, c - a), axis=1)
            scale = np.maximum(np.maximum(np.linalg.norm(b - a, axis=1), np.linalg.norm(c - a, axis=1)), 1e-300)
            bad = np.nonzero(cross <= 1e-12 * scale * scale)[0]
            if len(bad):
                f = int(bad[0])
                raise MeshError(f"face {f} has collinear vertices: {self.triangles[f]}")
        boundary_degree: dict[int, int] = {}
        for (u, v), n in incidence.items():
            if n == 1:
                boundary_degree[u] = boundary_degree.get(u, 0) + 1
                boundary_degree[v] = boundary_degree.get(v, 0) + 1
        for vtx, d in boundary_degree.items():
            if d != 2:
                raise MeshError(f"boundary is not a union of simple cycles at vertex {vtx} (degree {d})")

    # -- combinatorics ------------------------------------------------------
    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """Unordered edges, sorted; their position is the edge index everywhere."""
        seen = set()
        for a, b, c in self.triangles:
            seen.update((edge_key(a, b), edge_key(b, c), edge_key(c, a)))
        return tuple(sorted(seen))

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_faces(self) -> dict[Edge, tuple[int, ...]]:
        out: dict[Edge, list[int]] = {}
        for f, (a, b, c) in enumerate(self.triangles):
            for e in (edge_key(a, b), edge_key(b, c), edge_key(c, a)):
                out.setdefault(e, []).append(f)
        return {e: tuple(v) for e, v in out.items()}

    @cached_property
    def boundary_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if len(self.edge_faces[e]) == 1)

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.boundary_edges for v in e)

    @property
    def is_closed(self) -> bool:
        return not self.boundary_edges

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.triangles)

    @cached_property
    def vertex_faces(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for f, tri in enumerate(self.triangles):
            for v in tri:
                out.setdefault(v, []).append(f)
        return {v: tuple(fs) for v, fs in out.items()}

    def boundary_cycles(self) -> list[list[int]]:
        """Boundary loops as vertex lists, oriented as induced by the faces."""
        succ = {}
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                if len(self.edge_faces[edge_key(u, v)]) == 1:
                    succ[u] = v
        cycles = []
        remaining = dict(succ)
        while remaining:
            start = min(remaining)
            cycle = [start]
            nxt = remaining.pop(start)
            while nxt != start:
                cycle.append(nxt)
                nxt = remaining.pop(nxt)
            cycles.append(cycle)
        return cycles

    def components(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        used = {v for t in self.triangles for v in t}
        return len({find(v) for v in used})


# -- core operations -------------------------------------------------------
def euler_characteristic(surface: SimplicialSurface) -> int:
    v, e, f = surface.counts
    return v - e + f


@dataclass(frozen=True)
class GeodesicTriangle:
    alpha: float
    beta: float
    gamma: float
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        for name in ("alpha", "beta", "gamma"):
            a = getattr(self, name)
            if not 0 < a < math.pi:
                raise DomainError(f"angle {name}={a} is outside (0, pi)")


def spherical_excess(t: GeodesicTriangle) -> float:
    """Area R^2 (alpha + beta + gamma - pi) of a geodesic triangle on the sphere."""
    excess = t.alpha + t.beta + t.gamma - math.pi
    if excess <= 0:
        raise DomainError(f"angle sum {t.alpha + t.beta + t.gamma} does not exceed pi; not a spherical triangle")
    return t.radius**2 * excess


def corner_angle(surface: SimplicialSurface, face: int, vertex: int) -> float:
    tri = surface.triangles[face]
    i = tri.index(vertex)
    p = surface.vertices[tri[i]]
    a = surface.vertices[tri[(i + 1) % 3]] - p
    b = surface.vertices[tri[(i + 2) % 3]] - p
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise NumericError(f"zero-length edge at vertex {vertex} of face {face}")
    cos = float(np.dot(a, b) / (na * nb))
    return math.acos(min(1.0, max(-1.0, cos)))


def angle_defect(surface: SimplicialSurface, vertex: int) -> float:
    if not 0 <= vertex < len(surface.vertices):
        raise LookupFailure(f"no vertex {vertex}")
    if vertex in surface.boundary_vertices:
        raise DomainError(f"vertex {vertex} lies on the boundary; its defect is undefined")
    faces = surface.vertex_faces.get(vertex, ())
    return 2 * math.pi - math.fsum(corner_angle(surface, f, vertex) for f in faces)


@dataclass(frozen=True)
class DefectSum:
    defect_sum: float
    two_pi_chi: float
    residual: float


def defect_sum_check(surface: SimplicialSurface) -> DefectSum:
    if not surface.is_closed:
        raise DomainError("defect sum check needs a closed surface")
    total = math.fsum(angle_defect(surface, v) for v in surface.vertex_faces)
    target = 2 * math.pi * euler_characteristic(surface)
    return DefectSum(total, target, abs(total - target))


# -- subdivision moves ------------------------------------------------------
@dataclass(frozen=True)
class EdgeSplit:
    edge: Edge


@dataclass(frozen=True)
class FaceSplit:
    face: int


def subdivide(surface: SimplicialSurface, move: EdgeSplit | FaceSplit) -> SimplicialSurface:
    """Apply one combinatorial move; the result is again a valid triangle mesh.

    ``EdgeSplit`` inserts the edge midpoint and splits each incident face in
    two. ``FaceSplit`` inserts the barycenter and cones the face off to it.
    """
    verts = surface.vertices
    tris = list(surface.triangles)
    if isinstance(move, EdgeSplit):
        a, b = edge_key(*move.edge)
        if (a, b) not in surface.edge_faces:
            raise LookupFailure(f"no edge {(a, b)} in the mesh")
        m = len(verts)
        new_verts = np.vstack([verts, (verts[a] + verts[b]) / 2])
        for f in surface.edge_faces[(a, b)]:
            t = tris[f]
            i = next(k for k in range(3) if {t[k], t[(k + 1) % 3]} == {a, b})
            u, v, w = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
            tris[f] = (u, m, w)
            tris.append((m, v, w))
        return SimplicialSurface(new_verts, tuple(tris))
    if isinstance(move, FaceSplit):
        if not 0 <= move.face < len(tris):
            raise LookupFailure(f"no face {move.face} in the mesh")
        a, b, c = tris[move.face]
        m = len(verts)
        new_verts = np.vstack([verts, (verts[a] + verts[b] + verts[c]) / 3])
        tris[move.face] = (a, b, m)
        tris.extend([(b, c, m), (c, a, m)])
        return SimplicialSurface(new_verts, tuple(tris))
    raise TypeError(f"unknown move {move!r}")


# -- generators -------------------------------------------------------------
def _outward(vertices: np.ndarray, faces: Iterable[Sequence[int]]) -> tuple[tuple[int, int, int], ...]:
    """Orient faces of a star-shaped (about the origin) closed mesh outward."""
    out = []
    for a, b, c in faces:
        n = np.cross(vertices[b] - vertices[a], vertices[c] - vertices[a])
        out.append((a, b, c) if np.dot(n, vertices[a] + vertices[b] + vertices[c]) > 0 else (a, c, b))
    return tuple(out)


def tetrahedron() -> SimplicialSurface:
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return SimplicialSurface(v, _outward(v, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))


def octahedron() -> SimplicialSurface:
    v = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    faces = [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)]
    return SimplicialSurface(v, _outward(v, faces))


def icosahedron() -> SimplicialSurface:
    phi = (1 + math.sqrt(5)) / 2
    v = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            v.extend([(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)])
    v = np.array(v, dtype=float)
    v /= np.linalg.norm(v, axis=1)[:, None]
    # faces = triples of mutually adjacent vertices (edge length is the minimum distance)
    d = np.linalg.norm(v[:, None] - v[None], axis=2)
    edge_len = d[d > 1e-9].min()
    adj = np.abs(d - edge_len) < 1e-9
    faces = [
        (i, j, k)
        for i in range(12)
        for j in range(i + 1, 12)
        for k in range(j + 1, 12)
        if adj[i, j] and adj[j, k] and adj[i, k]
    ]
    return SimplicialSurface(v, _outward(v, faces))


def icosphere(level: int, radius: float = 1.0) -> SimplicialSurface:
    """Loop-style 1-to-4 subdivision of the icosahedron, projected to the sphere."""
    if level < 0:
        raise DomainError("icosphere level must be nonnegative")
    base = icosahedron()
    verts = [tuple(p) for p in base.vertices]
    tris = list(base.triangles)
    for _ in range(level):
        cache: dict[Edge, int] = {}

        def mid(a, b):
            k = edge_key(a, b)
            if k not in cache:
                p = (np.array(verts[a]) + np.array(verts[b])) / 2
                verts.append(tuple(p / np.linalg.norm(p)))
                cache[k] = len(verts) - 1
            return cache[k]

        new = []
        for a, b, c in tris:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        tris = new
    return SimplicialSurface(np.array(verts) * radius, tuple(tris))


def hole_centers(g: int) -> list[tuple[float, float]]:
    """Centers of the unit square holes used by :func:`holed_rectangle`."""
    return [(2.0 * i - (g - 1), 0.0) for i in range(g)]


def holed_rectangle(g: int, resolution: int = 1) -> SimplicialSurface:
    """Planar rectangle [-(g+1), g+1] x [-2, 2] with g unit-square holes.

    Holes are centered at x = -(g-1), -(g-1)+2, ..., g-1 on the x-axis, so for
    g = 2 they sit around (-1, 0) and (1, 0). The grid spacing is
    0.5/resolution; every grid square is cut into two counterclockwise
    triangles. g = 0 gives a square disk, g = 1 an annulus.
    """
    if g < 0 or resolution < 1:
        raise DomainError("need g >= 0 and resolution >= 1")
    h = 0.5 / resolution
    half_w = g + 1
    nx = int(round(2 * half_w / h))
    ny = int(round(4 / h))
    xs = [-half_w + i * h for i in range(nx + 1)]
    ys = [-2 + j * h for j in range(ny + 1)]
    centers = hole_centers(g)

    def in_hole(cx, cy):
        return any(abs(cx - x0) < 0.5 and abs(cy - y0) < 0.5 for x0, y0 in centers)

    def on_boundary(i, j):
        if i in (0, nx) or j in (0, ny):
            return True
        x, y = xs[i], ys[j]
        return any(abs(x - x0) <= 0.5 + 1e-9 and abs(y - y0) <= 0.5 + 1e-9 for x0, y0 in centers)

    index: dict[tuple[int, int], int] = {}
    verts = []
    tris = []

    def vid(i, j):
        if (i, j) not in index:
            index[(i, j)] = len(verts)
            verts.append((xs[i], ys[j], 0.0))
        return index[(i, j)]

    for i in range(nx):
        for j in range(ny):
            if in_hole(xs[i] + h / 2, ys[j] + h / 2):
                continue
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            # a diagonal joining two boundary vertices would break doubling
            if on_boundary(i, j) and on_boundary(i + 1, j + 1):
                tris.append((a, b, d))
                tris.append((b, c, d))
            else:
                tris.append((a, b, c))
                tris.append((a, c, d))
    return SimplicialSurface(np.array(verts), tuple(tris))


# -- OFF files --------------------------------------------------------------
def read_off(path_or_text: str | Path) -> SimplicialSurface:
    """Parse the triangle-only OFF dialect: header, counts, V points, F faces."""
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text):
        text = Path(path_or_text).read_text()
    else:
        text = path_or_text
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "OFF":
        raise ParseError("OFF file must start with the literal line 'OFF'", 1)
    try:
        nv, nf, _ = (int(x) for x in lines[1].split())
    except (IndexError, ValueError):
        raise ParseError("second line must hold three integers 'V F E'", 2) from None
    if len(lines) < 2 + nv + nf:
        raise ParseError(f"expected {nv} vertex lines and {nf} face lines, file is too short")
    verts = []
    for k in range(nv):
        parts = lines[2 + k].split()
        if len(parts) != 3:
            raise ParseError(f"vertex line needs three coordinates: {lines[2 + k]!r}", 3 + k)
        verts.append([float(p) for p in parts])
    tris = []
    for k in range(nf):
        parts = lines[2 + nv + k].split()
        if len(parts) != 4 or parts[0] != "3":
            raise ParseError(f"only triangles ('3 i j k') are supported: {lines[2 + nv + k]!r}", 3 + nv + k)
        tris.append(tuple(int(p) for p in parts[1:]))
    return SimplicialSurface(np.array(verts, dtype=float).reshape(-1, 3), tuple(tris))


def write_off(surface: SimplicialSurface, path: str | Path | None = None) -> str:
    v, e, f = surface.counts
    out = ["OFF", f"{v} {f} {e}"]
    out += [" ".join(repr(float(x)) for x in p) for p in surface.vertices]
    out += [f"3 {a} {b} {c}" for a, b, c in surface.triangles]
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
