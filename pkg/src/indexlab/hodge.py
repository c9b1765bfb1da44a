"""Simplicial cochain complexes of triangle meshes and their Hodge theory.

Conventions: edges are oriented from the smaller to the larger vertex index;
``boundary_1`` is the V x E incidence matrix and ``boundary_2`` the E x F one,
so the coboundaries are their transposes. Exact quantities (ranks, Betti
numbers, kernels of the collapsed operator) use integer elimination; spectra
use floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import exact
from .errors import ConsistencyError, DomainError, NumericError, ResourceError
from .mesh import SimplicialSurface, edge_key, euler_characteristic

MAX_SIMPLICES = 2000
ZERO_EIGENVALUE = 1e-8


@dataclass(frozen=True, eq=False)
class ChainComplex:
    boundary_1: np.ndarray
    boundary_2: np.ndarray
    weights: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    condition: str = "none"
    # simplex labels: vertex ids, edges, face ids of the underlying mesh
    labels: tuple[tuple, tuple, tuple] | None = field(default=None, repr=False)

    def __post_init__(self):
        b1 = np.asarray(self.boundary_1, dtype=np.int64)
        b2 = np.asarray(self.boundary_2, dtype=np.int64)
        if b1.ndim != 2 or b2.ndim != 2 or b1.shape[1] != b2.shape[0]:
            raise DomainError(f"boundary shapes do not compose: {b1.shape} and {b2.shape}")
        if not set(np.unique(b1)) <= {-1, 0, 1} or not set(np.unique(b2)) <= {-1, 0, 1}:
            raise DomainError("boundary matrices must have entries in {-1, 0, 1}")
        if not _composes_to_zero(b1, b2):
            raise DomainError("boundary_1 @ boundary_2 is not zero")
        if self.condition in ("none", "absolute"):
            if b1.size and np.any(np.count_nonzero(b1, axis=0) != 2):
                raise DomainError("every edge column of boundary_1 needs exactly two nonzeros")
            if b2.size and np.any(np.count_nonzero(b2, axis=0) != 3):
                raise DomainError("every face column of boundary_2 needs exactly three nonzeros")
        sizes = (b1.shape[0], b1.shape[1], b2.shape[1])
        w = self.weights
        if w is None:
            w = tuple(np.ones(n) for n in sizes)
        w = tuple(np.asarray(x, dtype=float) for x in w)
        if tuple(len(x) for x in w) != sizes or any(np.any(x <= 0) for x in w):
            raise DomainError("weights must be positive and match the simplex counts")
        for arr in (b1, b2, *w):
            arr.setflags(write=False)
        object.__setattr__(self, "boundary_1", b1)
        object.__setattr__(self, "boundary_2", b2)
        object.__setattr__(self, "weights", w)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.boundary_1.shape[0], self.boundary_1.shape[1], self.boundary_2.shape[1]

    def coboundary(self, k: int) -> np.ndarray:
        """d_k : C^k -> C^{k+1} (zero-sized for k outside 0..1)."""
        if k == 0:
            return self.boundary_1.T
        if k == 1:
            return self.boundary_2.T
        n = self.dims
        if k == -1:
            return np.zeros((n[0], 0), dtype=np.int64)
        if k == 2:
            return np.zeros((0, n[2]), dtype=np.int64)
        raise ValueError(f"no coboundary in degree {k}")

    def with_weights(self, weights) -> "ChainComplex":
        return ChainComplex(self.boundary_1, self.boundary_2, weights, self.condition, self.labels)


def _composes_to_zero(b1: np.ndarray, b2: np.ndarray) -> bool:
    """b1 @ b2 == 0, accumulated over nonzeros (dense integer matmul is slow)."""
    rows_of: dict[int, list[tuple[int, int]]] = {}
    for v, e in zip(*np.nonzero(b1)):
        rows_of.setdefault(int(e), []).append((int(v), int(b1[v, e])))
    acc: dict[tuple[int, int], int] = {}
    for e, f in zip(*np.nonzero(b2)):
        x = int(b2[e, f])
        for v, y in rows_of.get(int(e), ()):
            acc[(v, int(f))] = acc.get((v, int(f)), 0) + x * y
    return not any(acc.values())


def build_complex(surface: SimplicialSurface, boundary_condition: str = "none") -> ChainComplex:
    """Cochain complex of the mesh.

    ``none`` is for closed surfaces. ``absolute`` keeps every simplex (the
    Neumann-type complex); ``relative`` keeps only cochains vanishing on the
    boundary, i.e. drops boundary vertices and boundary edges (Dirichlet-type).
    """
    if boundary_condition not in ("none", "absolute", "relative"):
        raise DomainError(f"unknown boundary condition {boundary_condition!r}")
    closed = surface.is_closed
    if boundary_condition == "none" and not closed:
        raise DomainError("surface has boundary; choose 'absolute' or 'relative'")
    if boundary_condition != "none" and closed:
        raise DomainError(f"'{boundary_condition}' conditions need a surface with boundary")
    nv = len(surface.vertices)
    edges = surface.edges
    eidx = surface.edge_index
    b1 = np.zeros((nv, len(edges)), dtype=np.int64)
    for j, (a, b) in enumerate(edges):
        b1[a, j] = -1
        b1[b, j] = 1
    b2 = np.zeros((len(edges), len(surface.triangles)), dtype=np.int64)
    for f, (a, b, c) in enumerate(surface.triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            b2[eidx[edge_key(u, v)], f] = 1 if u < v else -1
    vlabels = tuple(range(nv))
    elabels = edges
    flabels = tuple(range(len(surface.triangles)))
    if boundary_condition == "relative":
        keep_v = [v for v in range(nv) if v not in surface.boundary_vertices]
        bset = set(surface.boundary_edges)
        keep_e = [j for j, e in enumerate(edges) if e not in bset]
        b1 = b1[np.ix_(keep_v, keep_e)]
        b2 = b2[keep_e, :]
        vlabels = tuple(keep_v)
        elabels = tuple(edges[j] for j in keep_e)
    return ChainComplex(b1, b2, None, boundary_condition, (vlabels, elabels, flabels))


# -- exact homology ---------------------------------------------------------
def ranks(complex: ChainComplex) -> tuple[int, int]:
    return exact.integer_rank(complex.boundary_1), exact.integer_rank(complex.boundary_2)


def betti_numbers(complex: ChainComplex) -> tuple[int, int, int]:
    r1, r2 = ranks(complex)
    v, e, f = complex.dims
    return v - r1, e - r1 - r2, f - r2


# -- Laplacians and spectra -------------------------------------------------
def hodge_laplacian(complex: ChainComplex, degree: int) -> np.ndarray:
    """Symmetrized weighted Laplacian d*d + dd* on C^degree.

    With unit weights this is the combinatorial Laplacian d^T d + d d^T. For
    other weights the matrix returned is W^{1/2} (d*d + dd*) W^{-1/2}, which is
    symmetric and has the same spectrum.
    """
    if degree not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    w = (*complex.weights,)
    up = complex.coboundary(degree).astype(float)
    down = complex.coboundary(degree - 1).astype(float)
    wk = w[degree]
    sk = np.sqrt(wk)
    lap = np.zeros((len(wk), len(wk)))
    if degree < 2:
        a = np.sqrt(w[degree + 1])[:, None] * up / sk[None, :]
        lap += a.T @ a
    if degree > 0:
        b = sk[:, None] * down / np.sqrt(w[degree - 1])[None, :]
        lap += b @ b.T
    return lap


def laplacian_spectrum(complex: ChainComplex, degree: int) -> np.ndarray:
    if sum(complex.dims) > MAX_SIMPLICES:
        raise ResourceError(f"complex has {sum(complex.dims)} simplices; spectra are capped at {MAX_SIMPLICES}")
    lap = hodge_laplacian(complex, degree)
    if lap.size == 0:
        return np.zeros(0)
    try:
        vals = np.linalg.eigvalsh(lap)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver failed on the degree-{degree} Laplacian ({lap.shape[0]}x{lap.shape[0]}): {exc}") from exc
    if vals.min() < -1e-9:
        raise NumericError(f"degree-{degree} Laplacian has negative eigenvalue {vals.min()}")
    return np.clip(vals, 0.0, None)


def spectra(complex: ChainComplex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(laplacian_spectrum(complex, k) for k in range(3))


def heat_supertrace(complex: ChainComplex, t: float, spectrum=None) -> float:
    """Sum over degrees of (-1)^k Tr exp(-t Laplacian_k)."""
    if not t > 0:
        raise DomainError(f"heat time must be positive, got {t}")
    spec = spectrum if spectrum is not None else spectra(complex)
    return math.fsum((-1) ** k * math.fsum(np.exp(-t * lam)) for k, lam in enumerate(spec))


def harmonic_dimensions(complex: ChainComplex, tol: float = ZERO_EIGENVALUE, spectrum=None) -> tuple[int, int, int]:
    spec = spectrum if spectrum is not None else spectra(complex)
    return tuple(int(np.count_nonzero(lam < tol)) for lam in spec)


# -- the collapsed operator -------------------------------------------------
def collapsed_operator(complex: ChainComplex) -> np.ndarray:
    """D = d_0 + d_1^* as a matrix C^0 (+) C^2 -> C^1 (unit weights: [d0 | d1^T])."""
    w0, w1, w2 = complex.weights
    d0 = complex.coboundary(0).astype(float)
    d1_adj = (complex.coboundary(1).T.astype(float) * w2[None, :]) / w1[:, None]
    return np.hstack([d0, d1_adj])


def collapsed_kernel_cokernel(complex: ChainComplex) -> tuple[int, int]:
    """(dim ker D, dim coker D), exact. Positive weights do not change the rank."""
    stacked = np.hstack([complex.coboundary(0), complex.coboundary(1).T])
    r = exact.integer_rank(stacked)
    v, e, f = complex.dims
    return v + f - r, e - r


def collapsed_index(complex: ChainComplex) -> int:
    ker, coker = collapsed_kernel_cokernel(complex)
    return ker - coker


@dataclass(frozen=True)
class HodgeReport:
    betti: tuple[int, int, int]
    index: int
    eigenvalues: tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]] = field(repr=False)
    supertrace: tuple[tuple[float, float], ...] = ()

    def to_json(self) -> dict:
        return {
            "betti": list(self.betti),
            "index": self.index,
            "supertrace": [{"t": t, "value": v} for t, v in self.supertrace],
        }


def hodge_report(complex: ChainComplex, ts: Sequence[float] = (1.0,)) -> HodgeReport:
    betti = betti_numbers(complex)
    spec = spectra(complex)
    index = collapsed_index(complex)
    if index != betti[0] - betti[1] + betti[2]:
        raise ConsistencyError(f"collapsed index {index} disagrees with Betti numbers {betti}")
    traces = tuple((float(t), heat_supertrace(complex, t, spec)) for t in ts)
    return HodgeReport(betti, index, tuple(tuple(map(float, s)) for s in spec), traces)


# -- doubling ---------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DoubledSurface:
    surface: SimplicialSurface
    involution: tuple[int, ...]
    base: SimplicialSurface


def double_surface(base: SimplicialSurface, lift: float = 0.25) -> DoubledSurface:
    """Glue base to a mirrored copy of itself along the boundary.

    Interior vertices of the two sheets are pushed to z = +lift and -lift so
    the involution is the reflection z -> -z; boundary vertices stay put and
    are exactly its fixed points.
    """
    if base.is_closed:
        raise DomainError("doubling needs a surface with nonempty boundary")
    bverts = base.boundary_vertices
    bedges = set(base.boundary_edges)
    chords = [e for e in base.edges if e not in bedges and e[0] in bverts and e[1] in bverts]
    if chords:
        raise DomainError(f"interior edge {chords[0]} joins two boundary vertices; split it before doubling")
    nv = len(base.vertices)
    twin = {}
    verts = [p.copy() for p in base.vertices]
    for v in range(nv):
        if v in bverts:
            twin[v] = v
        else:
            verts[v] = verts[v] + np.array([0.0, 0.0, lift])
            twin[v] = len(verts)
            verts.append(base.vertices[v] - np.array([0.0, 0.0, lift]))
    tris = list(base.triangles)
    tris += [(twin[a], twin[c], twin[b]) for a, b, c in base.triangles]
    tau = [0] * len(verts)
    for v, w in twin.items():
        tau[v], tau[w] = w, v
    surface = SimplicialSurface(np.array(verts), tuple(tris))
    return DoubledSurface(surface, tuple(tau), base)


def genus_surface(g: int, resolution: int = 1) -> SimplicialSurface:
    """Closed orientable surface of genus g: the double of the g-holed rectangle."""
    from .mesh import holed_rectangle

    return double_surface(holed_rectangle(g, resolution)).surface


# -- circulation periods ----------------------------------------------------
def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def hole_loops(base: SimplicialSurface) -> list[list[int]]:
    """Inner boundary cycles, each oriented counterclockwise, sorted by centroid.

    The outer boundary is the cycle of largest absolute signed area.
    """
    cycles = base.boundary_cycles()
    if not cycles:
        return []
    areas = [_signed_area(base.vertices[c]) for c in cycles]
    outer = max(range(len(cycles)), key=lambda i: abs(areas[i]))
    loops = []
    for i, c in enumerate(cycles):
        if i == outer:
            continue
        loops.append(c if areas[i] > 0 else c[::-1])
    loops.sort(key=lambda c: tuple(base.vertices[c].mean(axis=0)[:2]))
    return loops


def loop_functional(base: SimplicialSurface, loop: Sequence[int], edges: Sequence = None) -> np.ndarray:
    """Row vector L with L @ cochain = sum of the cochain around the loop."""
    index = {e: i for i, e in enumerate(edges)} if edges is not None else base.edge_index
    row = np.zeros(len(index))
    for u, v in zip(loop, list(loop[1:]) + [loop[0]]):
        row[index[edge_key(u, v)]] += 1.0 if u < v else -1.0
    return row


def harmonic_basis(complex: ChainComplex, exact_arithmetic: bool = True):
    """Basis of harmonic 1-cochains (kernel of both d_1 and d_0^T).

    Exact mode returns rational vectors from the null space of the stacked
    integer matrix [d_1; d_0^T]; the kernel of the Laplacian is the same space.
    Numeric mode returns an orthonormal float basis from the Laplacian.
    """
    if exact_arithmetic:
        stacked = np.vstack([complex.coboundary(1), complex.coboundary(0).T])
        return exact.rational_nullspace(stacked)
    vals, vecs = np.linalg.eigh(hodge_laplacian(complex, 1))
    return vecs[:, vals < ZERO_EIGENVALUE].T


@dataclass(frozen=True)
class PeriodReport:
    matrix: tuple[tuple[Fraction, ...], ...]
    determinant: Fraction
    loops: tuple[tuple[int, ...], ...]

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix]).reshape(len(self.loops), -1)


def circulation_periods(base: SimplicialSurface) -> PeriodReport:
    """Periods of a harmonic basis around the hole loops, exactly over Q.

    Row i is the hole loop i, column j the harmonic basis vector j. The map
    cochain -> periods must be an isomorphism; a singular matrix raises.
    """
    loops = hole_loops(base)
    cx = build_complex(base, "absolute")
    basis = harmonic_basis(cx, exact_arithmetic=True)
    if len(basis) != len(loops):
        raise ConsistencyError(f"{len(basis)} harmonic 1-cochains but {len(loops)} hole loops")
    eidx = base.edge_index
    mat = []
    for loop in loops:
        row = []
        for vec in basis:
            s = Fraction(0)
            for u, v in zip(loop, loop[1:] + loop[:1]):
                x = vec[eidx[edge_key(u, v)]]
                s += x if u < v else -x
            row.append(s)
        mat.append(tuple(row))
    det = _fraction_det(mat)
    if loops and det == 0:
        raise ConsistencyError("period matrix is singular: circulation map is not an isomorphism")
    return PeriodReport(tuple(mat), det, tuple(tuple(l) for l in loops))


def _fraction_det(mat) -> Fraction:
    n = len(mat)
    a = [list(r) for r in mat]
    det = Fraction(1)
    for k in range(n):
        p = next((r for r in range(k, n) if a[r][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det *= a[k][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            for c in range(k, n):
                a[r][c] -= f * a[k][c]
    return det


VectorField = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


def angular_field(center: tuple[float, float]) -> VectorField:
    """(1/2pi) * (-(y - y0), x - x0) / r^2: unit circulation around ``center``."""
    x0, y0 = center

    def field(x, y):
        dx, dy = x - x0, y - y0
        r2 = dx * dx + dy * dy
        return -dy / (2 * math.pi * r2), dx / (2 * math.pi * r2)

    return field


def sample_one_form(surface: SimplicialSurface, field: VectorField, points: int = 5) -> np.ndarray:
    """Line integral of a planar vector field along every edge (Gauss-Legendre)."""
    nodes, wts = np.polynomial.legendre.leggauss(points)
    s = (nodes + 1) / 2
    edges = np.array(surface.edges)
    p = surface.vertices[edges[:, 0], :2]
    q = surface.vertices[edges[:, 1], :2]
    d = q - p
    pts = p[:, None, :] + s[None, :, None] * d[:, None, :]
    fx, fy = field(pts[..., 0], pts[..., 1])
    return 0.5 * ((fx * d[:, None, 0] + fy * d[:, None, 1]) * wts[None, :]).sum(axis=1)


def field_periods(base: SimplicialSurface, fields: Sequence[VectorField], points: int = 5) -> np.ndarray:
    """Matrix of circulations: row = hole loop, column = sampled field."""
    loops = hole_loops(base)
    rows = [loop_functional(base, loop) for loop in loops]
    cochains = [sample_one_form(base, f, points) for f in fields]
    return np.array([[float(r @ c) for c in cochains] for r in rows]).reshape(len(loops), len(fields))


def closedness_defect(base: SimplicialSurface, cochain: np.ndarray) -> float:
    """max |d_1 c| over faces: how far a sampled 1-form is from being irrotational."""
    cx = build_complex(base, "absolute")
    return float(np.abs(cx.coboundary(1) @ cochain).max()) if len(cochain) else 0.0
