"""Lattice-point counting: the coin jackpot, slack variables and Pick's theorem."""
from __future__ import annotations

import re
from pathlib import Path
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, ParseError, ResourceError

BRUTE_LIMIT_K = 10_000
PICK_ENUMERATION_LIMIT = 10**7


@dataclass(frozen=True)
class JackpotInstance:
    """Nonnegative (q, n, c) with 5q + n + c = 5k; k is the most quarters paid."""

    k: int
    weights: tuple[int, int, int] = (5, 1, 1)

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k!r}")
        if self.weights != (5, 1, 1):
            raise DomainError("coin weights are fixed at (5, 1, 1)")

    @property
    def target(self) -> int:
        return 5 * self.k


def jackpot_formula(k: int) -> int:
    value = Fraction(5, 2) * k * k + Fraction(7, 2) * k + 1
    if value.denominator != 1:
        raise ArithmeticError(f"closed form is not integral at k={k}")
    return int(value)


def _count_block(args) -> int:
    # every (q, n) in the block is generated and c = 5k - 5q - n checked
    q_lo, q_hi, target = args
    count = 0
    for q in range(q_lo, q_hi):
        rest = target - 5 * q
        c = rest - np.arange(rest + 1, dtype=np.int64)
        count += int(np.count_nonzero(c >= 0))
    return count


def _brute_guard(k: int):
    if k > BRUTE_LIMIT_K:
        raise ResourceError(f"brute-force enumeration is capped at k <= {BRUTE_LIMIT_K}, got k={k}")


def count_jackpots(inst: JackpotInstance, mode: str = "formula", workers: int = 1) -> int:
    """Number of jackpots, by enumeration (``brute``) or the closed form.

    Brute mode walks every (q, n) with c determined; with ``workers > 1`` the
    q-range is cut into contiguous blocks counted in separate processes and
    summed in block order.
    """
    if mode == "formula":
        return jackpot_formula(inst.k)
    if mode != "brute":
        raise DomainError(f"unknown mode {mode!r}")
    _brute_guard(inst.k)
    blocks = _partition(inst.k + 1, max(1, workers))
    jobs = [(lo, hi, inst.target) for lo, hi in blocks]
    if workers <= 1:
        return sum(_count_block(j) for j in jobs)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_block, jobs))


def _partition(n: int, parts: int) -> list[tuple[int, int]]:
    parts = min(parts, max(n, 1))
    step, extra = divmod(n, parts)
    out, lo = [], 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def enumerate_points(inst: JackpotInstance) -> Iterator[tuple[int, int, int]]:
    """Every solution (q, n, c) once, in lexicographic (q, n) order."""
    _brute_guard(inst.k)
    for q in range(inst.k + 1):
        rest = inst.target - 5 * q
        for n in range(rest + 1):
            yield q, n, rest - n


# -- slack variables --------------------------------------------------------
@dataclass(frozen=True)
class LinearInequality:
    """sum coeffs[v] * v  (sense)  rhs, with sense '<=' or '>='."""

    coeffs: tuple[tuple[str, int], ...]
    sense: str
    rhs: int

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ParseError(f"unknown comparison {self.sense!r}")
        for v, c in self.coeffs:
            if not isinstance(c, int) or isinstance(c, bool):
                raise ParseError(f"coefficient of {v} is not an integer: {c!r}")
        if not isinstance(self.rhs, int):
            raise ParseError(f"right-hand side is not an integer: {self.rhs!r}")

    @classmethod
    def of(cls, coeffs: Mapping[str, int], sense: str, rhs: int) -> "LinearInequality":
        return cls(tuple(sorted(coeffs.items())), sense, rhs)

    def holds(self, point: Mapping[str, int]) -> bool:
        lhs = sum(c * point[v] for v, c in self.coeffs)
        return lhs <= self.rhs if self.sense == "<=" else lhs >= self.rhs

    @property
    def is_sign_constraint(self) -> bool:
        """True for plain ``x >= 0``, which the nonnegative orthant already encodes."""
        return self.sense == ">=" and self.rhs == 0 and len(self.coeffs) == 1 and self.coeffs[0][1] == 1


@dataclass(frozen=True)
class LinearEquation:
    coeffs: tuple[tuple[str, int], ...]
    rhs: int

    def holds(self, point: Mapping[str, int]) -> bool:
        return sum(c * point[v] for v, c in self.coeffs) == self.rhs

    def __str__(self):
        return _format_linear(self.coeffs) + f"={self.rhs}"


@dataclass(frozen=True)
class EqualitySystem:
    """Equalities over nonnegative integer variables (original ones first, then slacks)."""

    variables: tuple[str, ...]
    equations: tuple[LinearEquation, ...]
    slack_of: tuple[tuple[str, int], ...] = field(default=())

    def holds(self, point: Mapping[str, int]) -> bool:
        return all(point[v] >= 0 for v in self.variables) and all(e.holds(point) for e in self.equations)


def _format_linear(coeffs) -> str:
    out = ""
    for v, c in coeffs:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = v if mag == 1 else f"{mag}{v}"
        out += term if not out and sign == "+" else sign + term
    return out or "0"


def slackify(system: Sequence[LinearInequality], slack_names: Sequence[str] | None = None) -> EqualitySystem:
    """Turn each inequality into an equality with one new nonnegative variable.

    All variables are taken to range over the nonnegative integers, so plain
    ``x >= 0`` rows are absorbed rather than slackified. ``a.x <= b`` becomes
    ``a.x + s = b`` and ``a.x >= b`` becomes ``a.x - s = b``. Variable order is
    the sorted original variables followed by slacks in input order; the map
    x -> (x, slacks(x)) is a bijection between the two solution sets.
    """
    originals = sorted({v for ineq in system for v, _ in ineq.coeffs})
    rows = [ineq for ineq in system if not ineq.is_sign_constraint]
    if slack_names is None:
        slack_names = [f"s{i}" for i in range(len(rows))]
    if len(slack_names) < len(rows):
        raise DomainError("not enough slack names")
    clash = set(slack_names[: len(rows)]) & set(originals)
    if clash:
        raise DomainError(f"slack names collide with variables: {sorted(clash)}")
    equations = []
    slack_of = []
    for i, (ineq, s) in enumerate(zip(rows, slack_names)):
        sign = 1 if ineq.sense == "<=" else -1
        equations.append(LinearEquation(ineq.coeffs + ((s, sign),), ineq.rhs))
        slack_of.append((s, i))
    return EqualitySystem(tuple(originals) + tuple(slack_names[: len(rows)]), tuple(equations), tuple(slack_of))


_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:\.\d+)?)?\s*\*?\s*([A-Za-z]\w*)?")


def parse_inequality(text: str, allow_decimals: bool = False) -> tuple[dict[str, Fraction], str, Fraction]:
    """Parse ``'5q+n<=20000'``; decimals are rejected unless ``allow_decimals``."""
    m = re.fullmatch(r"(.+?)(<=|>=)(.+)", text.replace(" ", ""))
    if not m:
        raise ParseError(f"expected 'lhs <= rhs' or 'lhs >= rhs': {text!r}")
    lhs, sense, rhs = m.groups()
    coeffs: dict[str, Fraction] = {}
    pos = 0
    while pos < len(lhs):
        tm = _TERM.match(lhs, pos)
        if not tm or tm.end() == pos or not tm.group(3):
            raise ParseError(f"cannot read a term in {lhs!r}", pos)
        sign, num, var = tm.groups()
        if num and "." in num and not allow_decimals:
            raise ParseError(f"non-integer coefficient {num!r}", pos)
        c = Fraction(num) if num else Fraction(1)
        coeffs[var] = coeffs.get(var, 0) + (-c if sign == "-" else c)
        pos = tm.end()
    try:
        value = Fraction(rhs)
    except ValueError:
        raise ParseError(f"right-hand side is not a number: {rhs!r}") from None
    if "." in rhs and not allow_decimals:
        raise ParseError(f"non-integer right-hand side {rhs!r}")
    return coeffs, sense, value


def integer_inequality(text: str) -> LinearInequality:
    """Parse an integer inequality; decimal input is a parse error."""
    coeffs, sense, rhs = parse_inequality(text)
    return LinearInequality.of({v: int(c) for v, c in coeffs.items()}, sense, int(rhs))


def scaled_inequality(text: str) -> tuple[LinearInequality, int]:
    """Clear decimal denominators (the dollar amounts) and return (inequality, factor)."""
    coeffs, sense, rhs = parse_inequality(text, allow_decimals=True)
    factor = lcm(*(c.denominator for c in coeffs.values()), rhs.denominator)
    return LinearInequality.of({v: int(c * factor) for v, c in coeffs.items()}, sense, int(rhs * factor)), factor


# -- Pick's theorem ----------------------------------------------------------
@dataclass(frozen=True)
class LatticePolygon:
    vertices: tuple[tuple[int, int], ...]

    def __post_init__(self):
        verts = tuple((int(x), int(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise DomainError("a polygon needs at least three vertices")
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise DomainError(f"consecutive vertices {i} and {(i + 1) % n} coincide")
        bad = self_intersection(verts)
        if bad is not None:
            raise DomainError(f"polygon is not simple: edges {bad[0]} and {bad[1]} intersect")
        if twice_area(verts) <= 0:
            raise DomainError("vertices must be counterclockwise with positive area")


def twice_area(verts: Sequence[tuple[int, int]]) -> int:
    n = len(verts)
    return sum(verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1] for i in range(n))


def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _segments_meet(a, b, c, d) -> bool:
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == 0 and _on_segment(a, b, c))
        or (o2 == 0 and _on_segment(a, b, d))
        or (o3 == 0 and _on_segment(c, d, a))
        or (o4 == 0 and _on_segment(c, d, b))
    )


def self_intersection(verts: Sequence[tuple[int, int]]) -> tuple[int, int] | None:
    """First pair of edges that touch illegally, or None for a simple polygon."""
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = verts[j], verts[(j + 1) % n]
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges share one endpoint; they must not fold back
                shared, p1, p2 = (b, a, d) if j == i + 1 else (a, b, c)
                if _orient(shared, p1, p2) == 0 and (_on_segment(shared, p1, p2) or _on_segment(shared, p2, p1)):
                    return i, j
                continue
            if _segments_meet(a, b, c, d):
                return i, j
    return None


@dataclass(frozen=True)
class PickCount:
    area: Fraction
    boundary: int
    interior: int
    total: int
    interior_enumerated: int | None = None


def boundary_points(verts: Sequence[tuple[int, int]]) -> int:
    n = len(verts)
    return sum(
        gcd(abs(verts[(i + 1) % n][0] - verts[i][0]), abs(verts[(i + 1) % n][1] - verts[i][1])) for i in range(n)
    )


def pick_count(poly: LatticePolygon, verify: bool = True) -> PickCount:
    """Area by shoelace, boundary by gcd sums, interior by Pick's identity.

    When the bounding box holds at most 10^7 lattice points the interior count
    is also found by enumeration and must agree.
    """
    verts = poly.vertices
    area = Fraction(twice_area(verts), 2)
    b = boundary_points(verts)
    interior = area - Fraction(b, 2) + 1
    assert interior.denominator == 1
    interior = int(interior)
    enumerated = None
    if verify:
        xs = [x for x, _ in verts]
        ys = [y for _, y in verts]
        box = (max(xs) - min(xs) + 1) * (max(ys) - min(ys) + 1)
        if box <= PICK_ENUMERATION_LIMIT:
            enumerated = count_interior_points(verts)
            if enumerated != interior:
                raise ConsistencyError(f"Pick interior {interior} != enumerated {enumerated}")
    return PickCount(area, b, interior, interior + b, enumerated)


def classify_points(verts: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """(interior, boundary) lattice point counts by exhaustive exact testing."""
    xs = [x for x, _ in verts]
    ys = [y for _, y in verts]
    gx, gy = np.meshgrid(
        np.arange(min(xs), max(xs) + 1, dtype=np.int64), np.arange(min(ys), max(ys) + 1, dtype=np.int64), indexing="ij"
    )
    px, py = gx.ravel(), gy.ravel()
    on_edge = np.zeros(px.shape, dtype=bool)
    crossings = np.zeros(px.shape, dtype=np.int64)
    n = len(verts)
    for i in range(n):
        (x1, y1), (x2, y2) = verts[i], verts[(i + 1) % n]
        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        within = (np.minimum(x1, x2) <= px) & (px <= np.maximum(x1, x2)) & (np.minimum(y1, y2) <= py) & (py <= np.maximum(y1, y2))
        on_edge |= (cross == 0) & within
        # half-open rule on y; crossing to the right of the point
        upward = (y1 <= py) & (py < y2) & (cross > 0)
        downward = (y2 <= py) & (py < y1) & (cross < 0)
        crossings += upward.astype(np.int64) - downward.astype(np.int64)
    inside = (crossings != 0) & ~on_edge
    return int(inside.sum()), int(on_edge.sum())


def count_interior_points(verts: Sequence[tuple[int, int]]) -> int:
    return classify_points(verts)[0]


def parse_polygon_csv(text: str) -> LatticePolygon:
    """One ``x,y`` integer pair per line; blank lines and ``#`` comments skipped."""
    verts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y' on line {lineno}: {line!r}")
        try:
            verts.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"non-integer coordinate on line {lineno}: {line!r}") from None
    return LatticePolygon(tuple(verts))


def read_polygon_csv(path) -> LatticePolygon:
    return parse_polygon_csv(Path(path).read_text())


def jackpot_report(k: int, mode: str = "both", workers: int = 1) -> dict:
    """JSON-ready counts; big integers are decimal strings."""
    inst = JackpotInstance(k)
    out: dict = {"k": k}
    if mode in ("formula", "both"):
        out["formula"] = str(count_jackpots(inst, "formula"))
    if mode in ("brute", "both"):
        out["brute"] = str(count_jackpots(inst, "brute", workers))
    if mode == "both":
        out["match"] = out["formula"] == out["brute"]
        if not out["match"]:
            raise ConsistencyError(f"closed form {out['formula']} disagrees with enumeration {out['brute']} at k={k}")
    return out
