"""Embedded resolution of plane-curve germs by point blow-ups, and the E8 form.

The engine tracks a list of *sites*: special points of the current surface,
each with a local chart (x, y), the strict transform S of the original curve
in that chart, and the exceptional cycles lying along the axes x = 0 and
y = 0. Blowing up the i-th point introduces coordinates [p_i : q_i]:

    chart A (p_i = 1):  y = x q_i,  coordinates (x, q_i), new cycle is x = 0
    chart B (q_i = 1):  x = p_i y,  coordinates (p_i, y), new cycle is y = 0

Points of the new cycle where S crosses it at q_i != 0 become translated
sites of chart A. The divisor graph is read off the sites: two curves meet
exactly where they share a site.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from math import lcm

from .errors import ConsistencyError, DomainError, ParseError, ResourceError
from .exact import bareiss_determinant, congruence_diagonal
from .polynomial import SparsePoly

STRICT = 0  # node id of the (non-compact) strict transform
MAX_BLOWUPS = 64


# -- parsing ----------------------------------------------------------------
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>[A-Za-z](?:_(?:\d+|\{\d+\}))?)|(?P<op>[-+*^(){}]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "var":
            value = value.replace("{", "").replace("}", "")
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        names = sorted({v for k, v, _ in self.tokens if k == "var"})
        if len(names) > 2:
            raise ParseError(f"a germ has at most two variables, found {len(names)}: {', '.join(names)}")
        self.names = tuple(names)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> SparsePoly:
        if self.peek()[0] == "end":
            raise ParseError("empty germ", 0)
        out = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return out

    def expr(self) -> SparsePoly:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def _starts_factor(self) -> bool:
        kind, value, _ = self.peek()
        return kind in ("num", "var") or value == "("

    def term(self) -> SparsePoly:
        out = self.unary()
        while True:
            if self.peek()[1] == "*":
                self.take()
                out = out * self.unary()
            elif self._starts_factor():
                out = out * self.power()
            else:
                return out

    def unary(self) -> SparsePoly:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> SparsePoly:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            if self.peek()[1] == "{":
                self.take()
                kind, value, pos = self.take()
                self.take("}")
            else:
                kind, value, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", pos)
            base = base ** int(value)
        return base

    def atom(self) -> SparsePoly:
        kind, value, pos = self.take()
        if kind == "num":
            return SparsePoly.constant(self.names, int(value))
        if kind == "var":
            return SparsePoly.variable(self.names, value)
        if value == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


@dataclass(frozen=True)
class Germ:
    """poly = x^a y^b * strict, with the monomial content kept separately."""

    names: tuple[str, ...]
    poly: SparsePoly

    def __post_init__(self):
        if self.poly.is_zero():
            raise DomainError("the zero polynomial is not a curve germ")

    @property
    def content(self) -> tuple[int, ...]:
        return self.poly.monomial_content()

    @property
    def strict(self) -> SparsePoly:
        return self.poly.shift_down(self.content)

    def __str__(self):
        return format_poly(self.poly)


def parse_germ(text: str) -> Germ:
    """Polynomial in at most two variables: integers, ``^`` powers, ``+ - *``,
    parentheses and implicit multiplication; subscripted names such as ``p_1``
    or ``p_{1}`` are single variables."""
    parser = _Parser(text)
    poly = parser.parse()
    names = parser.names
    if poly.is_zero():
        raise ParseError("the germ is identically zero", 0)
    return Germ(names, poly)


def vanishing_order(g: Germ | SparsePoly) -> int:
    poly = g.poly if isinstance(g, Germ) else g
    return poly.order()


# -- printing ------------------------------------------------------------------
def _power(name: str, k: int) -> str:
    if k == 1:
        return name
    return f"{name}^{{{k}}}" if k >= 10 else f"{name}^{k}"


def format_poly(p: SparsePoly) -> str:
    """Constant term first, then the rest lex-descending; implicit products."""
    if p.is_zero():
        return "0"
    zero = (0,) * len(p.names)
    order = sorted(p.terms, reverse=True)
    if zero in p.terms:
        order.remove(zero)
        order.insert(0, zero)
    out = ""
    for exp in order:
        c = p.terms[exp]
        body = "".join(_power(n, k) for n, k in zip(p.names, exp) if k)
        mag = abs(c)
        coef = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
        if body:
            body = body if mag == 1 else coef + body
        else:
            body = coef
        if c < 0:
            out += "-" + body
        else:
            out += ("+" if out else "") + body
    return out


# -- graph ---------------------------------------------------------------------
@dataclass(frozen=True)
class Cycle:
    id: int
    multiplicity: int | None
    self_intersection: int | None
    compact: bool = True

    @property
    def label(self) -> str:
        return "S" if self.id == STRICT else f"E{self.id}"


@dataclass(frozen=True)
class DivisorGraph:
    cycles: tuple[Cycle, ...]
    edges: tuple[tuple[int, int, int], ...]  # (id_a, id_b, count) with id_a < id_b

    def cycle(self, cid: int) -> Cycle:
        for c in self.cycles:
            if c.id == cid:
                return c
        raise KeyError(cid)

    @property
    def compact_cycles(self) -> tuple[Cycle, ...]:
        return tuple(c for c in self.cycles if c.compact)

    def neighbors(self, cid: int) -> list[int]:
        out = []
        for a, b, _ in self.edges:
            if a == cid:
                out.append(b)
            elif b == cid:
                out.append(a)
        return sorted(out)

    def edge_count(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        return sum(n for x, y, n in self.edges if (x, y) == (a, b))


@dataclass(frozen=True)
class Site:
    names: tuple[str, str]
    strict: SparsePoly
    u_cycle: int | None  # cycle along x = 0
    v_cycle: int | None  # cycle along y = 0

    def strict_through(self) -> bool:
        return self.strict.constant_term() == 0

    def components(self) -> list[int]:
        comps = [c for c in (self.u_cycle, self.v_cycle) if c is not None]
        if self.strict_through():
            comps.append(STRICT)
        return comps


@dataclass(frozen=True)
class Target:
    site: int
    reason: str
    components: tuple[int, ...]


REASONS = ("singular", "tangency", "triple point", "odd-odd")


@dataclass(frozen=True)
class ResolutionState:
    sites: tuple[Site, ...]
    cycles: tuple[Cycle, ...]  # exceptional cycles only, in creation order
    step: int = 0

    def mult(self, cid: int) -> int:
        return 1 if cid == STRICT else self.cycles[cid - 1].multiplicity

    def chart_string(self, site: Site) -> str:
        x, y = site.names
        mono = ""
        if site.u_cycle is not None:
            mono += _power(x, self.mult(site.u_cycle))
        if site.v_cycle is not None:
            mono += _power(y, self.mult(site.v_cycle))
        s = site.strict
        if s == 1:
            return mono or "1"
        body = format_poly(s)
        body = f"({body})" if len(s.terms) > 1 and mono else body
        # the monomial leads when it carries the first coordinate
        return mono + body if site.u_cycle is not None else body + mono

    def graph(self) -> DivisorGraph:
        counts: dict[tuple[int, int], int] = {}
        for site in self.sites:
            comps = site.components()
            for i, a in enumerate(comps):
                for b in comps[i + 1 :]:
                    key = (min(a, b), max(a, b))
                    counts[key] = counts.get(key, 0) + 1
        nodes = (Cycle(STRICT, 1, None, compact=False),) + self.cycles
        return DivisorGraph(nodes, tuple((a, b, n) for (a, b), n in sorted(counts.items())))


def initial_state(germ: Germ) -> ResolutionState:
    names = germ.names
    poly = germ.poly
    if len(names) < 2:
        extra = next(n for n in ("y", "z", "x", "w") if n not in names)
        names = tuple(sorted(names + (extra,)))
        poly = SparsePoly(names, {_pad(e, germ.names, names): c for e, c in poly.terms.items()})
    return ResolutionState((Site(names, poly, None, None),), ())


def _pad(exp, old_names, new_names):
    return tuple(exp[old_names.index(n)] if n in old_names else 0 for n in new_names)


def _axis_order(s: SparsePoly, axis: int) -> int:
    """Order of S restricted to the axis x = 0 (axis 0) or y = 0 (axis 1)."""
    restricted = s.restrict({s.names[axis]: 0})
    return restricted.order() if not restricted.is_zero() else 10**9


def site_reasons(state: ResolutionState, site: Site) -> list[str]:
    reasons = []
    comps = site.components()
    through = site.strict_through()
    if through and site.strict.order() >= 2:
        reasons.append("singular")
    if through:
        for axis, cid in ((0, site.u_cycle), (1, site.v_cycle)):
            if cid is not None and _axis_order(site.strict, axis) >= 2:
                reasons.append("tangency")
                break
    if len(comps) >= 3:
        reasons.append("triple point")
    odd = [c for c in comps if state.mult(c) % 2 == 1]
    if len(odd) >= 2:
        reasons.append("odd-odd")
    return reasons


def detect_targets(state: ResolutionState) -> list[Target]:
    """One target per site that needs blowing up, tagged with its main reason."""
    out = []
    for i, site in enumerate(state.sites):
        reasons = site_reasons(state, site)
        if reasons:
            out.append(Target(i, reasons[0], tuple(site.components())))
    return out


def _rational_roots(p: SparsePoly, var: str) -> list[tuple[Fraction, int]]:
    """Nonzero rational roots with multiplicity of a univariate polynomial.

    Raises DomainError if some roots are irrational or complex.
    """
    i = p.names.index(var)
    coeffs: dict[int, Fraction] = {e[i]: c for e, c in p.terms.items()}
    low = min(coeffs)
    coeffs = {d - low: c for d, c in coeffs.items()}
    deg = max(coeffs)
    scale = lcm(*(c.denominator for c in coeffs.values()))
    ints = [int(coeffs.get(d, 0) * scale) for d in range(deg + 1)]
    roots = []

    def divisors(n):
        n = abs(n)
        return [d for d in range(1, n + 1) if n % d == 0]

    while len(ints) > 1:
        found = None
        for num in divisors(ints[0]):
            for den in divisors(ints[-1]):
                for r in (Fraction(num, den), Fraction(-num, den)):
                    if sum(c * r**d for d, c in enumerate(ints)) == 0:
                        found = r
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise DomainError("the strict transform meets an exceptional cycle at irrational or complex points; unsupported")
        # synthetic division by (t - r), highest degree first
        hi = ints[::-1]
        quot = [hi[0]]
        for c in hi[1:-1]:
            quot.append(c + quot[-1] * found)
        # rescale to integers so the rational root test stays applicable
        den = lcm(*(Fraction(c).denominator for c in quot))
        ints = [int(c * den) for c in quot[::-1]]
        for k, (r, m) in enumerate(roots):
            if r == found:
                roots[k] = (r, m + 1)
                break
        else:
            roots.append((found, 1))
    return roots


def blow_up(state: ResolutionState, site_index: int) -> tuple[ResolutionState, list[Site]]:
    """Blow up the origin of one site; returns the new state and the new sites."""
    site = state.sites[site_index]
    comps = site.components()
    if not comps:
        warnings.warn("blow-up at a point where the germ is a unit; nothing to do", stacklevel=2)
        return state, []
    step = state.step + 1
    x, y = site.names
    m_strict = site.strict.order() if site.strict_through() else 0
    new_id = len(state.cycles) + 1
    mult = m_strict + sum(state.mult(c) for c in (site.u_cycle, site.v_cycle) if c is not None)
    cycles = list(state.cycles)
    for cid in (site.u_cycle, site.v_cycle):
        if cid is not None:
            c = cycles[cid - 1]
            cycles[cid - 1] = replace(c, self_intersection=c.self_intersection - 1)
    cycles.append(Cycle(new_id, mult, -1))
    interim = ResolutionState(state.sites, tuple(cycles), step)

    p_name, q_name = f"p_{step}", f"q_{step}"
    s = site.strict
    # chart A: y = x q
    names_a = (x, q_name)
    xa, qa = SparsePoly.variable(names_a, x), SparsePoly.variable(names_a, q_name)
    s_a = s.substitute({x: xa, y: xa * qa}, names_a)
    s_a = s_a.shift_down((m_strict, 0))
    # chart B: x = p y
    names_b = (p_name, y)
    pb, yb = SparsePoly.variable(names_b, p_name), SparsePoly.variable(names_b, y)
    s_b = s.substitute({x: pb * yb, y: yb}, names_b)
    s_b = s_b.shift_down((0, m_strict))

    candidates = [Site(names_a, s_a, new_id, site.v_cycle), Site(names_b, s_b, site.u_cycle, new_id)]
    on_cycle = s_a.restrict({x: 0})
    if m_strict:
        shifted = q_name + "'"
        names_t = (x, shifted)
        xt, tt = SparsePoly.variable(names_t, x), SparsePoly.variable(names_t, shifted)
        for r, _ in _rational_roots(on_cycle, q_name):
            s_t = s_a.substitute({x: xt, q_name: tt + r}, names_t)
            candidates.append(Site(names_t, s_t, new_id, None))

    def keep(c: Site) -> bool:
        return len(c.components()) >= 2 or (c.strict_through() and c.strict.order() >= 2)

    new_sites = [c for c in candidates if keep(c)]
    sites = state.sites[:site_index] + tuple(new_sites) + state.sites[site_index + 1 :]
    return ResolutionState(sites, interim.cycles, step), new_sites


@dataclass(frozen=True)
class TraceStep:
    step: int
    reason: str
    multiplicity: int
    charts: tuple[str, ...]

    def to_json(self) -> dict:
        return {"step": self.step, "reason": self.reason, "multiplicity": self.multiplicity, "charts": list(self.charts)}


@dataclass(frozen=True)
class ResolutionRun:
    germ: Germ
    state: ResolutionState
    trace: tuple[TraceStep, ...]

    @property
    def graph(self) -> DivisorGraph:
        return self.state.graph()


def resolve(germ: Germ | str, max_blowups: int = MAX_BLOWUPS) -> ResolutionRun:
    """Blow up until no site is singular, tangent, triple or odd-odd.

    The highest-priority reason is handled first (in the order of REASONS),
    one point at a time.
    """
    if isinstance(germ, str):
        germ = parse_germ(germ)
    if germ.poly.constant_term() != 0:
        raise DomainError("the germ does not pass through the origin")
    state = initial_state(germ)
    trace = [TraceStep(0, "input", 0, (state.chart_string(state.sites[0]),))]
    while True:
        targets = detect_targets(state)
        if not targets:
            break
        if state.step >= max_blowups:
            raise ResourceError(f"resolution did not finish within {max_blowups} blow-ups")
        target = min(targets, key=lambda t: (REASONS.index(t.reason), t.site))
        state, new_sites = blow_up(state, target.site)
        trace.append(
            TraceStep(state.step, target.reason, state.cycles[-1].multiplicity, tuple(state.chart_string(s) for s in new_sites))
        )
    return ResolutionRun(germ, state, tuple(trace))


def resolve_235() -> ResolutionRun:
    """Resolve y^3 + z^5 and check the invariants the cover argument needs."""
    run = resolve("y^3+z^5")
    cycles = run.state.cycles
    if len(cycles) != 8:
        raise ConsistencyError(f"expected 8 exceptional cycles, got {len(cycles)}")
    mults = sorted(c.multiplicity for c in cycles)
    if mults != [3, 5, 9, 12, 15, 16, 20, 24]:
        raise ConsistencyError(f"unexpected multiplicities {mults}")
    for c in cycles:
        want = -4 if c.multiplicity % 2 else -1
        if c.self_intersection != want:
            raise ConsistencyError(f"cycle E{c.id} (multiplicity {c.multiplicity}) has self-intersection {c.self_intersection}, expected {want}")
    return run


# -- double cover and intersection form ------------------------------------------
def double_cover_transform(graph: DivisorGraph) -> DivisorGraph:
    """Preimages in the branched double cover: odd -4 cycles and even -1 cycles
    both become -2 cycles; the graph shape is kept, multiplicities dropped."""
    out = []
    for c in graph.compact_cycles:
        if c.multiplicity is None:
            raise DomainError(f"cycle {c.label} has no multiplicity")
        want = -4 if c.multiplicity % 2 else -1
        if c.self_intersection != want:
            kind = "odd" if c.multiplicity % 2 else "even"
            raise DomainError(
                f"cover rule not applicable: {kind} cycle {c.label} has self-intersection {c.self_intersection}, needs {want}"
            )
        out.append(Cycle(c.id, None, -2))
    ids = {c.id for c in out}
    edges = tuple(e for e in graph.edges if e[0] in ids and e[1] in ids)
    return DivisorGraph(tuple(out), edges)


@dataclass(frozen=True)
class IntersectionMatrix:
    matrix: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.order)

    def determinant(self) -> int:
        return bareiss_determinant(self.matrix) if self.matrix else 1

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]


def canonical_order(graph: DivisorGraph) -> list[int]:
    """Long chain then branch vertex for a tree with one trivalent node;
    creation order otherwise.

    For the E8 tree the chain is the longest arm read toward the node, the
    node, the middle arm read away from it, and finally the short arm.
    """
    ids = [c.id for c in graph.compact_cycles]
    idset = set(ids)
    adj = {i: [j for j in graph.neighbors(i) if j in idset] for i in ids}
    n_edges = sum(len(v) for v in adj.values()) // 2
    nodes = [i for i in ids if len(adj[i]) == 3]
    if len(nodes) != 1 or n_edges != len(ids) - 1 or any(len(v) > 3 for v in adj.values()):
        return ids
    node = nodes[0]
    arms = []
    for start in adj[node]:
        arm, prev, cur = [], node, start
        while True:
            arm.append(cur)
            nxt = [j for j in adj[cur] if j != prev]
            if len(nxt) != 1:
                break
            prev, cur = cur, nxt[0]
        arms.append(arm)
    arms.sort(key=lambda a: (-len(a), a))
    long_arm, mid_arm, short_arm = arms
    order = long_arm[::-1] + [node] + mid_arm + short_arm[::-1]
    if len(set(order)) != len(ids):
        return ids
    return order


def intersection_matrix(graph: DivisorGraph, ordering="canonical") -> IntersectionMatrix:
    if ordering == "canonical":
        order = canonical_order(graph)
    elif ordering == "creation":
        order = [c.id for c in graph.compact_cycles]
    else:
        order = list(ordering)
    for cid in order:
        try:
            c = graph.cycle(cid)
        except KeyError:
            raise DomainError(f"unknown cycle id {cid}") from None
        if not c.compact:
            raise DomainError(f"{c.label} is not compact and has no self-intersection")
    rows = []
    for a in order:
        rows.append(
            tuple(graph.cycle(a).self_intersection if a == b else graph.edge_count(a, b) for b in order)
        )
    return IntersectionMatrix(tuple(rows), tuple(order))


def congruence_pivots(m: IntersectionMatrix | list) -> list[Fraction]:
    matrix = m.matrix if isinstance(m, IntersectionMatrix) else m
    try:
        return congruence_diagonal(matrix)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def signature(m: IntersectionMatrix | list) -> int:
    """(#positive) - (#negative) pivots of an exact congruence diagonalization."""
    diag = congruence_pivots(m)
    return sum(1 for d in diag if d > 0) - sum(1 for d in diag if d < 0)


def is_negative_definite(m: IntersectionMatrix | list) -> bool:
    return all(d < 0 for d in congruence_pivots(m))


@dataclass(frozen=True)
class RochlinCheck:
    divisible_by_16: bool
    contradiction: bool


def rochlin_check(sig: int) -> RochlinCheck:
    """A closed spin 4-manifold has signature divisible by 16."""
    ok = sig % 16 == 0
    return RochlinCheck(ok, not ok)


E8_EDGES = ((1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 8))


def resolution_report(germ: str = "y^3+z^5", ordering="canonical", trace: bool = False) -> dict:
    run = resolve(germ)
    graph = run.graph
    base = intersection_matrix(graph, ordering)
    pos = {cid: i + 1 for i, cid in enumerate(base.order)}
    out = {
        "cycles": [
            {"id": graph.cycle(c).label, "mult": graph.cycle(c).multiplicity, "self": graph.cycle(c).self_intersection}
            for c in base.order
        ],
        "edges": sorted([min(pos[a], pos[b]), max(pos[a], pos[b])] for a, b, _ in graph.edges if a in pos and b in pos),
        "strict_meets": sorted(graph.cycle(b).label for a, b, _ in graph.edges if a == STRICT),
    }
    try:
        cover = double_cover_transform(graph)
    except DomainError as exc:
        out["cover"] = None
        out["cover_error"] = str(exc)
        matrix = base
    else:
        matrix = intersection_matrix(cover, list(base.order))
        out["cover"] = [{"id": graph.cycle(c).label, "self": cover.cycle(c).self_intersection} for c in base.order]
    sig = signature(matrix)
    out["matrix"] = matrix.to_lists()
    out["determinant"] = matrix.determinant()
    out["negative_definite"] = is_negative_definite(matrix)
    out["signature"] = sig
    # the spin argument only applies to the double cover
    rc = rochlin_check(sig) if out["cover"] is not None else None
    out["divisible_by_16"] = rc.divisible_by_16 if rc else None
    out["rochlin_contradiction"] = rc.contradiction if rc else None
    if trace:
        out["trace"] = [t.to_json() for t in run.trace]
    return out
