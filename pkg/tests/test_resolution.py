import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indexlab.errors import DomainError, ParseError, ResourceError
from indexlab.polynomial import SparsePoly
from indexlab.resolution import (
    E8_EDGES,
    REASONS,
    STRICT,
    Cycle,
    DivisorGraph,
    ResolutionState,
    Site,
    blow_up,
    canonical_order,
    detect_targets,
    double_cover_transform,
    format_poly,
    initial_state,
    intersection_matrix,
    is_negative_definite,
    parse_germ,
    resolution_report,
    resolve,
    resolve_235,
    rochlin_check,
    signature,
    vanishing_order,
)


# -- oracles --------------------------------------------------------------------------
def principal_defects(graph: DivisorGraph) -> list[int]:
    """Z . E_j for the total transform Z = sum m_i E_i + S; zero for a pulled-back function."""
    return [
        c.multiplicity * c.self_intersection
        + sum(graph.cycle(o).multiplicity * graph.edge_count(c.id, o) for o in graph.neighbors(c.id))
        for c in graph.compact_cycles
    ]


def e8_cartan_negated() -> np.ndarray:
    m = -2 * np.eye(8, dtype=int)
    for a, b in E8_EDGES:
        m[a - 1, b - 1] = m[b - 1, a - 1] = 1
    return m


def is_isomorphic_to_e8(graph: DivisorGraph) -> bool:
    """Brute force over arm assignments: a tree with one node of degree three and arms 1, 2, 4."""
    ids = [c.id for c in graph.compact_cycles]
    edges = {(a, b) for a, b, _ in graph.edges if a != STRICT and b != STRICT}
    target = {(a, b) for a, b in E8_EDGES}
    for perm in itertools.permutations(ids):
        relabel = {cid: i + 1 for i, cid in enumerate(perm)}
        if {tuple(sorted((relabel[a], relabel[b]))) for a, b in edges} == target:
            return True
    return False


def replay(germ: str, steps: int) -> ResolutionState:
    """Run the same greedy loop as resolve, stopping after `steps` blow-ups."""
    state = initial_state(parse_germ(germ))
    for _ in range(steps):
        targets = detect_targets(state)
        target = min(targets, key=lambda t: (REASONS.index(t.reason), t.site))
        state, _ = blow_up(state, target.site)
    return state


# -- parsing -------------------------------------------------------------------------------
@pytest.mark.parametrize(
    "text,names,terms",
    [
        ("y^3+z^5", ("y", "z"), {(3, 0): 1, (0, 5): 1}),
        ("2y z - z", ("y", "z"), {(1, 1): 2, (0, 1): -1}),
        ("-(y+z)^2", ("y", "z"), {(2, 0): -1, (1, 1): -2, (0, 2): -1}),
        ("p_1^{15}q_2", ("p_1", "q_2"), {(15, 1): 1}),
        ("x_{12}^2 y", ("x_12", "y"), {(2, 1): 1}),
        ("y*(y-z^2)", ("y", "z"), {(2, 0): 1, (1, 2): -1}),
    ],
)
def test_parse_examples(text, names, terms):
    g = parse_germ(text)
    assert g.names == names
    assert dict(g.poly.terms) == terms


@pytest.mark.parametrize(
    "text,position",
    [("y^^2", 2), ("y+", 2), ("y^-1", 2), ("(y+z", 4), ("y^2 $ z", 4), ("", 0)],
)
def test_parse_error_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse_germ(text)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


def test_too_many_variables():
    with pytest.raises(ParseError, match="at most two variables"):
        parse_germ("x*y*z")


def test_zero_germ():
    with pytest.raises(ParseError):
        parse_germ("y-y")


two_var_polys = st.dictionaries(
    st.tuples(st.integers(0, 12), st.integers(0, 12)),
    st.integers(-30, 30).filter(bool),
    min_size=1,
    max_size=5,
).map(lambda d: SparsePoly(("y", "z"), d))


@settings(max_examples=100)
@given(two_var_polys)
def test_format_parse_round_trip(p):
    text = format_poly(p)
    g = parse_germ(text)
    padded = {tuple(e[g.names.index(n)] if n in g.names else 0 for n in ("y", "z")): c for e, c in g.poly.terms.items()}
    assert padded == dict(p.terms)


def test_format_conventions():
    p = parse_germ("z^5+y^3+1").poly
    assert format_poly(p) == "1+y^3+z^5"
    assert format_poly(parse_germ("p_3^15").poly) == "p_3^{15}"


@pytest.mark.parametrize("text,order", [("y^3+z^5", 3), ("y^2+z^3", 2), ("yz+z^7", 2), ("y", 1), ("y^4z^3+z^9", 7)])
def test_vanishing_order(text, order):
    assert vanishing_order(parse_germ(text)) == order


# -- the E8 run ----------------------------------------------------------------------------------
EXPECTED_TRACE = [
    ("input", 0, ["y^3+z^5"]),
    ("singular", 3, ["(p_1^3+z^2)z^3"]),
    ("singular", 5, ["p_1^5q_2^3(p_1+q_2^2)"]),
    ("tangency", 9, ["p_1^9q_3^3(1+p_1q_3^2)", "p_3^5q_2^9(p_3+q_2)"]),
    ("triple point", 15, ["p_3^{15}q_4^9(1+q_4)", "p_4^5q_2^{15}(1+p_4)", "p_3^{15}q_4'"]),
    ("odd-odd", 12, ["p_1^{12}q_5^3(1+p_1^3q_5^2)", "p_5^9q_3^{12}(1+p_5q_3^3)"]),
    ("odd-odd", 24, ["p_3^{24}q_6^9(1+p_3q_6)", "p_6^{15}q_4^{24}(1+q_4)"]),
    ("odd-odd", 20, ["p_4^{20}q_7^{15}(1+p_4)", "p_7^5q_2^{20}(1+p_7q_2)"]),
    ("odd-odd", 16, ["p_3^{16}q_8", "p_8^{15}q_4'^{16}"]),
]


def test_full_trace():
    run = resolve("y^3+z^5")
    got = [(t.reason, t.multiplicity, list(t.charts)) for t in run.trace]
    assert got == EXPECTED_TRACE
    assert [t.step for t in run.trace] == list(range(9))


def test_new_multiplicity_is_sum_over_the_blown_up_point():
    # the new cycle's multiplicity is the strict order plus the multiplicities of the cycles through the point
    run = resolve("y^3+z^5")
    assert [t.multiplicity for t in run.trace[1:4]] == [3, 3 + 2, 5 + 3 + 1]


def test_targets_after_second_blowup():
    state = replay("y^3+z^5", 2)
    assert [t.reason for t in detect_targets(state)] == ["tangency"]


def test_targets_after_third_blowup():
    state = replay("y^3+z^5", 3)
    reasons = sorted(t.reason for t in detect_targets(state))
    assert reasons == ["odd-odd", "triple point"]
    odd = [t for t in detect_targets(state) if t.reason == "odd-odd"][0]
    assert sorted(state.mult(c) for c in odd.components) == [3, 9]


def test_targets_after_fourth_blowup():
    state = replay("y^3+z^5", 4)
    targets = detect_targets(state)
    assert [t.reason for t in targets] == ["odd-odd"] * 4
    pairs = sorted(tuple(sorted(state.mult(c) for c in t.components)) for t in targets)
    assert pairs == [(1, 15), (3, 9), (5, 15), (9, 15)]


def test_final_cycles():
    run = resolve_235()
    got = sorted((c.multiplicity, c.self_intersection) for c in run.state.cycles)
    assert got == [(3, -4), (5, -4), (9, -4), (12, -1), (15, -4), (16, -1), (20, -1), (24, -1)]
    assert not detect_targets(run.state)
    assert principal_defects(run.graph) == [0] * 8


def test_final_graph_is_e8_tree():
    graph = resolve_235().graph
    assert is_isomorphic_to_e8(graph)
    strict = [b for a, b, _ in graph.edges if a == STRICT]
    assert [graph.cycle(c).multiplicity for c in strict] == [16]


def test_canonical_order_and_matrix():
    graph = resolve_235().graph
    order = canonical_order(graph)
    assert [graph.cycle(c).multiplicity for c in order] == [3, 12, 9, 24, 15, 20, 5, 16]
    cover = double_cover_transform(graph)
    m = intersection_matrix(cover, order)
    assert np.array_equal(np.array(m.to_lists()), e8_cartan_negated())
    assert m.determinant() == 1 == round(np.linalg.det(e8_cartan_negated()))
    assert signature(m) == -8
    assert is_negative_definite(m)


def test_creation_order_has_same_invariants():
    cover = double_cover_transform(resolve_235().graph)
    m = intersection_matrix(cover, "creation")
    assert m.order == tuple(range(1, 9))
    assert m.determinant() == 1 and signature(m) == -8


def test_rochlin():
    assert rochlin_check(-8).contradiction
    assert not rochlin_check(-16).contradiction and rochlin_check(-16).divisible_by_16
    assert not rochlin_check(0).contradiction


def test_report_for_e8():
    rep = resolution_report("y^3+z^5", trace=True)
    assert [c["mult"] for c in rep["cycles"]] == [3, 12, 9, 24, 15, 20, 5, 16]
    assert rep["edges"] == [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [5, 8], [6, 7]]
    assert rep["strict_meets"] == ["E8"]
    assert all(c["self"] == -2 for c in rep["cover"])
    assert (rep["determinant"], rep["signature"], rep["negative_definite"]) == (1, -8, True)
    assert rep["divisible_by_16"] is False and rep["rochlin_contradiction"] is True
    assert rep["trace"][0]["charts"] == ["y^3+z^5"]


# -- other germs ---------------------------------------------------------------------------------
COPRIME = [(a, b) for a in range(2, 8) for b in range(a + 1, 10) if math.gcd(a, b) == 1]


@pytest.mark.parametrize("a,b", COPRIME, ids=[f"y^{a}+z^{b}" for a, b in COPRIME])
def test_resolution_invariants_on_brieskorn_curves(a, b):
    run = resolve(f"y^{a}+z^{b}")
    graph = run.graph
    n = len(graph.compact_cycles)
    exc_edges = [e for e in graph.edges if STRICT not in e[:2]]
    assert len(exc_edges) == n - 1  # a tree
    assert sum(cnt for x, y, cnt in graph.edges if x == STRICT) == 1  # one smooth branch
    assert principal_defects(graph) == [0] * n
    assert is_negative_definite(intersection_matrix(graph))
    assert not detect_targets(run.state)


@pytest.mark.parametrize("germ", ["y^2-z^2", "y^2-z^4", "y^3-yz^2", "(y-z)(2y+3z)(y+z)", "y(y-z^2)"])
def test_reducible_germs_with_rational_branches(germ):
    graph = resolve(germ).graph
    assert principal_defects(graph) == [0] * len(graph.compact_cycles)
    assert is_negative_definite(intersection_matrix(graph))


def test_node_has_two_branches_on_one_cycle():
    graph = resolve("y^2-z^2").graph
    assert [(c.multiplicity, c.self_intersection) for c in graph.compact_cycles] == [(2, -1)]
    assert graph.edge_count(STRICT, 1) == 2


@pytest.mark.parametrize("germ", ["y^2+z^2", "y^3-z^3", "y^2-2z^2"])
def test_non_rational_branch_points_unsupported(germ):
    with pytest.raises(DomainError, match="irrational or complex"):
        resolve(germ)


def test_cusp_smoke():
    run = resolve("y^2+z^3")
    graph = run.graph
    assert [(c.multiplicity, c.self_intersection) for c in graph.compact_cycles] == [(2, -3), (3, -2), (6, -1)]
    m = intersection_matrix(graph, "creation")
    assert m.to_lists() == [[-3, 0, 1], [0, -2, 1], [1, 1, -1]]
    assert is_negative_definite(m)
    with pytest.raises(DomainError, match="cover rule not applicable"):
        double_cover_transform(graph)
    rep = resolution_report("y^2+z^3")
    assert rep["cover"] is None and rep["rochlin_contradiction"] is None


def test_smooth_germ_needs_nothing():
    run = resolve("y")
    assert run.state.cycles == () and len(run.trace) == 1


def test_germ_must_pass_through_origin():
    with pytest.raises(DomainError, match="origin"):
        resolve("1+y")


def test_blowup_cap():
    with pytest.raises(ResourceError):
        resolve("y^3+z^5", max_blowups=3)


def test_unit_point_blowup_warns():
    names = ("y", "z")
    state = ResolutionState((Site(names, SparsePoly.constant(names, 1), None, None),), ())
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        new_state, new_sites = blow_up(state, 0)
    assert new_state is state and new_sites == []
    assert caught


# -- cover transform and matrices --------------------------------------------------------------------
def test_cover_on_single_even_cycle():
    graph = DivisorGraph((Cycle(STRICT, 1, None, False), Cycle(1, 2, -1)), ((0, 1, 2),))
    cover = double_cover_transform(graph)
    assert [(c.id, c.self_intersection) for c in cover.cycles] == [(1, -2)]
    assert cover.edges == ()


def test_cover_rejects_odd_minus_three():
    graph = DivisorGraph((Cycle(1, 3, -3),), ())
    with pytest.raises(DomainError, match="odd cycle E1"):
        double_cover_transform(graph)


def test_empty_and_disjoint_matrices():
    empty = intersection_matrix(DivisorGraph((), ()))
    assert empty.size == 0 and empty.determinant() == 1
    two = intersection_matrix(DivisorGraph((Cycle(1, None, -2), Cycle(2, None, -2)), ()))
    assert two.to_lists() == [[-2, 0], [0, -2]]


def test_matrix_rejects_noncompact_and_unknown():
    graph = DivisorGraph((Cycle(STRICT, 1, None, False), Cycle(1, 2, -1)), ((0, 1, 1),))
    with pytest.raises(DomainError):
        intersection_matrix(graph, [0, 1])
    with pytest.raises(DomainError):
        intersection_matrix(graph, [7])


@pytest.mark.parametrize(
    "matrix,expected",
    [([[1, 0], [0, 1]], 2), ([[1, 0], [0, -1]], 0), ([[0, 1], [1, 0]], 0), ([[0, 0], [0, 0]], 0), ([[-2]], -1)],
)
def test_signature_examples(matrix, expected):
    assert signature(matrix) == expected


def test_signature_rejects_nonsymmetric():
    with pytest.raises(DomainError):
        signature([[1, 2], [0, 1]])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_signature_matches_eigenvalues(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(-3, 4, size=(n, n))
    m = a + a.T
    if rng.random() < 0.3 and n > 1:
        m[-1] = m[0]
        m[:, -1] = m[:, 0]  # force a degenerate direction
    eig = np.linalg.eigvalsh(m.astype(float))
    expected = int((eig > 1e-9).sum() - (eig < -1e-9).sum())
    assert signature(m.tolist()) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_signature_is_a_congruence_invariant(seed):
    rng = np.random.default_rng(seed)
    m = e8_cartan_negated()
    # unimodular change of basis built from elementary row operations
    p = np.eye(8, dtype=np.int64)
    for _ in range(6):
        i, j = rng.choice(8, 2, replace=False)
        p[i] += int(rng.integers(-2, 3)) * p[j]
    assert round(abs(np.linalg.det(p))) == 1
    conj = p.T @ m @ p
    assert signature(conj.tolist()) == -8
    assert is_negative_definite(conj.tolist())
