import pytest

from netident.errors import GraphSyntaxError, InvariantError, LiteralSyntaxError, PreconditionError
from netident.graph_core import DiGraph, NodeSet
from netident.identify import decide_node
from netident.oracle import (
    EXACT,
    PROBABILISTIC,
    SampleMode,
    all_full,
    build_counterexample,
    consistency_violations,
    factorization_check,
    graph_rank_test,
    jacobi_check,
    load_fixture,
    measured_transfer,
    parse_fixture,
    rank_test,
    sample_admissible,
    sample_evidence,
    transfer_equal,
    validate_admissible,
)
from netident.ratfun import ONE, RatMatrix, parse_rational

INV_Z = parse_rational("1/z")


def _chain(weight):
    return validate_admissible(RatMatrix.from_rows([[0, 0], [weight, 0]]), DiGraph.build(2, [(1, 2)]))


# --- admissibility ---


def test_strictly_proper_sample_is_admissible():
    adm = _chain("1/(z-2)").admissibility
    assert adm.admissible
    assert adm.p3_method == EXACT
    assert adm.diagnostics == ()


def test_biproper_entry_with_nonzero_minors():
    assert _chain("z/(z+1)").admissibility.admissible


def test_improper_entry_fails_p1():
    adm = _chain("z").admissibility
    assert not adm.p1 and not adm.p3
    assert any(d.startswith("P1") for d in adm.diagnostics)


def test_edge_mismatch_fails_p2():
    graph = DiGraph.build(2, [(1, 2)])
    g = RatMatrix.from_rows([[0, "1/z"], [0, 0]])
    adm = validate_admissible(g, graph).admissibility
    assert not adm.p2
    assert adm.p1 and adm.p3
    assert sum(d.startswith("P2") for d in adm.diagnostics) == 2


def test_singular_limit_fails_p3():
    graph = DiGraph.build(2, [(1, 2), (2, 1)])
    g = RatMatrix.from_rows([[0, "z/(z+1)"], ["z/(z+1)", 0]])
    adm = validate_admissible(g, graph).admissibility
    assert adm.p1 and adm.p2 and not adm.p3
    assert "P3: principal minor on [1, 2] of lim (I-G) is zero" in adm.diagnostics
    sampled = validate_admissible(g, graph, max_n=1).admissibility
    assert sampled.p3_method == PROBABILISTIC


def test_shape_mismatch():
    with pytest.raises(InvariantError):
        validate_admissible(RatMatrix.zeros(3, 3), DiGraph.build(2, [(1, 2)]))


# --- sampling ---


def test_sampling_is_deterministic(crossed_diamond):
    a = sample_admissible(crossed_diamond, 42)
    assert a.g == sample_admissible(crossed_diamond, 42).g
    assert a.g != sample_admissible(crossed_diamond, 43).g
    assert set(a.g.nonzero_positions()) == {(j - 1, i - 1) for i, j in crossed_diamond.edges}
    for i, j in crossed_diamond.edges:
        w = a.weight(i, j)
        assert w.relative_degree == -1
        assert len(w.denominator_coeffs()) == 2


def test_adversarial_assignments_keep_other_draws(crossed_diamond, adversarial):
    nm = adversarial.network()
    generic = sample_admissible(crossed_diamond, adversarial.seed)
    assert nm.weight(2, 4) == INV_Z
    assert nm.weight(3, 5) == INV_Z
    assert nm.weight(1, 2) == generic.weight(1, 2)
    assert nm.weight(1, 3) == generic.weight(1, 3)


def test_sampling_rejects_bad_assignments(crossed_diamond):
    with pytest.raises(InvariantError):
        sample_admissible(crossed_diamond, 0, SampleMode.GENERIC, {(2, 4): INV_Z})
    with pytest.raises(InvariantError):
        sample_admissible(crossed_diamond, 0, SampleMode.ADVERSARIAL, {(1, 4): INV_Z})
    with pytest.raises(InvariantError):
        sample_admissible(crossed_diamond, 0, "adversarial", {(2, 4): parse_rational("0")})
    with pytest.raises(InvariantError):
        sample_admissible(crossed_diamond, 0, "adversarial", {(2, 4): parse_rational("z")})


# --- fixtures ---


def test_load_fixtures(adversarial, fixtures_dir):
    assert adversarial.mode is SampleMode.ADVERSARIAL
    assert adversarial.assignments[(2, 4)] == INV_Z
    generic = load_fixture(fixtures_dir / "open_diamond_generic.json")
    assert generic.mode is SampleMode.GENERIC
    assert generic.seed == 7
    assert generic.network().g == sample_admissible(generic.graph, 7).g


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        '{"graph": {"n": 0}}',
        '{"graph": {"n": 2, "edges": [[1, 2]]}, "assignments": {"1-2": "1/z"}, "mode": "adversarial"}',
        '{"graph": {"n": 2, "edges": [[1, 2]]}, "mode": "adversarial"}',
        '{"graph": {"n": 2, "edges": [[1, 2]]}, "assignments": {"1->2": "1/z"}}',
        '{"graph": {"n": 2, "edges": [[1, 2]]}, "mode": "sideways"}',
    ],
)
def test_fixture_errors(text):
    with pytest.raises(GraphSyntaxError):
        parse_fixture(text)


def test_fixture_bad_literal():
    text = '{"graph": {"n": 2, "edges": [[1, 2]]}, "assignments": {"1->2": "1/x"}, "mode": "adversarial"}'
    with pytest.raises(LiteralSyntaxError):
        parse_fixture(text)


# --- rank criterion ---


def test_measured_transfer_structure(adversarial):
    nm = adversarial.network()
    ct = measured_transfer(nm, NodeSet((4, 5)))
    assert ct.shape == (2, 5)
    assert ct[0, 3] == ONE and ct[1, 4] == ONE
    assert ct[0, 4].is_zero
    assert ct[0, 1] == INV_Z
    g21, g31 = nm.weight(1, 2), nm.weight(1, 3)
    assert ct[0, 0] == INV_Z * g21 + INV_Z * g31


def test_rank_adversarial_is_deficient(adversarial):
    nm = adversarial.network()
    t = rank_test(nm, 1, NodeSet((4, 5)))
    assert (t.rank, t.required, t.full) == (1, 2, False)
    assert rank_test(nm, 1, NodeSet((4, 5)), max_n=2).rank == 1


def test_rank_layered_identifiable_is_full(layered):
    nm = sample_admissible(layered, 0)
    tests = graph_rank_test(nm, NodeSet((6, 7, 8)))
    assert all_full(tests)
    probabilistic = rank_test(nm, 1, NodeSet((6, 7, 8)), max_n=2, seed=3)
    assert probabilistic.method == PROBABILISTIC
    assert probabilistic.rank == 2


def test_rank_edge_cases():
    graph = DiGraph.build(3, [(1, 2)])
    nm = sample_admissible(graph, 0)
    assert rank_test(nm, 1, NodeSet((3,))).rank == 0
    assert rank_test(nm, 1, NodeSet()).rank == 0
    assert rank_test(nm, 3, NodeSet()).full


# --- Jacobi ---


def test_jacobi_adversarial(adversarial):
    jc = jacobi_check(adversarial.network(), 1, NodeSet((4, 5)))
    assert (jc.lhs_nonzero, jc.rhs_nonzero) == (False, False)
    assert jc.agree and jc.identity_holds


def test_jacobi_single_edge():
    nm = sample_admissible(DiGraph.build(2, [(1, 2)]), 1)
    jc = jacobi_check(nm, 1, NodeSet((2,)))
    assert (jc.lhs_nonzero, jc.rhs_nonzero, jc.identity_holds) == (True, True, True)


def test_jacobi_on_generic_layered(layered):
    nm = sample_admissible(layered, 5)
    jc = jacobi_check(nm, 4, NodeSet((6, 7, 8)))
    assert jc.lhs_nonzero and jc.agree and jc.identity_holds


def test_jacobi_needs_square(adversarial):
    with pytest.raises(PreconditionError):
        jacobi_check(adversarial.network(), 1, NodeSet((4,)))


# --- counterexample ---


def test_counterexample_adversarial(adversarial):
    nm = adversarial.network()
    c = NodeSet((4, 5))
    ce = build_counterexample(nm, 1, c)
    w = ce.kernel_vector
    assert w[0] == -w[1] and not w[0].is_zero
    assert ce.delay == 1
    assert ce.alpha in (1, -1, 2, -2)
    assert ce.g_bar.admissibility.admissible
    assert ce.column_differs()
    assert transfer_equal(nm, ce.g_bar, c)
    # only column 1 changes
    diff = nm.g - ce.g_bar.g
    assert {col for _, col in diff.nonzero_positions()} == {0}


def test_counterexample_zero_rows():
    graph = DiGraph.build(3, [(1, 2)])
    nm = sample_admissible(graph, 4)
    ce = build_counterexample(nm, 1, NodeSet((3,)))
    assert ce.kernel_vector == (ONE,)
    assert ce.delay == 1
    assert ce.column_differs()


def test_counterexample_preconditions(open_diamond):
    nm = sample_admissible(open_diamond, 0)
    with pytest.raises(PreconditionError):
        build_counterexample(nm, 1, NodeSet((4, 5)))
    with pytest.raises(PreconditionError):
        build_counterexample(nm, 4, NodeSet((4, 5)))


def test_transfer_equal_detects_difference(crossed_diamond):
    a, b = sample_admissible(crossed_diamond, 0), sample_admissible(crossed_diamond, 1)
    assert not transfer_equal(a, b, NodeSet((4, 5)))
    assert transfer_equal(a, a, NodeSet((4, 5)))


# --- determinant factorization ---


def test_factorization_layered(layered):
    c = NodeSet((6, 7, 8))
    witness = decide_node(layered, 1, c).certificate
    fc = factorization_check(sample_admissible(layered, 0), 1, witness)
    assert fc.size == 6
    assert fc.families == 1
    assert fc.all_contain_witness
    assert fc.det_nonzero and fc.factorization_holds
    assert fc.ok


def test_factorization_overlap_witness(crossed_diamond):
    witness = decide_node(crossed_diamond, 2, NodeSet((4, 5))).certificate
    fc = factorization_check(sample_admissible(crossed_diamond, 2), 2, witness)
    assert fc.size == 3
    assert fc.ok


# --- sampled evidence and consistency ---


def test_sample_evidence_layered(layered):
    evidence = sample_evidence(layered, NodeSet((6, 7, 8)), 3, seed=10)
    assert [e.node for e in evidence] == list(range(1, 9))
    assert evidence[0].ranks == (2, 2, 2)
    assert evidence[0].full_count == 3
    assert evidence[5].required == 0 and evidence[5].full_count == 3


def test_consistency_layered(layered):
    run = consistency_violations(layered, NodeSet((6, 7, 8)), 2, seed=0)
    assert run.violations == ()
    assert run.checks > 2 * layered.n
    assert run.verdict.overall.value == "Identifiable"


def test_consistency_crossed_diamond_not_identifiable(crossed_diamond):
    run = consistency_violations(crossed_diamond, NodeSet((4,)), 3, seed=1)
    assert run.violations == ()
    assert run.samples == 3
