from netident.cli import main
from netident.disjoint_paths import Path, PathSet, enumerate_path_sets, is_constrained
from netident.graph_core import NodeSet
from netident.identify import Status, decide_graph, decide_node
from netident.oracle import build_counterexample, measured_transfer, rank_test, sample_admissible, transfer_equal


def test_open_diamond_unique_witness(open_diamond, fixtures_dir, capsys):
    v = decide_node(open_diamond, 1, NodeSet((4, 5)))
    assert v.status is Status.IDENTIFIABLE
    assert v.certificate.path_set.edge_set == {(2, 4), (3, 5)}
    assert v.certificate.enumeration_count == 1
    code = main(["check-node", str(fixtures_dir / "open_diamond.json"), "--node", "1", "--measured", "4,5"])
    assert code == 0
    assert "enumeration count: 1" in capsys.readouterr().out


def test_crossed_diamond_two_path_sets_and_adversarial_counterexample(crossed_diamond, adversarial):
    c = NodeSet((4, 5))
    assert decide_node(crossed_diamond, 1, c).status is Status.INCONCLUSIVE
    sets = enumerate_path_sets(crossed_diamond, NodeSet((2, 3)), c, 2, exact=True)
    assert len(sets) == 2

    nm = adversarial.network()
    assert rank_test(nm, 1, c).rank == 1
    ce = build_counterexample(nm, 1, c)
    assert transfer_equal(nm, ce.g_bar, c)
    assert measured_transfer(nm, c) == measured_transfer(ce.g_bar, c)
    assert ce.column_differs()


def test_layered_witness_and_unconstrained_pairing(layered):
    c = NodeSet((6, 7, 8))
    verdict = decide_graph(layered, c)
    assert verdict.overall is Status.IDENTIFIABLE
    assert verdict.verdict(1).certificate.path_set.edge_set == {(2, 4), (4, 6), (3, 5), (5, 7)}

    pairing = enumerate_path_sets(layered, NodeSet((2, 3)), NodeSet((7, 8)), 2, exact=True)
    assert len(pairing) == 2
    assert not is_constrained(layered, PathSet.of([Path((2, 4, 7)), Path((3, 5, 8))]))


def test_crossed_diamond_measured_transfer_structure(crossed_diamond):
    c = NodeSet((4, 5))
    for seed in (3, 17):
        nm = sample_admissible(crossed_diamond, seed)
        ct = measured_transfer(nm, c)
        g = nm.weight
        assert ct[0, 0] == g(2, 4) * g(1, 2) + g(3, 4) * g(1, 3)
        assert ct[1, 0] == g(2, 5) * g(1, 2) + g(3, 5) * g(1, 3)
        assert ct[0, 1] == g(2, 4) and ct[0, 2] == g(3, 4)
        assert ct[1, 1] == g(2, 5) and ct[1, 2] == g(3, 5)
