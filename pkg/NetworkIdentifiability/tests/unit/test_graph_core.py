import pytest

from netident.errors import GraphSyntaxError, InvariantError
from netident.graph_core import (
    DiGraph,
    NodeSet,
    complement,
    in_neighbors,
    out_neighbors,
    parse_graph,
    serialize_graph,
    to_dot,
    to_networkx,
)


def test_parse_json_crossed_diamond():
    g = parse_graph('{"n": 5, "edges": [[1,2],[1,3],[2,4],[2,5],[3,4],[3,5]]}')
    assert g.n == 5
    assert g.edges == ((1, 2), (1, 3), (2, 4), (2, 5), (3, 4), (3, 5))
    assert g.measured == NodeSet()


def test_parse_single_vertex():
    g = parse_graph('{"n": 1, "edges": []}')
    assert g.n == 1
    assert g.edges == ()


def test_parse_sorts_edges():
    g = parse_graph('{"n": 3, "edges": [[2,3],[1,2]], "measured": [3]}')
    assert g.edges == ((1, 2), (2, 3))
    assert g.measured == NodeSet((3,))


@pytest.mark.parametrize(
    "text",
    [
        '{"n": 2, "edges": [[1,1]]}',
        '{"n": 2, "edges": [[1,2],[1,2]]}',
        '{"n": 2, "edges": [[1,3]]}',
        '{"n": 2, "edges": [], "measured": [5]}',
    ],
)
def test_parse_rejects_invalid_graphs(text):
    with pytest.raises(InvariantError):
        parse_graph(text)


@pytest.mark.parametrize("text", ['{"n": 2, "edges": [[1,2]', '{"n": 0}', '{"edges": []}', "graph {}"])
def test_parse_rejects_malformed_text(text):
    with pytest.raises(GraphSyntaxError):
        parse_graph(text)


def test_out_neighbors(crossed_diamond, layered):
    assert out_neighbors(crossed_diamond, 1) == NodeSet((2, 3))
    assert out_neighbors(layered, 4) == NodeSet((6, 7, 8))
    assert out_neighbors(crossed_diamond, 5) == NodeSet()
    assert in_neighbors(layered, 7) == NodeSet((4, 5))


def test_out_neighbors_out_of_range(crossed_diamond):
    with pytest.raises(InvariantError):
        out_neighbors(crossed_diamond, 6)
    with pytest.raises(InvariantError):
        out_neighbors(crossed_diamond, 0)


def test_out_neighbors_never_contain_node(layered):
    for i in range(1, layered.n + 1):
        assert i not in out_neighbors(layered, i)


def test_complement(crossed_diamond, layered):
    assert complement(crossed_diamond, NodeSet((4, 5))) == NodeSet((1, 2, 3))
    assert complement(crossed_diamond, NodeSet()) == NodeSet((1, 2, 3, 4, 5))
    assert complement(layered, NodeSet((2, 3))) == NodeSet((1, 4, 5, 6, 7, 8))
    s = NodeSet((1, 4))
    assert complement(layered, complement(layered, s)) == s


def test_nodeset_algebra():
    a, b = NodeSet.of([3, 1, 2]), NodeSet.of([2, 4])
    assert a.members == (1, 2, 3)
    assert (a | b) == NodeSet((1, 2, 3, 4))
    assert (a & b) == NodeSet((2,))
    assert (a - b) == NodeSet((1, 3))
    assert [str(s) for s in a.subsets(2)] == ["{1,2}", "{1,3}", "{2,3}"]
    with pytest.raises(InvariantError):
        NodeSet.of([1, 1])


def test_serialize_round_trip(layered):
    labelled = DiGraph.build(3, [(1, 2), (2, 3)], [3], ["a", "b", "c"])
    for g in (layered, labelled):
        assert parse_graph(serialize_graph(g)) == g


def test_parse_dot():
    g = parse_graph("digraph net {\n  1 -> 2 -> 3;\n  4 [shape=doublecircle];\n  node [shape=circle];\n}")
    assert g.n == 4
    assert g.edges == ((1, 2), (2, 3))
    assert g.measured == NodeSet((4,))


def test_dot_rejects_named_nodes():
    with pytest.raises(GraphSyntaxError):
        parse_graph("digraph { a -> b; }")


def test_dot_export(crossed_diamond):
    text = to_dot(crossed_diamond, NodeSet((4, 5)))
    assert text.count(" -> ") == 6
    assert text.count("shape=doublecircle") == 2
    back = parse_graph(text)
    assert back.edges == crossed_diamond.edges
    assert back.measured == NodeSet((4, 5))


def test_dot_labels_with_quotes_and_separators():
    g = DiGraph.build(3, [(1, 2), (2, 3)], [3], ['say "hi"', "a;b -> c", "back\\slash // not a comment"])
    text = to_dot(g)
    assert 'label="say \\"hi\\""' in text
    assert parse_graph(text) == g


def test_dot_rejects_missing_low_ids():
    with pytest.raises(InvariantError):
        parse_graph("digraph { 2 -> 3; }")
    g = parse_graph("digraph { 1; 2 -> 3; }")
    assert g.n == 3
    assert g.edges == ((2, 3),)


def test_to_networkx(layered):
    h = to_networkx(layered)
    assert h.number_of_nodes() == 8
    assert h.number_of_edges() == 10
