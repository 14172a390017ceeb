import numpy as np
import pytest

from modsig.errors import EmptyGraphError, ParseError, ValidationError
from modsig.graph import load_graph, read_graph
from support import erdos_renyi


def test_path_and_triangle():
    g = load_graph("0 1\n1 2")
    assert (g.n, g.m) == (3, 2)
    assert g.degrees.tolist() == [1, 2, 1]
    t = load_graph("0 1\n1 2\n2 0")
    assert (t.n, t.m) == (3, 3)
    assert t.degrees.tolist() == [2, 2, 2]


def test_self_loop_rejected():
    with pytest.raises(ValidationError, match="self-loop"):
        load_graph("0 0")


@pytest.mark.parametrize("text", ["0 1\n1 0", "3 4\n3 4"])
def test_duplicate_edge_rejected(text):
    with pytest.raises(ValidationError, match="duplicate"):
        load_graph(text)


def test_empty_graph_rejected():
    with pytest.raises(EmptyGraphError):
        load_graph("# nothing here\n\n")


@pytest.mark.parametrize("text,line", [("0 1\n1 2 3", 2), ("0 x", 1), ("0 -1", 1)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        load_graph(text)
    assert info.value.line == line


def test_comments_blank_lines_and_compaction(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# header\n\n10 30\n30 20   \n# mid\n20 10\n")
    g = read_graph(f)
    assert g.ids == (10, 30, 20)
    assert g.n == 3 and g.m == 3
    assert g.adjacency(0, 1) == 1  # 10-30


def test_adjacency_examples(path3):
    assert path3.adjacency(0, 1) == 1
    assert path3.adjacency(0, 2) == 0
    assert path3.adjacency(1, 1) == 0
    with pytest.raises(IndexError):
        path3.adjacency(0, 3)


def test_max_degree(path3, triangle, star4):
    assert path3.max_degree() == 2
    assert triangle.max_degree() == 2
    assert star4.max_degree() == 4


def test_isolated_vertices_allowed():
    from modsig.graph import Graph
    g = Graph.from_edges([(0, 1)], n=4)
    assert g.degrees.tolist() == [1, 1, 0, 0]


@pytest.mark.parametrize("seed", range(10))
def test_exhaustive_structure(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 51))
    g = erdos_renyi(n, float(rng.uniform(0.05, 0.6)), seed)
    a = np.array([[g.adjacency(i, j) for j in range(n)] for i in range(n)])
    assert (a == a.T).all()
    assert (np.diag(a) == 0).all()
    assert (a.sum(axis=1) == g.degrees).all()
    assert int(g.degrees.sum()) == 2 * g.m
    assert (a == g.dense()).all()
