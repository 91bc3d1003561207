import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dytagkd.errors import EmptyGraph, SamplingExhausted
from dytagkd.graph import (
    DyTag,
    LabelVocabulary,
    SplitSpec,
    TemporalEdge,
    TextTable,
    TimeHorizon,
    chronological_split,
    inductive_test_filter,
    neighbors,
    sample_negative_edges,
)

from conftest import tiny_graph


def _graph(edges, node_count=6, T=4, k=1, labels=("a", "b")):
    return DyTag(
        node_count,
        edges,
        TimeHorizon(T, k),
        LabelVocabulary(labels),
        TextTable(tuple((i, f"n{i}") for i in range(node_count))),
        TextTable(((0, "r0"), (1, "r1"))),
    )


class TestBasics:
    def test_time_horizon_validation(self):
        with pytest.raises(ValueError):
            TimeHorizon(0, 0)
        with pytest.raises(ValueError):
            TimeHorizon(3, -1)
        assert TimeHorizon(5, 2).length == 7

    def test_label_vocab_validation(self):
        with pytest.raises(ValueError):
            LabelVocabulary(())
        with pytest.raises(ValueError):
            LabelVocabulary(("x", "x"))
        assert LabelVocabulary(("x", "y")).size == 2

    def test_split_spec_validation(self):
        with pytest.raises(ValueError):
            SplitSpec((0.5, 0.5, 0.5))
        with pytest.raises(ValueError):
            SplitSpec((1.2, -0.1, -0.1))
        SplitSpec((0.7, 0.15, 0.15))

    def test_text_table(self):
        t = TextTable(((0, "zero"), (2, "two")))
        assert len(t) == 2
        assert 0 in t and 2 in t and 1 not in t
        assert t.get(1) is None
        assert t.text(2) == "two"


class TestDyTag:
    def test_validation(self):
        with pytest.raises(ValueError):
            _graph([TemporalEdge(0, 9, 0, 0, 0)])  # endpoint out of range
        with pytest.raises(ValueError):
            _graph([TemporalEdge(0, 1, 0, 7, 0)])  # timestamp outside [0,T)
        with pytest.raises(ValueError):
            _graph([TemporalEdge(0, 1, 0, 0, 5)])  # label outside vocabulary

    def test_edges_sorted_on_construction(self):
        shuffled = [
            TemporalEdge(3, 4, 0, 2, 0),
            TemporalEdge(0, 1, 0, 0, 0),
            TemporalEdge(2, 3, 1, 2, 1),
            TemporalEdge(0, 2, 0, 1, 0),
        ]
        g = _graph(shuffled)
        keys = [e.sort_key() for e in g.edges]
        assert keys == sorted(keys)

    def test_adjacency_and_pairs(self, small_graph):
        # every edge index shows up once per distinct endpoint
        for idx, e in enumerate(small_graph.edges):
            assert idx in small_graph.adjacency[e.src]
            assert idx in small_graph.adjacency[e.dst]
        assert small_graph.has_pair(0, 1) and small_graph.has_pair(1, 0)
        assert not small_graph.has_pair(0, 5)

    def test_self_loop_listed_once(self):
        g = _graph([TemporalEdge(1, 1, 0, 0, 0)])
        assert g.adjacency[1] == [0]
        assert neighbors(g, 1) == [(0, 1)]

    def test_node_text_missing_is_empty(self):
        g = DyTag(
            3,
            [TemporalEdge(0, 1, 0, 0, 0)],
            TimeHorizon(1, 0),
            LabelVocabulary(("a",)),
            TextTable(((0, "n0"), (1, "n1"))),  # node 2 has no row
            TextTable(((0, "r0"),)),
        )
        assert g.node_text(0) == "n0"
        assert g.node_text(2) == ""

    def test_neighbors(self, small_graph):
        out = neighbors(small_graph, 0)
        assert [o for _, o in out] == [1, 2, 4]
        idxs = [i for i, _ in out]
        assert idxs == sorted(idxs)
        assert neighbors(small_graph, 5) == [(6, 4)]
        with pytest.raises(IndexError):
            neighbors(small_graph, 6)


class TestSplit:
    def test_sizes_and_order(self, small_graph):
        train, val, test = chronological_split(small_graph, SplitSpec())
        m = small_graph.num_edges
        assert len(train) == int(0.7 * m)
        assert len(val) == int(0.15 * m)
        assert train + val + test == list(range(m))
        times = [small_graph.edges[i].timestamp for i in train + val + test]
        assert times == sorted(times)

    def test_empty_graph(self):
        g = _graph([])
        with pytest.raises(EmptyGraph):
            chronological_split(g, SplitSpec())


class TestNegativeSampling:
    def test_deterministic_and_valid(self, small_graph):
        pos = list(range(small_graph.num_edges))
        a = sample_negative_edges(small_graph, pos, seed=5)
        b = sample_negative_edges(small_graph, pos, seed=5)
        assert a == b
        c = sample_negative_edges(small_graph, pos, seed=6)
        assert len(a) == len(pos)
        for fake, idx in zip(a, pos):
            real = small_graph.edges[idx]
            assert fake.src == real.src
            assert fake.relation_id == real.relation_id
            assert fake.timestamp == real.timestamp
            assert fake.label == real.label
            assert not small_graph.has_pair(fake.src, fake.dst)
            assert not small_graph.has_pair(fake.dst, fake.src)
        assert a != c or len(small_graph.edges) == 0

    def test_exhaustion_on_complete_graph(self):
        edges = [
            TemporalEdge(0, 0, 0, 0, 0),
            TemporalEdge(0, 1, 0, 0, 0),
            TemporalEdge(1, 1, 0, 0, 0),
        ]
        g = _graph(edges, node_count=2)
        with pytest.raises(SamplingExhausted):
            sample_negative_edges(g, [1], seed=0)


def test_inductive_filter(small_graph):
    # train touches nodes {0,1,2,3,4}; edge (4,5) brings the unseen node 5
    train = [0, 1, 2, 3, 4, 5]
    test = [5, 6]
    assert inductive_test_filter(small_graph, test, train) == [6]
    assert inductive_test_filter(small_graph, test, list(range(7))) == []


@st.composite
def random_graph(draw):
    n = draw(st.integers(2, 10))
    T = draw(st.integers(1, 6))
    m = draw(st.integers(1, 25))
    edges = [
        TemporalEdge(
            draw(st.integers(0, n - 1)),
            draw(st.integers(0, n - 1)),
            draw(st.integers(0, 1)),
            draw(st.integers(0, T - 1)),
            draw(st.integers(0, 1)),
        )
        for _ in range(m)
    ]
    return _graph(edges, node_count=n, T=T)


@settings(max_examples=50, deadline=None)
@given(random_graph())
def test_adjacency_consistency(g):
    listed = 0
    for u in range(g.node_count):
        for idx, other in neighbors(g, u):
            e = g.edges[idx]
            assert u in (e.src, e.dst)
            assert other == (e.dst if e.src == u else e.src)
            listed += 1
    expected = sum(1 if e.src == e.dst else 2 for e in g.edges)
    assert listed == expected


@settings(max_examples=50, deadline=None)
@given(random_graph(), st.integers(0, 2**30))
def test_negative_sampling_never_collides(g, seed):
    full = g.node_count * (g.node_count + 1) // 2  # unordered pairs incl self
    present = {tuple(sorted((e.src, e.dst))) for e in g.edges}
    if len(present) >= full:
        return  # nothing left to corrupt toward
    try:
        negs = sample_negative_edges(g, list(range(g.num_edges)), seed)
    except SamplingExhausted:
        return  # a saturated source row is legitimate
    for fake in negs:
        assert not g.has_pair(fake.src, fake.dst)


def test_tiny_graph_fixture_shape():
    g = tiny_graph()
    assert g.num_edges == 7
    assert g.node_count == 6
