"""In-memory dynamic text-attributed graph: nodes and relations carry text,
edges carry dense integer timestamps and label indices.

The graph is immutable after construction and safe to share across threads.
Edges are kept sorted by (timestamp, src, dst, relation_id, label) so that
every downstream index list is deterministic across runs and platforms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import EmptyGraph, SamplingExhausted

_MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class TemporalEdge:
    src: int
    dst: int
    relation_id: int
    timestamp: int
    label: int

    def sort_key(self) -> tuple[int, int, int, int, int]:
        return (self.timestamp, self.src, self.dst, self.relation_id, self.label)


@dataclass(frozen=True)
class TimeHorizon:
    """Observed timestamps 0..T-1 plus k future steps to predict."""

    T: int
    k: int

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    @property
    def length(self) -> int:
        return self.T + self.k


@dataclass(frozen=True)
class LabelVocabulary:
    """Ordered, unique label names; edge labels index into this list."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("label vocabulary must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label names must be unique")

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SplitSpec:
    """Train/val/test fractions; must sum to 1."""

    ratios: tuple[float, float, float] = (0.7, 0.15, 0.15)

    def __post_init__(self):
        if len(self.ratios) != 3:
            raise ValueError("need exactly three ratios")
        if any(r < 0 or r > 1 for r in self.ratios):
            raise ValueError(f"ratios must lie in [0,1]: {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1: {self.ratios}")


@dataclass(frozen=True)
class TextTable:
    """Ordered (id, text) rows with unique ids and O(1) lookup."""

    entries: tuple[tuple[int, str], ...]
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {i: t for i, t in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: int) -> bool:
        return key in self._by_id

    def get(self, key: int, default: str | None = None) -> str | None:
        return self._by_id.get(key, default)

    def text(self, key: int) -> str:
        return self._by_id[key]


class DyTag:
    """A full dynamic text-attributed graph.

    Holds the node universe, the time-sorted multiset of labeled temporal
    edges, per-node adjacency (undirected: an edge shows up in both endpoint
    lists), the time horizon and the label vocabulary, plus the two text
    tables that give nodes and relations their descriptions.
    """

    def __init__(
        self,
        node_count: int,
        edges: list[TemporalEdge],
        time_horizon: TimeHorizon,
        label_vocab: LabelVocabulary,
        entity_text: TextTable,
        relation_text: TextTable,
    ):
        for e in edges:
            if not (0 <= e.src < node_count and 0 <= e.dst < node_count):
                raise ValueError(f"edge endpoint out of range: {e}")
            if not (0 <= e.timestamp < time_horizon.T):
                raise ValueError(f"edge timestamp outside [0,T): {e}")
            if not (0 <= e.label < label_vocab.size):
                raise ValueError(f"edge label outside vocabulary: {e}")
        self.node_count = node_count
        self.edges: list[TemporalEdge] = sorted(edges, key=TemporalEdge.sort_key)
        self.time_horizon = time_horizon
        self.label_vocab = label_vocab
        self.entity_text = entity_text
        self.relation_text = relation_text
        # node_text_ids[i] is the entity-table id for node i (identity mapping
        # here, kept explicit so loaders with remapped ids can override).
        self.node_text_ids: list[int] = list(range(node_count))

        adjacency: list[list[int]] = [[] for _ in range(node_count)]
        for idx, e in enumerate(self.edges):
            adjacency[e.src].append(idx)
            if e.dst != e.src:
                adjacency[e.dst].append(idx)
        self.adjacency: list[list[int]] = adjacency

        self._pair_set = set()
        for e in self.edges:
            self._pair_set.add((e.src, e.dst))
            self._pair_set.add((e.dst, e.src))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def node_text(self, u: int) -> str:
        text = self.entity_text.get(self.node_text_ids[u])
        return "" if text is None else text

    def relation_texts_of(self, edge: TemporalEdge) -> str:
        return self.relation_text.text(edge.relation_id)

    def has_pair(self, u: int, v: int) -> bool:
        """True if (u,v) occurs as an edge pair in either orientation."""
        return (u, v) in self._pair_set


def neighbors(g: DyTag, u: int) -> list[tuple[int, int]]:
    """All edges incident to ``u`` as (edge index, other endpoint) pairs,
    in ascending edge order. Self-loops report ``u`` itself as the other end.
    """
    if not (0 <= u < g.node_count):
        raise IndexError(f"node index {u} out of range [0, {g.node_count})")
    out = []
    for idx in g.adjacency[u]:
        e = g.edges[idx]
        other = e.dst if e.src == u else e.src
        out.append((idx, other))
    return out


def chronological_split(
    g: DyTag, spec: SplitSpec
) -> tuple[list[int], list[int], list[int]]:
    """Partition edge indices chronologically into train/val/test.

    Edges are already globally sorted by (timestamp, src, dst, relation_id,
    label); train takes the first floor(r1*m), val the next floor(r2*m),
    test the remainder.
    """
    m = g.num_edges
    if m == 0:
        raise EmptyGraph("cannot split a graph with no edges")
    r1, r2, _ = spec.ratios
    n_train = int(r1 * m)
    n_val = int(r2 * m)
    idx = list(range(m))
    return idx[:n_train], idx[n_train : n_train + n_val], idx[n_train + n_val :]


def sample_negative_edges(
    g: DyTag, positives: list[int], seed: int
) -> list[TemporalEdge]:
    """One fake edge per positive: the destination is replaced by a uniform
    random node whose pair with the source never occurs in the graph (either
    orientation). Relation, timestamp and label are copied from the positive.

    Deterministic in (g, positives, seed).
    """
    if g.node_count < 2:
        raise SamplingExhausted("need at least 2 nodes to corrupt destinations")
    rng = random.Random(seed)
    out = []
    for pidx in positives:
        pos = g.edges[pidx]
        for attempt in range(_MAX_REJECTIONS):
            v = rng.randrange(g.node_count)
            if not g.has_pair(pos.src, v):
                out.append(
                    TemporalEdge(
                        src=pos.src,
                        dst=v,
                        relation_id=pos.relation_id,
                        timestamp=pos.timestamp,
                        label=pos.label,
                    )
                )
                break
        else:
            raise SamplingExhausted(
                f"no free destination for src={pos.src} after {_MAX_REJECTIONS} draws"
            )
    return out


def inductive_test_filter(
    g: DyTag, test_edges: list[int], train_edges: list[int]
) -> list[int]:
    """Subset of test edges touching at least one node unseen in training."""
    seen: set[int] = set()
    for idx in train_edges:
        e = g.edges[idx]
        seen.add(e.src)
        seen.add(e.dst)
    return [
        idx
        for idx in test_edges
        if g.edges[idx].src not in seen or g.edges[idx].dst not in seen
    ]
