"""Dataset I/O and synthetic graph generation.

On-disk layout is three CSV files per dataset directory:

    edge_list.csv      src,dst,relation_id,timestamp,label   (all integers)
    entity_text.csv    id,text
    relation_text.csv  id,text

Text fields use RFC-4180-style double-quote escaping. Header lines are
auto-detected (first field of the first line is non-numeric). The writer
emits the same formats bit-exactly: LF line endings, minimal quoting,
headers included.

Raw timestamps may be sparse; they are re-indexed to dense integers
0..T-1 (order-preserving) when a graph is assembled. Raw label values are
likewise mapped to indices of a sorted vocabulary whose names are the
original decimal strings, so writing a graph back out restores them.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DanglingReference, DuplicateId, EmptyGraph, ParseError
from .graph import DyTag, LabelVocabulary, TemporalEdge, TextTable, TimeHorizon

EDGE_FILE = "edge_list.csv"
ENTITY_FILE = "entity_text.csv"
RELATION_FILE = "relation_text.csv"

_EDGE_HEADER = ["src", "dst", "relation_id", "timestamp", "label"]
_TEXT_HEADER = ["id", "text"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a deterministic community-structured graph.

    Per timestamp, every same-community node pair draws an edge with
    ``intra_edge_prob`` and every cross-community pair with
    ``inter_edge_prob``. Edge labels follow the community-parity rule
    (c_u + c_v) mod num_labels.
    """

    num_communities: int
    nodes_per_community: int
    T: int
    k: int
    intra_edge_prob: float
    inter_edge_prob: float
    num_labels: int
    seed: int

    def __post_init__(self):
        if min(self.num_communities, self.nodes_per_community, self.T, self.num_labels) < 1:
            raise ValueError("counts must be >= 1")
        if self.k < 0:
            raise ValueError("future horizon k must be >= 0")
        for p in (self.intra_edge_prob, self.inter_edge_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0,1]")

    @property
    def node_count(self) -> int:
        return self.num_communities * self.nodes_per_community

    def community_of(self, node: int) -> int:
        return node // self.nodes_per_community


def _is_int(field: str) -> bool:
    try:
        int(field)
        return True
    except ValueError:
        return False


def parse_edge_list(path: str | Path) -> list[TemporalEdge]:
    """Read raw edges in file order. Timestamps and labels keep their raw
    values here; densification happens when the graph is assembled."""
    edges = []
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split(",")
            if lineno == 1 and fields and not _is_int(fields[0]):
                continue  # header
            if len(fields) != 5:
                raise ParseError(
                    f"expected 5 comma-separated fields, got {len(fields)}", lineno
                )
            values = []
            for fidx, raw in enumerate(fields, start=1):
                try:
                    values.append(int(raw))
                except ValueError:
                    raise ParseError(f"non-integer field {raw!r}", lineno, fidx) from None
            edges.append(TemporalEdge(*values))
    return edges


def parse_text_table(path: str | Path) -> TextTable:
    """Read an id,text CSV into a TextTable. Quoted fields may contain
    commas, quotes and newlines per RFC-4180 double-quote escaping."""
    entries: list[tuple[int, str]] = []
    seen: set[int] = set()
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f, strict=True)
        try:
            for row in reader:
                if not row:
                    continue
                if reader.line_num == 1 and not _is_int(row[0]):
                    continue  # header
                if len(row) != 2:
                    raise ParseError(
                        f"expected 2 fields, got {len(row)}", reader.line_num
                    )
                try:
                    row_id = int(row[0])
                except ValueError:
                    raise ParseError(
                        f"non-integer id {row[0]!r}", reader.line_num, 1
                    ) from None
                if row_id in seen:
                    raise DuplicateId(row_id)
                seen.add(row_id)
                entries.append((row_id, row[1]))
        except csv.Error as exc:
            raise ParseError(f"malformed quoting: {exc}", reader.line_num) from None
    return TextTable(tuple(entries))


def densify(values: list[int]) -> dict[int, int]:
    """Order-preserving map from raw integer values to 0..n-1."""
    return {raw: i for i, raw in enumerate(sorted(set(values)))}


def assemble(
    raw_edges: list[TemporalEdge],
    entity_text: TextTable,
    relation_text: TextTable,
    future_horizon: int = 0,
) -> DyTag:
    """Build a DyTag from raw parsed parts: densify timestamps, map labels
    onto a sorted vocabulary, and validate every reference."""
    for e in raw_edges:
        if e.src not in entity_text or e.dst not in entity_text:
            missing = e.src if e.src not in entity_text else e.dst
            raise DanglingReference(f"edge references unknown entity id {missing}")
        if e.relation_id not in relation_text:
            raise DanglingReference(
                f"edge references unknown relation id {e.relation_id}"
            )

    max_entity = max((i for i, _ in entity_text.entries), default=-1)
    max_ref = max((max(e.src, e.dst) for e in raw_edges), default=-1)
    node_count = max(max_entity, max_ref) + 1
    if node_count == 0:
        raise EmptyGraph("dataset has no entities")

    t_map = densify([e.timestamp for e in raw_edges])
    raw_labels = sorted({e.label for e in raw_edges})
    l_map = {raw: i for i, raw in enumerate(raw_labels)}
    vocab = LabelVocabulary(tuple(str(raw) for raw in raw_labels) or ("0",))
    horizon = TimeHorizon(max(1, len(t_map)), future_horizon)

    edges = [
        TemporalEdge(e.src, e.dst, e.relation_id, t_map[e.timestamp], l_map[e.label])
        for e in raw_edges
    ]
    return DyTag(node_count, edges, horizon, vocab, entity_text, relation_text)


def load_dataset(directory: str | Path, future_horizon: int = 0) -> DyTag:
    directory = Path(directory)
    for name in (EDGE_FILE, ENTITY_FILE, RELATION_FILE):
        if not (directory / name).is_file():
            raise FileNotFoundError(f"missing dataset file: {directory / name}")
    raw_edges = parse_edge_list(directory / EDGE_FILE)
    entity_text = parse_text_table(directory / ENTITY_FILE)
    relation_text = parse_text_table(directory / RELATION_FILE)
    return assemble(raw_edges, entity_text, relation_text, future_horizon)


def _write_text_table(table: TextTable, path: Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_TEXT_HEADER)
    for row_id, text in sorted(table.entries):
        writer.writerow([row_id, text])
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_dataset(g: DyTag, directory: str | Path) -> None:
    """Emit the three CSV files for ``g``. Timestamps are written densely;
    labels are written as their vocabulary names (decimal strings), so
    ``load_dataset`` of the output reconstructs an identical graph."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [",".join(_EDGE_HEADER)]
    for e in g.edges:
        raw_label = int(g.label_vocab.labels[e.label])
        lines.append(f"{e.src},{e.dst},{e.relation_id},{e.timestamp},{raw_label}")
    (directory / EDGE_FILE).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_text_table(g.entity_text, directory / ENTITY_FILE)
    _write_text_table(g.relation_text, directory / RELATION_FILE)


INTRA_RELATION_TEXT = "intra-community interaction"
INTER_RELATION_TEXT = "inter-community interaction"


def gen_synthetic(spec: SyntheticSpec) -> DyTag:
    """Deterministic community graph. Node text names the community, the
    relation text says whether an edge stays inside one, and labels follow
    community parity, so text, structure and labels are mutually predictive.

    Occupied timestamps are re-indexed densely, exactly as ``load_dataset``
    would, which keeps write/load round trips exact.
    """
    rng = random.Random(spec.seed)
    n = spec.node_count
    raw_edges = []
    for t in range(spec.T):
        for i in range(n):
            for j in range(i + 1, n):
                same = spec.community_of(i) == spec.community_of(j)
                p = spec.intra_edge_prob if same else spec.inter_edge_prob
                if rng.random() < p:
                    label = (spec.community_of(i) + spec.community_of(j)) % spec.num_labels
                    raw_edges.append(TemporalEdge(i, j, 0 if same else 1, t, label))

    entity_text = TextTable(
        tuple((i, f"member of community {spec.community_of(i)}") for i in range(n))
    )
    relation_text = TextTable(((0, INTRA_RELATION_TEXT), (1, INTER_RELATION_TEXT)))
    return assemble(raw_edges, entity_text, relation_text, spec.k)


def expected_synthetic_counts(spec: SyntheticSpec) -> tuple[float, float]:
    """Expected (intra, inter) edge counts under the generator's model."""
    per_comm = spec.nodes_per_community * (spec.nodes_per_community - 1) // 2
    intra_pairs = spec.num_communities * per_comm
    all_pairs = spec.node_count * (spec.node_count - 1) // 2
    inter_pairs = all_pairs - intra_pairs
    return (
        spec.T * intra_pairs * spec.intra_edge_prob,
        spec.T * inter_pairs * spec.inter_edge_prob,
    )


def graphs_equal(a: DyTag, b: DyTag) -> bool:
    """Structural equality of two graphs, text tables included."""
    return (
        a.node_count == b.node_count
        and a.edges == b.edges
        and a.time_horizon == b.time_horizon
        and a.label_vocab == b.label_vocab
        and a.entity_text.entries == b.entity_text.entries
        and a.relation_text.entries == b.relation_text.entries
        and a.node_text_ids == b.node_text_ids
    )
