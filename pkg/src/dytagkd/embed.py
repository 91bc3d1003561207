"""Frozen text embedding providers, the on-disk embedding cache format,
and the prompt templates that turn edges into teacher inputs.

Two independent embedding functions exist: one for raw node/relation text
(the student's input encoder) and one for full prompts (the teacher's
language model). Both are modeled as providers: objects with a ``dim`` and
an ``embed(text)`` method. The built-in hash provider derives a unit
vector deterministically from the text bytes, so runs are reproducible
without any model weights; a file provider serves vectors precomputed by
an external tool.

Cache files ("DYTAG-EMB v1") are plain text, keyed by the FNV-1a 64-bit
hash of the UTF-8 text, with values printed to 9 significant digits.
Vectors are quantized to that precision when inserted into a cache, so a
save/load round trip is bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Callable, Iterable, Protocol

import numpy as np

from .errors import DimMismatch, FormatError, MissingKey
from .graph import DyTag, TemporalEdge

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

MAGIC = "DYTAG-EMB"
VERSION = "v1"

# Domain-separation seeds: node/relation text vs. prompt embeddings come
# from different hash families even at equal dimension.
HASH_SEED_ENC = 101
HASH_SEED_LLM = 202

NODE_TEXT_EMB = "node-text.emb"
RELATION_TEXT_EMB = "relation-text.emb"
NEIGHBOR_PROMPTS_EMB = "neighbor-prompts.emb"
LINK_PROMPTS_EMB = "link-prompts.emb"


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def text_key(text: str) -> str:
    """Cache key of a text: 16 lowercase hex digits."""
    return f"{fnv1a_64(text.encode('utf-8')):016x}"


def format_value(x: float) -> str:
    return f"{x:.9g}"


def quantize_sig9(vec: np.ndarray) -> np.ndarray:
    """Round each entry to 9 significant decimal digits (the file precision)."""
    return np.array([float(format_value(float(x))) for x in vec], dtype=np.float64)


def hash_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic unit vector for a text. Draws from a generator keyed by
    the FNV-1a hash of the text bytes plus the seed, then L2-normalizes.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    key = fnv1a_64(text.encode("utf-8") + b"\x00" + struct.pack("<q", seed))
    rng = np.random.Generator(np.random.PCG64(key))
    v = rng.standard_normal(dim)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:  # unreachable in practice, kept for safety
        v[0] = 1.0
        return v
    return v / norm


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


class HashProvider:
    """Hash-based provider with a small memo so repeated texts are cheap."""

    def __init__(self, dim: int, seed: int):
        self.dim = dim
        self.seed = seed
        self._memo: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        v = self._memo.get(text)
        if v is None:
            v = hash_embed(text, self.dim, self.seed)
            v.setflags(write=False)
            self._memo[text] = v
        return v


def save_embeddings(path: str | Path, dim: int, mapping: dict[str, np.ndarray]) -> None:
    """Write a DYTAG-EMB v1 file: header line, then one ``key v1 .. vdim``
    line per entry, sorted by key, LF endings."""
    lines = [f"{MAGIC} {VERSION} {dim} {len(mapping)}"]
    for key in sorted(mapping):
        vec = mapping[key]
        if vec.shape != (dim,):
            raise DimMismatch(f"entry {key} has shape {vec.shape}, expected ({dim},)")
        lines.append(key + " " + " ".join(format_value(float(x)) for x in vec))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str, path: Path) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 4 or parts[0] != MAGIC or parts[1] != VERSION:
        raise FormatError(f"{path}: bad header {line!r}")
    try:
        dim, count = int(parts[2]), int(parts[3])
    except ValueError:
        raise FormatError(f"{path}: non-integer dim/count in header") from None
    if dim < 1 or count < 0:
        raise FormatError(f"{path}: invalid dim {dim} or count {count}")
    return dim, count


def load_embeddings(path: str | Path) -> tuple[int, dict[str, np.ndarray]]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{path}: empty file")
    dim, count = _parse_header(lines[0], path)
    if len(lines) - 1 != count:
        raise FormatError(f"{path}: header says {count} entries, file has {len(lines) - 1}")
    mapping: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(" ")
        if len(fields) != dim + 1:
            raise FormatError(f"{path}:{lineno}: expected {dim + 1} fields, got {len(fields)}")
        key = fields[0]
        if len(key) != 16 or any(c not in "0123456789abcdef" for c in key):
            raise FormatError(f"{path}:{lineno}: bad key {key!r}")
        if key in mapping:
            raise FormatError(f"{path}:{lineno}: duplicate key {key}")
        try:
            mapping[key] = np.array([float(f) for f in fields[1:]], dtype=np.float64)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: unparseable float") from None
    return dim, mapping


class EmbeddingCache:
    """In-memory key -> vector store mirroring one DYTAG-EMB file.

    Values are quantized to the file precision at insertion time, so what
    you read back after a save/load is exactly what ``get`` returned before.
    """

    def __init__(self, dim: int, mapping: dict[str, np.ndarray] | None = None):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self._store: dict[str, np.ndarray] = dict(mapping or {})

    def __len__(self) -> int:
        return len(self._store)

    def __contains__(self, text: str) -> bool:
        return text_key(text) in self._store

    def put(self, text: str, vec: np.ndarray) -> str:
        if vec.shape != (self.dim,):
            raise DimMismatch(f"vector shape {vec.shape}, cache dim {self.dim}")
        key = text_key(text)
        self._store[key] = quantize_sig9(vec)
        return key

    def get(self, text: str) -> np.ndarray | None:
        return self._store.get(text_key(text))

    def embed(self, text: str) -> np.ndarray:
        v = self._store.get(text_key(text))
        if v is None:
            raise MissingKey([text_key(text)])
        return v

    def populate(self, provider: EmbeddingProvider, texts: Iterable[str]) -> int:
        """Insert any texts not yet cached; returns how many were added."""
        added = 0
        for t in texts:
            if t not in self:
                self.put(t, provider.embed(t))
                added += 1
        return added

    def save(self, path: str | Path) -> None:
        save_embeddings(path, self.dim, self._store)

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingCache":
        dim, mapping = load_embeddings(path)
        return cls(dim, mapping)


class FileProvider:
    """Provider over one or more DYTAG-EMB files sharing a dimension.

    A text not present in any file raises MissingKey; the same key bound to
    different vectors in two files is a corrupt cache set.
    """

    def __init__(self, paths: list[Path]):
        if not paths:
            raise ValueError("need at least one embedding file")
        self.dim = 0
        self._store: dict[str, np.ndarray] = {}
        for p in paths:
            dim, mapping = load_embeddings(p)
            if self.dim == 0:
                self.dim = dim
            elif dim != self.dim:
                raise DimMismatch(f"{p}: dim {dim} conflicts with {self.dim}")
            for key, vec in mapping.items():
                old = self._store.get(key)
                if old is not None and not np.array_equal(old, vec):
                    raise FormatError(f"{p}: key {key} already bound to a different vector")
                self._store[key] = vec

    def embed(self, text: str) -> np.ndarray:
        v = self._store.get(text_key(text))
        if v is None:
            raise MissingKey([text_key(text)])
        return v


def parse_provider_spec(spec: str) -> tuple[str, str | None]:
    """Parse ``hash`` or ``file:<directory>`` into (kind, path)."""
    if spec == "hash":
        return "hash", None
    if spec.startswith("file:") and len(spec) > 5:
        return "file", spec[5:]
    raise ValueError(f"provider must be 'hash' or 'file:<dir>', got {spec!r}")


def file_providers(directory: str | Path) -> tuple[FileProvider, FileProvider]:
    """Open a cache directory as (text encoder, prompt LLM) providers."""
    directory = Path(directory)
    enc_files = [directory / NODE_TEXT_EMB, directory / RELATION_TEXT_EMB]
    llm_files = [directory / NEIGHBOR_PROMPTS_EMB, directory / LINK_PROMPTS_EMB]
    for p in enc_files + llm_files:
        if not p.is_file():
            raise FileNotFoundError(f"missing embedding cache file: {p}")
    return FileProvider(enc_files), FileProvider(llm_files)


def _label_name(g: DyTag, e: TemporalEdge) -> str:
    return g.label_vocab.labels[e.label]


def neighbor_prompt(g: DyTag, e: TemporalEdge) -> str:
    """Textual description of an observed edge, seen from its neighborhood."""
    return (
        f"Entity {g.node_text(e.src)} is connected to entity {g.node_text(e.dst)} "
        f"via relation {g.relation_texts_of(e)} at timestamp {e.timestamp} "
        f"with label {_label_name(g, e)}"
    )


def link_prompt(g: DyTag, e: TemporalEdge, positive: bool) -> str:
    """Existence statement about a (possibly fake) edge."""
    word = "an" if positive else "no"
    return (
        f"There is {word} edge between entity {g.node_text(e.src)} "
        f"and entity {g.node_text(e.dst)} "
        f"via relation {g.relation_texts_of(e)} at timestamp {e.timestamp} "
        f"with label {_label_name(g, e)}"
    )


def neighborhood_llm_sum(
    g: DyTag,
    u: int,
    llm: EmbeddingProvider,
    before_time: int | None = None,
) -> np.ndarray:
    """Sum of prompt embeddings over all edges incident to ``u``.

    With ``before_time`` set, only edges strictly earlier count; an isolated
    (or fully filtered) node contributes the zero vector.
    """
    total = np.zeros(llm.dim, dtype=np.float64)
    for idx in g.adjacency[u]:
        e = g.edges[idx]
        if before_time is not None and e.timestamp >= before_time:
            continue
        total += llm.embed(neighbor_prompt(g, e))
    return total


def neighborhood_textual_embedding(
    g: DyTag,
    u: int,
    llm: EmbeddingProvider,
    teacher_mlp: Callable[[np.ndarray], np.ndarray],
    before_time: int | None = None,
) -> np.ndarray:
    return teacher_mlp(neighborhood_llm_sum(g, u, llm, before_time))


def textual_edge_representation(
    g: DyTag,
    e: TemporalEdge,
    positive: bool,
    llm: EmbeddingProvider,
    teacher_mlp: Callable[[np.ndarray], np.ndarray],
    before_time: int | None = None,
) -> np.ndarray:
    """Teacher representation of an edge: both endpoint neighborhood
    embeddings plus the projected existence-prompt embedding."""
    h_u = neighborhood_textual_embedding(g, e.src, llm, teacher_mlp, before_time)
    h_v = neighborhood_textual_embedding(g, e.dst, llm, teacher_mlp, before_time)
    h_link = teacher_mlp(llm.embed(link_prompt(g, e, positive)))
    return h_u + h_v + h_link


def escape_prompt_line(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\r", "\\r").replace("\n", "\\n")


def unescape_prompt_line(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
            if nxt == "r":
                out.append("\r")
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


def dataset_prompts(g: DyTag) -> list[str]:
    """Every prompt derivable from the dataset alone, duplicates removed,
    first occurrence order: neighbor prompts for each edge, then positive
    and negative existence prompts for each edge."""
    seen: set[str] = set()
    out: list[str] = []

    def add(p: str) -> None:
        if p not in seen:
            seen.add(p)
            out.append(p)

    for e in g.edges:
        add(neighbor_prompt(g, e))
    for e in g.edges:
        add(link_prompt(g, e, True))
        add(link_prompt(g, e, False))
    return out
