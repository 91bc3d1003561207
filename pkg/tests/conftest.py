"""Shared fixtures and frozen acceptance constants.

The metric thresholds below were committed from pilot runs of the standard
synthetic fixture (seeds 0-4 all pass with margin); determinism of the
whole pipeline makes them stable on any platform with the same numpy
bit-stream generators.
"""

import pytest

from dytagkd.embed import HASH_SEED_ENC, HASH_SEED_LLM, HashProvider
from dytagkd.graph import (
    DyTag,
    LabelVocabulary,
    TemporalEdge,
    TextTable,
    TimeHorizon,
)
from dytagkd.ingest import SyntheticSpec, gen_synthetic
from dytagkd.train import TrainConfig

ACCEPT_SPEC = SyntheticSpec(
    num_communities=4,
    nodes_per_community=8,
    T=20,
    k=2,
    intra_edge_prob=0.2,
    inter_edge_prob=0.01,
    num_labels=2,
    seed=7,
)

ACCEPT_CONFIG = TrainConfig(
    d_student=32,
    d_teacher=32,
    d_enc=16,
    d_llm=24,
    mlp_layers_student=2,
    mlp_layers_teacher=2,
    gnn_layers=1,
    lambda_flp=1.0,
    lambda_ec=1.0,
    lambda_kd=1.0,
    batch_size=128,
    learning_rate=0.01,
    epochs=50,
    seed=0,
)

# pilot results, seed 0: flp auc 0.9149 / ap 0.8967; ec weighted f1 1.0
FLP_MIN_ROC_AUC = 0.88
FLP_MIN_AVERAGE_PRECISION = 0.85
EC_MIN_WEIGHTED_F1 = 0.95


@pytest.fixture(scope="session")
def accept_graph() -> DyTag:
    return gen_synthetic(ACCEPT_SPEC)


@pytest.fixture(scope="session")
def providers():
    return (
        HashProvider(ACCEPT_CONFIG.d_enc, HASH_SEED_ENC),
        HashProvider(ACCEPT_CONFIG.d_llm, HASH_SEED_LLM),
    )


def tiny_graph() -> DyTag:
    """Six nodes, handful of edges, two relations, two labels. Small enough
    to reason about by hand in unit tests."""
    edges = [
        TemporalEdge(0, 1, 0, 0, 0),
        TemporalEdge(1, 2, 1, 0, 1),
        TemporalEdge(0, 2, 0, 1, 0),
        TemporalEdge(2, 3, 1, 2, 1),
        TemporalEdge(3, 4, 0, 2, 0),
        TemporalEdge(0, 4, 1, 3, 1),
        TemporalEdge(4, 5, 0, 3, 0),
    ]
    return DyTag(
        node_count=6,
        edges=edges,
        time_horizon=TimeHorizon(4, 1),
        label_vocab=LabelVocabulary(("relevant", "other")),
        entity_text=TextTable(tuple((i, f"node {i}") for i in range(6))),
        relation_text=TextTable(((0, "works with"), (1, "reports to"))),
    )


@pytest.fixture
def small_graph() -> DyTag:
    return tiny_graph()
