"""Temporal-encoding GNN student with a text-embedding teacher, trained by
knowledge distillation on dynamic text-attributed graphs.

Subpackage map:
    graph     -- in-memory graph model, chronological splits, negative sampling
    ingest    -- CSV dataset loading/writing and synthetic graph generation
    encoding  -- {0,1,-1} temporal edge encodings and loss masks
    embed     -- text-embedding providers, prompts, caches, teacher head
    nn        -- dense numeric core with analytic gradients and Adam
    train     -- training/evaluation loops, metrics, ablations, reports
    cli       -- command line entry point
"""

__version__ = "0.1.0"
