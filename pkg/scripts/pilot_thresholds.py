#!/usr/bin/env python3
"""Measure the synthetic-fixture metrics across seeds.

This is the calibration run behind the committed test thresholds in
tests/conftest.py: run it after any change to the model or fixture to see
how much margin the thresholds have.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dytagkd.embed import HASH_SEED_ENC, HASH_SEED_LLM, HashProvider
from dytagkd.ingest import SyntheticSpec, gen_synthetic
from dytagkd.train import TrainConfig, train_ec, train_flp


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5, help="seeds 0..N-1")
    ap.add_argument("--epochs", type=int, default=50)
    args = ap.parse_args()

    g = gen_synthetic(SyntheticSpec(4, 8, 20, 2, 0.2, 0.01, 2, seed=7))
    print(f"fixture: {g.node_count} nodes, {g.num_edges} edges, "
          f"T={g.time_horizon.T}, k={g.time_horizon.k}")
    print(f"{'seed':>4} {'task':>4} {'ratio':>6} {'auc':>7} {'ap':>7} "
          f"{'wf1':>7} {'secs':>6}")

    for seed in range(args.seeds):
        cfg = TrainConfig(learning_rate=0.01, epochs=args.epochs, seed=seed)
        enc = HashProvider(cfg.d_enc, HASH_SEED_ENC)
        llm = HashProvider(cfg.d_llm, HASH_SEED_LLM)

        start = time.monotonic()
        report, _ = train_flp(g, cfg, enc, llm)
        secs = time.monotonic() - start
        ratio = report.loss_curve[-1]["total"] / report.initial_loss["total"]
        m = report.metrics["test"]["transductive"]
        print(f"{seed:>4}  flp {ratio:>6.3f} {m['roc_auc']:>7.4f} "
              f"{m['average_precision']:>7.4f} {'':>7} {secs:>6.1f}")

        start = time.monotonic()
        report, _ = train_ec(g, cfg, enc, llm)
        secs = time.monotonic() - start
        ratio = report.loss_curve[-1]["total"] / report.initial_loss["total"]
        m = report.metrics["test"]["transductive"]
        print(f"{seed:>4}   ec {ratio:>6.3f} {'':>7} {'':>7} "
              f"{m['weighted_f1']:>7.4f} {secs:>6.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
