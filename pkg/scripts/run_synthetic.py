#!/usr/bin/env python3
"""Generate the standard synthetic fixture and train both tasks on it.

Writes the dataset, embedding caches, reports, metric CSVs and model
checkpoints under --out. Everything is deterministic in --seed.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dytagkd.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/synthetic", help="output directory")
    ap.add_argument("--seed", type=int, default=0, help="training seed")
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    data = out / "dataset"
    cache = out / "cache"

    rc = cli_main(
        ["ingest", "--synthetic", "--communities", "4", "--community-size", "8",
         "--timesteps", "20", "--k", "2", "--intra", "0.2", "--inter", "0.01",
         "--labels", "2", "--seed", "7", "--out", str(data)]
    )
    if rc != 0:
        return rc

    common = [
        "--dataset", str(data), "--k", "2",
        "--seed", str(args.seed), "--epochs", str(args.epochs),
        "--learning-rate", "0.01", "--workers", str(args.workers),
    ]
    rc = cli_main(["embed-cache", *common, "--out", str(cache)])
    if rc != 0:
        return rc

    for task in ("flp", "ec"):
        rc = cli_main(["train", *common, "--task", task, "--out", str(out)])
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
