"""Per-edge temporal encodings over {-1, 0, 1}.

A real edge at time t maps to a vector of length T+k that is 0 before t,
1 from t through the end of the observed range, and -1 on the k future
positions (which are masked out of the loss). A fake edge maps to the
all-zero vector of the same length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfHorizon
from .graph import TimeHorizon


@dataclass(frozen=True)
class TemporalEncoding:
    values: np.ndarray  # int8, shape (T+k,), entries in {-1, 0, 1}

    def __post_init__(self):
        bad = set(np.unique(self.values)) - {-1, 0, 1}
        if bad:
            raise ValueError(f"encoding entries must be in {{-1,0,1}}, got {bad}")

    def __len__(self) -> int:
        return len(self.values)

    def as_float(self) -> np.ndarray:
        return self.values.astype(np.float64)


def encode_positive(t_uv: int, horizon: TimeHorizon) -> TemporalEncoding:
    """Encoding of a real edge first observed at ``t_uv``."""
    if not (0 <= t_uv < horizon.T):
        raise OutOfHorizon(f"timestamp {t_uv} outside [0, {horizon.T})")
    values = np.zeros(horizon.length, dtype=np.int8)
    values[t_uv : horizon.T] = 1
    values[horizon.T :] = -1
    return TemporalEncoding(values)


def encode_negative(horizon: TimeHorizon) -> TemporalEncoding:
    """All-zero encoding of a fake edge (never exists, nothing masked)."""
    return TemporalEncoding(np.zeros(horizon.length, dtype=np.int8))


def loss_mask(enc: TemporalEncoding) -> np.ndarray:
    """Boolean vector that is True exactly where the target is not -1."""
    return enc.values != -1
