import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dytagkd.encoding import TemporalEncoding, encode_negative, encode_positive, loss_mask
from dytagkd.errors import OutOfHorizon
from dytagkd.graph import TimeHorizon


def test_exhaustive_small_horizons():
    """Every (T, k, t) with T <= 8, k <= 3 matches the direct construction:
    t zeros, then ones up to T, then k masked slots."""
    for T in range(1, 9):
        for k in range(0, 4):
            horizon = TimeHorizon(T, k)
            for t in range(T):
                enc = encode_positive(t, horizon)
                expected = [0] * t + [1] * (T - t) + [-1] * k
                assert enc.values.tolist() == expected, (T, k, t)
            neg = encode_negative(horizon)
            assert neg.values.tolist() == [0] * (T + k)


def test_out_of_horizon():
    h = TimeHorizon(5, 2)
    with pytest.raises(OutOfHorizon):
        encode_positive(-1, h)
    with pytest.raises(OutOfHorizon):
        encode_positive(5, h)


def test_loss_mask_semantics():
    h = TimeHorizon(4, 3)
    pos = encode_positive(2, h)
    assert loss_mask(pos).tolist() == [True] * 4 + [False] * 3
    neg = encode_negative(h)
    assert loss_mask(neg).tolist() == [True] * 7


def test_value_domain_enforced():
    with pytest.raises(ValueError):
        TemporalEncoding(np.array([0, 1, 2], dtype=np.int8))


def test_as_float():
    enc = encode_positive(1, TimeHorizon(3, 1))
    f = enc.as_float()
    assert f.dtype == np.float64
    assert f.tolist() == [0.0, 1.0, 1.0, -1.0]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 50), st.integers(0, 10), st.data())
def test_structure_properties(T, k, data):
    t = data.draw(st.integers(0, T - 1))
    enc = encode_positive(t, TimeHorizon(T, k))
    v = enc.values
    assert len(enc) == T + k
    assert int(np.sum(v == 0)) == t
    assert int(np.sum(v == 1)) == T - t
    assert int(np.sum(v == -1)) == k
    # nondecreasing then the masked tail
    assert all(v[i] <= v[i + 1] for i in range(T - 1))
    assert all(x == -1 for x in v[T:])
