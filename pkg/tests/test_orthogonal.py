import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmspec.core import delta, ones
from bmspec.errors import NumericRangeError
from bmspec.orthogonal import (
    OrthParams,
    orth222,
    orth_direct_sum,
    orthogonality_residual,
    resolution_residual,
)

params6 = st.lists(st.floats(-1, 1), min_size=6, max_size=6)


def test_closed_forms_at_zero():
    Q = orth222(np.zeros(6))
    c = 2.0 ** (-1.0 / 3.0)
    expected = {(0, 0, 0): c, (0, 0, 1): 1.0, (0, 1, 0): c, (0, 1, 1): 1.0,
                (1, 0, 0): -1.0, (1, 0, 1): c, (1, 1, 0): 1.0, (1, 1, 1): c}
    for idx, v in expected.items():
        assert abs(Q[idx] - v) <= 1e-15
    assert abs(c - 0.7937005) < 1e-7


@settings(max_examples=300)
@given(params6)
def test_family_is_orthogonal(r):
    Q = orth222(r)
    assert orthogonality_residual(Q) < 1e-9
    assert np.count_nonzero(Q < 0) == 1 and Q[1, 0, 0] < 0


def test_range_guard():
    with pytest.raises(NumericRangeError):
        orth222([301, 0, 0, 0, 0, 0])
    with pytest.raises(NumericRangeError):
        orth222([np.nan, 0, 0, 0, 0, 0])


def test_direct_sums():
    assert np.array_equal(orth_direct_sum(OrthParams((), True)), delta(1))
    Q4 = orth_direct_sum(OrthParams(((0.0,) * 6, (0.0,) * 6), False))
    assert orthogonality_residual(Q4) < 1e-12
    rng = np.random.default_rng(1)
    Q5 = orth_direct_sum(OrthParams.for_size(5, rng))
    assert Q5.shape == (5, 5, 5) and orthogonality_residual(Q5) < 1e-9
    assert Q5[4, 4, 4] == 1.0
    with pytest.raises(ValueError):
        orth_direct_sum(OrthParams.for_size(4, rng), n=5)


def test_residual_reference_values():
    assert orthogonality_residual(delta(3)) == 0.0
    assert orthogonality_residual(ones(2)) == 2.0


def test_resolution_of_identity():
    rng = np.random.default_rng(2)
    x, y, z = rng.standard_normal((3, 3))
    assert resolution_residual(delta(3), x, y, z) == 0.0
    Q = orth222(np.zeros(6))
    for _ in range(100):
        x, y, z = rng.standard_normal((3, 2))
        scale = np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)
        assert resolution_residual(Q, x, y, z) < 1e-10 * scale


@settings(max_examples=50)
@given(params6, params6, st.integers(0, 2 ** 32 - 1))
def test_resolution_bound(r1, r2, seed):
    Q = orth_direct_sum(OrthParams((tuple(r1), tuple(r2)), False))
    x, y, z = np.random.default_rng(seed).standard_normal((3, 4))
    bound = orthogonality_residual(Q) * np.abs(x).sum() * np.abs(y).sum() * np.abs(z).sum()
    assert resolution_residual(Q, x, y, z) <= bound + 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        OrthParams(((0.0,) * 5,), False)
    p = OrthParams.from_flat(list(range(12)), singleton=True)
    assert p.n == 5 and p.flat().tolist() == list(range(12))
