import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dctjpeg.quantize import (CHROMINANCE, LUMINANCE, QuantTable, default_table,
                              dequantize_block, quantize_block, scaled_table)

LUM = default_table("luminance")


def test_tables_match_published_values():
    assert LUMINANCE[0].tolist() == [16, 11, 10, 16, 24, 40, 51, 61]
    assert LUMINANCE[7].tolist() == [72, 92, 95, 98, 112, 100, 103, 99]
    assert LUMINANCE[4, 5] == 109 and LUMINANCE[5, 6] == 113
    assert CHROMINANCE[:4, :4].tolist() == [
        [17, 18, 24, 47], [18, 21, 26, 66], [24, 26, 56, 99], [47, 66, 99, 99]]
    assert (CHROMINANCE[4:] == 99).all() and (CHROMINANCE[:, 4:] == 99).all()


def test_quantize_examples():
    F = np.zeros((8, 8))
    F[0, 0] = 800
    F[7, 7] = -120
    q = quantize_block(F, LUM)
    assert q[0, 0] == 50
    assert q[7, 7] == -1
    assert np.count_nonzero(q) == 2


def test_dequantize_examples():
    q = np.zeros((8, 8), dtype=int)
    q[0, 0] = 50
    assert dequantize_block(q, LUM)[0, 0] == 800
    assert not dequantize_block(np.zeros((8, 8)), LUM).any()


def test_rounds_half_away_from_zero():
    table = QuantTable(np.full((8, 8), 2))
    F = np.zeros((8, 8))
    F[0, :4] = [1, -1, 3, -3]
    assert quantize_block(F, table)[0, :4].tolist() == [1, -1, 2, -2]


def test_error_bound(rng):
    F = rng.uniform(-1024, 1024, size=(500, 8, 8))
    err = np.abs(F - dequantize_block(quantize_block(F, LUM), LUM))
    assert (err <= LUMINANCE / 2 + 0.5).all()


@given(st.floats(-1024, 1024), st.floats(-1024, 1024), st.integers(1, 255))
def test_monotone(a, b, d):
    table = QuantTable(np.full((8, 8), d))
    lo, hi = sorted((a, b))
    assert quantize_block(np.full((8, 8), lo), table)[0, 0] <= \
        quantize_block(np.full((8, 8), hi), table)[0, 0]


def test_scaled_table_examples():
    assert scaled_table(LUM, 50) == LUM
    assert (scaled_table(LUM, 100).divisors == 1).all()
    assert scaled_table(LUM, 10).divisors[0, 0] == 80
    assert scaled_table(LUM, 1).divisors.max() == 255


def test_scaled_table_monotone_in_quality():
    for role in ("luminance", "chrominance"):
        base = default_table(role)
        prev = scaled_table(base, 1).divisors
        for q in range(2, 101):
            cur = scaled_table(base, q).divisors
            assert (cur <= prev).all()
            prev = cur


@pytest.mark.parametrize("bad", [0, 101, -5, 50.5])
def test_scaled_table_rejects_quality(bad):
    with pytest.raises(ValueError):
        scaled_table(LUM, bad)


def test_table_validation():
    with pytest.raises(ValueError):
        QuantTable(np.zeros((8, 8)))
    with pytest.raises(ValueError):
        QuantTable(np.ones((4, 4)))
