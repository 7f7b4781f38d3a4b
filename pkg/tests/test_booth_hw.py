import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from posit_amd.booth_hw import (
    booth_digits,
    booth_multiply,
    exhaustive_check,
    final_add_split,
    n_rows,
    ppg_radix8,
    ppr_reduce,
    rne_full,
    rne_top13,
    twos_complement_block,
)

sig12 = st.integers(0, 0xFFF)


@pytest.mark.parametrize("width", [1, 4, 8, 12, 16])
def test_twos_complement_block_exhaustive(width):
    a = np.arange(1 << width, dtype=np.int64)
    assert np.array_equal(twos_complement_block(a, 1, width), (-a) & ((1 << width) - 1))
    assert np.array_equal(twos_complement_block(a, 0, width), a)


def test_twos_complement_block_examples():
    assert twos_complement_block(0b0000, 1, 4) == 0
    assert twos_complement_block(0b0110, 1, 4) == 0b1010
    assert twos_complement_block(0b0110, 0, 4) == 0b0110


def test_five_rows():
    assert n_rows(12) == 5
    assert len(ppg_radix8(0xABC, 0x123).rows) == 5


@given(sig12)
def test_digits_recode_multiplier(b):
    value = sum((-1) ** neg * mag * 8 ** i for i, (neg, mag) in enumerate(booth_digits(b)))
    assert value == b
    assert all(0 <= mag <= 4 for _, mag in booth_digits(b))


def test_zero_multiplier():
    assert ppg_radix8(0xFFF, 0).rows == [0] * 5
    assert ppr_reduce(ppg_radix8(0, 0)) == (0, 0)


@pytest.mark.parametrize("a, b, product", [(0x800, 0x800, 0x400000), (0xFFF, 0xFFF, 0xFFE001)])
def test_ppg_examples(a, b, product):
    array = ppg_radix8(a, b)
    assert array.total() == product
    s, c = ppr_reduce(array)
    assert (s + c) & 0xFFFFFF == product


def test_final_add_split_examples():
    # 2^22 >> 11 == 0x800
    p = final_add_split(0x400000, 0)
    assert (p.top13, p.sticky) == (0x800, 0)
    p = booth_multiply(0xFFF, 0xFFF)
    assert (p.top13, p.sticky, p.full) == (0x1FFC, 1, 0xFFE001)
    p = final_add_split(0, 0)
    assert (p.top13, p.sticky) == (0, 0)


@given(sig12, sig12)
def test_product_contract(a, b):
    p = booth_multiply(a, b)
    assert p.full == a * b
    assert p.top13 == p.full >> 11
    assert p.sticky == int(p.full & 0x7FF != 0)
    s, c = ppr_reduce(ppg_radix8(a, b))
    assert (s + c) & 0xFFFFFF == ppg_radix8(a, b).total()


@given(sig12)
def test_hidden_bit_only_multiplicand(b):
    assert booth_multiply(0x800, b).full == b << 11


@given(st.integers(0x800, 0xFFF), st.integers(0x800, 0xFFF))
def test_normalized_range(a, b):
    assert booth_multiply(a, b).full >= 1 << 22


@given(sig12, sig12)
def test_top13_rounding_equals_full(a, b):
    p = booth_multiply(a, b)
    assert rne_top13(p) == rne_full(p.full, 12)


def test_exhaustive_small_width():
    counts = exhaustive_check(width=8)
    assert counts == {"full": 0, "top": 0, "round": 0, "pairs": 1 << 16}


def test_exhaustive_check_workers_agree():
    assert exhaustive_check(width=9, chunk=32, workers=3) == exhaustive_check(width=9)
