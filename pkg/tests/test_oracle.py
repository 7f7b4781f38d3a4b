from fractions import Fraction

import numpy as np
import pytest

from posit_amd.oracle import (
    ExactValue,
    PositTable,
    exact_div,
    exact_mul,
    exact_reciprocal_array,
    pacogen_divide,
    pacogen_divide_array,
    pacogen_seed_lut,
    round_fraction,
    ulp_distance,
    ulp_distance_array,
)
from posit_amd.posit_core import P16, P32, PositConfig, PositWord, all_words, to_real

TABLE = PositTable.get(P16)
RNG = np.random.default_rng(5)


def W(bits, config=P16):
    return PositWord(bits, config)


def test_mul_examples():
    assert exact_mul(W(0x4400), W(0x4400)) == W(0x4900)
    assert to_real(W(0x4900)) == Fraction(9, 4)
    assert exact_mul(W(0x7FFF), W(0x7FFF)) == W(0x7FFF)
    assert exact_mul(W(0x0001), W(0x0001)) == W(0x0001)
    assert exact_mul(W(0x4000), W(0x1234)) == W(0x1234)
    assert exact_mul(W(0x8000), W(0)) == W(0x8000)


def test_div_examples():
    q = exact_div(W(0x4800), W(0x4C00))
    assert q == W(0x3AAB)
    # nearest: both neighbours are farther from 2/3
    err = abs(to_real(q) - Fraction(2, 3))
    assert all(abs(to_real(W(q.bits + d)) - Fraction(2, 3)) > err for d in (-1, 1))
    assert exact_div(W(0x0001), W(0x7FFF)) == W(0x0001)
    assert exact_div(W(0x1234), W(0x4000)) == W(0x1234)
    for b in (0, 0x8000):
        assert exact_div(W(0x4000), W(b)).is_nar


def test_ulp_distance_examples():
    assert ulp_distance(W(0x4000), W(0x4000)) == 0
    assert ulp_distance(W(0x4000), W(0x4001)) == -1
    assert ulp_distance(W(0x3FFF), W(0x4001)) == -2
    assert ulp_distance(W(0xFFFF), W(0x0001)) == -2
    with pytest.raises(ValueError):
        ulp_distance(W(0x8000), W(0))
    with pytest.raises(ValueError):
        ulp_distance(W(0), W(0, P32))


def test_ulp_distance_array():
    x, y = RNG.integers(0, 1 << 16, 1000), RNG.integers(0, 1 << 16, 1000)
    ok = (x != 0x8000) & (y != 0x8000)
    got = ulp_distance_array(x[ok], y[ok])
    assert got.tolist() == [ulp_distance(W(int(a)), W(int(b))) for a, b in zip(x[ok], y[ok])]


def test_exact_value_arithmetic():
    a, b = ExactValue.from_word(W(0x4800)), ExactValue.from_word(W(0x4C00))
    assert (a * b).to_fraction() == 6
    q = a.divide(b, extra_bits=20)
    assert q.sticky and abs(q.to_fraction() - Fraction(2, 3)) < Fraction(1, 2 ** 19)
    with pytest.raises(ZeroDivisionError):
        a.divide(ExactValue.from_word(W(0)))
    with pytest.raises(ValueError):
        ExactValue.from_word(W(0x8000))


def test_round_fraction_against_table_search():
    """Value-nearest search, restricted to [1/16, 16) where every word carries FB
    fraction bits (elsewhere posit rounding is bitwise, not value-nearest)."""
    words = [w for w in all_words(P16) if 0x2000 <= w.bits < 0x6000]
    values = [to_real(w) for w in words]
    for i in range(0, len(values) - 1, 37):
        lo, hi = values[i], values[i + 1]
        for x in (lo, hi, (lo + hi) / 2, lo + (hi - lo) / 3, hi - (hi - lo) / 3):
            got = round_fraction(x)
            best = min((abs(v - x), w.bits % 2, w.bits) for v, w in zip((lo, hi), words[i:i + 2]))
            assert got.bits == best[2]


def test_two_oracles_agree():
    """Long-division oracle vs the sorted-table midpoint search."""
    a, b = RNG.integers(0, 1 << 16, 20_000), RNG.integers(0, 1 << 16, 20_000)
    mul, div = TABLE.mul(a, b), TABLE.div(a, b)
    for i in range(a.size):
        wa, wb = W(int(a[i])), W(int(b[i]))
        assert exact_mul(wa, wb).bits == mul[i]
        assert exact_div(wa, wb).bits == div[i]


def test_table_rounding_small_config_exhaustive():
    """For <8,2> the table and the string oracle agree on every pair."""
    c8 = PositConfig(8)
    table = PositTable.get(c8)
    a, b = np.meshgrid(np.arange(256), np.arange(256))
    a, b = a.ravel(), b.ravel()
    mul, div = table.mul(a, b), table.div(a, b)
    for i in range(a.size):
        wa, wb = W(int(a[i]), c8), W(int(b[i]), c8)
        assert exact_mul(wa, wb).bits == mul[i]
        assert exact_div(wa, wb).bits == div[i]


def test_exact_reciprocal_array():
    bits = np.array([w for w in range(1, 1 << 16) if w != 0x8000])
    got = exact_reciprocal_array(bits)
    assert np.array_equal(got, TABLE.div(np.full(bits.size, 0x4000), bits))


def test_div_monotone_in_divisor():
    pos = np.arange(1, 0x8000)
    for a in (0x0001, 0x4000, 0x5A5A, 0x7FFF):
        q = TABLE.div(np.full(pos.size, a), pos)
        assert np.all(np.diff(q) <= 0)


def test_pacogen_seed_lut_shape():
    lut = pacogen_seed_lut()
    assert len(lut) == 256 and max(lut) < 1 << 9
    assert lut[0] == 127  # floor(128 / (1 + 1/512))


def test_pacogen_seed_mred():
    f = np.arange(2048)
    lut = np.asarray(pacogen_seed_lut())
    seed = lut[f >> 3] / 128
    exact = 1 / (1 + f / 2048)
    assert 100 * np.mean(np.abs(exact - seed) / exact) == pytest.approx(0.61, abs=0.05)


def test_pacogen_pow2_divisor_exact():
    for b in (0x4000, 0x4800, 0x3800, 0xC800, 0x0001, 0x7FFF):
        for a in (0x4400, 0x1234, 0x9ABC):
            for iters in (0, 1, 3):
                assert pacogen_divide(W(a), W(b), nr_iters=iters) == exact_div(W(a), W(b))


def test_pacogen_exceptions():
    assert pacogen_divide(W(0x4000), W(0)).is_nar
    assert pacogen_divide(W(0), W(0x4000)).is_zero


def test_pacogen_array_matches_scalar():
    a = RNG.integers(1, 0x8000, 2000)
    b = RNG.integers(1, 0x8000, 2000)
    for iters in (0, 1, 2):
        got = pacogen_divide_array(a, b, nr_iters=iters)
        ref = [pacogen_divide(W(int(x)), W(int(y)), nr_iters=iters).bits for x, y in zip(a, b)]
        assert got.tolist() == ref


def test_pacogen_within_one_ulp_after_two_iterations():
    def words(n):
        u = RNG.integers(1, 0xFFFF, n)
        return np.where(u >= 0x8000, u + 1, u)
    a, b = words(10 ** 6), words(10 ** 6)
    got = pacogen_divide_array(a, b, nr_iters=2)
    assert np.max(np.abs(ulp_distance_array(got, TABLE.div(a, b)))) <= 1
