from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from posit_amd.posit_core import (
    P16,
    P32,
    PositConfig,
    PositWord,
    all_words,
    decode,
    decode_array,
    decoded_value,
    encode,
    encode_array,
    to_real,
)


def test_config_fields():
    assert P16.fb == 11 and P32.fb == 27
    assert P16.maxpos == 0x7FFF and P16.nar == 0x8000 and P16.one == 0x4000
    with pytest.raises(ValueError):
        PositConfig(16, 3)
    with pytest.raises(ValueError):
        PositConfig(7)
    with pytest.raises(ValueError):
        PositWord(0x10000, P16)


@pytest.mark.parametrize("bits, fields, value", [
    (0x4000, (0, 0, 0, 0, 0), 1),
    (0x5000, (0, 0, 2, 0, 2), 4),
    (0x4400, (0, 0, 0, 1024, 0), Fraction(3, 2)),
    (0x3800, (0, -1, 3, 0, -1), Fraction(1, 2)),
    (0xC000, (1, 0, 0, 0, 0), -1),
])
def test_decode_examples(bits, fields, value):
    d = decode(PositWord(bits))
    assert (d.s, d.k, d.e, d.f, d.m) == fields
    assert d.chck == 0
    assert d.value() == value


@pytest.mark.parametrize("bits, s", [(0x0000, 0), (0x8000, 1)])
def test_decode_exceptions(bits, s):
    d = decode(PositWord(bits))
    assert d.chck == 1 and d.s == s


@pytest.mark.parametrize("args, bits", [
    ((0, 0, 0), 0x4000),
    ((0, 5, 0), 0x6400),
    ((0, 120, 0), 0x7FFF),
    ((0, -120, 0), 0x0001),
    ((1, 0, 0), 0xC000),
])
def test_encode_examples(args, bits):
    assert encode(*args, config=P16).bits == bits


@pytest.mark.parametrize("bits, value", [(0x4000, 1), (0xC000, -1), (0x3800, Fraction(1, 2)),
                                         (0x0000, 0), (0x7FFF, Fraction(2) ** 56),
                                         (0x0001, Fraction(2) ** -56)])
def test_to_real_examples(bits, value):
    assert to_real(PositWord(bits)) == value


def test_to_real_nar():
    assert to_real(PositWord(0x8000)) is None


def test_roundtrip_and_dual_formula_exhaustive():
    for word in all_words(P16):
        d = decode(word)
        if d.chck:
            continue
        assert encode(d.s, d.m, d.f << 3, P16).bits == word.bits
        assert to_real(word) == decoded_value(word)


def test_negation_exhaustive():
    for word in all_words(P16):
        if word.is_nar:
            continue
        assert to_real(-word) == -to_real(word)


def test_sadd_cin_marks_zero_fraction():
    for word in all_words(P16)[1:0x8000]:
        d = decode(word)
        assert d.sadd_cin == int(d.f == 0)


def test_regime_length_symmetry():
    """Scales m and -m-1 take regime runs of equal length."""
    def run_length(m):
        k = m >> 2
        return k + 2 if k >= 0 else 1 - k
    for m in range(-P16.max_scale, P16.max_scale):
        assert run_length(m) == run_length(-m - 1)


def test_monotone_ordering():
    """2's-complement order of the patterns equals value order."""
    words = sorted((w for w in all_words(P16) if not w.is_nar),
                   key=lambda w: w.bits - ((w.bits >> 15) << 16))
    values = [to_real(w) for w in words]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_encode_ties_to_even():
    # 1 + 2^-12 sits halfway between 0x4000 and 0x4001
    assert encode(0, 0, 0b0001, P16, ext_bits=1).bits == 0x4000
    assert encode(0, 0, 0b0011, P16, ext_bits=1).bits == 0x4002
    assert encode(0, 0, 0b0001, P16, ext_bits=1, ties="up").bits == 0x4001


def test_encode_matches_round_to_nearest_on_value():
    from posit_amd.oracle import round_fraction
    rng = np.random.default_rng(1)
    for _ in range(2000):
        scale = int(rng.integers(-60, 61))
        frac = int(rng.integers(0, 1 << 14))
        exact = (1 + Fraction(frac, 1 << 14)) * Fraction(2) ** scale
        assert encode(0, scale, frac, P16, ext_bits=3) == round_fraction(exact)


def test_decode_array_matches_scalar():
    bits = np.arange(1 << 16)
    d = decode_array(bits, P16)
    for b in range(0, 1 << 16, 97):
        ref = decode(PositWord(b))
        assert (d["s"][b], d["chck"][b]) == (ref.s, ref.chck)
        if not ref.chck:
            assert (d["k"][b], d["e"][b], d["f"][b], d["m"][b]) == (ref.k, ref.e, ref.f, ref.m)


def test_encode_array_matches_scalar():
    rng = np.random.default_rng(2)
    sign = rng.integers(0, 2, 5000)
    scale = rng.integers(-70, 71, 5000)
    frac = rng.integers(0, 1 << 16, 5000)
    got = encode_array(sign, scale, frac, P16, ext_bits=5)
    ref = [encode(int(s), int(m), int(f), P16, ext_bits=5).bits for s, m, f in zip(sign, scale, frac)]
    assert got.tolist() == ref


@given(st.integers(1, (1 << 31) - 1))
def test_p32_roundtrip(bits):
    word = PositWord(bits, P32)
    d = decode(word)
    assert encode(d.s, d.m, d.f << 3, P32).bits == bits
    assert to_real(word) == decoded_value(word)
