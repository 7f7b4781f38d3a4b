"""Unified multiply/divide datapath.

Decoder A feeds the dividend/multiplicand, Decoder B the divisor (or its
approximate reciprocal when ``div`` is set). Both significands go through the
Booth multiplier, the scales through the scale adder, and a single rounding
happens in the encoder. Exception codes override the datapath result.

Exception table (``excep``: 00 normal, 01 zero, 11 NaR). Rows marked * are
not in the hardware table and follow the posit standard:

    mul  a normal, b zero        -> zero
    mul  a zero,   b normal      -> zero
    mul  a normal, b NaR         -> NaR
    mul  a NaR,    b any      *  -> NaR
    mul  a zero,   b zero     *  -> zero
    mul  a zero,   b NaR      *  -> NaR
    div  a normal, b NaR         -> zero   (NaR with strict_nar=True)
    div  a zero,   b zero        -> NaR
    div  a normal, b zero     *  -> NaR
    div  a zero,   b normal   *  -> zero
    div  a NaR,    b any      *  -> NaR
    div  a zero,   b NaR      *  -> NaR
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .booth_hw import booth_multiply
from .posit_core import ES, DecodedPosit, PositConfig, PositWord, decode, decode_array, encode, encode_array
from .recip_approx import EcLut, decode_b, reciprocal_array

NORMAL, ZERO, NAR = 0b00, 0b01, 0b11


@dataclass(frozen=True)
class OpMode:
    div: int = 0

    def __post_init__(self):
        if self.div not in (0, 1):
            raise ValueError("div must be 0 or 1")


MUL = OpMode(0)
DIV = OpMode(1)


@dataclass(frozen=True)
class ExcepFlags:
    excep: int = NORMAL

    @property
    def force_zero(self) -> bool:
        return self.excep == ZERO

    @property
    def force_nar(self) -> bool:
        return self.excep == NAR

    def __str__(self):
        return format(self.excep, "02b")


@dataclass(frozen=True)
class UnitOutput:
    word: PositWord
    excep: ExcepFlags
    raw_scale: int
    raw_frac_ext: int
    ext_bits: int


def exception_detect(div: int, s_a: int, chck_a: int, s_b: int, chck_b: int,
                     strict_nar: bool = False) -> ExcepFlags:
    if not chck_a and not chck_b:
        return ExcepFlags(NORMAL)
    a_nar = chck_a and s_a
    b_nar = chck_b and s_b
    a_zero = chck_a and not s_a
    b_zero = chck_b and not s_b
    if a_nar:
        return ExcepFlags(NAR)
    if not div:
        return ExcepFlags(NAR if b_nar else ZERO)
    if b_zero:
        return ExcepFlags(NAR)
    if b_nar:
        return ExcepFlags(NAR if (a_zero or strict_nar) else ZERO)
    return ExcepFlags(ZERO)


@lru_cache(maxsize=None)
def _excep_table(strict_nar: bool) -> np.ndarray:
    table = np.zeros(32, dtype=np.int64)
    for idx in range(32):
        bits = [(idx >> i) & 1 for i in (4, 3, 2, 1, 0)]
        table[idx] = exception_detect(*bits, strict_nar=strict_nar).excep
    return table


def scale_add(dec_a: DecodedPosit, dec_b: DecodedPosit, carry: int = 0):
    """Combine two scales plus the significand normalization carry.

    Exponents (with the carry) and regimes are summed separately; the regime
    sum is shifted left by ES before the final addition. The decoders here
    already deliver corrected fields, so the sign/sadd_cin fix-ups of the
    hardware adder contribute nothing extra.
    """
    exp_sum = dec_a.e + dec_b.e + carry
    reg_sum = dec_a.k + dec_b.k
    return (reg_sum << ES) + exp_sum


def _significand_round(full, top, carry, fb: int, paper_round: bool):
    """Fraction-with-extension bits and the extension width fed to the encoder."""
    w = fb + 1
    if paper_round:
        # only the computed MSBs: guard bit available after a carry, none otherwise
        frac = top - (carry << w) - ((1 - carry) << (w - 1))
        return frac << (1 - carry), 1
    frac = full - (carry << (2 * w - 1)) - ((1 - carry) << (2 * w - 2))
    return frac << (1 - carry), 2 * w - 1 - fb


def execute(a: PositWord, b: PositWord, mode: OpMode, lut: EcLut | None = None,
            strict_nar: bool = False, paper_round: bool = False) -> UnitOutput:
    config = a.config
    if b.config != config or (lut is not None and lut.config != config):
        raise ValueError("operands and LUT must share one posit configuration")
    if mode.div and lut is None:
        raise ValueError("divide mode needs an EC lookup table")
    fb = config.fb
    dec_a = decode(a)
    dec_b = decode_b(b, mode.div, lut)
    flags = exception_detect(mode.div, dec_a.s, dec_a.chck, dec_b.s, dec_b.chck, strict_nar)
    sign = dec_a.s ^ dec_b.s
    prod = booth_multiply(dec_a.significand, dec_b.significand, fb + 1)
    carry = prod.full >> (2 * fb + 1)
    scale = scale_add(dec_a, dec_b, carry)
    frac_ext, ext = _significand_round(prod.full, prod.top, carry, fb, paper_round)
    if flags.force_zero:
        word = PositWord(0, config)
    elif flags.force_nar:
        word = PositWord(config.nar, config)
    else:
        word = encode(sign, scale, frac_ext, config, ext, "up" if paper_round else "even")
    return UnitOutput(word, flags, scale, frac_ext, ext)


def execute_array(a: np.ndarray, b: np.ndarray, mode: OpMode, config: PositConfig,
                  lut: EcLut | None = None, strict_nar: bool = False,
                  paper_round: bool = False) -> np.ndarray:
    """Vectorized :func:`execute`; returns the output patterns only."""
    fb = config.fb
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    da = decode_array(a, config)
    if mode.div:
        if lut is None:
            raise ValueError("divide mode needs an EC lookup table")
        db = reciprocal_array(b, lut)
        db["k"], db["e"] = db["m"] >> ES, db["m"] & 3
    else:
        db = decode_array(b, config)
    idx = (mode.div << 4) | (da["s"] << 3) | (da["chck"] << 2) | (db["s"] << 1) | db["chck"]
    excep = _excep_table(strict_nar)[idx]
    prod = booth_multiply((1 << fb) | da["f"], (1 << fb) | db["f"], fb + 1)
    carry = prod.full >> (2 * fb + 1)
    scale = ((da["k"] + db["k"]) << ES) + da["e"] + db["e"] + carry
    frac_ext, ext = _significand_round(prod.full, prod.top, carry, fb, paper_round)
    words = encode_array(da["s"] ^ db["s"], scale, frac_ext, config, ext,
                         "up" if paper_round else "even")
    words = np.where(excep == ZERO, 0, words)
    return np.where(excep == NAR, config.nar, words)
