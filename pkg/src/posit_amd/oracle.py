"""Reference results: correctly rounded posit multiply/divide and baselines.

Two independent referees live here. ``exact_mul``/``exact_div`` work on
wide integers and round the infinite-precision body bit string directly.
``PositTable`` enumerates every <N,2> value (N <= 16) and rounds by bracket
search, using the (N+1)-bit posit between two neighbours as the rounding
boundary; it is vectorized and serves the large sampled sweeps.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .posit_core import (
    ES,
    P16,
    PositConfig,
    PositWord,
    decode,
    decode_array,
    encode_array,
    signed_bits,
    to_real,
)
from .recip_approx import nr_refine, nr_refine_array


@dataclass(frozen=True)
class ExactValue:
    """Dyadic value (-1)^sign * num * 2^(-log2_den); ``sticky`` marks a dropped remainder."""

    sign: int
    num: int
    log2_den: int
    sticky: bool = False

    @classmethod
    def from_word(cls, word: PositWord) -> "ExactValue":
        d = decode(word)
        if d.chck:
            if d.s:
                raise ValueError("NaR has no value")
            return cls(0, 0, 0)
        fb = word.config.fb
        return cls(d.s, d.significand, fb - d.m)

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.sign ^ other.sign, self.num * other.num,
                          self.log2_den + other.log2_den, self.sticky or other.sticky)

    def divide(self, other: "ExactValue", extra_bits: int = 80) -> "ExactValue":
        """Long division keeping ``extra_bits`` quotient bits plus a sticky remainder flag."""
        if other.num == 0:
            raise ZeroDivisionError
        q, r = divmod(self.num << extra_bits, other.num)
        return ExactValue(self.sign ^ other.sign, q,
                          self.log2_den - other.log2_den + extra_bits, r != 0)

    def to_fraction(self) -> Fraction:
        v = Fraction(self.num) / Fraction(2) ** self.log2_den
        return -v if self.sign else v


def round_exact(x: ExactValue, config: PositConfig = P16) -> PositWord:
    """Nearest-even posit of ``x`` with saturation; zero maps to the zero word."""
    n = config.n_bits
    if x.num == 0:
        return PositWord(0, config)
    length = x.num.bit_length()
    scale = length - 1 - x.log2_den
    if scale > config.max_scale:
        mag = config.maxpos
    elif scale < -config.max_scale:
        mag = config.minpos
    else:
        k, e = divmod(scale, 1 << ES)
        regime = "1" * (k + 1) + "0" if k >= 0 else "0" * (-k) + "1"
        tail = bin(x.num)[3:] + ("1" if x.sticky else "")
        body = regime + format(e, "02b") + tail
        kept, rest = body[: n - 1].ljust(n - 1, "0"), body[n - 1:]
        mag = int(kept, 2)
        if rest and rest[0] == "1" and ("1" in rest[1:] or mag & 1):
            mag += 1
        mag = min(max(mag, config.minpos), config.maxpos)
    return PositWord((-mag) & config.mask if x.sign else mag, config)


def _check_configs(a: PositWord, b: PositWord) -> PositConfig:
    if a.config != b.config:
        raise ValueError("operands use different posit configurations")
    return a.config


def exact_mul(a: PositWord, b: PositWord) -> PositWord:
    config = _check_configs(a, b)
    if a.is_nar or b.is_nar:
        return PositWord(config.nar, config)
    return round_exact(ExactValue.from_word(a) * ExactValue.from_word(b), config)


def exact_div(a: PositWord, b: PositWord) -> PositWord:
    config = _check_configs(a, b)
    if a.is_nar or b.is_nar or b.is_zero:
        return PositWord(config.nar, config)
    return round_exact(ExactValue.from_word(a).divide(ExactValue.from_word(b)), config)


def round_fraction(x: Fraction, config: PositConfig = P16) -> PositWord:
    """Correctly rounded posit of an arbitrary rational (exact, slow)."""
    if x == 0:
        return PositWord(0, config)
    mag = abs(x)
    num, den = mag.numerator, mag.denominator
    shift = max(0, 2 * config.n_bits + 8 + den.bit_length() - num.bit_length())
    q, r = divmod(num << shift, den)
    return round_exact(ExactValue(int(x < 0), q, shift, r != 0), config)


def ulp_distance(x: PositWord, y: PositWord) -> int:
    """Signed distance in the monotone ordering of posit patterns."""
    config = _check_configs(x, y)
    if x.is_nar or y.is_nar:
        raise ValueError("ULP distance is undefined for NaR")
    return int(signed_bits(x.bits, config) - signed_bits(y.bits, config))


def ulp_distance_array(x: np.ndarray, y: np.ndarray, config: PositConfig = P16) -> np.ndarray:
    return signed_bits(np.asarray(x, np.int64), config) - signed_bits(np.asarray(y, np.int64), config)


class PositTable:
    """Every positive <N,2> value (N <= 16) sorted, with rounding boundaries.

    ``values[i]`` is the value of pattern ``i + 1``. The boundary between
    patterns p and p + 1 is the value of pattern 2p + 1 in <N+1,2>; rounding in
    the encoded domain is exactly a comparison against that boundary.
    All entries are exact in float64 for N <= 16.
    """

    def __init__(self, config: PositConfig = P16):
        if config.n_bits > 16:
            raise ValueError("table oracle is limited to N <= 16")
        self.config = config
        wide = PositConfig(config.n_bits + 1)
        top = config.maxpos
        self.values = np.array([float(to_real(PositWord(p, config))) for p in range(1, top + 1)])
        self.bounds = np.array([float(to_real(PositWord(2 * p + 1, wide))) for p in range(1, top)])
        self._fractions = None

    @classmethod
    @lru_cache(maxsize=None)
    def get(cls, config: PositConfig = P16) -> "PositTable":
        return cls(config)

    def word_values(self, bits: np.ndarray) -> np.ndarray:
        """float64 value of each pattern; NaR maps to nan."""
        bits = np.asarray(bits, dtype=np.int64)
        cfg = self.config
        sgn = signed_bits(bits, cfg)
        mag = np.abs(sgn)
        out = np.zeros(bits.shape)
        nz = (mag > 0) & (bits != cfg.nar)
        out[nz] = np.sign(sgn[nz]) * self.values[mag[nz] - 1]
        out[bits == cfg.nar] = np.nan
        return out

    def _round_magnitude(self, num: np.ndarray, den: np.ndarray) -> np.ndarray:
        """Pattern of the posit nearest num/den (both positive, exact float64)."""
        vals, bounds = self.values, self.bounds
        q = num / den
        idx = np.searchsorted(vals, q, side="right") - 1
        idx = np.clip(idx, 0, len(vals) - 1)
        # the float quotient may land one slot off; fix with exact products
        hi = np.minimum(idx + 1, len(vals) - 1)
        idx = np.where((vals[hi] * den <= num) & (hi > idx), hi, idx)
        idx = np.where((vals[idx] * den > num) & (idx > 0), idx - 1, idx)
        below = vals[0] * den > num
        lo_pat = idx + 1
        b = bounds[np.minimum(idx, len(bounds) - 1)] * den
        up = (b < num) | ((b == num) & ((lo_pat & 1) == 1))
        up &= idx < len(vals) - 1
        pat = lo_pat + up
        return np.where(below, 1, pat)

    def _signed(self, mag, neg):
        return np.where(neg, (-mag) & self.config.mask, mag)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        va, vb = self.word_values(a), self.word_values(b)
        prod = va * vb
        pat = self._round_magnitude(np.abs(prod), np.ones_like(prod))
        out = self._signed(pat, prod < 0)
        out = np.where(prod == 0, 0, out)
        return np.where(np.isnan(prod), self.config.nar, out)

    def div(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        va, vb = self.word_values(a), self.word_values(b)
        with np.errstate(divide="ignore", invalid="ignore"):
            pat = self._round_magnitude(np.abs(va), np.where(vb == 0, 1.0, np.abs(vb)))
        out = self._signed(pat, (va < 0) ^ (vb < 0))
        out = np.where(va == 0, 0, out)
        return np.where(np.isnan(va) | np.isnan(vb) | (vb == 0), self.config.nar, out)

    def round_fraction(self, x: Fraction) -> PositWord:
        """Scalar bracket search over the exact value set."""
        cfg = self.config
        if x == 0:
            return PositWord(0, cfg)
        if self._fractions is None:
            wide = PositConfig(cfg.n_bits + 1)
            self._fractions = [to_real(PositWord(p, cfg)) for p in range(1, cfg.maxpos + 1)]
            self._bound_fractions = [to_real(PositWord(2 * p + 1, wide)) for p in range(1, cfg.maxpos)]
        mag = abs(x)
        i = bisect.bisect_right(self._fractions, mag) - 1
        if i < 0:
            pat = 1
        elif i == len(self._fractions) - 1:
            pat = cfg.maxpos
        else:
            bound = self._bound_fractions[i]
            pat = i + 1 + (mag > bound or (mag == bound and (i + 1) & 1))
        return PositWord((-pat) & cfg.mask if x < 0 else pat, cfg)


def exact_reciprocal_array(bits: np.ndarray, config: PositConfig = P16) -> np.ndarray:
    """Correctly rounded 1/x for non-exception patterns via integer long division."""
    fb = config.fb
    d = decode_array(bits, config)
    sig = (1 << fb) | d["f"]
    num = np.int64(1) << (2 * fb + 2)
    q = num // sig
    sticky = (num % sig) != 0
    # 2^fb/sig = q/2^(fb+2) lies in (1/2, 1]; for f > 0 take fb+1 quotient bits plus sticky
    exact_pow = d["f"] == 0
    scale = np.where(exact_pow, -d["m"], -d["m"] - 1)
    frac = np.where(exact_pow, 0, ((q - (np.int64(1) << (fb + 1))) << 1) | sticky)
    return encode_array(d["s"], scale, frac, config, ext_bits=2)


# -- PACoGen-style baseline ---------------------------------------------------

PACOGEN_ADDR_BITS = 8
PACOGEN_ENTRY_BITS = 9
PACOGEN_ENTRY_INT_BITS = 2


@lru_cache(maxsize=None)
def pacogen_seed_lut(addr_bits: int = PACOGEN_ADDR_BITS,
                     entry_bits: int = PACOGEN_ENTRY_BITS,
                     int_bits: int = PACOGEN_ENTRY_INT_BITS) -> tuple[int, ...]:
    """Seed table of 1/(1 + f) at interval midpoints, truncated to the entry format.

    Entries are unsigned fixed point with ``int_bits`` integer bits, leaving
    ``entry_bits - int_bits`` fraction bits.
    """
    frac_bits = entry_bits - int_bits
    return tuple(
        (Fraction(1) / (1 + Fraction(2 * j + 1, 1 << (addr_bits + 1))) * (1 << frac_bits)).__floor__()
        for j in range(1 << addr_bits)
    )


def pacogen_seed(f_int, fb: int, addr_bits: int = PACOGEN_ADDR_BITS):
    """Seed for 1/(1 + f_int/2^fb) as (integer, fraction_bits); accepts arrays."""
    lut = pacogen_seed_lut(addr_bits)
    addr = f_int >> (fb - addr_bits)
    frac_bits = PACOGEN_ENTRY_BITS - PACOGEN_ENTRY_INT_BITS
    if isinstance(addr, np.ndarray):
        return np.asarray(lut, dtype=np.int64)[addr], frac_bits
    return lut[addr], frac_bits


def _nr_frac_bits(config: PositConfig) -> int:
    return 2 * config.fb + 2


def pacogen_reciprocal(f_int: int, config: PositConfig = P16,
                       seed_addr_bits: int = PACOGEN_ADDR_BITS, nr_iters: int = 1) -> int:
    """Refined reciprocal of the significand, rounded to fb + 1 fraction bits.

    Returns an integer r with 1/(1 + f) ~ r / 2^(fb+1).
    """
    fb = config.fb
    if f_int == 0:
        return 1 << (fb + 1)
    wf = _nr_frac_bits(config)
    seed, sbits = pacogen_seed(f_int, fb, seed_addr_bits)
    x = nr_refine(seed << (wf - sbits), ((1 << fb) | f_int) << (wf - fb), nr_iters, wf)
    drop = wf - fb - 1
    r = x >> drop
    guard = (x >> (drop - 1)) & 1
    if guard and (x & ((1 << (drop - 1)) - 1) or r & 1):
        r += 1
    return r


def pacogen_divide(a: PositWord, b: PositWord, seed_addr_bits: int = PACOGEN_ADDR_BITS,
                   nr_iters: int = 1) -> PositWord:
    """x * (1/y) with a seeded, NR-refined reciprocal: two roundings."""
    config = _check_configs(a, b)
    if a.is_nar or b.is_nar or b.is_zero:
        return PositWord(config.nar, config)
    if a.is_zero:
        return a
    fb = config.fb
    da, db = decode(a), decode(b)
    r = pacogen_reciprocal(db.f, config, seed_addr_bits, nr_iters)
    # r / 2^(fb+1) * 2^(-m_b)
    prod = ExactValue(da.s ^ db.s, da.significand * r, 2 * fb + 1 - da.m + db.m)
    return round_exact(prod, config)


def pacogen_divide_array(a: np.ndarray, b: np.ndarray, config: PositConfig = P16,
                         seed_addr_bits: int = PACOGEN_ADDR_BITS, nr_iters: int = 1) -> np.ndarray:
    """Vectorized :func:`pacogen_divide` for non-exception operands."""
    fb = config.fb
    wf = _nr_frac_bits(config)
    da, db = decode_array(a, config), decode_array(b, config)
    seed, sbits = pacogen_seed(db["f"], fb, seed_addr_bits)
    x = nr_refine_array(seed << (wf - sbits), ((1 << fb) | db["f"]) << (wf - fb), nr_iters, wf)
    drop = wf - fb - 1
    r = x >> drop
    guard = (x >> (drop - 1)) & 1
    rest = (x & ((np.int64(1) << (drop - 1)) - 1)) != 0
    r = r + (guard & (rest | (r & 1)))
    r = np.where(db["f"] == 0, np.int64(1) << (fb + 1), r)
    prod = ((1 << fb) | da["f"]) * r  # 2fb+1 fraction bits, value in (0.5, 2)
    width = 2 * fb + 2
    top = (prod >> (width - 1)) & 1
    scale = da["m"] - db["m"] - 1 + top
    # normalize so the leading 1 sits at bit width-1, leaving width-1 fraction bits
    norm = np.where(top == 1, prod, prod << 1)
    frac = norm - (np.int64(1) << (width - 1))
    return encode_array(da["s"] ^ db["s"], scale, frac, config, ext_bits=width - 1 - fb)
