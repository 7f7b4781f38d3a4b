"""Posit formats and functional decode/encode.

Only ES = 2 is supported. Every scalar function has a numpy twin
(``decode_array``/``encode_array``) used by the exhaustive sweeps; the two
are checked against each other in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ES = 2


@dataclass(frozen=True)
class PositConfig:
    n_bits: int = 16
    es: int = ES

    def __post_init__(self):
        if self.es != ES:
            raise ValueError(f"only es={ES} is supported, got es={self.es}")
        if not 8 <= self.n_bits <= 32:
            raise ValueError(f"n_bits must be in [8, 32], got {self.n_bits}")

    @property
    def fb(self) -> int:
        """Maximum number of fraction bits (N - 1 - 2 - ES)."""
        return self.n_bits - 3 - self.es

    @property
    def mask(self) -> int:
        return (1 << self.n_bits) - 1

    @property
    def nar(self) -> int:
        return 1 << (self.n_bits - 1)

    @property
    def maxpos(self) -> int:
        return (1 << (self.n_bits - 1)) - 1

    @property
    def minpos(self) -> int:
        return 1

    @property
    def one(self) -> int:
        return 1 << (self.n_bits - 2)

    @property
    def max_scale(self) -> int:
        return 4 * (self.n_bits - 2)

    def __str__(self):
        return f"<{self.n_bits},{self.es}>"


P16 = PositConfig(16)
P32 = PositConfig(32)


@dataclass(frozen=True)
class PositWord:
    bits: int
    config: PositConfig = P16

    def __post_init__(self):
        if not 0 <= self.bits <= self.config.mask:
            raise ValueError(f"{self.bits:#x} does not fit in {self.config.n_bits} bits")

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def is_nar(self) -> bool:
        return self.bits == self.config.nar

    def __neg__(self) -> "PositWord":
        return PositWord((-self.bits) & self.config.mask, self.config)

    def hex(self) -> str:
        return f"{self.bits:0{(self.config.n_bits + 3) // 4}x}"

    def __repr__(self):
        return f"PositWord(0x{self.hex()}, {self.config})"


@dataclass(frozen=True)
class DecodedPosit:
    """Fields of a decoded posit, value = (-1)^s * (1 + f/2^FB) * 2^m.

    ``chck`` flags zero/NaR; the numeric fields are meaningless then.
    """

    s: int
    k: int
    e: int
    f: int
    chck: int
    sadd_cin: int
    config: PositConfig = P16

    @property
    def m(self) -> int:
        return (self.k << ES) + self.e

    @property
    def significand(self) -> int:
        return (1 << self.config.fb) | self.f

    def value(self) -> Fraction:
        if self.chck:
            raise ValueError("exception decode has no numeric value")
        mag = Fraction(self.significand, 1 << self.config.fb) * Fraction(2) ** self.m
        return -mag if self.s else mag


def _regime(body: int, width: int) -> tuple[int, int]:
    """Return (k, number of regime bits incl. terminator) of a width-bit body."""
    r0 = (body >> (width - 1)) & 1
    run = 0
    for i in range(width - 1, -1, -1):
        if (body >> i) & 1 != r0:
            break
        run += 1
    k = run - 1 if r0 else -run
    return k, min(run + 1, width)


def _fields(body: int, config: PositConfig) -> tuple[int, int, int]:
    """Split an (N-1)-bit positive body into (k, e, f) with f left-aligned to FB bits."""
    width = config.n_bits - 1
    k, rlen = _regime(body, width)
    rem = width - rlen
    tail = body & ((1 << rem) - 1)
    padded = tail << (ES + config.fb - rem)
    return k, padded >> config.fb, padded & ((1 << config.fb) - 1)


def decode(word: PositWord) -> DecodedPosit:
    config = word.config
    n = config.n_bits
    s = word.bits >> (n - 1)
    body_mask = (1 << (n - 1)) - 1
    body = word.bits & body_mask
    if body == 0:
        return DecodedPosit(s, 0, 0, 0, 1, 1, config)
    if s:
        body = (-body) & body_mask
    k, e, f = _fields(body, config)
    return DecodedPosit(s, k, e, f, 0, int(f == 0), config)


def _body_bits(k: int, e: int, frac: int, frac_bits: int) -> tuple[int, int]:
    """Infinite-precision body bit string (regime|exponent|fraction) and its length."""
    if k >= 0:
        regime, rlen = ((1 << (k + 1)) - 1) << 1, k + 2
    else:
        regime, rlen = 1, -k + 1
    length = rlen + ES + frac_bits
    return (regime << (ES + frac_bits)) | (e << frac_bits) | frac, length


def encode(sign: int, scale: int, frac_ext: int, config: PositConfig = P16,
           ext_bits: int = 3, ties: str = "even") -> PositWord:
    """Round (-1)^sign * (1 + frac_ext/2^(FB+ext_bits)) * 2^scale to a posit.

    Rounding is applied to the encoded bit string, so regions with truncated
    exponent bits round geometrically, as the posit standard prescribes.
    Results saturate at maxpos/minpos and never become zero or NaR.
    ``ties="up"`` rounds a bare guard bit upward (used by the paper-round path).
    """
    n = config.n_bits
    frac_bits = config.fb + ext_bits
    if not 0 <= frac_ext < (1 << frac_bits):
        raise ValueError("frac_ext out of range")
    if scale > config.max_scale:
        mag = config.maxpos
    elif scale < -config.max_scale:
        mag = config.minpos
    else:
        bits, length = _body_bits(scale >> ES, scale & 3, frac_ext, frac_bits)
        shift = length - (n - 1)
        mag = bits >> shift
        if shift:
            guard = (bits >> (shift - 1)) & 1
            sticky = bits & ((1 << (shift - 1)) - 1)
            if guard and (sticky or ties == "up" or mag & 1):
                mag += 1
        mag = min(max(mag, config.minpos), config.maxpos)
    return PositWord((-mag) & config.mask if sign else mag, config)


def to_real(word: PositWord) -> Fraction | None:
    """Exact value from the raw (uncomplemented) fields; ``None`` for NaR.

    Evaluates (1 - 3s + f) * 2^((1 - 2s)(4k + e + s)).
    """
    config = word.config
    if word.is_nar:
        return None
    if word.is_zero:
        return Fraction(0)
    n = config.n_bits
    s = word.bits >> (n - 1)
    k, e, f = _fields(word.bits & ((1 << (n - 1)) - 1), config)
    frac = Fraction(f, 1 << config.fb)
    return (1 - 3 * s + frac) * Fraction(2) ** ((1 - 2 * s) * ((k << ES) + e + s))


def decoded_value(word: PositWord) -> Fraction | None:
    """Exact value via decode, i.e. (-1)^s (1 + f) 2^m on the complemented fields."""
    d = decode(word)
    if d.chck:
        return None if d.s else Fraction(0)
    return d.value()


def signed_bits(bits, config: PositConfig):
    """Interpret pattern(s) as N-bit 2's-complement integers (the posit order key)."""
    n = config.n_bits
    return bits - ((bits >> (n - 1)) << n)


# -- numpy twins -------------------------------------------------------------

def decode_array(bits: np.ndarray, config: PositConfig = P16) -> dict[str, np.ndarray]:
    """Vectorized :func:`decode`; returns int64 arrays s, k, e, f, m, chck, sadd_cin."""
    n = config.n_bits
    fb = config.fb
    width = n - 1
    bits = np.asarray(bits, dtype=np.int64)
    s = (bits >> (n - 1)) & 1
    body_mask = (1 << width) - 1
    body = bits & body_mask
    chck = (body == 0).astype(np.int64)
    body = np.where(s == 1, (-body) & body_mask, body)
    r0 = (body >> (width - 1)) & 1
    run = np.zeros_like(body)
    alive = np.ones_like(body)
    for i in range(width - 1, -1, -1):
        alive &= (((body >> i) & 1) == r0).astype(np.int64)
        run += alive
    k = np.where(r0 == 1, run - 1, -run)
    rlen = np.minimum(run + 1, width)
    rem = width - rlen
    tail = body & ((np.int64(1) << rem) - 1)
    padded = tail << (ES + fb - rem)
    e = padded >> fb
    f = padded & ((1 << fb) - 1)
    k = np.where(chck == 1, 0, k)
    e = np.where(chck == 1, 0, e)
    f = np.where(chck == 1, 0, f)
    return {
        "s": s, "k": k, "e": e, "f": f, "m": (k << ES) + e,
        "chck": chck, "sadd_cin": (f == 0).astype(np.int64),
    }


def encode_array(sign, scale, frac_ext, config: PositConfig = P16,
                 ext_bits: int = 3, ties: str = "even") -> np.ndarray:
    """Vectorized :func:`encode`.

    Extension bits are first folded into a single guard bit plus sticky so the
    body string fits in int64 for every supported word size.
    """
    n = config.n_bits
    fb = config.fb
    sign = np.asarray(sign, dtype=np.int64)
    scale = np.asarray(scale, dtype=np.int64)
    frac_ext = np.asarray(frac_ext, dtype=np.int64)
    if ext_bits >= 2:
        low = frac_ext & ((np.int64(1) << (ext_bits - 1)) - 1)
        frac_ext = ((frac_ext >> (ext_bits - 1)) << 1) | (low != 0)
    elif ext_bits == 0:
        frac_ext = frac_ext << 1
    frac_bits = fb + min(max(ext_bits, 1), 2)
    clipped = np.clip(scale, -config.max_scale, config.max_scale)
    k = clipped >> ES
    e = clipped & 3
    pos = k >= 0
    rlen = np.where(pos, k + 2, 1 - k)
    regime = np.where(pos, ((np.int64(1) << np.maximum(k + 1, 0)) - 1) << 1, 1)
    body = (regime << (ES + frac_bits)) | (e << frac_bits) | frac_ext
    shift = rlen + ES + frac_bits - (n - 1)
    mag = body >> shift
    guard = (body >> (shift - 1)) & 1
    sticky = (body & ((np.int64(1) << (shift - 1)) - 1)) != 0
    tie_up = (mag & 1) == 1 if ties == "even" else np.ones_like(mag, dtype=bool)
    mag = mag + (guard & (sticky | tie_up))
    mag = np.clip(mag, config.minpos, config.maxpos)
    mag = np.where(scale > config.max_scale, config.maxpos, mag)
    mag = np.where(scale < -config.max_scale, config.minpos, mag)
    return np.where(sign == 1, (-mag) & config.mask, mag)


def all_words(config: PositConfig = P16) -> list[PositWord]:
    return [PositWord(b, config) for b in range(1 << config.n_bits)]
