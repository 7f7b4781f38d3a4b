"""Approximate posit reciprocal: 2's-complement seed plus LUT error correction.

Complementing the lower N-1 bits of a posit maps (1 + f) 2^m onto
(1 - f/2) 2^(-m), a linear stand-in for 1/(1 + f). The residual curvature is
f(1 - f)/(1 + f) in units of the fraction LSB; a small table of those values,
addressed by the leading fraction bits, is subtracted from the complemented
fraction.

The table here stores plain (uncomplemented) integers. Hardware stores them
pre-inverted so the subtraction becomes an addition; the results are identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .posit_core import (
    ES,
    P16,
    DecodedPosit,
    PositConfig,
    PositWord,
    _fields,
    encode,
)

SAMPLING_RULES = ("left", "midpoint")


def ec_exact(f, fb: int = 11):
    """Unrounded correction f(1-f)/(1+f) * 2^fb. Exact for Fraction input."""
    if not 0 <= f < 1:
        raise ValueError("fraction must lie in [0, 1)")
    return f * (1 - f) / (1 + f) * 2 ** fb


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


@dataclass(frozen=True)
class EcLut:
    msb_bits: int
    entry_width: int
    entries: tuple[int, ...]
    config: PositConfig = P16
    sampling: str = "left"

    @property
    def size_bits(self) -> int:
        return len(self.entries) * self.entry_width

    @property
    def size_bytes(self) -> float:
        return self.size_bits / 8

    def lookup(self, f_int):
        """Entry for FB-bit fraction(s) ``f_int``; accepts ints or arrays."""
        addr = f_int >> (self.config.fb - self.msb_bits)
        if isinstance(addr, np.ndarray):
            return self.as_array()[addr]
        return self.entries[addr]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64)

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    def dumps(self) -> str:
        cfg = self.config
        digits = (self.entry_width + 3) // 4
        lines = [f"# posit N={cfg.n_bits} ES={cfg.es} FB={cfg.fb} "
                 f"A={self.msb_bits} W={self.entry_width}"]
        lines += [f"{v:0{digits}x}" for v in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "EcLut":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=") for tok in lines[0].lstrip("#").split()[1:])
        config = PositConfig(int(header["N"]), int(header["ES"]))
        if int(header["FB"]) != config.fb:
            raise ValueError("FB in header does not match N")
        entries = tuple(int(ln, 16) for ln in lines[1:])
        a, w = int(header["A"]), int(header["W"])
        if len(entries) != 1 << a:
            raise ValueError(f"expected {1 << a} entries, found {len(entries)}")
        return cls(a, w, entries, config)

    @classmethod
    def load(cls, path) -> "EcLut":
        return cls.loads(Path(path).read_text())


def sample_point(j: int, msb_bits: int, sampling: str = "left") -> Fraction:
    if sampling == "left":
        return Fraction(j, 1 << msb_bits)
    if sampling == "midpoint":
        return Fraction(2 * j + 1, 1 << (msb_bits + 1))
    raise ValueError(f"unknown sampling rule {sampling!r}")


def build_ec_lut(config: PositConfig = P16, msb_bits: int = 5,
                 sampling: str = "left") -> EcLut:
    """Tabulate the rounded correction at one sample point per address.

    ``left`` samples each interval at its lower edge, which keeps entry 0 at
    zero and therefore the reciprocal of every power of two exact.
    """
    if not 1 <= msb_bits <= config.fb:
        raise ValueError(f"msb_bits must be in [1, {config.fb}]")
    width = config.fb - 2
    entries = tuple(
        _round_half_up(ec_exact(sample_point(j, msb_bits, sampling), config.fb))
        for j in range(1 << msb_bits)
    )
    if max(entries) >= 1 << width:
        raise ValueError("entry overflows the table width")
    return EcLut(msb_bits, width, entries, config, sampling)


def null_lut(config: PositConfig = P16) -> EcLut:
    """All-zero table: the bare 2's-complement approximation."""
    return EcLut(1, config.fb - 2, (0, 0), config, "none")


@dataclass(frozen=True)
class ReciprocalResult:
    """Corrected reciprocal as fed to the multiplier, plus its rounded word.

    ``decoded.f`` holds the full FB-bit corrected fraction, which may be finer
    than the output format can represent at that scale.
    """

    decoded: DecodedPosit
    word: PositWord
    borrow: bool = False


def decode_b(word: PositWord, div: int, lut: EcLut | None = None) -> DecodedPosit:
    """Reciprocal-capable decoder. With ``div=0`` it equals :func:`decode`.

    The body is 2's-complemented when sign XOR div is set; for a negative
    divisor the sign preprocessing and the reciprocal complement cancel.
    """
    config = word.config
    n = config.n_bits
    fb = config.fb
    s = word.bits >> (n - 1)
    body_mask = (1 << (n - 1)) - 1
    body = word.bits & body_mask
    if body == 0:
        return DecodedPosit(s, 0, 0, 0, 1, 1, config)
    if s ^ div:
        body = (-body) & body_mask
    k, e, f = _fields(body, config)
    if not div:
        return DecodedPosit(s, k, e, f, 0, int(f == 0), config)
    m = (k << ES) + e
    orig_f = (-f) & ((1 << fb) - 1)
    sig = (1 << fb) + f - (lut.lookup(orig_f) if lut is not None else 0)
    if sig < 1 << fb:
        # correction borrowed through the hidden bit; renormalize one place
        sig <<= 1
        m -= 1
    f = sig - (1 << fb)
    return DecodedPosit(s, m >> ES, m & 3, f, 0, int(f == 0), config)


def approx_reciprocal(word: PositWord, lut: EcLut) -> ReciprocalResult:
    if word.is_zero or word.is_nar:
        raise ValueError("reciprocal of zero/NaR must be screened by the caller")
    if word.config != lut.config:
        raise ValueError("word and LUT use different posit configurations")
    d = decode_b(word, 1, lut)
    orig = decode_b(word, 0)
    borrow = orig.f != 0 and d.m == -orig.m - 2
    return ReciprocalResult(d, encode(d.s, d.m, d.f << 3, word.config), borrow)


def reciprocal_array(bits: np.ndarray, lut: EcLut) -> dict[str, np.ndarray]:
    """Vectorized :func:`decode_b` with div=1. Returns s, m, f and sig arrays."""
    from .posit_core import decode_array

    config = lut.config
    n = config.n_bits
    fb = config.fb
    bits = np.asarray(bits, dtype=np.int64)
    s = (bits >> (n - 1)) & 1
    body_mask = (1 << (n - 1)) - 1
    body = bits & body_mask
    # s ^ div with div = 1: complement positive bodies only
    pre = np.where(s == 0, (-body) & body_mask, body)
    d = decode_array(pre, config)
    orig_f = (-d["f"]) & ((1 << fb) - 1)
    sig = (1 << fb) + d["f"] - lut.lookup(orig_f)
    borrow = sig < (1 << fb)
    sig = np.where(borrow, sig << 1, sig)
    m = d["m"] - borrow
    return {"s": s, "m": m, "f": sig - (1 << fb), "sig": sig,
            "chck": (body == 0).astype(np.int64), "borrow": borrow}


def rel_error_analytic(f, ec_applied, fb: int = 11):
    """Relative error (exact - approx)/exact of the corrected significand reciprocal."""
    return -f * (1 - f) / 2 + ec_applied * (1 + f) / 2 ** (fb + 1)


def nr_refine(x_est: int, d: int, iters: int, frac_bits: int) -> int:
    """Newton-Raphson X <- X (2 - D X) on fixed-point integers with ``frac_bits``.

    Raises ``ValueError`` if the estimate lies outside 0 < X*D < 2, where the
    iteration does not converge.
    """
    one = 1 << frac_bits
    if not 0 < x_est * d < 2 * one * one:
        raise ValueError("estimate outside the convergence region 0 < x*d < 2")
    x = x_est
    for _ in range(iters):
        dx = (d * x) >> frac_bits
        x = (x * (2 * one - dx)) >> frac_bits
    return x


def nr_refine_array(x_est: np.ndarray, d: np.ndarray, iters: int, frac_bits: int) -> np.ndarray:
    """Vectorized :func:`nr_refine`; operands must keep products under 2^63."""
    one = np.int64(1) << frac_bits
    prod = x_est * d
    if np.any((prod <= 0) | (prod >= 2 * one * one)):
        raise ValueError("estimate outside the convergence region 0 < x*d < 2")
    x = x_est
    for _ in range(iters):
        dx = (d * x) >> frac_bits
        x = (x * (2 * one - dx)) >> frac_bits
    return x
