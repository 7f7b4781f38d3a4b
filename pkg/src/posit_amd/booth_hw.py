"""Bit-accurate model of the radix-8 Booth significand multiplier.

Every function here uses only shifts, masks and integer arithmetic, so the
same code runs on Python ints (golden model) and on numpy int64 arrays
(exhaustive sweeps). Default widths are the <16,2> datapath: 12-bit
significands, 24-bit product, 13 computed MSBs.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

SIG_WIDTH = 12


def _mask(cond):
    """All-ones where ``cond`` holds, 0 elsewhere (int or array)."""
    return -(cond * 1)


def twos_complement_block(a, sel, width: int):
    """Ripple 2's complement: bits up to the lowest set bit pass, the rest invert.

    C_i goes high once any input bit below position i is 1; A_i flips only
    when ``sel`` and C_(i-1) are both high.
    """
    out = 0
    seen = 0
    for i in range(width):
        bit = (a >> i) & 1
        out = out | ((bit ^ (seen & sel)) << i)
        seen = seen | bit
    return out


@dataclass
class PartialProductArray:
    rows: list[Any]
    width: int = SIG_WIDTH

    @property
    def product_width(self) -> int:
        return 2 * self.width

    def total(self):
        return sum(self.rows) & ((1 << self.product_width) - 1)


def n_rows(width: int = SIG_WIDTH) -> int:
    return width // 3 + 1


def booth_digits(multiplier, width: int = SIG_WIDTH):
    """Radix-8 recoding of the zero-extended multiplier as (neg, magnitude) pairs."""
    digits = []
    prev = 0
    for i in range(n_rows(width)):
        b0 = (multiplier >> (3 * i)) & 1
        b1 = (multiplier >> (3 * i + 1)) & 1
        b2 = (multiplier >> (3 * i + 2)) & 1
        t = 2 * b1 + b0 + prev
        digits.append((b2, t + b2 * (4 - 2 * t)))
        prev = b2
    return digits


def ppg_radix8(multiplicand, multiplier, width: int = SIG_WIDTH) -> PartialProductArray:
    pw = 2 * width
    m1 = multiplicand
    m2 = multiplicand << 1
    m3 = multiplicand + m2
    m4 = multiplicand << 2
    rows = []
    for i, (neg, mag) in enumerate(booth_digits(multiplier, width)):
        pp = ((m1 & _mask(mag == 1)) | (m2 & _mask(mag == 2))
              | (m3 & _mask(mag == 3)) | (m4 & _mask(mag == 4)))
        pp = twos_complement_block(pp, neg, pw - 3 * i)
        rows.append((pp << (3 * i)) & ((1 << pw) - 1))
    return PartialProductArray(rows, width)


def _csa(x, y, z, pmask: int):
    return x ^ y ^ z, (((x & y) | (y & z) | (x & z)) << 1) & pmask


def ppr_reduce(array: PartialProductArray):
    """Carry-save reduction of all rows down to two addends (S, C)."""
    pmask = (1 << array.product_width) - 1
    rows = list(array.rows)
    while len(rows) > 2:
        s, c = _csa(rows[0], rows[1], rows[2], pmask)
        rows = rows[3:] + [s, c]
    while len(rows) < 2:
        rows.append(0)
    return rows[0], rows[1]


@dataclass
class BoothProduct:
    top: Any
    sticky: Any
    full: Any
    width: int = SIG_WIDTH

    @property
    def top13(self):
        return self.top


def final_add_split(s, c, width: int = SIG_WIDTH) -> BoothProduct:
    """Add only the top ``width + 1`` columns, taking the carry in from the low part.

    The low ``width - 1`` columns feed a carry generator and a sticky OR;
    they are never summed into the result.
    """
    low_w = width - 1
    low_mask = (1 << low_w) - 1
    top_mask = (1 << (width + 1)) - 1
    low_sum = (s & low_mask) + (c & low_mask)
    carry = low_sum >> low_w
    top = ((s >> low_w) + (c >> low_w) + carry) & top_mask
    sticky = ((low_sum & low_mask) != 0) * 1
    full = (s + c) & ((1 << 2 * width) - 1)
    return BoothProduct(top, sticky, full, width)


def booth_multiply(a, b, width: int = SIG_WIDTH) -> BoothProduct:
    return final_add_split(*ppr_reduce(ppg_radix8(a, b, width)), width)


def _rne(val, sticky, drop: int):
    kept = val >> drop
    guard = (val >> (drop - 1)) & 1
    rest = ((val & ((1 << (drop - 1)) - 1)) != 0) * 1 | sticky
    return kept + (guard & (rest | (kept & 1)))


def rne_full(full, drop: int):
    """Round-to-nearest-even of ``full`` with ``drop`` LSBs removed."""
    return _rne(full, 0, drop)


def rne_top13(product: BoothProduct):
    """Same rounding as ``rne_full(full, width)`` but from (top13, sticky) only."""
    return _rne(product.top, product.sticky, 1)


def exhaustive_check(width: int = SIG_WIDTH, chunk: int = 256, workers: int = 1):
    """Sweep every (a, b) pair; return counts of product and rounding mismatches.

    The multiplicand range is split into ``chunk``-wide blocks handed to a
    thread pool; the counts are plain sums, so the result does not depend on
    ``workers``.
    """
    n = 1 << width
    b = np.arange(n, dtype=np.int64)[None, :]

    def block(start):
        a = np.arange(start, min(start + chunk, n), dtype=np.int64)[:, None]
        p = booth_multiply(a, b, width)
        exact = a * b
        return (int(np.count_nonzero(p.full != exact)),
                int(np.count_nonzero(p.top != exact >> (width - 1))),
                int(np.count_nonzero(rne_top13(p) != rne_full(exact, width))))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(block, range(0, n, chunk)))
    bad_full, bad_split, bad_round = (sum(col) for col in zip(*parts))
    return {"full": bad_full, "top": bad_split, "round": bad_round, "pairs": n * n}
