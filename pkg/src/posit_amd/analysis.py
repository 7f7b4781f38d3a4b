"""Error sweeps over the approximate reciprocal and the full datapath.

Sweeps split the input space into fixed-size chunks. Each chunk draws its
random numbers from its own seeded generator and partial sums are combined in
chunk order, so a report depends only on the sweep configuration, never on
the number of worker threads.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .muldiv_unit import DIV, MUL, execute_array
from .oracle import (
    PositTable,
    exact_div,
    exact_mul,
    exact_reciprocal_array,
    pacogen_seed,
    ulp_distance_array,
)
from .posit_core import P16, PositConfig, PositWord, decode_array, encode_array
from .recip_approx import EcLut, build_ec_lut, null_lut, nr_refine_array, reciprocal_array

CHUNK = 1 << 18
MAX_EXHAUSTIVE = 1 << 26
MODES = ("reciprocal", "divide", "multiply", "nr_compare")


@dataclass(frozen=True)
class SweepConfig:
    config: PositConfig = P16
    lut_msb_bits: int = 5
    mode: str = "reciprocal"
    samples: int | None = None  # None: exhaustive
    seed: int = 0
    lut_sampling: str = "left"
    divisors: str = "any"  # "pow2": only divisors with a zero fraction
    strict_nar: bool = False
    paper_round: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.samples is None and self.cardinality() > MAX_EXHAUSTIVE:
            raise ValueError(f"exhaustive sweep of {self.cardinality()} points exceeds 2^26; "
                             "give a sample count")

    def cardinality(self) -> int:
        if self.mode in ("reciprocal", "nr_compare"):
            return 1 << self.config.fb
        if self.divisors == "pow2":
            return (1 << self.config.n_bits) * len(pow2_divisors(self.config))
        return (1 << self.config.n_bits) ** 2

    def lut(self) -> EcLut:
        if self.lut_msb_bits == 0:
            return null_lut(self.config)
        return build_ec_lut(self.config, self.lut_msb_bits, self.lut_sampling)


@dataclass
class ErrorReport:
    """Aggregate error metrics; med, mred, nmed and max_red are in percent."""

    med: float
    mred: float
    nmed: float
    max_red: float
    ulp_histogram: dict[int, int] = field(default_factory=dict)
    sweep_size: int = 0

    @property
    def exact_fraction(self) -> float:
        return self.ulp_histogram.get(0, 0) / self.sweep_size if self.sweep_size else 1.0


@dataclass
class _Partial:
    n: int = 0
    abs_err: float = 0.0
    rel_err: float = 0.0
    max_exact: float = 0.0
    max_rel: float = 0.0
    hist: Counter = field(default_factory=Counter)

    def add(self, exact: np.ndarray, approx: np.ndarray, ulps: np.ndarray):
        err = np.abs(exact - approx)
        mag = np.abs(exact)
        rel = np.divide(err, mag, out=np.zeros_like(err), where=mag > 0)
        self.n += exact.size
        self.abs_err += float(err.sum())
        self.rel_err += float(rel.sum())
        if exact.size:
            self.max_exact = max(self.max_exact, float(mag.max()))
            self.max_rel = max(self.max_rel, float(rel.max()))
        vals, counts = np.unique(ulps, return_counts=True)
        self.hist.update(dict(zip(vals.tolist(), counts.tolist())))


def _merge(parts: list[_Partial]) -> ErrorReport:
    total = _Partial()
    for p in parts:
        total.n += p.n
        total.abs_err += p.abs_err
        total.rel_err += p.rel_err
        total.max_exact = max(total.max_exact, p.max_exact)
        total.max_rel = max(total.max_rel, p.max_rel)
        total.hist.update(p.hist)
    if total.n == 0:
        return ErrorReport(0.0, 0.0, 0.0, 0.0, {}, 0)
    med = total.abs_err / total.n
    nmed = med / total.max_exact if total.max_exact else 0.0
    return ErrorReport(100 * med, 100 * total.rel_err / total.n, 100 * nmed,
                       100 * total.max_rel, dict(sorted(total.hist.items())), total.n)


def _run_chunks(fn, n_chunks: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _chunk_rng(seed: int, idx: int) -> np.random.Generator:
    return np.random.default_rng([seed, idx])


def _fractions(cfg: SweepConfig, idx: int) -> np.ndarray:
    fb = cfg.config.fb
    if cfg.samples is None:
        return np.arange(idx * CHUNK, min((idx + 1) * CHUNK, 1 << fb), dtype=np.int64)
    count = min(CHUNK, cfg.samples - idx * CHUNK)
    return _chunk_rng(cfg.seed, idx).integers(0, 1 << fb, count, dtype=np.int64)


def _n_chunks(cfg: SweepConfig) -> int:
    total = cfg.cardinality() if cfg.samples is None else cfg.samples
    return max(1, math.ceil(total / CHUNK))


def recip_significands(f: np.ndarray, lut: EcLut) -> tuple[np.ndarray, np.ndarray]:
    """Approximate reciprocal of 1 + f/2^FB (scale-0 inputs), unrounded, with the exact value."""
    config = lut.config
    fb = config.fb
    words = config.one | f
    rec = reciprocal_array(words, lut)
    approx = rec["sig"] * np.exp2(rec["m"] - fb)
    exact = (1 << fb) / ((1 << fb) + f).astype(np.float64)
    return exact, approx


def sweep_reciprocal(cfg: SweepConfig, workers: int = 1) -> ErrorReport:
    """Reciprocal of every significand in [1, 2) (scale fixed at 0).

    Value metrics use the unrounded corrected reciprocal that the multiplier
    consumes; the ULP histogram compares the rounded standalone reciprocal
    word with the correctly rounded 1/x.
    """
    lut = cfg.lut()
    config = cfg.config

    def chunk(idx):
        f = _fractions(cfg, idx)
        part = _Partial()
        exact, approx = recip_significands(f, lut)
        rec = reciprocal_array(config.one | f, lut)
        word = encode_array(rec["s"], rec["m"], rec["f"] << 2, config, ext_bits=2)
        ulps = ulp_distance_array(word, exact_reciprocal_array(config.one | f, config), config)
        part.add(exact, approx, ulps)
        return part

    return _merge(_run_chunks(chunk, _n_chunks(cfg), workers))


def sample_words(rng: np.random.Generator, count: int, config: PositConfig) -> np.ndarray:
    """Uniform non-exception patterns (zero and NaR excluded)."""
    u = rng.integers(1, config.mask, count, dtype=np.int64)
    return np.where(u >= config.nar, u + 1, u)


@lru_cache(maxsize=None)
def pow2_divisors(config: PositConfig) -> np.ndarray:
    words = np.arange(1 << config.n_bits, dtype=np.int64)
    d = decode_array(words, config)
    return words[(d["chck"] == 0) & (d["f"] == 0)]


def _pairs(cfg: SweepConfig, idx: int) -> tuple[np.ndarray, np.ndarray]:
    config = cfg.config
    pool = pow2_divisors(config) if cfg.divisors == "pow2" else None
    if cfg.samples is None:
        flat = np.arange(idx * CHUNK, min((idx + 1) * CHUNK, cfg.cardinality()), dtype=np.int64)
        if pool is None:
            a, b = flat >> config.n_bits, flat & config.mask
        else:
            a, b = flat // len(pool), pool[flat % len(pool)]
        keep = (a != 0) & (a != config.nar) & (b != 0) & (b != config.nar)
        return a[keep], b[keep]
    rng = _chunk_rng(cfg.seed, idx)
    count = min(CHUNK, cfg.samples - idx * CHUNK)
    a = sample_words(rng, count, config)
    b = sample_words(rng, count, config)
    if pool is not None:
        b = pool[b % len(pool)]
    return a, b


def _reference(a, b, divide: bool, config: PositConfig) -> np.ndarray:
    if config.n_bits <= 16:
        table = PositTable.get(config)
        return table.div(a, b) if divide else table.mul(a, b)
    op = exact_div if divide else exact_mul
    return np.array([op(PositWord(int(x), config), PositWord(int(y), config)).bits
                     for x, y in zip(a, b)], dtype=np.int64)


def _word_values(bits: np.ndarray, config: PositConfig) -> np.ndarray:
    if config.n_bits <= 16:
        return PositTable.get(config).word_values(bits)
    d = decode_array(bits, config)
    v = ((1 << config.fb) | d["f"]) * np.exp2(d["m"] - config.fb)
    return np.where(d["s"] == 1, -v, v) * (d["chck"] == 0)


def sweep_divide(cfg: SweepConfig, workers: int = 1) -> ErrorReport:
    """Datapath (divide or multiply mode) against the correctly rounded result."""
    if cfg.mode not in ("divide", "multiply"):
        raise ValueError("sweep_divide handles the divide and multiply modes")
    config = cfg.config
    divide = cfg.mode == "divide"
    lut = cfg.lut() if divide else None

    def chunk(idx):
        a, b = _pairs(cfg, idx)
        got = execute_array(a, b, DIV if divide else MUL, config, lut,
                            cfg.strict_nar, cfg.paper_round)
        ref = _reference(a, b, divide, config)
        part = _Partial()
        part.add(_word_values(ref, config), _word_values(got, config),
                 ulp_distance_array(got, ref, config))
        return part

    return _merge(_run_chunks(chunk, _n_chunks(cfg), workers))


def run_sweep(cfg: SweepConfig, workers: int = 1):
    if cfg.mode == "reciprocal":
        return sweep_reciprocal(cfg, workers)
    if cfg.mode == "nr_compare":
        return compare_nr(cfg)
    return sweep_divide(cfg, workers)


# -- Newton-Raphson comparison ----------------------------------------------

@dataclass
class NrRow:
    method: str
    seed_mred: float
    nr1_mred: float

    @property
    def reduction(self) -> float:
        return self.seed_mred / self.nr1_mred if self.nr1_mred else math.inf


def _mred(exact: np.ndarray, approx: np.ndarray) -> float:
    return float(100 * np.mean(np.abs(exact - approx) / exact))


def _nr_row(method: str, f: np.ndarray, seed: np.ndarray, seed_bits: int, fb: int) -> NrRow:
    wf = 2 * fb + 2
    exact = (1 << fb) / ((1 << fb) + f).astype(np.float64)
    x0 = seed << (wf - seed_bits)
    d = ((1 << fb) | f) << (wf - fb)
    x1 = nr_refine_array(x0, d, 1, wf)
    return NrRow(method, _mred(exact, x0 / 2.0 ** wf), _mred(exact, x1 / 2.0 ** wf))


def compare_nr(cfg: SweepConfig) -> list[NrRow]:
    """Seed and one-iteration MRED for the proposed LUT seeds and a PACoGen-style seed."""
    config = cfg.config
    fb = config.fb
    if cfg.samples is None:
        f = np.arange(1 << fb, dtype=np.int64)
    else:
        f = _chunk_rng(cfg.seed, 0).integers(0, 1 << fb, cfg.samples, dtype=np.int64)
    rows = []
    for bits in (5, 8):
        lut = build_ec_lut(config, bits, cfg.lut_sampling)
        rec = reciprocal_array(config.one | f, lut)
        # seed as fixed point with fb + 2 fraction bits (m is -1 or -2)
        seed = rec["sig"] << (2 + rec["m"])
        rows.append(_nr_row(f"proposed 2^{bits} x {lut.entry_width}", f, seed, fb + 2, fb))
    seed, sbits = pacogen_seed(f, fb)
    rows.append(_nr_row("pacogen 2^8 x 9", f, seed, sbits, fb))
    return rows


# -- report output ----------------------------------------------------------

def report_rows(report: ErrorReport) -> list[tuple[str, str, str]]:
    rows = [("med", repr(report.med), "%"), ("mred", repr(report.mred), "%"),
            ("nmed", repr(report.nmed), "%"), ("max_red", repr(report.max_red), "%")]
    hist = report.ulp_histogram or {0: 0}
    rows += [(f"ulp_{k}", str(v), "#") for k, v in sorted(hist.items())]
    return rows


def report_csv(report: ErrorReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value", "unit"])
    writer.writerows(report_rows(report))
    return buf.getvalue()


def parse_report_csv(text: str) -> ErrorReport:
    reader = csv.DictReader(io.StringIO(text))
    values: dict[str, float] = {}
    hist: dict[int, int] = {}
    for row in reader:
        name = row["metric"]
        if name.startswith("ulp_"):
            count = int(row["value"])
            if count:
                hist[int(name[4:])] = count
        else:
            values[name] = float(row["value"])
    return ErrorReport(values["med"], values["mred"], values["nmed"], values["max_red"],
                       hist, sum(hist.values()))


def lut_label(bits: int, config: PositConfig = P16) -> str:
    return "no LUT" if bits == 0 else f"2^{bits} x {config.fb - 2}"


def table_markdown(rows: list[tuple[str, ErrorReport]]) -> str:
    """MED/MRED/NMED table, one row per LUT size."""
    lines = ["| LUT Size | MED (%) | MRED (%) | NMED (10^-3) |",
             "|---|---|---|---|"]
    for label, r in rows:
        lines.append(f"| {label} | {r.med:.4f} | {r.mred:.4f} | {r.nmed * 10:.4f} |")
    return "\n".join(lines) + "\n"


def report_markdown(report: ErrorReport, label: str = "sweep") -> str:
    text = table_markdown([(label, report)])
    if report.ulp_histogram:
        text += "\n| ULP distance | count |\n|---|---|\n"
        text += "".join(f"| {k} | {v} |\n" for k, v in sorted(report.ulp_histogram.items()))
    return text


def nr_markdown(rows: list[NrRow]) -> str:
    lines = ["| Seed | MRED seed (%) | MRED after 1 NR (%) | reduction |", "|---|---|---|---|"]
    lines += [f"| {r.method} | {r.seed_mred:.4f} | {r.nr1_mred:.6f} | {r.reduction:.0f}x |"
              for r in rows]
    return "\n".join(lines) + "\n"


def nr_csv(rows: list[NrRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "seed_mred", "nr1_mred", "unit"])
    writer.writerows([(r.method, repr(r.seed_mred), repr(r.nr1_mred), "%") for r in rows])
    return buf.getvalue()


def _write(text: str, path) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def emit_report(report, fmt: str, path, label: str = "sweep") -> None:
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(report, list):
        text = nr_csv(report) if fmt == "csv" else nr_markdown(report)
    else:
        text = report_csv(report) if fmt == "csv" else report_markdown(report, label)
    _write(text, path)


def accuracy_tables(config: PositConfig = P16, samples: int | None = None,
                    lut_sampling: str = "left") -> list[tuple[int, ErrorReport]]:
    """Reciprocal sweeps for no correction and 2^5..2^8 tables."""
    base = SweepConfig(config, 0, "reciprocal", samples, lut_sampling=lut_sampling)
    return [(bits, sweep_reciprocal(replace(base, lut_msb_bits=bits))) for bits in (0, 5, 6, 7, 8)]
