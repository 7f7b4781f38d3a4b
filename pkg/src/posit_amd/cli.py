"""posit-amd command line driver."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import analysis
from .muldiv_unit import DIV, MUL, execute
from .oracle import exact_div, exact_mul, ulp_distance
from .posit_core import PositConfig, PositWord, to_real
from .recip_approx import SAMPLING_RULES, build_ec_lut

EXIT_CHECK_FAILED = 2

# (lut bits) -> {metric: (lo, hi)} for reciprocal sweeps, percent
RECIP_LIMITS = {
    16: {0: {"mred": (8.3233, 8.3433)},
         5: {"mred": (0.33, 0.43), "med": (0.23, 0.31)},
         8: {"mred": (0.038, 0.050)}},
    32: {0: {"mred": (8.3033, 8.3633)},
         5: {"mred": (0.3632, 0.4232)},
         8: {"mred": (0.0188, 0.0788)}},
}
DIVIDE_MRED_BAND = 0.08
PACOGEN_MRED = (0.56, 0.66)
NR_MIN_REDUCTION = 100.0
DEFAULT_SAMPLES = 10**6


def _word(text: str, config: PositConfig) -> PositWord:
    try:
        bits = int(text, 16)
    except ValueError:
        raise ValueError(f"not a hex word: {text!r}") from None
    if bits >> config.n_bits:
        raise ValueError(f"{text} does not fit in {config.n_bits} bits")
    return PositWord(bits, config)


def _fmt_value(word: PositWord) -> str:
    v = to_real(word)
    return "NaR" if v is None else repr(float(v))


def _checks_for(cfg: analysis.SweepConfig, report) -> list[tuple[str, bool]]:
    if cfg.mode == "reciprocal":
        limits = RECIP_LIMITS.get(cfg.config.n_bits, {}).get(cfg.lut_msb_bits, {})
        return [(f"{name} in [{lo}, {hi}]", lo <= getattr(report, name) <= hi)
                for name, (lo, hi) in limits.items()]
    if cfg.mode == "multiply":
        return [("all ULP distances 0", report.exact_fraction == 1.0)]
    if cfg.mode == "divide":
        if cfg.divisors == "pow2":
            return [("all ULP distances 0", report.exact_fraction == 1.0)]
        samples = DEFAULT_SAMPLES if _too_big(cfg.config, "reciprocal") else None
        ref = analysis.sweep_reciprocal(replace(cfg, mode="reciprocal", samples=samples,
                                                divisors="any"))
        return [(f"|mred - {ref.mred:.4f}| <= {DIVIDE_MRED_BAND}",
                 abs(report.mred - ref.mred) <= DIVIDE_MRED_BAND)]
    return _nr_checks(report)


def _nr_checks(rows) -> list[tuple[str, bool]]:
    by_name = {r.method.split()[0] + r.method.split()[1]: r for r in rows}
    pac = by_name["pacogen2^8"]
    a5 = by_name["proposed2^5"]
    return [
        (f"pacogen seed mred in {list(PACOGEN_MRED)}",
         PACOGEN_MRED[0] <= pac.seed_mred <= PACOGEN_MRED[1]),
        (f"1 NR step reduces 2^5 seed mred >= {NR_MIN_REDUCTION:.0f}x",
         a5.reduction >= NR_MIN_REDUCTION),
    ]


def _report_checks(checks) -> int:
    failed = 0
    for name, ok in checks:
        print(f"check {'PASS' if ok else 'FAIL'}: {name}")
        failed += not ok
    return EXIT_CHECK_FAILED if failed else 0


def _print_report(cfg, report) -> None:
    if isinstance(report, list):
        print(analysis.nr_markdown(report), end="")
    else:
        label = analysis.lut_label(cfg.lut_msb_bits, cfg.config)
        print(analysis.table_markdown([(label, report)]), end="")
        hist = report.ulp_histogram
        if hist:
            worst = max(abs(k) for k in hist)
            print(f"\n{report.sweep_size} points, {100 * report.exact_fraction:.4f}% at ULP 0, "
                  f"max |ULP| {worst}")


def _too_big(config: PositConfig, mode: str, divisors: str = "any") -> bool:
    if mode in ("reciprocal", "nr_compare"):
        return 1 << config.fb > analysis.MAX_EXHAUSTIVE
    return divisors == "any" or config.n_bits > 16


def cmd_sweep(args) -> int:
    config = PositConfig(args.n)
    samples = args.samples
    if samples is None and _too_big(config, args.mode, args.divisors):
        samples = DEFAULT_SAMPLES
    cfg = analysis.SweepConfig(config, args.lut_bits, args.mode, samples, args.seed,
                               args.sampling, args.divisors, args.strict_nar, args.paper_round)
    report = analysis.run_sweep(cfg, args.workers)
    if args.out:
        analysis.emit_report(report, args.format, args.out,
                             analysis.lut_label(args.lut_bits, config))
    _print_report(cfg, report)
    return _report_checks(_checks_for(cfg, report)) if args.check else 0


def cmd_mul(args) -> int:
    config = PositConfig(args.n)
    a, b = _word(args.a, config), _word(args.b, config)
    out = execute(a, b, MUL, paper_round=args.paper_round)
    ref = exact_mul(a, b)
    print(f"result  0x{out.word.hex()}  {_fmt_value(out.word)}  excep={out.excep}")
    print(f"exact   0x{ref.hex()}  {_fmt_value(ref)}")
    return 0


def cmd_div(args) -> int:
    config = PositConfig(args.n)
    a, b = _word(args.a, config), _word(args.b, config)
    lut = analysis.SweepConfig(config, args.lut_bits, lut_sampling=args.sampling).lut()
    out = execute(a, b, DIV, lut, strict_nar=args.strict_nar, paper_round=args.paper_round)
    ref = exact_div(a, b)
    print(f"result  0x{out.word.hex()}  {_fmt_value(out.word)}  excep={out.excep}")
    print(f"exact   0x{ref.hex()}  {_fmt_value(ref)}")
    if not (out.word.is_nar or ref.is_nar):
        print(f"ulp     {ulp_distance(out.word, ref)}")
    return 0


def cmd_lut(args) -> int:
    lut = build_ec_lut(PositConfig(args.n), args.bits, args.sampling)
    text = lut.dumps()
    if args.dump:
        try:
            lut.dump(args.dump)
        except OSError as exc:
            print(f"error: cannot write {args.dump}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    print(f"{len(lut.entries)} entries x {lut.entry_width} bits = {lut.size_bytes:g} bytes",
          file=sys.stderr)
    return 0


def cmd_compare_nr(args) -> int:
    config = PositConfig(args.n)
    samples = args.samples
    if samples is None and _too_big(config, "nr_compare"):
        samples = DEFAULT_SAMPLES
    cfg = analysis.SweepConfig(config, mode="nr_compare", samples=samples,
                               seed=args.seed, lut_sampling=args.sampling)
    rows = analysis.compare_nr(cfg)
    if args.out:
        analysis.emit_report(rows, args.format, args.out)
    print(analysis.nr_markdown(rows), end="")
    return _report_checks(_nr_checks(rows)) if args.check else 0


def cmd_tables(args) -> int:
    config = PositConfig(args.n)
    samples = args.samples
    if samples is None and _too_big(config, "reciprocal"):
        samples = DEFAULT_SAMPLES
    rows = analysis.accuracy_tables(config, samples, args.sampling)
    text = analysis.table_markdown([(analysis.lut_label(b, config), r) for b, r in rows])
    if args.out:
        analysis._write(text, args.out)
    print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posit-amd",
                                     description="Approximate posit multiply-divide unit model")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n=True):
        if n:
            p.add_argument("--n", type=int, default=16, help="posit word size (ES is 2)")
        p.add_argument("--sampling", choices=SAMPLING_RULES, default="left",
                       help="LUT sample point within each address interval")

    p = sub.add_parser("sweep", help="error sweep over reciprocals or the datapath")
    common(p)
    p.add_argument("--lut-bits", type=int, default=5, help="LUT address bits (0 = no correction)")
    p.add_argument("--mode", choices=analysis.MODES, default="reciprocal")
    p.add_argument("--samples", type=int, default=None,
                   help="random sample count (default: exhaustive where feasible)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--divisors", choices=("any", "pow2"), default="any")
    p.add_argument("--strict-nar", action="store_true")
    p.add_argument("--paper-round", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--check", action="store_true", help="exit 2 if an accuracy threshold fails")
    p.set_defaults(func=cmd_sweep)

    for name, func in (("mul", cmd_mul), ("div", cmd_div)):
        p = sub.add_parser(name, help=f"{name}tiply" if name == "mul" else "approximate divide")
        p.add_argument("a")
        p.add_argument("b")
        common(p)
        p.add_argument("--paper-round", action="store_true",
                       help="round from the 13 computed product bits only")
        if name == "div":
            p.add_argument("--lut-bits", type=int, default=5)
            p.add_argument("--strict-nar", action="store_true", help="x/NaR gives NaR")
        p.set_defaults(func=func)

    p = sub.add_parser("lut", help="build and dump the error-correction table")
    common(p)
    p.add_argument("--bits", type=int, default=5)
    p.add_argument("--dump")
    p.set_defaults(func=cmd_lut)

    p = sub.add_parser("compare-nr", help="seed accuracy vs a PACoGen-style seed, with NR")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_compare_nr)

    p = sub.add_parser("tables", help="MED/MRED table for no LUT and 2^5..2^8 LUTs")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
