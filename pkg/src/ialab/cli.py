"""Command-line surface: single-instance reports, sweeps, CSV + plot emission.

Subcommands: ``ldm`` (bit-level instance), ``gauss`` (Gaussian instance),
``sweep`` (CSV over an alpha grid plus a gnuplot script), ``example`` (the
worked symmetric instance), ``linksim`` (Monte Carlo demonstrator).

Exit codes: 0 success, 2 invalid parameters, 3 I/O failure.  Powers accept
``2^k`` literals and exponents accept ``a/b`` fractions, so sweep fixtures
stay exact.  ``IALAB_SEED`` provides the default Monte Carlo seed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .gauss import (
    GapReport,
    GaussParams,
    build_allocation,
    gap_report,
    linksim_run,
    section4_example,
)
from .ldm import LdmConfig, Model, RegimeError, end_to_end_check, receivers, \
    incoming_gains, verify_decodable
from .oracle import solve
from .rates import achievable_sum_rate, upper_bound

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


def parse_power(text: str) -> float:
    """Linear power from ``2^k``, an integer, or a float literal."""
    s = text.strip()
    if "^" in s:
        base, _, exp = s.partition("^")
        return float(int(base) ** int(exp))
    return float(s)


def parse_fraction(text: str) -> float:
    """Exponent from ``a/b`` or a float literal (keeps 7/8 exact)."""
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        return float(num) / float(den)
    return float(s)


def _fmt(x: float) -> str:
    """Six significant digits, locale-independent."""
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


def _fmt_bits(x: float) -> str:
    """Integers render bare; half-integers and reals keep their fraction."""
    if float(x).is_integer():
        return str(int(x))
    return f"{x:g}"


def _load_config_file(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _default_seed() -> int:
    raw = os.environ.get("IALAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


# ---------------------------------------------------------------------------
# ldm subcommand
# ---------------------------------------------------------------------------

def _render_scheme(scheme) -> List[str]:
    """One row per receiver height, top down, with the bits landing there."""
    cfg = scheme.config
    lines: List[str] = []
    for rx in receivers(cfg):
        cell, user = rx
        label = f"rx{cell}" if user == 0 else f"rx{cell}.{user}"
        gains = dict(incoming_gains(cfg, rx))
        top = max(gains.values(), default=0)
        by_height: Dict[int, List[str]] = {}
        for msg, gain in incoming_gains(cfg, rx):
            for p in scheme.positions(msg):
                h = gain - p + 1
                if h >= 1:
                    by_height.setdefault(h, []).append(f"{msg[0]}{msg[1]}@p{p}")
        lines.append(f"{label} (heights {top}..1)")
        for h in range(top, 0, -1):
            entries = by_height.get(h, [])
            body = " + ".join(entries) if entries else "."
            lines.append(f"  {h:>3} | {body}")
    return lines


def cmd_ldm(args) -> int:
    cfg = LdmConfig(Model(args.model), args.n11, args.n12, args.n21, args.n22,
                    args.m1, args.m2)
    probs = cfg.problems()
    if probs:
        print("invalid config: " + "; ".join(probs), file=sys.stderr)
        return EXIT_INVALID
    report = achievable_sum_rate(cfg)
    out = [f"upper={_fmt_bits(report.upper_bound)}", f"achievable={report.achievable}"]
    if args.oracle:
        res = solve(cfg)
        out.append(f"oracle={res.optimum}")
        if not res.exact:
            out.append("(node budget exhausted; oracle value is a lower bound)")
    print(" ".join(out))
    print(f"delta1={report.delta1} delta2={report.delta2} "
          f"phi1={report.phi1} phi2={report.phi2}")
    for line in _render_scheme(report.scheme):
        print(line)
    if args.verify:
        ok = end_to_end_check(report.scheme, args.verify, seed=args.seed)
        print(f"end_to_end({args.verify} trials): {'ok' if ok else 'FAILED'}")
        if not ok:
            return 1
    return EXIT_OK


# ---------------------------------------------------------------------------
# gauss subcommand
# ---------------------------------------------------------------------------

def _print_gap_report(rep: GapReport) -> None:
    cfg = rep.induced
    rows = [
        ("p1", _fmt(rep.params.p1)),
        ("p2", _fmt(rep.params.p2)),
        ("alpha1", _fmt(rep.params.alpha1)),
        ("alpha2", _fmt(rep.params.alpha2)),
        ("beta1", _fmt(rep.params.beta1)),
        ("beta2", _fmt(rep.params.beta2)),
        ("induced_n", f"({cfg.n11},{cfg.n12},{cfg.n21},{cfg.n22})"),
        ("induced_m", f"({cfg.m1},{cfg.m2})"),
        ("ldm_upper", _fmt_bits(rep.ldm_upper)),
        ("ldm_achievable", str(rep.ldm_achievable)),
        ("gauss_theorem1", _fmt(rep.gauss_lower)),
        ("allocation_sum", _fmt(rep.allocation_sum)),
        ("gap", _fmt(rep.gap)),
        ("gap_budget", _fmt(rep.gap_budget)),
        ("within_budget", "yes" if rep.gap <= rep.gap_budget else "NO"),
    ]
    if rep.gdof is not None:
        rows.append(("gdof", _fmt(rep.gdof)))
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}} = {value}")
    print("allocation (cell, level, role, multiplicity, rate):")
    for alloc in rep.allocations:
        for layer in alloc.layers:
            print(f"  cell{alloc.cell} l={layer.level} {layer.role:<11} "
                  f"x{layer.multiplicity} rate={_fmt(layer.rate)}")


def cmd_gauss(args) -> int:
    params = GaussParams(Model(args.model), args.p1, args.p2,
                         args.alpha1, args.alpha2, args.beta1, args.beta2)
    probs = params.problems()
    if probs:
        print("invalid parameters: " + "; ".join(probs), file=sys.stderr)
        return EXIT_INVALID
    _print_gap_report(gap_report(params))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep subcommand
# ---------------------------------------------------------------------------

CSV_HEADER = ("alpha,p,ldm_upper,ldm_achievable,gauss_theorem1,allocation_sum,"
              "gap,gap_budget,gdof_upper,gdof_achievable")


def _sweep_row(model: Model, alpha: float, p: float, beta1: float, beta2: float) -> str:
    params = GaussParams(model, p, p, alpha, alpha, beta1, beta2)
    rep = gap_report(params)
    lp = math.log2(p)
    cells = [
        _fmt(alpha), _fmt(p), _fmt_bits(rep.ldm_upper), str(rep.ldm_achievable),
        _fmt(rep.gauss_lower), _fmt(rep.allocation_sum), _fmt(rep.gap),
        _fmt(rep.gap_budget), _fmt(rep.ldm_upper / lp), _fmt(rep.gauss_lower / lp),
    ]
    return ",".join(cells)


def _gnuplot_script(csv_path: str, powers: Sequence[float]) -> str:
    lines = [
        "set datafile separator ','",
        "set key outside",
        "set xlabel 'alpha'",
        "set ylabel 'GDoF'",
        f"csv = '{os.path.basename(csv_path)}'",
    ]
    plots = []
    for p in powers:
        tag = _fmt(p)
        plots.append(f"csv using (column(2)=={tag}?column(1):1/0):9 "
                     f"with lines title 'upper P={tag}'")
        plots.append(f"csv using (column(2)=={tag}?column(1):1/0):10 "
                     f"with linespoints title 'achievable P={tag}'")
    lines.append("plot \\")
    lines.append(", \\\n".join("    " + s for s in plots))
    lines.append("pause -1")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    model = Model(args.model)
    beta1 = args.beta1 if args.beta1 is not None else args.beta
    beta2 = args.beta2 if args.beta2 is not None else args.beta
    if beta1 is None or beta2 is None:
        print("invalid parameters: --beta (or --beta1/--beta2) required", file=sys.stderr)
        return EXIT_INVALID
    if args.alpha_steps < 2:
        print("invalid parameters: --alpha-steps must be >= 2", file=sys.stderr)
        return EXIT_INVALID
    powers = args.p or [parse_power("2^40")]
    lo, hi = args.alpha_lo, args.alpha_hi
    if not (0.0 <= lo <= hi):
        print("invalid parameters: bad alpha range", file=sys.stderr)
        return EXIT_INVALID
    alphas = [lo + (hi - lo) * k / (args.alpha_steps - 1) for k in range(args.alpha_steps)]
    # Clip at the regime edge instead of failing the whole sweep.
    alphas = [a for a in alphas if a <= 0.5 and a < min(beta1, beta2)]
    grid = [(a, p) for a in alphas for p in powers]
    for a, p in grid:
        params = GaussParams(model, p, p, a, a, beta1, beta2)
        probs = params.problems()
        if probs:
            print("invalid parameters: " + "; ".join(probs), file=sys.stderr)
            return EXIT_INVALID
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        rows = list(pool.map(lambda ap: _sweep_row(model, ap[0], ap[1], beta1, beta2), grid))
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in rows:
                fh.write(row + "\n")
        with open(args.out + ".gp", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_gnuplot_script(args.out, powers))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {args.out} (plot script: {args.out}.gp)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# example subcommand
# ---------------------------------------------------------------------------

def cmd_example(args) -> int:
    powers = args.p or [parse_power("2^40")]
    for p in powers:
        rec = section4_example(p)
        verdict = "PASS" if rec.passes else "FAIL"
        print(f"P={_fmt(p)} r1={_fmt(rec.r1)} r2={_fmt(rec.r2)} r3={_fmt(rec.r3)} "
              f"r4={_fmt(rec.r4)} sum={_fmt(rec.sum_rate)} floor={_fmt(rec.bound_rhs)} "
              f"{verdict}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# linksim subcommand
# ---------------------------------------------------------------------------

def cmd_linksim(args) -> int:
    if args.margin <= 0:
        print("invalid parameters: margin must be positive", file=sys.stderr)
        return EXIT_INVALID
    params = GaussParams(Model(args.model), args.p, args.p, args.alpha, args.alpha,
                         args.beta, args.beta)
    probs = params.problems()
    if probs:
        print("invalid parameters: " + "; ".join(probs), file=sys.stderr)
        return EXIT_INVALID
    alloc = build_allocation(params, 1)
    rep = linksim_run(params, alloc, args.margin, args.trials, seed=args.seed,
                      noise_scale=args.noise_scale)
    print("level mult points sim_bits error_rate")
    for layer in rep.layers:
        print(f"{layer.level:>5} {layer.multiplicity:>4} {layer.points:>6} "
              f"{_fmt(layer.sim_bits):>8} {_fmt(layer.error_rate)}")
    for level in rep.skipped_levels:
        print(f"{level:>5} skipped (under 1 bit at this margin)")
    print(f"max_error_rate={_fmt(rep.max_error_rate)} "
          f"aligned_success_rate={_fmt(rep.aligned_success_rate)} "
          f"trials={rep.trials}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ialab", description=__doc__)
    parser.add_argument("--config", help="key = value file overriding flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ldm = sub.add_parser("ldm", help="bit-level instance: bounds, scheme, oracle")
    p_ldm.add_argument("--model", choices=["imac", "ibc"], default="imac")
    for flag in ("n11", "n12", "n21", "n22", "m1", "m2"):
        p_ldm.add_argument(f"--{flag}", type=int, required=True)
    p_ldm.add_argument("--oracle", action="store_true", help="run the exact search")
    p_ldm.add_argument("--verify", type=int, default=0, metavar="N",
                       help="end-to-end check over N random payloads")
    p_ldm.add_argument("--seed", type=int, default=_default_seed())
    p_ldm.set_defaults(func=cmd_ldm)

    p_gauss = sub.add_parser("gauss", help="Gaussian instance: rates, gap, allocation")
    p_gauss.add_argument("--model", choices=["imac", "ibc"], default="imac")
    p_gauss.add_argument("--p1", type=parse_power, required=True)
    p_gauss.add_argument("--p2", type=parse_power, required=True)
    p_gauss.add_argument("--alpha1", type=parse_fraction, required=True)
    p_gauss.add_argument("--alpha2", type=parse_fraction, required=True)
    p_gauss.add_argument("--beta1", type=parse_fraction, required=True)
    p_gauss.add_argument("--beta2", type=parse_fraction, required=True)
    p_gauss.set_defaults(func=cmd_gauss)

    p_sweep = sub.add_parser("sweep", help="alpha/P grid to CSV + gnuplot script")
    p_sweep.add_argument("--model", choices=["imac", "ibc"], default="imac")
    p_sweep.add_argument("--beta", type=parse_fraction, default=None)
    p_sweep.add_argument("--beta1", type=parse_fraction, default=None)
    p_sweep.add_argument("--beta2", type=parse_fraction, default=None)
    p_sweep.add_argument("--alpha-lo", type=parse_fraction, default=0.0)
    p_sweep.add_argument("--alpha-hi", type=parse_fraction, default=0.5)
    p_sweep.add_argument("--alpha-steps", type=int, default=11)
    p_sweep.add_argument("--p", type=parse_power, action="append",
                         help="repeatable; accepts 2^k literals")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ex = sub.add_parser("example", help="worked symmetric instance per power")
    p_ex.add_argument("--p", type=parse_power, action="append")
    p_ex.set_defaults(func=cmd_example)

    p_sim = sub.add_parser("linksim", help="seeded scalar-constellation Monte Carlo")
    p_sim.add_argument("--model", choices=["imac", "ibc"], default="imac")
    p_sim.add_argument("--p", type=parse_power, required=True)
    p_sim.add_argument("--alpha", type=parse_fraction, required=True)
    p_sim.add_argument("--beta", type=parse_fraction, required=True)
    p_sim.add_argument("--margin", type=float, required=True)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=_default_seed())
    p_sim.add_argument("--noise-scale", type=float, default=1.0)
    p_sim.set_defaults(func=cmd_linksim)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: List[str]) -> Optional[List[str]]:
    """Translate --config entries into leading defaults for the subcommand."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a path")
    path = argv[idx + 1]
    values = _load_config_file(path)
    rest = argv[:idx] + argv[idx + 2:]
    if not rest:
        raise ValueError("--config given without a subcommand")
    command, tail = rest[0], rest[1:]
    injected: List[str] = []
    present = {t.split("=", 1)[0].lstrip("-").replace("-", "_")
               for t in tail if t.startswith("--")}
    for key, value in values.items():
        if key in present:
            continue  # explicit flags win
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            injected.append(flag)
        else:
            injected.extend([flag, value])
    return [command] + injected + tail


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except RegimeError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
