"""Command-line frontend.

Subcommands:
  rate      full bound report for one parameter point
  levelset  advantage-ratio grid sweep over (n_s, n_t) at fixed eta
  converge  per-constellation-size convergence table at one point
  verify    self-verification suite (quick | full)

Exit codes: 0 ok, 1 internal error, 2 masked point (rate), 64 usage,
73 unwritable output.  Values in files are always nats; --bits converts the
human-readable printout only.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import traceback

from . import bounds, sweep, verify
from .channel import make_params
from .errors import DomainError
from .sweep import format_float

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_MASKED = 2
EXIT_USAGE = 64
EXIT_IO = 73

# Report fields that are rates/entropies in nats (converted under --bits).
_RATE_FIELDS = {
    "continuity_penalty", "continuity_penalty_printed", "continuity_penalty_symmetrized",
    "continuity_penalty_proof_form", "mixed_entropy_lower_bound", "closed_form_rate",
    "psk_rate", "holevo_numeric_continuous", "holevo_numeric_psk", "c_ea", "c_classical",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(parser):
    parser.add_argument("--config", help="key=value file mirroring the long flags; flags win")
    parser.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                        help="emit JSON to PATH (default stdout)")
    parser.add_argument("--csv", metavar="PATH", help="write CSV to PATH")
    parser.add_argument("--cutoff", type=int, help="per-mode Fock cutoff override")
    parser.add_argument("--tail-tol", type=float, help="truncation tail tolerance (default 1e-12)")
    parser.add_argument("--p-poly-variant", choices=bounds.P_VARIANTS,
                        help="reading of the ambiguous penalty polynomials (default printed)")
    units = parser.add_mutually_exclusive_group()
    units.add_argument("--nats", dest="bits", action="store_false", default=None,
                       help="print rates in nats (default)")
    units.add_argument("--bits", dest="bits", action="store_true", default=None,
                       help="print rates in bits (files stay in nats)")


def build_parser() -> _Parser:
    parser = _Parser(prog="pskrate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    rate = sub.add_parser("rate", help="bound report for one parameter point")
    rate.add_argument("--eta", type=float, required=True)
    rate.add_argument("--ns", type=float, required=True)
    rate.add_argument("--nb", type=float, required=True)
    rate.add_argument("--ell", type=int, default=None,
                      help="constellation exponent (L = 2^ell); omit for continuous only")
    rate.add_argument("--no-numeric", action="store_true",
                      help="skip the truncated-state numerics")
    _add_common(rate)

    level = sub.add_parser("levelset", help="advantage-ratio grid sweep")
    level.add_argument("--eta", type=float, required=True)
    level.add_argument("--ns-min", type=float, required=True)
    level.add_argument("--ns-max", type=float, required=True)
    level.add_argument("--ns-count", type=int, required=True)
    level.add_argument("--nt-min", type=float, required=True)
    level.add_argument("--nt-max", type=float, required=True)
    level.add_argument("--nt-count", type=int, required=True)
    mode = level.add_mutually_exclusive_group()
    mode.add_argument("--ell", type=int, default=None,
                      help="constellation exponent (default 6)")
    mode.add_argument("--continuous", action="store_true",
                      help="rate the continuous limit instead of a finite constellation")
    level.add_argument("--with-numeric", action="store_true",
                       help="add the truncated-state Holevo column (slow)")
    level.add_argument("--workers", type=int, default=1)
    _add_common(level)

    conv = sub.add_parser("converge", help="constellation-size convergence table")
    conv.add_argument("--eta", type=float, required=True)
    conv.add_argument("--ns", type=float, required=True)
    conv.add_argument("--nb", type=float, required=True)
    conv.add_argument("--ell-max", type=int, default=4)
    _add_common(conv)

    ver = sub.add_parser("verify", help="run the self-verification suite")
    ver.add_argument("--level", choices=("quick", "full"), default="quick")
    _add_common(ver)
    return parser


def _parse_config_value(text: str):
    text = text.strip().strip('"').strip("'")
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def apply_config(args: argparse.Namespace) -> None:
    """Fill unset options from the key=value config file; flags always win."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"config line {lineno} is not key=value: {line!r}")
        key, value = line.split("=", 1)
        dest = key.strip().replace("-", "_")
        if not hasattr(args, dest):
            continue  # keys for other subcommands are ignored
        if getattr(args, dest) is None or getattr(args, dest) is False:
            setattr(args, dest, _parse_config_value(value))


def _display(value, bits: bool, is_rate: bool):
    if value is None:
        return None
    if bits and is_rate and isinstance(value, float):
        return value / math.log(2.0)
    return value


def _print_report(report: bounds.BoundReport, bits: bool) -> None:
    unit = "bits" if bits else "nats"
    print(f"# rate report (eta={report.eta}, n_s={report.n_s}, n_b={report.n_b}), {unit}")
    for name in bounds.REPORT_FIELDS:
        value = getattr(report, name)
        if name in report.masked_reasons and value is None:
            print(f"{name} = masked ({report.masked_reasons[name]})")
            continue
        if value is None or value == {} or name == "masked_reasons":
            continue
        value = _display(value, bits, name in _RATE_FIELDS)
        if isinstance(value, float):
            print(f"{name} = {format_float(value)}")
        else:
            print(f"{name} = {value}")


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def _emit_json(payload, target: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if target == "-":
        print(text)
    else:
        with _open_out(target) as fh:
            fh.write(text + "\n")


def cmd_rate(args) -> int:
    params = make_params(args.eta, args.ns, args.nb)
    report = bounds.bound_report(
        params, args.ell,
        cutoff=args.cutoff,
        tail_tol=args.tail_tol if args.tail_tol is not None else 1e-12,
        with_numeric=not args.no_numeric,
        variant=args.p_poly_variant or "printed")
    _print_report(report, bool(args.bits))
    if args.json:
        _emit_json(report.to_flat_dict(), args.json)
    if args.csv:
        with _open_out(args.csv) as fh:
            fh.write(",".join(bounds.REPORT_FIELDS) + "\n")
            fh.write(",".join(report.to_csv_row()) + "\n")
    if report.closed_form_rate is None:
        return EXIT_MASKED
    return EXIT_OK


def cmd_levelset(args) -> int:
    ell = None if args.continuous else (args.ell if args.ell is not None else 6)
    spec = sweep.GridSpec(
        eta=args.eta,
        ns_range=(args.ns_min, args.ns_max, args.ns_count),
        nt_range=(args.nt_min, args.nt_max, args.nt_count),
        ell=ell,
        with_numeric=args.with_numeric,
        cutoff=args.cutoff,
        tail_tol=args.tail_tol if args.tail_tol is not None else 1e-12,
        variant=args.p_poly_variant or "printed")
    rows = sweep.levelset_rows(spec, workers=max(1, args.workers))
    wrote = False
    if args.csv:
        with _open_out(args.csv) as fh:
            sweep.write_levelset_csv(rows, fh)
        wrote = True
    if args.json:
        if args.json == "-":
            sweep.write_levelset_json(rows, sys.stdout)
        else:
            with _open_out(args.json) as fh:
                sweep.write_levelset_json(rows, fh)
        wrote = True
    if not wrote:
        sweep.write_levelset_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_converge(args) -> int:
    params = make_params(args.eta, args.ns, args.nb)
    rows = sweep.converge_table(
        params, args.ell_max,
        cutoff=args.cutoff,
        tail_tol=args.tail_tol if args.tail_tol is not None else 1e-12,
        variant=args.p_poly_variant or "printed")
    scale = 1.0 / math.log(2.0) if args.bits else 1.0
    header = "  ".join(f"{c:>22s}" for c in sweep.CONVERGE_COLUMNS)
    print(header)
    for row in rows:
        cells = []
        for col in sweep.CONVERGE_COLUMNS:
            val = row[col]
            if val is None:
                cells.append(f"{'':>22s}")
            elif col == "ell":
                cells.append(f"{val:>22d}")
            else:
                shown = val * scale if col in ("holevo_psk", "gap_to_continuous",
                                               "continuity_penalty") else val
                cells.append(f"{shown:>22.15e}")
        print("  ".join(cells))
    if args.csv:
        with _open_out(args.csv) as fh:
            sweep.write_converge_csv(rows, fh)
    if args.json:
        _emit_json(rows, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks(args.level)
    for res in results:
        print(res.line())
    fails = sum(1 for r in results if r.status == verify.FAIL)
    warns = sum(1 for r in results if r.status == verify.WARN)
    print(f"# {len(results)} checks: {len(results) - fails - warns} pass, "
          f"{warns} warn, {fails} fail")
    return EXIT_OK if fails == 0 else EXIT_INTERNAL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        apply_config(args)
        if args.command == "rate":
            return cmd_rate(args)
        if args.command == "levelset":
            return cmd_levelset(args)
        if args.command == "converge":
            return cmd_converge(args)
        return cmd_verify(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
