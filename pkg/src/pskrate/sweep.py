"""Parameter sweeps: advantage-ratio level sets and constellation convergence tables.

Level-set grids follow the figure convention: axes are (n_s, n_t) at fixed
transmissivity, with the environment occupation back-derived as
n_b = n_t / (1 - eta).  Rows are emitted n_s-major in deterministic order,
floats are formatted with 17 significant digits, and masked cells are empty
with a single reason code per row, so output files are byte-identical
across runs with identical flags.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import bounds, fockstate, oracle
from .channel import make_params
from .errors import REASON_PRIORITY, DomainError, MaskedPointError

FLOAT_FMT = ".17g"

LEVELSET_COLUMNS = (
    "eta", "n_s", "n_t", "lemma1_valid", "nt_gt_eta",
    "ratio_psk", "ratio_optimal", "closed_form_rate",
    "holevo_numeric", "masked_reason",
)

CONVERGE_COLUMNS = (
    "ell", "holevo_psk", "gap_to_continuous",
    "fidelity_gap_bound", "trace_distance_bound", "continuity_penalty",
    "direct_fidelity_series", "direct_entropy_series",
)

# cmd_converge refuses jobs with cutoff * 2**ell_max beyond this.
CONVERGE_GUARD = 8192


def format_float(x: float) -> str:
    return format(x, FLOAT_FMT)


def log_space(lo: float, hi: float, count: int) -> list[float]:
    """count log-spaced points from lo to hi inclusive."""
    if count < 2:
        raise DomainError(f"grid needs at least 2 points per axis, got {count}")
    if not 0 < lo < hi:
        raise DomainError(f"grid range needs 0 < min < max, got ({lo}, {hi})")
    step = (math.log(hi) - math.log(lo)) / (count - 1)
    pts = [math.exp(math.log(lo) + i * step) for i in range(count)]
    pts[0], pts[-1] = lo, hi
    return pts


@dataclass(frozen=True)
class GridSpec:
    """Level-set sweep specification over (n_s, n_t) at fixed eta."""
    eta: float
    ns_range: tuple[float, float, int]
    nt_range: tuple[float, float, int]
    ell: int | None = 6  # None = continuous limit
    with_numeric: bool = False
    cutoff: int | None = None
    tail_tol: float = fockstate.DEFAULT_TAIL_TOL
    variant: str = "printed"

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise DomainError(f"level sets need 0 < eta < 1, got {self.eta}")
        for rng in (self.ns_range, self.nt_range):
            log_space(*rng)  # validates


def _first_reason(reasons: dict) -> str:
    present = set(reasons.values())
    for code in REASON_PRIORITY:
        if code in present:
            return code
    return ""


def _levelset_point(args) -> dict:
    spec, n_s, n_t = args
    n_b = n_t / (1.0 - spec.eta)
    params = make_params(spec.eta, n_s, n_b)
    report = bounds.bound_report(
        params, spec.ell, cutoff=spec.cutoff, tail_tol=spec.tail_tol,
        with_numeric=spec.with_numeric, variant=spec.variant)
    return {
        "eta": spec.eta,
        "n_s": n_s,
        "n_t": n_t,
        "lemma1_valid": report.lemma1_valid,
        "nt_gt_eta": report.nt_gt_eta,
        "ratio_psk": report.ratio_psk,
        "ratio_optimal": report.ratio_optimal,
        "closed_form_rate": report.closed_form_rate,
        "holevo_numeric": report.holevo_numeric_continuous,
        "masked_reason": _first_reason(report.masked_reasons),
    }


def levelset_rows(spec: GridSpec, workers: int = 1) -> list[dict]:
    """Evaluate the grid in n_s-major order; deterministic regardless of workers."""
    points = [(spec, n_s, n_t)
              for n_s in log_space(*spec.ns_range)
              for n_t in log_space(*spec.nt_range)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_levelset_point, points, chunksize=16))
    return [_levelset_point(p) for p in points]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_levelset_csv(rows: list[dict], fh) -> None:
    fh.write(",".join(LEVELSET_COLUMNS) + "\n")
    for row in rows:
        fh.write(",".join(_cell(row[c]) for c in LEVELSET_COLUMNS) + "\n")


def write_levelset_json(rows: list[dict], fh) -> None:
    fh.write(json.dumps(rows, indent=0, sort_keys=True))
    fh.write("\n")


def converge_table(params, ell_max: int, cutoff: int | None = None,
                   tail_tol: float = fockstate.DEFAULT_TAIL_TOL,
                   variant: str = "printed") -> list[dict]:
    """Per-ell convergence study: numerics, bounds and direct oracle series.

    Rows for ell = 0..ell_max; bound columns that are undefined at a row
    (trace distance at ell = 0, masked points) come back as None.
    """
    if ell_max > 8:
        raise DomainError(f"ell_max capped at 8, got {ell_max}")
    cut = fockstate.resolve_cutoff(params, cutoff, tail_tol)
    if cut * 2 ** ell_max > CONVERGE_GUARD:
        raise DomainError(
            f"cutoff * 2^ell_max = {cut * 2 ** ell_max} exceeds the guard {CONVERGE_GUARD}")
    chi_cont = fockstate.holevo_continuous(params, cut, tail_tol)
    rows = []
    for ell in range(ell_max + 1):
        row = {"ell": ell}
        row["holevo_psk"] = fockstate.holevo_psk(params, ell, cut, tail_tol)
        row["gap_to_continuous"] = chi_cont - row["holevo_psk"]
        try:
            row["fidelity_gap_bound"] = bounds.fidelity_gap_bound(params, ell).leading
        except MaskedPointError:
            row["fidelity_gap_bound"] = None
        try:
            row["trace_distance_bound"] = (bounds.trace_distance_bound(params, ell)
                                           if ell >= 1 else None)
        except MaskedPointError:
            row["trace_distance_bound"] = None
        try:
            row["continuity_penalty"] = bounds.continuity_penalty(params, ell, variant)
        except MaskedPointError:
            row["continuity_penalty"] = None
        row["direct_fidelity_series"] = oracle.direct_fidelity_series(
            params, ell, cut, tail_tol)
        row["direct_entropy_series"] = oracle.direct_entropy_series(
            params, ell, cut, tail_tol)
        rows.append(row)
    return rows


def write_converge_csv(rows: list[dict], fh) -> None:
    fh.write(",".join(CONVERGE_COLUMNS) + "\n")
    for row in rows:
        fh.write(",".join(_cell(row[c]) for c in CONVERGE_COLUMNS) + "\n")
