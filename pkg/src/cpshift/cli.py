"""``cpshift`` command line: verify, phi-decay, entropy, ergodic, recurrence.

Every command reads a JSON config, writes CSV files into the output
directory and is deterministic given (config, seed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence

from .chain import make_rng, sample_state
from .config import ExperimentConfig
from .diagnostics import (
    phi0_sample_stats,
    phi_n,
    phi_trace,
    record_minima,
    recurrence_scan,
    shannon_entropy,
    PhiRecord,
)
from .ergodic import discrete_series, functional
from .errors import BudgetExceeded, CPShiftError, ConfigError
from .extension import theta
from .suites import DETERMINISTIC_FLAG, SuiteParams, run_suites
from .translation import ensure_window, with_retries

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
MC_STREAM = 2**32


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return f"{x + 0.0:.17g}"  # + 0.0 turns -0.0 into 0.0
    return str(x)


def write_csv(path: Path, cfg: ExperimentConfig, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    buf.write(f"# config_sha256={cfg.sha256()} seed={cfg.seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def run_trajectories(fn: Callable[[dict, int], list], cfg: ExperimentConfig, workers: int) -> List[list]:
    """Per-trajectory rows in trajectory order, whatever the completion order."""
    data = json.loads(cfg.to_json())
    ids = range(cfg.trajectories)
    if workers <= 1:
        return [fn(data, t) for t in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(fn, data), ids))


def _error_row(t: int, width: int, exc: Exception) -> list:
    return [t] + [""] * (width - 2) + [f"{type(exc).__name__}: {exc}"]


# ---------------------------------------------------------------------------
# per-trajectory work (module level so worker processes can pickle it)
# ---------------------------------------------------------------------------


def _phi_rows(data: dict, t: int) -> list:
    cfg = ExperimentConfig.from_dict(data)
    try:
        s = sample_state(cfg.chain_system(), cfg.depth + 2, make_rng(cfg.seed, t))
        trace = phi_trace(s, cfg.depth, t)
        return [[t, r.n, r.phi.numerator, r.phi.denominator, r.rate, ""] for r in trace.records]
    except CPShiftError as exc:
        return [_error_row(t, 6, exc)]


def _entropy_rows(data: dict, t: int) -> list:
    cfg = ExperimentConfig.from_dict(data)
    try:
        s = sample_state(cfg.chain_system(), cfg.depth + 2, make_rng(cfg.seed, t))
        rec = PhiRecord(-cfg.depth, phi_n(s, -cfg.depth))
        return [[t, rec.n, rec.phi.numerator, rec.phi.denominator, rec.rate, ""]]
    except CPShiftError as exc:
        return [_error_row(t, 6, exc)]


def _ergodic_rows(data: dict, t: int) -> list:
    cfg = ExperimentConfig.from_dict(data)
    rng = make_rng(cfg.seed, t)
    f = functional(cfg.functional)
    try:
        s = sample_state(cfg.chain_system(), cfg.depth, rng)
        e = theta(s, max(cfg.resolution, f.min_resolution))
        top = max(cfg.checkpoints)
        e = ensure_window(e, min(0, f.lo), top + 1 + max(0, f.hi), rng, cfg.retry_policy())
        series = discrete_series(f, e, cfg.checkpoints)
        return [
            [t, m, num, norm, float(num / norm), ""]
            for m, num, norm in zip(series.checkpoints, series.numerators, series.normalizers)
        ]
    except (CPShiftError, ValueError) as exc:
        return [_error_row(t, 6, exc)]


def _recurrence_rows(data: dict, t: int) -> list:
    cfg = ExperimentConfig.from_dict(data)
    rng = make_rng(cfg.seed, t)
    K = cfg.max_shift
    try:
        s = sample_state(cfg.chain_system(), cfg.depth, rng)
        policy = cfg.retry_policy()
        e = ensure_window(theta(s, cfg.resolution), -K - 2, K + 2, rng, policy)
        scan, _ = with_retries(lambda x: recurrence_scan(x, K, radius=1), e, rng, policy)
        best = dict(record_minima(scan))
        return [[t, k, d, float(d), best[k], ""] for k, d in scan]
    except CPShiftError as exc:
        return [_error_row(t, 6, exc)]


def _budget_hit(rows: Iterable[list]) -> bool:
    return any(str(r[-1]).startswith(BudgetExceeded.__name__) for r in rows)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(cfg: ExperimentConfig, out: Path, workers: int = 1) -> int:
    system = cfg.chain_system()
    params = SuiteParams(system, cfg.seed, cfg.trajectories, cfg.depth, cfg.max_shift, cfg.retry_policy())
    results = run_suites(params)
    rows = [[r.name, r.status, r.detail] for r in results]
    if system.is_deterministic:
        rows.append(["flag", "note", DETERMINISTIC_FLAG])
        print(DETERMINISTIC_FLAG)
    write_csv(out / "verify.csv", cfg, ["check", "status", "detail"], rows)
    for r in results:
        print(f"{r.status.upper():4s} {r.name}: {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_phi_decay(cfg: ExperimentConfig, out: Path, workers: int = 1) -> int:
    rows = [r for chunk in run_trajectories(_phi_rows, cfg, workers) for r in chunk]
    header = ["trajectory", "n", "phi_num", "phi_den", "minus_log_phi_over_depth", "error"]
    write_csv(out / "phi_decay.csv", cfg, header, rows)
    return EXIT_BUDGET if _budget_hit(rows) else EXIT_OK


def cmd_entropy(cfg: ExperimentConfig, out: Path, workers: int = 1) -> int:
    system = cfg.chain_system()
    rows = [r for chunk in run_trajectories(_entropy_rows, cfg, workers) for r in chunk]
    header = ["trajectory", "n", "phi_num", "phi_den", "minus_log_phi_over_depth", "error"]
    write_csv(out / "entropy.csv", cfg, header, rows)
    stats = phi0_sample_stats(system, cfg.samples, make_rng(cfg.seed, MC_STREAM))
    lo, hi = stats.mean - 3 * stats.stderr, stats.mean + 3 * stats.stderr
    summary = [
        ["samples", stats.count],
        ["mean_minus_log_phi0", stats.mean],
        ["stderr", stats.stderr],
        ["stddev", stats.variance**0.5],
        ["ci3_low", lo],
        ["ci3_high", hi],
        ["shannon_entropy_of_weights", shannon_entropy(system.weights)],
        ["certified_nondeterministic", int(lo > 0)],
    ]
    write_csv(out / "entropy_summary.csv", cfg, ["quantity", "value"], summary)
    print(f"mean -log phi_0 = {stats.mean + 0.0:.17g} +- {stats.stderr:.3g}; certified: {lo > 0}")
    if system.is_deterministic:
        print(DETERMINISTIC_FLAG)
    return EXIT_BUDGET if _budget_hit(rows) else EXIT_OK


def cmd_ergodic(cfg: ExperimentConfig, out: Path, workers: int = 1) -> int:
    rows = [r for chunk in run_trajectories(_ergodic_rows, cfg, workers) for r in chunk]
    header = ["trajectory", "m", "A_m_num", "A_m_den_normalizer", "A_m_float", "error"]
    write_csv(out / "ergodic.csv", cfg, header, rows)
    return EXIT_BUDGET if _budget_hit(rows) else EXIT_OK


def cmd_recurrence(cfg: ExperimentConfig, out: Path, workers: int = 1) -> int:
    rows = [r for chunk in run_trajectories(_recurrence_rows, cfg, workers) for r in chunk]
    good = [r for r in rows if not r[-1]]
    bad = [r for r in rows if r[-1]]
    good.sort(key=lambda r: (r[0], r[2], abs(r[1]), r[1]))
    header = ["trajectory", "k", "proxy_distance", "proxy_distance_float", "record_min", "error"]
    write_csv(out / "recurrence.csv", cfg, header, good + bad)
    if bad:
        return EXIT_BUDGET if _budget_hit(bad) else EXIT_FAIL
    system = cfg.chain_system()
    uniform = len(set(system.weights)) == 1
    if uniform and any(r[2] != 0 for r in good):
        print("uniform system: nonzero proxy distance found")
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "phi-decay": cmd_phi_decay,
    "entropy": cmd_entropy,
    "ergodic": cmd_ergodic,
    "recurrence": cmd_recurrence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpshift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", type=Path, default=None, help="output directory (default: config output)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out if args.out is not None else Path(cfg.output)
    try:
        return COMMANDS[args.command](cfg, out, max(1, args.workers))
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
