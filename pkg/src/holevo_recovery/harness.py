"""Randomised verification sweeps and the ``holevo-recovery`` command line."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import channels as ch
from . import divergences as dv
from . import recoverability as rc
from .errors import ConfigError, RecoveryError, ZeroGap
from .numkernel import BipartiteShape, partial_trace, polar_unitary, schatten_norm
from .states import (
    derive_seed,
    ginibre,
    make_rng,
    random_density,
    random_positive,
    random_unitary,
    tag_key,
)

MAX_DIM = 36
LEMMA_T_VALUES = (0.1, 1.0, 10.0)
ALPHA_T_GRID = tuple(np.logspace(-2, 2, 5))
HAAR_SAMPLES = 50
NU_REL_TOL = 1e-6


@dataclass
class SweepConfig:
    dim_a: int = 2
    dim_b: int = 2
    trials: int = 500
    master_seed: int = 0
    alpha_list: tuple = (0.25, 0.5, 0.75)
    epsilon: float = 1e-3
    tolerance: float = 1e-9
    checks: tuple = ()
    sigma_scale_range: tuple = (0.5, 2.0)

    def __post_init__(self):
        self.alpha_list = tuple(float(a) for a in self.alpha_list)
        self.sigma_scale_range = tuple(float(s) for s in self.sigma_scale_range)
        self.checks = tuple(self.checks) or tuple(CHECKS)

    def validate(self) -> "SweepConfig":
        if self.dim_a < 1 or self.dim_b < 1 or self.dim_a * self.dim_b > MAX_DIM:
            raise ConfigError(f"need 1 <= dim_a * dim_b <= {MAX_DIM}")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if not self.alpha_list or any(not 0 < a < 1 for a in self.alpha_list):
            raise ConfigError("alphas must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        lo, hi = self.sigma_scale_range
        if not 0 < lo <= hi:
            raise ConfigError("sigma scale range must be a positive interval")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(unknown)}")
        return self

    @property
    def shape(self) -> BipartiteShape:
        return BipartiteShape(self.dim_a, self.dim_b)


@dataclass
class CheckRecord:
    check_id: str
    trial_index: int
    seed: int
    lhs: float | None
    rhs: float | None
    slack: float | None
    passed: bool
    components: dict = field(default_factory=dict)
    error: str | None = None


# -- instance generators ---------------------------------------------------


def _state(d: int, rng, full_rank: bool = False):
    rank = d if full_rank else int(rng.integers(1, d + 1))
    return random_density(d, rank, rng)


def _sigma(d: int, rng, cfg: SweepConfig):
    return random_positive(d, rng, cfg.sigma_scale_range, cfg.epsilon)


def _bipartite(rng, cfg: SweepConfig):
    d = cfg.dim_a * cfg.dim_b
    return _state(d, rng), _sigma(d, rng, cfg)


def _channel(rng, d_in: int, d_out: int, kraus=(1, 3)):
    n = int(rng.integers(kraus[0], kraus[1] + 1))
    n = max(n, -(-d_in // d_out))
    return ch.random_channel(d_in, d_out, n, rng)


# -- checks ----------------------------------------------------------------


def check_holevo_sandwich(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    rho, sigma = _state(d, rng), _state(d, rng)
    _, fh = dv.holevo_fidelity(rho, sigma)
    td = dv.trace_distance(rho, sigma)
    return rc.BoundReport.from_sides(
        {"lower": (1 - math.sqrt(max(fh, 0.0)), td), "upper": (td, math.sqrt(max(1 - fh, 0.0)))},
        cfg.tolerance,
        dict(fh=fh, trace_distance=td),
    )


def check_fh_le_f(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    rho, sigma = _state(d, rng), _state(d, rng)
    _, fh = dv.holevo_fidelity(rho, sigma)
    f = dv.uhlmann_fidelity(rho, sigma)
    return rc.BoundReport.from_sides({"fh_le_f": (fh, f)}, cfg.tolerance, dict(fh=fh, f=f))


def check_trace_norm_variational(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    X = ginibre(d, d, rng)
    norm = schatten_norm(X, "trace")
    U = polar_unitary(X)
    attained = abs(np.trace(X @ U.conj().T))
    sampled = max(abs(np.trace(X @ random_unitary(d, rng).conj().T)) for _ in range(HAAR_SAMPLES))
    return rc.BoundReport.from_sides(
        {"attained": (abs(attained - norm), 1e-9 * max(1.0, norm)), "haar": (sampled, norm)},
        cfg.tolerance,
        dict(trace_norm=norm, polar_value=float(attained), best_sampled=float(sampled)),
    )


def check_fvdg(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    rho, sigma = _state(d, rng), _state(d, rng)
    f = dv.uhlmann_fidelity(rho, sigma)
    td = dv.trace_distance(rho, sigma)
    return rc.BoundReport.from_sides(
        {"lower": (1 - math.sqrt(f), td), "upper": (td, math.sqrt(max(1 - f, 0.0)))},
        cfg.tolerance,
        dict(f=f, trace_distance=td),
    )


def check_data_processing_fh(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    rho, sigma = _state(d, rng), _state(d, rng)
    N = _channel(rng, d, d)
    _, before = dv.holevo_fidelity(rho, sigma)
    _, after = dv.holevo_fidelity(N(rho.matrix), N(sigma.matrix))
    _, marg = dv.holevo_fidelity(partial_trace(rho.matrix, cfg.shape), partial_trace(sigma.matrix, cfg.shape))
    return rc.BoundReport.from_sides(
        {"channel": (before, after), "partial_trace": (before, marg)},
        cfg.tolerance,
        dict(fh=before, fh_channel=after, fh_partial_trace=marg),
    )


def check_q_alpha_monotone(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    rho, sigma = _bipartite(rng, cfg)
    N = _channel(rng, d, d)
    rho_a, sigma_a = partial_trace(rho.matrix, cfg.shape), partial_trace(sigma.matrix, cfg.shape)
    sides, comps = {}, {}
    for a in cfg.alpha_list:
        q = dv.quasi_entropy_alpha(rho, sigma, a)
        q_pt = dv.quasi_entropy_alpha(rho_a, sigma_a, a)
        q_ch = dv.quasi_entropy_alpha(N(rho.matrix), N(sigma.matrix), a)
        sides[f"partial_trace_{a}"] = (q_pt, q)
        sides[f"channel_{a}"] = (q_ch, q)
        comps[f"q_{a}"] = q
    return rc.BoundReport.from_sides(sides, cfg.tolerance, comps)


def _merge(reports: dict, tol: float) -> rc.BoundReport:
    sides = {name: (r.lhs, r.rhs) for name, r in reports.items()}
    comps = {}
    for name, r in reports.items():
        comps.update({f"{name}.{k}": v for k, v in r.components.items() if not k.startswith("slack_")})
    ok = all(r.passed for r in reports.values())
    return rc.BoundReport.from_sides(sides, tol, comps, extra_ok=ok)


def check_lemma1(rng, cfg):
    rho, sigma = _bipartite(rng, cfg)
    try:
        t_opt = rc.optimal_T(rho, sigma, cfg.shape)
        t_values = LEMMA_T_VALUES + (t_opt,)
    except ZeroGap:
        t_values = LEMMA_T_VALUES
    reports = {}
    for a in cfg.alpha_list:
        for i, T in enumerate(t_values):
            label = "opt" if i == len(LEMMA_T_VALUES) else f"{T:g}"
            reports[f"a{a:g}_T{label}"] = rc.lemma1_check(rho, sigma, cfg.shape, a, T, cfg.tolerance)
    return _merge(reports, cfg.tolerance)


def check_alpha_bound(rng, cfg):
    rho, sigma = _bipartite(rng, cfg)
    reports = {
        f"a{a:g}_T{T:g}": rc.alpha_inequality_check(rho, sigma, cfg.shape, a, T, cfg.tolerance)
        for a in cfg.alpha_list
        for T in ALPHA_T_GRID
    }
    return _merge(reports, cfg.tolerance)


def check_main_eq7(rng, cfg):
    rho, sigma = _bipartite(rng, cfg)
    return rc.main_inequality_check(rho, sigma, cfg.shape, cfg.tolerance)


def _channel_instance(rng, cfg):
    N = _channel(rng, cfg.dim_a, cfg.dim_b, kraus=(2, 3))
    omega = _state(cfg.dim_a, rng, full_rank=True)
    tau = _sigma(cfg.dim_a, rng, cfg)
    return omega, tau, N


def check_general_channel(rng, cfg):
    omega, tau, N = _channel_instance(rng, cfg)
    return rc.general_channel_check(omega, tau, N, cfg.tolerance)


def check_dilation_consistency(rng, cfg):
    omega, tau, N = _channel_instance(rng, cfg)
    return rc.dilation_consistency_check(omega, tau, N, cfg.tolerance)


def check_petz_fixed_point(rng, cfg):
    _, sigma = _bipartite(rng, cfg)
    _, tau, N = _channel_instance(rng, cfg)
    return rc.petz_fixed_point_check(sigma, cfg.shape, tau, N, cfg.tolerance)


def check_v_sandwich(rng, cfg):
    rho, sigma = _bipartite(rng, cfg)
    return rc.v_sandwich_check(rho, sigma, cfg.shape, cfg.tolerance)


def check_nu_quadrature_agreement(rng, cfg):
    d = cfg.dim_a * cfg.dim_b
    X = _sigma(d, rng, cfg).matrix
    sides = {}
    for a in cfg.alpha_list:
        exact = dv.nu_alpha(X, a, dv.SPECTRAL)
        approx = dv.nu_alpha(X, a, dv.QUADRATURE)
        rel = schatten_norm(exact - approx, "operator") / schatten_norm(exact, "operator")
        sides[f"alpha_{a}"] = (rel, NU_REL_TOL)
    return rc.BoundReport.from_sides(sides, cfg.tolerance)


CHECKS: dict[str, Callable] = {
    "holevo_sandwich": check_holevo_sandwich,
    "fh_le_f": check_fh_le_f,
    "trace_norm_variational": check_trace_norm_variational,
    "fvdg": check_fvdg,
    "data_processing_fh": check_data_processing_fh,
    "q_alpha_monotone": check_q_alpha_monotone,
    "lemma1": check_lemma1,
    "alpha_bound": check_alpha_bound,
    "main_eq7": check_main_eq7,
    "general_channel": check_general_channel,
    "dilation_consistency": check_dilation_consistency,
    "petz_fixed_point": check_petz_fixed_point,
    "v_sandwich": check_v_sandwich,
    "nu_quadrature_agreement": check_nu_quadrature_agreement,
}


# -- sweep -----------------------------------------------------------------


def run_check(check_id: str, trial_index: int, cfg: SweepConfig) -> tuple[CheckRecord, rc.BoundReport | None]:
    seed = derive_seed(cfg.master_seed, trial_index)
    rng = make_rng((seed, tag_key(check_id)))
    try:
        report = CHECKS[check_id](rng, cfg)
    except (RecoveryError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        record = CheckRecord(check_id, trial_index, seed, None, None, None, False, {},
                             f"{type(exc).__name__}: {exc}")
        return record, None
    comps = {k: float(v) for k, v in report.components.items()}
    record = CheckRecord(check_id, trial_index, seed, report.lhs, report.rhs, report.slack,
                         bool(report.slack >= -cfg.tolerance and report.passed), comps)
    return record, report


def _run_trial(args) -> list[CheckRecord]:
    cfg, trial_index = args
    return [run_check(c, trial_index, cfg)[0] for c in cfg.checks]


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PETZ_THREADS", "1")))
    except ValueError as exc:
        raise ConfigError("PETZ_THREADS must be an integer") from exc


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[CheckRecord]:
    config.validate()
    workers = _worker_count() if workers is None else workers
    jobs = [(config, k) for k in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_run_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_trial = [_run_trial(j) for j in jobs]
    # pool.map preserves order; sort anyway so any executor is safe
    order = {c: i for i, c in enumerate(config.checks)}
    records = [r for trial in per_trial for r in trial]
    records.sort(key=lambda r: (r.trial_index, order[r.check_id]))
    return records


# -- reporting -------------------------------------------------------------


def summarize(records: list[CheckRecord]) -> dict:
    out: dict = {}
    for r in records:
        out.setdefault(r.check_id, []).append(r)
    summary = {}
    for check_id, recs in out.items():
        slacks = [r.slack for r in recs if r.slack is not None]
        summary[check_id] = dict(
            count=len(recs),
            failures=sum(not r.passed for r in recs),
            errors=sum(r.error is not None for r in recs),
            min_slack=min(slacks) if slacks else 0.0,
            median_slack=statistics.median(slacks) if slacks else 0.0,
            max_slack=max(slacks) if slacks else 0.0,
        )
    return summary


def report_dict(records: list[CheckRecord], config: SweepConfig | dict | None = None) -> dict:
    if isinstance(config, SweepConfig):
        config = asdict(config)
    failures = sum(not r.passed for r in records)
    return dict(
        config=config or {},
        summary=summarize(records),
        total=dict(records=len(records), failures=failures),
        records=[asdict(r) for r in records],
    )


def _g17(x) -> str:
    return "" if x is None else format(x, ".17g")


CSV_HEADER = ["check_id", "trial", "seed", "lhs", "rhs", "slack", "passed"]


def render_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.check_id, r.trial_index, r.seed, _g17(r.lhs), _g17(r.rhs), _g17(r.slack),
                    "true" if r.passed else "false"])
    return buf.getvalue()


def render_json(records, config=None) -> str:
    return json.dumps(report_dict(records, config), indent=1) + "\n"


def emit_report(records, fmt: str = "json", destination=None, config=None) -> None:
    """Write records as JSON (config echo, summary, records) or CSV to a path or stdout."""
    records = [CheckRecord(**r) if isinstance(r, dict) else r for r in records]
    if fmt == "json":
        text = render_json(records, config)
    elif fmt == "csv":
        text = render_csv(records)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if destination is None or destination == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- CLI -------------------------------------------------------------------


def _config_from_args(args) -> SweepConfig:
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip()) if args.checks else ()
    return SweepConfig(
        dim_a=args.dim_a, dim_b=args.dim_b, trials=args.trials, master_seed=args.seed,
        alpha_list=tuple(args.alpha) if args.alpha else (0.25, 0.5, 0.75),
        epsilon=args.eps, tolerance=args.tol, checks=checks,
    ).validate()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim-a", type=int, default=2)
    p.add_argument("--dim-b", type=int, default=2)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--alpha", type=float, action="append", help="repeatable; default 0.25 0.5 0.75")
    p.add_argument("--eps", type=float, default=1e-3, help="regularisation of sigma")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--checks", default="", help="comma-separated check ids (default: all)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holevo-recovery", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run every configured check on every trial")
    _add_common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default="-")

    p = sub.add_parser("check", help="run one check on one trial and print its report")
    p.add_argument("check_id", choices=sorted(CHECKS))
    _add_common(p)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("report", help="re-render a saved JSON report")
    p.add_argument("input")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out", default="-")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            cfg = _config_from_args(args)
            records = run_sweep(cfg)
            emit_report(records, args.format, args.out, cfg)
            summary = summarize(records)
            failures = sum(s["failures"] for s in summary.values())
            for check_id, s in summary.items():
                print(f"{check_id:26s} n={s['count']:<6d} fail={s['failures']:<4d} "
                      f"min_slack={s['min_slack']:.3e}", file=sys.stderr)
            return 0 if failures == 0 else 1
        if args.command == "check":
            args.checks = args.check_id
            cfg = _config_from_args(args)
            record, report = run_check(args.check_id, args.trial, cfg)
            print(f"check={record.check_id} trial={record.trial_index} seed={record.seed}")
            if record.error:
                print(f"error: {record.error}")
                return 1
            print(f"lhs={record.lhs:.17g} rhs={record.rhs:.17g} slack={record.slack:.17g} "
                  f"passed={record.passed}")
            for k, v in record.components.items():
                print(f"  {k} = {v:.17g}")
            return 0 if record.passed else 1
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
        emit_report(data["records"], args.format, args.out, data.get("config"))
        return 0
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
