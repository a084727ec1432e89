"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line for the terminal summary."""

import math
import subprocess
import sys
import time

import numpy as np

from holevo_recovery import recoverability as rc
from holevo_recovery.channels import partial_trace_channel
from holevo_recovery.divergences import nu_alpha
from holevo_recovery.harness import SweepConfig, _bipartite, run_check
from holevo_recovery.numkernel import BipartiteShape, kron, polar_unitary, schatten_norm
from holevo_recovery.states import ginibre, make_rng, random_density, random_positive

from conftest import record_criterion

TOL = 1e-9


def sweep_check(check_id, trials, **cfg_kwargs):
    cfg = SweepConfig(trials=trials, checks=(check_id,), **cfg_kwargs).validate()
    return [run_check(check_id, k, cfg)[0] for k in range(trials)]


def worst(records):
    errors = [r.error for r in records if r.error]
    slacks = [r.slack for r in records if r.slack is not None]
    return min(slacks) if slacks else float("nan"), errors


def report(number, name, passed, detail):
    record_criterion(number, name, passed, detail)
    print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {name} {detail}")
    assert passed, detail


DIM_SHAPES = {2: (2, 1), 3: (3, 1), 4: (2, 2), 8: (2, 4)}


def test_criterion_01_holevo_sandwich():
    start = time.perf_counter()
    slacks, errors = [], []
    for d, (da, db) in DIM_SHAPES.items():
        s, e = worst(sweep_check("holevo_sandwich", 1000, dim_a=da, dim_b=db))
        slacks.append(s)
        errors += e
    elapsed = time.perf_counter() - start
    ok = min(slacks) >= -TOL and not errors and elapsed < 30
    report(1, "Holevo sandwich", ok, f"min_slack={min(slacks):.3e} runtime={elapsed:.1f}s")


def test_criterion_02_fh_le_f_and_fvdg():
    slacks, errors = [], []
    for d, (da, db) in DIM_SHAPES.items():
        for cid in ("fh_le_f", "fvdg"):
            s, e = worst(sweep_check(cid, 1000, dim_a=da, dim_b=db))
            slacks.append(s)
            errors += e
    report(2, "F_H <= F and Fuchs-van de Graaf", min(slacks) >= -TOL and not errors, f"min_slack={min(slacks):.3e}")


def haar_batch(d, n, rng):
    Z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    phases = np.diagonal(R, axis1=1, axis2=2)
    return Q * (phases / np.abs(phases))[:, None, :]


def test_criterion_03_variational_trace_norm():
    rng = make_rng(303)
    attain_dev, excess = 0.0, -np.inf
    for k in range(100):
        d = 1 + k % 4
        X = ginibre(d, d, rng)
        norm = schatten_norm(X, "trace")
        U = polar_unitary(X)
        attain_dev = max(attain_dev, abs(abs(np.trace(X @ U.conj().T)) - norm))
        Us = haar_batch(d, 1000, rng)
        values = np.abs(np.einsum("ij,nij->n", X, Us.conj()))
        excess = max(excess, values.max() - norm)
    ok = attain_dev <= 1e-9 and excess <= 1e-9
    report(3, "variational trace norm", ok, f"polar_dev={attain_dev:.3e} max_haar_excess={excess:.3e}")


def test_criterion_04_data_processing_and_q_alpha():
    s1, e1 = worst(sweep_check("data_processing_fh", 500))
    s2, e2 = worst(sweep_check("q_alpha_monotone", 500))
    ok = min(s1, s2) >= -TOL and not e1 + e2
    report(4, "data processing of F_H and Q_alpha", ok, f"min_slack_fh={s1:.3e} min_slack_q={s2:.3e}")


def test_criterion_05_main_result():
    start = time.perf_counter()
    slacks, errors = [], []
    for da, db in ((2, 2), (2, 3)):
        s, e = worst(sweep_check("main_eq7", 500, dim_a=da, dim_b=db, epsilon=1e-3))
        slacks.append(s)
        errors += e
    worst_remainder, worst_gap = 0.0, 0.0
    for da, db in ((2, 2), (2, 3)):
        shape = BipartiteShape(da, db)
        for seed in range(20):
            sigma = random_positive(shape.dim, (seed, 0), epsilon=1e-3)
            rho_a = random_density(da, da, (seed, 1)).matrix
            sigma_a = random_positive(da, (seed, 2)).matrix
            sigma_b = random_density(db, db, (seed, 3)).matrix
            for rho, sig in ((sigma.matrix / sigma.trace, sigma.matrix), (kron(rho_a, sigma_b), kron(sigma_a, sigma_b))):
                c = rc.main_inequality_check(rho, sig, shape).components
                worst_remainder = max(worst_remainder, c["two_norm_remainder"], c["trace_norm_remainder"])
                worst_gap = max(worst_gap, abs(c["fidelity_gap"]))
    elapsed = time.perf_counter() - start
    ok = min(slacks) >= -TOL and not errors and worst_remainder < 1e-10 and worst_gap < 1e-9 and elapsed < 120
    report(5, "main recoverability inequality", ok,
           f"min_slack={min(slacks):.3e} eq_remainder={worst_remainder:.2e} eq_gap={worst_gap:.2e} runtime={elapsed:.1f}s")


def test_criterion_06_lemma1():
    cfg = SweepConfig().validate()
    rng = make_rng(606)
    min_slack, half_dev = np.inf, 0.0
    for _ in range(200):
        rho, sigma = _bipartite(rng, cfg)
        T_values = [0.1, 1.0, 10.0, rc.optimal_T(rho, sigma, cfg.shape)]
        two_norm = rc.main_inequality_check(rho, sigma, cfg.shape).components["two_norm_remainder"]
        for a in (0.25, 0.5, 0.75):
            for T in T_values:
                rep = rc.lemma1_check(rho, sigma, cfg.shape, a, T)
                min_slack = min(min_slack, rep.slack if rep.passed else -np.inf)
                if a == 0.5:
                    half_dev = max(half_dev, abs(rep.lhs - two_norm))
    ok = min_slack >= -TOL and half_dev <= 1e-10
    report(6, "lemma bound on nu_alpha", ok, f"min_slack={min_slack:.3e} alpha_half_dev={half_dev:.2e}")


def test_criterion_07_optimal_T():
    cfg = SweepConfig().validate()
    rng = make_rng(707)
    worst_rel = -np.inf
    for _ in range(100):
        rho, sigma = _bipartite(rng, cfg)
        inst = rc._instance(rho, sigma, cfg.shape)
        gap = rc.q_gap(inst, 0.5)
        norm, tr = rc._deltas(inst).op_norm_big, inst.sigma_A.trace
        T = rc.optimal_T_from(gap, norm, tr)
        at_opt = rc._lemma1_rhs(0.5, T, gap, norm, tr)[0]
        grid = np.logspace(math.log10(T / 100), math.log10(100 * T), 100)
        best_grid = min(rc._lemma1_rhs(0.5, t, gap, norm, tr)[0] for t in grid)
        worst_rel = max(worst_rel, (at_opt - best_grid) / best_grid)
    report(7, "optimal T", worst_rel <= 1e-6, f"max_relative_excess_over_grid={worst_rel:.2e}")


def test_criterion_08_nu_quadrature():
    worst_rel = 0.0
    for k in range(50):
        d = 1 + k % 4
        X = random_positive(d, (808, k), scale_range=(0.1, 10.0), epsilon=1e-3).matrix
        for a in (0.3, 0.5, 0.7):
            exact = nu_alpha(X, a, "spectral")
            approx = nu_alpha(X, a, "quadrature")
            worst_rel = max(worst_rel, schatten_norm(exact - approx, "operator") / schatten_norm(exact, "operator"))
    report(8, "nu_alpha quadrature vs spectral", worst_rel < 1e-6, f"max_rel_err={worst_rel:.2e}")


def test_criterion_09_isometry_suite():
    records = sweep_check("v_sandwich", 200)
    s, e = worst(records)
    # equality sides store (deviation, 1e-9), so the deviation is 1e-9 minus the slack
    iso = max(1e-9 - r.components["slack_isometry"] for r in records)
    pur = max(1e-9 - r.components["slack_purification"] for r in records)
    norm_order = min(r.components["slack_norm_order"] for r in records)
    ok = s >= -TOL and not e and all(r.passed for r in records) and max(iso, pur) <= 1e-9 and norm_order >= -1e-9
    report(9, "isometry V identities", ok, f"isometry_dev={iso:.1e} purification_dev={pur:.1e} norm_order_slack={norm_order:.2e}")


def test_criterion_10_general_channel():
    s1, e1 = worst(sweep_check("general_channel", 200))
    dil = sweep_check("dilation_consistency", 200)
    s2, e2 = worst(dil)
    max_dev = 0.0
    for da, db in ((2, 2), (2, 3)):
        shape = BipartiteShape(da, db)
        for seed in range(20):
            rho = random_density(shape.dim, 1 + seed % shape.dim, (seed, 10))
            sigma = random_positive(shape.dim, (seed, 11), epsilon=1e-3)
            main = rc.main_inequality_check(rho, sigma, shape).components
            gen = rc.general_channel_check(rho, sigma, partial_trace_channel(shape)).components
            for a, b in (("fidelity_gap", "fidelity_gap"), ("trace_norm_remainder", "trace_norm_remainder"),
                         ("lambda_min", "lambda_min"), ("tr_sigma_a", "tr_tau"),
                         ("trace_norm_bound", "trace_norm_bound")):
                max_dev = max(max_dev, abs(main[a] - gen[b]))
    ok = s1 >= -TOL and s2 >= -TOL and not e1 + e2 and all(r.passed for r in dil) and max_dev <= 1e-8
    report(10, "general channel and Stinespring reduction", ok,
           f"min_slack={s1:.3e} dilation_min_slack={s2:.3e} partial_trace_dev={max_dev:.2e}")


def test_criterion_11_petz_fixed_points():
    records = sweep_check("petz_fixed_point", 200)
    s, e = worst(records)
    ok = s >= -TOL and not e and all(r.passed for r in records)
    report(11, "Petz fixed points and CPTP", ok, f"min_slack={s:.3e}")


def test_criterion_12_default_sweep(tmp_path):
    outputs, times, codes = [], [], []
    for k in range(2):
        out = tmp_path / f"sweep{k}.json"
        start = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "holevo_recovery", "sweep", "--out", str(out)],
                             capture_output=True, text=True)
        times.append(time.perf_counter() - start)
        codes.append(res.returncode)
        outputs.append(out.read_bytes() if out.exists() else b"")
    ok = codes == [0, 0] and max(times) < 300 and outputs[0] == outputs[1] and outputs[0]
    report(12, "default sweep", bool(ok),
           f"exit={codes} runtime={max(times):.1f}s identical={outputs[0] == outputs[1]}")
