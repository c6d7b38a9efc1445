"""Acceptance suite: one PASS/FAIL line per criterion, at the contract tolerances.

Run with ``pytest tests/test_acceptance.py -v``; each test prints its line
whether or not output capture is on.
"""

import csv
import io
import math
import time

import numpy as np
import pytest
from scipy import integrate

from isac_rdb.channels import SystemConfig, sample_nakagami_matrix
from isac_rdb.cli import main
from isac_rdb.mathfn import binary_entropy
from isac_rdb.montecarlo import ergodic_capacity_mc, trial_rng
from isac_rdb.nakagami import BcrbInapplicable, bcrb_from_cov, mmse_lower_bound_global
from isac_rdb.occupancy import block_from_cov, simulate_map_detector
from isac_rdb.optimizer import (
    PsdConstraintSet,
    pareto_sweep_nakagami,
    pareto_sweep_occupancy,
    solve_batch,
    water_filling,
)
from isac_rdb.rdtheory import (
    BernoulliSource,
    bernoulli_rd,
    bernoulli_rd_inverse,
    blahut_arimoto_at_distortion,
    second_order_bound,
)
from isac_rdb.verify import (
    check_conditional_stam_scalar,
    check_high_noise_tightness,
    check_rdb_gaussian_equality,
    table1_config,
    table2_occupancy,
)

SEED = 20240501
DRAWS = 2000


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed=None, limit=None):
        timing = ""
        if elapsed is not None:
            timing = f" [{elapsed:.2f} s, limit {limit:g} s]"
            ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}{timing}")
        assert ok, detail

    return emit


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_01_gaussian_equality(report):
    t = time.perf_counter()
    r = check_rdb_gaussian_equality()
    el = time.perf_counter() - t
    report(1, r.passed and r.measured <= 1e-12, f"max rel error {r.measured:.3g} over 50 SNR points (tol 1e-12)",
           el, 1.0)


def test_02_bernoulli_vs_blahut_arimoto(report):
    t = time.perf_counter()
    worst = 0.0
    for p1 in (0.1, 0.3, 0.5):
        src = BernoulliSource(p1)
        disc = src.as_discrete()
        for D in np.linspace(0.0, 1.0, 22)[1:-1] * src.zero_rate_distortion:
            ba = blahut_arimoto_at_distortion(disc, D)
            worst = max(worst, abs(ba.rate - bernoulli_rd(src, D)))
    el = time.perf_counter() - t
    report(2, worst <= 1e-6, f"max |R_closed - R_BA| {worst:.3g} at 60 targets (tol 1e-6)", el, 5.0)


def test_03_global_bound_plugin(report, tmp_path):
    t = time.perf_counter()
    cfg = table1_config(1.0)
    target = 16 / (16 * 10 ** 2.4 + 1)
    closed = mmse_lower_bound_global(cfg)
    out = tmp_path / "t1.csv"
    code = main(["region-nakagami", "--out", str(out)])
    last = rows(out.read_text())[-1]
    el = time.perf_counter() - t
    rel_closed = abs(closed - target) / target
    rel_csv = abs(float(last["D_rdb"]) - target) / target
    ok = code == 0 and rel_closed <= 1e-12 and rel_csv <= 1e-9
    report(3, ok, f"closed form rel err {rel_closed:.2g} (tol 1e-12); CLI tau_max row rel err {rel_csv:.2g} (tol 1e-9)",
           el, 120.0)


def test_04_fig2_ordering(report):
    t = time.perf_counter()
    curves = {m: pareto_sweep_nakagami(table1_config(m), DRAWS, 25, SEED) for m in (0.5, 1.0, 2.0)}
    el = time.perf_counter() - t
    half = curves[0.5]
    try:
        bcrb_from_cov(np.eye(4), table1_config(0.5))
        inapplicable = False
    except BcrbInapplicable:
        inapplicable = True
    a = inapplicable and all(p.D_bcrb is None and math.isfinite(p.D) and p.D > 0 for p in half)
    top = curves[2.0][0]
    sep = (top.D_bcrb - 3 * top.D_bcrb_stderr) - (top.D + 3 * top.D_stderr)
    b = sep > 0
    c = all(math.isfinite(p.D) and p.D_bcrb is not None and math.isfinite(p.D_bcrb) for p in curves[1.0])
    detail = (f"(a) m=0.5 RDB finite, BCRB inapplicable: {a}; "
              f"(b) m=2 BCRB {top.D_bcrb:.4g}+-3x{top.D_bcrb_stderr:.2g} vs RDB {top.D:.4g}+-3x{top.D_stderr:.2g}, "
              f"gap {sep:.3g}: {b}; (c) m=1 both finite: {c}")
    report(4, a and b and c, detail, el, 120.0)


def test_05_fig3_shape(report):
    t = time.perf_counter()
    occ = table2_occupancy(SEED)
    pts, sols = pareto_sweep_occupancy(occ, DRAWS, 25, SEED, return_solutions=True)
    D = [p.D for p in pts]
    R = [p.R_mean for p in pts]
    shape = (abs(D[0] - 0.5) <= 1e-8 and D[-1] < 0.05 and all(b < a for a, b in zip(D, D[1:]))
             and all(b <= a for a, b in zip(R, R[1:])))
    worst = math.inf
    for j in (0, 12, 24):
        x = block_from_cov(sols[j][0].Q, occ.system.T)
        res = simulate_map_detector(occ, x, 20000, SEED + j)
        worst = min(worst, (res.error_rate - res.bound) / res.stderr if res.stderr > 0 else math.inf)
    el = time.perf_counter() - t
    ok = shape and worst >= -3.0
    detail = (f"D {D[0]:.3g} -> {D[-1]:.3g} strictly decreasing, R {R[0]:.4g} -> {R[-1]:.4g} non-increasing: {shape}; "
              f"min (detector - bound)/stderr at 3 points {worst:.3g} (>= -3)")
    report(5, ok, detail, el, 120.0)


def test_06_capacity_cross_check(report):
    t = time.perf_counter()
    cfg = SystemConfig(M=1, N_c=1, T=1, P0=10.0, sigma2_c=1.0, m_c=1.0, omega_c=1.0)
    est = ergodic_capacity_mc(cfg, 100_000, SEED)
    el = time.perf_counter() - t
    quad, _ = integrate.quad(lambda g: math.log1p(10 * g) * math.exp(-g), 0, math.inf, epsabs=1e-13)
    z = abs(est.mean - quad) / est.stderr
    report(6, z <= 3.0, f"MC {est.mean:.5f} +- {est.stderr:.2g} vs quadrature {quad:.10f}, |z| = {z:.2f} (<= 3)",
           el, 10.0)


def test_07_conditional_stam(report):
    t = time.perf_counter()
    r = check_conditional_stam_scalar("both")
    el = time.perf_counter() - t
    report(7, r.passed, r.detail + " on a 10-point sigma grid", el, 30.0)


def test_08_optimizer(report, tmp_path):
    cfg = table1_config(1.0)
    H = np.stack([sample_nakagami_matrix(4, 4, 1.0, cfg.omega_c, trial_rng(SEED, k)) for k in range(100)])
    pts, _ = solve_batch(H, cfg, PsdConstraintSet(cfg.budget))
    wf_gap = max(abs(p.objective - water_filling(h, cfg)[1]) for p, h in zip(pts, H))

    resid = 0.0
    for m in (1.0, 2.0):
        resid = max(resid, max(p.max_residual for p in pareto_sweep_nakagami(table1_config(m), 500, 25, SEED)))
    resid = max(resid, max(p.max_residual for p in pareto_sweep_occupancy(table2_occupancy(SEED), 500, 25, SEED)))

    texts = {}
    for cmd in ("region-nakagami", "region-occupancy"):
        for w in (1, 4, 8):
            out = tmp_path / f"{cmd}-{w}.csv"
            assert main([cmd, "--draws", "600", "--sweep", "9", "--workers", str(w), "--out", str(out)]) == 0
            texts[cmd, w] = out.read_bytes()
    same = all(texts[c, 1] == texts[c, w] for c in ("region-nakagami", "region-occupancy") for w in (4, 8))
    ok = wf_gap <= 1e-6 and resid <= 1e-6 and same
    report(8, ok, f"water-filling gap {wf_gap:.2g} on 100 draws (tol 1e-6); max feasibility residual {resid:.2g} "
                  f"(tol 1e-6); CSV bit-identical for 1/4/8 workers: {same}")


def test_09_high_noise_limits(report):
    grid = np.logspace(0, 6, 25)
    b = check_high_noise_tightness("bernoulli", grid)
    n = check_high_noise_tightness("nakagami", grid, m=1.0)
    report(9, b.passed and n.passed,
           f"Bernoulli bound {b.measured:.8f} -> 0.5 ({b.detail}); "
           f"Nakagami m=1 bound {n.measured:.8f} -> {n.reference:g} ({n.detail.split(';')[0]})")


def test_10_second_order_dominance(report):
    rng = np.random.default_rng(SEED)
    violations = 0
    for _ in range(1000):
        p = rng.uniform(0.001, 0.999)
        src = BernoulliSource(p)
        mi = rng.uniform(0.0, binary_entropy(p))
        d = src.zero_rate_distortion
        if second_order_bound(d, d, mi) > bernoulli_rd_inverse(src, mi) + 1e-12:
            violations += 1
    report(10, violations == 0, f"{violations} violations on 1000 random (p, mi) pairs")
