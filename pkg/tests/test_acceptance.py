"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances.

Runtime budgets are reported next to each verdict; only criterion 11 has its
budget inside the check itself.
"""

import io
import math
import time

import numpy as np
import pytest

from lambda_metrology import analytic, estimation as est, model, sweep
from lambda_metrology.analytic import deviation
from lambda_metrology.cli import main
from lambda_metrology.errors import SingularQFIM, ZeroDiagonal
from lambda_metrology.estimation import POVM
from lambda_metrology.model import LambdaParams

from conftest import ACCEPTANCE_LINES, random_params, random_unitary

pytestmark = pytest.mark.acceptance


def report(label: str, ok: bool, detail: str, elapsed: float, budget: float):
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail} [{elapsed:.2f} s, budget {budget:g} s]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_cpt_amplitudes():
    t0 = time.perf_counter()
    worst_a = worst_bc = 0.0
    for omega in (0.5, 1.0, 2.7):
        p = model.cpt_params(omega, phi1=0.3, phi2=-1.1)
        for t in np.linspace(0, 200 / omega, 1000 // 3 + 1):
            amps = np.abs(model.evolve(p, t).amplitudes)
            worst_a = max(worst_a, amps[0])
            worst_bc = max(worst_bc, np.max(np.abs(amps[1:] - 1 / math.sqrt(2))))
    ok = worst_a <= 1e-10 and worst_bc <= 1e-10
    report("1 CPT amplitudes", ok, f"max|c_a|={worst_a:.2e}, max||c_b,c|-1/sqrt2|={worst_bc:.2e} (tol 1e-10)",
           time.perf_counter() - t0, 1)


def test_02_dynamics_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        p = random_params(rng)
        t = rng.uniform(0, 20 / p.Omega)
        a = model.evolve(p, t).amplitudes
        b = model.evolve_numeric_oracle(p, t).amplitudes
        worst = max(worst, float(np.max(np.abs(a - b))))
    report("2 dynamics vs RK4", worst <= 1e-8, f"max component error {worst:.2e} on 20 sets (tol 1e-8)",
           time.perf_counter() - t0, 5)


def test_03_four_way_qfi():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    n_equal = 0
    for n in range(1000):
        equal = n % 2 == 1
        n_equal += equal
        p = random_params(rng, equal_rabi=equal)
        t = rng.uniform(0, 20 / p.Omega)
        for k in model.PARAMETERS:
            vals = [analytic.eval_closed_form(analytic.GENERAL[k], p, t),
                    est.qfi_single(p, t, k), est.qfi_pure(p, t, k)]
            if equal:
                vals.append(analytic.eval_closed_form(analytic.EQUAL_RABI[k], p, t))
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    worst = max(worst, deviation(vals[i], vals[j], rel=1e-8, abs_floor=1e-12))
    report("3 four-way QFI", worst < 1e-8,
           f"max deviation {worst:.2e} over 1000 points ({n_equal} equal-Rabi) (tol 1e-8 rel / 1e-12 abs)",
           time.perf_counter() - t0, 10)


def _fa_formula(t, w=1.0):
    return 0.5 * t * t * math.sin(t * w / math.sqrt(2)) ** 2 * (math.cos(math.sqrt(2) * t * w) + 3)


def test_04a_fa_maximum_curve():
    t0 = time.perf_counter()
    p = LambdaParams().with_alpha(math.pi / 2)
    zero, peak = math.sqrt(2) * math.pi, math.pi / math.sqrt(2)
    grid = np.concatenate([np.linspace(0, 4 * math.pi, 998), [zero, peak]])
    worst = max(abs(est.qfi_single(p, t, "wa") - _fa_formula(t)) / max(1.0, _fa_formula(t)) for t in grid)
    at_zero = est.qfi_single(p, zero, "wa")
    ok = worst <= 1e-10 and at_zero <= 1e-10
    report("4a F_wa maximum curve", ok,
           f"max deviation {worst:.2e} on 1000 points, F_wa(sqrt2*pi)={at_zero:.2e} (tol 1e-10)",
           time.perf_counter() - t0, 1)


def test_04b_fa_stated_value_at_peak():
    # The stated value is 2t^2.  The formula gives t^2 here (sin^2 = 1, cos(pi) + 3 = 2),
    # and 2t^2 is above the pure-state ceiling t^2.  Kept as stated; see the decisions ledger.
    t0 = time.perf_counter()
    p = LambdaParams().with_alpha(math.pi / 2)
    t = math.pi / math.sqrt(2)
    f = est.qfi_single(p, t, "wa")
    target = 2 * t * t
    ok = abs(f - target) <= 1e-10 * target
    report("4b F_wa at t*Omega'=pi/sqrt2 equals 2t^2", ok,
           f"F_wa={f:.12g}, 2t^2={target:.12g}, t^2={t * t:.12g}", time.perf_counter() - t0, 1)


def test_05_cpt_extremes():
    t0 = time.perf_counter()
    p = model.cpt_params(1.0)
    worst_a = worst_bc = 0.0
    for t in np.linspace(0, 20, 1000):
        worst_a = max(worst_a, est.qfi_single(p, t, "wa"))
        for k in ("wb", "wc"):
            worst_bc = max(worst_bc, abs(est.qfi_single(p, t, k) - t * t) / max(1.0, t * t))
    ok = worst_a <= 1e-10 and worst_bc <= 1e-10
    report("5 CPT extremes", ok, f"max F_wa={worst_a:.2e}, max |F_wb,c - t^2|/max(1,t^2)={worst_bc:.2e} (tol 1e-10)",
           time.perf_counter() - t0, 1)


def test_06_asymptotic_limits():
    t0 = time.perf_counter()
    t = 2.0
    base = LambdaParams().with_alpha(math.pi / 2)
    ratios = (10, 100, 1000)
    dev_b = [abs(est.qfi_single(base.replace(omega_R1=1, omega_R2=r), t, "wb") - t * t) / (t * t) for r in ratios]
    dev_c = [abs(est.qfi_single(base.replace(omega_R1=r, omega_R2=1), t, "wc") - t * t) / (t * t) for r in ratios]
    mono = all(d[0] >= d[1] >= d[2] for d in (dev_b, dev_c))
    ok = mono and dev_b[-1] < 0.01 and dev_c[-1] < 0.01
    report("6 asymptotic limits", ok,
           "rel. distance to t^2, ratio 10/100/1000: F_wb " + "/".join(f"{d:.1e}" for d in dev_b)
           + ", F_wc " + "/".join(f"{d:.1e}" for d in dev_c) + " (monotone, < 1% at 1000)",
           time.perf_counter() - t0, 2)


def test_07_hss_identity_and_extrema():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in range(10_000):
        p = random_params(rng)
        t = rng.uniform(0, 20 / p.Omega)
        k = model.PARAMETERS[n % 3]
        f, h = est.qfi_single(p, t, k), est.hss(p, t, k)
        worst = max(worst, deviation(f, 4 * h * h, rel=1e-8, abs_floor=1e-12))
    r = sweep.run_sweep(sweep.load_preset("fig5"))
    matched = {k: sweep.extrema_match(r.column(f"F_{k}"), r.column(f"HSS_{k}")).matched for k in model.PARAMETERS}
    ok = worst < 1e-8 and all(matched.values()) and len(r.rows) == 2000
    report("7 QFI = 4 HSS^2 and fig5 preset extrema", ok,
           f"max deviation {worst:.2e} on 10^4 points; extrema matched {matched}", time.perf_counter() - t0, 10)


def test_08_saturability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        p = random_params(rng)
        t = rng.uniform(0, 20 / p.Omega)
        worst = max(worst, est.saturability_witness(p, t, "wa+wb+wc"))
    report("8 saturability witness", worst < 1e-8, f"max |Tr(rho[L_i,L_j])| = {worst:.2e} (tol 1e-8)",
           time.perf_counter() - t0, 5)


def test_09_ratios():
    t0 = time.perf_counter()
    cpt = model.cpt_params(1.0)
    times = np.linspace(0.1, 20, 50)
    r_cpt = [est.performance_ratio(est.qfim(cpt, t, s)) for t in times for s in ("wa+wb", "wa+wc")]
    cpt_ok = all(abs(r - 2) <= 1e-8 for r in r_cpt)

    rng = np.random.default_rng(9)
    lo, hi, n_inv = math.inf, -math.inf, 0
    for _ in range(1000):
        p = random_params(rng)
        t = rng.uniform(0.1, 20 / p.Omega)
        for s in ("wa+wb", "wa+wc", "wb+wc"):
            try:
                r = est.performance_ratio(est.qfim(p, t, s))
            except (SingularQFIM, ZeroDiagonal):
                continue
            n_inv += 1
            lo, hi = min(lo, r), max(hi, r)
    range_ok = lo >= -1e-10 and hi <= 2 + 1e-10

    degenerate = 0
    for t in times:
        try:
            est.performance_ratio(est.qfim(cpt, t, "wb+wc"))
        except (SingularQFIM, ZeroDiagonal):
            degenerate += 1
    degenerate_ok = degenerate == len(times)

    p0 = LambdaParams().with_alpha(0.0)
    F = est.qfim(p0, math.pi / math.sqrt(2), "wb+wc")
    off = abs(F["wb", "wc"])
    r0 = est.performance_ratio(F)
    special_ok = off < 1e-8 and abs(r0 - 2) <= 1e-6

    ok = cpt_ok and range_ok and degenerate_ok and special_ok
    report("9 multi-parameter ratios", ok,
           f"CPT R_ab,R_ac max |R-2|={max(abs(r - 2) for r in r_cpt):.1e}; R in [{lo:.3g}, {hi:.12g}] on {n_inv} "
           f"invertible cases; wb+wc at CPT degenerate {degenerate}/{len(times)}; alpha=0 off-diag {off:.1e}, R={r0}",
           time.perf_counter() - t0, 5)


def test_10_information_hierarchy():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    low = math.inf
    for _ in range(50):
        p = random_params(rng)
        t = rng.uniform(0, 20 / p.Omega)
        povm = POVM.projective(random_unitary(rng))
        F = est.qfim(p, t, "wa+wb+wc").entries
        I = est.cfim(p, t, povm, "wa+wb+wc")
        low = min(low, float(np.min(np.linalg.eigvalsh(F - I))))
    worst = 0.0
    for _ in range(50):
        p = random_params(rng)
        t = rng.uniform(0, 20 / p.Omega)
        for k in model.PARAMETERS:
            rho, ls = est.model_slds(p, t, [k])
            I = est.cfim(p, t, POVM.eigenbasis(ls[k].matrix), [k])[0, 0]
            worst = max(worst, abs(I - est.qfi_single(p, t, k)))
    ok = low >= -1e-6 and worst <= 1e-6
    report("10 information hierarchy", ok,
           f"min eig(F - I) = {low:.2e} over 50 POVMs; SLD-basis |I - F| max {worst:.2e} (tol 1e-6)",
           time.perf_counter() - t0, 10)


def test_11_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    names = sweep.preset_names()
    outputs = {}
    for run in (1, 2):
        for name in names:
            dest = tmp_path / f"{name}.{run}.csv"
            code = main(["sweep", "--preset", name, "--quiet", "--output", str(dest)], io.StringIO(), io.StringIO())
            assert code == 0, name
            outputs.setdefault(name, []).append(dest.read_bytes())
    elapsed = time.perf_counter() - t0
    differing = [n for n, (a, b) in outputs.items() if a != b]
    ok = not differing and elapsed < 30
    report("11 CLI determinism", ok,
           f"{len(names)} presets x 2 runs, differing: {differing or 'none'}, two passes in {elapsed:.1f} s (< 30 s)",
           elapsed, 30)
