"""Acceptance criteria 1-12.

Each criterion prints one ``CRITERION nn PASS|FAIL`` line with the measured
figure next to its threshold.  Run under pytest, or directly with
``python tests/test_acceptance.py``.
"""

import json
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
from scipy import special as sp

from qdef_osc import classical as C
from qdef_osc import quantum as Q
from qdef_osc import verify as V
from qdef_osc.q_calculus import RealFunctionHandle, dual_q_derivative_second
from qdef_osc.series import SeriesTable

G_PERIODIC = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
G_OPEN = (1.01, 2.0, 10.0)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def period_error(force_sign=1.0):
    worst = 0.0
    for g in G_PERIODIC:
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tau = 2 * math.pi / (cfg.omega0 * math.sqrt(1 - g * g))
        measured = C.measured_period(cfg, force_sign=force_sign)
        worst = max(worst, _rel(measured, tau) if math.isfinite(measured) else math.inf)
    return worst


def c01():
    err = period_error()
    return err < 1e-6, f"max rel period error {err:.2e} (< 1e-6) over gamma*A = 0.1..0.9"


def c02():
    worst = 0.0
    for g in G_PERIODIC:
        cfg = C.OscillatorConfig.from_gamma_a(g, delta=0.3)
        ts = np.linspace(0.0, 2.0 * C.period(cfg), 100)
        f = RealFunctionHandle(lambda t: C.analytic_position(cfg, t), lambda t: C.analytic_velocity(cfg, t))
        lhs = dual_q_derivative_second(cfg.deformation, f, ts)
        rhs = -cfg.omega0**2 * C.analytic_position(cfg, ts)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / (cfg.omega0**2 * cfg.A))
    return worst < 1e-6, f"sup |D2 x + w0^2 x| / (w0^2 A) = {worst:.2e} (< 1e-6), 100 times x 9 gammas"


def c03():
    rng = np.random.default_rng(2024)
    worst_h = worst_pb = 0.0
    for _ in range(100):
        g = rng.uniform(-2, 2)
        cfg = C.OscillatorConfig(gamma_q=g, A=1.0)
        x = (rng.uniform(0.05, 4.0) - 1.0) / g
        s = C.PhaseState(0.0, x, rng.uniform(-3, 3))
        H = C.hamiltonian(cfg, s)
        K = C.morse_hamiltonian(cfg, C.canonical_map(cfg, s))
        worst_h = max(worst_h, abs(H - K) / max(1.0, abs(H)))
        worst_pb = max(worst_pb, abs(C.poisson_bracket_xq_pq(cfg, s) - 1.0))
    ok = worst_h < 1e-12 and worst_pb < 1e-8
    return ok, f"|H-K| = {worst_h:.1e} (< 1e-12); |{{x_q,p_q}} - 1| = {worst_pb:.1e} (< 1e-8); 100 states"


def c04():
    ok = True
    parts = []
    for g in G_OPEN:
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tab = C.open_orbit_trajectory(cfg, 10 * cfg.tau0)
        x, xq = tab["x"], tab["x_q"]
        # 1 + gamma x = exp(gamma x_q) > 0 exactly; the x column can round to the pole far out
        monotone = bool(np.all(np.diff(xq) <= 0) and np.all(np.isfinite(xq)) and x[0] <= cfg.A * (1 + 4e-16))
        dt_star = abs(tab["t"][np.argmax(np.abs(tab["v"]))] - C.t_star(cfg)) / cfg.tau0
        ok &= monotone and dt_star < 1e-3
        parts.append(f"gA={g:g}: monotone={monotone} |t_peak-t*|/tau0={dt_star:.1e}")
        if g == 10.0:
            tail = abs(x[-1] + 1 / cfg.gamma_q) / cfg.A
            ok &= tail < 1e-3
            parts.append(f"|x(10tau0)+1/gamma|/A={tail:.1e} (< 1e-3)")
    return ok, "; ".join(parts)


def c05():
    worst_m = worst_v = worst_h = 0.0
    for g in G_PERIODIC:
        cfg = C.OscillatorConfig.from_gamma_a(g)
        closed, quad = C.classical_moments(cfg), C.moments_by_quadrature(cfg)
        worst_m = max(worst_m, max(abs(a - b) for a, b in zip(closed, quad)))
        worst_v = max(worst_v, abs(C.virial_classical(cfg)[2] - math.sqrt(1 - g * g)))
    for g in (0.3, 0.9):
        worst_h = max(worst_h, C.ergodic_histogram_l1(C.OscillatorConfig.from_gamma_a(g), n_periods=200))
    ok = worst_m < 1e-8 and worst_h < 0.01 and worst_v < 1e-10
    return ok, f"moments {worst_m:.1e} (< 1e-8); histogram L1 {worst_h:.1e} (< 1e-2); virial {worst_v:.1e} (< 1e-10)"


def c06():
    m = Q.QuantumModel.from_gamma_x0(0.3)
    wkb = max(abs(C.wkb_action(m, Q.energy_level(m, n)) - n) for n in range(6))
    levels = Q.spectrum(m)
    below = all(E < m.W_q for _, E, *_ in levels)
    ok = wkb < 1e-6 and len(levels) == 11 and below
    return ok, f"|n(E_n) - n| = {wkb:.1e} (< 1e-6); bound states {len(levels)} (= 11); E_n < W_q: {below}"


def c07():
    res = orth = 0.0
    nodes_ok = True
    for gx in (0.1, 0.2, 0.3):
        m = Q.QuantumModel.from_gamma_x0(gx)
        for n in range(6):
            res = max(res, Q.schrodinger_residual(m, n))
            orth = max(orth, abs(Q.norm_by_quadrature(m, n) - 1.0))
            for k in range(n):
                orth = max(orth, abs(Q.inner_product(m, n, k)))
            nodes_ok &= Q.node_count(m, n) == n
    ok = res < 1e-6 and orth < 1e-7 and nodes_ok
    return ok, f"residual {res:.1e} (< 1e-6); orthonormality {orth:.1e} (< 1e-7); nodes = n: {nodes_ok}"


def c08():
    mom = vir = 0.0
    min_ratio = math.inf
    tested = 0
    for gx in (0.1, 0.2, 0.3):
        m = Q.QuantumModel.from_gamma_x0(gx)
        for n in range(6):
            ev, qv = Q.expectation_values(m, n), Q.expectations_by_quadrature(m, n)
            mom = max(mom, abs(qv.x - ev.x), _rel(qv.x2, ev.x2), _rel(qv.p2, ev.p2))
        for n in range(m.n_max + 1):
            _, _, r = Q.virial_quantum(m, n)
            vir = max(vir, abs(r - math.sqrt(1 - (m.gamma_q * Q.amplitude(m, n)) ** 2)))
            min_ratio = min(min_ratio, Q.uncertainties(m, n).product / (0.5 * m.hbar))
            tested += 1
    ok = mom < 1e-6 and vir < 1e-10 and min_ratio >= 1.0
    return ok, (f"moments {mom:.1e} (< 1e-6); virial {vir:.1e} (< 1e-10); "
                f"min dx*dp/(hbar/2) = {min_ratio:.4f} (>= 1) over {tested} states")


def c09():
    c = Q.correspondence_check(Q.QuantumModel.from_gamma_x0(0.2), 10)
    return c.mean_abs < 0.05, (f"mean |<|psi_10|^2>_window - P_cl| = {c.mean_abs:.4f} (< 0.05) on the clipped interior; "
                              f"integrated L1 = {c.l1:.3f}")


def c10():
    g = 1e-6
    worst = 0.0
    cfg = C.OscillatorConfig.from_gamma_a(g, delta=0.4)
    ts = np.linspace(0, 4 * math.pi, 200)
    worst = max(worst, float(np.max(np.abs(C.analytic_position(cfg, ts) - np.cos(ts + 0.4)))))
    rk = C.integrate_motion(cfg, C.initial_state(cfg), 4 * math.pi, 1e-3)
    worst = max(worst, float(np.max(np.abs(rk["x"] - np.cos(rk["t"] + 0.4)))))
    worst = max(worst, _rel(C.period(cfg), 2 * math.pi))
    cm = C.classical_moments(cfg)
    worst = max(worst, abs(cm.x_mean), _rel(cm.x2_mean, 0.5), _rel(cm.p2_mean, 0.5))
    m = Q.QuantumModel.from_gamma_x0(g)
    xi = np.linspace(-6, 6, 241)
    for n in range(6):
        herm = sp.eval_hermite(n, xi) * np.exp(-xi**2 / 2) / math.sqrt(2**n * math.factorial(n) * math.sqrt(math.pi))
        worst = max(worst, float(np.max(np.abs(Q.wavefunction(m, n, xi) - herm))))
        worst = max(worst, _rel(Q.energy_level(m, n), n + 0.5))
        ev = Q.expectation_values(m, n)
        worst = max(worst, abs(ev.x), _rel(ev.x2, n + 0.5), _rel(ev.p2, n + 0.5))
        worst = max(worst, _rel(Q.uncertainties(m, n).product, n + 0.5))
    return worst <= 1e-4, f"max deviation from the textbook oscillator {worst:.1e} (<= 1e-4) at gamma = 1e-6"


Q_CHECKS = ("q_round_trips", "q_group_law", "q_to_one_continuity", "q_eigenfunctions", "q_duality")


def c11():
    report = V.run(only=Q_CHECKS)
    worst = ", ".join(f"{c['name']}={c['measured']:.1e}/{c['tolerance']:.0e}" for c in report["checks"])
    return report["passed"] and report["n_checks"] == len(Q_CHECKS), worst


def _cli(*args, env_extra=None):
    env = dict(os.environ, QDEF_OSC_NATURAL_UNITS="1", **(env_extra or {}))
    return subprocess.run([sys.executable, "-m", "qdef_osc", *args], env=env, capture_output=True, text=True)


def c12():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        ok_run = _cli("verify", "--out", str(tmp / "report.json"))
        report = json.loads((tmp / "report.json").read_text())
        green = ok_run.returncode == 0 and report["passed"]
        stable = True
        for fmt in ("csv", "json"):
            _cli("classical", "--gamma", "0.5,2", "--samples", "200", "--format", fmt, "--out", str(tmp / fmt))
            _cli("wavefunctions", "--gamma", "0.3", "--n", "0,4", "--format", fmt, "--out", str(tmp / fmt))
            files = sorted((tmp / fmt).glob(f"*.{fmt}"))
            stable &= len(files) == 3
            for f in files:
                text = f.read_text()
                back = SeriesTable.read(f)
                stable &= (back.to_csv() if fmt == "csv" else back.to_json()) == text
        mutant = _cli("verify", "--mutation", "flip-force", "--out", str(tmp / "mutant.json"))
        mrep = json.loads((tmp / "mutant.json").read_text())
        period_failed = not next(c for c in mrep["checks"] if c["name"] == "period_law")["passed"]
        canary = period_error(force_sign=-1.0)
        caught = mutant.returncode == 3 and period_failed and not canary < 1e-6
    ok = green and stable and caught
    return ok, (f"verify exit {ok_run.returncode} ({report['n_checks'] - report['n_failed']}/{report['n_checks']} green); "
                f"round trip byte-stable: {stable}; flip-force -> exit {mutant.returncode}, "
                f"criterion 1 error {canary:.1e}")


CRITERIA = [
    (1, "period law", c01),
    (2, "deformed Newton law", c02),
    (3, "canonical map invariance", c03),
    (4, "open regime", c04),
    (5, "classical statistics", c05),
    (6, "spectrum", c06),
    (7, "eigenfunctions", c07),
    (8, "quantum moments", c08),
    (9, "correspondence", c09),
    (10, "SHO limits", c10),
    (11, "q-calculus suite", c11),
    (12, "infrastructure", c12),
]


def _line(num, title, ok, detail):
    return f"CRITERION {num:02d} {'PASS' if ok else 'FAIL'} [{title}] {detail}"


def _run(report, num):
    _, title, fn = CRITERIA[num - 1]
    ok, detail = fn()
    report(_line(num, title, ok, detail))
    assert ok, detail


def test_criterion_01_period_law(report):
    _run(report, 1)


def test_criterion_02_deformed_newton_law(report):
    _run(report, 2)


def test_criterion_03_canonical_map(report):
    _run(report, 3)


def test_criterion_04_open_regime(report):
    _run(report, 4)


def test_criterion_05_classical_statistics(report):
    _run(report, 5)


def test_criterion_06_spectrum(report):
    _run(report, 6)


def test_criterion_07_eigenfunctions(report):
    _run(report, 7)


def test_criterion_08_quantum_moments(report):
    _run(report, 8)


def test_criterion_09_correspondence(report):
    _run(report, 9)


def test_criterion_10_sho_limits(report):
    _run(report, 10)


def test_criterion_11_q_calculus(report):
    _run(report, 11)


def test_criterion_12_infrastructure(report):
    _run(report, 12)


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(_line(num, title, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
