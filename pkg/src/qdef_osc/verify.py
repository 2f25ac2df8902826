"""Invariant suite behind ``qdef-osc verify``.

Every check returns a measured error and the tolerance it must not exceed;
tolerances are multiplied by a user-supplied scale (``--tol``).  Checks whose
tolerance is 0 (counts, inequalities) are not scaled.
"""

import json
import math
import time
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import classical as C
from . import quantum as Q
from ._kernels import backend
from ._version import __version__
from .q_calculus import (
    Deformation, RealFunctionHandle, dual_q_derivative, dual_q_derivative_second,
    q_add, q_derivative, q_exp, q_ln,
)
from .series import SeriesTable, base_meta

MUTATIONS = ("flip-force",)


@dataclass
class CheckResult:
    name: str
    group: str
    measured: float
    tolerance: float
    passed: bool
    margin: float
    seconds: float
    detail: str = ""


_REGISTRY = []


def check(group, tolerance):
    def deco(fn):
        _REGISTRY.append((fn.__name__, group, tolerance, fn))
        return fn
    return deco


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# q-calculus
# ---------------------------------------------------------------------------

def _random_in_domain(rng, count):
    q = rng.uniform(0.0, 2.0, count)
    a = rng.uniform(-0.4, 0.4, count)
    b = rng.uniform(-0.4, 0.4, count)
    return q, a, b


@check("q_calculus", 1e-12)
def q_round_trips(ctx):
    rng = np.random.default_rng(11)
    worst = 0.0
    for q, u, _ in zip(*_random_in_domain(rng, 1000)):
        d = Deformation(q)
        worst = max(worst, abs(q_ln(d, q_exp(d, u)) - u))
        v = 0.2 + abs(u) * 4
        worst = max(worst, abs(q_exp(d, q_ln(d, v)) - v))
    return worst


@check("q_calculus", 1e-10)
def q_group_law(ctx):
    rng = np.random.default_rng(12)
    worst = 0.0
    for q, a, b in zip(*_random_in_domain(rng, 1000)):
        d = Deformation(q)
        s = q_add(d, a, b)
        if 1.0 + d.kappa * s <= 0:
            continue
        worst = max(worst, _rel(q_exp(d, a) * q_exp(d, b), q_exp(d, s)))
    return worst


@check("q_calculus", 1e-6)
def q_to_one_continuity(ctx):
    rng = np.random.default_rng(13)
    worst = 0.0
    for q in (1.0 - 1e-9, 1.0 + 1e-9):
        d = Deformation(q)
        for u in rng.uniform(-2, 2, 200):
            worst = max(worst, _rel(q_exp(d, u), math.exp(u)))
            v = abs(u) + 0.1
            worst = max(worst, abs(q_ln(d, v) - math.log(v)))
            worst = max(worst, _rel(q_derivative(d, math.sin, u), math.cos(u)) if abs(math.cos(u)) > 1e-3 else 0.0)
    return worst


@check("q_calculus", 1e-8)
def q_eigenfunctions(ctx):
    rng = np.random.default_rng(14)
    worst = 0.0
    for q, u, _ in zip(*_random_in_domain(rng, 1000)):
        d = Deformation(q)
        worst = max(worst, _rel(q_derivative(d, lambda v: q_exp(d, v), u), q_exp(d, u)))
        v = 0.5 + abs(u) * 3
        worst = max(worst, _rel(dual_q_derivative(d, lambda w: q_ln(d, w), v), 1.0 / v))
    return worst


@check("q_calculus", 1e-8)
def q_duality(ctx):
    rng = np.random.default_rng(15)
    worst = 0.0
    for q, xv, _ in zip(*_random_in_domain(rng, 1000)):
        d = Deformation(q)
        y = q_exp(d, xv)
        lhs = dual_q_derivative(d, lambda w: q_ln(d, w), y)  # inverse function x(y)
        rhs = q_derivative(d, lambda w: q_exp(d, w), xv)
        worst = max(worst, abs(lhs * rhs - 1.0))
    return worst


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

@check("classical", 1e-6)
def period_law(ctx):
    sign = -1.0 if ctx.get("mutation") == "flip-force" else 1.0
    worst = 0.0
    for g in np.arange(1, 10) / 10:
        cfg = C.OscillatorConfig.from_gamma_a(float(g))
        tau = C.measured_period(cfg, force_sign=sign)
        worst = max(worst, _rel(tau, C.period(cfg)) if math.isfinite(tau) else math.inf)
    return worst


@check("classical", 1e-6)
def integrator_vs_analytic(ctx):
    sign = -1.0 if ctx.get("mutation") == "flip-force" else 1.0
    cfg = C.OscillatorConfig.from_gamma_a(0.5)
    try:
        tab = C.integrate_motion(cfg, C.initial_state(cfg), 10 * C.period(cfg), cfg.tau0 / 2000, force_sign=sign)
    except Exception:
        return math.inf
    return float(np.max(np.abs(tab["x"] - C.analytic_position(cfg, tab["t"]))) / cfg.A)


@check("classical", 1e-9)
def energy_drift(ctx):
    worst = 0.0
    for g in (0.0, 0.5, 0.9):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tab = C.integrate_motion(cfg, C.initial_state(cfg), 10 * C.period(cfg), cfg.tau0 / 2000)
        worst = max(worst, float(np.max(np.abs(tab["E"] / cfg.E - 1.0))))
    return worst


@check("classical", 1e-6)
def deformed_newton_law(ctx):
    worst = 0.0
    for g in (0.1, 0.5, 0.9):
        cfg = C.OscillatorConfig.from_gamma_a(g, delta=0.3)
        ts = np.linspace(0.0, 2.0 * C.period(cfg), 100)
        f = RealFunctionHandle(lambda t: C.analytic_position(cfg, t), lambda t: C.analytic_velocity(cfg, t))
        lhs = dual_q_derivative_second(cfg.deformation, f, ts)
        rhs = -cfg.omega0**2 * C.analytic_position(cfg, ts)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / (cfg.omega0**2 * cfg.A))
    return worst


@check("classical", 1e-12)
def canonical_energy_invariance(ctx):
    rng = np.random.default_rng(21)
    worst = 0.0
    for _ in range(100):
        g = rng.uniform(-2, 2)
        cfg = C.OscillatorConfig(gamma_q=g, A=1.0)
        x = (rng.uniform(0.05, 4.0) - 1.0) / g  # 1 + gamma x in (0.05, 4)
        s = C.PhaseState(0.0, x, rng.uniform(-3, 3))
        worst = max(worst, _rel(C.morse_hamiltonian(cfg, C.canonical_map(cfg, s)), C.hamiltonian(cfg, s)))
    return worst


@check("classical", 1e-8)
def poisson_bracket(ctx):
    rng = np.random.default_rng(22)
    worst = 0.0
    for _ in range(100):
        cfg = C.OscillatorConfig(gamma_q=rng.uniform(-1, 1), A=1.0)
        s = C.PhaseState(0.0, rng.uniform(-0.5, 0.5), rng.uniform(-2, 2))
        worst = max(worst, abs(C.poisson_bracket_xq_pq(cfg, s) - 1.0))
    return worst


@check("classical", 1e-3)
def open_regime_t_star(ctx):
    worst = 0.0
    for g in (1.01, 2.0, 10.0):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tab = C.open_orbit_trajectory(cfg, 3.0 * cfg.tau0, cfg.tau0 / 20000)
        i = int(np.argmax(np.abs(tab["v"])))
        worst = max(worst, abs(tab["t"][i] - C.t_star(cfg)) / cfg.tau0)
    return worst


@check("classical", 1e-3)
def open_regime_asymptote(ctx):
    cfg = C.OscillatorConfig.from_gamma_a(10.0)
    x = C.open_orbit_position(cfg, 10.0 * cfg.tau0)
    return abs(x + 1.0 / cfg.gamma_q) / cfg.A


@check("classical", 0.0)
def open_regime_monotone_bounded(ctx):
    # x > -1/gamma is checked in the deformed chart, where it means finite x_q;
    # in x itself the last digits round onto the pole
    bad = 0
    for g in (1.01, 2.0, 10.0):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tab = C.open_orbit_trajectory(cfg, 10.0 * cfg.tau0)
        xq = tab["x_q"]
        bad += int(np.count_nonzero(np.diff(xq) >= 0))
        bad += int(np.count_nonzero(np.diff(tab["x"]) > 0))
        bad += int(np.count_nonzero(~np.isfinite(xq)))
        bad += int(np.count_nonzero(tab["x"] > cfg.A * (1.0 + 4.0 * np.finfo(float).eps)))
    return float(bad)


@check("classical", 1e-6)
def open_regime_momentum(ctx):
    """|p_q| never exceeds m0 omega0 A and tends to the asymptotic value."""
    worst = 0.0
    for g in (1.01, 2.0, 10.0):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        tab = C.open_orbit_trajectory(cfg, 40.0 * cfg.tau0)
        pq = np.abs(tab["p_q"])
        worst = max(worst, max(0.0, float(pq.max()) / C.p_q_sup(cfg) - 1.0))
        worst = max(worst, _rel(float(pq[-1]), C.p_q_asymptote(cfg)))
    return worst


@check("classical", 1e-8)
def classical_moments(ctx):
    worst = 0.0
    for g in (0.1, 0.5, 0.9):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        a, b = C.classical_moments(cfg), C.moments_by_quadrature(cfg)
        for u, v in ((a.x_mean, b.x_mean), (a.x2_mean, b.x2_mean), (a.p2_mean, b.p2_mean)):
            worst = max(worst, _rel(v, u))
    return worst


@check("classical", 1e-10)
def classical_virial(ctx):
    worst = 0.0
    for g in (0.1, 0.5, 0.9):
        cfg = C.OscillatorConfig.from_gamma_a(g)
        worst = max(worst, abs(C.virial_classical(cfg)[2] - math.sqrt(1 - g * g)))
    return worst


@check("classical", 1e-2)
def ergodic_histogram(ctx):
    return max(C.ergodic_histogram_l1(C.OscillatorConfig.from_gamma_a(g)) for g in (0.5, 0.9))


# ---------------------------------------------------------------------------
# quantum
# ---------------------------------------------------------------------------

@check("quantum", 1e-6)
def wkb_levels(ctx):
    m = Q.QuantumModel.from_gamma_x0(0.3)
    return max(abs(C.wkb_action(m, Q.energy_level(m, n)) - n) for n in range(6))


@check("quantum", 0.0)
def bound_state_count(ctx):
    m = Q.QuantumModel.from_gamma_x0(0.3)
    below = all(Q.energy_level(m, n) < m.W_q for n in range(m.n_max + 1))
    return float(abs(m.n_max + 1 - 11) + (0 if below else 1))


@check("quantum", 1e-6)
def schrodinger_residual(ctx):
    return max(Q.schrodinger_residual(Q.QuantumModel.from_gamma_x0(g), n)
               for g in (0.1, 0.2, 0.3) for n in range(6))


@check("quantum", 1e-6)
def deformed_schrodinger_residual(ctx):
    return max(Q.deformed_residual(Q.QuantumModel.from_gamma_x0(0.2), n) for n in range(4))


@check("quantum", 1e-7)
def orthonormality(ctx):
    worst = 0.0
    for g in (0.1, 0.2, 0.3):
        m = Q.QuantumModel.from_gamma_x0(g)
        for i in range(6):
            for j in range(i + 1):
                worst = max(worst, abs(Q.inner_product(m, i, j) - (1.0 if i == j else 0.0)))
    return worst


@check("quantum", 0.0)
def node_counts(ctx):
    return float(sum(Q.node_count(Q.QuantumModel.from_gamma_x0(g), n) != n for g in (0.1, 0.2, 0.3) for n in range(6)))


@check("quantum", 1e-6)
def quantum_moments(ctx):
    worst = 0.0
    for g in (0.1, 0.2, 0.3):
        m = Q.QuantumModel.from_gamma_x0(g)
        for n in range(6):
            a, b = Q.expectation_values(m, n), Q.expectations_by_quadrature(m, n)
            worst = max(worst, _rel(b.x, a.x), _rel(b.x2, a.x2), _rel(b.p2, a.p2))
    return worst


@check("quantum", 1e-10)
def quantum_virial(ctx):
    m = Q.QuantumModel.from_gamma_x0(0.3)
    worst = 0.0
    for n in range(6):
        a = Q.amplitude(m, n)
        worst = max(worst, abs(Q.virial_quantum(m, n)[2] - math.sqrt(1 - (m.gamma_q * a) ** 2)))
    return worst


@check("quantum", 0.0)
def uncertainty_bound(ctx):
    worst = -math.inf
    for g in np.arange(1, 8) * 0.05:
        m = Q.QuantumModel.from_gamma_x0(float(g))
        for n in range(m.n_max + 1):
            worst = max(worst, 0.5 * m.hbar - Q.uncertainties(m, n).product)
    return max(worst, 0.0)


@check("quantum", 0.05)
def correspondence(ctx):
    return Q.correspondence_check(Q.QuantumModel.from_gamma_x0(0.2), 10).mean_abs


@check("limits", 1e-4)
def sho_limits(ctx):
    g = 1e-6
    worst = 0.0
    cfg = C.OscillatorConfig.from_gamma_a(g)
    ts = np.linspace(0, 2 * math.pi, 50)
    worst = max(worst, float(np.max(np.abs(C.analytic_position(cfg, ts) - np.cos(ts)))))
    worst = max(worst, _rel(C.period(cfg), 2 * math.pi))
    mom = C.classical_moments(cfg)
    worst = max(worst, abs(mom.x_mean), _rel(mom.x2_mean, 0.5), _rel(mom.p2_mean, 0.5))
    m, s = Q.QuantumModel.from_gamma_x0(g), Q.QuantumModel()
    x = np.linspace(-6, 6, 401)
    for n in range(4):
        worst = max(worst, _rel(Q.energy_level(m, n), n + 0.5))
        worst = max(worst, float(np.max(np.abs(Q.wavefunction(m, n, x) - Q.wavefunction(s, n, x)))))
        ev = Q.expectation_values(m, n)
        worst = max(worst, abs(ev.x), _rel(ev.x2, n + 0.5), _rel(ev.p2, n + 0.5))
        worst = max(worst, _rel(Q.uncertainties(m, n).product, n + 0.5))
    return worst


@check("io", 0.0)
def table_round_trip(ctx):
    cfg = C.OscillatorConfig.from_gamma_a(0.5)
    tab = C.trajectory_table(cfg, np.linspace(0, C.period(cfg), 257))
    bad = 0
    for fmt in ("csv", "json"):
        text = tab.to_csv() if fmt == "csv" else tab.to_json()
        back = SeriesTable.from_csv(text) if fmt == "csv" else SeriesTable.from_json(text)
        bad += int(back != tab)
        bad += int((back.to_csv() if fmt == "csv" else back.to_json()) != text)
    return float(bad)


# ---------------------------------------------------------------------------

def check_names():
    return [name for name, *_ in _REGISTRY]


def run(tol_scale=1.0, mutation=None, only=None):
    """Run the suite; returns a JSON-serialisable report dict."""
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    ctx = {"mutation": mutation}
    results = []
    for name, group, tol, fn in _REGISTRY:
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        detail = ""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                measured = float(fn(ctx))
            except Exception as exc:  # a crashing check is a failed check
                measured, detail = math.inf, f"{type(exc).__name__}: {exc}"
        limit = tol * tol_scale if tol > 0 else 0.0
        ok = math.isfinite(measured) and measured <= limit
        results.append(CheckResult(name, group, measured, limit, ok, limit - measured,
                                   time.perf_counter() - t0, detail))
    return {
        "meta": base_meta(tol_scale=tol_scale, mutation=mutation, backend=backend()),
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "n_failed": sum(not r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }


def report_json(report):
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return v

    doc = dict(report)
    doc["checks"] = [{k: clean(v) for k, v in c.items()} for c in report["checks"]]
    return json.dumps(doc, indent=2) + "\n"


__all__ = ["run", "report_json", "check_names", "MUTATIONS", "CheckResult", "__version__"]
