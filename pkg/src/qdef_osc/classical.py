"""Classical oscillator with position-dependent mass m(x) = m0/(1 + gamma x)^2.

The Hamiltonian H = p^2 (1 + gamma x)^2 / (2 m0) + m0 omega0^2 x^2 / 2 is mapped by
x_q = ln(1 + gamma x)/gamma, p_q = (1 + gamma x) p onto a constant-mass Morse
oscillator K = p_q^2/(2 m0) + W_q (exp(gamma x_q) - 1)^2 with W_q = m0 omega0^2/(2 gamma^2).

Closed orbits exist for g = gamma*A < 1 (E < W_q); for g > 1 the particle
falls towards the pole x = -1/gamma and never returns.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError, RegimeError
from .q_calculus import Deformation, q_integral
from .series import SeriesTable, base_meta
from .special import QuadratureSpec, adaptive_quad, central_diff

#: integration aborts when 1 + gamma x drops below this
POLE_GUARD = 1e-8
#: default series resolution
SAMPLES_PER_PERIOD = 2000

_TIGHT = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13)


@dataclass(frozen=True)
class OscillatorConfig:
    m0: float = 1.0
    omega0: float = 1.0
    gamma_q: float = 0.0
    A: Optional[float] = None
    E: Optional[float] = None
    delta: float = 0.0

    def __post_init__(self):
        if not (self.m0 > 0 and self.omega0 > 0):
            raise DomainError("m0 and omega0 must be positive")
        A, E = self.A, self.E
        if A is None and E is None:
            raise DomainError("give the amplitude A or the energy E")
        if A is None:
            if E < 0:
                raise DomainError("energy must be non-negative")
            A = math.sqrt(2.0 * E / (self.m0 * self.omega0**2))
        elif A < 0:
            raise DomainError("amplitude must be non-negative")
        E_from_A = 0.5 * self.m0 * self.omega0**2 * A * A
        if E is not None and abs(E - E_from_A) > 1e-12 * max(abs(E), abs(E_from_A)):
            raise DomainError(f"inconsistent A={A} and E={E}: E should be {E_from_A}")
        object.__setattr__(self, "A", float(A))
        object.__setattr__(self, "E", float(E_from_A if E is None else E))

    @classmethod
    def from_gamma_a(cls, gamma_a, A=1.0, **kwargs):
        """Config with dimensionless control g = gamma_q*A."""
        if A <= 0:
            raise DomainError("from_gamma_a needs a positive amplitude")
        return cls(gamma_q=gamma_a / A, A=A, **kwargs)

    @property
    def k(self):
        return self.m0 * self.omega0**2

    @property
    def g(self):
        """gamma_q * A."""
        return self.gamma_q * self.A

    @property
    def tau0(self):
        return 2.0 * math.pi / self.omega0

    @property
    def is_periodic(self):
        return abs(self.g) < 1.0

    @property
    def deformation(self):
        return Deformation.from_gamma(self.gamma_q)

    @property
    def morse(self):
        return MorseParams.from_config(self)


class PhaseState(NamedTuple):
    t: float
    x: float
    p: float


class DeformedPhaseState(NamedTuple):
    t: float
    x_q: float
    p_q: float


@dataclass(frozen=True)
class MorseParams:
    W_q: float
    alpha_q: float

    @classmethod
    def from_config(cls, cfg):
        if cfg.gamma_q == 0:
            return cls(math.inf, 0.0)
        return cls(cfg.m0 * cfg.omega0**2 / (2.0 * cfg.gamma_q**2), -cfg.gamma_q)


def _check_domain(gamma, x):
    if np.any(~(1.0 + gamma * np.asarray(x, dtype=np.float64) > 0)):
        raise DomainError(f"position at or beyond the pole x = -1/gamma = {-1.0 / gamma:g}")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# mass, Hamiltonians and the canonical map
# ---------------------------------------------------------------------------

def pdm_mass(cfg, x):
    """m(x) = m0/(1 + gamma x)^2."""
    x = np.asarray(x, dtype=np.float64)
    _check_domain(cfg.gamma_q, x)
    return _out(cfg.m0 / (1.0 + cfg.gamma_q * x) ** 2)


def potential(cfg, x):
    return _out(0.5 * cfg.k * np.asarray(x, dtype=np.float64) ** 2)


def hamiltonian(cfg, s):
    x = np.asarray(s.x, dtype=np.float64)
    _check_domain(cfg.gamma_q, x)
    y = 1.0 + cfg.gamma_q * x
    return _out(np.asarray(s.p) ** 2 * y * y / (2.0 * cfg.m0) + 0.5 * cfg.k * x * x)


def morse_potential(cfg, x_q):
    x_q = np.asarray(x_q, dtype=np.float64)
    gamma = cfg.gamma_q
    if gamma == 0:
        return _out(0.5 * cfg.k * x_q * x_q)
    W = cfg.m0 * cfg.omega0**2 / (2.0 * gamma * gamma)
    # W (e^{-alpha x_q} - 1)^2 with alpha = -gamma
    return _out(W * np.expm1(gamma * x_q) ** 2)


def morse_hamiltonian(cfg, sq):
    return _out(np.asarray(sq.p_q) ** 2 / (2.0 * cfg.m0) + morse_potential(cfg, sq.x_q))


def to_deformed_position(gamma, x):
    x = np.asarray(x, dtype=np.float64)
    if gamma == 0:
        return _out(x.copy())
    _check_domain(gamma, x)
    return _out(np.log1p(gamma * x) / gamma)


def from_deformed_position(gamma, x_q):
    x_q = np.asarray(x_q, dtype=np.float64)
    if gamma == 0:
        return _out(x_q.copy())
    return _out(np.expm1(gamma * x_q) / gamma)


def canonical_map(cfg, s):
    """(x, p) -> (x_q, p_q); ``cfg`` is anything with a ``gamma_q`` attribute."""
    gamma = cfg.gamma_q
    x = np.asarray(s.x, dtype=np.float64)
    _check_domain(gamma, x)
    return DeformedPhaseState(s.t, to_deformed_position(gamma, x), _out((1.0 + gamma * x) * np.asarray(s.p)))


def inverse_canonical_map(cfg, sq):
    gamma = cfg.gamma_q
    x = from_deformed_position(gamma, sq.x_q)
    return PhaseState(sq.t, x, _out(np.asarray(sq.p_q) / (1.0 + gamma * np.asarray(x))))


def poisson_bracket_xq_pq(cfg, s, h=None):
    """Finite-difference Poisson bracket {x_q, p_q} in the (x, p) chart; equals 1 for a canonical map."""
    gamma = cfg.gamma_q
    x0, p0 = float(s.x), float(s.p)

    def xq_of_x(x):
        return to_deformed_position(gamma, x)

    def pq_of_x(x):
        return (1.0 + gamma * x) * p0

    def pq_of_p(p):
        return (1.0 + gamma * x0) * p

    dxq_dx = central_diff(xq_of_x, x0, h=h)
    dpq_dp = central_diff(pq_of_p, p0, h=h)
    dpq_dx = central_diff(pq_of_x, x0, h=h)
    dxq_dp = 0.0  # x_q does not depend on p
    return dxq_dx * dpq_dp - dxq_dp * dpq_dx


# ---------------------------------------------------------------------------
# periodic regime: closed forms
# ---------------------------------------------------------------------------

def _require_periodic(cfg):
    if not cfg.is_periodic:
        raise RegimeError(f"gamma*A = {cfg.g:g} >= 1: no periodic orbit (use open_orbit_position)")


def period(cfg):
    """tau_q = 2 pi / (omega0 sqrt(1 - gamma^2 A^2))."""
    _require_periodic(cfg)
    return 2.0 * math.pi / (cfg.omega0 * math.sqrt(1.0 - cfg.g**2))


def phase(cfg, t):
    """Continuous, increasing phase theta_q(t) with x(t) = A cos theta_q(t).

    The single-arctangent closed form jumps at every half period; here the
    reduced argument is wrapped into [-pi, pi], evaluated with atan2 and the
    removed multiples of 2 pi are added back.
    """
    _require_periodic(cfg)
    g = cfg.g
    t = np.asarray(t, dtype=np.float64)
    s = math.sqrt(1.0 - g * g)
    r = math.sqrt((1.0 + g) / (1.0 - g))
    phi = s * (cfg.omega0 * t + cfg.delta)
    turns = np.round(phi / (2.0 * math.pi))
    red = phi - 2.0 * math.pi * turns
    theta = 2.0 * np.arctan2(r * np.sin(0.5 * red), np.cos(0.5 * red))
    return _out(theta + 2.0 * math.pi * turns)


def analytic_position(cfg, t):
    return _out(cfg.A * np.cos(phase(cfg, t)))


def analytic_velocity(cfg, t):
    """xdot = -A omega0 sin(theta)(1 + g cos(theta))."""
    th = np.asarray(phase(cfg, t))
    return _out(-cfg.A * cfg.omega0 * np.sin(th) * (1.0 + cfg.g * np.cos(th)))


def analytic_acceleration(cfg, t):
    th = np.asarray(phase(cfg, t))
    c, s, g = np.cos(th), np.sin(th), cfg.g
    return _out(-cfg.A * cfg.omega0**2 * (1.0 + g * c) * (c * (1.0 + g * c) - g * s * s))


def analytic_momentum(cfg, t):
    """p = m(x) xdot."""
    th = np.asarray(phase(cfg, t))
    return _out(-cfg.m0 * cfg.A * cfg.omega0 * np.sin(th) / (1.0 + cfg.g * np.cos(th)))


def trajectory_table(cfg, t):
    """Analytic trajectory sampled at ``t``: (t, x, v, a, theta_q, p, x_q, p_q, E)."""
    t = np.asarray(t, dtype=np.float64)
    x = analytic_position(cfg, t)
    p = analytic_momentum(cfg, t)
    s = PhaseState(t, x, p)
    sq = canonical_map(cfg, s)
    return SeriesTable.from_columns(
        {
            "t": t,
            "x": x,
            "v": analytic_velocity(cfg, t),
            "a": analytic_acceleration(cfg, t),
            "theta_q": phase(cfg, t),
            "p": p,
            "x_q": sq.x_q,
            "p_q": sq.p_q,
            "E": hamiltonian(cfg, s),
        },
        meta=_cfg_meta(cfg, t),
    )


def _cfg_meta(cfg, t=None, **extra):
    step = float(t[1] - t[0]) if t is not None and len(t) > 1 else None
    return base_meta(
        gamma_q=cfg.gamma_q, A=cfg.A, gamma_q_A=cfg.g, m0=cfg.m0, omega0=cfg.omega0,
        delta=cfg.delta, E=cfg.E, sampling_step=step, **extra,
    )


# ---------------------------------------------------------------------------
# open regime (gamma A > 1)
# ---------------------------------------------------------------------------

def _require_open(cfg):
    if not cfg.g > 1.0:
        raise RegimeError(f"gamma*A = {cfg.g:g} <= 1: the orbit is not open")


def open_regime_timescale(cfg):
    """2 pi / (omega0 sqrt(gamma^2 A^2 - 1)), the modulus of the continued period."""
    _require_open(cfg)
    return 2.0 * math.pi / (cfg.omega0 * math.sqrt(cfg.g**2 - 1.0))


def t_star(cfg):
    """Time (from the turning point x = A) of maximal speed in the open regime.

    The speed (1 + gamma x) omega0 sqrt(A^2 - x^2) peaks at
    x* = (sqrt(1 + 8 g^2) - 1)/(4 gamma); inserting x* into the time law gives
    t* = (tau/pi) atanh sqrt[(g-1)(1+4g-r) / ((g+1)(4g-1+r))],  r = sqrt(1+8g^2).
    """
    tau = open_regime_timescale(cfg)
    g = cfg.g
    r = math.sqrt(1.0 + 8.0 * g * g)
    arg = (g - 1.0) * (1.0 + 4.0 * g - r) / ((g + 1.0) * (4.0 * g - 1.0 + r))
    return tau / math.pi * math.atanh(math.sqrt(arg))


def t_star_alt(cfg):
    """The t* expression with (1 + 4g + r) in the denominator, kept for comparison with :func:`t_star`."""
    tau = open_regime_timescale(cfg)
    g = cfg.g
    r = math.sqrt(1.0 + 8.0 * g * g)
    arg = (g - 1.0) * (1.0 + 4.0 * g - r) / ((g + 1.0) * (1.0 + 4.0 * g + r))
    return tau / math.pi * math.atanh(math.sqrt(arg))


def open_orbit_closed_form(cfg, t):
    """Analytic continuation of x(t) for g > 1 (tan -> tanh), from rest at x = A at t = -delta/omega0."""
    _require_open(cfg)
    g = cfg.g
    tt = np.abs(np.asarray(t, dtype=np.float64) + cfg.delta / cfg.omega0)
    big_t = math.sqrt((g + 1.0) / (g - 1.0)) * np.tanh(0.5 * cfg.omega0 * math.sqrt(g * g - 1.0) * tt)
    return _out(cfg.A * (1.0 - big_t**2) / (1.0 + big_t**2))


def _hermite_interp(tg, y, dy, t):
    """Cubic Hermite interpolation of samples (tg, y, dy) at times t."""
    dt = tg[1] - tg[0]
    idx = np.clip(((t - tg[0]) / dt).astype(int), 0, len(tg) - 2)
    s = (t - tg[idx]) / dt
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y[idx] + h10 * dt * dy[idx] + h01 * y[idx + 1] + h11 * dt * dy[idx + 1]


def open_orbit_trajectory(cfg, t_end, dt=None):
    """Integrate the open orbit from rest at x = A for 0 <= t <= t_end.

    The equations of motion are integrated in the deformed chart (x_q, p_q),
    where the Morse force stays regular while x approaches the pole, and
    mapped back.  Returns a SeriesTable (t, x, v, p, x_q, p_q).
    """
    _require_open(cfg)
    if dt is None:
        dt = cfg.tau0 / SAMPLES_PER_PERIOD
    nsteps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    gamma = cfg.gamma_q
    xq0 = math.log1p(cfg.g) / gamma
    xqs, pqs, _ = _kernels.rk4_morse(np.array([xq0]), np.array([0.0]), dt, nsteps, cfg.m0, cfg.omega0, gamma)
    xq, pq = xqs[:, 0], pqs[:, 0]
    t = dt * np.arange(nsteps + 1)
    y = np.exp(gamma * xq)
    x = np.expm1(gamma * xq) / gamma
    return SeriesTable.from_columns(
        {"t": t, "x": x, "v": pq * y / cfg.m0, "p": pq / y, "x_q": xq, "p_q": pq},
        meta=_cfg_meta(cfg, t, t_star=t_star(cfg), integrator="rk4-deformed-chart"),
    )


def open_orbit_position(cfg, t, dt=None):
    """x(t) in the open regime from numerical integration (primary path)."""
    _require_open(cfg)
    tt = np.abs(np.asarray(t, dtype=np.float64) + cfg.delta / cfg.omega0)
    tmax = float(np.max(tt)) if tt.size else 0.0
    if dt is None:
        dt = cfg.tau0 / SAMPLES_PER_PERIOD
    tab = open_orbit_trajectory(cfg, max(tmax, 2 * dt), dt)
    xq = _hermite_interp(tab["t"], tab["x_q"], tab["p_q"] / cfg.m0, tt)
    return _out(np.expm1(cfg.gamma_q * xq) / cfg.gamma_q)


def p_q_asymptote(cfg):
    """Limit of |p_q| as x_q -> -inf on an open orbit: m0 omega0 A sqrt(1 - 1/g^2).

    This is not a bound on |p_q|: the Morse potential vanishes at x_q = 0,
    where |p_q| = m0 omega0 A (see :func:`p_q_sup`).
    """
    _require_open(cfg)
    return cfg.m0 * cfg.omega0 * cfg.A * math.sqrt(1.0 - 1.0 / cfg.g**2)


def p_q_sup(cfg):
    """Largest |p_q| along the orbit, reached at x = 0: sqrt(2 m0 E) = m0 omega0 A."""
    return cfg.m0 * cfg.omega0 * cfg.A


# ---------------------------------------------------------------------------
# numerical integration in the (x, p) chart
# ---------------------------------------------------------------------------

def integrate_motion(cfg, s0, t_end, dt, *, force_sign=1.0):
    """Fixed-step RK4 for xdot = p/m(x), pdot = -gamma(1+gamma x)p^2/m0 - m0 omega0^2 x.

    ``force_sign`` flips the harmonic force; it exists only for mutation tests.
    Raises IntegrationError if 1 + gamma x falls below the pole guard band.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    _check_domain(cfg.gamma_q, s0.x)
    ratio = t_end / dt
    nsteps = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 else int(math.ceil(ratio))
    xs, ps, done = _kernels.rk4_pdm(
        np.array([float(s0.x)]), np.array([float(s0.p)]), dt, nsteps,
        cfg.m0, cfg.omega0, cfg.gamma_q, force_sign, POLE_GUARD,
    )
    if done < nsteps:
        raise IntegrationError(
            f"trajectory entered the pole guard band (1 + gamma x < {POLE_GUARD:g}) "
            f"at t = {s0.t + (done + 1) * dt:g} after {done} steps"
        )
    x, p = xs[:, 0], ps[:, 0]
    t = s0.t + dt * np.arange(nsteps + 1)
    y = 1.0 + cfg.gamma_q * x
    E = p * p * y * y / (2.0 * cfg.m0) + 0.5 * cfg.k * x * x
    return SeriesTable.from_columns(
        {"t": t, "x": x, "p": p, "E": E},
        meta=_cfg_meta(cfg, t, integrator="rk4", force_sign=force_sign),
    )


def initial_state(cfg, t0=0.0):
    """Phase-space point of the analytic solution at t0 (periodic regime)."""
    return PhaseState(t0, analytic_position(cfg, t0), analytic_momentum(cfg, t0))


def zero_upcrossings(t, x, xdot):
    """Times where x crosses zero upwards, located by cubic Hermite interpolation and bisection."""
    t = np.asarray(t)
    idx = np.nonzero((x[:-1] < 0) & (x[1:] >= 0))[0]
    out = []
    for i in idx:
        dt = t[i + 1] - t[i]
        y0, y1, d0, d1 = x[i], x[i + 1], xdot[i] * dt, xdot[i + 1] * dt

        def h(s):
            return ((1 + 2 * s) * (1 - s) ** 2 * y0 + s * (1 - s) ** 2 * d0
                    + s * s * (3 - 2 * s) * y1 + s * s * (s - 1) * d1)

        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if h(mid) < 0:
                lo = mid
            else:
                hi = mid
        out.append(t[i] + 0.5 * (lo + hi) * dt)
    return np.array(out)


def measured_period(cfg, n_periods=10, steps_per_period=SAMPLES_PER_PERIOD, *, force_sign=1.0, integrator=None):
    """Mean spacing of zero up-crossings of the RK4 trajectory started from the analytic state at t=0.

    Returns NaN when fewer than two crossings occur.
    """
    integrator = integrator or integrate_motion
    if cfg.is_periodic:
        tau = period(cfg)
        s0 = initial_state(cfg)
    else:
        tau = cfg.tau0
        s0 = PhaseState(0.0, cfg.A, 0.0)
    dt = cfg.tau0 / steps_per_period
    try:
        tab = integrator(cfg, s0, n_periods * tau + 2 * dt, dt, force_sign=force_sign)
    except IntegrationError:
        return math.nan
    x, p = tab["x"], tab["p"]
    xdot = p * (1.0 + cfg.gamma_q * x) ** 2 / cfg.m0
    ups = zero_upcrossings(tab["t"], x, xdot)
    if len(ups) < 2:
        return math.nan
    return float((ups[-1] - ups[0]) / (len(ups) - 1))


# ---------------------------------------------------------------------------
# time law, statistics, WKB
# ---------------------------------------------------------------------------

def time_from_position(cfg, x0, x):
    """Time to travel from x0 to x on the ascending branch (negative if x < x0).

    Evaluates the q-integral of dx / sqrt((2/m0)(E - V)) with x = A sin(phi),
    which removes the turning-point singularities.
    """
    _require_periodic(cfg)
    A = cfg.A
    for v in (x0, x):
        if not abs(v) < A:
            raise RegimeError(f"x = {v:g} is at or beyond a turning point (|x| >= A = {A:g})")
    w = cfg.omega0

    def speed_factor(xx):
        return 1.0 / (w * np.sqrt((A - xx) * (A + xx)))

    sub = (lambda ph: A * np.sin(ph), lambda ph: A * np.cos(ph))
    return q_integral(cfg.deformation, speed_factor, math.asin(x0 / A), math.asin(x / A),
                      spec=_TIGHT, substitution=sub)


def classical_density(cfg, x):
    """Dwell-time density sqrt(1 - g^2) / [pi (1 + gamma x) sqrt(A^2 - x^2)] on |x| < A."""
    _require_periodic(cfg)
    x = np.asarray(x, dtype=np.float64)
    A = cfg.A
    if np.any(~(np.abs(x) < A)):
        raise DomainError("classical density is defined only for |x| < A")
    return _out(math.sqrt(1.0 - cfg.g**2) / (math.pi * (1.0 + cfg.gamma_q * x) * np.sqrt((A - x) * (A + x))))


def density_interval_probability(cfg, x1, x2):
    """Integral of the classical density over [x1, x2] (clipped to [-A, A])."""
    _require_periodic(cfg)
    A, g = cfg.A, cfg.g
    s = math.sqrt(1.0 - g * g)
    p1 = math.asin(max(-1.0, min(1.0, x1 / A)))
    p2 = math.asin(max(-1.0, min(1.0, x2 / A)))
    val, _ = adaptive_quad(lambda ph: s / (math.pi * (1.0 + g * np.sin(ph))), p1, p2, _TIGHT)
    return val


class Moments(NamedTuple):
    x_mean: float
    x2_mean: float
    p_mean: float
    p2_mean: float


def classical_moments(cfg):
    """Closed-form time averages of x, x^2, p, p^2 over one period."""
    _require_periodic(cfg)
    A, g = cfg.A, cfg.g
    s = math.sqrt(1.0 - g * g)
    if g == 0:
        xm, x2 = 0.0, 0.5 * A * A
    else:
        one_minus_s = g * g / (1.0 + s)  # 1 - sqrt(1 - g^2) without cancellation
        xm = -A * one_minus_s / g
        x2 = A * A * one_minus_s / (g * g)
    p2 = (cfg.m0 * cfg.omega0 * A) ** 2 / (2.0 * (1.0 - g * g))
    return Moments(xm, x2, 0.0, p2)


def moments_by_quadrature(cfg, spec=_TIGHT):
    """Same averages as :func:`classical_moments` from quadrature of the dwell-time density."""
    _require_periodic(cfg)
    A, g = cfg.A, cfg.g
    s = math.sqrt(1.0 - g * g)
    lo, hi = -0.5 * math.pi, 0.5 * math.pi
    pm = cfg.m0 * cfg.omega0 * A

    def weight(ph):
        return s / (math.pi * (1.0 + g * np.sin(ph)))

    xm, _ = adaptive_quad(lambda ph: A * np.sin(ph) * weight(ph), lo, hi, spec)
    x2, _ = adaptive_quad(lambda ph: (A * np.sin(ph)) ** 2 * weight(ph), lo, hi, spec)
    # p(x) = m0 omega0 sqrt(A^2 - x^2)/(1 + gamma x); the sign alternates between branches
    p2, _ = adaptive_quad(lambda ph: (pm * np.cos(ph) / (1.0 + g * np.sin(ph))) ** 2 * weight(ph), lo, hi, spec)
    return Moments(xm, x2, 0.0, p2)


def virial_classical(cfg):
    """(T_bar, V_bar, T_bar/V_bar) with T_bar = E - V_bar; the ratio equals sqrt(1 - g^2)."""
    m = classical_moments(cfg)
    V = 0.5 * cfg.k * m.x2_mean
    T = cfg.E - V
    return T, V, T / V if V else math.nan


def wkb_action(model, E):
    """Implied quantum number n(E) = (1/2 pi hbar) closed-orbit action - 1/2.

    ``model`` supplies m0, omega0, gamma_q and hbar (a QuantumModel).
    """
    A2 = 2.0 * E / (model.m0 * model.omega0**2)
    if E < 0:
        raise RegimeError("negative energy")
    A = math.sqrt(A2)
    g = model.gamma_q * A
    if not abs(g) < 1.0:
        raise RegimeError(f"E = {E:g} is at or above the dissociation energy")
    if A == 0:
        return -0.5
    d = Deformation.from_gamma(model.gamma_q)
    sub = (lambda ph: A * np.sin(ph), lambda ph: A * np.cos(ph))
    integral = q_integral(d, lambda x: np.sqrt(np.maximum((A - x) * (A + x), 0.0)),
                          -0.5 * math.pi, 0.5 * math.pi, spec=_TIGHT, substitution=sub)
    return model.m0 * model.omega0 * integral / (math.pi * model.hbar) - 0.5


# ---------------------------------------------------------------------------
# composite outputs
# ---------------------------------------------------------------------------

def lissajous(cfg_x, cfg_y, t_grid):
    """Curve (x(t), y(t)) of two independent deformed oscillators."""
    t = np.asarray(t_grid, dtype=np.float64)
    return SeriesTable.from_columns(
        {"t": t, "x": analytic_position(cfg_x, t), "y": analytic_position(cfg_y, t)},
        meta=base_meta(
            gamma_q_A_x=cfg_x.g, gamma_q_A_y=cfg_y.g, omega_x=cfg_x.omega0, omega_y=cfg_y.omega0,
            delta_x=cfg_x.delta, delta_y=cfg_y.delta, A_x=cfg_x.A, A_y=cfg_y.A,
            m0=cfg_x.m0, omega0=cfg_x.omega0, gamma_q=cfg_x.gamma_q,
            sampling_step=float(t[1] - t[0]) if t.size > 1 else None,
        ),
    )


def phase_space_orbit(cfg, t_grid=None):
    """Orbit in both charts: (t, x, p, x_q, p_q).  Open orbits come from the integrator."""
    if cfg.is_periodic:
        if t_grid is None:
            tau = period(cfg)
            t_grid = np.linspace(0.0, tau, SAMPLES_PER_PERIOD + 1)
        t = np.asarray(t_grid, dtype=np.float64)
        x = analytic_position(cfg, t)
        p = analytic_momentum(cfg, t)
        sq = canonical_map(cfg, PhaseState(t, x, p))
        return SeriesTable.from_columns(
            {"t": t, "x": x, "p": p, "x_q": sq.x_q, "p_q": sq.p_q}, meta=_cfg_meta(cfg, t, regime="closed"),
        )
    t_end = float(np.max(t_grid)) if t_grid is not None else 3.0 * cfg.tau0
    tab = open_orbit_trajectory(cfg, t_end)
    # the orbit is symmetric under time reversal: prepend the incoming branch
    t = np.concatenate([-tab["t"][:0:-1], tab["t"]])
    cols = {
        "t": t,
        "x": np.concatenate([tab["x"][:0:-1], tab["x"]]),
        "p": np.concatenate([-tab["p"][:0:-1], tab["p"]]),
        "x_q": np.concatenate([tab["x_q"][:0:-1], tab["x_q"]]),
        "p_q": np.concatenate([-tab["p_q"][:0:-1], tab["p_q"]]),
    }
    return SeriesTable.from_columns(cols, meta=_cfg_meta(cfg, t, regime="open", p_q_sup=p_q_sup(cfg), p_q_asymptote=p_q_asymptote(cfg),
                                       t_star=t_star(cfg)))


def ergodic_histogram_l1(cfg, n_periods=200, bins=100, steps_per_period=SAMPLES_PER_PERIOD):
    """L1 distance between the position histogram of the integrated orbit and the dwell-time density.

    The step divides tau_q by steps_per_period plus the golden-ratio fraction, so
    consecutive periods sample shifted phases instead of repeating the same ones
    (a commensurate step leaves a ~1% L1 floor from per-bin count rounding).
    """
    tau = period(cfg)
    dt = tau / (steps_per_period + 0.5 * (math.sqrt(5.0) - 1.0))
    tab = integrate_motion(cfg, initial_state(cfg), n_periods * tau, dt)
    edges = np.linspace(-cfg.A, cfg.A, bins + 1)
    counts, _ = np.histogram(tab["x"], edges)
    observed = counts / len(tab)
    expected = np.array([density_interval_probability(cfg, a, b) for a, b in zip(edges[:-1], edges[1:])])
    return float(np.abs(observed - expected).sum())
