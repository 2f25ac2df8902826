"""Quantum oscillator with mass m0/(1 + gamma x)^2.

Bound states (natural scale x0 = sqrt(hbar/(m0 omega0)), d = 1/(gamma x0)^2)::

    psi_n(x) = A_n y^{-1/2} exp(-d y) (2 d y)^{b/2} L_n^{(b)}(2 d y),   y = 1 + gamma x
    b = 2d - 1 - 2n > 0,    A_n^2 = b |gamma| n! / Gamma(n + b + 1)
    E_n = hbar omega0 (n + 1/2) [1 - (gamma x0)^2 (n + 1/2) / 2]

Wavefunctions carry an extra factor (-1)^n for gamma > 0 so that they tend to
the usual Hermite functions (positive as x -> +inf) when gamma -> 0.  For
|gamma x0| < SHO_CROSSOVER every operation delegates to the Hermite closed forms.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DomainError, RegimeError, UnboundStateError
from .q_calculus import Deformation, RealFunctionHandle, q_derivative_second, q_integral
from .series import SeriesTable, base_meta
from .special import QuadratureSpec, adaptive_quad, central_diff, laguerre, log_gamma

SHO_CROSSOVER = 1e-5
#: smallest admissible b before a state counts as dissociated
B_MIN = 1e-6
#: quadrature support: log density within this many e-folds of its maximum
LOG_WINDOW = 60.0
_STIRLING_MIN = 100.0

_TIGHT = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11, max_panels=20000)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuantumModel:
    m0: float = 1.0
    omega0: float = 1.0
    gamma_q: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.m0 > 0 and self.omega0 > 0 and self.hbar > 0):
            raise DomainError("m0, omega0 and hbar must be positive")
        if not math.isfinite(self.gamma_q):
            raise DomainError("gamma_q must be finite")
        if not self.is_sho and self.d <= 0.5:
            raise RegimeError(f"d = {self.d:g} <= 1/2: no bound states")

    @classmethod
    def from_gamma_x0(cls, gamma_x0, x0=1.0, m0=1.0, hbar=1.0):
        """Model with dimensionless deformation gamma_q x0 and length scale x0."""
        omega0 = hbar / (m0 * x0 * x0)
        return cls(m0=m0, omega0=omega0, gamma_q=gamma_x0 / x0, hbar=hbar)

    @property
    def x0(self):
        return math.sqrt(self.hbar / (self.m0 * self.omega0))

    @property
    def gamma_x0(self):
        return self.gamma_q * self.x0

    @property
    def is_sho(self):
        return abs(self.gamma_x0) < SHO_CROSSOVER

    @property
    def d(self):
        gx = self.gamma_x0
        return math.inf if gx == 0 else 1.0 / (gx * gx)

    @property
    def n_max(self):
        """Largest n with b = 2d - 1 - 2n > 0 (None when unbounded)."""
        if self.is_sho:
            return None
        return math.ceil((2.0 * self.d - 1.0) / 2.0) - 1

    @property
    def W_q(self):
        """Dissociation energy m0 omega0^2 / (2 gamma^2) = hbar omega0 d / 2."""
        return 0.5 * self.hbar * self.omega0 * self.d

    @property
    def eps0(self):
        return 0.5 * self.hbar * self.omega0

    def b(self, n):
        return 2.0 * self.d - 1.0 - 2.0 * n

    def check_bound(self, n):
        if int(n) != n or n < 0:
            raise DomainError(f"n must be a non-negative integer, got {n!r}")
        if self.is_sho:
            return int(n)
        if n > self.n_max:
            raise UnboundStateError(int(n), self.n_max)
        if self.b(n) < B_MIN:
            raise RegimeError(f"b = {self.b(n):g} for n = {n}: state too close to dissociation")
        return int(n)


class BoundState(NamedTuple):
    n: int
    E_n: float
    b: float
    A_n: float
    a_qn: float


def energy_level(model, n):
    n = model.check_bound(n)
    e = model.gamma_x0**2
    k = n + 0.5
    return model.hbar * model.omega0 * k * (1.0 - 0.5 * e * k)


def amplitude(model, n):
    """Classical turning amplitude a_{q,n} with E_n = m0 omega0^2 a^2 / 2."""
    return math.sqrt(2.0 * energy_level(model, n) / (model.m0 * model.omega0**2))


def _half_log_norm(model, n):
    """ln A_n - d + (b/2) ln(2d): every x-independent factor of ln|psi|."""
    d = model.d
    b = model.b(n)
    N = 2.0 * d - n  # = n + b + 1
    log_fact = log_gamma(n + 1.0)
    if N > _STIRLING_MIN:
        # Stirling form of ln Gamma(N) with the large pieces cancelled analytically
        iN = 1.0 / N
        iN2 = iN * iN
        R = iN * (1.0 / 12 - iN2 * (1.0 / 360 - iN2 * (1.0 / 1260 - iN2 / 1680)))
        two_c = (math.log(b) + math.log(abs(model.gamma_q)) + log_fact
                 - (n + 0.5) * math.log(2.0 * d) - (N - 0.5) * math.log1p(-n / (2.0 * d))
                 - n - _HALF_LOG_2PI - R)
    else:
        two_c = (math.log(b) + math.log(abs(model.gamma_q)) + log_fact - log_gamma(N)
                 - 2.0 * d + b * math.log(2.0 * d))
    return 0.5 * two_c


def bound_state(model, n):
    n = model.check_bound(n)
    if model.is_sho:
        return BoundState(n, energy_level(model, n), math.inf, math.nan, amplitude(model, n))
    b = model.b(n)
    log_a2 = math.log(b) + math.log(abs(model.gamma_q)) + log_gamma(n + 1.0) - log_gamma(n + b + 1.0)
    return BoundState(n, energy_level(model, n), b, math.exp(0.5 * log_a2), amplitude(model, n))


def _log1p_minus_x(u, y=None):
    """log1p(u) - u, with a series near 0 where the subtraction cancels; ``y`` = 1 + u if known exactly."""
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u) < 0.1
    us = np.where(small, u, 0.0)
    series = np.zeros_like(us)
    term = -us * us
    for k in range(2, 20):
        series = series + term / k
        term = -term * us
    far = np.log1p(np.where(small, 0.0, u)) if y is None else np.log(np.where(small, 1.0, y))
    return np.where(small, series, far - u)


def _parts(model, n, x, y=None):
    """Return (y, log_envelope, laguerre value, sign) with psi = sign * exp(log_env) * L."""
    g = model.gamma_q
    if y is None:
        x = np.asarray(x, dtype=np.float64)
        y = 1.0 + g * x
        u = g * x
    else:
        y = np.asarray(y, dtype=np.float64)
        u = y - 1.0
    if np.any(~(y > 0)):
        raise DomainError(f"x at or beyond the pole -1/gamma = {-1.0 / g:g}")
    d = model.d
    b = model.b(n)
    log_env = _half_log_norm(model, n) + d * _log1p_minus_x(u, y) - (n + 1.0) * np.log(y)
    lag = laguerre(n, b, 2.0 * d * y)
    sign = -1.0 if (g > 0 and n % 2) else 1.0
    return y, log_env, lag, sign


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def wavefunction(model, n, x, y=None):
    """psi_n(x) in units of length^{-1/2}.

    ``y`` optionally supplies 1 + gamma x exactly, for points so close to the
    pole that forming it from x would round.
    """
    n = model.check_bound(n)
    x = np.asarray(x, dtype=np.float64)
    if model.is_sho:
        x0 = model.x0
        return _out(_kernels.hermite_functions(n, x / x0) / math.sqrt(x0))
    _, log_env, lag, sign = _parts(model, n, x, y)
    return _out(sign * np.exp(log_env) * lag)


def wavefunction_derivative(model, n, x, y=None):
    """d psi_n / dx from the closed form."""
    n = model.check_bound(n)
    x = np.asarray(x, dtype=np.float64)
    if model.is_sho:
        x0 = model.x0
        xi = x / x0
        up = _kernels.hermite_functions(n + 1, xi) * math.sqrt((n + 1) / 2.0)
        down = _kernels.hermite_functions(n - 1, xi) * math.sqrt(n / 2.0) if n > 0 else 0.0
        return _out((down - up) / x0**1.5)
    g, d = model.gamma_q, model.d
    y, log_env, lag, sign = _parts(model, n, x, y)
    dlog = g * (d / y - d - (n + 1.0) / y)
    dlag = -laguerre(n - 1, model.b(n) + 1.0, 2.0 * d * y) * 2.0 * d * g if n > 0 else 0.0
    return _out(sign * np.exp(log_env) * (lag * dlog + dlag))


def wavefunction_handle(model, n, analytic=True):
    return RealFunctionHandle(
        lambda x: wavefunction(model, n, x),
        (lambda x: wavefunction_derivative(model, n, x)) if analytic else None,
    )


# ---------------------------------------------------------------------------
# quadrature over the bound-state support
# ---------------------------------------------------------------------------

def _log_density(model, n, x):
    if model.is_sho:
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(np.abs(wavefunction(model, n, x)))
    _, log_env, lag, _ = _parts(model, n, x)
    with np.errstate(divide="ignore"):
        return 2.0 * (log_env + np.log(np.abs(lag)))


def support(model, n):
    """(lo, hi, reaches_pole): interval outside which |psi_n|^2 < exp(max - LOG_WINDOW)."""
    n = model.check_bound(n)
    x0 = model.x0
    a = amplitude(model, n)
    g = model.gamma_q
    pole = -1.0 / g if not model.is_sho else None
    lo_lim, hi_lim = -a - 40 * x0, a + 40 * x0
    if pole is not None:
        if g > 0:
            lo_lim = max(lo_lim, pole)
        else:
            hi_lim = min(hi_lim, pole)
    probe = np.linspace(-a, a, 201)
    probe = probe[(1.0 + g * probe) > 0]
    peak = float(np.max(_log_density(model, n, probe)))
    cut = peak - LOG_WINDOW
    step = 0.25 * x0

    def walk(start, direction, limit):
        x = start
        while True:
            nxt = x + direction * step
            if (nxt - limit) * direction >= 0:
                return limit, True
            x = nxt
            if _log_density(model, n, x) < cut:
                return x, False

    lo, lo_pole = walk(-a, -1.0, lo_lim)
    hi, hi_pole = walk(a, 1.0, hi_lim)
    reaches = (lo_pole and g > 0) or (hi_pole and g < 0)
    return lo, hi, reaches


def integrate_over_support(model, n, func, spec=_TIGHT, power=None):
    """Integrate func(x, y), y = 1 + gamma x, over the truncated support of state n.

    If the support touches the pole the integral is taken in t with
    1 + gamma x = t^m, m = max(1, 2/b), which removes the y^{b-1} singularity
    of |psi|^2 there; ``power`` overrides m.
    """
    lo, hi, reaches = support(model, n)
    g = model.gamma_q
    if not reaches:
        val, _ = adaptive_quad(lambda x: func(x, None if model.is_sho else 1.0 + g * x), lo, hi, spec)
        return val
    m = power if power is not None else max(1.0, 2.0 / model.b(n))

    def integrand(t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        y = t**m
        ok = y > 0
        tt, y = t[ok], y[ok]
        out[ok] = np.asarray(func((y - 1.0) / g, y), dtype=np.float64) * m * tt ** (m - 1.0) / abs(g)
        return out

    far = hi if g > 0 else lo
    t_far = (1.0 + g * far) ** (1.0 / m)
    val, _ = adaptive_quad(integrand, 0.0, t_far, spec)
    return val


def norm_by_quadrature(model, n):
    return integrate_over_support(model, n, lambda x, y: wavefunction(model, n, x, y) ** 2)


def inner_product(model, m, n):
    """<psi_m | psi_n> by quadrature over the wider of the two supports."""
    k = max(m, n)  # the higher state has the wider support and the weaker pole behaviour
    return integrate_over_support(model, k, lambda x, y: wavefunction(model, m, x, y) * wavefunction(model, n, x, y))


def node_count(model, n, samples=20001):
    lo, hi, _ = support(model, n)
    g = model.gamma_q
    if not model.is_sho:
        pole = -1.0 / g
        span = hi - lo
        lo = max(lo, pole + 1e-9 * span) if g > 0 else lo
        hi = min(hi, pole - 1e-9 * span) if g < 0 else hi
    x = np.linspace(lo, hi, samples)
    psi = wavefunction(model, n, x)
    big = np.abs(psi) > 1e-12 * np.max(np.abs(psi))
    s = np.sign(psi[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


# ---------------------------------------------------------------------------
# residuals and the transformed field
# ---------------------------------------------------------------------------

def default_grid(model, n, step=None):
    """Uniform grid over the support (pole excluded), step x0/200 by default."""
    lo, hi, reaches = support(model, n)
    x0 = model.x0
    h = step or x0 / 200.0
    if reaches:
        pole = -1.0 / model.gamma_q
        # keep the 5-point stencil clear of the pole
        if model.gamma_q > 0:
            lo = pole + 4.0 * h
        else:
            hi = pole - 4.0 * h
    k = int(math.floor((hi - lo) / h))
    return lo + h * np.arange(k + 1)


def schrodinger_residual(model, n, grid=None):
    """Scaled sup norm of the stationary-equation residual, 4th-order differences on ``grid``."""
    n = model.check_bound(n)
    x = default_grid(model, n) if grid is None else np.asarray(grid, dtype=np.float64)
    h = float(x[1] - x[0])
    g, hb, m0, w = model.gamma_q, model.hbar, model.m0, model.omega0
    E = energy_level(model, n)

    def psi(v):
        return wavefunction(model, n, v)

    p0 = psi(x)
    p1 = central_diff(psi, x, order=1, accuracy=4, h=h)
    p2 = central_diff(psi, x, order=2, accuracy=4, h=h)
    y = 1.0 + g * x
    res = (-(hb * hb * y * y / (2 * m0)) * p2 - (hb * hb * g * y / m0) * p1
           - (hb * hb * g * g / (8 * m0)) * p0 + 0.5 * m0 * w * w * x * x * p0 - E * p0)
    return float(np.max(np.abs(res)) / (E * np.max(np.abs(p0))))


def transform_field(model, psi_values, x_grid):
    """phi_q = sqrt(1 + gamma x) psi."""
    x = np.asarray(x_grid, dtype=np.float64)
    y = 1.0 + model.gamma_q * x
    if np.any(~(y > 0)):
        raise DomainError("grid reaches the pole")
    return _out(np.sqrt(y) * np.asarray(psi_values))


def inverse_transform_field(model, phi_values, x_grid):
    x = np.asarray(x_grid, dtype=np.float64)
    y = 1.0 + model.gamma_q * x
    if np.any(~(y > 0)):
        raise DomainError("grid reaches the pole")
    return _out(np.asarray(phi_values) / np.sqrt(y))


def deformed_norms(model, n):
    """(ordinary norm of psi, q-integral norm of phi_q) by two independent quadratures."""
    ordinary = norm_by_quadrature(model, n)
    if model.is_sho:
        return ordinary, ordinary
    d = Deformation.from_gamma(model.gamma_q)
    lo, hi, reaches = support(model, n)

    def phi_sq(x):
        return transform_field(model, wavefunction(model, n, x), x) ** 2

    if reaches:
        # same pole-removing substitution as integrate_over_support, routed through q_integral
        m = max(1.0, 2.0 / model.b(n))
        g = model.gamma_q
        far = hi if g > 0 else lo
        # clamp y at 4 eps so 1 + gamma x stays positive; the lost tail is O((4 eps)^b)
        sub = (lambda t: (np.maximum(t**m, 4.0 * np.finfo(float).eps) - 1.0) / g, lambda t: m * t ** (m - 1.0) / g)
        t_far = (1.0 + g * far) ** (1.0 / m)
        a, b = (0.0, t_far)
        val = q_integral(d, phi_sq, a, b, spec=_TIGHT, substitution=sub)
        return ordinary, abs(val)
    return ordinary, q_integral(d, phi_sq, lo, hi, spec=_TIGHT)


def deformed_residual(model, n, grid=None, analytic_inner=False):
    """Scaled sup norm of -(hbar^2/2m0) D^2 phi + V phi - E phi with D = (1 + gamma x) d/dx.

    The second deformed derivative comes from the q-calculus nested stencils.
    """
    n = model.check_bound(n)
    x = default_grid(model, n, step=model.x0 / 50.0) if grid is None else np.asarray(grid, dtype=np.float64)
    d = Deformation.from_gamma(model.gamma_q)
    g = model.gamma_q

    def phi(v):
        return transform_field(model, wavefunction(model, n, v), v)

    def dphi(v):
        y = 1.0 + g * np.asarray(v)
        return np.sqrt(y) * wavefunction_derivative(model, n, v) + 0.5 * g / np.sqrt(y) * wavefunction(model, n, v)

    f = RealFunctionHandle(phi, dphi if analytic_inner else None)
    d2 = q_derivative_second(d, f, x)
    E = energy_level(model, n)
    ph = phi(x)
    res = -(model.hbar**2 / (2 * model.m0)) * d2 + 0.5 * model.m0 * model.omega0**2 * x * x * ph - E * ph
    return float(np.max(np.abs(res)) / (E * np.max(np.abs(ph))))


def stationary_current(model, n, x):
    """Re{psi* (hbar/i) d/dx [psi/m(x)]}: zero for every real stationary state.

    Evaluated in complex arithmetic from the closed-form derivative.  The
    time-dependent continuity check for superpositions is not covered.
    """
    n = model.check_bound(n)
    x = np.asarray(x, dtype=np.float64)
    psi = wavefunction(model, n, x).astype(complex) if np.ndim(x) else complex(wavefunction(model, n, x))
    dpsi = wavefunction_derivative(model, n, x)
    y = 1.0 + model.gamma_q * x
    # d/dx [psi y^2 / m0]
    deriv = (dpsi * y * y + psi * 2.0 * model.gamma_q * y) / model.m0
    return _out(np.real(np.conj(psi) * (model.hbar / 1j) * deriv))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

class Expectations(NamedTuple):
    x: float
    x2: float
    p: float
    p2: float


def _p2_finite(model, n):
    return model.is_sho or model.b(n) > 2.0


def expectation_values(model, n, allow_divergent=False):
    """Closed-form <x>, <x^2>, <p>, <p^2>.

    <p^2> is finite only for b > 2 (psi' is not square integrable at the pole
    otherwise).  Then RegimeError is raised, or inf is returned with
    ``allow_divergent``.
    """
    n = model.check_bound(n)
    x0, k = model.x0, n + 0.5
    xm = -model.gamma_q * x0 * x0 * k
    x2 = x0 * x0 * k
    if _p2_finite(model, n):
        a2 = amplitude(model, n) ** 2
        g2 = model.gamma_q**2
        mw = model.m0 * model.omega0
        p2 = 0.5 * mw * mw * (a2 + 0.75 * g2 * x0**4) / (1.0 - g2 * a2 - g2 * g2 * x0**4)
    elif allow_divergent:
        p2 = math.inf
    else:
        raise RegimeError(f"<p^2> diverges for n={n}: b = {model.b(n):g} <= 2")
    if model.is_sho:
        p2 = model.m0 * model.omega0 * model.hbar * k
    return Expectations(xm, x2, 0.0, p2)


def p2_ratio_form(model, n):
    """<p^2> as hbar m0 omega0 [(n+1/2) - (e/2)(n^2+n-1/2)] / [(1-e(n-1/2))(1-e(n+3/2))], e = (gamma x0)^2."""
    n = model.check_bound(n)
    e = model.gamma_x0**2
    num = (n + 0.5) - 0.5 * e * (n * n + n - 0.5)
    den = (1.0 - e * (n - 0.5)) * (1.0 - e * (n + 1.5))
    return model.hbar * model.m0 * model.omega0 * num / den


def p2_alt_ratio(model, n):
    """Ratio form with (n^2 + n - 1) in the numerator, kept for comparison; it does not match quadrature."""
    n = model.check_bound(n)
    e = model.gamma_x0**2
    num = (n + 0.5) - 0.5 * e * (n * n + n - 1.0)
    den = (1.0 - e * (n + 0.5)) ** 2 - e * e
    return model.hbar * model.m0 * model.omega0 * num / den


def expectations_by_quadrature(model, n):
    def rho(x, y):
        return wavefunction(model, n, x, y) ** 2

    xm = integrate_over_support(model, n, lambda x, y: x * rho(x, y))
    x2 = integrate_over_support(model, n, lambda x, y: x * x * rho(x, y))
    if _p2_finite(model, n):
        # <p^2> = hbar^2 int |psi'|^2 dx (boundary terms vanish for b > 2)
        m = None if model.is_sho else max(1.0, 4.0 / (model.b(n) - 2.0))
        dp = integrate_over_support(model, n, lambda x, y: wavefunction_derivative(model, n, x, y) ** 2, power=m)
        p2 = model.hbar**2 * dp
    else:
        p2 = math.inf
    return Expectations(xm, x2, 0.0, p2)


class Uncertainty(NamedTuple):
    dx: float
    dp: float
    product: float


def uncertainties(model, n):
    """Standard deviations from the closed forms; Delta p is inf when <p^2> diverges."""
    ev = expectation_values(model, n, allow_divergent=True)
    dx = math.sqrt(max(ev.x2 - ev.x * ev.x, 0.0))
    dp = math.sqrt(ev.p2 - ev.p * ev.p)
    return Uncertainty(dx, dp, dx * dp)


def virial_quantum(model, n, moments=None):
    """(<T>, <V>, <T>/<V>) with <V> = m0 omega0^2 <x^2>/2 and <T> = E_n - <V>.

    The ratio equals sqrt(1 - gamma^2 a_{q,n}^2).
    """
    ev = moments or expectation_values(model, n, allow_divergent=True)
    V = 0.5 * model.m0 * model.omega0**2 * ev.x2
    T = energy_level(model, n) - V
    return T, V, T / V


# ---------------------------------------------------------------------------
# correspondence and 2D densities
# ---------------------------------------------------------------------------

class Correspondence(NamedTuple):
    mean_abs: float
    l1: float
    window: float
    a_qn: float
    interval: tuple


def correspondence_profile(model, n, window=None, clip=0.02, samples_per_window=4000):
    """Box-averaged |psi_n|^2, classical density with A = a_{q,n}, on the clipped interior.

    ``window`` defaults to the de Broglie wavelength at the centre,
    2 pi hbar / (m0 omega0 a_{q,n}).  Returns (x, averaged, classical, window).
    """
    n = model.check_bound(n)
    a = amplitude(model, n)
    if window is None:
        window = 2.0 * math.pi * model.hbar / (model.m0 * model.omega0 * a)
    if not window > 0:
        raise DomainError("window must be positive")
    g = model.gamma_q
    lo, hi, _ = support(model, n)
    h = window / samples_per_window
    lo_edge = min(lo, -a - window)
    hi_edge = max(hi, a + window)
    if not model.is_sho:
        pole = -1.0 / g
        if g > 0:
            lo_edge = max(lo_edge, pole + h)
        else:
            hi_edge = min(hi_edge, pole - h)
    xs = lo_edge + h * np.arange(int((hi_edge - lo_edge) / h) + 1)
    rho = wavefunction(model, n, xs) ** 2
    # cumulative trapezoid, then the window average is a difference of the cumulative
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * h)])
    inner = np.abs(xs) < (1.0 - clip) * a
    xi = xs[inner]
    F_hi = np.interp(xi + 0.5 * window, xs, cum)
    F_lo = np.interp(xi - 0.5 * window, xs, cum)
    avg = (F_hi - F_lo) / window
    ga = g * a
    classical = math.sqrt(1.0 - ga * ga) / (math.pi * (1.0 + g * xi) * np.sqrt((a - xi) * (a + xi)))
    return xi, avg, classical, window


def correspondence_check(model, n, window=None, clip=0.02):
    """Discrepancy between the window-averaged quantum and the classical density.

    ``mean_abs`` is the mean absolute difference over the clipped interior
    (integrated L1 divided by the interval length, densities in units of 1/x0);
    ``l1`` is the integrated L1 distance.
    """
    x, avg, cl, window = correspondence_profile(model, n, window, clip)
    diff = np.abs(avg - cl)
    l1 = float(np.sum(0.5 * (diff[1:] + diff[:-1]) * np.diff(x)))
    length = float(x[-1] - x[0])
    a = amplitude(model, n)
    return Correspondence(l1 / length * model.x0, l1, window, a, (float(x[0]), float(x[-1])))


def density_2d(model_x, model_y, n1, n2, x_grid, y_grid):
    """Separable density |psi_n1(x) psi_n2(y)|^2 on a rectangular grid, rows (x, y, rho)."""
    x = np.asarray(x_grid, dtype=np.float64)
    y = np.asarray(y_grid, dtype=np.float64)
    px = wavefunction(model_x, n1, x) ** 2
    py = wavefunction(model_y, n2, y) ** 2
    X, Y = np.meshgrid(x, y, indexing="ij")
    rho = np.outer(px, py)
    meta = base_meta(
        gamma_q_x0_x=model_x.gamma_x0, gamma_q_x0_y=model_y.gamma_x0, n1=n1, n2=n2,
        m0=model_x.m0, omega0=model_x.omega0, hbar=model_x.hbar,
        gamma_q=model_x.gamma_q, x0=model_x.x0,
        sampling_step_x=float(x[1] - x[0]) if x.size > 1 else None,
        sampling_step_y=float(y[1] - y[0]) if y.size > 1 else None,
        shape=[int(x.size), int(y.size)],
    )
    return SeriesTable.from_columns({"x": X.ravel(), "y": Y.ravel(), "rho": rho.ravel()}, meta=meta)


def density_2d_norm(model_x, model_y, n1, n2):
    return norm_by_quadrature(model_x, n1) * norm_by_quadrature(model_y, n2)


def wavefunction_table(model, n, x=None, samples=2000):
    n = model.check_bound(n)
    if x is None:
        lo, hi, reaches = support(model, n)
        if reaches:
            span = hi - lo
            if model.gamma_q > 0:
                lo += 1e-6 * span
            else:
                hi -= 1e-6 * span
        x = np.linspace(lo, hi, samples)
    x = np.asarray(x, dtype=np.float64)
    psi = wavefunction(model, n, x)
    return SeriesTable.from_columns(
        {"x": x, "psi": psi, "rho": psi * psi},
        meta=base_meta(
            n=n, gamma_q_x0=model.gamma_x0, gamma_q=model.gamma_q, m0=model.m0, omega0=model.omega0,
            hbar=model.hbar, x0=model.x0, E_n=energy_level(model, n),
            sampling_step=float(x[1] - x[0]) if x.size > 1 else None,
        ),
    )


def spectrum(model):
    """All bound levels (n, E_n, E_n/eps0, b, a_qn)."""
    if model.is_sho:
        raise RegimeError("the undeformed spectrum is unbounded; pass a non-zero gamma_q")
    rows = []
    for n in range(model.n_max + 1):
        if model.b(n) < B_MIN:
            break
        E = energy_level(model, n)
        rows.append((n, E, E / model.eps0, model.b(n), amplitude(model, n)))
    return rows
