"""q-deformed exponential, logarithm, arithmetic, derivatives and integral.

Conventions
-----------
``q_exp``, ``q_ln``, ``q_add``, ``q_sub`` and ``deformed_variable`` act on
dimensionless numbers and use the factor ``1 - q``.

The derivative and integral operators act on quantities measured in the same
length unit as ``xi`` and use ``gamma_q = (1 - q)/xi``::

    D f(u)      = [1 + gamma_q u] f'(u)
    Ddual f(u)  = f'(u) / [1 + gamma_q f(u)]

With ``xi = 1`` (the default) both conventions coincide.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, SingularityError
from .special import DEFAULT_QUAD, QuadratureSpec, adaptive_quad, central_diff, default_step

#: below this |1 - q| the ordinary exp/log branches are used
EPS_Q = 1e-8

_NESTED_STEP = np.finfo(float).eps ** (1.0 / 6.0)


@dataclass(frozen=True)
class Deformation:
    """Deformation parameter q with characteristic length xi; gamma_q = (1 - q)/xi."""

    q: float
    xi: float = 1.0
    gamma_q: float = field(init=False)

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError(f"xi must be positive, got {self.xi!r}")
        object.__setattr__(self, "gamma_q", (1.0 - self.q) / self.xi)

    @classmethod
    def from_gamma(cls, gamma_q, xi=1.0):
        return cls(q=1.0 - gamma_q * xi, xi=xi)

    @property
    def kappa(self):
        """1 - q."""
        return 1.0 - self.q

    @property
    def is_ordinary(self):
        return abs(1.0 - self.q) < EPS_Q

    def check(self, u):
        """Raise DomainError unless 1 + (1 - q) u > 0 everywhere in ``u``."""
        if np.any(~(1.0 + self.kappa * np.asarray(u, dtype=np.float64) > 0)):
            raise DomainError(f"1 + (1-q)u must be positive (q={self.q})")


@dataclass(frozen=True)
class RealFunctionHandle:
    """A real function on an interval, optionally with its analytic derivative."""

    func: Callable
    derivative: Optional[Callable] = None
    interval: Tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, u):
        return self.func(u)

    def deriv(self, u, h=None):
        if self.derivative is not None:
            return self.derivative(u)
        return central_diff(self.func, u, order=1, accuracy=4, h=h)


def _as_handle(f):
    return f if isinstance(f, RealFunctionHandle) else RealFunctionHandle(f)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# deformed functions and arithmetic
# ---------------------------------------------------------------------------

def q_exp(d, u):
    """exp_q(u) = [1 + (1-q)u]_+^{1/(1-q)}.

    Returns exactly 0 where the bracket is non-positive and the exponent is
    positive (q < 1); raises DomainError in the divergent case (q > 1).
    """
    u = np.asarray(u, dtype=np.float64)
    if d.is_ordinary:
        return _out(np.exp(u))
    k = d.kappa
    bracket = 1.0 + k * u
    bad = bracket <= 0
    if np.any(bad) and k < 0:
        raise DomainError(f"exp_q diverges where 1 + (1-q)u <= 0 (q={d.q} > 1)")
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(np.log1p(k * u) / k)
    return _out(np.where(bad, 0.0, val))


def q_ln(d, u):
    """ln_q(u) = (u^{1-q} - 1)/(1 - q) for u > 0."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(~(u > 0)):
        raise DomainError("ln_q requires u > 0")
    if d.is_ordinary:
        return _out(np.log(u))
    k = d.kappa
    return _out(np.expm1(k * np.log(u)) / k)


def q_add(d, a, b):
    """a (+)_q b = a + b + (1-q) a b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return _out(a + b + d.kappa * a * b)


def q_sub(d, a, b):
    """a (-)_q b = (a - b)/(1 + (1-q) b); singular at b = 1/(q-1)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    den = 1.0 + d.kappa * b
    if np.any(den == 0):
        raise SingularityError(f"q-subtraction undefined at b = 1/(q-1) (q={d.q})")
    return _out((a - b) / den)


def deformed_variable(d, u):
    """u_q = ln(exp_q u) = ln[1 + (1-q)u]/(1-q); the identity at q = 1."""
    u = np.asarray(u, dtype=np.float64)
    if d.is_ordinary:
        return _out(u.copy())
    d.check(u)
    return _out(np.log1p(d.kappa * u) / d.kappa)


def deformed_variable_inverse(d, uq):
    """Inverse of :func:`deformed_variable`: u = (e^{(1-q) u_q} - 1)/(1-q)."""
    uq = np.asarray(uq, dtype=np.float64)
    if d.is_ordinary:
        return _out(uq.copy())
    return _out(np.expm1(d.kappa * uq) / d.kappa)


def q_differential(d, u, du):
    """d_q u = du / [1 + (1-q)u]."""
    d.check(u)
    return _out(np.asarray(du, dtype=np.float64) / (1.0 + d.kappa * np.asarray(u, dtype=np.float64)))


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _dual_den(d, fu):
    den = 1.0 + d.gamma_q * np.asarray(fu, dtype=np.float64)
    if np.any(den == 0):
        raise SingularityError("dual q-derivative: 1 + gamma_q f(u) vanishes")
    return den


def q_derivative(d, f, u):
    """D_q f(u) = [1 + gamma_q u] f'(u)."""
    f = _as_handle(f)
    u = np.asarray(u, dtype=np.float64)
    return _out((1.0 + d.gamma_q * u) * f.deriv(u))


def dual_q_derivative(d, f, u):
    """Dual derivative f'(u) / [1 + gamma_q f(u)]."""
    f = _as_handle(f)
    u = np.asarray(u, dtype=np.float64)
    return _out(f.deriv(u) / _dual_den(d, f(u)))


def _outer_step(f, u):
    # The outer stencil differentiates an inner stencil result, so it needs the
    # larger eps**(1/6) step unless the inner derivative is analytic.
    if f.derivative is not None:
        return default_step(u, 1)
    return _NESTED_STEP * np.maximum(1.0, np.abs(u))


def q_derivative_second(d, f, u):
    """D_q^2 f = [1 + gamma_q u] d/du {[1 + gamma_q u] f'(u)}, evaluated as written."""
    f = _as_handle(f)
    u = np.asarray(u, dtype=np.float64)
    g = d.gamma_q
    h = _outer_step(f, u)
    inner_h = None if f.derivative is not None else h

    def inner(v):
        return (1.0 + g * v) * f.deriv(v, h=inner_h)

    return _out((1.0 + g * u) * central_diff(inner, u, order=1, accuracy=4, h=h))


def dual_q_derivative_second(d, f, u):
    """Dual second derivative 1/[1+gamma f] d/du { f'/[1+gamma f] }, evaluated as written."""
    f = _as_handle(f)
    u = np.asarray(u, dtype=np.float64)
    h = _outer_step(f, u)
    inner_h = None if f.derivative is not None else h

    def inner(v):
        return f.deriv(v, h=inner_h) / _dual_den(d, f(v))

    return _out(central_diff(inner, u, order=1, accuracy=4, h=h) / _dual_den(d, f(u)))


# ---------------------------------------------------------------------------
# integral
# ---------------------------------------------------------------------------

def q_integral(d, g, a, b, spec: QuadratureSpec = DEFAULT_QUAD, substitution=None):
    """q-integral of g over [a, b]: int g(x) dx / (1 + gamma_q x).

    ``substitution=(x_of_s, dx_ds)`` integrates over the substituted variable
    instead, so ``a`` and ``b`` are then limits in ``s``; used to remove
    endpoint singularities analytically.
    """
    gamma = d.gamma_q
    g = _as_handle(g)
    if substitution is None:
        lo, hi = min(a, b), max(a, b)
        if gamma != 0 and (1.0 + gamma * lo <= 0 or 1.0 + gamma * hi <= 0):
            raise DomainError(f"q_integral: the pole x = {-1.0 / gamma:g} lies in [{lo:g}, {hi:g}]")

        def integrand(x):
            return np.asarray(g(x), dtype=np.float64) / (1.0 + gamma * x)
    else:
        x_of_s, dx_ds = substitution
        xa, xb = x_of_s(np.asarray(a, dtype=float)), x_of_s(np.asarray(b, dtype=float))
        lo, hi = min(xa, xb), max(xa, xb)
        if gamma != 0 and (1.0 + gamma * lo <= 0 or 1.0 + gamma * hi <= 0):
            raise DomainError(f"q_integral: the pole x = {-1.0 / gamma:g} lies in the mapped interval")

        def integrand(s):
            x = x_of_s(s)
            return np.asarray(g(x), dtype=np.float64) * dx_ds(s) / (1.0 + gamma * x)

    value, _ = adaptive_quad(integrand, a, b, spec)
    return value
