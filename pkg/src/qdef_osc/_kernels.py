"""Hot inner loops: fixed-step RK4 for both charts and the three-term recurrences.

Every kernel exists twice: a numba ``@njit`` version looping over scalars and a
pure-numpy version vectorised over the batch/grid axis.  The public names
(``rk4_pdm``, ``rk4_morse``, ``laguerre_array``, ``hermite_functions``) point to
the numba versions unless numba is missing or ``QDEF_OSC_DISABLE_NUMBA=1``.

Batch kernels take 1-D arrays of initial conditions and return arrays of
shape ``(nsteps + 1, batch)`` together with the number of completed steps.
"""

import math
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _flag_disabled():
    return os.environ.get("QDEF_OSC_DISABLE_NUMBA", "0").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _flag_disabled()


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _pdm_rhs_np(x, p, m0, omega0, gamma, force_sign):
    y = 1.0 + gamma * x
    xdot = p * y * y / m0
    pdot = -gamma * y * p * p / m0 - force_sign * m0 * omega0 * omega0 * x
    return xdot, pdot


def rk4_pdm_numpy(x0, p0, dt, nsteps, m0, omega0, gamma, force_sign=1.0, guard=1e-8):
    x = np.array(x0, dtype=np.float64, ndmin=1)
    p = np.array(p0, dtype=np.float64, ndmin=1)
    xs = np.empty((nsteps + 1, x.size))
    ps = np.empty((nsteps + 1, x.size))
    xs[0] = x
    ps[0] = p
    h2 = 0.5 * dt
    for i in range(nsteps):
        k1x, k1p = _pdm_rhs_np(x, p, m0, omega0, gamma, force_sign)
        k2x, k2p = _pdm_rhs_np(x + h2 * k1x, p + h2 * k1p, m0, omega0, gamma, force_sign)
        k3x, k3p = _pdm_rhs_np(x + h2 * k2x, p + h2 * k2p, m0, omega0, gamma, force_sign)
        k4x, k4p = _pdm_rhs_np(x + dt * k3x, p + dt * k3p, m0, omega0, gamma, force_sign)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if np.any(1.0 + gamma * x < guard) or not np.all(np.isfinite(p)):
            return xs[: i + 1], ps[: i + 1], i
        xs[i + 1] = x
        ps[i + 1] = p
    return xs, ps, nsteps


def _morse_force_np(xq, m0, omega0, gamma):
    if gamma == 0.0:
        return -m0 * omega0 * omega0 * xq
    g = gamma * xq
    return -m0 * omega0 * omega0 * np.exp(g) * np.expm1(g) / gamma


def rk4_morse_numpy(xq0, pq0, dt, nsteps, m0, omega0, gamma):
    xq = np.array(xq0, dtype=np.float64, ndmin=1)
    pq = np.array(pq0, dtype=np.float64, ndmin=1)
    xs = np.empty((nsteps + 1, xq.size))
    ps = np.empty((nsteps + 1, xq.size))
    xs[0] = xq
    ps[0] = pq
    h2 = 0.5 * dt
    for i in range(nsteps):
        k1x = pq / m0
        k1p = _morse_force_np(xq, m0, omega0, gamma)
        k2x = (pq + h2 * k1p) / m0
        k2p = _morse_force_np(xq + h2 * k1x, m0, omega0, gamma)
        k3x = (pq + h2 * k2p) / m0
        k3p = _morse_force_np(xq + h2 * k2x, m0, omega0, gamma)
        k4x = (pq + dt * k3p) / m0
        k4p = _morse_force_np(xq + dt * k3x, m0, omega0, gamma)
        xq = xq + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        pq = pq + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        xs[i + 1] = xq
        ps[i + 1] = pq
    return xs, ps, nsteps


def laguerre_array_numpy(n, b, u):
    u = np.asarray(u, dtype=np.float64)
    prev = np.ones_like(u)
    if n == 0:
        return prev
    cur = 1.0 + b - u
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + 1.0 + b - u) * cur - (k + b) * prev) / (k + 1.0)
    return cur


def hermite_functions_numpy(n, xi):
    """Orthonormal Hermite functions h_n(xi) = H_n(xi) exp(-xi^2/2) / sqrt(2^n n! sqrt(pi))."""
    xi = np.asarray(xi, dtype=np.float64)
    prev = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n == 0:
        return prev
    cur = math.sqrt(2.0) * xi * prev
    for k in range(1, n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * xi * cur - math.sqrt(k / (k + 1.0)) * prev
    return cur


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _rk4_pdm_loops(x0, p0, dt, nsteps, m0, omega0, gamma, force_sign, guard):
    nb = x0.shape[0]
    xs = np.empty((nsteps + 1, nb))
    ps = np.empty((nsteps + 1, nb))
    w2 = omega0 * omega0
    done = nsteps
    for j in range(nb):
        x = x0[j]
        p = p0[j]
        xs[0, j] = x
        ps[0, j] = p
        for i in range(nsteps):
            y = 1.0 + gamma * x
            k1x = p * y * y / m0
            k1p = -gamma * y * p * p / m0 - force_sign * m0 * w2 * x
            xa = x + 0.5 * dt * k1x
            pa = p + 0.5 * dt * k1p
            y = 1.0 + gamma * xa
            k2x = pa * y * y / m0
            k2p = -gamma * y * pa * pa / m0 - force_sign * m0 * w2 * xa
            xa = x + 0.5 * dt * k2x
            pa = p + 0.5 * dt * k2p
            y = 1.0 + gamma * xa
            k3x = pa * y * y / m0
            k3p = -gamma * y * pa * pa / m0 - force_sign * m0 * w2 * xa
            xa = x + dt * k3x
            pa = p + dt * k3p
            y = 1.0 + gamma * xa
            k4x = pa * y * y / m0
            k4p = -gamma * y * pa * pa / m0 - force_sign * m0 * w2 * xa
            x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            if 1.0 + gamma * x < guard or not math.isfinite(p):
                if i < done:
                    done = i
                break
            xs[i + 1, j] = x
            ps[i + 1, j] = p
    return xs[: done + 1], ps[: done + 1], done


def _morse_force_scalar(xq, m0, omega0, gamma):
    if gamma == 0.0:
        return -m0 * omega0 * omega0 * xq
    g = gamma * xq
    return -m0 * omega0 * omega0 * math.exp(g) * math.expm1(g) / gamma


def _rk4_morse_loops(xq0, pq0, dt, nsteps, m0, omega0, gamma):
    nb = xq0.shape[0]
    xs = np.empty((nsteps + 1, nb))
    ps = np.empty((nsteps + 1, nb))
    for j in range(nb):
        xq = xq0[j]
        pq = pq0[j]
        xs[0, j] = xq
        ps[0, j] = pq
        for i in range(nsteps):
            k1x = pq / m0
            k1p = _morse_force_scalar(xq, m0, omega0, gamma)
            k2x = (pq + 0.5 * dt * k1p) / m0
            k2p = _morse_force_scalar(xq + 0.5 * dt * k1x, m0, omega0, gamma)
            k3x = (pq + 0.5 * dt * k2p) / m0
            k3p = _morse_force_scalar(xq + 0.5 * dt * k2x, m0, omega0, gamma)
            k4x = (pq + dt * k3p) / m0
            k4p = _morse_force_scalar(xq + dt * k3x, m0, omega0, gamma)
            xq = xq + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            pq = pq + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            xs[i + 1, j] = xq
            ps[i + 1, j] = pq
    return xs, ps, nsteps


_BLOCK = 512


def _laguerre_loops(n, b, u):
    # recurrence outermost within a block of points so the inner loop vectorises
    m = u.shape[0]
    out = np.empty(m)
    prev = np.empty(_BLOCK)
    cur = np.empty(_BLOCK)
    for s in range(0, m, _BLOCK):
        e = min(s + _BLOCK, m)
        w = e - s
        for j in range(w):
            prev[j] = 1.0
            cur[j] = 1.0 + b - u[s + j]
        for k in range(1, n):
            a0 = 2.0 * k + 1.0 + b
            a1 = k + b
            d = k + 1.0
            for j in range(w):
                nxt = ((a0 - u[s + j]) * cur[j] - a1 * prev[j]) / d
                prev[j] = cur[j]
                cur[j] = nxt
        src = prev if n == 0 else cur
        for j in range(w):
            out[s + j] = src[j]
    return out


def _hermite_loops(n, xi):
    m = xi.shape[0]
    out = np.empty(m)
    prev = np.empty(_BLOCK)
    cur = np.empty(_BLOCK)
    c0 = math.pi ** -0.25
    r2 = math.sqrt(2.0)
    for s in range(0, m, _BLOCK):
        e = min(s + _BLOCK, m)
        w = e - s
        for j in range(w):
            x = xi[s + j]
            prev[j] = c0 * math.exp(-0.5 * x * x)
            cur[j] = r2 * x * prev[j]
        for k in range(1, n):
            c1 = math.sqrt(2.0 / (k + 1))
            c2 = math.sqrt(k / (k + 1.0))
            for j in range(w):
                nxt = c1 * xi[s + j] * cur[j] - c2 * prev[j]
                prev[j] = cur[j]
                cur[j] = nxt
        src = prev if n == 0 else cur
        for j in range(w):
            out[s + j] = src[j]
    return out


if HAVE_NUMBA:
    _njit = numba.njit(cache=True)
    _morse_force_scalar = _njit(_morse_force_scalar)
    _rk4_pdm_nb = _njit(_rk4_pdm_loops)
    _rk4_morse_nb = _njit(_rk4_morse_loops)
    _laguerre_nb = _njit(_laguerre_loops)
    _hermite_nb = _njit(_hermite_loops)
else:  # pragma: no cover
    _rk4_pdm_nb = _rk4_pdm_loops
    _rk4_morse_nb = _rk4_morse_loops
    _laguerre_nb = _laguerre_loops
    _hermite_nb = _hermite_loops


def rk4_pdm_numba(x0, p0, dt, nsteps, m0, omega0, gamma, force_sign=1.0, guard=1e-8):
    x0 = np.ascontiguousarray(x0, dtype=np.float64).reshape(-1)
    p0 = np.ascontiguousarray(p0, dtype=np.float64).reshape(-1)
    return _rk4_pdm_nb(x0, p0, float(dt), int(nsteps), float(m0), float(omega0),
                       float(gamma), float(force_sign), float(guard))


def rk4_morse_numba(xq0, pq0, dt, nsteps, m0, omega0, gamma):
    xq0 = np.ascontiguousarray(xq0, dtype=np.float64).reshape(-1)
    pq0 = np.ascontiguousarray(pq0, dtype=np.float64).reshape(-1)
    return _rk4_morse_nb(xq0, pq0, float(dt), int(nsteps), float(m0), float(omega0), float(gamma))


def _flat_call(kernel, n, arg, *extra):
    arr = np.asarray(arg, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    return kernel(int(n), *extra, flat).reshape(arr.shape)


def laguerre_array_numba(n, b, u):
    arr = np.asarray(u, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    return _laguerre_nb(int(n), float(b), flat).reshape(arr.shape)


def hermite_functions_numba(n, xi):
    return _flat_call(_hermite_nb, n, xi)


if USE_NUMBA:
    rk4_pdm = rk4_pdm_numba
    rk4_morse = rk4_morse_numba
    laguerre_array = laguerre_array_numba
    hermite_functions = hermite_functions_numba
else:
    rk4_pdm = rk4_pdm_numpy
    rk4_morse = rk4_morse_numpy
    laguerre_array = laguerre_array_numpy
    hermite_functions = hermite_functions_numpy


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
