import math

import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from qdef_osc.errors import DomainError, RegimeError, UnboundStateError
from qdef_osc.quantum import (
    QuantumModel, amplitude, bound_state, correspondence_check, default_grid, deformed_norms, deformed_residual,
    density_2d, density_2d_norm, energy_level, expectation_values, expectations_by_quadrature, inner_product,
    node_count, norm_by_quadrature, p2_alt_ratio, p2_ratio_form, schrodinger_residual, spectrum,
    stationary_current, uncertainties, virial_quantum, wavefunction, wavefunction_derivative,
)


def morse_fd(model, n_states, lo=-30.0, hi=12.0, points=8000):
    """Finite-difference eigenpairs of -hbar^2/(2 m0) phi'' + V(x_q) phi in the deformed chart.

    V(x_q) = m0 omega0^2 (exp(gamma x_q) - 1)^2 / (2 gamma^2) is the oscillator potential in x_q;
    the plateau side (x_q -> -inf for gamma > 0) needs the long end of the box.
    """
    g = model.gamma_q
    if g < 0:
        lo, hi = -hi, -lo
    s = np.linspace(lo, hi, points)
    h = s[1] - s[0]
    V = model.m0 * model.omega0**2 * np.expm1(g * s) ** 2 / (2 * g * g)
    c = model.hbar**2 / (2 * model.m0 * h * h)
    vals, vecs = eigh_tridiagonal(V + 2 * c, -c * np.ones(points - 1), select="i", select_range=(0, n_states - 1))
    return s, h, vals, vecs


def test_model_and_counts():
    m = QuantumModel.from_gamma_x0(0.3)
    assert m.n_max == 10 and len(spectrum(m)) == 11
    assert m.d == pytest.approx(1 / 0.09)
    for n, E, *_ in spectrum(m):
        assert E < m.W_q
    with pytest.raises(UnboundStateError):
        wavefunction(m, 11, 0.0)
    with pytest.raises(DomainError):
        energy_level(m, 1.5)
    with pytest.raises(RegimeError):
        QuantumModel.from_gamma_x0(1.5)


def test_ground_energy_frozen():
    # hbar omega0 [(n + 1/2) - (gamma x0)^2 (n + 1/2)^2 / 2] at n = 0, gamma x0 = 0.3
    assert energy_level(QuantumModel.from_gamma_x0(0.3), 0) == pytest.approx(0.48875, rel=1e-15)


@pytest.mark.parametrize("gx", [0.2, 0.3, -0.25])
def test_energies_against_finite_differences(gx):
    m = QuantumModel.from_gamma_x0(gx)
    _, _, vals, _ = morse_fd(m, 6)
    closed = [energy_level(m, n) for n in range(6)]
    np.testing.assert_allclose(vals, closed, rtol=2e-5)


def test_wavefunctions_against_finite_differences():
    m = QuantumModel.from_gamma_x0(0.3)
    s, h, _, vecs = morse_fd(m, 4)
    x = np.expm1(m.gamma_q * s) / m.gamma_q
    y = np.exp(m.gamma_q * s)
    for n in range(4):
        # phi dx_q-normalised -> psi = phi / sqrt(1 + gamma x)
        phi = vecs[:, n] / math.sqrt(h)
        ref = phi / np.sqrt(y)
        psi = wavefunction(m, n, x)
        sign = np.sign(np.dot(psi, ref))
        np.testing.assert_allclose(psi, sign * ref, atol=2e-4)


def test_sho_limit_is_hermite():
    m = QuantumModel.from_gamma_x0(1e-6)
    assert m.is_sho
    x = np.linspace(-5, 5, 41)
    for n in range(5):
        ref = sp.eval_hermite(n, x) * np.exp(-x * x / 2) / math.sqrt(2**n * math.factorial(n) * math.sqrt(math.pi))
        np.testing.assert_allclose(wavefunction(m, n, x), ref, atol=1e-12)
        assert energy_level(m, n) == pytest.approx(n + 0.5, rel=1e-10)


def test_crossover_continuity():
    # just above the SHO crossover the Laguerre form differs from Hermite only at first order in gamma x0
    x = np.linspace(-3, 3, 13)
    above = QuantumModel.from_gamma_x0(2e-5)
    below = QuantumModel.from_gamma_x0(5e-6)
    for n in (0, 3):
        assert np.max(np.abs(wavefunction(above, n, x) - wavefunction(below, n, x))) < 1e-3


@pytest.mark.parametrize("gx", [0.1, 0.3, -0.3, 0.6])
def test_orthonormality(gx):
    m = QuantumModel.from_gamma_x0(gx)
    top = min(4, m.n_max)
    for a in range(top + 1):
        assert norm_by_quadrature(m, a) == pytest.approx(1.0, abs=1e-9)
        for b in range(a):
            assert abs(inner_product(m, a, b)) < 1e-9


def test_norm_near_dissociation():
    m = QuantumModel.from_gamma_x0(0.3)
    # n = 10 has b ~ 1.2: the density still reaches the pole
    assert norm_by_quadrature(m, 10) == pytest.approx(1.0, abs=1e-9)


def test_normalisation_against_scipy_quad():
    m = QuantumModel.from_gamma_x0(0.2)
    for n in (0, 3):
        val = quad(lambda x: wavefunction(m, n, x) ** 2, -1 / m.gamma_q, np.inf, limit=400)[0]
        assert val == pytest.approx(1.0, abs=1e-8)


def test_large_d_stirling_branch():
    m = QuantumModel.from_gamma_x0(0.01)  # d = 1e4 uses the Stirling normalisation
    for n in (0, 7):
        assert norm_by_quadrature(m, n) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("gx", [0.1, 0.2, 0.3])
def test_schrodinger_residual(gx):
    m = QuantumModel.from_gamma_x0(gx)
    for n in range(6):
        assert schrodinger_residual(m, n) < 1e-6
        assert node_count(m, n) == n


def test_deformed_equation_and_norms():
    m = QuantumModel.from_gamma_x0(0.2)
    for n in (0, 2):
        assert deformed_residual(m, n) < 1e-6
        norms = deformed_norms(m, n)
        assert all(v == pytest.approx(1.0, abs=1e-8) for v in np.atleast_1d(norms))


def test_derivative_against_finite_difference():
    m = QuantumModel.from_gamma_x0(0.3)
    x = np.linspace(-1.5, 3.0, 19)
    h = 1e-6
    for n in (0, 4):
        fd = (wavefunction(m, n, x + h) - wavefunction(m, n, x - h)) / (2 * h)
        np.testing.assert_allclose(wavefunction_derivative(m, n, x), fd, atol=1e-7)


def test_stationary_current_zero():
    m = QuantumModel.from_gamma_x0(0.3)
    assert np.max(np.abs(stationary_current(m, 2, np.linspace(-1, 2, 9)))) == 0.0


@pytest.mark.parametrize("gx", [0.1, 0.2, 0.3])
def test_moments(gx):
    m = QuantumModel.from_gamma_x0(gx)
    for n in range(6):
        if m.b(n) <= 2:
            continue
        ev = expectation_values(m, n)
        qv = expectations_by_quadrature(m, n)
        assert qv.x == pytest.approx(ev.x, abs=1e-8)
        assert qv.x2 == pytest.approx(ev.x2, rel=1e-8)
        assert qv.p2 == pytest.approx(ev.p2, rel=1e-8)
        assert p2_ratio_form(m, n) == pytest.approx(ev.p2, rel=1e-12)


def test_moments_against_finite_differences():
    m = QuantumModel.from_gamma_x0(0.25)
    s, h, _, vecs = morse_fd(m, 3)
    x = np.expm1(m.gamma_q * s) / m.gamma_q
    for n in range(3):
        w = vecs[:, n] ** 2  # probability per grid cell
        ev = expectation_values(m, n)
        assert np.dot(w, x) == pytest.approx(ev.x, abs=1e-4)
        assert np.dot(w, x * x) == pytest.approx(ev.x2, rel=1e-4)


def test_alternative_p2_ratio_differs():
    m = QuantumModel.from_gamma_x0(0.2)
    assert abs(p2_alt_ratio(m, 3) / p2_ratio_form(m, 3) - 1) > 1e-3


def test_divergent_p2():
    m = QuantumModel.from_gamma_x0(0.3)
    assert m.b(10) < 2
    with pytest.raises(RegimeError):
        expectation_values(m, 10)
    assert math.isinf(uncertainties(m, 10).dp)


def test_virial_and_uncertainty():
    for gx in (0.0, 0.1, 0.3, -0.2):
        m = QuantumModel.from_gamma_x0(gx)
        for n in range(5):
            T, V, r = virial_quantum(m, n)
            a = amplitude(m, n)
            assert r == pytest.approx(math.sqrt(1 - (m.gamma_q * a) ** 2), rel=1e-10)
            assert uncertainties(m, n).product >= 0.5 * m.hbar
    sho = QuantumModel.from_gamma_x0(0.0)
    assert uncertainties(sho, 3).product == pytest.approx(3.5, rel=1e-14)


def test_bound_state_record():
    m = QuantumModel.from_gamma_x0(0.3)
    bs = bound_state(m, 2)
    assert bs.b == pytest.approx(2 / 0.09 - 5)
    assert bs.a_qn == pytest.approx(amplitude(m, 2))


def test_correspondence():
    m = QuantumModel.from_gamma_x0(0.2)
    c = correspondence_check(m, 10)
    assert c.mean_abs < 0.05
    # the ground state is far from classical
    assert correspondence_check(m, 0).mean_abs > 0.1


def test_density_2d():
    mx = QuantumModel.from_gamma_x0(0.2)
    my = QuantumModel.from_gamma_x0(0.1)
    grid = np.linspace(-2, 2, 5)
    tab = density_2d(mx, my, 1, 2, grid, grid)
    assert len(tab) == 25
    assert density_2d_norm(mx, my, 1, 2) == pytest.approx(1.0, abs=1e-9)


def test_default_grid_within_domain():
    m = QuantumModel.from_gamma_x0(0.3)
    g = default_grid(m, 3)
    assert np.all(1 + m.gamma_q * g > 0)
