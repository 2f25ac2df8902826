import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qdef_osc.errors import DomainError, SingularityError
from qdef_osc.q_calculus import (
    Deformation, RealFunctionHandle, deformed_variable, deformed_variable_inverse, dual_q_derivative,
    dual_q_derivative_second, q_add, q_derivative, q_derivative_second, q_differential, q_exp, q_integral,
    q_ln, q_sub,
)

qs = st.floats(0.0, 2.0)
small = st.floats(-0.45, 0.45)


def test_deformation_fields():
    d = Deformation(0.4, xi=2.0)
    assert d.gamma_q * d.xi == 1 - 0.4
    assert Deformation.from_gamma(0.3, 2.0).q == pytest.approx(0.4)
    with pytest.raises(DomainError):
        Deformation(0.5, xi=0.0)


def test_q_exp_examples():
    assert q_exp(Deformation(1.0), 1.0) == pytest.approx(math.e, rel=1e-15)
    assert q_exp(Deformation(0.0), 0.5) == pytest.approx(1.5, rel=1e-15)
    # high-precision oracle for [1 + (1-q)u]^(1/(1-q)) at q=2, u=-0.5
    with mpmath.workdps(40):
        ref = float(mpmath.power(1 + (1 - 2) * mpmath.mpf(-0.5), 1 / mpmath.mpf(1 - 2)))
    assert q_exp(Deformation(2.0), -0.5) == pytest.approx(ref, rel=1e-15)
    assert ref == pytest.approx(2.0 / 3.0)


def test_q_exp_cutoff_and_divergence():
    assert q_exp(Deformation(0.5), -3.0) == 0.0
    np.testing.assert_array_equal(q_exp(Deformation(0.0), np.array([-2.0, -1.0])), [0.0, 0.0])
    with pytest.raises(DomainError):
        q_exp(Deformation(2.0), 1.0)


def test_q_ln_examples():
    assert q_ln(Deformation(1.0), math.e) == pytest.approx(1.0)
    for q in (0.0, 0.3, 1.7):
        assert q_ln(Deformation(q), 1.0) == 0.0
    assert q_ln(Deformation(0.5), 4.0) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(DomainError):
        q_ln(Deformation(0.5), 0.0)


def test_q_add_sub_examples():
    assert q_add(Deformation(1.0), 2, 3) == 5
    assert q_add(Deformation(0.0), 2, 3) == 11
    d = Deformation(0.4)
    assert q_sub(d, q_add(d, 0.3, 0.7), 0.7) == pytest.approx(0.3, abs=1e-15)
    with pytest.raises(SingularityError):
        q_sub(Deformation(2.0), 1.0, 1.0)  # b = 1/(q-1)


def test_deformed_variable_examples():
    assert deformed_variable(Deformation(1.0), 7.0) == 7.0
    assert deformed_variable(Deformation(0.0), 1.0) == pytest.approx(math.log(2.0), rel=1e-15)
    assert deformed_variable(Deformation(0.3), 0.0) == 0.0
    with pytest.raises(DomainError):
        deformed_variable(Deformation(0.0), -1.0)
    # d u_q = du / (1 + (1-q) u)
    d = Deformation(0.3)
    h = 1e-6
    fd = (deformed_variable(d, 0.5 + h) - deformed_variable(d, 0.5 - h)) / (2 * h)
    assert fd == pytest.approx(q_differential(d, 0.5, 1.0), rel=1e-9)
    assert deformed_variable_inverse(d, deformed_variable(d, 0.5)) == pytest.approx(0.5, rel=1e-15)


@given(qs, small)
def test_round_trips(q, u):
    d = Deformation(q)
    assert abs(q_ln(d, q_exp(d, u)) - u) < 1e-12
    v = 1.0 + u
    assert abs(q_exp(d, q_ln(d, v)) - v) < 1e-12


@given(qs, small, small)
def test_group_law(q, a, b):
    d = Deformation(q)
    s = q_add(d, a, b)
    assume(1.0 + d.kappa * s > 1e-3)
    assert q_exp(d, a) * q_exp(d, b) == pytest.approx(q_exp(d, s), rel=1e-10)
    assert q_exp(d, a) / q_exp(d, b) == pytest.approx(q_exp(d, q_sub(d, a, b)), rel=1e-10)


@given(st.floats(-2.0, 2.0))
def test_q_to_one_continuity(u):
    for q in (1 - 1e-9, 1 + 1e-9):
        d = Deformation(q)
        assert q_exp(d, u) == pytest.approx(math.exp(u), rel=1e-6)
        assert q_ln(d, abs(u) + 0.1) == pytest.approx(math.log(abs(u) + 0.1), rel=1e-6, abs=1e-6)
        assert deformed_variable(d, u) == pytest.approx(u, rel=1e-6, abs=1e-9)


@given(qs, small)
def test_eigenfunction_properties(q, u):
    d = Deformation(q)
    assert q_derivative(d, lambda v: q_exp(d, v), u) == pytest.approx(q_exp(d, u), rel=1e-8)
    v = 1.5 + u
    assert dual_q_derivative(d, lambda w: q_ln(d, w), v) == pytest.approx(1.0 / v, rel=1e-8)


@given(qs, small)
def test_duality(q, x):
    d = Deformation(q)
    y = q_exp(d, x)
    prod = dual_q_derivative(d, lambda w: q_ln(d, w), y) * q_derivative(d, lambda w: q_exp(d, w), x)
    assert prod == pytest.approx(1.0, abs=1e-8)


def test_listed_derivative_examples():
    d = Deformation(0.6)
    assert q_derivative(d, lambda v: q_exp(d, v), 0.3) == pytest.approx(q_exp(d, 0.3), rel=1e-9)
    assert dual_q_derivative(Deformation(0.4), lambda w: q_ln(Deformation(0.4), w), 2.0) == pytest.approx(0.5, rel=1e-9)
    d = Deformation(0.7)
    y = q_exp(d, 0.4)
    prod = dual_q_derivative(d, lambda w: q_ln(d, w), y) * q_derivative(d, lambda w: q_exp(d, w), 0.4)
    assert prod == pytest.approx(1.0, abs=1e-9)


def test_second_derivatives():
    one = Deformation(1.0)
    assert q_derivative_second(one, lambda u: u * u, 1.0) == pytest.approx(2.0, rel=1e-8)
    assert dual_q_derivative_second(one, lambda u: u * u, 1.0) == pytest.approx(2.0, rel=1e-8)
    d = Deformation(0.8)
    assert q_derivative_second(d, lambda v: q_exp(d, v), 0.2) == pytest.approx(q_exp(d, 0.2), rel=1e-8)
    # with an analytic inner derivative the outer stencil can use the cbrt(eps) step
    f = RealFunctionHandle(lambda v: q_exp(d, v), lambda v: q_exp(d, v) / (1 + d.kappa * v))
    assert q_derivative_second(d, f, 0.2) == pytest.approx(q_exp(d, 0.2), rel=1e-10)


def test_dual_singularity():
    d = Deformation(2.0)  # gamma = -1: 1 + gamma f vanishes where f = 1
    with pytest.raises(SingularityError):
        dual_q_derivative(d, lambda u: np.ones_like(u), 0.3)


def test_q_integral():
    d = Deformation.from_gamma(0.0)
    assert q_integral(d, np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)
    d = Deformation.from_gamma(0.7)
    b = 2.0
    val = q_integral(d, lambda x: np.ones_like(x), 0.0, b)
    assert val == pytest.approx(math.log1p(0.7 * b) / 0.7, rel=1e-12)
    assert val == pytest.approx(deformed_variable(d, b / d.xi) * d.xi, rel=1e-12)
    with pytest.raises(DomainError):
        q_integral(d, np.cos, -2.0, 0.0)  # pole at -1/0.7


def test_q_integral_change_of_variables():
    gamma = 0.4
    d = Deformation.from_gamma(gamma)

    def g(x):
        return np.exp(-x * x) * (1 + x)

    a, b = -1.5, 2.0
    direct = q_integral(d, g, a, b)
    # in x_q the deformed measure dx/(1+gamma x) is plain dx_q
    xq_a, xq_b = deformed_variable(d, a), deformed_variable(d, b)
    mapped = q_integral(Deformation(1.0), lambda s: g(deformed_variable_inverse(d, s)), xq_a, xq_b)
    assert direct == pytest.approx(mapped, rel=1e-10)
