import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special as sp

from foldpam.errors import DomainError, RootFindingError, SingularityError
from foldpam.special import (
    carlson_rd,
    carlson_rf,
    ellip_e,
    ellip_f,
    ellip_f_minus_e,
    find_root_bracketed,
)

from oracles import bisect, ellip_e_quad, ellip_f_quad

phis = st.floats(0.0, math.pi / 2)
ms = st.floats(0.0, 0.999)


@pytest.mark.parametrize("phi", [0.1, 0.7, 1.2, math.pi / 2])
@pytest.mark.parametrize("m", [0.0, 0.3, 0.8, 0.99])
def test_quadrature_agreement(phi, m):
    assert ellip_f(phi, m) == pytest.approx(ellip_f_quad(phi, m), rel=1e-13)
    assert ellip_e(phi, m) == pytest.approx(ellip_e_quad(phi, m), rel=1e-13)


@given(phis, ms)
def test_matches_scipy(phi, m):
    assert ellip_f(phi, m) == pytest.approx(sp.ellipkinc(phi, m), rel=1e-12, abs=1e-300)
    assert ellip_e(phi, m) == pytest.approx(sp.ellipeinc(phi, m), rel=1e-12, abs=1e-300)


@given(phis, ms)
def test_f_minus_e_consistent(phi, m):
    d = ellip_f_minus_e(phi, m)
    assert d >= 0.0
    assert d == pytest.approx(ellip_f(phi, m) - ellip_e(phi, m), rel=1e-9, abs=1e-15)


def test_f_minus_e_no_cancellation_at_tiny_m():
    # leading term m * (phi - sin phi cos phi) / 2
    phi, m = 1.0, 1e-14
    expected = m * (phi - math.sin(phi) * math.cos(phi)) / 2
    assert ellip_f_minus_e(phi, m) == pytest.approx(expected, rel=1e-6)


def test_trivial_values():
    assert ellip_f(0.0, 0.5) == 0.0
    assert ellip_e(0.0, 0.5) == 0.0
    assert ellip_f(0.8, 0.0) == pytest.approx(0.8, rel=1e-15)
    assert ellip_e(0.8, 0.0) == pytest.approx(0.8, rel=1e-15)
    assert ellip_f(math.pi / 2, 0.5) == pytest.approx(sp.ellipk(0.5), rel=1e-14)
    assert ellip_e(math.pi / 2, 0.5) == pytest.approx(sp.ellipe(0.5), rel=1e-14)
    # F(phi|1) = artanh(sin phi), E(phi|1) = sin phi
    assert ellip_f(1.0, 1.0) == pytest.approx(math.atanh(math.sin(1.0)), rel=1e-13)
    assert ellip_e(1.0, 1.0) == pytest.approx(math.sin(1.0), rel=1e-13)


def test_carlson_closed_forms():
    # R_F(x, x, x) = 1/sqrt(x); R_D(x, x, x) = x^(-3/2); R_F(0, 1, 1) = pi/2
    assert carlson_rf(4.0, 4.0, 4.0) == pytest.approx(0.5, rel=1e-15)
    assert carlson_rd(4.0, 4.0, 4.0) == pytest.approx(0.125, rel=1e-15)
    assert carlson_rf(0.0, 1.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-15)


def test_domain_errors():
    with pytest.raises(SingularityError):
        ellip_f(math.pi / 2, 1.0)
    with pytest.raises(DomainError):
        ellip_f(-0.1, 0.5)
    with pytest.raises(DomainError):
        ellip_e(0.5, 1.5)
    with pytest.raises(DomainError):
        ellip_f(float("nan"), 0.5)
    with pytest.raises(SingularityError):
        carlson_rf(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        carlson_rd(1.0, 1.0, 0.0)


@given(st.floats(0.05, 0.95), st.floats(0.5, 5.0))
def test_root_matches_bisection(c, k):
    f = lambda x: math.tanh(k * (x - c)) + 0.1 * (x - c) ** 3  # noqa: E731
    root = find_root_bracketed(f, 0.0, 1.0)
    assert root == pytest.approx(bisect(f, 0.0, 1.0), abs=1e-11)
    assert root == pytest.approx(c, abs=1e-11)


def test_root_edge_cases():
    assert find_root_bracketed(lambda x: x, 0.0, 1.0) == 0.0
    assert find_root_bracketed(lambda x: x - 1.0, 0.0, 1.0) == 1.0
    with pytest.raises(RootFindingError):
        find_root_bracketed(lambda x: x * x + 1.0, -1.0, 1.0)
    with pytest.raises(RootFindingError):
        find_root_bracketed(lambda x: x, 1.0, 0.0)
    with pytest.raises(RootFindingError):
        find_root_bracketed(lambda x: x, -1.0, 1.0, tol=0.0)


def test_root_within_bracket():
    r = find_root_bracketed(lambda x: np.cos(x) - x, 0.0, 1.0)
    assert 0.0 <= r <= 1.0
    assert math.cos(r) - r == pytest.approx(0.0, abs=1e-12)
