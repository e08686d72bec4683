import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_ivp

from lemnilab.elliptic import EllipticModulus, check_modulus, complete_K, jacobi, jacobi_derivatives, period
from lemnilab.errors import DomainError

moduli = st.floats(0.0, 0.999999, allow_nan=False)
times = st.floats(-50.0, 50.0, allow_nan=False)


def test_K_at_zero_is_half_pi():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("m", [0.1, 0.5, 0.9, 0.99])
def test_K_matches_quadrature(m):
    # substitution x = sin(phi) removes the endpoint singularity
    ref, _ = quad(lambda p: 1.0 / math.sqrt(1.0 - m * math.sin(p) ** 2), 0.0, math.pi / 2,
                  epsabs=1e-14, epsrel=1e-14, limit=200)
    assert complete_K(m) == pytest.approx(ref, rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(moduli)
def test_K_matches_mpmath(m):
    assert complete_K(m) == pytest.approx(float(mpmath.ellipk(m)), rel=2e-14)


def test_K_is_increasing():
    ms = np.linspace(0.0, 0.9999, 400)
    ks = [complete_K(m) for m in ms]
    assert np.all(np.diff(ks) > 0)


def test_period_is_four_K():
    assert period(0.3) == 4 * complete_K(0.3)


@pytest.mark.parametrize("bad", [1.0, -0.1, 1.5, float("nan"), float("inf")])
def test_modulus_domain(bad):
    with pytest.raises(DomainError, match="m="):
        check_modulus(bad)
    with pytest.raises(DomainError):
        jacobi(0.3, bad)


def test_modulus_type():
    mod = EllipticModulus(0.25)
    assert mod.k == 0.5 and mod.complementary == 0.75 and float(mod) == 0.25
    with pytest.raises(DomainError):
        EllipticModulus(1.0)


def test_nonfinite_time_rejected():
    with pytest.raises(DomainError):
        jacobi(float("nan"), 0.5)


def test_m_zero_reduces_to_circular():
    t = np.linspace(-7, 7, 101)
    sn, cn, dn = jacobi(t, 0.0)
    assert np.allclose(sn, np.sin(t), atol=1e-15)
    assert np.allclose(cn, np.cos(t), atol=1e-15)
    assert np.allclose(dn, 1.0, atol=0)


@settings(max_examples=200, deadline=None)
@given(times, moduli)
def test_matches_mpmath(t, m):
    sn, cn, dn = jacobi(t, m)
    ref = [float(mpmath.ellipfun(f, t, m=m)) for f in ("sn", "cn", "dn")]
    assert abs(sn - ref[0]) < 1e-12 and abs(cn - ref[1]) < 1e-12 and abs(dn - ref[2]) < 1e-12


@pytest.mark.parametrize("m", [0.6536604139547734, 0.9976437360316133, 0.5])
def test_matches_ode_solution(m):
    # sn' = cn dn, cn' = -sn dn, dn' = -m sn cn from (0, 1, 1)
    def rhs(_, y):
        s, c, d = y
        return [c * d, -s * d, -m * s * c]

    ts = np.array([0.25, 1.0, 2.5])
    sol = solve_ivp(rhs, (0, 2.5), [0.0, 1.0, 1.0], method="DOP853", rtol=1e-13, atol=1e-14, t_eval=ts)
    got = np.array(jacobi(ts, m))
    assert np.max(np.abs(got - sol.y)) < 1e-10


@settings(max_examples=300, deadline=None)
@given(times, moduli)
def test_pythagorean_identities(t, m):
    sn, cn, dn = jacobi(t, m)
    assert abs(sn * sn + cn * cn - 1.0) <= 1e-13
    assert abs(dn * dn + m * sn * sn - 1.0) <= 1e-13


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), moduli)
def test_periodicity_and_parity(t, m):
    s0, c0, d0 = jacobi(t, m)
    s1, c1, d1 = jacobi(t + period(m), m)
    assert abs(s1 - s0) <= 1e-13 and abs(c1 - c0) <= 1e-13 and abs(d1 - d0) <= 1e-13
    s2, c2, d2 = jacobi(-t, m)
    assert abs(s2 + s0) <= 1e-13 and abs(c2 - c0) <= 1e-13 and abs(d2 - d0) <= 1e-13


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), moduli)
def test_quarter_period_shift(t, m):
    K = complete_K(m)
    sn, cn, dn = jacobi(t, m)
    s1, c1, _ = jacobi(t + K, m)
    assert abs(s1 - cn / dn) <= 1e-12
    assert abs(c1 + math.sqrt(1 - m) * sn / dn) <= 1e-12


def test_special_values():
    m = 0.7
    K = complete_K(m)
    sn, cn, dn = jacobi(K, m)
    assert sn == pytest.approx(1.0, abs=1e-15)
    assert abs(cn) < 1e-15
    assert dn == pytest.approx(math.sqrt(1 - m), abs=1e-15)


def test_derivatives_match_finite_differences():
    m, h = 0.65, 1e-5
    t = np.linspace(-3, 3, 13)
    d = jacobi_derivatives(jacobi(t, m), m)
    plus, minus = np.array(jacobi(t + h, m)), np.array(jacobi(t - h, m))
    assert np.max(np.abs((plus - minus) / (2 * h) - np.array(d))) < 1e-9


def test_scalar_and_array_agree():
    t = np.linspace(-20, 20, 41)
    arr = np.array(jacobi(t, 0.9))
    sc = np.array([jacobi(float(x), 0.9) for x in t]).T
    assert np.max(np.abs(arr - sc)) == 0.0


def test_near_unit_modulus():
    m = 1 - 1e-12
    for t in (0.5, 3.0, 10.0):
        sn, cn, dn = jacobi(t, m)
        mp = mpmath.mpf(m)
        assert abs(sn - float(mpmath.ellipfun("sn", t, m=mp))) < 1e-12
        assert abs(dn - float(mpmath.ellipfun("dn", t, m=mp))) < 1e-12
