import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import quad

from halfline import extensions as ex
from halfline.errors import ArgumentError, NoRoot, PoleError, RangeError, RegimeError
from halfline.radial import GridFunction, TestFamily, default_grid, lm_relative_residual
from halfline.resolvent import resolvent_hm
from halfline.selftest import form_fixture_grid


@pytest.fixture(scope="module")
def g():
    return default_grid()


def test_cutoff():
    x = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    np.testing.assert_allclose(ex.cutoff_xi(x), [1, 1, 1, 0.5, 0, 0], atol=1e-15)


def test_angle_validation():
    with pytest.raises(RangeError):
        ex.ExtensionAngle(math.pi)
    assert ex.ExtensionAngle(math.pi / 2).is_friedrichs(0.3)
    assert ex.ExtensionAngle(0.0).is_krein(0.3)
    assert not ex.ExtensionAngle(0.0).is_krein(1.3)


@pytest.mark.parametrize("m", [0.0, 0.3, 0.7, 0.5j])
def test_boundary_function_is_harmonic(g, m):
    u = ex.boundary_function(m, 1.1, g)
    assert lm_relative_residual(m, u) < 1e-7


def test_boundary_function_regime(g):
    with pytest.raises(RegimeError):
        ex.boundary_function(1.2, 0.3, g)


@pytest.mark.parametrize("m", [0.2, 0.45, 0.8])
def test_boundary_data(g, m):
    th = 2.2
    u = ex.boundary_function(m, th, g)
    d = ex.extract_boundary_data(m, u)
    assert d.a == pytest.approx(math.cos(th), abs=1e-9)
    assert d.b == pytest.approx(math.sin(th), abs=1e-7)
    # the limit x^{m-1/2} u -> cos(theta) converges like x^{2m}; the estimate must cover the error
    lim, est = ex.boundary_limit(g, g.nodes ** (m - 0.5) * u.values)
    assert abs(lim - math.cos(th)) <= est
    assert est < 0.05
    assert ex.kappa(m, u) == pytest.approx(lim, rel=1e-12)


@pytest.mark.parametrize("m", [0.2, 0.45, 0.8])
def test_boundary_wronskian_sign(g, m):
    # W_0(x^{1/2-m}, x^{1/2+m}) = +2m
    w = ex.boundary_wronskian(ex.boundary_function(m, 0.0, g), ex.boundary_function(m, math.pi / 2, g))
    assert w == pytest.approx(2 * m, abs=1e-6)


def test_bound_state_oracle(oracles, g):
    for row in oracles["bound_state"]:
        bs = ex.bound_state(row["m"], row["theta"], g)
        assert bs.k == pytest.approx(row["k"], rel=1e-12)
        assert bs.energy == pytest.approx(-row["k"] ** 2, rel=1e-12)
        assert abs(ex.matching_function(row["m"], row["theta"], bs.k)) < 1e-10


def test_bound_state_examples(g):
    assert ex.bound_state(0.5, 3 * math.pi / 4, g).energy == pytest.approx(-1.0, abs=1e-12)
    assert ex.bound_state(0.5, 2 * math.pi / 3, g).energy == pytest.approx(-3.0, abs=1e-12)


@pytest.mark.parametrize("m, theta", [(0.3, 2.0), (0.8, 2.8), (0.0, 0.4)])
def test_bound_state_eigenfunction(g, m, theta):
    bs = ex.bound_state(m, theta, g)
    u = bs.eigenfunction
    assert u.norm() == pytest.approx(1.0, rel=1e-10)
    assert lm_relative_residual(m, u, rhs=bs.energy * u.values) < 1e-6
    ut = ex.boundary_function(m, theta, g)
    w, est = ex.boundary_wronskian(ut, u, with_error=True)
    terms = np.max(np.abs(ut.values * g.diff(u.values, 1))[:50])
    assert abs(w) <= est
    assert abs(w) < 1e-5 * max(1.0, terms)


def test_bound_state_absence(g):
    for th in (0.0, 0.5, math.pi / 2):
        with pytest.raises(NoRoot):
            ex.bound_state(0.4, th, g)
    with pytest.raises(NoRoot):
        ex.bound_state(0.0, math.pi / 2, g)
    with pytest.raises(RegimeError):
        ex.bound_state(1.5, 2.0, g)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 1.0))
def test_bound_state_count(m, frac):
    from scipy.special import gamma

    th = frac * math.pi * 0.999
    energies = -np.geomspace(1e8, 1e-12, 6001)
    n = ex.count_bound_states(m, th, energies)
    if not math.pi / 2 < th < math.pi:
        assert n == 0
        return
    k = 2 * (-math.tan(th) * gamma(1 + m) / gamma(1 - m)) ** (1 / (2 * m))
    # roots outside the scanned window cannot be seen
    assume(1e-12 < k * k < 1e8)
    assert n == 1


def test_resolvent_theta_friedrichs_matches(g):
    m, k = 0.4, 1.3
    h = GridFunction(g, g.nodes**2 * np.exp(-g.nodes))
    a = ex.resolvent_theta(m, math.pi / 2, k, g).apply(h)
    b = resolvent_hm(m, k, g, entries=False).apply(h)
    assert (a - b).norm() < 1e-8 * b.norm()


@pytest.mark.parametrize("theta", [0.0, 0.9, 2.4])
def test_resolvent_theta_boundary_condition(g, theta):
    m, k = 0.35, 1.1
    h = GridFunction(g, g.nodes**3 * np.exp(-g.nodes))
    f = ex.resolvent_theta(m, theta, k, g).apply(h)
    assert lm_relative_residual(m, f, rhs=h.values - k * k * f.values) < 1e-5
    d = ex.extract_boundary_data(m, f)
    # f ~ c u_theta near 0, so (a, b) is parallel to (cos, sin); the (kx)^2 terms of
    # the regular solutions leak about k^2 x^{2-2m} into b at the top of the fitted decade
    assert abs(d.a * math.sin(theta) - d.b * math.cos(theta)) < 1e-4 * (abs(d.a) + abs(d.b))


def test_resolvent_theta_pole(g):
    bs = ex.bound_state(0.5, 3 * math.pi / 4, g)
    with pytest.raises(PoleError):
        ex.resolvent_theta(0.5, 3 * math.pi / 4, bs.k, g)


def test_form_oracle(oracles):
    grid = form_fixture_grid()
    x = grid.nodes
    for row in oracles["form"]:
        m, th = row["m"], row["theta"]
        f = GridFunction(grid, ex.cutoff_xi(x) * ex.boundary_function(m, th, grid).values)
        q = ex.quadratic_form_theta(m, th, f)
        scale = abs(row["value"]) + abs(m * math.sin(2 * th))
        assert abs(q.real - row["value"]) < 1e-4 * scale, row
        assert abs(q.imag) < 1e-12 * scale


def test_form_friedrichs_equals_direct(g):
    f = GridFunction(g, g.nodes**2.5 * np.exp(-g.nodes**2 / 2))
    q = ex.quadratic_form_theta(0.4, math.pi / 2, f)
    assert q.real == pytest.approx(ex.form_value(0.4, f).real, rel=1e-6)


def test_numerical_range_closed_form():
    m, a, gam, dl, R = 0.6 + 0.5j, 0.4, -0.7, -1.3, 3.0
    c = m * m - 0.25

    def f(x):
        if x < a:
            return x ** (m + 0.5), (m + 0.5) * x ** (m - 0.5)
        if x < R:
            amp = a ** (m + 0.5 - gam)
            return amp * x**gam, amp * gam * x ** (gam - 1)
        amp = a ** (m + 0.5 - gam) * R ** (gam - dl)
        return amp * x**dl, amp * dl * x ** (dl - 1)

    def integrand(x, part):
        v, d = f(x)
        val = abs(d) ** 2 + c / x**2 * abs(v) ** 2
        return val.real if part == 0 else val.imag

    total = 0j
    for lo, hi in ((0, a), (a, R), (R, np.inf)):
        re = quad(integrand, lo, hi, args=(0,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        im = quad(integrand, lo, hi, args=(1,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        total += complex(re, im)
    assert ex.numerical_range_sample(m, a, gam, dl, R) == pytest.approx(total, rel=1e-9)


def test_numerical_range_arguments():
    with pytest.raises(ArgumentError):
        ex.numerical_range_sample(0.5, 1.5, 0.0, -1.0, 3.0)


@pytest.mark.parametrize("m", [np.exp(1j * math.pi / 6), np.exp(1j * math.pi / 3), 0.7])
def test_numerical_range_in_cone(m):
    z = ex.sample_numerical_range(m, 300, np.random.default_rng(7))
    assert np.all(ex.in_cone(z, m))


def test_in_cone_rejects_outside():
    m = np.exp(1j * math.pi / 6)
    assert not ex.in_cone(np.exp(1j * 1.2), m)
    assert not ex.in_cone(np.exp(-0.1j), m)
    assert ex.in_cone(0j, m)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(0.55, 4.0), st.floats(0.2, 5.0))
def test_form_monotone(a, b, p, s):
    m1, m2 = sorted((a, b))
    f = TestFamily(((p, s),)).sample(default_grid())[0]
    q1, q2 = ex.form_monotonicity_check(m1, m2, f)
    assert q1 <= q2 + 1e-10 * abs(q2)


def test_monotonicity_arguments(g):
    with pytest.raises(ArgumentError):
        ex.form_monotonicity_check(0.6, 0.3, GridFunction(g, np.ones(g.n)))
