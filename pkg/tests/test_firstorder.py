import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfline import firstorder as fo
from halfline.errors import ArgumentError, RangeError
from halfline.radial import GridFunction, TestFamily, default_grid, norm


@pytest.fixture(scope="module")
def g():
    return default_grid()


def _power_exp(grid, alpha):
    return GridFunction(grid, grid.nodes**alpha * np.exp(-grid.nodes))


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.25 + 0.5j, 1.2])
def test_resolvent_max_closed_form(g, alpha):
    lam = 0.7 - 1.1j
    x = g.nodes
    f = fo.resolvent_amax(alpha, lam, _power_exp(g, alpha))
    exact = -1j * x**alpha * np.exp(-x) / (1 + 1j * lam)
    band = g.band()
    assert np.max(np.abs(f.values - exact)[band]) < 1e-10 * np.max(np.abs(exact))


@pytest.mark.parametrize("alpha", [0.0, -0.3, 0.2 - 0.4j, -1.5])
def test_resolvent_min_closed_form(g, alpha):
    lam = -0.4 + 0.9j
    x = g.nodes
    f = fo.resolvent_amin(alpha, lam, _power_exp(g, alpha))
    # the grid integral starts at its first edge a, not at 0
    start = np.exp(-(1 + 1j * lam) * g.a)
    exact = 1j * x**alpha * np.exp(1j * lam * x) * (start - np.exp(-(1 + 1j * lam) * x)) / (1 + 1j * lam)
    band = g.band()
    assert np.max(np.abs(f.values - exact)[band]) < 1e-10 * np.max(np.abs(exact))


def test_resolvent_residuals(g):
    h = GridFunction(g, g.nodes**2 * np.exp(-g.nodes**2 / 2))
    f = fo.resolvent_amax(0.4, 1 - 2j, h)
    assert fo.aalpha_residual_norm(0.4, f, 1 - 2j, h) < 1e-6
    f = fo.resolvent_amin(-0.2, 1 + 2j, h)
    assert fo.aalpha_residual_norm(-0.2, f, 1 + 2j, h) < 1e-6


def test_resolvent_domain_checks(g):
    h = _power_exp(g, 0.0)
    with pytest.raises(RangeError):
        fo.resolvent_amax(0.0, 1 + 1j, h)
    with pytest.raises(RangeError):
        fo.resolvent_amax(-0.6, 1 - 1j, h)
    with pytest.raises(RangeError):
        fo.resolvent_amin(0.6, 1 + 1j, h)
    with pytest.raises(RangeError):
        fo.resolvent_amin(0.0, 1 - 1j, h)


def test_kernels_triangular():
    x = np.array([0.5, 1.0, 2.0])
    kmax = fo.resolvent_amax_kernel(0.3, 1 - 1j, x, x)
    kmin = fo.resolvent_amin_kernel(-0.3, 1 + 1j, x, x)
    assert np.all(np.tril(kmax) == 0)
    assert np.all(np.triu(kmin) == 0)
    assert kmax[0, 2] == pytest.approx(-1j * np.exp(1j * (1 - 1j) * (0.5 - 2.0)) * 0.25**0.3)


def test_kernel_matches_applied_resolvent(g):
    from scipy.integrate import quad

    alpha, lam = 0.3, 0.5 - 1.0j
    h = GridFunction(g, g.nodes**2 * np.exp(-g.nodes))
    f = fo.resolvent_amax(alpha, lam, h)
    i = np.searchsorted(g.nodes, 1.0)
    x0 = g.nodes[i]
    k = lambda y: fo.resolvent_amax_kernel(alpha, lam, [x0], [y])[0, 0] * y**2 * np.exp(-y)
    re = quad(lambda y: k(y).real, x0, g.b, epsabs=1e-14, limit=200)[0]
    im = quad(lambda y: k(y).imag, x0, g.b, epsabs=1e-14, limit=200)[0]
    assert abs(complex(re, im) - f.values[i]) < 1e-10


def test_semigroup_shift_formula(g):
    f = _power_exp(g, 1.0)
    t = 0.5
    out = fo.semigroup_amax(0.5, t, f)
    x = g.nodes
    exact = (x / (x + t)) ** 0.5 * (x + t) * np.exp(-(x + t))
    assert np.max(np.abs(out.values - exact)) < 1e-10
    assert np.array_equal(fo.semigroup_amax(0.5, 0.0, f).values, f.values)


def test_semigroup_min_support(g):
    f = _power_exp(g, 2.0)
    out = fo.semigroup_amin(-0.5, 1.0, f)
    assert np.all(out.values[g.nodes <= 1.0] == 0)


def test_semigroup_checks(g):
    f = _power_exp(g, 1.0)
    with pytest.raises(RangeError):
        fo.semigroup_amax(-0.1, 1.0, f)
    with pytest.raises(RangeError):
        fo.semigroup_amin(0.1, 1.0, f)
    with pytest.raises(ArgumentError):
        fo.semigroup_amax(0.1, -1.0, f)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 5.0), st.floats(0.6, 4.0), st.floats(0.3, 4.0))
def test_max_semigroup_contraction(alpha, t, p, s):
    grid = default_grid()
    f = TestFamily(((p, s),)).sample(grid)[0]
    assert norm(fo.semigroup_amax(alpha, t, f)) <= norm(f) * (1 + 1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3.0, 0.0), st.floats(0.0, 5.0))
def test_min_semigroup_contraction(alpha, t):
    grid = default_grid()
    f = GridFunction(grid, grid.nodes**4 * np.exp(-grid.nodes**2 / 2))
    assert norm(fo.semigroup_amin(alpha, t, f)) <= norm(f) * (1 + 1e-8)


def test_semigroup_group_law(g):
    f = GridFunction(g, g.nodes**4 * np.exp(-g.nodes**2 / 2))
    a = fo.semigroup_amax(0.7, 0.8, fo.semigroup_amax(0.7, 0.5, f))
    b = fo.semigroup_amax(0.7, 1.3, f)
    assert norm(a - b) < 1e-8 * norm(f)
    a = fo.semigroup_amin(-0.7, 0.8, fo.semigroup_amin(-0.7, 0.5, f))
    b = fo.semigroup_amin(-0.7, 1.3, f)
    assert norm(a - b) < 1e-8 * norm(f)


def test_half_plane_param():
    fo.HalfPlaneSpectralParam(1 - 1j, "lower")
    with pytest.raises(RangeError):
        fo.HalfPlaneSpectralParam(1 + 1j, "lower")
    with pytest.raises(RangeError):
        fo.HalfPlaneSpectralParam(1.0, "upper")
    with pytest.raises(ArgumentError):
        fo.HalfPlaneSpectralParam(1j, "left")


@pytest.mark.parametrize("m", [0.0, 0.3, 1.7, 0.2 + 0.3j])
def test_factorization(g, m):
    f = GridFunction(g, g.nodes**2.5 * np.exp(-g.nodes**2 / 2))
    assert fo.factorization_residual(m, f) < 1e-6


def test_apply_aalpha_on_power(g):
    # A_alpha x^alpha = 0
    f = GridFunction(g, g.nodes**0.8)
    out = fo.apply_aalpha(0.8, f)
    assert np.max(np.abs(out.values[out.valid])) < 1e-7 * np.max(np.abs(0.8 * f.values[out.valid] / g.nodes[out.valid]))
