import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfline import radial as rd
from halfline import specfun as sf
from halfline.errors import ArgumentError, BandExhausted, GridMismatch


@pytest.fixture(scope="module")
def g():
    return rd.default_grid()


def test_polynomial_quadrature(g):
    sub = rd.make_grid(1.0, 2.0, 4, 8)
    assert abs(sub.integrate(sub.nodes**2) - 7 / 3) < 1e-14


def test_exponential_quadrature(g):
    exact = math.exp(-g.a) - math.exp(-g.b)
    assert abs(g.integrate(np.exp(-g.nodes)) - exact) < 1e-12


def test_inner_product_example(g):
    f = rd.GridFunction.from_callable(g, lambda x: np.sqrt(x) * np.exp(-x))
    # int_a^b x e^{-2x} dx on the truncated domain
    prim = lambda x: -(2 * x + 1) * np.exp(-2 * x) / 4
    assert abs(rd.inner(f, f) - (prim(g.b) - prim(g.a))) < 1e-13
    assert abs(rd.inner(f, f) - 0.25) < 1e-8


def test_inner_conjugate_linear(g, rng):
    f = rd.GridFunction(g, rng.normal(size=g.n) + 1j * rng.normal(size=g.n))
    h = rd.GridFunction(g, rng.normal(size=g.n))
    c = 0.3 - 2j
    assert abs(rd.inner(c * f, h) - np.conj(c) * rd.inner(f, h)) < 1e-10 * abs(rd.inner(f, h)) + 1e-12
    assert abs(rd.inner(f, f).imag) < 1e-12 * rd.inner(f, f).real


def test_grid_validation():
    with pytest.raises(ArgumentError):
        rd.RadialGrid(np.array([0.0, 1.0]), np.array([1.0, 1.0]), "x", 0.0, 1.0)
    with pytest.raises(ArgumentError):
        rd.RadialGrid(np.array([1.0, 2.0]), np.array([1.0, -1.0]), "x", 1.0, 2.0)
    with pytest.raises(ArgumentError):
        rd.RadialGrid(np.array([2.0, 1.0]), np.array([1.0, 1.0]), "x", 1.0, 2.0)


def test_grid_mismatch(g):
    other = rd.grid_preset("coarse")
    with pytest.raises(GridMismatch):
        rd.inner(rd.GridFunction(g, np.ones(g.n)), rd.GridFunction(other, np.ones(other.n)))
    with pytest.raises(GridMismatch):
        rd.GridFunction(g, np.ones(3))


def test_config_round_trip():
    for name in rd.GRID_PRESETS:
        grid = rd.grid_preset(name)
        again = rd.grid_from_config(grid.to_config())
        assert again.same_as(grid)
    with pytest.raises(ArgumentError):
        rd.grid_from_config({"x_min": 1e-3, "x_max": 10, "n_panels": 10, "order": 8, "bogus": 1})
    with pytest.raises(ArgumentError):
        rd.grid_preset("nonexistent")
    with pytest.raises(ArgumentError):
        rd.make_log_grid().to_config()


def test_load_preset_file(tmp_path):
    cfg = {"x_min": 1e-3, "x_max": 20.0, "n_panels": 40, "order": 8}
    path = tmp_path / "grid.json"
    path.write_text(__import__("json").dumps(cfg))
    grid = rd.load_grid_preset(path)
    assert grid.a == pytest.approx(1e-3) and grid.b == pytest.approx(20.0)


def test_derivative_accuracy(g):
    f = rd.GridFunction.from_callable(g, lambda x: np.exp(-x) * x**2)
    d = rd.derivative(f).values
    exact = (2 * g.nodes - g.nodes**2) * np.exp(-g.nodes)
    band = g.band()
    assert np.max(np.abs(d - exact)[band]) < 1e-7


def test_lm_annihilates_power(g):
    m = 0.7
    f = rd.GridFunction.from_callable(g, lambda x: x ** (0.5 + m))
    assert rd.lm_relative_residual(m, f) < 1e-7


def test_lm_on_k(g):
    # -f'' + (m^2 - 1/4)/x^2 f = -f for f = sqrt(x) K_m(x)
    for m in (0.0, 0.3, 1.4):
        f = rd.GridFunction(g, np.sqrt(g.nodes) * sf.kv(m, g.nodes))
        assert rd.lm_relative_residual(m, f, rhs=-f.values) < 1e-6


def test_apply_lm_marks_band(g):
    f = rd.GridFunction.from_callable(g, lambda x: x**2 * np.exp(-x))
    out = rd.apply_lm(0.5, f)
    assert out.valid is not None and out.valid.sum() < g.n


def test_dilate_isometry_and_group(g):
    f = rd.GridFunction.from_callable(g, lambda x: x**1.5 * np.exp(-x * x / 2))
    a = rd.dilate(0.3, f)
    assert abs(a.norm() - f.norm()) < 1e-7 * f.norm()
    ab = rd.dilate(-0.5, a)
    direct = rd.dilate(-0.2, f)
    assert (ab - direct).norm() < 1e-6 * f.norm()
    assert rd.dilate(0.0, f).values is not f.values


def test_dilate_conjugation(g):
    # e^{i tau D} L e^{-i tau D} = e^{-2 tau} L
    m, tau = 0.4, 0.25
    f = rd.GridFunction.from_callable(g, lambda x: x**2.5 * np.exp(-x * x / 2))
    # build e^{-i tau D} f exactly: differentiating spline output amplifies its noise
    shrink = lambda x: math.exp(-tau / 2) * (math.exp(-tau) * x) ** 2.5 * np.exp(-((math.exp(-tau) * x) ** 2) / 2)
    inner_l = rd.apply_lm(m, rd.GridFunction.from_callable(g, shrink))
    inner_l = rd.GridFunction(g, np.where(inner_l.valid, inner_l.values, 0))
    lhs = rd.dilate(tau, inner_l)
    rhs = rd.apply_lm(m, f)
    band = g.band(1e2)
    err = np.max(np.abs(lhs.values - math.exp(-2 * tau) * rhs.values)[band])
    assert err < 1e-5 * np.max(np.abs(rhs.values))


def test_dilate_refuses_lost_mass():
    grid = rd.make_grid(1e-2, 5.0, 40, 8)
    f = rd.GridFunction.from_callable(grid, lambda x: np.exp(-x))
    with pytest.raises(BandExhausted):
        rd.dilate(2.0, f)


def test_hardy_examples(g):
    f = rd.GridFunction.from_callable(g, lambda x: x * np.exp(-x))
    lhs, rhs = rd.hardy_check(f)
    # ||f'||^2 = 1/4, ||f/x||^2 = 1/2 on (0, inf); subtract the piece below x_min
    from scipy.integrate import quad

    d1 = 0.25 - quad(lambda x: (1 - x) ** 2 * np.exp(-2 * x), 0, g.a, epsabs=1e-20, epsrel=1e-13)[0]
    d0 = 0.5 - quad(lambda x: np.exp(-2 * x), 0, g.a, epsabs=1e-20, epsrel=1e-13)[0]
    assert lhs == pytest.approx(math.sqrt(d1), rel=1e-8)
    assert rhs == pytest.approx(0.5 * math.sqrt(d0), rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.55, 4.0), st.floats(0.2, 5.0))
def test_hardy_property(p, s):
    grid = rd.default_grid()
    f = rd.TestFamily(((p, s),)).sample(grid)[0]
    lhs, rhs = rd.hardy_check(f)
    assert lhs >= rhs


@settings(max_examples=40, deadline=None)
@given(st.floats(0.55, 4.0), st.floats(0.2, 5.0))
def test_family_norm(p, s):
    grid = rd.default_grid()
    f = rd.TestFamily(((p, s),)).sample(grid)[0]
    missing = grid.a ** (2 * p + 1) / (2 * p + 1)  # leading part of the mass below x_min
    assert f.norm() ** 2 == pytest.approx(rd.TestFamily.norm_squared(p, s) - missing, rel=1e-9)


def test_family_validation(rng):
    with pytest.raises(ArgumentError):
        rd.TestFamily(((0.5, 1.0),))
    fam = rd.TestFamily.random(5, rng)
    assert len(fam.params) == 5
    x = np.linspace(0.5, 3, 7)
    p, s = fam.params[0]
    h = 1e-6
    fd = (rd.TestFamily.evaluate(p, s, x + h) - rd.TestFamily.evaluate(p, s, x - h)) / (2 * h)
    np.testing.assert_allclose(rd.TestFamily.derivative(p, s, x), fd, rtol=1e-6)


def test_log_grid_integrates_gaussian_in_log():
    lg = rd.make_log_grid(half_width=30.0, n=2001)
    # int_0^inf x e^{-x^2} dx = 1/2
    assert abs(lg.integrate(lg.nodes * np.exp(-lg.nodes**2)) - 0.5) < 1e-10
