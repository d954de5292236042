import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfline import mellin as ml
from halfline import spectral as sp
from halfline.errors import ArgumentError, GridAsymmetric, RangeError, WindowError
from halfline.radial import GridFunction, dilate, make_grid, norm
from halfline.selftest import scattering_setup
from halfline.specfun import cgamma


@pytest.fixture(scope="module")
def lg():
    return ml.mellin_grid()


def _gauss(lg, p):
    return GridFunction(lg, lg.nodes**p * np.exp(-lg.nodes**2 / 2))


@pytest.mark.parametrize("p", [1.0, 1.5, 2.7])
def test_forward_closed_form(lg, p):
    F = ml.mellin_forward(_gauss(lg, p))
    s = F.freqs
    z = (p + 0.5 - 1j * s) / 2
    exact = 2.0 ** (z - 1) * cgamma(z) / math.sqrt(2 * math.pi)
    assert np.max(np.abs(F.values - exact)) < 1e-12


def test_plancherel_and_inverse(lg):
    f = _gauss(lg, 1.5)
    F = ml.mellin_forward(f)
    assert F.norm() == pytest.approx(f.norm(), rel=1e-9)
    back = ml.mellin_inverse(F, lg)
    assert (back - f).norm() < 1e-9 * f.norm()


def test_frequency_grid_checks():
    s = ml.frequency_grid(5.0, 0.5)
    assert s[0] == -5.0 and s[-1] == 5.0 and len(s) == 21
    with pytest.raises(ArgumentError):
        ml.frequency_grid(1.0, 2.0)
    with pytest.raises(ArgumentError):
        ml.MellinFunction(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.raises(ArgumentError):
        ml.MellinFunction(np.array([0.0, 1.0, 2.0]), np.zeros(3))


def test_window_guard(lg):
    # a function with fast oscillation in ln x has Mellin mass at large |s|
    f = GridFunction(lg, np.exp(-np.log(lg.nodes) ** 2) * np.exp(45j * np.log(lg.nodes)))
    with pytest.raises(WindowError):
        ml.mellin_forward(f)


def test_inversion_j(lg):
    f = _gauss(lg, 1.5)
    jf = ml.inversion_j(f)
    assert (ml.inversion_j(jf) - f).norm() < 1e-14
    assert jf.norm() == pytest.approx(f.norm(), rel=1e-12)
    with pytest.raises(GridAsymmetric):
        g = make_grid(1e-3, 10.0, 10, 8)
        ml.inversion_j(GridFunction(g, np.ones(g.n)))


def test_multiplier_algebra():
    s = ml.frequency_grid()
    a = ml.Multiplier.xi(0.4, s)
    assert a.unitary
    assert not ml.Multiplier.xi(0.4 + 0.1j, s).unitary
    b = a / a
    assert np.allclose(b.samples, 1.0)
    assert (a * ml.Multiplier.identity(s)).unitary
    with pytest.raises(RangeError):
        ml.Multiplier(s, 2 * np.ones(len(s)), unitary=True)
    with pytest.raises(ArgumentError):
        a * ml.Multiplier.identity(ml.frequency_grid(10.0, 0.5))
    assert not a.scaled(2.0).unitary and a.scaled(1j).unitary


def test_dilation_multiplier_matches_dilate(lg):
    f = _gauss(lg, 1.5)
    tau = 0.4
    via = ml.apply_multiplier(ml.Multiplier.dilation(tau), f)
    direct = dilate(tau, f)
    assert (via - direct).norm() < 1e-6 * f.norm()


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.6, 3.0))
def test_xi_multiplier_isometry(m, p):
    lgrid = ml.mellin_grid()
    f = _gauss(lgrid, p)
    out = ml.apply_multiplier(ml.Multiplier.xi(m), f)
    assert out.norm() == pytest.approx(f.norm(), rel=1e-6)


@pytest.mark.parametrize("m", [0.0, 0.5, 1.2])
def test_two_path_identity(m):
    assert ml.gm_check(m) < 1e-8


def test_two_path_rejects_complex():
    with pytest.raises(RangeError):
        ml.gm_check(0.3 + 0.1j)


def test_smeared_oracle(oracles, lg):
    phis = {"x_gauss": lambda x: x * np.exp(-x * x / 2), "x2_gauss2": lambda x: x**2 * np.exp(-x * x)}
    panel = make_grid(1e-8, 20.0, 200, 8)
    for row in oracles["smeared"]:
        phi = phis[row["phi"]]
        series = ml.bessel_smeared_series(row["m"], GridFunction(panel, phi(panel.nodes)))
        assert abs(series - row["value"]) < 1e-9, row
        if row["m"] > -1:
            barnes = ml.barnes_bessel_smeared(row["m"], GridFunction(lg, phi(lg.nodes)))
            assert abs(barnes - row["value"]) < 1e-9, row


def test_barnes_rejects_order(lg):
    with pytest.raises(RangeError):
        ml.barnes_bessel_smeared(-1.5, _gauss(lg, 1.0))


def test_wave_operator_arguments(lg):
    f = _gauss(lg, 1.5)
    with pytest.raises(ArgumentError):
        ml.wave_operator(0.5, 0.3, 2, f)
    with pytest.raises(ArgumentError):
        ml.wave_operator(0.5, 0.3, 1, f, path="other")
    with pytest.raises(RangeError):
        ml.wave_operator(0.5 + 0.1j, 0.3, 1, f)


@pytest.fixture(scope="module")
def scatter_pair():
    xg, kg = scattering_setup()
    m, k = 1.3, 0.4
    trs = (sp.hankel_matrix(m, xg, kg), sp.hankel_matrix(k, xg, kg))
    f = ml.kspace_packet(k, 1.5, 0.3, trs[1])
    return m, k, f, trs


def test_wave_operator_paths_agree(scatter_pair):
    m, k, f, trs = scatter_pair
    a = ml.wave_operator(m, k, 1, f, "hankel", trs)
    b = ml.wave_operator(m, k, 1, f, "multiplier")
    assert norm(a - b) < 1e-4 * norm(f)
    assert norm(a) == pytest.approx(norm(f), rel=1e-6)


def test_scattering_is_phase(scatter_pair):
    m, k, f, trs = scatter_pair
    s = ml.scattering_matrix(m, k, f, trs)
    assert abs(s - np.exp(1j * math.pi * (m - k))) < 1e-8
    assert ml.scattering_residual(m, k, f, trs) < 1e-5


def test_finite_time_trend(scatter_pair):
    m, k, f, trs = scatter_pair
    errs = ml.finite_time_probe(m, k, f, [1.0, 4.0], trs)
    assert errs[1] < errs[0]
    with pytest.raises(ArgumentError):
        ml.finite_time_probe(m, k, f, [2.0, 1.0], trs)


def test_transform_mismatch(scatter_pair):
    m, k, f, trs = scatter_pair
    with pytest.raises(ArgumentError):
        ml.wave_operator(k, m, 1, f, "hankel", trs)
    with pytest.raises(ArgumentError):
        ml.kspace_packet(m, 1.5, 0.3, trs[1])
