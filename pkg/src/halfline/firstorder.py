"""Homogeneous first-order operators A_alpha = -i d/dx + i alpha / x on the half-line.

Resolvents are applied by product integration of their kernels on the
panel grid; the contraction semigroups are weighted translations evaluated
with the panel interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, RangeError
from .radial import GridFunction, RadialGrid, apply_lm, relative_band_max
from .specfun import check_order

__all__ = [
    "HalfPlaneSpectralParam",
    "apply_aalpha",
    "aalpha_relative_residual",
    "aalpha_residual_norm",
    "resolvent_amax",
    "resolvent_amin",
    "resolvent_amax_kernel",
    "resolvent_amin_kernel",
    "semigroup_amax",
    "semigroup_amin",
    "factorization_residual",
]


@dataclass(frozen=True)
class HalfPlaneSpectralParam:
    lam: complex
    side: str  # "upper" or "lower"

    def __post_init__(self):
        lam = complex(self.lam)
        if self.side == "lower" and not lam.imag < 0:
            raise RangeError(f"lower half-plane parameter needs Im lambda < 0, got {lam}")
        if self.side == "upper" and not lam.imag > 0:
            raise RangeError(f"upper half-plane parameter needs Im lambda > 0, got {lam}")
        if self.side not in ("upper", "lower"):
            raise ArgumentError(f"side must be 'upper' or 'lower', got {self.side!r}")


def _aalpha_values(alpha: complex, grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    return -1j * grid.diff(values, 1) + 1j * alpha * values / grid.nodes


def apply_aalpha(alpha, f: GridFunction) -> GridFunction:
    """Samples of -i f' + i alpha f / x; valid on the interior band."""
    alpha = check_order(alpha)
    return GridFunction(f.grid, _aalpha_values(alpha, f.grid, f.values), f.grid.band())


def aalpha_relative_residual(alpha, f: GridFunction, lam: complex, rhs: GridFunction, floor: float = 1e-12) -> float:
    """max over the band of |(A_alpha - lam) f - rhs| relative to the largest term magnitude nearby.

    Where the terms fall below ``floor`` times their band maximum the
    residual is measured against that floor instead.
    """
    alpha = check_order(alpha)
    grid = f.grid
    x = grid.nodes
    d1 = grid.diff(f.values, 1)
    res = -1j * d1 + 1j * alpha * f.values / x - lam * f.values - rhs.values
    scale = np.abs(d1) + np.abs(alpha * f.values / x) + np.abs(lam * f.values) + np.abs(rhs.values)
    return relative_band_max(grid, res, scale, floor)


def aalpha_residual_norm(alpha, f: GridFunction, lam: complex, rhs: GridFunction) -> float:
    """||(A_alpha - lam) f - rhs|| / ||rhs||, both norms over the interior band."""
    alpha = check_order(alpha)
    grid = f.grid
    band = grid.band()
    res = _aalpha_values(alpha, grid, f.values) - lam * f.values - rhs.values
    w = grid.weights[band]
    num = float(np.dot(w, np.abs(res[band]) ** 2))
    den = float(np.dot(w, np.abs(rhs.values[band]) ** 2))
    return (num / den) ** 0.5


def _check_max(alpha: complex, lam: complex) -> None:
    if not alpha.real > -0.5:
        raise RangeError(f"resolvent of the maximal operator needs Re alpha > -1/2, got {alpha}")
    if not lam.imag < 0:
        raise RangeError(f"resolvent of the maximal operator needs Im lambda < 0, got {lam}")


def _check_min(alpha: complex, lam: complex) -> None:
    if not alpha.real < 0.5:
        raise RangeError(f"resolvent of the minimal operator needs Re alpha < 1/2, got {alpha}")
    if not lam.imag > 0:
        raise RangeError(f"resolvent of the minimal operator needs Im lambda > 0, got {lam}")


def resolvent_amax(alpha, lam, g: GridFunction) -> GridFunction:
    """(A_alpha^max - lam)^{-1} g = -i x^alpha int_x^inf e^{i lam (x - y)} y^{-alpha} g(y) dy, Im lam < 0."""
    alpha = check_order(alpha)
    lam = complex(lam)
    _check_max(alpha, lam)
    grid = g.grid
    x = grid.nodes
    h = x ** (-alpha) * g.values
    out = -1j * x**alpha * grid.cumint_exp_right(h, 1j * lam)
    return GridFunction(grid, out)


def resolvent_amin(alpha, lam, g: GridFunction) -> GridFunction:
    """(A_alpha^min - lam)^{-1} g = i x^alpha int_0^x e^{i lam (x - y)} y^{-alpha} g(y) dy, Im lam > 0."""
    alpha = check_order(alpha)
    lam = complex(lam)
    _check_min(alpha, lam)
    grid = g.grid
    x = grid.nodes
    h = x ** (-alpha) * g.values
    out = 1j * x**alpha * grid.cumint_exp_left(h, -1j * lam)
    return GridFunction(grid, out)


def resolvent_amax_kernel(alpha, lam, x, y) -> np.ndarray:
    """Pointwise kernel -i e^{i lam (x-y)} (x/y)^alpha for y > x, zero otherwise."""
    alpha = check_order(alpha)
    lam = complex(lam)
    _check_max(alpha, lam)
    xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    out = np.zeros(xx.shape, dtype=complex)
    up = yy > xx
    out[up] = -1j * np.exp(1j * lam * (xx[up] - yy[up])) * (xx[up] / yy[up]) ** alpha
    return out


def resolvent_amin_kernel(alpha, lam, x, y) -> np.ndarray:
    """Pointwise kernel i e^{i lam (x-y)} (x/y)^alpha for y < x, zero otherwise."""
    alpha = check_order(alpha)
    lam = complex(lam)
    _check_min(alpha, lam)
    xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    out = np.zeros(xx.shape, dtype=complex)
    lo = yy < xx
    out[lo] = 1j * np.exp(1j * lam * (xx[lo] - yy[lo])) * (xx[lo] / yy[lo]) ** alpha
    return out


def semigroup_amax(alpha, t: float, f: GridFunction) -> GridFunction:
    """(e^{i t A_alpha^max} f)(x) = x^alpha (x + t)^{-alpha} f(x + t), Re alpha >= 0."""
    alpha = check_order(alpha)
    if alpha.real < 0:
        raise RangeError(f"the maximal semigroup is a contraction only for Re alpha >= 0, got {alpha}")
    t = float(t)
    if t < 0:
        raise ArgumentError("semigroup time must be nonnegative")
    if t == 0:
        return GridFunction(f.grid, f.values.copy())
    x = f.grid.nodes
    shifted = f.grid.interpolate(f.values, x + t)
    return GridFunction(f.grid, (x / (x + t)) ** alpha * shifted)


def semigroup_amin(alpha, t: float, f: GridFunction) -> GridFunction:
    """(e^{-i t A_alpha^min} f)(x) = x^alpha (x - t)^{-alpha} f(x - t), zero for x <= t; Re alpha <= 0."""
    alpha = check_order(alpha)
    if alpha.real > 0:
        raise RangeError(f"the minimal semigroup is a contraction only for Re alpha <= 0, got {alpha}")
    t = float(t)
    if t < 0:
        raise ArgumentError("semigroup time must be nonnegative")
    if t == 0:
        return GridFunction(f.grid, f.values.copy())
    x = f.grid.nodes
    out = np.zeros(f.grid.n, dtype=complex)
    live = x > t
    if np.any(live):
        xs = x[live]
        src = xs - t
        # preimages below the first node are interpolated on [a, x_1]; below a the function is taken as zero
        out[live] = (xs / src) ** alpha * f.grid.interpolate(f.values, src)
    return GridFunction(f.grid, out)


def factorization_residual(m, f: GridFunction) -> float:
    """Discrepancy between L_m f and (-i d - i a/x)(-i d + i a/x) f with a = m + 1/2.

    Relative to the largest term magnitude in each stencil neighbourhood,
    maximized over the interior band.
    """
    m = check_order(m)
    a = m + 0.5
    grid = f.grid
    x = grid.nodes
    inner_step = -1j * grid.diff(f.values, 1) + 1j * a * f.values / x
    composed = -1j * grid.diff(inner_step, 1) - 1j * a * inner_step / x
    direct = apply_lm(m, f).values
    scale = np.abs(grid.diff(f.values, 2)) + np.abs((m * m - 0.25) * f.values / x**2) + np.abs(f.values) / x**2
    return relative_band_max(grid, composed - direct, scale)
