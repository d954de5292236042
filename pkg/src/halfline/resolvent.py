"""Green and resolvent kernels of H_m.

R_m(-k^2; x, y) = sqrt(xy) I_m(k min(x,y)) K_m(k max(x,y)) is evaluated
with exponentially scaled Bessel functions so that the growth of I and the
decay of K cancel analytically.  Kernels are applied by product
integration: the Green operator splits into two cumulative integrals,
which are integrated panel by panel without ever forming the kink on the
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FitUnstable, GridMismatch, RangeError, WronskianError
from .radial import GridFunction, RadialGrid, lm_relative_residual, norm
from .specfun import check_order, ive_complex, kve_complex

__all__ = [
    "IntegralKernel",
    "green_general",
    "resolvent_hm",
    "resolvent_kernel_values",
    "resolvent_residual",
    "holomorphy_probe",
    "scaling_check",
    "DecayFit",
    "boundary_decay_check",
]


@dataclass(eq=False)
class IntegralKernel:
    """A kernel K(x_i, y_j) sampled on a grid, with a quadrature-aware application.

    ``entries`` holds pointwise kernel values.  ``applier`` (when present)
    applies the operator by product integration; otherwise application is
    (K f)(x_i) = sum_j K(x_i, y_j) w_j f(y_j).
    """

    grid: RadialGrid
    entries: np.ndarray
    applier: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        n = self.grid.n
        if self.entries.shape != (n, n):
            raise GridMismatch(f"kernel of shape {self.entries.shape} on a grid with {n} nodes")
        if not np.all(np.isfinite(self.entries)):
            raise RangeError("kernel entries must be finite")

    def apply(self, f: GridFunction) -> GridFunction:
        if not f.grid.same_as(self.grid):
            raise GridMismatch("kernel and function live on different grids")
        if self.applier is not None:
            return GridFunction(self.grid, self.applier(f.values))
        return GridFunction(self.grid, self.entries @ (self.grid.weights * f.values))

    __call__ = apply

    def matrix(self) -> np.ndarray:
        """Dense matrix of the discrete operator acting on node values."""
        if self.applier is not None:
            return self.applier(np.eye(self.grid.n, dtype=complex)).T
        return self.entries * self.grid.weights[None, :]


def _two_solution_applier(grid: RadialGrid, u0: np.ndarray, uinf: np.ndarray):
    def apply(values):
        left = grid.cumint_left(u0 * values)
        right = grid.cumint_right(uinf * values)
        return uinf * left + u0 * right

    return apply


def green_general(u0: GridFunction, uinf: GridFunction, du0: GridFunction, duinf: GridFunction, tol: float = 1e-8) -> IntegralKernel:
    """G(x, y) = u0(min) uinf(max) from two solutions normalized by u0' uinf - u0 uinf' = 1."""
    grid = u0.grid
    for other in (uinf, du0, duinf):
        if not other.grid.same_as(grid):
            raise GridMismatch("solutions must share a grid")
    w = du0.values * uinf.values - u0.values * duinf.values
    dev = float(np.max(np.abs(w - 1.0)))
    if dev > tol:
        raise WronskianError(f"u0' uinf - u0 uinf' deviates from 1 by {dev:.2e}")
    a, b = u0.values, uinf.values
    i_lo = np.minimum.outer(np.arange(grid.n), np.arange(grid.n))
    i_hi = np.maximum.outer(np.arange(grid.n), np.arange(grid.n))
    entries = a[i_lo] * b[i_hi]
    return IntegralKernel(grid, entries, _two_solution_applier(grid, a, b))


def _check_mk(m: complex, k: complex) -> None:
    if not m.real > -1:
        raise RangeError(f"resolvent kernel needs Re m > -1, got m = {m}")
    if not k.real > 0:
        raise RangeError(f"resolvent kernel needs Re k > 0, got k = {k}")


def resolvent_kernel_values(m, k, x, y) -> np.ndarray:
    """Pointwise R_m(-k^2; x, y) on the outer product of x and y."""
    m = check_order(m)
    k = complex(k)
    _check_mk(m, k)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    lo = np.minimum.outer(x, y)
    hi = np.maximum.outer(x, y)
    i_s = ive_complex(m, k * lo)
    k_s = kve_complex(m, k * hi)
    return np.sqrt(lo * hi) * i_s * k_s * np.exp(k * (lo - hi))


def resolvent_hm(m, k, grid: RadialGrid, entries: bool = True) -> IntegralKernel:
    """The resolvent (H_m + k^2)^{-1} for Re m > -1, Re k > 0 as an integral kernel."""
    m = check_order(m)
    k = complex(k)
    _check_mk(m, k)
    x = grid.nodes
    sq = np.sqrt(x)
    i_s = sq * ive_complex(m, k * x)
    k_s = sq * kve_complex(m, k * x)

    def apply(values):
        right = grid.cumint_exp_right(k_s * values, k)
        left = grid.cumint_exp_left(i_s * values, k)
        return i_s * right + k_s * left

    if entries:
        idx = np.arange(grid.n)
        lo = np.minimum.outer(idx, idx)
        hi = np.maximum.outer(idx, idx)
        ent = i_s[lo] * k_s[hi] * np.exp(k * (x[lo] - x[hi]))
    else:
        ent = np.zeros((grid.n, grid.n), dtype=complex)
    return IntegralKernel(grid, ent, apply)


def resolvent_residual(m, k, g: GridFunction) -> float:
    """||(L_m + k^2) R g - g|| / ||g|| over the interior band, derivatives by stencils."""
    m = check_order(m)
    k = complex(k)
    kern = resolvent_hm(m, k, g.grid, entries=False)
    f = kern.apply(g)
    grid = g.grid
    x = grid.nodes
    lf = -grid.diff(f.values, 2) + (m * m - 0.25) / x**2 * f.values
    res = lf + k * k * f.values - g.values
    band = grid.band()
    num = math.sqrt(float(np.dot(grid.weights[band], np.abs(res[band]) ** 2)))
    return num / norm(g)


def holomorphy_probe(m, k, x: float, y: float, h: float = 1e-4, transform: Callable | None = None) -> complex:
    """Central-difference d/d(conj m) = (d/da + i d/db) / 2 of R_m(-k^2; x, y), m = a + ib.

    ``transform`` is applied to the kernel value before differencing; pass
    ``np.abs`` for the non-holomorphic control.
    """
    m = check_order(m)
    if (m - h).real <= -1:
        raise RangeError("probe stencil crosses Re m = -1")
    tr = transform or (lambda v: v)

    def r(mm):
        return tr(resolvent_kernel_values(mm, k, [x], [y])[0, 0])

    d_re = (r(m + h) - r(m - h)) / (2 * h)
    d_im = (r(m + 1j * h) - r(m - 1j * h)) / (2 * h)
    return 0.5 * (d_re + 1j * d_im)


def scaling_check(m, k, s: float, x, y) -> float:
    """max |R_m(-(k/s)^2; s x, s y) - s R_m(-k^2; x, y)| / |s R_m(-k^2; x, y)| over the samples."""
    k = complex(k)
    lhs = resolvent_kernel_values(m, k / s, s * np.asarray(x, float), s * np.asarray(y, float))
    rhs = s * resolvent_kernel_values(m, k, x, y)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    coefficient: complex
    residual: float
    skipped: bool = False


def boundary_decay_check(m, g: GridFunction, k: complex = 1.0, min_nodes: int = 8) -> DecayFit:
    """Fit |f| ~ c x^p on the smallest decade of nodes, f = R_m(-k^2) g.

    For g supported away from the origin f is a multiple of sqrt(x) I_m(kx)
    near 0, so p should be 1/2 + Re m.  ``residual`` is the rms relative
    misfit of the power law.
    """
    m = check_order(m)
    if not m.real > 0:
        raise RangeError("boundary decay check needs Re m > 0")
    grid = g.grid
    if not np.any(g.values):
        return DecayFit(float("nan"), 0.0, 0.0, skipped=True)
    x = grid.nodes
    decade = x <= 10.0 * x[0]
    if np.count_nonzero(decade) < min_nodes:
        raise FitUnstable(f"only {np.count_nonzero(decade)} nodes in the smallest decade")
    f = resolvent_hm(m, k, grid, entries=False).apply(g).values
    lx = np.log(x[decade])
    lf = np.log(np.abs(f[decade]))
    p, c = np.polyfit(lx, lf, 1)
    fitted = np.exp(c + p * lx)
    resid = float(np.sqrt(np.mean((np.abs(f[decade]) / fitted - 1.0) ** 2)))
    coef = complex(np.mean(f[decade] / x[decade] ** p))
    return DecayFit(float(p), coef, resid)
