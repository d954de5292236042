"""The Hankel transform F_m and the spectral calculus of H_m built on it.

F_m is discretized as a rectangular matrix between an x-grid and a k-grid;
its kernel J_m(kx) sqrt(kx) is symmetric in (k, x), so the same matrix
taken transposed (with k-weights) maps k-space back to x-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, GridMismatch, ResolutionError
from .radial import GridFunction, RadialGrid, apply_lm, dilate, make_grid, norm
from .resolvent import IntegralKernel
from .specfun import check_order, jv

__all__ = [
    "HankelTransform",
    "default_kgrid",
    "matched_kgrid",
    "hankel_matrix",
    "hankel_entries",
    "spectral_projection",
    "evolve",
    "intertwine_check",
    "diagonalization_residual",
    "gaussian_laguerre",
]


def default_kgrid() -> RadialGrid:
    """[1e-5, 10]: 35 geometric panels up to 0.1, then 165 uniform panels of width 0.06.

    The uniform panels keep k * panel width below order/2 against the
    default x-grid (x_max = 60); the low cutoff keeps the k-space mass of
    x^{1/2} e^{-x^2/2} (the m = 0 test function) lost below the grid
    under 1e-10.
    """
    return make_grid(1e-5, 10.0, 200, 8, n_log=35, split=0.1)


def matched_kgrid(xgrid: RadialGrid, k_max: float = 10.0, t_max: float = 0.0, k_min: float = 1e-5, order: int = 8) -> RadialGrid:
    """A k-grid fine enough for ``xgrid`` and for the phase e^{-itk^2} up to |t| = t_max.

    Geometric panels cover [k_min, 0.1] (at least 35, more if the widest
    one would exceed the uniform width); uniform panels above keep
    (x_max + 2 t_max k_max) * width below 0.9 * order / 2.
    """
    if not (0 < k_min < 0.1 < k_max):
        raise ArgumentError(f"need 0 < k_min < 0.1 < k_max, got {k_min}, {k_max}")
    reach = float(xgrid.nodes[-1]) + 2.0 * abs(t_max) * k_max
    width = 0.9 * (order / 2) / reach
    n_uni = int(math.ceil((k_max - 0.1) / width))
    n_log = 35
    if width < 0.1:
        n_log = max(n_log, int(math.ceil(math.log(0.1 / k_min) / -math.log1p(-width / 0.1))))
    return make_grid(k_min, k_max, n_uni + n_log, order, n_log=n_log, split=0.1)


def _max_panel_width(grid: RadialGrid) -> float:
    if grid.kind == "panels":
        return float(np.max(np.diff(grid.breaks)))
    return float(np.max(np.diff(grid.nodes))) * 4.0


def _check_resolution(xgrid: RadialGrid, kgrid: RadialGrid) -> None:
    for grid, other, name in ((xgrid, kgrid, "x"), (kgrid, xgrid, "k")):
        order = grid.order or 4
        prod = float(other.nodes[-1]) * _max_panel_width(grid)
        if prod > order / 2:
            raise ResolutionError(
                f"{name}-grid panels of width {_max_panel_width(grid):.3g} cannot resolve "
                f"oscillation up to {other.nodes[-1]:.3g} (product {prod:.2f} > {order / 2})"
            )


def hankel_entries(m, k, x) -> np.ndarray:
    """J_m(k x) sqrt(k x) on the outer product, rows indexed by k."""
    m = check_order(m)
    kx = np.multiply.outer(np.asarray(k, float), np.asarray(x, float))
    return jv(m, kx) * np.sqrt(kx)


@dataclass(eq=False)
class HankelTransform:
    """Discrete F_m between ``xgrid`` and ``kgrid``; ``entries[j, i]`` = J_m(k_j x_i) sqrt(k_j x_i).

    Unitarity holds only for real m; complex orders are allowed but carry
    no isometry contract (``unitary`` is False).
    """

    m: complex
    xgrid: RadialGrid
    kgrid: RadialGrid
    entries: np.ndarray

    @property
    def unitary(self) -> bool:
        return self.m.imag == 0 and self.m.real > -1

    def forward(self, f: GridFunction) -> GridFunction:
        """x-space samples to k-space samples."""
        if not f.grid.same_as(self.xgrid):
            raise GridMismatch("function is not on the transform's x-grid")
        return GridFunction(self.kgrid, self.entries @ (self.xgrid.weights * f.values))

    def backward(self, g: GridFunction) -> GridFunction:
        """k-space samples to x-space samples (the same involution read the other way)."""
        if not g.grid.same_as(self.kgrid):
            raise GridMismatch("function is not on the transform's k-grid")
        return GridFunction(self.xgrid, self.entries.T @ (self.kgrid.weights * g.values))

    __call__ = forward


def hankel_matrix(m, xgrid: RadialGrid, kgrid: RadialGrid | None = None) -> HankelTransform:
    m = check_order(m)
    if m.real <= -1:
        raise ArgumentError(f"Hankel transform needs Re m > -1, got {m}")
    kgrid = kgrid or default_kgrid()
    _check_resolution(xgrid, kgrid)
    return HankelTransform(m, xgrid, kgrid, hankel_entries(m, kgrid.nodes, xgrid.nodes))


def gaussian_laguerre(m: float, n: int, s: float, x) -> np.ndarray:
    """x^{m+1/2+2n} exp(-s x^2 / 2); for s = 1, n = 0 this is its own F_m transform."""
    x = np.asarray(x, dtype=float)
    return x ** (m + 0.5 + 2 * n) * np.exp(-0.5 * s * x * x)


def spectral_projection(m, a: float, b: float, xgrid: RadialGrid, k_panels: int | None = None, order: int = 8) -> IntegralKernel:
    """Kernel of 1_{[a,b]}(H_m): int_{sqrt a}^{sqrt b} sqrt(xy) J_m(kx) J_m(ky) k dk.

    The k-integral uses Gauss-Legendre panels on [sqrt a, sqrt b], narrow
    enough that the oscillation at x_max is resolved.
    """
    m = check_order(m)
    if not (0 < a < b):
        raise ArgumentError(f"spectral interval needs 0 < a < b, got [{a}, {b}]")
    ka, kb = math.sqrt(a), math.sqrt(b)
    if k_panels is None:
        width = (order / 2) / (kb * float(xgrid.nodes[-1]))
        k_panels = max(1, int(math.ceil((kb - ka) / width)))
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(ka, kb, k_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    k = (mid[:, None] + half[:, None] * t).ravel()
    wk = (half[:, None] * w).ravel()
    basis = hankel_entries(m, k, xgrid.nodes)  # (n_k, n_x)
    entries = basis.T @ (wk[:, None] * basis)
    return IntegralKernel(xgrid, entries)


def _effective_kmax(g: GridFunction, rel: float = 1e-10) -> float:
    mag = np.abs(g.values)
    live = np.nonzero(mag > rel * np.max(mag))[0]
    return float(g.grid.nodes[live[-1]]) if len(live) else 0.0


def evolve(m, t: float, f: GridFunction, transform: HankelTransform | None = None, tail_tol: float = 1e-8) -> GridFunction:
    """e^{-itH_m} f = F_m (e^{-itk^2} F_m f)."""
    m = check_order(m)
    tr = transform or hankel_matrix(m, f.grid)
    if not tr.unitary:
        raise ArgumentError("time evolution is defined for real m only")
    g = tr.forward(f)
    if t == 0:
        return tr.backward(g)
    kgrid = tr.kgrid
    k_eff = _effective_kmax(g)
    freq = float(f.grid.nodes[-1]) + 2.0 * abs(t) * k_eff
    if freq * _max_panel_width(kgrid) > (kgrid.order or 4) / 2:
        raise ResolutionError(f"k-grid cannot resolve the phase e^(-itk^2) at t = {t:g}")
    out = tr.backward(GridFunction(kgrid, np.exp(-1j * t * kgrid.nodes**2) * g.values))
    x = f.grid.nodes
    edge = x > 0.9 * x[-1]
    total = float(np.dot(f.grid.weights, np.abs(out.values) ** 2))
    lost = float(np.dot(f.grid.weights[edge], np.abs(out.values[edge]) ** 2))
    if total > 0 and lost > tail_tol * total:
        raise ResolutionError(f"evolved packet reaches the end of the grid at t = {t:g} ({lost / total:.1e} of the mass)")
    return out


def intertwine_check(m, tau: float, f: GridFunction, transform: HankelTransform | None = None) -> float:
    """||F_m dilate(tau, f) - dilate(-tau, F_m f)|| / ||f||, measured in k-space."""
    tr = transform or hankel_matrix(m, f.grid)
    lhs = tr.forward(dilate(tau, f))
    rhs = dilate(-tau, tr.forward(f))
    return norm(lhs - rhs) / norm(f)


def diagonalization_residual(m, f: GridFunction, transform: HankelTransform | None = None) -> float:
    """||F_m(L_m f) - k^2 F_m f|| / ||L_m f||."""
    tr = transform or hankel_matrix(m, f.grid)
    lf = apply_lm(m, f)
    lhs = tr.forward(GridFunction(f.grid, lf.values))
    rhs = tr.forward(f)
    diff = lhs.values - tr.kgrid.nodes**2 * rhs.values
    return norm(GridFunction(tr.kgrid, diff)) / norm(GridFunction(f.grid, lf.values))
