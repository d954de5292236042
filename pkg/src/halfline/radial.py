"""Discretization of L^2(0, inf): grids, quadrature, sampled functions, derivatives, dilations.

Two grid kinds are provided.  Panel grids are composite Gauss-Legendre
rules whose panels are geometric on [x_min, 1] (so that power laws near
the origin are resolved) and uniform beyond.  Log grids are uniform in
u = ln x with trapezoid weights x du; they are what the Mellin transform
wants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ArgumentError, BandExhausted, GridMismatch
from .specfun import cgamma, check_order

__all__ = [
    "RadialGrid",
    "GridFunction",
    "TestFamily",
    "make_grid",
    "make_log_grid",
    "default_grid",
    "GRID_PRESETS",
    "grid_from_config",
    "grid_preset",
    "load_grid_preset",
    "inner",
    "norm",
    "derivative",
    "apply_lm",
    "lm_relative_residual",
    "relative_band_max",
    "dilate",
    "hardy_check",
    "BAND_MARGIN",
]

BAND_MARGIN = 1.1
_STENCIL = 9  # eighth-order first, seventh-order second derivatives


def _fornberg(z: float, x: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..order at z on nodes x (Fornberg's recursion)."""
    n = len(x)
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def _panel_integration_matrix(order: int) -> np.ndarray:
    """Q[i, j] = int_{-1}^{t_i} l_j(t) dt for the Lagrange basis on Gauss-Legendre nodes t."""
    t, _ = np.polynomial.legendre.leggauss(order)
    # monomial coefficients of each Lagrange basis polynomial via the Vandermonde inverse
    v = np.vander(t, order, increasing=True)
    coef = np.linalg.solve(v, np.eye(order))  # coef[:, j] are coefficients of l_j
    powers = np.arange(1, order + 1)
    upper = t[:, None] ** powers[None, :] / powers[None, :]
    lower = (-1.0) ** powers / powers
    return (upper - lower[None, :]) @ coef


@dataclass(eq=False)
class RadialGrid:
    """Nodes and positive quadrature weights on [a, b] subset of (0, inf).

    For panel grids ``breaks`` holds the panel edges and ``order`` the number
    of Gauss-Legendre nodes per panel.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    a: float
    b: float
    breaks: np.ndarray | None = None
    order: int | None = None
    config: dict | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise ArgumentError("nodes and weights must be 1-d arrays of equal length")
        if self.nodes[0] <= 0 or np.any(np.diff(self.nodes) <= 0):
            raise ArgumentError("nodes must be positive and strictly increasing")
        if np.any(self.weights <= 0):
            raise ArgumentError("weights must be positive")

    @property
    def n(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return self.n

    def same_as(self, other: "RadialGrid") -> bool:
        return self is other or (
            self.n == other.n
            and self.kind == other.kind
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def band(self, margin: float = BAND_MARGIN) -> np.ndarray:
        """Mask of the interior band [x_1 * margin, x_N / margin]."""
        x = self.nodes
        return (x >= x[0] * margin) & (x <= x[-1] / margin)

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def to_config(self) -> dict:
        """The make_grid arguments that rebuild this grid."""
        if self.kind != "panels" or self.config is None:
            raise ArgumentError("only grids built by make_grid have a preset form")
        return dict(self.config)

    # -- cumulative integrals -------------------------------------------------

    def _panel_data(self):
        if self.kind != "panels":
            raise ArgumentError("cumulative integration needs a panel grid")
        if "panel" not in self._cache:
            q = _panel_integration_matrix(self.order)
            half = 0.5 * np.diff(self.breaks)
            self._cache["panel"] = (q, half)
        return self._cache["panel"]

    def cumint_left(self, values: np.ndarray) -> np.ndarray:
        """F(x_i) = int_a^{x_i} f, exact for piecewise polynomials of degree < order.

        Works on the trailing axis, so a stack of functions can be passed.
        """
        q, half = self._panel_data()
        p = self.order
        v = np.asarray(values)
        shp = v.shape
        v = v.reshape(shp[:-1] + (len(half), p))
        local = np.einsum("ij,...kj->...ki", q, v) * half[:, None]
        totals = v @ self._ref_weights() * half
        offsets = np.cumsum(totals, axis=-1) - totals
        return (local + offsets[..., None]).reshape(shp)

    def cumint_right(self, values: np.ndarray) -> np.ndarray:
        """F(x_i) = int_{x_i}^b f, accumulated from the right end."""
        q, half = self._panel_data()
        p = self.order
        v = np.asarray(values)
        shp = v.shape
        v = v.reshape(shp[:-1] + (len(half), p))
        totals = v @ self._ref_weights() * half
        local_left = np.einsum("ij,...kj->...ki", q, v) * half[:, None]
        local = totals[..., None] - local_left
        later = np.cumsum(totals[..., ::-1], axis=-1)[..., ::-1] - totals
        return (local + later[..., None]).reshape(shp)

    def _ref_weights(self) -> np.ndarray:
        if "refw" not in self._cache:
            self._cache["refw"] = np.polynomial.legendre.leggauss(self.order)[1]
        return self._cache["refw"]

    def _panel_view(self, values):
        v = np.asarray(values)
        shp = v.shape
        return v.reshape(shp[:-1] + (len(self.breaks) - 1, self.order)), shp

    def cumint_exp_right(self, values, c: complex) -> np.ndarray:
        """F(x_i) = int_{x_i}^b exp(c (x_i - y)) h(y) dy for Re c >= 0.

        The exponential is factored panel by panel so nothing overflows:
        inside a panel the interpolant of exp(c (x_i - y)) h(y) is integrated
        exactly, and panel-edge values are carried leftwards with the
        contracting factor exp(-c * width).
        """
        c = complex(c)
        q, half = self._panel_data()
        w = self._ref_weights()
        v, shp = self._panel_view(values)
        x = self.nodes.reshape(-1, self.order)
        right_edge = self.breaks[1:]
        e_loc = np.exp(c * (x[:, :, None] - x[:, None, :]))  # (P, i, j)
        tail = (w[None, :] - q)[None, :, :] * e_loc * half[:, None, None]
        local = np.einsum("pij,...pj->...pi", tail, v)
        # S[p] = int over panel p of exp(c (a_p - y)) h(y), a_p the left edge
        left_edge = self.breaks[:-1]
        s_panel = np.einsum("pj,...pj->...p", np.exp(c * (left_edge[:, None] - x)) * (half[:, None] * w[None, :]), v)
        carry = np.exp(-c * 2.0 * half)  # exp(c (a_p - b_p))
        n_p = len(half)
        edge = np.zeros(v.shape[:-1], dtype=complex)  # value at right edge b_p
        for p in range(n_p - 2, -1, -1):
            edge[..., p] = s_panel[..., p + 1] + carry[p + 1] * edge[..., p + 1]
        out = local + np.exp(c * (x - right_edge[:, None])) * edge[..., None]
        return out.reshape(shp)

    def cumint_exp_left(self, values, c: complex) -> np.ndarray:
        """F(x_i) = int_a^{x_i} exp(-c (x_i - y)) h(y) dy for Re c >= 0."""
        c = complex(c)
        q, half = self._panel_data()
        w = self._ref_weights()
        v, shp = self._panel_view(values)
        x = self.nodes.reshape(-1, self.order)
        left_edge = self.breaks[:-1]
        right_edge = self.breaks[1:]
        e_loc = np.exp(-c * (x[:, :, None] - x[:, None, :]))
        head = q[None, :, :] * e_loc * half[:, None, None]
        local = np.einsum("pij,...pj->...pi", head, v)
        s_panel = np.einsum("pj,...pj->...p", np.exp(-c * (right_edge[:, None] - x)) * (half[:, None] * w[None, :]), v)
        carry = np.exp(-c * 2.0 * half)
        n_p = len(half)
        edge = np.zeros(v.shape[:-1], dtype=complex)  # value at left edge a_p
        for p in range(1, n_p):
            edge[..., p] = s_panel[..., p - 1] + carry[p - 1] * edge[..., p - 1]
        out = local + np.exp(-c * (x - left_edge[:, None])) * edge[..., None]
        return out.reshape(shp)

    def interpolate(self, values, targets) -> np.ndarray:
        """Evaluate the panel-wise polynomial interpolant at ``targets``; zero outside [a, b]."""
        if self.kind != "panels":
            raise ArgumentError("panel interpolation needs a panel grid")
        targets = np.asarray(targets, dtype=float)
        flat = targets.ravel()
        v = np.asarray(values)
        out = np.zeros(flat.shape, dtype=np.result_type(v.dtype, complex))
        inside = (flat >= self.a) & (flat <= self.b)
        if np.any(inside):
            tt = flat[inside]
            p = np.clip(np.searchsorted(self.breaks, tt, side="right") - 1, 0, len(self.breaks) - 2)
            a = self.breaks[p]
            b = self.breaks[p + 1]
            s = (2.0 * tt - a - b) / (b - a)
            coef = self._lagrange_coef()
            basis = np.vander(s, self.order, increasing=True) @ coef  # (n_t, order)
            vp = v.reshape(-1, self.order)[p]
            out[inside] = np.einsum("ij,ij->i", basis, vp)
        return out.reshape(targets.shape)

    def _lagrange_coef(self) -> np.ndarray:
        if "lag" not in self._cache:
            t, _ = np.polynomial.legendre.leggauss(self.order)
            self._cache["lag"] = np.linalg.solve(np.vander(t, self.order, increasing=True), np.eye(self.order))
        return self._cache["lag"]

    def cumint_left_matrix(self) -> np.ndarray:
        return self.cumint_left(np.eye(self.n)).T

    def cumint_right_matrix(self) -> np.ndarray:
        return self.cumint_right(np.eye(self.n)).T

    # -- finite differences ---------------------------------------------------

    @cached_property
    def _stencils(self):
        x = self.nodes
        n = self.n
        s = min(_STENCIL, n)
        half = s // 2
        idx = np.empty((n, s), dtype=int)
        w1 = np.empty((n, s))
        w2 = np.empty((n, s))
        for i in range(n):
            start = min(max(i - half, 0), n - s)
            cols = np.arange(start, start + s)
            # scale about the node to keep the recursion well conditioned
            scale = x[cols[-1]] - x[cols[0]]
            c = _fornberg(0.0, (x[cols] - x[i]) / scale, 2)
            idx[i] = cols
            w1[i] = c[:, 1] / scale
            w2[i] = c[:, 2] / scale**2
        return idx, w1, w2

    def diff(self, values, n: int = 1) -> np.ndarray:
        """n-th derivative (n = 1, 2) by local nine-point stencils (one-sided near the ends)."""
        idx, w1, w2 = self._stencils
        w = {1: w1, 2: w2}[n]
        v = np.asarray(values)
        return np.einsum("ij,ij->i", w, v[idx])


def _check_order(order: int) -> None:
    if not (2 <= int(order) <= 16):
        raise ArgumentError(f"order must lie in [2, 16], got {order}")


def _verify_exactness(order: int, t: np.ndarray, w: np.ndarray) -> None:
    for j in range(2 * order):
        exact = (1.0 - (-1.0) ** (j + 1)) / (j + 1)
        if abs(np.dot(w, t**j) - exact) > 1e-13 * max(1.0, abs(exact)):
            raise ArgumentError(f"Gauss-Legendre rule of order {order} fails exactness at degree {j}")


def make_grid(
    x_min: float,
    x_max: float,
    n_panels: int = 240,
    order: int = 8,
    n_log: int | None = None,
    split: float = 1.0,
) -> RadialGrid:
    """Composite Gauss-Legendre grid on [x_min, x_max].

    ``n_log`` panels (default a quarter) are geometric on [x_min, split]
    and the rest uniform on [split, x_max].  If the interval lies entirely
    on one side of ``split`` only one kind of panel is used.
    """
    x_min = float(x_min)
    x_max = float(x_max)
    if not (0 < x_min < x_max) or not math.isfinite(x_max):
        raise ArgumentError(f"need 0 < x_min < x_max, got [{x_min}, {x_max}]")
    if int(n_panels) < 1:
        raise ArgumentError("n_panels must be positive")
    _check_order(order)
    n_panels = int(n_panels)
    order = int(order)

    split = min(max(float(split), x_min), x_max)
    if split <= x_min:
        n_log = 0
    elif split >= x_max:
        n_log = n_panels
    elif n_log is None:
        n_log = max(1, n_panels // 4)
    n_log = min(int(n_log), n_panels - (split < x_max))
    n_uni = n_panels - n_log
    pieces = []
    if n_log:
        pieces.append(np.geomspace(x_min, split, n_log + 1))
    if n_uni:
        uni = np.linspace(split, x_max, n_uni + 1)
        pieces.append(uni[1:] if pieces else uni)
    breaks = np.concatenate(pieces)

    t, w = np.polynomial.legendre.leggauss(order)
    _verify_exactness(order, t, w)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    half = 0.5 * np.diff(breaks)
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    config = {"x_min": x_min, "x_max": x_max, "n_panels": n_panels, "order": order, "n_log": n_log, "split": split}
    return RadialGrid(nodes, weights, "panels", x_min, x_max, breaks=breaks, order=order, config=config)


def make_log_grid(half_width: float = 60.0, n: int = 4096, center: float = 1.0) -> RadialGrid:
    """Uniform grid in u = ln x on [-L, L] (shifted by ln center), trapezoid weights x du.

    The node set is symmetric under x -> center^2 / x, which makes the
    inversion x -> 1/x exact as a node reversal when center = 1.
    """
    if half_width <= 0 or n < 3:
        raise ArgumentError("need half_width > 0 and at least 3 nodes")
    u = np.linspace(-half_width, half_width, int(n)) + math.log(center)
    du = u[1] - u[0]
    x = np.exp(u)
    w = x * du
    w[0] *= 0.5
    w[-1] *= 0.5
    return RadialGrid(x, w, "log", float(x[0]), float(x[-1]))


def default_grid() -> RadialGrid:
    return make_grid(1e-4, 60.0, 240, 8)


GRID_PRESETS = {
    "default": {"x_min": 1e-4, "x_max": 60.0, "n_panels": 240, "order": 8},
    "coarse": {"x_min": 1e-3, "x_max": 40.0, "n_panels": 120, "order": 8},
    "fine": {"x_min": 1e-5, "x_max": 60.0, "n_panels": 480, "order": 8},
}


def grid_from_config(cfg: dict) -> RadialGrid:
    """Build a panel grid from {x_min, x_max, n_panels, order[, n_log, split]}."""
    required = {"x_min", "x_max", "n_panels", "order"}
    unknown = set(cfg) - required - {"n_log", "split"}
    if unknown:
        raise ArgumentError(f"unknown grid keys: {sorted(unknown)}")
    missing = required - set(cfg)
    if missing:
        raise ArgumentError(f"missing grid keys: {sorted(missing)}")
    n_log = cfg.get("n_log")
    return make_grid(
        cfg["x_min"], cfg["x_max"], int(cfg["n_panels"]), int(cfg["order"]),
        n_log=None if n_log is None else int(n_log), split=cfg.get("split", 1.0),
    )


def grid_preset(name: str) -> RadialGrid:
    if name not in GRID_PRESETS:
        raise ArgumentError(f"unknown grid preset {name!r}; choose from {sorted(GRID_PRESETS)}")
    return grid_from_config(GRID_PRESETS[name])


def load_grid_preset(path) -> RadialGrid:
    with open(path) as fh:
        return grid_from_config(json.load(fh))


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class GridFunction:
    """Samples of a function on a grid; ``valid`` marks nodes where the samples are trustworthy."""

    grid: RadialGrid
    values: np.ndarray
    valid: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise GridMismatch(f"{self.values.shape[0] if self.values.ndim else 0} values for {self.grid.n} nodes")

    @classmethod
    def from_callable(cls, grid: RadialGrid, f: Callable) -> "GridFunction":
        return cls(grid, f(grid.nodes))

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def norm(self) -> float:
        return norm(self)

    def _same(self, other):
        if not self.grid.same_as(other.grid):
            raise GridMismatch("functions live on different grids")

    def __add__(self, other):
        self._same(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * c, self.valid)

    __rmul__ = __mul__


def inner(f: GridFunction, g: GridFunction) -> complex:
    """<f, g> = sum w conj(f) g, conjugate-linear in the first slot."""
    if not f.grid.same_as(g.grid):
        raise GridMismatch("inner product of functions on different grids")
    return complex(np.dot(f.grid.weights, np.conj(f.values) * g.values))


def norm(f: GridFunction) -> float:
    return math.sqrt(float(np.dot(f.grid.weights, np.abs(f.values) ** 2)))


def derivative(f: GridFunction, n: int = 1) -> GridFunction:
    return GridFunction(f.grid, f.grid.diff(f.values, n))


def _potential(m: complex, x: np.ndarray) -> np.ndarray:
    return (m * m - 0.25) / x**2


def apply_lm(m, f: GridFunction) -> GridFunction:
    """Samples of -f'' + (m^2 - 1/4) f / x^2; only the interior band is marked valid."""
    m = check_order(m)
    grid = f.grid
    out = -grid.diff(f.values, 2) + _potential(m, grid.nodes) * f.values
    return GridFunction(grid, out, grid.band())


def lm_relative_residual(m, f: GridFunction, rhs=None) -> float:
    """Largest pointwise |L f - rhs| over the band, relative to the size of the terms.

    The scale at node i is |f''| + |V f| + |rhs| + |f| / x^2, maximized over
    the stencil neighbourhood so isolated zeros of f do not blow up the ratio.
    """
    m = check_order(m)
    grid = f.grid
    x = grid.nodes
    d2 = grid.diff(f.values, 2)
    vf = _potential(m, x) * f.values
    r = np.zeros(grid.n, dtype=complex) if rhs is None else np.asarray(rhs, dtype=complex)
    res = -d2 + vf - r
    scale = np.abs(d2) + np.abs(vf) + np.abs(r) + np.abs(f.values) / x**2
    return relative_band_max(grid, res, scale)


def relative_band_max(grid: RadialGrid, res: np.ndarray, scale: np.ndarray, floor: float = 1e-12) -> float:
    """max over the band of |res| / scale, with scale smoothed over each stencil.

    Nodes where the scale drops below ``floor`` times its band maximum (for
    instance where a Gaussian has underflowed) are compared against that
    floor instead.
    """
    band = grid.band()
    scale = np.max(np.abs(scale)[grid._stencils[0]], axis=1)[band]
    denom = np.maximum(scale, floor * np.max(scale) + 1e-300)
    return float(np.max(np.abs(res[band]) / denom))


def dilate(tau: float, f: GridFunction, tol: float = 1e-6) -> GridFunction:
    """(e^{i tau D} f)(x) = e^{tau/2} f(e^tau x), interpolated cubically in ln x.

    Samples whose preimage leaves the grid are set to zero.  Mass of f that
    would be pushed below the first node is measured by quadrature; if its
    share of ||f||^2 exceeds ``tol`` the dilation is refused.
    """
    tau = float(tau)
    grid = f.grid
    x = grid.nodes
    if tau == 0.0:
        return GridFunction(grid, f.values.copy(), f.valid)
    total = float(np.dot(grid.weights, np.abs(f.values) ** 2))
    if tau > 0:
        lost_region = x < x[0] * math.exp(tau)
    else:
        lost_region = x > x[-1] * math.exp(tau)
    lost = float(np.dot(grid.weights[lost_region], np.abs(f.values[lost_region]) ** 2))
    if total > 0 and lost > tol * total:
        raise BandExhausted(f"dilation by tau={tau:g} pushes {lost / total:.2e} of the mass off the grid")
    u = np.log(x)
    spline = CubicSpline(u, f.values)
    target = u + tau
    inside = (target >= u[0]) & (target <= u[-1])
    out = np.zeros(grid.n, dtype=complex)
    out[inside] = math.exp(tau / 2) * spline(target[inside])
    return GridFunction(grid, out)


def hardy_check(f: GridFunction) -> tuple[float, float]:
    """(||f'||, ||f/x|| / 2) by quadrature with stencil derivatives."""
    grid = f.grid
    lhs = math.sqrt(float(np.dot(grid.weights, np.abs(grid.diff(f.values, 1)) ** 2)))
    rhs = 0.5 * math.sqrt(float(np.dot(grid.weights, np.abs(f.values / grid.nodes) ** 2)))
    return lhs, rhs


@dataclass(frozen=True)
class TestFamily:
    """Functions f_{p,s}(x) = x^p exp(-s x^2 / 2) with p > 1/2, s > 0."""

    params: tuple[tuple[float, float], ...]

    __test__ = False  # not a pytest class

    def __post_init__(self):
        for p, s in self.params:
            if not (p > 0.5 and s > 0):
                raise ArgumentError(f"test family needs p > 1/2 and s > 0, got ({p}, {s})")

    @staticmethod
    def evaluate(p: float, s: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x**p * np.exp(-0.5 * s * x * x)

    @staticmethod
    def derivative(p: float, s: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (p / x - s * x) * TestFamily.evaluate(p, s, x)

    @staticmethod
    def norm_squared(p: float, s: float) -> float:
        """int_0^inf x^{2p} e^{-s x^2} dx = Gamma(p + 1/2) / (2 s^{p + 1/2})."""
        return float(cgamma(np.array([p + 0.5]))[0].real) / (2.0 * s ** (p + 0.5))

    def sample(self, grid: RadialGrid) -> list[GridFunction]:
        return [GridFunction(grid, self.evaluate(p, s, grid.nodes)) for p, s in self.params]

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, p_range=(0.55, 4.0), s_range=(0.2, 5.0)) -> "TestFamily":
        p = rng.uniform(*p_range, size=n)
        s = rng.uniform(*s_range, size=n)
        return cls(tuple(zip(p.tolist(), s.tolist())))
