"""Self-adjoint extensions H_m^theta for 0 <= m < 1 and the numerical range of H_m.

Each extension is fixed by a boundary function u_theta (a solution of
L_m u = 0) through the condition W_0(u_theta, f) = 0 on the boundary
Wronskian.  Limits as x -> 0 are replaced by Aitken extrapolation over the
three smallest dyadic bands of grid nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ArgumentError, ExtrapolationUnstable, FitUnstable, NoRoot, PoleError, RangeError, RegimeError
from .firstorder import apply_aalpha
from .radial import GridFunction, RadialGrid, apply_lm, default_grid, inner, norm
from .resolvent import IntegralKernel, green_general
from .specfun import check_order, iv, iv_prime, kv, kv_prime, loggamma

__all__ = [
    "ExtensionAngle",
    "BoundaryData",
    "BoundState",
    "cutoff_xi",
    "boundary_function",
    "boundary_wronskian",
    "boundary_limit",
    "extract_boundary_data",
    "kappa",
    "matching_function",
    "count_bound_states",
    "bound_state",
    "resolvent_theta",
    "quadratic_form_theta",
    "form_value",
    "numerical_range_sample",
    "sample_numerical_range",
    "in_cone",
    "form_monotonicity_check",
]

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class ExtensionAngle:
    theta: float

    def __post_init__(self):
        if not (0.0 <= float(self.theta) < math.pi):
            raise RangeError(f"extension angle must lie in [0, pi), got {self.theta}")

    def is_friedrichs(self, m) -> bool:
        """theta = pi/2 is the Friedrichs extension (H_m itself) for 0 < m < 1."""
        m = check_order(m)
        return m.imag == 0 and 0 < m.real < 1 and abs(self.theta - math.pi / 2) < 1e-15

    def is_krein(self, m) -> bool:
        """theta = 0 is the Krein extension (H_{-m}) for 0 < m < 1."""
        m = check_order(m)
        return m.imag == 0 and 0 < m.real < 1 and self.theta == 0.0


@dataclass(frozen=True)
class BoundaryData:
    """f ~ a x^{1/2-m} + b x^{1/2+m} near 0; ``fit_residual`` is relative."""

    a: complex
    b: complex
    fit_residual: float


@dataclass(eq=False)
class BoundState:
    k: float
    energy: float
    eigenfunction: GridFunction


def _angle(theta) -> float:
    return ExtensionAngle(float(theta.theta if isinstance(theta, ExtensionAngle) else theta)).theta


def cutoff_xi(x) -> np.ndarray:
    """1 on [0, 1], 0 beyond 2, joined by the quintic smoothstep (C^2)."""
    x = np.asarray(x, dtype=float)
    t = np.clip(x - 1.0, 0.0, 1.0)
    s = t**3 * (10.0 - 15.0 * t + 6.0 * t * t)
    return 1.0 - s


def boundary_function(m, theta, grid: RadialGrid | None = None) -> GridFunction:
    """u_theta for real m in [0, 1) or m = i mu.

    0 < m < 1:  x^{1/2-m} cos(theta) + x^{1/2+m} sin(theta)
    m = 0:      x^{1/2} ln(x) cos(theta) + x^{1/2} sin(theta)
    m = i mu:   x^{1/2} (cos(mu ln x) cos(theta) + sin(mu ln x) sin(theta))
    """
    m = check_order(m)
    th = _angle(theta)
    grid = grid or default_grid()
    x = grid.nodes
    c, s = math.cos(th), math.sin(th)
    if m.imag == 0 and 0 < m.real < 1:
        mr = m.real
        u = x ** (0.5 - mr) * c + x ** (0.5 + mr) * s
    elif m == 0:
        u = np.sqrt(x) * (np.log(x) * c + s)
    elif m.real == 0 and m.imag > 0:
        lx = m.imag * np.log(x)
        u = np.sqrt(x) * (np.cos(lx) * c + np.sin(lx) * s)
    else:
        raise RegimeError(f"boundary functions are defined for m in [0, 1) or m = i mu with mu > 0, got {m}")
    return GridFunction(grid, u)


def boundary_limit(grid: RadialGrid, values: np.ndarray, rtol: float = 1e-3) -> tuple[complex, float]:
    """Extrapolate ``values`` to x -> 0 from means over [x1, 2x1), [2x1, 4x1), [4x1, 8x1).

    If values ~ L + C x^p the band means form a geometric sequence in the
    correction and Aitken's delta-squared recovers L.  Returns (limit,
    error estimate).  Raises ExtrapolationUnstable when the corrections
    do not shrink towards 0.
    """
    x = grid.nodes
    means = []
    for j in range(3):
        sel = (x >= x[0] * 2**j) & (x < x[0] * 2 ** (j + 1))
        if not np.any(sel):
            raise ExtrapolationUnstable("a dyadic band near the origin holds no nodes")
        means.append(complex(np.dot(grid.weights[sel], values[sel]) / np.sum(grid.weights[sel])))
    w1, w2, w3 = means
    d1, d2 = w2 - w1, w3 - w2
    scale = max(abs(w1), abs(w2), abs(w3), 1e-300)
    if abs(d1) <= 1e-14 * scale and abs(d2) <= 1e-14 * scale:
        return w1, abs(d1)
    # moving outwards the corrections grow by 2^p; towards 0 they must shrink
    if abs(d1) >= abs(d2) and abs(d1) > rtol * scale:
        raise ExtrapolationUnstable(f"band means do not converge towards 0: {w1:.6g}, {w2:.6g}, {w3:.6g}")
    denom = d2 - d1
    if abs(denom) <= 1e-14 * scale:
        return w1, abs(d1)
    limit = w1 - d1 * d1 / denom
    return limit, abs(limit - w1)


def boundary_wronskian(u: GridFunction, f: GridFunction, with_error: bool = False):
    """W_0(u, f) = lim_{x->0} (u f' - u' f).

    Derivatives use the grid's 9-point stencils, which are one-sided near
    the first nodes.
    """
    if not u.grid.same_as(f.grid):
        raise ArgumentError("u and f must share a grid")
    grid = u.grid
    w = u.values * grid.diff(f.values, 1) - grid.diff(u.values, 1) * f.values
    limit, err = boundary_limit(grid, w)
    return (limit, err) if with_error else limit


def kappa(m, f: GridFunction) -> complex:
    """varkappa_m(f) = lim_{x->0} x^{m-1/2} f(x)."""
    m = check_order(m)
    return boundary_limit(f.grid, f.grid.nodes ** (m - 0.5) * f.values)[0]


def extract_boundary_data(m, f: GridFunction, min_nodes: int = 8) -> BoundaryData:
    """Least-squares fit of a x^{1/2-m} + b x^{1/2+m} on the smallest decade of nodes."""
    m = check_order(m)
    if not (0 < m.real < 1):
        raise RangeError(f"boundary data are defined for 0 < Re m < 1, got {m}")
    x = f.grid.nodes
    sel = x <= 10.0 * x[0]
    if np.count_nonzero(sel) < min_nodes:
        raise FitUnstable(f"only {np.count_nonzero(sel)} nodes in the smallest decade")
    xs = x[sel]
    # columns scaled to unit size at the top of the decade
    top = xs[-1]
    basis = np.stack([(xs / top) ** (0.5 - m), (xs / top) ** (0.5 + m)], axis=1)
    if np.linalg.cond(basis) > 1e12:
        raise FitUnstable("boundary basis is numerically degenerate on the smallest decade")
    coef, *_ = np.linalg.lstsq(basis, f.values[sel], rcond=None)
    resid = basis @ coef - f.values[sel]
    size = np.linalg.norm(f.values[sel])
    rel = float(np.linalg.norm(resid) / size) if size > 0 else 0.0
    a = coef[0] * top ** (m - 0.5)
    b = coef[1] * top ** (-m - 0.5)
    return BoundaryData(complex(a), complex(b), rel)


def _check_regime(m: float, theta: float) -> None:
    if not (0 <= m < 1):
        raise RegimeError(f"bound states are computed for real 0 <= m < 1, got {m}")


def matching_function(m: float, theta: float, k):
    """Sign-carrying form of W_0(u_theta, sqrt(kx) K_m(kx)), positively rescaled.

    0 < m < 1: (b/a) cos(theta) - sin(theta) with b/a = -(k/2)^{2m} Gamma(1-m)/Gamma(1+m).
    m = 0: sqrt(kx) K_0(kx) ~ -sqrt(k) (sqrt(x) ln x + (ln(k/2) + gamma_E) sqrt(x)), giving
    (ln(k/2) + gamma_E) cos(theta) - sin(theta).
    A zero means sqrt(kx) K_m(kx) lies in the domain of H_m^theta.  ``k`` may be an array.
    """
    m, theta = float(m), _angle(theta)
    _check_regime(m, theta)
    lk = np.log(np.asarray(k, dtype=float) / 2)
    if m == 0:
        out = (lk + EULER_GAMMA) * math.cos(theta) - math.sin(theta)
    else:
        lg_ratio = float(loggamma(np.array([1.0 - m]))[0].real - loggamma(np.array([1.0 + m]))[0].real)
        out = -np.exp(2 * m * lk + lg_ratio) * math.cos(theta) - math.sin(theta)
    return float(out) if np.ndim(out) == 0 else out


def count_bound_states(m: float, theta: float, energies=None) -> int:
    """Number of sign changes of the matching function over an energy lattice in [-25, -1e-3]."""
    e = np.geomspace(-25.0, -1e-3, 2001) if energies is None else np.asarray(energies, float)
    vals = matching_function(m, theta, np.sqrt(-e))
    return int(np.count_nonzero(np.sign(vals[1:]) != np.sign(vals[:-1])))


def _bound_state_k(m: float, theta: float) -> float:
    if m == 0:
        if abs(math.cos(theta)) < 1e-15:
            raise NoRoot("H_0^{pi/2} is positive: no bound state")
        g = lambda k: math.log(k / 2) + EULER_GAMMA - math.tan(theta)
    else:
        if not (math.pi / 2 < theta < math.pi):
            raise NoRoot(f"H_m^theta is positive for 0 <= theta <= pi/2 (theta = {theta})")
        lg_ratio = float(loggamma(np.array([1.0 + m]))[0].real - loggamma(np.array([1.0 - m]))[0].real)
        target = math.log(-math.tan(theta)) + lg_ratio
        g = lambda k: 2.0 * m * math.log(k / 2) - target
    lo, hi = 1e-6, 1e3
    if g(lo) * g(hi) > 0:
        raise NoRoot(f"bound-state equation has no root in k in [{lo}, {hi}]")
    k = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    # Newton polish; g'(k) = 2m / k (or 1 / k at m = 0)
    slope = (2.0 * m if m else 1.0)
    for _ in range(3):
        k -= g(k) * k / slope
    return k


def bound_state(m: float, theta, grid: RadialGrid | None = None) -> BoundState:
    """The negative eigenvalue -k^2 of H_m^theta and its eigenfunction sqrt(kx) K_m(kx).

    For 0 < m < 1 it exists iff pi/2 < theta < pi and k solves
    (k/2)^{2m} = -tan(theta) Gamma(1+m) / Gamma(1-m).  For m = 0 the same
    matching with the logarithmic expansion of K_0 gives k = 2 exp(tan(theta) - gamma_E)
    for every theta != pi/2.
    """
    m = float(m)
    th = _angle(theta)
    _check_regime(m, th)
    k = _bound_state_k(m, th)
    grid = grid or default_grid()
    x = grid.nodes
    u = np.sqrt(k * x) * kv(m, k * x).real
    nrm = norm(GridFunction(grid, u))
    return BoundState(k, -k * k, GridFunction(grid, u / nrm))


def resolvent_theta(m: float, theta, k: float, grid: RadialGrid | None = None) -> IntegralKernel:
    """(H_m^theta + k^2)^{-1} for 0 < m < 1, built from theta-matched solutions.

    u0 = alpha sqrt(x) I_{-m}(kx) + beta sqrt(x) I_m(kx) with boundary
    coefficients (cos theta, sin theta); uinf = sqrt(x) K_m(kx).
    """
    m = float(m)
    th = _angle(theta)
    if not (0 < m < 1):
        raise RegimeError(f"theta-resolvents are built for 0 < m < 1, got {m}")
    if not k > 0:
        raise RangeError("k must be positive")
    grid = grid or default_grid()
    x = grid.nodes
    sq = np.sqrt(x)
    lg_minus = float(loggamma(np.array([1.0 - m]))[0].real)
    lg_plus = float(loggamma(np.array([1.0 + m]))[0].real)
    alpha = math.cos(th) * math.exp(lg_minus + m * math.log(k / 2))
    beta = math.sin(th) * math.exp(lg_plus - m * math.log(k / 2))
    # each sqrt(x) I_{+-m}(kx) has Wronskian 1 against sqrt(x) K_m(kx)
    wr = alpha + beta
    if abs(wr) < 1e-12 * (abs(alpha) + abs(beta)):
        raise PoleError(f"-k^2 = {-k * k} is the eigenvalue of H_m^theta")
    kx = k * x
    i_m, i_mm = iv(m, kx).real, iv(-m, kx).real
    di_m, di_mm = iv_prime(m, kx).real, iv_prime(-m, kx).real
    kk, dkk = kv(m, kx).real, kv_prime(m, kx).real
    u0 = (alpha * sq * i_mm + beta * sq * i_m) / wr
    du0 = (alpha * (i_mm / (2 * sq) + k * sq * di_mm) + beta * (i_m / (2 * sq) + k * sq * di_m)) / wr
    uinf = sq * kk
    duinf = kk / (2 * sq) + k * sq * dkk
    gf = lambda v: GridFunction(grid, v)
    return green_general(gf(u0), gf(uinf), gf(du0), gf(duinf), tol=1e-7)


def form_value(m, f: GridFunction) -> complex:
    """<f, L_m f> by quadrature, L_m f from the grid stencils."""
    return inner(f, apply_lm(m, f))


def _norm_squared_with_tail(grid: RadialGrid, g: np.ndarray, power: float) -> float:
    """||g||^2 plus the analytic piece over (0, x_1) of a fitted c x^power."""
    body = float(np.dot(grid.weights, np.abs(g) ** 2))
    x = grid.nodes
    if 2 * power + 1 <= 0:
        raise RangeError("the boundary behaviour is not square integrable")
    c2 = float(np.mean(np.abs(g[:4]) ** 2 / x[:4] ** (2 * power)))
    return body + c2 * grid.a ** (2 * power + 1) / (2 * power + 1)


def quadratic_form_theta(m: float, theta, f: GridFunction, kappa_value: complex | None = None) -> complex:
    """<f, H_m^theta f> = ||A^max_{1/2-m} f||^2 + m sin(2 theta) |c|^2 for f = f_0 + c xi u_theta.

    The boundary coefficient is recovered from varkappa_m(f) = c cos(theta)
    (extracted by extrapolation unless ``kappa_value`` is given), so the
    boundary term equals 2 m tan(theta) |varkappa_m(f)|^2; at theta = pi/2 it
    vanishes.  Near 0, A_{1/2-m} f behaves like a multiple of x^{m-1/2}; the
    piece of its norm below the first node is added analytically.
    """
    m = float(m)
    th = _angle(theta)
    if not (0 < m < 1):
        raise RegimeError(f"the theta-forms are defined for 0 < m < 1, got {m}")
    af = apply_aalpha(0.5 - m, f).values
    first = _norm_squared_with_tail(f.grid, af, m - 0.5)
    if abs(math.cos(th)) < 1e-15:
        return complex(first)
    kap = kappa(m, f) if kappa_value is None else complex(kappa_value)
    c = kap / math.cos(th)
    return complex(first + m * math.sin(2 * th) * abs(c) ** 2)


def numerical_range_sample(m, a: float, gamma: float, delta: float, R: float) -> complex:
    """Closed-form (m + 1/2) a^{2mu} + int_a^inf (|f'|^2 + V |f|^2) dx for the piecewise power

        f = x^{m+1/2} (x < a),  a^{m+1/2-gamma} x^gamma (a <= x < R),  a^{m+1/2-gamma} R^{gamma-delta} x^delta (x >= R)

    with mu = Re m and V = (m^2 - 1/4) / x^2.
    """
    m = check_order(m)
    if not (0 < a < 1) or not gamma < 0.5 or not delta < -0.5 or not R > a:
        raise ArgumentError(f"need 0 < a < 1, gamma < 1/2, delta < -1/2, R > a; got {a}, {gamma}, {delta}, {R}")
    mu = m.real
    c = m * m - 0.25
    first = a ** (2 * mu) / (1 - 2 * gamma) * (m + 0.5 - gamma) ** 2
    second = a ** (2 * mu + 1 - 2 * gamma) * R ** (2 * gamma - 1) * ((delta**2 + c) / (1 - 2 * delta) - (gamma**2 + c) / (1 - 2 * gamma))
    return complex(first + second)


def sample_numerical_range(m, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` form values over random (a, gamma, delta, R)."""
    out = np.empty(n, dtype=complex)
    for i in range(n):
        a = rng.uniform(0.01, 0.99)
        gamma = rng.uniform(-3.0, 0.49)
        delta = rng.uniform(-4.0, -0.51)
        R = a * math.exp(rng.uniform(0.01, 8.0))
        out[i] = numerical_range_sample(m, a, gamma, delta, R)
    return out


def in_cone(z, m, slack: float = 1e-8) -> np.ndarray:
    """arg z in [-slack, 2 arg m + slack] (with z = 0 counted inside)."""
    m = check_order(m)
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    top = 2 * math.atan2(m.imag, m.real)
    return (z == 0) | ((ang >= -slack) & (ang <= top + slack))


def form_monotonicity_check(m1: float, m2: float, f: GridFunction) -> tuple[float, float]:
    """q_i = ||f'||^2 + (m_i^2 - 1/4) ||f/x||^2 by quadrature; q1 <= q2 whenever m1 <= m2."""
    if not (0 <= m1 <= m2 < 1):
        raise ArgumentError(f"need 0 <= m1 <= m2 < 1, got {m1}, {m2}")
    grid = f.grid
    d = float(np.dot(grid.weights, np.abs(grid.diff(f.values, 1)) ** 2))
    h = float(np.dot(grid.weights, np.abs(f.values / grid.nodes) ** 2))
    return d + (m1 * m1 - 0.25) * h, d + (m2 * m2 - 0.25) * h
