"""Mellin calculus for functions of the dilation generator D, and scattering for the pair (H_m, H_k).

With (e^{itD} f)(x) = e^{t/2} f(e^t x), the Mellin transform

    (M f)(s) = (2 pi)^{-1/2} int_0^inf x^{-1/2 - is} f(x) dx

turns e^{itD} into multiplication by e^{its}, so psi(D) = M^{-1} psi M.
Forward transforms are quadratures on whatever grid carries f; inverse
transforms are trapezoid sums over a uniform symmetric s-grid and can be
evaluated at any set of points.

The identity J F_m = Xi_m(D), with J the inversion (J f)(x) = f(1/x) / x,
gives F_m F_k = Xi_k(D) / Xi_m(D), so the wave operators
Omega_pm = e^{pm i(m-k)pi/2} F_m F_k can be computed either with Hankel
matrices or as a single multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, GridAsymmetric, RangeError, WindowError
from .radial import GridFunction, RadialGrid, inner, make_grid, make_log_grid, norm
from .specfun import check_order, jv, xi_multiplier
from .spectral import HankelTransform, evolve, gaussian_laguerre, hankel_entries, hankel_matrix

__all__ = [
    "MellinFunction",
    "Multiplier",
    "mellin_grid",
    "frequency_grid",
    "mellin_forward",
    "mellin_inverse",
    "apply_multiplier",
    "inversion_j",
    "to_log_grid",
    "hankel_at",
    "gm_check",
    "wave_operator",
    "scattering_matrix",
    "scattering_residual",
    "finite_time_probe",
    "kspace_packet",
    "barnes_bessel_smeared",
    "bessel_smeared_series",
]

LOG_HALF_WIDTH = 60.0
LOG_NODES = 3001
S_MAX = 50.0
DS = 0.05
_BLOCK = 256


def mellin_grid(half_width: float = LOG_HALF_WIDTH, n: int = LOG_NODES) -> RadialGrid:
    """Log-uniform grid on [e^{-L}, e^{L}], symmetric under x -> 1/x.

    Functions mapped by Xi_m(D) acquire power tails x^{-m-3/2} at large x,
    so the grid has to reach far out in log scale; with L = 60 and m >= 0
    the mass beyond the grid is below e^{-120}.
    """
    return make_log_grid(half_width, n)


def frequency_grid(s_max: float = S_MAX, ds: float = DS) -> np.ndarray:
    if not (s_max > 0 and 0 < ds < s_max):
        raise ArgumentError(f"need 0 < ds < s_max, got ds={ds}, s_max={s_max}")
    n = int(round(s_max / ds))
    return ds * np.arange(-n, n + 1, dtype=float)


def _check_freqs(s: np.ndarray) -> float:
    if s.ndim != 1 or len(s) < 3:
        raise ArgumentError("frequency grid needs at least three samples")
    ds = np.diff(s)
    step = float(ds[0])
    if step <= 0 or np.max(np.abs(ds - step)) > 1e-9 * step:
        raise ArgumentError("frequency grid must be uniform and increasing")
    if abs(s[0] + s[-1]) > 1e-9 * step:
        raise ArgumentError("frequency grid must be symmetric about 0")
    return step


@dataclass(eq=False)
class MellinFunction:
    """Samples of a function of the Mellin variable s on a uniform symmetric grid."""

    freqs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.freqs.shape:
            raise ArgumentError("freqs and values differ in shape")
        _check_freqs(self.freqs)

    @property
    def ds(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def norm(self) -> float:
        return math.sqrt(self.ds * float(np.sum(np.abs(self.values) ** 2)))


@dataclass(eq=False)
class Multiplier:
    """psi(D) sampled at the frequencies; ``unitary`` asserts |psi| = 1 samplewise."""

    freqs: np.ndarray
    samples: np.ndarray
    unitary: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.freqs.shape:
            raise ArgumentError("freqs and samples differ in shape")
        _check_freqs(self.freqs)
        if self.unitary:
            dev = float(np.max(np.abs(np.abs(self.samples) - 1.0)))
            if dev > 1e-10:
                raise RangeError(f"multiplier tagged unitary deviates from |psi| = 1 by {dev:.1e}")

    @classmethod
    def identity(cls, freqs=None) -> "Multiplier":
        s = frequency_grid() if freqs is None else freqs
        return cls(s, np.ones(len(s)), True, "1")

    @classmethod
    def dilation(cls, tau: float, freqs=None) -> "Multiplier":
        """e^{i tau s}, i.e. e^{i tau D}."""
        s = frequency_grid() if freqs is None else np.asarray(freqs, float)
        return cls(s, np.exp(1j * tau * s), True, f"dilation({tau:g})")

    @classmethod
    def xi(cls, m, freqs=None) -> "Multiplier":
        """Xi_m(s) = 2^{is} Gamma((m+1+is)/2) / Gamma((m+1-is)/2); unitary for real m."""
        m = check_order(m)
        s = frequency_grid() if freqs is None else np.asarray(freqs, float)
        return cls(s, xi_multiplier(m, s), m.imag == 0, f"xi({m})")

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        if not isinstance(other, Multiplier):
            return Multiplier(self.freqs, self.samples * other, False)
        if self.freqs.shape != other.freqs.shape or np.any(self.freqs != other.freqs):
            raise ArgumentError("multipliers live on different frequency grids")
        return Multiplier(self.freqs, self.samples * other.samples, self.unitary and other.unitary)

    def __truediv__(self, other: "Multiplier") -> "Multiplier":
        if self.freqs.shape != other.freqs.shape or np.any(self.freqs != other.freqs):
            raise ArgumentError("multipliers live on different frequency grids")
        return Multiplier(self.freqs, self.samples / other.samples, self.unitary and other.unitary)

    def scaled(self, c: complex) -> "Multiplier":
        c = complex(c)
        return Multiplier(self.freqs, c * self.samples, self.unitary and abs(abs(c) - 1) < 1e-14)


def _window_check(values: np.ndarray, s: np.ndarray, tail_tol: float) -> None:
    mass = np.abs(values) ** 2
    total = float(np.sum(mass))
    if total == 0:
        return
    edge = np.abs(s) > 0.9 * s[-1]
    share = float(np.sum(mass[edge])) / total
    if share > tail_tol:
        raise WindowError(f"{share:.1e} of the Mellin mass sits in the outer tenth of |s| <= {s[-1]:g}")


def mellin_forward(f: GridFunction, freqs=None, tail_tol: float = 1e-8) -> MellinFunction:
    """(M f)(s_j) by quadrature on the grid of f."""
    s = frequency_grid() if freqs is None else np.asarray(freqs, float)
    _check_freqs(s)
    grid = f.grid
    live = f.values != 0
    u = np.log(grid.nodes[live])
    h = grid.weights[live] * grid.nodes[live] ** -0.5 * f.values[live]
    out = np.empty(len(s), dtype=complex)
    for lo in range(0, len(s), _BLOCK):
        out[lo : lo + _BLOCK] = np.exp(-1j * np.outer(s[lo : lo + _BLOCK], u)) @ h
    out /= math.sqrt(2 * math.pi)
    _window_check(out, s, tail_tol)
    return MellinFunction(s, out)


def mellin_inverse(F: MellinFunction, grid: RadialGrid) -> GridFunction:
    """f(x) = (2 pi)^{-1/2} int x^{-1/2 + is} F(s) ds, trapezoid in s, at the nodes of ``grid``."""
    s = F.freqs
    c = F.values * F.ds
    c[0] *= 0.5
    c[-1] *= 0.5
    x = grid.nodes
    u = np.log(x)
    out = np.empty(len(x), dtype=complex)
    for lo in range(0, len(x), _BLOCK):
        out[lo : lo + _BLOCK] = np.exp(1j * np.outer(u[lo : lo + _BLOCK], s)) @ c
    return GridFunction(grid, out * x**-0.5 / math.sqrt(2 * math.pi))


def apply_multiplier(psi: Multiplier, f: GridFunction, target: RadialGrid | None = None, tail_tol: float = 1e-8) -> GridFunction:
    """psi(D) f = M^{-1} psi M f, sampled on ``target`` (default: the grid of f)."""
    F = mellin_forward(f, psi.freqs, tail_tol)
    return mellin_inverse(MellinFunction(psi.freqs, psi.samples * F.values), target or f.grid)


def inversion_j(f: GridFunction) -> GridFunction:
    """(J f)(x) = f(1/x) / x; requires a node set closed under x -> 1/x."""
    x = f.grid.nodes
    if np.max(np.abs(x * x[::-1] - 1.0)) > 1e-10:
        raise GridAsymmetric("grid nodes are not symmetric under x -> 1/x")
    if np.max(np.abs(f.grid.weights / x - (f.grid.weights / x)[::-1])) > 1e-12 * np.max(f.grid.weights / x):
        raise GridAsymmetric("grid weights are not symmetric in ln x")
    return GridFunction(f.grid, f.values[::-1] / x)


def to_log_grid(f: GridFunction, lgrid: RadialGrid | None = None) -> GridFunction:
    """Resample f onto a log grid by its panel interpolant (zero outside the panel range).

    Panel grids are too coarse in ln x for x^{-is} at large s, so Mellin
    quadratures of panel-grid functions go through this resampling.
    """
    if f.grid.kind == "log":
        return f
    lgrid = lgrid or mellin_grid()
    return GridFunction(lgrid, f.grid.interpolate(f.values, lgrid.nodes))


def hankel_at(m, k, f: GridFunction) -> np.ndarray:
    """(F_m f)(k) at arbitrary k by quadrature over the grid of f (no resolution check)."""
    k = np.asarray(k, dtype=float)
    out = np.empty(k.shape, dtype=complex)
    h = f.grid.weights * f.values
    for lo in range(0, len(k), _BLOCK):
        out[lo : lo + _BLOCK] = hankel_entries(m, k[lo : lo + _BLOCK], f.grid.nodes) @ h
    return out


def _gm_family(m: float):
    return [(0, 1.0), (1, 1.0), (0, 0.5), (1, 0.75), (0, 1.25)]


def gm_check(m, family=None, k_cut: float = 10.0, lgrid: RadialGrid | None = None, xgrid: RadialGrid | None = None) -> float:
    """max over the family of ||J(F_m f) - Xi_m(D) f|| / ||f||.

    ``family`` lists (n, s) for f = x^{m+1/2+2n} e^{-s x^2/2}.  The Hankel
    side is a quadrature on a panel grid evaluated at k = 1/x for k up to
    ``k_cut``; beyond it F_m f must have decayed below 1e-10 of its peak.
    """
    m = check_order(m)
    if m.imag != 0 or m.real <= -1:
        raise RangeError(f"the two-path check needs real m > -1, got {m}")
    m = m.real
    lgrid = lgrid or mellin_grid()
    xgrid = xgrid or make_grid(1e-8, 30.0, 240, 8)
    xi = Multiplier.xi(m)
    x = lgrid.nodes
    kk = 1.0 / x
    near = kk <= k_cut
    entries = hankel_entries(m, kk[near], xgrid.nodes)
    worst = 0.0
    for n, s in family or _gm_family(m):
        f_log = GridFunction(lgrid, gaussian_laguerre(m, n, s, x))
        f_pan = GridFunction(xgrid, gaussian_laguerre(m, n, s, xgrid.nodes))
        fk = np.zeros(lgrid.n, dtype=complex)
        fk[near] = entries @ (xgrid.weights * f_pan.values)
        peak = np.max(np.abs(fk))
        if abs(fk[near][0]) > 1e-10 * peak:
            raise WindowError(f"F_m f has not decayed by k = {k_cut:g} ({abs(fk[near][0]) / peak:.1e} of peak)")
        lhs = GridFunction(lgrid, fk / x)  # fk holds (F_m f)(1/x)
        rhs = apply_multiplier(xi, f_log)
        worst = max(worst, norm(lhs - rhs) / norm(f_log))
    return worst


def _phase(m: float, k: float, sign: int) -> complex:
    if sign not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {sign}")
    return complex(np.exp(sign * 0.5j * math.pi * (m - k)))


def _real_orders(m, k) -> tuple[float, float]:
    m, k = check_order(m), check_order(k)
    if m.imag or k.imag or m.real <= -1 or k.real <= -1:
        raise RangeError(f"wave operators need real m, k > -1, got {m}, {k}")
    return m.real, k.real


def _transforms(m: float, k: float, grid: RadialGrid, transforms) -> tuple[HankelTransform, HankelTransform]:
    if transforms is not None:
        tr_m, tr_k = transforms
        if tr_m.m != m or tr_k.m != k:
            raise ArgumentError("transforms do not match the orders")
        return tr_m, tr_k
    tr_m = hankel_matrix(m, grid)
    tr_k = tr_m if k == m else hankel_matrix(k, grid, tr_m.kgrid)
    return tr_m, tr_k


def wave_operator(m, k, sign: int, f: GridFunction, path: str = "multiplier", transforms=None, freqs=None) -> GridFunction:
    """Omega_pm f = e^{pm i(m-k)pi/2} F_m F_k f.

    ``path="hankel"`` multiplies by the two Hankel matrices (``transforms``
    = (F_m, F_k) may be supplied to reuse them); ``path="multiplier"``
    applies e^{pm i(m-k)pi/2} Xi_k(D) / Xi_m(D).
    """
    m, k = _real_orders(m, k)
    phase = _phase(m, k, sign)
    if path == "hankel":
        tr_m, tr_k = _transforms(m, k, f.grid, transforms)
        return tr_m.backward(tr_k.forward(f)) * phase
    if path == "multiplier":
        s = frequency_grid() if freqs is None else freqs
        psi = (Multiplier.xi(k, s) / Multiplier.xi(m, s)).scaled(phase)
        return apply_multiplier(psi, to_log_grid(f), target=f.grid)
    raise ArgumentError(f"path must be 'hankel' or 'multiplier', got {path!r}")


def _scatter(m: float, k: float, f: GridFunction, transforms) -> GridFunction:
    """Omega_-^* Omega_+ f with both wave operators built from Hankel matrices."""
    tr_m, tr_k = _transforms(m, k, f.grid, transforms)
    plus = wave_operator(m, k, 1, f, "hankel", (tr_m, tr_k))
    # Omega_-^* = conj(phase_-) F_k F_m
    return tr_k.backward(tr_m.forward(plus)) * np.conj(_phase(m, k, -1))


def scattering_matrix(m, k, f: GridFunction, transforms=None) -> complex:
    """Rayleigh quotient <f, Omega_-^* Omega_+ f> / <f, f>; should equal e^{i pi (m - k)}."""
    m, k = _real_orders(m, k)
    sf = _scatter(m, k, f, transforms)
    return inner(f, sf) / inner(f, f)


def scattering_residual(m, k, f: GridFunction, transforms=None) -> float:
    """||Omega_-^* Omega_+ f - e^{i pi (m-k)} f|| / ||f||: zero iff S acts as that scalar on f."""
    m, k = _real_orders(m, k)
    sf = _scatter(m, k, f, transforms)
    return norm(sf - f * np.exp(1j * math.pi * (m - k))) / norm(f)


def kspace_packet(order, q0: float, sigma: float, transform: HankelTransform) -> GridFunction:
    """F_order of the bump exp(-(q - q0)^2 / (2 sigma^2)) in k-space: a packet with momenta near q0."""
    order = check_order(order)
    if transform.m != order:
        raise ArgumentError("transform order does not match")
    q = transform.kgrid.nodes
    return transform.backward(GridFunction(transform.kgrid, np.exp(-0.5 * ((q - q0) / sigma) ** 2)))


def finite_time_probe(m, k, f: GridFunction, t_list, transforms=None, tail_tol: float = 1e-4) -> list[float]:
    """||e^{itH_m} e^{-itH_k} f - Omega_+ f|| / ||f|| for t in ``t_list``.

    The sequence is a trend indicator, not a convergence rate.  The
    return leg e^{itH_m} acts on a function whose F_m transform has a slow
    power tail cut at the top of the k-grid, which leaves a little ringing
    near the far end of the x-grid; hence the looser default ``tail_tol``.
    """
    m, k = _real_orders(m, k)
    t_list = [float(t) for t in t_list]
    if any(t <= 0 for t in t_list) or any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise ArgumentError("t_list must be positive and increasing")
    tr_m, tr_k = _transforms(m, k, f.grid, transforms)
    target = wave_operator(m, k, 1, f, "hankel", (tr_m, tr_k))
    nf = norm(f)
    out = []
    for t in t_list:
        g = evolve(m, -t, evolve(k, t, f, tr_k), tr_m, tail_tol)
        out.append(norm(g - target) / nf)
    return out


def _barnes_tgrid(t_max: float, width: float, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    n = max(1, int(math.ceil(2 * t_max / width)))
    edges = np.linspace(-t_max, t_max, n + 1)
    z, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    return (mid[:, None] + half[:, None] * z).ravel(), (half[:, None] * w).ravel()


def barnes_bessel_smeared(m, phi: GridFunction, t_max: float = 80.0, tail_tol: float = 1e-8) -> complex:
    """int J_m(x) phi(x) dx from the Mellin-Barnes form of J_m.

        (1 / 4 pi) int dt Gamma((m+1+it)/2) / Gamma((m+1-it)/2) int dx (x/2)^{-it-1} phi(x)

    The x-integral is a quadrature on the grid of phi (a log grid reaching
    far towards 0 is needed, since (x/2)^{-1} phi does not vanish there);
    the t-integral uses 8-point Gauss-Legendre panels on [-t_max, t_max],
    narrow enough for the oscillation (x/2)^{-it}.  The integrand on the
    outer tenth of the window is integrated and must stay below
    ``tail_tol`` of the total.
    """
    m = check_order(m)
    if m.real <= -1:
        raise RangeError(f"the Barnes form needs Re m > -1, got {m}")
    grid = phi.grid
    mag = np.abs(phi.values)
    live = mag > 1e-17 * np.max(mag)
    x = grid.nodes[live]
    v = np.log(x / 2.0)
    h = grid.weights[live] * phi.values[live] * 2.0 / x
    width = min(1.0, 3.0 / max(1.0, float(np.max(np.abs(v)))))
    t, wt = _barnes_tgrid(t_max, width)
    big_phi = np.empty(len(t), dtype=complex)
    for lo in range(0, len(t), _BLOCK):
        big_phi[lo : lo + _BLOCK] = np.exp(-1j * np.outer(t[lo : lo + _BLOCK], v)) @ h
    ratio = xi_multiplier(m, t) * np.exp(-1j * math.log(2.0) * t)
    integrand = ratio * big_phi
    edge = np.abs(t) > 0.9 * t_max
    total = float(np.dot(wt, np.abs(integrand)))
    tail = float(np.dot(wt[edge], np.abs(integrand[edge])))
    if total > 0 and tail > tail_tol * total:
        raise WindowError(f"Barnes integrand keeps {tail / total:.1e} of its mass near |t| = {t_max:g}")
    return complex(np.dot(wt, integrand)) / (4 * math.pi)


def bessel_smeared_series(m, phi: GridFunction) -> complex:
    """int J_m(x) phi(x) dx by direct quadrature with J_m from its series/asymptotic evaluator."""
    grid = phi.grid
    live = phi.values != 0
    out = np.zeros(grid.n, dtype=complex)
    out[live] = jv(check_order(m), grid.nodes[live]) * phi.values[live]
    return complex(np.dot(grid.weights, out))
