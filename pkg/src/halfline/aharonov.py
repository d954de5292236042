"""Partial-wave bookkeeping for the Aharonov-Bohm Hamiltonian with flux lambda.

In polar coordinates the operator splits into sectors of angular momentum
l, each unitarily equivalent to a half-line operator of order l + lambda.
A sector is deficient (admits a one-parameter family of extensions) iff
|l + lambda| < 1; for lambda in (n, n+1) these are l = -n-1 and l = -n.
Rotation-symmetric homogeneous extensions choose, in each of the two
deficient sectors, either the Friedrichs (F, order +|l + lambda|) or the
Krein (K, order -|l + lambda|) realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, IntegerFlux
from .radial import RadialGrid, default_grid
from .resolvent import IntegralKernel, resolvent_hm

__all__ = [
    "SectorEntry",
    "FluxSectorMap",
    "ExtensionVariant",
    "VARIANTS",
    "sector_map",
    "deficiency_indices",
    "variant_orders",
    "holomorphy_strip",
    "strip_consistent",
    "sector_resolvent",
]

L_RANGE = (-20, 20)
_INT_TOL = 1e-12


@dataclass(frozen=True)
class SectorEntry:
    l: int
    order: complex
    deficient: bool


@dataclass(frozen=True)
class FluxSectorMap:
    lam: float
    entries: tuple[SectorEntry, ...]

    def deficient_sectors(self) -> list[int]:
        return [e.l for e in self.entries if e.deficient]

    def to_rows(self) -> list[dict]:
        return [{"l": e.l, "order": e.order, "deficient": e.deficient} for e in self.entries]


@dataclass(frozen=True)
class ExtensionVariant:
    """Sign pair for the deficient sectors; the first governs l = -n-1, the second l = -n."""

    tag: str

    def __post_init__(self):
        if self.tag not in ("FF", "FK", "KF", "KK"):
            raise ArgumentError(f"variant must be one of FF, FK, KF, KK, got {self.tag!r}")

    @property
    def signs(self) -> tuple[int, int]:
        return tuple(1 if c == "F" else -1 for c in self.tag)


VARIANTS = tuple(ExtensionVariant(t) for t in ("FF", "FK", "KF", "KK"))

# open strips of holomorphy in lambda, relative to the base interval (n, n+1)
_STRIPS = {"FF": (-1, 2), "FK": (-2, 1), "KF": (0, 3), "KK": (0, 1)}


def _variant(v) -> ExtensionVariant:
    return v if isinstance(v, ExtensionVariant) else ExtensionVariant(str(v))


def _is_integer(lam: float) -> bool:
    return abs(lam - round(lam)) < _INT_TOL


def sector_map(lam: float, l_min: int = L_RANGE[0], l_max: int = L_RANGE[1]) -> FluxSectorMap:
    """Orders l + lambda for l_min <= l <= l_max, flagged deficient when |l + lambda| < 1.

    Fluxes within the integer tolerance of an integer are treated as
    integer, as in ``deficiency_indices``.
    """
    if l_min > l_max:
        raise ArgumentError(f"need l_min <= l_max, got {l_min} > {l_max}")
    lam = float(lam)
    entries = tuple(SectorEntry(l, complex(l + lam), abs(l + lam) < 1.0 - _INT_TOL) for l in range(int(l_min), int(l_max) + 1))
    return FluxSectorMap(lam, entries)


def deficiency_indices(lam: float) -> tuple[int, int]:
    """(1, 1) for integer flux (one deficient sector), (2, 2) otherwise."""
    c = -round(float(lam))
    n = len(sector_map(lam, c - 2, c + 2).deficient_sectors())
    return n, n


def variant_orders(lam, variant, l_min: int = L_RANGE[0], l_max: int = L_RANGE[1], n: int | None = None) -> list[tuple[int, complex]]:
    """Per-sector orders of the extension ``variant`` at flux ``lam``.

    With n = floor(lam) the sectors carry

        l <= -n-2:  -l - lam
        l = -n-1:   s1 (n + 1 - lam)
        l = -n:     s2 (lam - n)
        l >= -n+1:  l + lam

    Passing ``n`` explicitly continues these expressions to lam outside
    (n, n+1), including complex lam.
    """
    v = _variant(variant)
    if n is None:
        lam_r = float(np.real(lam))
        if np.imag(lam) != 0 or _is_integer(lam_r):
            raise IntegerFlux(f"variants are labelled for non-integer real flux, got {lam}")
        n = math.floor(lam_r)
    lam = complex(lam)
    s1, s2 = v.signs
    out = []
    for l in range(int(l_min), int(l_max) + 1):
        if l <= -n - 2:
            order = -l - lam
        elif l == -n - 1:
            order = s1 * (n + 1 - lam)
        elif l == -n:
            order = s2 * (lam - n)
        else:
            order = l + lam
        out.append((l, order))
    return out


def holomorphy_strip(variant, n: int) -> tuple[int, int]:
    """Open strip of Re lambda on which the variant's family is holomorphic."""
    lo, hi = _STRIPS[_variant(variant).tag]
    return n + lo, n + hi


def strip_consistent(variant, n: int, lam, l_min: int = L_RANGE[0], l_max: int = L_RANGE[1]) -> bool:
    """Every continued sector order has Re > -1 at ``lam``."""
    return all(order.real > -1 for _, order in variant_orders(lam, variant, l_min, l_max, n=n))


def sector_resolvent(lam: float, variant, l: int, k, grid: RadialGrid | None = None) -> IntegralKernel:
    """Resolvent (H + k^2)^{-1} of sector ``l`` under ``variant``."""
    orders = dict(variant_orders(lam, variant, l, l))
    return resolvent_hm(orders[l], k, grid or default_grid())
