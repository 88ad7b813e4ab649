"""Beurling and Cauchy transforms as Fourier multipliers, and their compressions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from .errors import GridMismatch, NonZeroMean
from .grid import ComplexField, PeriodicGrid, apply_multiplier

NONZERO_MEAN_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DomainMask:
    """Cell-coverage fractions of a closed domain on a grid.

    ``domain`` records the geometry that produced the mask (a DomainSpec for
    masks built by :func:`beltrami_lab.domains.domain_mask`).
    """

    grid: PeriodicGrid
    coverage: np.ndarray
    domain: Any = field(default=None)

    def __post_init__(self):
        c = np.array(self.coverage, dtype=float)
        if c.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"coverage must be {self.grid.n}x{self.grid.n}, got {c.shape}")
        if not np.isfinite(c).all() or c.min() < 0 or c.max() > 1:
            raise ValueError("coverage must lie in [0, 1]")
        c.setflags(write=False)
        object.__setattr__(self, "coverage", c)

    @classmethod
    def full(cls, grid: PeriodicGrid) -> "DomainMask":
        return cls(grid, np.ones((grid.n, grid.n)))

    @property
    def area(self) -> float:
        return float(self.coverage.sum() * self.grid.cell_area)

    @property
    def interior(self) -> np.ndarray:
        """Cells lying entirely inside the domain."""
        return self.coverage == 1.0


@lru_cache(maxsize=16)
def beurling_symbol(grid: PeriodicGrid) -> np.ndarray:
    """xi-bar / xi off the zero mode, 0 at xi = 0.

    The Nyquist modes keep their unit-modulus value so that S stays an exact
    isometry on mean-zero fields.
    """
    xi = grid.xi
    safe = np.where(xi == 0, 1, xi)
    m = np.where(xi == 0, 0, np.conj(safe) / safe)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=16)
def cauchy_symbol(grid: PeriodicGrid) -> np.ndarray:
    """Inverse of the dbar symbol, zero on the zero mode and the Nyquist lines."""
    xi = grid.xi
    dead = (xi == 0) | grid.nyquist
    safe = np.where(dead, 1, xi)
    m = np.where(dead, 0, -2j / safe)
    m.setflags(write=False)
    return m


def beurling(f: ComplexField) -> ComplexField:
    """Beurling transform S, the multiplier xi-bar/xi."""
    return apply_multiplier(f, beurling_symbol(f.grid))


def cauchy(f: ComplexField) -> ComplexField:
    """Cauchy transform: the zero-mean solution g of dbar g = f.

    Raises :class:`NonZeroMean` when f has a mean the torus cannot absorb.
    """
    mean = abs(f.values.mean())
    if mean > NONZERO_MEAN_RTOL * f.sup_norm():
        raise NonZeroMean(f"mean {mean:.3e} exceeds {NONZERO_MEAN_RTOL:g} * sup|f|")
    return apply_multiplier(f, cauchy_symbol(f.grid))


def compress_beurling(f: ComplexField, mask: DomainMask) -> ComplexField:
    """S_Omega f = 1_Omega S(1_Omega f), with 1_Omega the coverage fraction."""
    if mask.grid != f.grid:
        raise GridMismatch(f"field on {f.grid}, mask on {mask.grid}")
    return beurling(f * mask.coverage) * mask.coverage
