"""Concrete Beltrami coefficients used by the experiments and tests."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .grid import PeriodicGrid


def bump(z, radius: float = 1.0) -> np.ndarray:
    """Standard mollifier exp(1 - 1/(1 - |z/R|^2)), equal to 1 at the origin."""
    s = np.abs(np.asarray(z) / radius) ** 2
    inside = s < 1
    out = np.zeros(s.shape)
    out[inside] = np.exp(1 - 1 / (1 - s[inside]))
    return out


def disk_coverage(z: np.ndarray, h: float, radius: float = 1.0, center: complex = 0j, sub: int = 4) -> np.ndarray:
    """Fraction of the cell of side h centred at each z that lies in the disk."""
    offs = (np.arange(sub) + 0.5) / sub - 0.5
    c = np.zeros(np.shape(z))
    for a in offs:
        for b in offs:
            c += np.abs(z + h * (a + 1j * b) - center) < radius
    return c / sub**2


def radial_stretch_mu(grid: PeriodicGrid, K: float = 2.0) -> np.ndarray:
    """Samples of -k (z / zbar) 1_D for the map z |z|^(1/K - 1)."""
    k = (K - 1) / (K + 1)
    z = grid.z
    phase = np.zeros_like(z)
    nz = z != 0
    phase[nz] = z[nz] / np.conj(z[nz])
    return -k * phase * disk_coverage(z, grid.h)


def radial_stretch_rho(z, K: float = 2.0) -> np.ndarray:
    """Closed-form dbar f for f = z |z|^(1/K - 1) inside the unit disk."""
    s = 1 / K - 1
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    out = np.zeros_like(z)
    ok = (r > 0) & (r < 1)
    out[ok] = (s / 2) * r[ok] ** s * z[ok] / np.conj(z[ok])
    return out


def radial_stretch_jacobian(z, K: float = 2.0) -> np.ndarray:
    """Closed-form Jacobian of z |z|^(1/K - 1) inside the unit disk."""
    s = 1 / K - 1
    r = np.abs(np.asarray(z))
    return ((1 + s / 2) ** 2 - (s / 2) ** 2) * r ** (2 * s)


def bump_mu(grid: PeriodicGrid, amplitude: float, omega: float = 0.0, radius: float = 1.0) -> np.ndarray:
    """c * bump(z/R) * exp(i omega |z|^2)."""
    z = grid.z
    return amplitude * bump(z, radius) * np.exp(1j * omega * np.abs(z) ** 2)


def family_amplitude(A: float) -> float:
    """Amplitude tanh(A) * 0.95, so every family member has k < 0.95."""
    return float(np.tanh(A) * 0.95)


def bump_w12_norm(grid: PeriodicGrid, amplitude: float, omega: float = 0.0, radius: float = 1.0) -> float:
    """Inhomogeneous W^{1,2} norm of :func:`bump_mu` on the grid."""
    from .grid import ComplexField
    from .norms import NormSpec, sobolev_norm

    mu = ComplexField(grid, bump_mu(grid, amplitude, omega, radius))
    return sobolev_norm(mu, NormSpec(order=1, p=2.0))


def bump_for_w12(grid: PeriodicGrid, target: float, *, amplitude: float | None = None, radius: float = 1.0):
    """Find (amplitude, omega) with W^{1,2} norm equal to ``target``.

    With ``amplitude`` unset the oscillation is 0 and the amplitude is solved
    for; otherwise the amplitude is fixed and omega >= 0 is solved for.
    """
    if amplitude is None:
        unit = bump_w12_norm(grid, 1.0, 0.0, radius)
        c = target / unit
        if not 0 <= c < 0.95:
            raise ValueError(f"W^{{1,2}} norm {target} needs amplitude {c:.3f} outside [0, 0.95)")
        return c, 0.0
    base = bump_w12_norm(grid, amplitude, 0.0, radius)
    if target < base:
        raise ValueError(f"target {target} below the omega = 0 norm {base:.4f} at amplitude {amplitude}")
    if target == base:
        return amplitude, 0.0
    hi = 1.0
    while bump_w12_norm(grid, amplitude, hi, radius) < target:
        hi *= 2
        if hi > 1e3:
            raise ValueError(f"target {target} unreachable on this grid")
    omega = brentq(lambda w: bump_w12_norm(grid, amplitude, w, radius) - target, 0.0, hi, xtol=1e-10)
    return amplitude, float(omega)
