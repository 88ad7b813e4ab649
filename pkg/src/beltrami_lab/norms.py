"""Lebesgue, weighted Sobolev, Dini and boundary Besov norms."""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
from scipy import fft as sfft

from .errors import DegenerateBoundary, GridMismatch, NonPositiveWeight
from .grid import ComplexField, PeriodicGrid
from .kernels import besov_sum, oscillation
from .operators import DomainMask


@dataclass(frozen=True, eq=False)
class NormSpec:
    """Order n, exponent p, optional region mask and optional positive weight."""

    order: int = 0
    p: float = 2.0
    region: DomainMask | None = None
    weight: np.ndarray | None = None

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a nonnegative integer, got {self.order!r}")
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ValueError(f"exponent must be finite and >= 1, got {self.p!r}")
        if self.weight is not None:
            w = np.asarray(self.weight, dtype=float)
            live = np.ones(w.shape, bool) if self.region is None else self.region.coverage > 0
            if not (np.isfinite(w[live]).all() and (w[live] > 0).all()):
                raise NonPositiveWeight("weight must be positive and finite on the region")
            object.__setattr__(self, "weight", w)


def lp_integral(values: np.ndarray, p: float, grid: PeriodicGrid, region=None, weight=None) -> float:
    """Midpoint rule for  int |g|^p w  over the region (coverage-weighted)."""
    a = np.abs(values) ** p
    if weight is not None:
        a = a * weight
    if region is not None:
        a = a * (region.coverage if isinstance(region, DomainMask) else region)
    return float(a.sum() * grid.cell_area)


def lp_norm(values: np.ndarray, p: float, grid: PeriodicGrid, region=None, weight=None) -> float:
    return lp_integral(values, p, grid, region, weight) ** (1.0 / p)


def derivative_blocks(f: ComplexField, order: int) -> list[np.ndarray]:
    """All d^a dbar^(order - a) f for a = order, ..., 0, from one forward transform."""
    g = f.grid
    F = sfft.fft2(f.values)
    return [
        sfft.ifft2(F * g.dz_symbol**a * g.dzbar_symbol ** (order - a)) if order else f.values
        for a in range(order, -1, -1)
    ]


def sobolev_norm(f: ComplexField, spec: NormSpec, homogeneous: bool = False) -> float:
    """sum over |alpha| = j of ||d^a1 dbar^a2 f w^(1/p)||_p, summed over j <= n unless homogeneous."""
    if spec.region is not None and spec.region.grid != f.grid:
        raise GridMismatch("norm region lives on another grid")
    orders = [spec.order] if homogeneous else range(spec.order + 1)
    total = 0.0
    for j in orders:
        for block in derivative_blocks(f, j):
            total += lp_norm(block, spec.p, f.grid, spec.region, spec.weight)
    return total


# geometric refinement of the modulus levels
DINI_LEVEL_RATIO = 2 ** (1 / 8)


def dini_estimate(samples, m: int | None = None) -> tuple[float, float]:
    """Dini integral of a real function on [0, 1] and the sub-cutoff tail estimate.

    ``samples`` is an array of equispaced values (endpoints included) or a
    callable sampled at ``m`` points.  The modulus of continuity is measured
    exactly on the samples at widths growing by 2^(1/8); the integral over
    [1/(m-1), 1] uses the trapezoid rule in log t, and the part below the
    cutoff is extrapolated from the local power law of the modulus.  The
    second return value is that extrapolated tail, reported as the error bar.
    """
    if callable(samples):
        if m is None:
            raise ValueError("resolution m is required when sampling a callable")
        samples = samples(np.linspace(0.0, 1.0, m))
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1 or f.size < 64:
        raise ValueError(f"need at least 64 samples, got {f.size}")
    n = f.size - 1
    kmax = int(np.floor(np.log(n) / np.log(DINI_LEVEL_RATIO)))
    widths = np.unique(np.round(DINI_LEVEL_RATIO ** np.arange(kmax + 1)).astype(np.int64))
    widths = np.unique(np.append(widths[widths < n], n))
    omega = oscillation(f, widths)
    lt = np.log(widths / n)
    body = float(np.sum(0.5 * (omega[1:] + omega[:-1]) * np.diff(lt)))
    tail = 0.0
    if omega[0] > 0:
        beta = np.log(omega[1] / omega[0]) / np.log(widths[1] / widths[0]) if omega[1] > 0 else 1.0
        tail = float(omega[0] / np.clip(beta, 0.05, 1.0))
    return body + tail, tail


def dini_norm(samples, m: int | None = None) -> float:
    """int_0^1 sup_{|x-y|<=t} |f(x)-f(y)| dt/t  (see :func:`dini_estimate`)."""
    return dini_estimate(samples, m)[0]


def spectral_theta_derivative(values: np.ndarray) -> np.ndarray:
    """d/dtheta of equispaced samples of a 2 pi-periodic function."""
    v = np.asarray(values, dtype=complex)
    m = v.size
    k = np.fft.fftfreq(m, 1.0 / m)
    if m % 2 == 0:
        k[m // 2] = 0
    return np.fft.ifft(1j * k * np.fft.fft(v))


def besov_boundary_norm(domain, f, q: float, *, fprime=None) -> float:
    """(int int |f(x)-f(y)|^q / |x-y|^q ds ds)^(1/q) over a closed boundary curve.

    ``domain`` is a DomainSpec or a BoundaryCurve; ``f`` holds values at its
    nodes.  The double trapezoid sum includes the diagonal nodes through the
    limit |f'|^q / |z'|^q, with f' taken spectrally unless ``fprime`` (the
    theta-derivative) is given.
    """
    curve = domain.curve() if hasattr(domain, "curve") else domain
    if not q > 1:
        raise ValueError(f"q must exceed 1, got {q}")
    f = np.asarray(f, dtype=complex)
    if f.shape != curve.z.shape:
        raise ValueError(f"boundary function has {f.size} values for {curve.z.size} nodes")
    fp = spectral_theta_derivative(f) if fprime is None else np.asarray(fprime, dtype=complex)
    diag = (np.abs(fp) / curve.speed) ** q
    total, bad = besov_sum(curve.z, f, curve.ds, float(q), diag)
    if bad:
        raise DegenerateBoundary(f"{bad // 2} pairs of distinct boundary nodes coincide")
    return float(total ** (1.0 / q))

