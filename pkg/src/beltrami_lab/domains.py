"""Star-shaped domains given by a radial Fourier series, their boundaries and masks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainTooLarge, NotStarShaped
from .grid import PeriodicGrid
from .norms import besov_boundary_norm, dini_estimate, spectral_theta_derivative
from .operators import DomainMask

MAX_MODES = 64


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """A closed curve sampled at equispaced parameter values theta_i = 2 pi i / m.

    ``dz`` is dz/dtheta at the nodes; the curve is positively oriented.
    """

    z: np.ndarray
    dz: np.ndarray

    @classmethod
    def from_points(cls, z) -> "BoundaryCurve":
        z = np.asarray(z, dtype=complex)
        return cls(z, spectral_theta_derivative(z))

    @property
    def m(self) -> int:
        return self.z.size

    @cached_property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.m) / self.m

    @cached_property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @cached_property
    def ds(self) -> np.ndarray:
        return self.speed * (2 * np.pi / self.m)

    @cached_property
    def normal(self) -> np.ndarray:
        """Outward unit normal, -i times the unit tangent."""
        return -1j * self.dz / self.speed

    @property
    def length(self) -> float:
        return float(self.ds.sum())


@dataclass(frozen=True)
class DomainSpec:
    """Domain {center + rho e^{i theta} : rho < r(theta)} with
    r(theta) = sum_k a_k cos(k theta) + b_k sin(k theta), k < 64."""

    cos: tuple = (1.0,)
    sin: tuple = ()
    center: complex = 0j
    m: int = 512

    def __post_init__(self):
        a = tuple(float(v) for v in self.cos)
        b = tuple(float(v) for v in self.sin)
        if not a or len(a) > MAX_MODES or len(b) > MAX_MODES:
            raise ValueError(f"between 1 and {MAX_MODES} cosine modes and at most {MAX_MODES} sine modes")
        object.__setattr__(self, "cos", a)
        object.__setattr__(self, "sin", b)
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "m", int(self.m))
        if self.m < 16:
            raise ValueError(f"node count must be at least 16, got {self.m}")
        rmin = self.radius(np.linspace(0, 2 * np.pi, 4096, endpoint=False)).min()
        if not rmin > 0:
            raise ValueError(f"radial function must stay positive (min {rmin:.3g})")

    @classmethod
    def disk(cls, radius: float = 1.0, center: complex = 0j, m: int = 512) -> "DomainSpec":
        return cls((radius,), (), center, m)

    @classmethod
    def perturbed_disk(cls, eps: float, mode: int = 4, radius: float = 1.0, m: int = 512) -> "DomainSpec":
        a = [0.0] * (mode + 1)
        a[0] = radius
        a[mode] = radius * eps
        return cls(tuple(a), (), 0j, m)

    @classmethod
    def ellipse(cls, a: float, b: float, center: complex = 0j, m: int = 512, modes: int = MAX_MODES) -> "DomainSpec":
        """Axis-aligned ellipse; the radial function is truncated to ``modes`` cosines."""
        th = 2 * np.pi * np.arange(4096) / 4096
        r = a * b / np.sqrt((b * np.cos(th)) ** 2 + (a * np.sin(th)) ** 2)
        c = np.fft.rfft(r) / 4096
        coeffs = 2 * c.real[:modes]
        coeffs[0] = c.real[0]
        return cls(tuple(coeffs), (), center, m)

    def radius(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        a = np.asarray(self.cos)
        out = np.cos(np.multiply.outer(th, np.arange(a.size))) @ a
        if self.sin:
            b = np.asarray(self.sin)
            out = out + np.sin(np.multiply.outer(th, np.arange(b.size))) @ b
        return out

    def radius_derivative(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        a = np.asarray(self.cos)
        k = np.arange(a.size)
        out = -np.sin(np.multiply.outer(th, k)) @ (k * a)
        if self.sin:
            b = np.asarray(self.sin)
            k = np.arange(b.size)
            out = out + np.cos(np.multiply.outer(th, k)) @ (k * b)
        return out

    def curve(self, m: int | None = None) -> BoundaryCurve:
        m = self.m if m is None else int(m)
        th = 2 * np.pi * np.arange(m) / m
        r, dr = self.radius(th), self.radius_derivative(th)
        e = np.exp(1j * th)
        return BoundaryCurve(self.center + r * e, (dr + 1j * r) * e)

    def contains(self, w) -> np.ndarray:
        d = np.asarray(w, dtype=complex) - self.center
        return np.abs(d) < self.radius(np.angle(d))

    def rotated(self, alpha: float) -> "DomainSpec":
        """Rotate the domain about the origin by ``alpha``."""
        n = max(len(self.cos), len(self.sin))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        k = np.arange(n)
        ca, sa = np.cos(k * alpha), np.sin(k * alpha)
        return DomainSpec(
            tuple(a * ca - b * sa), tuple(a * sa + b * ca), self.center * np.exp(1j * alpha), self.m
        )

    def translated(self, shift: complex) -> "DomainSpec":
        return DomainSpec(self.cos, self.sin, self.center + shift, self.m)

    def dilated(self, lam: float) -> "DomainSpec":
        """Image under z -> lam z."""
        return DomainSpec(
            tuple(lam * v for v in self.cos), tuple(lam * v for v in self.sin), lam * self.center, self.m
        )

    @classmethod
    def from_boundary_points(cls, points, center: complex = 0j, m: int = 512, modes: int = MAX_MODES) -> "DomainSpec":
        """Fit a radial Fourier series to boundary points that form a radial graph about ``center``."""
        d = np.asarray(points, dtype=complex) - center
        phi = np.unwrap(np.angle(d))
        if phi[-1] < phi[0]:
            phi, d = phi[::-1], d[::-1]
        gap = float(np.angle(d[0] / d[-1]))
        if np.any(np.diff(phi) <= 0) or gap <= 0 or abs(phi[-1] - phi[0] + gap - 2 * np.pi) > 1e-6:
            raise NotStarShaped("boundary angle is not monotone about the center")
        rho = np.abs(d)
        spline = CubicSpline(np.append(phi, phi[0] + 2 * np.pi), np.append(rho, rho[0]), bc_type="periodic")
        nfit = 4 * MAX_MODES * 4
        th = phi[0] + 2 * np.pi * np.arange(nfit) / nfit
        c = np.fft.rfft(spline(th)) / nfit * np.exp(-1j * np.arange(nfit // 2 + 1) * phi[0])
        a = 2 * c.real[:modes]
        b = -2 * c.imag[:modes]
        a[0] = c.real[0]
        return cls(tuple(a), tuple(b), center, m)

    def to_json(self) -> str:
        return json.dumps(
            {
                "center": [self.center.real, self.center.imag],
                "fourier_coeffs": {"cos": list(self.cos), "sin": list(self.sin)},
                "m": self.m,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DomainSpec":
        d = json.loads(text)
        fc = d["fourier_coeffs"]
        return cls(tuple(fc["cos"]), tuple(fc.get("sin", ())), complex(*d["center"]), d["m"])


def boundary_normal(domain: DomainSpec) -> np.ndarray:
    """Outward unit normal at the boundary nodes, from the analytic tangent."""
    return domain.curve().normal


def domain_mask(domain: DomainSpec, grid: PeriodicGrid, sub: int = 4) -> DomainMask:
    """Coverage fraction of the domain in the cell of side h around each node."""
    pts = domain.curve(max(domain.m, 2048)).z
    reach = max(np.abs(pts.real).max(), np.abs(pts.imag).max())
    if reach > grid.L / 4:
        raise DomainTooLarge(f"domain reaches {reach:.4g}, beyond the central half-window {grid.L / 4:.4g}")
    offs = (np.arange(sub) + 0.5) / sub - 0.5
    cov = np.zeros((grid.n, grid.n))
    # only cells near the domain need the subcell test
    rmax = float(np.abs(pts - domain.center).max()) + grid.h
    near = np.abs(grid.z - domain.center) <= rmax
    zc = grid.z[near]
    acc = np.zeros(zc.shape)
    for a in offs:
        for b in offs:
            acc += domain.contains(zc + grid.h * (a + 1j * b))
    cov[near] = acc / sub**2
    return DomainMask(grid, cov, domain)


def bp_norm(domain: DomainSpec, q: float) -> float:
    """Boundary Besov norm of the outward normal, ||N||_{B^{1-1/q}_{q,q}}."""
    if not q > 2:
        raise ValueError(f"q must exceed 2, got {q}")
    curve = domain.curve()
    return besov_boundary_norm(curve, curve.normal, q)


def tangent_angle(curve: BoundaryCurve, m: int = 2048) -> np.ndarray:
    """Unwrapped tangent angle resampled at m equispaced arc-length points (endpoints included)."""
    ang = np.unwrap(np.angle(curve.dz))
    s = np.concatenate([[0.0], np.cumsum(0.5 * (curve.ds + np.roll(curve.ds, -1)))])
    s /= s[-1]
    ang = np.append(ang, ang[0] + 2 * np.pi)
    return np.interp(np.linspace(0, 1, m), s, ang)


def dini_character(domain) -> tuple[float, float]:
    """Dini integral of the tangent angle as a function of normalized arc length, with error bar."""
    curve = domain.curve() if hasattr(domain, "curve") else domain
    return dini_estimate(tangent_angle(curve))
