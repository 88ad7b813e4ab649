"""Beltrami resolvents, principal solutions, sigma = log dzf and map inversion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree

from .errors import (
    EllipticityViolation,
    GridMismatch,
    LogBranchFailure,
    NewtonStall,
    NoConvergence,
    NonZeroMean,
    SupportViolation,
)
from .grid import ComplexField, PeriodicGrid, d_z, read_field, write_field
from .operators import DomainMask, beurling, cauchy, compress_beurling

DEFAULT_TOL = 1e-10
SUPPORT_ATOL = 1e-14
# sigma's dbar has a small periodization mean; anything larger means mu is
# not resolved or leaks out of the window.
SIGMA_MEAN_RTOL = 1e-6


class Dilatation:
    """A Beltrami coefficient with certified sup norm k < 1 and central support."""

    __slots__ = ("mu", "k", "K", "support_radius")

    def __init__(self, mu):
        if not isinstance(mu, ComplexField):
            raise TypeError("Dilatation wraps a ComplexField")
        a = mu.abs()
        k = float(a.max())
        if k >= 1:
            raise EllipticityViolation(f"max |mu| = {k} is not below 1")
        g = mu.grid
        outside = ~g.central_half()
        if outside.any() and a[outside].max() > SUPPORT_ATOL:
            raise SupportViolation("mu does not vanish outside the centered square of side L/2")
        live = a > SUPPORT_ATOL
        rad = float(np.abs(g.z[live]).max()) if live.any() else 0.0
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "K", (1 + k) / (1 - k))
        object.__setattr__(self, "support_radius", rad)

    def __setattr__(self, key, value):
        raise AttributeError("Dilatation is immutable")

    @classmethod
    def from_array(cls, grid: PeriodicGrid, values, name: str = "mu") -> "Dilatation":
        return cls(ComplexField(grid, values, name))

    @property
    def grid(self) -> PeriodicGrid:
        return self.mu.grid

    def __repr__(self):
        return f"Dilatation(k={self.k:.6g}, K={self.K:.6g}, n={self.grid.n}, L={self.grid.L})"


@dataclass(frozen=True)
class SolveInfo:
    iterations: int
    residual: float  # final step size relative to ||h||


def iteration_cap(k: float, tol: float) -> int:
    """ceil(log tol / log k) + 8; the k-geometric budget of the Neumann series."""
    if k <= 0:
        return 9
    return int(math.ceil(math.log(tol) / math.log(k))) + 8


def _neumann(mu: Dilatation, h: ComplexField, tol: float, apply_s, h_eff: np.ndarray):
    if mu.grid != h.grid:
        raise GridMismatch(f"mu on {mu.grid}, h on {h.grid}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    hnorm = np.linalg.norm(h_eff)
    if hnorm == 0:
        return np.zeros_like(h_eff), SolveInfo(0, 0.0)
    m = mu.mu.values
    cap = iteration_cap(mu.k, tol)
    x = h_eff
    step = np.inf
    for it in range(1, cap + 1):
        xn = h_eff + m * apply_s(x)
        step = np.linalg.norm(xn - x) / hnorm
        x = xn
        if step <= tol:
            return x, SolveInfo(it, float(step))
    raise NoConvergence(f"no convergence in {cap} iterations (k={mu.k:.4g}, last step {step:.3e})")


def resolvent(mu: Dilatation, h: ComplexField, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Solve x - mu S x = h by the iteration x <- h + mu S x.

    With ``full_output`` returns ``(x, SolveInfo)``.
    """
    g = h.grid
    x, info = _neumann(mu, h, tol, lambda v: beurling(ComplexField(g, v)).values, h.values)
    out = ComplexField(g, x, "resolvent")
    return (out, info) if full_output else out


def resolvent_domain(
    mu: Dilatation, h: ComplexField, mask: DomainMask, tol: float = DEFAULT_TOL, *, full_output: bool = False
):
    """Solve x - mu S_Omega x = 1_Omega h with the compressed transform."""
    if mask.grid != h.grid or mask.grid != mu.grid:
        raise GridMismatch("mu, h and mask must share a grid")
    outside = mask.coverage == 0
    if outside.any() and mu.mu.abs()[outside].max() > SUPPORT_ATOL:
        raise SupportViolation("mu is nonzero outside the domain mask")
    g = h.grid
    x, info = _neumann(
        mu, h, tol, lambda v: compress_beurling(ComplexField(g, v), mask).values, h.values * mask.coverage
    )
    out = ComplexField(g, x, "resolvent_domain")
    return (out, info) if full_output else out


def branch_log(d: np.ndarray) -> np.ndarray:
    """log d continued along column 0 from the corner, then along every row."""
    d = np.asarray(d, dtype=complex)
    if (d == 0).any():
        raise LogBranchFailure("dzf vanishes on the grid")
    inc_col = np.log(d[1:, 0] / d[:-1, 0])
    inc_row = np.log(d[:, 1:] / d[:, :-1])
    worst = max(np.abs(inc_col).max(initial=0), np.abs(inc_row).max(initial=0))
    if not worst < np.pi:
        raise LogBranchFailure(f"log increment {worst:.3f} between neighbours reaches pi")
    col = np.log(d[0, 0]) + np.concatenate([[0], np.cumsum(inc_col)])
    rows = np.concatenate([np.zeros((d.shape[0], 1)), np.cumsum(inc_row, axis=1)], axis=1)
    arg = (col[:, None] + rows).imag
    return np.log(np.abs(d)) + 1j * arg


def _spline(grid: PeriodicGrid, values: np.ndarray) -> RectBivariateSpline:
    # values[k, j] lives at (x_j, y_k); the spline wants f(x_i, y_j).
    return RectBivariateSpline(grid.x, grid.x, values.T, kx=3, ky=3, s=0)


class BeltramiSolution:
    """The principal solution f = z + K(rho) with its derivative fields.

    On the torus the map is represented as  f = z + mean(rho) zbar + K(rho - mean(rho)),
    which keeps dbar f = rho and d f = 1 + S rho exactly.
    """

    def __init__(self, mu, rho, dzf, sigma, jac, residual, iterations, tol):
        self.mu = mu
        self.rho = rho
        self.dzf = dzf
        self.sigma = sigma
        self.jac = np.asarray(jac, dtype=float)
        self.jac.setflags(write=False)
        self.residual = float(residual)
        self.iterations = int(iterations)
        self.tol = float(tol)

    @property
    def grid(self) -> PeriodicGrid:
        return self.mu.grid

    @cached_property
    def mean_rho(self) -> complex:
        return self.rho.mean()

    @cached_property
    def periodic_part(self) -> ComplexField:
        return cauchy(self.rho - self.mean_rho)

    @cached_property
    def map_values(self) -> np.ndarray:
        """f at the grid nodes."""
        z = self.grid.z
        return z + self.mean_rho * np.conj(z) + self.periodic_part.values

    @cached_property
    def _splines(self):
        p = self.periodic_part.values
        g = self.grid
        return _spline(g, p.real), _spline(g, p.imag), _spline(g, np.log(self.jac))

    @cached_property
    def _tree(self):
        return cKDTree(np.column_stack([self.map_values.real.ravel(), self.map_values.imag.ravel()]))

    def _clip(self, z):
        lo, hi = self.grid.x[0], self.grid.x[-1]
        return np.clip(z.real, lo, hi) + 1j * np.clip(z.imag, lo, hi)

    def evaluate(self, z) -> np.ndarray:
        """f at arbitrary points of the window (bicubic interpolation of the periodic part)."""
        z = np.asarray(z, dtype=complex)
        sr, si, _ = self._splines
        x, y = z.real.ravel(), z.imag.ravel()
        p = sr.ev(x, y) + 1j * si.ev(x, y)
        return (z.ravel() + self.mean_rho * np.conj(z.ravel()) + p).reshape(z.shape)

    def derivatives(self, z):
        """(d f, dbar f) of the interpolated map at arbitrary points."""
        z = np.asarray(z, dtype=complex).ravel()
        sr, si, _ = self._splines
        x, y = z.real, z.imag
        px = sr.ev(x, y, dx=1) + 1j * si.ev(x, y, dx=1)
        py = sr.ev(x, y, dy=1) + 1j * si.ev(x, y, dy=1)
        return 1 + 0.5 * (px - 1j * py), self.mean_rho + 0.5 * (px + 1j * py)

    def jacobian_at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        _, _, sj = self._splines
        return np.exp(sj.ev(z.real.ravel(), z.imag.ravel())).reshape(z.shape)

    def invariant_report(self) -> dict:
        """Measured slack of every structural invariant (all should be <= 0 or small)."""
        d, r = self.dzf.values, self.rho.values
        ad, ar = np.abs(d), np.abs(r)
        twine = np.abs(d - 1 - beurling(self.rho).values).max()
        return {
            "twine_error": float(twine),
            "beltrami_excess": float((ar - self.mu.k * ad).max()),
            "jac_min": float(self.jac.min()),
            "distortion_excess": float((ad + ar - np.sqrt(self.mu.K * self.jac) * (1 + 1e-6)).max()),
            "residual": self.residual,
        }

    def invariants_hold(self) -> bool:
        rep = self.invariant_report()
        return (
            rep["twine_error"] <= 1e-10
            and rep["beltrami_excess"] <= 1e-8
            and rep["jac_min"] > 0
            and rep["distortion_excess"] <= 0
            and rep["residual"] <= self.tol
        )

    def save(self, directory) -> None:
        """Write field dumps and manifest.json into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        g = self.grid
        for name, f in [
            ("mu", self.mu.mu),
            ("rho", self.rho),
            ("dzf", self.dzf),
            ("sigma", self.sigma),
            ("jac", ComplexField(g, self.jac)),
        ]:
            write_field(directory / f"{name}.field", f.with_name(name))
        manifest = {
            "k": self.mu.k,
            "K": self.mu.K,
            "tol": self.tol,
            "residual": self.residual,
            "iterations": self.iterations,
            "n": g.n,
            "L": g.L,
        }
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, directory) -> "BeltramiSolution":
        directory = Path(directory)
        man = json.loads((directory / "manifest.json").read_text())
        f = {name: read_field(directory / f"{name}.field") for name in ("mu", "rho", "dzf", "sigma", "jac")}
        return cls(
            Dilatation(f["mu"]), f["rho"], f["dzf"], f["sigma"], f["jac"].real.copy(),
            man["residual"], man["iterations"], man["tol"],
        )


def principal_solution(mu: Dilatation, tol: float = DEFAULT_TOL) -> BeltramiSolution:
    """rho = (I - mu S)^{-1} mu, dzf = 1 + S rho, sigma = log dzf, jac = |dzf|^2 - |rho|^2."""
    rho, info = resolvent(mu, mu.mu, tol, full_output=True)
    dzf = 1 + beurling(rho)
    sigma = ComplexField(mu.grid, branch_log(dzf.values), "sigma")
    jac = np.abs(dzf.values) ** 2 - np.abs(rho.values) ** 2
    mnorm = mu.mu.l2_norm()
    residual = (rho - mu.mu * dzf).l2_norm() / mnorm if mnorm > 0 else 0.0
    return BeltramiSolution(
        mu, rho.with_name("rho"), dzf.with_name("dzf"), sigma, jac, residual, info.iterations, tol
    )


def sigma_field(mu: Dilatation, tol: float = DEFAULT_TOL) -> ComplexField:
    """Solve dbar sigma = mu d sigma + d mu via (I - mu S) dbar sigma = d mu.

    The additive constant is fixed so that mean(exp sigma) = 1, which is what
    d f = 1 + S rho satisfies on the torus.
    """
    x = resolvent(mu, d_z(mu.mu), tol)
    m = x.mean()
    sup = x.sup_norm()
    if sup == 0:
        return mu.grid.zeros("sigma")
    if abs(m) > SIGMA_MEAN_RTOL * sup:
        raise NonZeroMean(f"dbar sigma has mean {abs(m):.3e}; mu is under-resolved or not compactly supported")
    s0 = cauchy(x - m)
    c = -np.log(np.mean(np.exp(s0.values)))
    return ComplexField(mu.grid, s0.values + c, "sigma")


NEWTON_MAX_ITER = 100


def invert_map(sol: BeltramiSolution, targets, *, atol: float | None = None) -> np.ndarray:
    """Damped Newton solve of f(z) = w for every target w."""
    w = np.asarray(targets, dtype=complex)
    shape = w.shape
    w = w.ravel()
    if atol is None:
        atol = 1e-9 * sol.grid.L
    if np.all(sol.mu.mu.values == 0):
        return w.reshape(shape).copy()
    _, idx = sol._tree.query(np.column_stack([w.real, w.imag]))
    z = sol.grid.z.ravel()[idx].astype(complex)
    res = w - sol.evaluate(z)
    for _ in range(NEWTON_MAX_ITER):
        act = np.flatnonzero(np.abs(res) > atol)
        if act.size == 0:
            return z.reshape(shape)
        a, b = sol.derivatives(z[act])
        r = res[act]
        step = (np.conj(a) * r - b * np.conj(r)) / (np.abs(a) ** 2 - np.abs(b) ** 2)
        cur = np.abs(r)
        trial = sol._clip(z[act] + step)
        rt = w[act] - sol.evaluate(trial)
        for _ in range(30):
            worse = np.abs(rt) > cur
            if not worse.any():
                break
            step[worse] *= 0.5
            trial[worse] = sol._clip(z[act][worse] + step[worse])
            rt[worse] = w[act][worse] - sol.evaluate(trial[worse])
        z[act] = trial
        res[act] = rt
    bad = int(np.count_nonzero(np.abs(res) > atol))
    if bad == 0:
        return z.reshape(shape)
    raise NewtonStall(f"{bad} of {w.size} targets unresolved after {NEWTON_MAX_ITER} Newton steps")


def jacobian_power_at(sol: BeltramiSolution, a: float, w_points) -> np.ndarray:
    """|J f^{-1}(w)|^a = |J f(f^{-1}(w))|^{-a} at arbitrary image points."""
    w = np.asarray(w_points, dtype=complex)
    if a == 0:
        return np.ones(w.shape)
    z = invert_map(sol, w)
    return sol.jacobian_at(z) ** (-a)


def inverse_jacobian_weight(
    sol: BeltramiSolution, a: float, region_grid: PeriodicGrid, *, at: str = "nodes", where=None
) -> np.ndarray:
    """Sample |J f^{-1}|^a on ``region_grid`` nodes or cell centers.

    ``where`` restricts the (costly) inversion to a boolean subset; other
    samples are set to 1.
    """
    if at == "nodes":
        pts = region_grid.z
    elif at == "centers":
        pts = region_grid.cell_centers
    else:
        raise ValueError(f"at must be 'nodes' or 'centers', got {at!r}")
    out = np.ones(pts.shape)
    sel = np.ones(pts.shape, bool) if where is None else np.asarray(where, bool)
    if a != 0 and sel.any():
        out[sel] = jacobian_power_at(sol, a, pts[sel])
    return out
