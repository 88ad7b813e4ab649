"""Shared pieces of the experiments: seeded probes, dilatation families, ratio maximization."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..beltrami import Dilatation
from ..dilatations import bump, bump_for_w12, bump_mu
from ..grid import ComplexField, PeriodicGrid


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent deterministic stream for (seed, keys...)."""
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])


def random_probe(grid: PeriodicGrid, rng: np.random.Generator, radius: float, center: complex = 0j, band: int = 4):
    """Random trigonometric polynomial of degree ``band`` times a bump of the given radius."""
    a = np.arange(-band, band + 1)
    A, B = np.meshgrid(a, a, indexing="ij")
    coef = (rng.standard_normal(A.shape) + 1j * rng.standard_normal(A.shape)) / (1 + A**2 + B**2)
    x = grid.x - center.real
    y = grid.x - center.imag
    Ex = np.exp(1j * np.pi * np.outer(a, x) / radius)
    Ey = np.exp(1j * np.pi * np.outer(a, y) / radius)
    # rows are y, columns are x
    poly = Ey.T @ coef.T @ Ex
    return ComplexField(grid, poly * bump(grid.z - center, radius), "probe")


def random_dilatation(grid: PeriodicGrid, rng: np.random.Generator, k: float, radius: float = 1.0) -> Dilatation:
    """Random smooth mu with max |mu| = k exactly, supported in the disk of the given radius."""
    v = random_probe(grid, rng, radius, band=3).values
    return Dilatation(ComplexField(grid, k * v / np.abs(v).max(), "mu"))


def bump_family(grid: PeriodicGrid, targets, amplitude: float | None = None, radius: float = 1.0) -> list[dict]:
    """Bump dilatations with prescribed W^{1,2} norms (see ``bump_for_w12``)."""
    out = []
    for L in targets:
        if L == 0:
            c, om = 0.0, 0.0
        else:
            c, om = bump_for_w12(grid, L, amplitude=amplitude, radius=radius)
        out.append(
            {"L": float(L), "amplitude": c, "omega": om, "mu": Dilatation(ComplexField(grid, bump_mu(grid, c, om, radius), "mu"))}
        )
    return out


def ratio_lower_bound(solve, norm, probes, power_steps: int):
    """max ||solve(h)|| / ||h|| over the probes, then power refinement from the best one."""
    ratios = []
    best, best_h = -np.inf, None
    for h in probes:
        x = solve(h)
        rt = norm(x) / norm(h)
        ratios.append(rt)
        if rt > best:
            best, best_h = rt, h
    h = best_h
    for _ in range(power_steps):
        x = solve(h)
        nx = norm(x)
        rt = nx / norm(h)
        ratios.append(rt)
        best = max(best, rt)
        h = x * (1.0 / nx)
    return float(best), [float(r) for r in ratios]


def map_ordered(fn, items, parallel: bool):
    """``map`` with results in input order, optionally on a thread pool."""
    items = list(items)
    if not parallel or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(fn, items))


def fit_line(x, y):
    """Least-squares slope, intercept and R^2."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + icpt)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), float(r2)
