"""Muckenhoupt and reverse-Hoelder characteristics over dyadic cube families."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import NonPositiveWeight, WeightOverflow
from .grid import ComplexField, PeriodicGrid, d_z, d_zbar
from .kernels import box_product

# switch to log-sum-exp averages beyond this log-range of the weight
LOG_RANGE_SWITCH = 30.0
THIRD_SHIFTS = (0.0, 1 / 3, 2 / 3)


@dataclass(frozen=True)
class CubeFamily:
    """Dyadic cubes inside a square base window of the grid.

    Cells are ``[x_j, x_j + h) x [y_k, y_k + h)``; weights should be sampled at
    ``grid.cell_centers``.  The base window covers rows ``row0 .. row0+cells``
    and columns ``col0 .. col0+cells``.  Level j cubes have side cells/2^j;
    each offset t shifts the level-j tiling by round(t * side) cells, keeping
    only cubes that stay inside the base window.
    """

    grid: PeriodicGrid
    row0: int
    col0: int
    cells: int
    levels: tuple = (0,)
    offsets: tuple = (0.0,)
    min_cells: int = 4

    def __post_init__(self):
        n = self.grid.n
        if not (0 <= self.row0 and 0 <= self.col0 and self.row0 + self.cells <= n and self.col0 + self.cells <= n):
            raise ValueError("base window leaves the grid")
        object.__setattr__(self, "levels", tuple(int(j) for j in self.levels))
        object.__setattr__(self, "offsets", tuple(float(t) for t in self.offsets))
        for j in self.levels:
            side, rem = divmod(self.cells, 2**j)
            if j < 0 or rem or side < self.min_cells:
                raise ValueError(f"level {j} does not give cubes of at least {self.min_cells} whole cells")

    @classmethod
    def over(
        cls,
        grid: PeriodicGrid,
        lower_left: complex,
        side: float,
        *,
        levels=None,
        shifted: bool = False,
        min_cells: int = 4,
    ) -> "CubeFamily":
        """Family on the square [lower_left, lower_left + side(1+i)], snapped to the lattice."""
        col0 = int(round((lower_left.real + grid.L / 2) / grid.h))
        row0 = int(round((lower_left.imag + grid.L / 2) / grid.h))
        cells = int(round(side / grid.h))
        if levels is None:
            levels = []
            j = 0
            while cells % 2**j == 0 and cells // 2**j >= min_cells:
                levels.append(j)
                j += 1
        return cls(grid, row0, col0, cells, tuple(levels), THIRD_SHIFTS if shifted else (0.0,), min_cells)

    @classmethod
    def centered(cls, grid: PeriodicGrid, side: float, **kw) -> "CubeFamily":
        return cls.over(grid, complex(-side / 2, -side / 2), side, **kw)

    def groups(self):
        """Yield (level, side, first row, first col, count per axis), all relative to the base window."""
        for j in self.levels:
            s = self.cells // 2**j
            for t in self.offsets:
                sh = int(round(t * s))
                cnt = (self.cells - sh) // s
                if cnt > 0:
                    yield j, s, sh, sh, cnt

    def cubes(self):
        """Arrays (rows, cols, sides, levels) relative to the base window."""
        rows, cols, sides, levs = [], [], [], []
        for j, s, r, c, cnt in self.groups():
            a = np.arange(cnt)
            R, C = np.meshgrid(r + a * s, c + a * s, indexing="ij")
            rows.append(R.ravel())
            cols.append(C.ravel())
            sides.append(np.full(R.size, s))
            levs.append(np.full(R.size, j))
        return tuple(np.concatenate(v).astype(np.int64) for v in (rows, cols, sides, levs))

    def __len__(self):
        return sum(cnt * cnt for *_, cnt in self.groups())

    def corner(self, row: int, col: int) -> complex:
        g = self.grid
        return complex(g.x[self.col0 + col], g.x[self.row0 + row])

    def window(self, a: np.ndarray) -> np.ndarray:
        return a[self.row0 : self.row0 + self.cells, self.col0 : self.col0 + self.cells]


@dataclass(frozen=True)
class ApReport:
    """A characteristic, the cube attaining it, and the per-level maxima."""

    characteristic: float
    corner: complex
    side: float
    p: float
    count: int
    kind: str = "A_p"
    per_level: tuple = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["corner"] = [self.corner.real, self.corner.imag]
        d["per_level"] = [list(r) for r in self.per_level]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ApReport":
        d = json.loads(text)
        d["corner"] = complex(*d["corner"])
        d["per_level"] = tuple(tuple(r) for r in d["per_level"])
        return cls(**d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "side", "characteristic"])
        for row in self.per_level:
            w.writerow([row[0], repr(row[1]), repr(row[2])])
        return buf.getvalue()


def _weight_array(w) -> np.ndarray:
    a = w.values if isinstance(w, ComplexField) else np.asarray(w)
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise NonPositiveWeight("weight has a nonzero imaginary part")
        a = a.real
    return np.asarray(a, dtype=float)


def _table(a: np.ndarray) -> np.ndarray:
    S = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    np.cumsum(np.cumsum(a, axis=0), axis=1, out=S[1:, 1:])
    return S


def _log_means(u: np.ndarray, cubes: CubeFamily) -> np.ndarray:
    """log of cube averages of exp(u), cube order matching ``cubes.cubes()``."""
    out = []
    for _, s, r, c, cnt in cubes.groups():
        blk = u[r : r + cnt * s, c : c + cnt * s].reshape(cnt, s, cnt, s)
        out.append((logsumexp(blk, axis=(1, 3)) - 2 * np.log(s)).ravel())
    return np.concatenate(out)


def _report(vals, cubes: CubeFamily, p, kind) -> ApReport:
    rows, cols, sides, levs = cubes.cubes()
    i = int(np.argmax(vals))
    per_level = tuple(
        (int(j), float(cubes.cells // 2**j * cubes.grid.h), float(vals[levs == j].max())) for j in cubes.levels
    )
    return ApReport(
        float(vals[i]), cubes.corner(rows[i], cols[i]), float(sides[i] * cubes.grid.h), float(p), int(vals.size),
        kind, per_level,
    )


def _log_characteristic(u: np.ndarray, p: float, cubes: CubeFamily) -> np.ndarray:
    return _log_means(u, cubes) + (p - 1) * _log_means(-u / (p - 1), cubes)


def _from_log(lv: np.ndarray) -> np.ndarray:
    if lv.max() > np.log(np.finfo(float).max):
        raise WeightOverflow(f"characteristic exp({lv.max():.1f}) exceeds double range")
    return np.exp(lv)


def ap_characteristic(w, p: float, cubes: CubeFamily, *, log_weight=None) -> ApReport:
    """max over the family of <w>_Q <w^(-1/(p-1))>_Q^(p-1).

    Pass ``log_weight`` (u with w = e^u) instead of ``w`` to stay in log space.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if log_weight is not None:
        u = cubes.window(np.asarray(log_weight, dtype=float))
        if not np.isfinite(u).all():
            raise NonPositiveWeight("log-weight is not finite on the base window")
        if u.max() - u.min() > LOG_RANGE_SWITCH:
            return _report(_from_log(_log_characteristic(u, p, cubes)), cubes, p, "A_p")
        W = np.exp(u)
    else:
        W = cubes.window(_weight_array(w))
        if not (np.isfinite(W).all() and (W > 0).all()):
            raise NonPositiveWeight("weight must be positive and finite on the base window")
        lo, hi = W.min(), W.max()
        if np.log(hi) - np.log(lo) > LOG_RANGE_SWITCH:
            return _report(_from_log(_log_characteristic(np.log(W), p, cubes)), cubes, p, "A_p")
    V = W ** (-1.0 / (p - 1))
    rows, cols, sides, _ = cubes.cubes()
    vals = box_product(_table(W), _table(V), rows, cols, sides, 1.0, p - 1.0)
    return _report(vals, cubes, p, "A_p")


def rh_characteristic(w, s: float, cubes: CubeFamily) -> ApReport:
    """max over the family of <w^s>_Q^(1/s) / <w>_Q."""
    if not s > 1:
        raise ValueError(f"s must exceed 1, got {s}")
    W = cubes.window(_weight_array(w))
    if not (np.isfinite(W).all() and (W > 0).all()):
        raise NonPositiveWeight("weight must be positive and finite on the base window")
    rows, cols, sides, _ = cubes.cubes()
    if s * (np.log(W.max()) - np.log(W.min())) > LOG_RANGE_SWITCH:
        u = np.log(W)
        lv = _log_means(s * u, cubes) / s - _log_means(u, cubes)
        return _report(_from_log(lv), cubes, s, "RH_s")
    vals = box_product(_table(W**s), _table(W), rows, cols, sides, 1.0 / s, -1.0)
    return _report(vals, cubes, s, "RH_s")


@dataclass(frozen=True)
class MoserCertificate:
    lhs: float
    dsigma_l2: float


def moser_certificate(sigma: ComplexField, a: float, p: float, cubes: CubeFamily) -> MoserCertificate:
    """A_p characteristic of |e^(a sigma)| together with ||(d sigma, dbar sigma)||_2."""
    if cubes.grid != sigma.grid:
        raise ValueError("cube family and sigma must share a grid")
    dsig = float(np.sqrt(d_z(sigma).l2_norm() ** 2 + d_zbar(sigma).l2_norm() ** 2))
    if a == 0:
        return MoserCertificate(1.0, dsig)
    u = a * sigma.real
    rep = ap_characteristic(None, p, cubes, log_weight=u)
    return MoserCertificate(rep.characteristic, dsig)


@dataclass(frozen=True)
class AreaDistortion:
    lhs: float
    rhs: float
    ratio: float
    case: str
    P_corner: complex
    P_side: float


def distortion_case(t: float) -> str:
    e = 1 - t
    if e > 1:
        return "1-t>1"
    if e >= 0:
        return "0<=1-t<=1"
    return "1-t<0"


def area_distortion_check(sol, t: float, Q, *, L: float | None = None, samples: int = 128) -> AreaDistortion:
    """<J>_P^(t-1) <J^(1-t)>_P on the bounding square P of f^-1(Q).

    ``Q`` is (lower-left corner, side).  ``L`` is the W^{1,2} norm of mu used for
    the right-hand shape exp((1-t)^2 L^2) / 1 / exp(t(t-1) L^2); computed if omitted.
    """
    from .beltrami import invert_map
    from .norms import NormSpec, sobolev_norm

    corner, side = complex(Q[0]), float(Q[1])
    u = np.linspace(0, 1, 65)[:-1]
    edge = np.concatenate([u, 1 + 1j * u, 1j + 1 - u, 1j * (1 - u)])
    pre = invert_map(sol, corner + side * edge)
    xl, xh, yl, yh = pre.real.min(), pre.real.max(), pre.imag.min(), pre.imag.max()
    ps = max(xh - xl, yh - yl)
    pc = complex((xl + xh - ps) / 2, (yl + yh - ps) / 2)
    v = (np.arange(samples) + 0.5) / samples
    X, Y = np.meshgrid(v, v)
    J = sol.jacobian_at(pc + ps * (X + 1j * Y))
    lhs = float(np.mean(J) ** (t - 1) * np.mean(J ** (1 - t)))
    if L is None:
        L = sobolev_norm(sol.mu.mu, NormSpec(order=1, p=2.0))
    case = distortion_case(t)
    rhs = {"1-t>1": np.exp((1 - t) ** 2 * L**2), "0<=1-t<=1": 1.0, "1-t<0": np.exp(t * (t - 1) * L**2)}[case]
    return AreaDistortion(lhs, float(rhs), lhs / float(rhs), case, pc, float(ps))
