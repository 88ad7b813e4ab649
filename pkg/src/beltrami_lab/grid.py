"""Periodic square grids, complex fields and spectral Wirtinger derivatives."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from .errors import GridMismatch, NonFiniteField


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PeriodicGrid:
    """An n x n lattice on the square window [-L/2, L/2)^2 with periodic wrap.

    Sample (row k, column j) sits at ``x_j + i y_k`` with ``x_j = -L/2 + j h``.
    Arrays indexed ``[k, j]`` therefore have y along axis 0 and x along axis 1.
    """

    n: int
    L: float

    def __post_init__(self):
        n = int(self.n)
        if n != self.n or n < 16 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {self.n!r}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"window side must be positive, got {self.L!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @cached_property
    def x(self) -> np.ndarray:
        """1-D node coordinates along either axis."""
        return _frozen(-self.L / 2 + self.h * np.arange(self.n))

    @cached_property
    def z(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.x)
        return _frozen(X + 1j * Y)

    @cached_property
    def cell_centers(self) -> np.ndarray:
        """Midpoints of the cells ``[x_j, x_j + h) x [y_k, y_k + h)``."""
        return _frozen(self.z + 0.5 * self.h * (1 + 1j))

    @cached_property
    def signed_freqs(self) -> np.ndarray:
        """Integer frequencies in (-n/2, n/2], in FFT order."""
        j = np.arange(self.n)
        return _frozen(np.where(j > self.n // 2, j - self.n, j))

    @cached_property
    def xi(self) -> np.ndarray:
        """Complex frequency xi_x + i xi_y on the FFT lattice."""
        k = 2 * np.pi / self.L * self.signed_freqs
        KX, KY = np.meshgrid(k, k)
        return _frozen(KX + 1j * KY)

    @cached_property
    def nyquist(self) -> np.ndarray:
        """Boolean mask of the +n/2 row and column."""
        s = self.signed_freqs == self.n // 2
        return _frozen(s[None, :] | s[:, None])

    @cached_property
    def dz_symbol(self) -> np.ndarray:
        m = 0.5j * np.conj(self.xi)
        m[self.nyquist] = 0
        return _frozen(m)

    @cached_property
    def dzbar_symbol(self) -> np.ndarray:
        m = 0.5j * self.xi
        m[self.nyquist] = 0
        return _frozen(m)

    def central_half(self) -> np.ndarray:
        """Boolean mask of nodes inside the centered square of side L/2."""
        q = self.L / 4 * (1 + 1e-12)
        return (np.abs(self.z.real) <= q) & (np.abs(self.z.imag) <= q)

    def field(self, values, name: str = "") -> "ComplexField":
        return ComplexField(self, values, name)

    def zeros(self, name: str = "") -> "ComplexField":
        return ComplexField(self, np.zeros((self.n, self.n), complex), name)

    def ones(self, name: str = "") -> "ComplexField":
        return ComplexField(self, np.ones((self.n, self.n), complex), name)


class ComplexField:
    """Immutable complex samples on a :class:`PeriodicGrid`.

    Arithmetic works with scalars, ``(n, n)`` arrays and fields on the same
    grid; mixing grids raises :class:`GridMismatch`.
    """

    __slots__ = ("grid", "values", "name")

    def __init__(self, grid: PeriodicGrid, values, name: str = ""):
        arr = np.array(values, dtype=np.complex128)
        if arr.shape != (grid.n, grid.n):
            if arr.size != grid.n * grid.n:
                raise ValueError(f"expected {grid.n}x{grid.n} samples, got shape {arr.shape}")
            arr = arr.reshape(grid.n, grid.n)
        if not np.isfinite(arr).all():
            raise NonFiniteField(f"field {name!r} has non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "name", name)

    def __setattr__(self, key, value):
        raise AttributeError("ComplexField is immutable")

    def __repr__(self):
        return f"ComplexField(n={self.grid.n}, L={self.grid.L}, name={self.name!r})"

    def _other(self, other):
        if isinstance(other, ComplexField):
            if other.grid != self.grid:
                raise GridMismatch(f"{self.grid} vs {other.grid}")
            return other.values
        return other

    def _wrap(self, values):
        return ComplexField(self.grid, values)

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __neg__(self):
        return self._wrap(-self.values)

    def conj(self) -> "ComplexField":
        return self._wrap(np.conj(self.values))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def mean(self) -> complex:
        return complex(self.values.mean())

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_area))

    def pairing(self, other) -> complex:
        """Bilinear pairing  sum f g h^2  (no conjugation)."""
        return complex(np.sum(self.values * self._other(other)) * self.grid.cell_area)

    def with_name(self, name: str) -> "ComplexField":
        return ComplexField(self.grid, self.values, name)


def _check_field(f):
    if not isinstance(f, ComplexField):
        raise TypeError(f"expected ComplexField, got {type(f).__name__}")


def fourier_forward(f: ComplexField) -> np.ndarray:
    """Unnormalized 2-D DFT of the samples."""
    _check_field(f)
    return sfft.fft2(f.values)


def fourier_inverse(spectrum: np.ndarray, grid: PeriodicGrid, name: str = "") -> ComplexField:
    """Inverse of :func:`fourier_forward` (carries the 1/n^2 factor)."""
    return ComplexField(grid, sfft.ifft2(spectrum), name)


def apply_multiplier(f: ComplexField, symbol: np.ndarray) -> ComplexField:
    """Return the field whose Fourier coefficients are ``symbol * f^``."""
    _check_field(f)
    return ComplexField(f.grid, sfft.ifft2(sfft.fft2(f.values) * symbol))


def d_z(f: ComplexField) -> ComplexField:
    """Spectral Wirtinger derivative  d/dz = (d/dx - i d/dy)/2."""
    return apply_multiplier(f, f.grid.dz_symbol)


def d_zbar(f: ComplexField) -> ComplexField:
    """Spectral Wirtinger derivative  d/dzbar = (d/dx + i d/dy)/2."""
    return apply_multiplier(f, f.grid.dzbar_symbol)


def write_field(path, f: ComplexField) -> None:
    """Write a one-line JSON header followed by little-endian (re, im) float64 pairs."""
    path = Path(path)
    header = json.dumps({"n": f.grid.n, "L": f.grid.L, "name": f.name}, sort_keys=True)
    try:
        with open(path, "wb") as fh:
            fh.write(header.encode("utf-8") + b"\n")
            fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write field dump {path}: {exc}") from exc


def read_field(path) -> ComplexField:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read field dump {path}: {exc}") from exc
    cut = raw.index(b"\n")
    header = json.loads(raw[:cut].decode("utf-8"))
    grid = PeriodicGrid(int(header["n"]), float(header["L"]))
    body = np.frombuffer(raw[cut + 1 :], dtype="<c16")
    if body.size != grid.n * grid.n:
        raise ValueError(f"{path}: expected {grid.n ** 2} samples, found {body.size}")
    return ComplexField(grid, body.reshape(grid.n, grid.n), header.get("name", ""))
