import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_lab.errors import GridMismatch, NonFiniteField
from beltrami_lab.grid import (
    ComplexField,
    PeriodicGrid,
    d_z,
    d_zbar,
    fourier_forward,
    fourier_inverse,
    read_field,
    write_field,
)
from oracles import lambdify_z, wirtinger, z_, zb_

import sympy as sp

seeds = st.integers(0, 2**32 - 1)


def _random(grid, seed):
    rng = np.random.default_rng(seed)
    return ComplexField(grid, rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n)))


@pytest.mark.parametrize("n", [0, 8, 15, 48, 100])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        PeriodicGrid(n, 1.0)


@pytest.mark.parametrize("L", [0.0, -1.0, float("inf")])
def test_grid_rejects_bad_window(L):
    with pytest.raises(ValueError):
        PeriodicGrid(16, L)


def test_nodes_and_frequencies():
    g = PeriodicGrid(16, 4.0)
    assert g.h == 0.25
    assert g.z[0, 0] == complex(-2, -2)
    assert g.z[3, 5] == complex(-2 + 5 * 0.25, -2 + 3 * 0.25)
    f = g.signed_freqs
    assert f.min() == -7 and f.max() == 8
    assert g.xi[0, 1] == pytest.approx(2 * np.pi / 4)
    assert g.xi[1, 0] == pytest.approx(2j * np.pi / 4)
    assert g.nyquist.sum() == 2 * 16 - 1


def test_grid_arrays_read_only(grid64):
    with pytest.raises(ValueError):
        grid64.z[0, 0] = 1


def test_derivatives_of_constant_vanish(grid64):
    one = grid64.ones()
    assert np.abs(d_z(one).values).max() == 0
    assert np.abs(d_zbar(one).values).max() == 0


def test_dzbar_gaussian(grid256):
    f = sp.exp(-z_ * zb_)
    _, dbar = wirtinger(f)
    g = ComplexField(grid256, lambdify_z(f)(grid256.z))
    ref = lambdify_z(dbar)(grid256.z)
    err = np.linalg.norm(d_zbar(g).values - ref) / np.linalg.norm(ref)
    assert err <= 1e-8


def test_dz_z_gaussian(grid256):
    f = z_ * sp.exp(-z_ * zb_)
    dz, _ = wirtinger(f)
    assert sp.simplify(dz - (1 - z_ * zb_) * sp.exp(-z_ * zb_)) == 0
    g = ComplexField(grid256, lambdify_z(f)(grid256.z))
    ref = lambdify_z(dz)(grid256.z)
    err = np.linalg.norm(d_z(g).values - ref) / np.linalg.norm(ref)
    assert err <= 1e-8


@given(seed=seeds)
def test_fourier_roundtrip(seed):
    g = PeriodicGrid(32, 3.0)
    f = _random(g, seed)
    back = fourier_inverse(fourier_forward(f), g)
    assert np.abs(back.values - f.values).max() <= 1e-12


def test_constant_spectrum_at_zero(grid64):
    spec = fourier_forward(grid64.ones() * 2.5)
    assert spec[0, 0] == pytest.approx(2.5 * 64**2)
    spec[0, 0] = 0
    assert np.abs(spec).max() <= 1e-9


def test_parseval(grid64, rng):
    f = _random(grid64, 7)
    spec = fourier_forward(f)
    lhs = np.sum(np.abs(f.values) ** 2) * grid64.h**2
    rhs = np.sum(np.abs(spec) ** 2) / grid64.n**2 * grid64.h**2
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(seed=seeds)
def test_derivatives_commute(seed):
    f = _random(PeriodicGrid(32, 2.0), seed)
    np.testing.assert_allclose(d_z(d_zbar(f)).values, d_zbar(d_z(f)).values, atol=1e-12 * 32**2)


@given(seed=seeds)
def test_conjugation_swaps_derivatives(seed):
    f = _random(PeriodicGrid(32, 2.0), seed)
    np.testing.assert_allclose(d_z(f.conj()).values, np.conj(d_zbar(f).values), atol=1e-10)


@given(seed=seeds, a=st.complex_numbers(max_magnitude=10), b=st.complex_numbers(max_magnitude=10))
def test_linearity(seed, a, b):
    g = PeriodicGrid(16, 1.0)
    f, h = _random(g, seed), _random(g, seed + 1)
    for op in (d_z, d_zbar):
        lhs = op(f * a + h * b).values
        rhs = a * op(f).values + b * op(h).values
        assert np.abs(lhs - rhs).max() <= 1e-11 * (1 + abs(a) + abs(b)) * 16**2


def test_field_is_immutable(grid64):
    f = grid64.ones()
    with pytest.raises(AttributeError):
        f.values = None
    with pytest.raises(ValueError):
        f.values[0, 0] = 3


def test_non_finite_rejected(grid64):
    v = np.zeros((64, 64), complex)
    v[3, 3] = np.nan
    with pytest.raises(NonFiniteField):
        ComplexField(grid64, v)


def test_mixed_grids_rejected():
    a = PeriodicGrid(16, 1.0).ones()
    b = PeriodicGrid(16, 2.0).ones()
    with pytest.raises(GridMismatch):
        a + b


def test_field_dump_roundtrip(tmp_path):
    g = PeriodicGrid(32, 5.0)
    f = _random(g, 3).with_name("probe")
    write_field(tmp_path / "f.bin", f)
    raw = (tmp_path / "f.bin").read_bytes()
    head, body = raw.split(b"\n", 1)
    assert json.loads(head) == {"L": 5.0, "n": 32, "name": "probe"}
    assert len(body) == 32 * 32 * 16
    back = read_field(tmp_path / "f.bin")
    assert back.grid == g and back.name == "probe"
    assert back.values.tobytes() == f.values.tobytes()


def test_field_dump_truncated(tmp_path):
    g = PeriodicGrid(16, 1.0)
    write_field(tmp_path / "f.bin", g.ones())
    data = (tmp_path / "f.bin").read_bytes()
    (tmp_path / "g.bin").write_bytes(data[:-16])
    with pytest.raises(ValueError, match="expected 256"):
        read_field(tmp_path / "g.bin")


def test_missing_dump_names_path(tmp_path):
    with pytest.raises(OSError, match="nope.bin"):
        read_field(tmp_path / "nope.bin")
