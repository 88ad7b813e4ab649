import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_lab.domains import DomainSpec, domain_mask
from beltrami_lab.errors import DegenerateBoundary, NonPositiveWeight
from beltrami_lab.grid import ComplexField, PeriodicGrid
from beltrami_lab.norms import NormSpec, besov_boundary_norm, dini_estimate, dini_norm, lp_norm, sobolev_norm
from conftest import smooth_field
from oracles import gaussian_w12_norm

seeds = st.integers(0, 2**32 - 1)
G = PeriodicGrid(128, 8.0)


def test_constant_has_zero_gradient():
    assert sobolev_norm(G.ones() * 3, NormSpec(order=1, p=3), homogeneous=True) == 0


def test_unit_weight_is_bitwise_unweighted(rng):
    f = smooth_field(G, rng)
    mask = domain_mask(DomainSpec.disk(1.5), G)
    a = sobolev_norm(f, NormSpec(1, 2.5, mask))
    b = sobolev_norm(f, NormSpec(1, 2.5, mask, np.ones((G.n, G.n))))
    assert a == b


def test_gaussian_w12_against_symbolic():
    g = PeriodicGrid(256, 16.0)
    f = ComplexField(g, np.exp(-np.abs(g.z) ** 2))
    assert sobolev_norm(f, NormSpec(order=1, p=2.0)) == pytest.approx(gaussian_w12_norm(), rel=1e-8)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_region_monotone(order, rng):
    f = smooth_field(G, rng)
    small = domain_mask(DomainSpec.disk(0.8), G)
    big = domain_mask(DomainSpec.disk(1.6), G)
    a = sobolev_norm(f, NormSpec(order, 3.0, small))
    b = sobolev_norm(f, NormSpec(order, 3.0, big))
    c = sobolev_norm(f, NormSpec(order, 3.0))
    assert a <= b <= c


@given(seed=seeds, p=st.floats(1.0, 6.0))
def test_triangle_inequality(seed, p):
    g = PeriodicGrid(32, 4.0)
    rng = np.random.default_rng(seed)
    f, h = smooth_field(g, rng), smooth_field(g, rng)
    spec = NormSpec(1, p)
    assert sobolev_norm(f + h, spec) <= sobolev_norm(f, spec) + sobolev_norm(h, spec) + 1e-10


def test_homogeneous_is_top_block(rng):
    f = smooth_field(G, rng)
    full = sobolev_norm(f, NormSpec(1, 2.0))
    top = sobolev_norm(f, NormSpec(1, 2.0), homogeneous=True)
    assert full == pytest.approx(top + lp_norm(f.values, 2.0, G), rel=1e-14)


def test_weight_must_be_positive_on_region():
    w = np.ones((G.n, G.n))
    w[64, 64] = 0
    with pytest.raises(NonPositiveWeight):
        NormSpec(0, 2.0, None, w)
    mask = domain_mask(DomainSpec.disk(0.5), G)
    w2 = np.where(mask.coverage > 0, 1.0, -1.0)
    NormSpec(0, 2.0, mask, w2)


@pytest.mark.parametrize("kw", [dict(order=-1), dict(order=1.5), dict(p=0.5), dict(p=np.inf)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        NormSpec(**kw)


def test_dini_constant():
    assert dini_norm(np.full(128, 2.0)) == 0


def test_dini_linear():
    assert dini_norm(lambda x: x, 1025) == pytest.approx(1.0, rel=0.02)


def _direct_dini_sqrt(m=200_001, nt=400):
    # fine direct evaluation: modulus of sqrt at log-spaced widths, trapezoid in log t
    x = np.linspace(0, 1, m)
    f = np.sqrt(x)
    ks = np.unique(np.geomspace(1, m - 1, nt).astype(int))
    om = np.array([np.max(f[k:] - f[:-k]) for k in ks])
    t = ks / (m - 1)
    body = np.trapezoid(om, np.log(t))
    return body + om[0] / 0.5


def test_dini_sqrt():
    value, tail = dini_estimate(np.sqrt, 1025)
    assert value == pytest.approx(_direct_dini_sqrt(), rel=0.02)
    assert 0 < tail < 0.1


def test_dini_needs_samples():
    with pytest.raises(ValueError):
        dini_norm(np.zeros(10))
    with pytest.raises(ValueError):
        dini_norm(np.sqrt)


def test_besov_constant_zero():
    c = DomainSpec.ellipse(1.5, 1).curve()
    assert besov_boundary_norm(c, np.full(c.m, 2 + 1j), 3) == 0


@pytest.mark.parametrize("q", [2.5, 3.0, 6.0])
def test_besov_circle(q):
    c = DomainSpec.disk().curve()
    th = c.theta
    assert besov_boundary_norm(c, np.exp(1j * th), q) == pytest.approx((4 * np.pi**2) ** (1 / q), rel=1e-12)


@given(seed=seeds)
def test_besov_homogeneous(seed):
    c = DomainSpec.perturbed_disk(0.1, m=128).curve()
    rng = np.random.default_rng(seed)
    f = np.fft.ifft(np.fft.fft(rng.standard_normal(128)) * (np.abs(np.fft.fftfreq(128, 1 / 128)) < 6))
    assert besov_boundary_norm(c, f / 2, 3) == pytest.approx(besov_boundary_norm(c, f, 3) / 2, rel=1e-14)


def test_besov_degenerate():
    c = DomainSpec.disk().curve(64)
    z = c.z.copy()
    z[10] = z[20]
    from beltrami_lab.domains import BoundaryCurve

    with pytest.raises(DegenerateBoundary):
        besov_boundary_norm(BoundaryCurve(z, c.dz), np.exp(1j * c.theta), 3)


def test_besov_argument_checks():
    c = DomainSpec.disk().curve(64)
    with pytest.raises(ValueError):
        besov_boundary_norm(c, np.ones(63), 3)
    with pytest.raises(ValueError):
        besov_boundary_norm(c, np.ones(64), 1.0)
