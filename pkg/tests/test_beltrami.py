import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import beltrami_lab.beltrami as bl
from beltrami_lab.beltrami import (
    BeltramiSolution,
    Dilatation,
    branch_log,
    inverse_jacobian_weight,
    invert_map,
    iteration_cap,
    jacobian_power_at,
    principal_solution,
    resolvent,
    resolvent_domain,
    sigma_field,
)
from beltrami_lab.dilatations import bump, bump_mu, radial_stretch_jacobian, radial_stretch_mu
from beltrami_lab.domains import DomainSpec, domain_mask
from beltrami_lab.errors import (
    EllipticityViolation,
    LogBranchFailure,
    NewtonStall,
    NoConvergence,
    SupportViolation,
)
from beltrami_lab.grid import ComplexField, PeriodicGrid, d_z, d_zbar
from beltrami_lab.harness.common import random_dilatation, random_probe
from beltrami_lab.harness.suites import change_of_variables, radial_stretch_errors

seeds = st.integers(0, 2**32 - 1)
G = PeriodicGrid(128, 4.0)


@pytest.fixture(scope="module")
def bump_sol():
    g = PeriodicGrid(256, 4.0)
    return principal_solution(Dilatation(ComplexField(g, bump_mu(g, 0.3))))


@pytest.fixture(scope="module")
def stretch_sol():
    g = PeriodicGrid(512, 4.0)
    return principal_solution(Dilatation(ComplexField(g, radial_stretch_mu(g, 2.0))))


@pytest.fixture(scope="module")
def zero_sol():
    return principal_solution(Dilatation(G.zeros()))


def test_dilatation_certifies_k():
    mu = Dilatation(ComplexField(G, bump_mu(G, 0.6)))
    assert mu.k == pytest.approx(0.6)
    assert mu.K == pytest.approx(1.6 / 0.4)
    assert mu.support_radius < 1.0


@pytest.mark.parametrize("amp", [1.0, 1.5])
def test_dilatation_ellipticity(amp):
    with pytest.raises(EllipticityViolation):
        Dilatation(ComplexField(G, bump_mu(G, amp)))


def test_dilatation_support():
    with pytest.raises(SupportViolation):
        Dilatation(ComplexField(G, 0.5 * bump(G.z, 1.5)))


def test_dilatation_immutable():
    mu = Dilatation(G.zeros())
    with pytest.raises(AttributeError):
        mu.k = 0.2


@pytest.mark.parametrize("k, cap", [(0.0, 9), (0.5, 42), (0.9, 227)])
def test_iteration_cap(k, cap):
    assert iteration_cap(k, 1e-10) == cap


def test_resolvent_identity_for_zero_mu(rng):
    h = random_probe(G, rng, 1.0)
    x, info = resolvent(Dilatation(G.zeros()), h, full_output=True)
    assert info.iterations == 1
    np.testing.assert_array_equal(x.values, h.values)


@pytest.mark.parametrize("seed", range(4))
def test_resolvent_iterations_k_half(seed):
    rng = np.random.default_rng(seed)
    mu = random_dilatation(G, rng, 0.5)
    h = random_probe(G, rng, 1.5)
    x, info = resolvent(mu, h, 1e-10, full_output=True)
    assert info.iterations <= 36
    res = (x - mu.mu * bl.beurling(x) - h).l2_norm()
    assert res <= 1e-9 * h.l2_norm()


@given(seed=seeds, k=st.floats(0.0, 0.9))
def test_resolvent_norm_bound(seed, k):
    g = PeriodicGrid(32, 4.0)
    rng = np.random.default_rng(seed)
    mu = random_dilatation(g, rng, k)
    h = ComplexField(g, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)))
    x = resolvent(mu, h, 1e-10)
    assert x.l2_norm() <= h.l2_norm() / (1 - mu.k) + 1e-10


@given(seed=seeds, a=st.complex_numbers(max_magnitude=5), b=st.complex_numbers(max_magnitude=5))
def test_resolvent_linear(seed, a, b):
    g = PeriodicGrid(32, 4.0)
    rng = np.random.default_rng(seed)
    mu = random_dilatation(g, rng, 0.6)
    h1, h2 = random_probe(g, rng, 1.5), random_probe(g, rng, 1.5)
    lhs = resolvent(mu, h1 * a + h2 * b, 1e-12)
    rhs = resolvent(mu, h1, 1e-12) * a + resolvent(mu, h2, 1e-12) * b
    scale = (abs(a) + abs(b) + 1) * (h1.l2_norm() + h2.l2_norm())
    assert (lhs - rhs).l2_norm() <= 1e-9 * scale


def test_no_convergence_when_budget_too_small(monkeypatch, rng):
    monkeypatch.setattr(bl, "iteration_cap", lambda k, tol: 2)
    with pytest.raises(NoConvergence):
        resolvent(random_dilatation(G, rng, 0.8), random_probe(G, rng, 1.0))


def test_resolvent_domain_zero_mu(rng):
    mask = domain_mask(DomainSpec.disk(), G)
    h = random_probe(G, rng, 1.5)
    x = resolvent_domain(Dilatation(G.zeros()), h, mask)
    np.testing.assert_array_equal(x.values, h.values * mask.coverage)


def test_resolvent_domain_h_outside_mask(rng):
    mask = domain_mask(DomainSpec.disk(0.5), G)
    mu = Dilatation(ComplexField(G, bump_mu(G, 0.4, radius=0.45)))
    h = ComplexField(G, (mask.coverage == 0) * random_probe(G, rng, 1.0).values)
    assert np.abs(resolvent_domain(mu, h, mask).values).max() == 0


def test_resolvent_domain_support_violation():
    mask = domain_mask(DomainSpec.disk(0.5), G)
    mu = Dilatation(ComplexField(G, bump_mu(G, 0.4, radius=0.9)))
    with pytest.raises(SupportViolation):
        resolvent_domain(mu, mu.mu, mask)


def test_principal_solution_zero(zero_sol):
    assert np.all(zero_sol.dzf.values == 1)
    assert np.all(zero_sol.jac == 1)
    assert np.all(zero_sol.sigma.values == 0)
    np.testing.assert_array_equal(zero_sol.map_values, G.z)


def test_principal_solution_bump_invariants(bump_sol):
    rep = bump_sol.invariant_report()
    assert rep["residual"] <= bump_sol.tol
    assert rep["jac_min"] > 0
    assert rep["distortion_excess"] <= 0
    assert rep["beltrami_excess"] <= 1e-8
    assert rep["twine_error"] <= 1e-10
    assert bump_sol.invariants_hold()


@given(seed=seeds, k=st.floats(0.05, 0.85))
def test_distortion_holds_for_random_dilatations(seed, k):
    g = PeriodicGrid(64, 4.0)
    sol = principal_solution(random_dilatation(g, np.random.default_rng(seed), k))
    assert sol.invariants_hold()


def test_radial_stretch_jacobian_formula():
    z = np.array([0.2, 0.5j, -0.7 + 0.1j])
    s = -0.5
    expect = ((1 + s / 2) ** 2 - (s / 2) ** 2) * np.abs(z) ** (2 * s)
    np.testing.assert_allclose(radial_stretch_jacobian(z, 2.0), expect)


def test_radial_stretch_converges_at_half_order():
    # |z|^(-1/2) at the origin caps the L^2 rate of rho at h^(1/2)
    e = [radial_stretch_errors(n)["rho"] for n in (128, 256, 512)]
    rates = np.log2(np.array(e[:-1]) / np.array(e[1:]))
    np.testing.assert_allclose(rates, 0.5, atol=0.05)


def test_branch_log_detects_winding():
    d = np.ones((4, 4), complex)
    d[2, 2] = -1
    with pytest.raises(LogBranchFailure):
        branch_log(d)
    d[2, 2] = 0
    with pytest.raises(LogBranchFailure):
        branch_log(d)


def test_branch_log_continuous():
    t = np.linspace(0, 6 * np.pi, 64)
    d = np.exp(1j * np.add.outer(np.zeros(3), t))
    np.testing.assert_allclose(branch_log(d).imag[0], t, atol=1e-12)


def test_sigma_zero():
    assert np.all(sigma_field(Dilatation(G.zeros())).values == 0)


def test_sigma_matches_dzf(bump_sol):
    s = sigma_field(bump_sol.mu)
    d = bump_sol.dzf
    assert (ComplexField(d.grid, np.exp(s.values)) - d).l2_norm() / d.l2_norm() <= 1e-6


def test_sigma_equation(bump_sol):
    mu = bump_sol.mu
    s = sigma_field(mu)
    res = d_zbar(s) - mu.mu * d_z(s) - d_z(mu.mu)
    # limited by how well the bump is resolved at 256^2 (7e-10 at 512^2)
    assert res.l2_norm() <= 1e-6 * d_z(mu.mu).l2_norm()


@pytest.mark.parametrize("amp", [0.2, 0.5, 0.8])
def test_sigma_gradient_chain(amp):
    g = PeriodicGrid(256, 4.0)
    mu = Dilatation(ComplexField(g, bump_mu(g, amp)))
    s = sigma_field(mu)
    dmu = d_z(mu.mu).l2_norm()
    dbs = d_zbar(s).l2_norm()
    assert dmu >= (1 - mu.k) * dbs
    assert d_z(s).l2_norm() + dbs <= 2 * dmu / (1 - mu.k)


def test_invert_identity(zero_sol, rng):
    w = rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20)
    np.testing.assert_array_equal(invert_map(zero_sol, w), w)


def test_invert_radial_stretch(stretch_sol):
    w = np.array([0.5, 0.6j, -0.55 - 0.3j, 0.7 * np.exp(2j)])
    z = invert_map(stretch_sol, w)
    np.testing.assert_allclose(np.abs(z), np.abs(w) ** 2, rtol=2e-3)


@given(seed=seeds)
def test_invert_roundtrip(bump_sol, seed):
    rng = np.random.default_rng(seed)
    zz = rng.uniform(-0.9, 0.9, 8) + 1j * rng.uniform(-0.9, 0.9, 8)
    w = bump_sol.evaluate(zz)
    back = bump_sol.evaluate(invert_map(bump_sol, w))
    assert np.abs(back - w).max() <= 1e-8


def test_invert_stalls_far_away(bump_sol):
    with pytest.raises(NewtonStall):
        invert_map(bump_sol, np.array([40.0 + 40j]))


@pytest.mark.parametrize("a", [0.0, 1.0, -2.5])
def test_inverse_weight_trivial(zero_sol, a):
    assert np.all(inverse_jacobian_weight(zero_sol, a, PeriodicGrid(16, 2.0)) == 1)


def test_inverse_weight_a_zero(bump_sol):
    assert np.all(inverse_jacobian_weight(bump_sol, 0.0, PeriodicGrid(16, 2.0)) == 1)


@pytest.mark.slow
def test_inverse_weight_radial():
    g = PeriodicGrid(1024, 4.0)
    sol = principal_solution(Dilatation(ComplexField(g, radial_stretch_mu(g, 2.0))))
    region = PeriodicGrid(32, 2.0)
    r = np.abs(region.z)
    sel = (r >= 0.5) & (r <= 0.8)
    w = inverse_jacobian_weight(sol, 1.0, region, where=sel)
    # |J f^-1|(w) = 2 |w|^2 for K = 2; relative L^2 over the band
    ref = 2 * r[sel] ** 2
    assert np.linalg.norm(w[sel] - ref) / np.linalg.norm(ref) <= 1e-3
    assert np.all(w[~sel] == 1)


def test_jacobian_power_at_matches_nodes(bump_sol):
    g = bump_sol.grid
    idx = (slice(100, 160, 15), slice(90, 170, 20))
    w = bump_sol.map_values[idx]
    np.testing.assert_allclose(jacobian_power_at(bump_sol, -1.0, w), bump_sol.jac[idx], rtol=1e-8)


@pytest.mark.parametrize("t", [-1.0, 0.5, 2.0])
def test_change_of_variables_radial(stretch_sol, t):
    lhs, rhs = change_of_variables(stretch_sol, (0.2 + 0.2j, 0.3), t)
    assert lhs == pytest.approx(rhs, rel=0.02)


def test_solution_roundtrip(bump_sol, tmp_path):
    bump_sol.save(tmp_path / "sol")
    man = json.loads((tmp_path / "sol" / "manifest.json").read_text())
    assert {"k", "K", "tol", "residual", "iterations"} <= set(man)
    back = BeltramiSolution.load(tmp_path / "sol")
    np.testing.assert_array_equal(back.rho.values, bump_sol.rho.values)
    np.testing.assert_array_equal(back.jac, bump_sol.jac)
    assert back.iterations == bump_sol.iterations and back.mu.k == bump_sol.mu.k
