import numpy as np
import pytest

from genjac import elliptic as ell
from genjac.errors import AccuracyError, CapabilityError, DomainError, PathError, PoleError
from genjac.lattice import Lattice
from conftest import random_point, random_tau
from oracles import richardson_g2, theta_eta1, theta_invariants, theta_sigma, theta_wp, theta_zeta

TAUS = [1j, np.exp(2j * np.pi / 3), 0.2 + 1.1j, -0.45 + 0.93j, 3.3 + 0.4j, 0.5 + 2.5j]


@pytest.mark.parametrize("tau", TAUS)
def test_invariants_against_theta_oracle(tau):
    ctx = ell.make_context(tau)
    g2, g3, *_ = theta_invariants(tau)
    assert abs(ctx.g2 - g2) < 1e-10 * max(1, abs(g2))
    assert abs(ctx.g3 - g3) < 1e-10 * max(1, abs(g3))
    assert abs(ctx.eta1 - theta_eta1(tau)) < 1e-10 * max(1, abs(ctx.eta1))


@pytest.mark.parametrize("tau", [1j, 0.2 + 1.1j, -0.45 + 0.93j])
def test_g2_against_lattice_sum(tau):
    ctx = ell.make_context(tau)
    assert abs(richardson_g2(tau, 120) - ctx.g2) < 1e-6 * abs(ctx.g2)


def test_special_invariants_vanish():
    assert abs(ell.make_context(1j).g3) < 1e-9
    assert abs(ell.make_context(np.exp(2j * np.pi / 3)).g2) < 1e-9


@pytest.mark.parametrize("tau", TAUS)
def test_functions_against_theta_oracle(tau):
    ctx = ell.make_context(tau)
    rng = np.random.default_rng(3)
    for _ in range(5):
        z = rng.uniform(-1, 2) + rng.uniform(-1, 2) * tau
        ref = theta_wp(tau, z)
        assert abs(ell.wp(ctx, z) - ref) < 1e-9 * max(1, abs(ref))
        ref = theta_sigma(tau, z)
        assert abs(ell.sigma_fn(ctx, z) - ref) < 1e-9 * max(1, abs(ref))
        ref = theta_zeta(tau, z)
        assert abs(ell.zeta_fn(ctx, z) - ref) < 1e-9 * max(1, abs(ref))


@pytest.mark.parametrize("tau", TAUS)
def test_legendre_and_ode(tau):
    ctx = ell.make_context(tau)
    assert ctx.legendre_residual() < 1e-9
    rng = np.random.default_rng(7)
    z = rng.uniform(0, 1, 100) + rng.uniform(0, 1, 100) * tau
    assert np.max(ell.ode_residual(ctx, z)) < 1e-9


def test_quasi_periodicity():
    tau = 0.3 + 1.2j
    ctx = ell.make_context(tau)
    z = 0.21 + 0.37j
    for m, n in [(1, 0), (0, 1), (2, -1), (-1, 3)]:
        w = m + n * tau
        assert abs(ell.wp(ctx, z + w) - ell.wp(ctx, z)) < 1e-9
        assert abs(ell.zeta_fn(ctx, z + w) - ell.zeta_fn(ctx, z) - ctx.quasi_period(m, n)) < 1e-9
        # sigma(z + w) = (-1)^(m + n + mn) exp(eta(w)(z + w/2)) sigma(z)
        sign = (-1) ** (m + n + m * n)
        want = sign * np.exp(ctx.quasi_period(m, n) * (z + w / 2)) * ell.sigma_fn(ctx, z)
        assert abs(ell.sigma_fn(ctx, z + w) - want) < 1e-9 * abs(want)


def test_derivatives_consistent():
    ctx = ell.make_context(0.1 + 1.3j)
    z, h = 0.3 + 0.2j, 1e-5
    num = (ell.wp(ctx, z + h) - ell.wp(ctx, z - h)) / (2 * h)
    assert abs(num - ell.wp_prime(ctx, z)) < 1e-5 * abs(num)
    num = (ell.zeta_fn(ctx, z + h) - ell.zeta_fn(ctx, z - h)) / (2 * h)
    assert abs(-num - ell.wp(ctx, z)) < 1e-5 * abs(num)
    num = (ell.wp_derivative(ctx, z + h, 2) - ell.wp_derivative(ctx, z - h, 2)) / (2 * h)
    assert abs(num - ell.wp_derivative(ctx, z, 3)) < 1e-5 * abs(num)


def test_poles_and_domain():
    ctx = ell.make_context(1j)
    with pytest.raises(PoleError):
        ell.wp(ctx, 0.0)
    with pytest.raises(PoleError):
        ell.wp(ctx, 1 + 1j)
    assert ell.sigma_fn(ctx, 0.0) == 0


def test_truncation_accuracy_error():
    with pytest.raises(AccuracyError):
        ell.make_context(0.1 + 1.1j, truncation=2, tol=1e-14)
    ctx = ell.make_context(0.1 + 1.1j, truncation=40)
    assert ctx.nterms == 40


def test_periods_numeric_vs_closed(rng):
    for _ in range(4):
        tau = random_tau(rng)
        ctx = ell.make_context(tau)
        z1, z2 = random_point(rng, tau), random_point(rng, tau)
        d = ell.third_kind_differential(ctx, z1, z2)
        a, b = ell.closed_periods(d)
        assert abs(ell.period_integral(ctx, d, ell.Alpha()) - a) < 1e-9
        assert abs(ell.period_integral(ctx, d, ell.Beta()) - b) < 1e-9
        r = 0.3 * ctx.lattice.distance(z1 - z2)
        assert abs(ell.period_integral(ctx, d, ell.SmallCircle(z1, r)) - 1) < 1e-9
        assert abs(ell.period_integral(ctx, d, ell.SmallCircle(z2, r)) + 1) < 1e-9
        s = ell.second_kind_differential(ctx, z1)
        assert abs(ell.period_integral(ctx, s, ell.Alpha())) < 1e-9
        # Legendre oracle for the beta period: eta1 tau - eta2 = 2 pi i
        assert abs(ell.period_integral(ctx, s, ell.Beta()) - 2j * np.pi) < 1e-8
        s3 = ell.second_kind_differential(ctx, z1, order=3)
        assert abs(ell.period_integral(ctx, s3, ell.Beta())) < 1e-9


def test_integration_errors():
    ctx = ell.make_context(1j)
    d = ell.third_kind_differential(ctx, 0.5 + 0.5j, 0.25 + 0.25j)
    with pytest.raises(PathError):
        ell.period_integral(ctx, d, ell.Segment(0.1 + 0.5j, 0.9 + 0.5j))
    with pytest.raises(PathError):
        ell.period_integral(ctx, d, ell.SmallCircle(0.5 + 0.5j, 0.4))
    with pytest.raises(DomainError):
        ell.third_kind_differential(ctx, 0.3, 1.3)
    with pytest.raises(CapabilityError):
        ell.second_kind_differential(ctx, 0.3, order=1)


def test_abel_integral():
    ctx = ell.make_context(0.2 + 1.1j)
    assert ell.abel_integral(ctx, 0.1 + 0.1j, 0.4 + 0.3j) == pytest.approx(0.3 + 0.2j)
    # a representative outside the domain is reduced first
    assert abs(ell.abel_integral(ctx, 0.1 + 0.1j, 1.4 + 0.3j) - (0.3 + 0.2j)) < 1e-12
