import numpy as np
import pytest
from hypothesis import given, strategies as st

from hofa.fourier_ops import (apply_K_eps, apply_K_r, average, averaging_operator, denoise, denoising_residual, dual,
                              dual_function, identity_operator, lift, lift_outer, lipschitz_ramp, q_eps, q_eps_prime,
                              radial, relu_shift, sharp_cutoff, sharp_cutoff_operator)
from hofa.gowers import dual_function_direct, uk_norm
from hofa.group import GroupFunction, GroupSpec, fourier_transform, shift
from hofa.zmatrix import ZMatrix, l2_norm, outer, wiener_norm

from conftest import groups, quadratic_phase, random_function, seeds

complexes = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
epsilons = st.floats(min_value=1e-3, max_value=1.0)


def test_q_eps_examples():
    assert q_eps(0, 0.3) == 0
    assert np.isclose(q_eps(0.5, 0.2), 0.3)
    assert np.isclose(q_eps(2j, 0.5), 1.5j)
    with pytest.raises(ValueError):
        q_eps(1.0, 0.0)
    with pytest.raises(ValueError):
        q_eps_prime(1.0, -1.0)


@given(complexes, epsilons)
def test_q_eps_split(z, eps):
    assert abs(q_eps(z, eps) + q_eps_prime(z, eps) - z) < 1e-12
    assert abs(abs(q_eps_prime(z, eps)) - min(abs(z), eps)) < 1e-12


@given(complexes, complexes, epsilons)
def test_q_prime_subadditive(x, y, eps):
    assert abs(q_eps_prime(x + y, eps)) <= abs(q_eps_prime(x, eps)) + abs(q_eps_prime(y, eps)) + 1e-12


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
def test_q_eps_lipschitz_sampled(eps):
    rng = np.random.default_rng(1)
    x = (rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)) * 2 * eps
    y = (rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)) * 2 * eps
    assert np.all(np.abs(q_eps(x, eps) - q_eps(y, eps)) <= np.abs(x - y) + 1e-12)
    assert np.all(np.abs(q_eps_prime(x, eps) - q_eps_prime(y, eps)) <= np.abs(x - y) + 1e-12)


def test_single_coefficient():
    g = GroupSpec((8,))
    c = 0.7 * np.exp(0.3j)
    f = g.character(3) * c
    out = apply_K_eps(f, 0.2)
    assert out.allclose(g.character(3) * ((abs(c) - 0.2) * c / abs(c)), atol=1e-12)


def test_cubic_gauss_phase_annihilated():
    x = np.arange(101)
    f = GroupFunction(GroupSpec((101,)), np.exp(2j * np.pi * (x**3 % 101) / 101))
    assert apply_K_eps(f, 0.2).norm() < 1e-12


@given(groups, seeds, epsilons)
def test_denoiser_contracts(group, seed, eps):
    rng = np.random.default_rng(seed)
    f, h = random_function(group, rng), random_function(group, rng)
    assert (apply_K_eps(f, eps) - apply_K_eps(h, eps)).norm() <= (f - h).norm() + 1e-9
    kf = apply_K_eps(f, eps)
    assert kf.norm() <= f.norm() + 1e-12
    assert wiener_norm(kf) <= f.norm() ** 2 / eps + 1e-9
    assert np.count_nonzero(np.abs(fourier_transform(kf)) > 1e-14) <= f.norm() ** 2 / eps**2 + 1e-9


def test_relu_profile_matches_denoiser(rng):
    g = GroupSpec((3, 4))
    f = random_function(g, rng)
    assert apply_K_r(f, relu_shift(0.3)).allclose(apply_K_eps(f, 0.3), atol=1e-14)
    assert relu_shift(0.3)(0.0) == 0


def test_lipschitz_ramp_profile():
    r = lipschitz_ramp(0.2)
    np.testing.assert_allclose(r([0.0, 0.05, 0.1, 0.15, 0.2, 0.5]), [0, 0, 0, 0.1, 0.2, 0.5])


OPERATORS = [denoise(0.2), radial(lipschitz_ramp(0.3)), average(), sharp_cutoff_operator(0.25), identity_operator(),
             dual(2), dual(3)]


@pytest.mark.parametrize("op", OPERATORS, ids=lambda op: f"{op.kind}{op.params}")
def test_operators_are_invariant(op, rng):
    g = GroupSpec((2, 6))
    f = random_function(g, rng)
    kf = op(f)
    for h in range(g.order):
        assert op(shift(f, h)).allclose(shift(kf, h), atol=1e-12)
    assert op(f.conj()).allclose(kf.conj(), atol=1e-12)


@pytest.mark.parametrize("op", OPERATORS, ids=lambda op: f"{op.kind}{op.params}")
def test_lift_preserves_self_adjoint(op, rng):
    g = GroupSpec((8,))
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    m = ZMatrix(g, a + a.conj().T)
    assert lift(op, m).self_adjoint_defect() <= 1e-10


def test_lift_identity_and_lift_outer(rng):
    g = GroupSpec((6,))
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    m = ZMatrix(g, a)
    np.testing.assert_array_equal(lift(identity_operator(), m).entries, m.entries)
    f = random_function(g, rng)
    np.testing.assert_allclose(lift_outer(denoise(0.1), f).entries, lift(denoise(0.1), outer(f, f)).entries,
                               atol=1e-13)


def test_averaging_lift_expansion(rng):
    g = GroupSpec((2, 3))
    f = random_function(g, rng)
    coeffs = fourier_transform(f)
    expected = sum(abs(coeffs[k]) ** 2 * np.outer(g.character(k).values, g.character(k).values.conj())
                   for k in range(g.order))
    np.testing.assert_allclose(lift_outer(average(), f).entries, expected, atol=1e-12)


def test_denoised_quadratic_phase_lift():
    phi = quadratic_phase(16)
    np.testing.assert_allclose(lift_outer(denoise(0.3), phi).entries, 0.7 * outer(phi, phi).entries, atol=1e-12)


def test_averaging_operator(rng):
    g = GroupSpec((5,))
    c = g.constant(2 - 1j)
    assert averaging_operator(c).allclose(c)
    assert averaging_operator(g.character(2)).allclose(g.zeros(), atol=1e-14)
    f = random_function(g, rng)
    assert averaging_operator(f).allclose(g.constant(np.mean(f.values)))


def test_sharp_cutoff(rng):
    g = GroupSpec((8,))
    f = random_function(g, rng)
    assert sharp_cutoff(f, 0.0).allclose(f, atol=1e-13)
    assert sharp_cutoff(f, np.abs(fourier_transform(f)).max() * 1.01).allclose(g.zeros())
    phi = quadratic_phase(101)
    thr = 1 / np.sqrt(101)
    assert sharp_cutoff(phi, thr * (1 - 1e-6)).allclose(phi, atol=1e-10)
    assert sharp_cutoff(phi, thr * (1 + 1e-6)).norm() < 1e-12


def test_dual_function_fast_paths(rng):
    g = GroupSpec((8,))
    chi = g.character(3)
    assert dual_function(chi, 2).allclose(chi, atol=1e-12)
    c = g.constant(0.5 + 0.5j)
    assert dual_function(c, 2).allclose(c * abs(0.5 + 0.5j) ** 2, atol=1e-13)
    f = random_function(g, rng)
    for k in (2, 3):
        d = dual_function(f, k)
        assert d.allclose(dual_function_direct(f, k), atol=1e-9)
        assert abs(f.inner(d) - uk_norm(f, k) ** (2**k)) < 1e-9 * max(1, uk_norm(f, k) ** (2**k))
    with pytest.raises(ValueError):
        dual_function(f, 4)
    with pytest.raises(ValueError):
        dual_function(GroupSpec((300,)).zeros(), 3)


def test_denoising_residual_matches_matrix(rng):
    g = GroupSpec((2, 4))
    f = random_function(g, rng)
    m = outer(f, f)
    direct = l2_norm(lift(denoise(0.4), m) - m)
    assert np.isclose(denoising_residual(f, 0.4), direct, rtol=1e-12)
    assert 0 <= direct <= 2 * f.norm() ** 2


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_denoising_residual_quadratic_phase(eps):
    assert abs(denoising_residual(quadratic_phase(64), eps) - eps) <= 1e-10


def test_denoising_residual_zero():
    assert denoising_residual(GroupSpec((8,)).zeros(), 0.1) == 0.0


@given(groups, seeds, st.floats(0.2, 3.0), epsilons)
def test_denoising_residual_scaling(group, seed, c, eps):
    f = random_function(group, np.random.default_rng(seed))
    lhs = denoising_residual(f * c, eps)
    rhs = c**2 * denoising_residual(f, eps / c**2)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, lhs)
