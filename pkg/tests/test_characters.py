import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hofa.characters import (correlation_bound, derivative_residuals, fourier_structure, isolated_eigenvector_check,
                             order1_certificate, quadratic_certificate, stability_correspondence,
                             weak_quadratic_certificate)
from hofa.fourier_ops import denoising_residual
from hofa.gowers import gowers_inner, poly_phase, uk_norm
from hofa.group import GroupFunction, GroupSpec, mult_derivative, shift

from conftest import bounded_function, groups, quadratic_phase, random_function, seeds


@given(groups, st.data())
def test_character_has_zero_order1_residual(group, data):
    k = data.draw(st.integers(0, group.order - 1))
    idx, residual = order1_certificate(group.character(k))
    assert idx == k and residual < 1e-12


def test_two_character_mixture():
    g = GroupSpec((16,))
    f = g.character(3) * 0.8 + g.character(9) * 0.6
    idx, residual = order1_certificate(f)
    assert idx == 3 and np.isclose(residual, 0.6)
    cert = fourier_structure(f, 2)
    assert cert.delta < 1e-12 and set(cert.support) == {3, 9}
    assert np.isclose(fourier_structure(f, 0).delta, 1.0)


def test_order1_tie_breaks_to_smaller_index():
    g = GroupSpec((8,))
    f = (g.character(5) + g.character(2)) / np.sqrt(2)
    assert order1_certificate(f)[0] == 2


def test_unit_ball_required(rng):
    g = GroupSpec((8,))
    with pytest.raises(ValueError):
        order1_certificate(g.character(0) * 2)
    with pytest.raises(ValueError):
        quadratic_certificate(g.character(0) * 2, 1)
    with pytest.raises(ValueError):
        fourier_structure(g.character(0), -1)


@pytest.mark.parametrize("n,a,b", [(16, 1, 0), (64, 3, 5), (31, 7, 2), (12, 5, 1)])
def test_quadratic_phase_is_order2_character(n, a, b):
    cert = quadratic_certificate(quadratic_phase(n, a, b), 1)
    assert cert.delta < 1e-12
    assert cert.per_shift_residuals.shape == (n,)


def test_cubic_phase_derivatives_are_spread():
    p = 31
    f = poly_phase(GroupSpec((p,)), [0, 0, 0, 1])
    res = derivative_residuals(f, 1)
    assert res[0] < 1e-12  # Delta_0 f = 1
    # nonzero shifts give quadratic phases with flat spectrum of modulus p^-1/2
    np.testing.assert_allclose(res[1:], math.sqrt(1 - 1 / p), atol=1e-10)
    assert quadratic_certificate(f, p).delta < 1e-10


def test_residuals_match_manual_derivatives(rng):
    g = GroupSpec((2, 6))
    f = random_function(g, rng)
    f = f / f.norm()
    res = derivative_residuals(f, 2)
    for t in range(g.order):
        d = mult_derivative(f, g.coords(t))
        assert np.isclose(res[t], fourier_structure(d, 2).delta)


def test_certificate_report_histogram():
    cert = quadratic_certificate(quadratic_phase(32), 1)
    d = cert.to_dict()
    assert d["order"] == 2 and sum(d["residual_histogram"]["counts"]) == 32


def test_weak_certificate_counts_bad_shifts(rng):
    n = 64
    f = quadratic_phase(n)
    vals = f.values.copy()
    vals[:3] = bounded_function(GroupSpec((3,)), rng).values
    h = GroupFunction(f.group, vals)
    res = derivative_residuals(h, 1)
    cert = weak_quadratic_certificate(h, 1, 0.3)
    assert cert.good_set_size == int(np.count_nonzero(res <= 0.3 + 1e-9))
    assert np.isclose(cert.delta2, 1 - cert.good_set_size / n)
    assert weak_quadratic_certificate(f, 1, 0.0).delta2 == 0.0


def test_stability_for_quadratic_phase():
    f = quadratic_phase(64, 3, 1)
    # K_eps shrinks a unit-modulus quadratic phase by exactly 1 - eps
    rep = stability_correspondence(f, 0.1, gamma=0.1 + 1e-9, delta=0.5, R=1, delta1=0.0)
    assert np.isclose(rep.residual, 0.1)
    assert rep.forward_applicable and rep.forward_holds
    assert rep.measured_delta2 == 0.0
    assert rep.backward_margin >= 0


@given(seeds)
def test_backward_direction_on_random_bounded(seed):
    rng = np.random.default_rng(seed)
    g = GroupSpec((32,))
    f = bounded_function(g, rng)
    for r, d1 in ((1, 0.1), (4, 0.5)):
        rep = stability_correspondence(f, 0.05, 0.0, 0.5, R=r, delta1=d1)
        assert rep.residual <= rep.backward_bound + 1e-9


def test_stability_input_checks():
    g = GroupSpec((4,))
    with pytest.raises(ValueError):
        stability_correspondence(g.character(0) * 2, 0.1, 0.1, 0.5)
    with pytest.raises(ValueError):
        stability_correspondence(g.character(0), 0.1, 0.1, 0.0)


def test_stability_report_fields():
    f = quadratic_phase(16)
    rep = stability_correspondence(f, 0.2, 0.05, 0.25)
    assert np.isclose(rep.implied_R, 4 / (0.2 * 0.25) ** 2)
    assert np.isclose(rep.implied_delta1, math.sqrt(0.4))
    assert np.isclose(rep.residual, denoising_residual(f, 0.2))
    assert set(rep.to_dict()) >= {"residual", "backward_bound", "forward_holds"}


def test_isolated_eigenvector_of_quadratic_phase():
    f = quadratic_phase(32, 1, 0)
    checks = isolated_eigenvector_check(f, 0.1, 0.3)
    assert len(checks) == 1
    c = checks[0]
    assert np.isclose(c.eigenvalue, 0.9) and c.passed and c.measured_delta_R1 < 1e-8


def test_isolated_check_requires_eigenvalue():
    g = GroupSpec((16,))
    with pytest.raises(ValueError):
        isolated_eigenvector_check(GroupFunction(g, np.zeros(16)), 0.1, 0.3)
    with pytest.raises(ValueError):
        isolated_eigenvector_check(quadratic_phase(16), 0.1, 1.5)


@given(seeds)
def test_correlation_with_quadratic_phase_bounded_by_u3(seed):
    rng = np.random.default_rng(seed)
    p = 31
    f = bounded_function(GroupSpec((p,)), rng)
    a = uk_norm(f, 3)
    for coeffs in ([0, 1, 1], [3, 0, 5], [0, 2, 0]):
        q = poly_phase(GroupSpec((p,)), coeffs)
        assert abs(f.inner(q)) <= correlation_bound(a, 1, 0.0, 0.0) + 1e-12


def test_correlation_bound_formula():
    assert np.isclose(correlation_bound(0.5, 4, 0.1, 0.04), math.sqrt(0.25 * 4 + 0.1 + 0.2))


def test_cubic_pair_u3_inner_product():
    p = 31
    group = GroupSpec((p,))
    for b in (1, 4, 17):
        f = poly_phase(group, [0, 0, 0, 1])
        g = poly_phase(group, [0, 0, b, 1])
        assert abs(gowers_inner(f, g, 3) - (2 * p - 1) / p**2) < 1e-10
        t = (-b * pow(3, -1, p)) % p
        assert abs(uk_norm(f * shift(g, t).conj(), 2) - 1.0) < 1e-10
