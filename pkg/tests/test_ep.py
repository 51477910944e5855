import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptchain import SpecError
from ptchain.chebpoly import ComplexPolynomial, cheb_u_poly
from ptchain.ep import (DegenerateDirectionError, asymptotic_threshold, branch_order,
                        cubic_discriminant, discriminant, end_defect_spec, ep_contour,
                        ep_indicator, ep_order, ep_radius, ep_surface_ssh,
                        local_coefficient_gradients, puiseux_fit, resultant,
                        singular_point_kind, ssh_ep4_points, ssh_splitting_fit,
                        ssh_threshold_gamma, threshold_gamma)
from ptchain.lattice import DefectConfig, HamiltonianSpec
from ptchain.spectra import PTPhase, spectrum


def test_resultant_linear_factor():
    assert abs(resultant([-1, 0, 1], [-1, 1])) == 0.0
    assert resultant([-1, 0, 1], [-2, 1]) == pytest.approx(3.0)


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("m", range(1, 9))
def test_chebyshev_resultant_vanishes_on_common_zero(n, m):
    res = abs(resultant(cheb_u_poly(n), cheb_u_poly(m)))
    if math.gcd(n + 1, m + 1) > 1:
        assert res < 1e-10
    else:
        assert res > 1e-3


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_planted_common_root(seed):
    rng = np.random.default_rng(seed)
    r = complex(*rng.normal(size=2))
    p = ComplexPolynomial.from_roots([r, *(complex(*v) for v in rng.normal(size=(2, 2)))])
    q = ComplexPolynomial.from_roots([r, complex(*rng.normal(size=2))])
    assert abs(resultant(p, q)) < 1e-10
    q_off = ComplexPolynomial.from_roots([r + 0.5, complex(*rng.normal(size=2))])
    assert abs(resultant(p, q_off)) > 0


def test_cubic_discriminant_examples():
    assert cubic_discriminant(0, 0, 0, 1) == 0
    assert cubic_discriminant(-1, 0, 0, 1) == -27
    # (x - 1)^2 (x + 2)
    assert cubic_discriminant(2, -3, 0, 1) == 0
    # roots 0, 1, 2: prod (x_i - x_j)^2 = 4
    assert cubic_discriminant(0, 2, -3, 1) == 4


@settings(max_examples=40, deadline=None)
@given(roots=st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_cubic_discriminant_matches_general(roots):
    c = np.array(ComplexPolynomial.from_roots(roots).coeffs).real
    ref = np.prod([(a - b) ** 2 for i, a in enumerate(roots) for b in roots[i + 1:]])
    assert cubic_discriminant(*c) == pytest.approx(ref, abs=1e-9)
    assert discriminant(c).real == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_even_chain_zero_detuning_threshold_is_one(n):
    assert threshold_gamma(n, 0.0) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_odd_chain_zero_detuning_threshold(n):
    g = threshold_gamma(n, 0.0)
    assert g == pytest.approx(math.sqrt((n + 1) / (n - 1)), rel=1e-10)
    # independent route: dense diagonalization either side of the threshold
    below = spectrum(DefectConfig(1, 0.0, g * (1 - 1e-4)).expand(n, 1.0)).phase
    above = spectrum(DefectConfig(1, 0.0, g * (1 + 1e-4)).expand(n, 1.0)).phase
    assert below is PTPhase.UNBROKEN and above is not PTPhase.UNBROKEN


def test_indicator_changes_sign_at_threshold():
    for n in (2, 6):
        assert ep_indicator(n, 0.999j) * ep_indicator(n, 1.001j) < 0


def test_indicator_rejects_solvable_case():
    with pytest.raises(SpecError):
        ep_indicator(4, 1.0 + 0j)


def test_indicator_precision_routes_agree():
    z = 0.4 + 0.9j
    assert ep_indicator(7, z, dps=40) == pytest.approx(ep_indicator(7, z), rel=1e-8)


def test_two_site_threshold_ignores_detuning():
    assert threshold_gamma(2, 0.7) == pytest.approx(1.0, rel=1e-10)
    assert asymptotic_threshold(2, 5.0, t=1.3) == 1.3


def test_large_detuning_asymptotics():
    g = threshold_gamma(4, 10.0)
    assert asymptotic_threshold(4, 10.0) == pytest.approx(1e-2)
    assert g == pytest.approx(asymptotic_threshold(4, 10.0), rel=0.05)


def test_hermitian_degeneracy_is_not_an_ep():
    res = ep_order(HamiltonianSpec(2, (0.0,), (1, 1)), 1.0)
    assert res.algebraic_multiplicity == 2 and res.hermitian
    assert not res.is_ep and res.order == 1


def test_odd_chain_zero_mode_is_third_order():
    spec = DefectConfig(1, 0.0, math.sqrt(1.5)).expand(5, 1.0)
    res = ep_order(spec, 0.0, tol=1e-3)
    assert int(res) == 3 and res.geometric_multiplicity == 1 and res.order == 3


def test_even_chain_threshold_is_second_order():
    spec = DefectConfig(1, 0.0, threshold_gamma(6, 0.0)).expand(6, 1.0)
    res = ep_order(spec, 0.0, tol=1e-5)
    assert res.order == 2


def test_ep_order_without_nearby_root():
    with pytest.raises(ValueError):
        ep_order(HamiltonianSpec.uniform(4), 10.0)


def test_off_cusp_square_root_splitting():
    fit = puiseux_fit(6, 0.7)
    assert fit.exponent == pytest.approx(0.5, abs=0.02)
    assert fit.k_estimate == 2


def test_tangential_direction_splits_linearly():
    assert puiseux_fit(6, 0.7, direction="tangential").exponent == pytest.approx(1.0, abs=0.05)


def test_branch_order_rules():
    assert branch_order([[1, 0], [0, 1], [0, 0]], [1, 0]) == Fraction(1, 3)
    assert branch_order([[0, 1], [1, 0], [0, 0]], [1, 0]) == Fraction(1, 2)
    assert branch_order([[0, 1], [0, 1], [1, 0]], [1, 0]) == 1
    with pytest.raises(DegenerateDirectionError):
        branch_order([[0, 1], [0, 1], [0, 1]], [1, 0])


def test_coefficient_gradients_of_known_family():
    # P(lambda) = lambda^2 - a - b lambda: p0 = -a, p1 = -b at lambda = 0
    def poly(params):
        a, b = params
        return ComplexPolynomial([-a, -b, 1])

    g = local_coefficient_gradients(poly, [0.0, 0.0], 0.0, 2)
    np.testing.assert_allclose(g, [[-1, 0], [0, -1]], atol=1e-9)


def test_singular_point_kinds():
    assert singular_point_kind(lambda x, y: x * x - y * y, (0, 0)) == "crunode"
    assert singular_point_kind(lambda x, y: x * x + y * y, (0, 0)) == "acnode"
    assert singular_point_kind(lambda x, y: y * y - x**3, (0, 0)) == "cusp"
    assert singular_point_kind(lambda x, y: x + y * y, (0.1, 0)) == "regular"


def test_fourth_order_point_at_zero_detuning():
    (pt,) = ssh_ep4_points(8, (0.5, 2.0))
    assert pt.t1_over_t2 == pytest.approx(1.1020277980558064, rel=1e-9)
    assert pt.gamma == pytest.approx(1.4749258864198274, rel=1e-9)
    assert pt.order == 4
    fit = ssh_splitting_fit(8, pt.t1_over_t2, 0.0, pt.gamma, 0.0, k_near=4)
    assert fit.exponent == pytest.approx(0.25, abs=0.02)


def test_surface_uniform_slice_matches_threshold():
    deltas = [0.0, 0.5, 1.0]
    surf = ep_surface_ssh(6, [1.0], deltas, ridges=False, ep4=False)
    for j, d in enumerate(deltas):
        assert surf.gamma[0, j] == pytest.approx(threshold_gamma(6, d), rel=1e-9)
    assert len(list(surf.rows())) == 3


def test_surface_rejects_odd_length():
    with pytest.raises(ValueError):
        ep_surface_ssh(5, [1.0], [0.0])


def test_zero_detuning_threshold_shrinks_with_length():
    ratio = 0.8
    gs = [ssh_threshold_gamma(n, ratio, 0.0) for n in (8, 12, 16)]
    assert gs[0] > gs[1] > gs[2]
    for n, g in zip((8, 12, 16), gs):
        assert g == pytest.approx(ratio ** (n / 2), rel=1e-9)


def test_contour_mirror_symmetry():
    grid = np.linspace(0, math.pi, 13)[1:-1]
    c = ep_contour(3, grid, cusps=False)
    np.testing.assert_allclose(c.radii, c.radii[::-1], rtol=1e-12)
    # the contour mirrors by construction; solve the far rays directly
    direct = [ep_radius(3, th) for th in grid[grid > math.pi / 2]]
    np.testing.assert_allclose(direct, c.radii[grid > math.pi / 2], rtol=1e-10)
    lower = c.mirrored()
    assert len(lower.points) == 2 * len(c.points)
    assert all(p.gamma < 0 for p in lower.points[:len(c.points)])


def test_contour_points_are_phase_boundaries():
    for p in ep_contour(3, np.linspace(0, math.pi, 9)[1:-1], cusps=False).points:
        z = complex(p.delta, p.gamma)
        inside = spectrum(end_defect_spec(3, z * (1 - 1e-5))).phase
        outside = spectrum(end_defect_spec(3, z * (1 + 1e-5))).phase
        assert inside is PTPhase.UNBROKEN and outside is not PTPhase.UNBROKEN


def test_ray_without_crossing_gives_nan():
    diag = []
    assert math.isnan(ep_radius(4, 0.5, rmax=0.05, diagnostics=diag))
    assert diag
