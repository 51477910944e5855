import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptchain import SpecError
from ptchain.chebpoly import (ComplexPolynomial, alt_poly_ssh, charpoly_oracle, charpoly_ssh,
                              charpoly_tridiagonal, charpoly_uniform_defects, cheb_t,
                              cheb_t_poly, cheb_u, cheb_u_poly)
from ptchain.lattice import DefectConfig, HamiltonianSpec, build_dense
from ptchain.spectra import multiset_distance

complex_points = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def test_cheb_u_small_values():
    assert cheb_u(0, 0.7) == 1
    assert cheb_u(1, 0.3) == pytest.approx(0.6)
    assert cheb_u(3, 0.5) == pytest.approx(-1.0)
    assert cheb_u(-1, 0.4) == 0 and cheb_u(-2, 0.4) == -1


def test_cheb_t_small_values():
    assert cheb_t(2, 0) == pytest.approx(-1)
    assert cheb_t(4, 1) == pytest.approx(1)


def test_cheb_u_recurrence_vs_coefficients():
    x = 1 + 0.1j
    assert cheb_u(5, x) == pytest.approx(cheb_u_poly(5)(x), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=complex_points, n=st.integers(0, 30))
def test_recurrence_and_coefficient_forms_agree(x, n):
    # monomial coefficients are exact integers; evaluate them in 50 digits so
    # the comparison is not swamped by cancellation
    with mpmath.workdps(50):
        xm = mpmath.mpc(x.real, x.imag)
        for fast, poly in ((cheb_u, cheb_u_poly), (cheb_t, cheb_t_poly)):
            a = fast(n, x)
            b = complex(poly(n)(xm))
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@settings(max_examples=50, deadline=None)
@given(x=complex_points, n=st.integers(0, 30))
def test_double_horner_within_condition_bound(x, n):
    p = cheb_u_poly(n)
    cond = np.polyval(np.abs(p.coeffs)[::-1], abs(x))
    assert abs(p(x) - cheb_u(n, x)) <= 4 * (n + 1) * np.finfo(float).eps * cond + 1e-12


@settings(max_examples=100, deadline=None)
@given(x=complex_points, n=st.integers(0, 20))
def test_u_t_identity(x, n):
    lhs = cheb_u(n + 1, x)
    rhs = x * cheb_u(n, x) + cheb_t(n + 1, x)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@settings(max_examples=60, deadline=None)
@given(x=complex_points, m=st.integers(1, 15))
def test_u_even_index_identity(x, m):
    lhs = cheb_u(2 * m, x)
    rhs = cheb_u(m, x) ** 2 - cheb_u(m - 1, x) ** 2
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_polynomial_arithmetic():
    p = ComplexPolynomial([1, 2, 0, 0])
    assert p.degree == 1
    q = ComplexPolynomial([-1, 1])
    assert (p * q).allclose(ComplexPolynomial([-1, -1, 2]))
    assert (p * q).deriv().allclose(ComplexPolynomial([-1, 4]))
    assert ComplexPolynomial.from_roots([1, -1]).allclose(ComplexPolynomial([-1, 0, 1]))


def test_uniform_defects_without_defect_is_u():
    assert charpoly_uniform_defects(7, 2, 0, 0).allclose(cheb_u_poly(7))


def test_uniform_defects_two_site_quadratic():
    d, g = 0.4, 0.9
    p = charpoly_uniform_defects(2, 1, complex(d, g), complex(d, -g))
    # lambda = 2x with t = 1
    lam = np.roots(np.array(p.coeffs)[::-1]) * 2
    ref = np.roots([1, -2 * d, d * d + g * g - 1])
    assert multiset_distance(lam, ref) < 1e-12


def test_uniform_defects_paired_roots():
    g = math.sqrt(3) - 1
    p = charpoly_uniform_defects(5, 2, 1j * g, -1j * g)
    assert abs(p(0)) < 1e-14
    roots = np.roots(np.array(p.coeffs)[::-1])
    nonzero = roots[np.abs(roots) > 1e-6]
    assert len(nonzero) == 4
    # pairs of nearly coincident roots
    d = np.abs(nonzero[:, None] - nonzero[None, :]) + np.eye(4) * 10
    assert np.all(d.min(axis=1) < 1e-6)


def test_uniform_defects_index_range():
    with pytest.raises(SpecError):
        charpoly_uniform_defects(6, 4, 0.1, 0.1)


@pytest.mark.parametrize("n", [2, 5, 8, 10])
def test_uniform_defects_matches_oracle(n, rng):
    m = int(rng.integers(1, n // 2 + 1))
    z = complex(*rng.normal(size=2))
    zb = complex(*rng.normal(size=2))
    p = charpoly_uniform_defects(n, m, z, zb)
    zs = [0j] * n
    zs[m - 1], zs[n - m] = z, zb
    oracle = charpoly_oracle(HamiltonianSpec.uniform(n, 1.0, zs))
    # eigenvalues are lambda = 2x
    assert p.scale_variable(0.5).monic().allclose(oracle, rtol=1e-9, atol=1e-9)


def test_ssh_hermitian_uniform_limit():
    n = 7
    p = charpoly_ssh(n, 1.0, 1.0)
    expected = [2 * math.cos(k * math.pi / (n + 1)) for k in range(1, n + 1)]
    assert multiset_distance(np.roots(np.array(p.coeffs)[::-1]), expected) < 1e-10


def test_ssh_exact_example():
    p = charpoly_ssh(4, 2.0, 1.0, 1j, -1j)
    roots = np.roots(np.array(p.coeffs)[::-1])
    s5, s3 = math.sqrt(5), math.sqrt(3)
    assert multiset_distance(roots, [s5, -s5, s3, -s3]) < 1e-10


def test_ssh_rejects_nonpositive_bonds():
    with pytest.raises(SpecError):
        charpoly_ssh(4, 0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 9))
def test_ssh_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    t1, t2 = rng.uniform(0.3, 2.0, 2)
    z1, zn, tL, tR = (complex(*rng.normal(size=2)) for _ in range(4))
    p = charpoly_ssh(n, t1, t2, z1, zn, tL, tR)
    oracle = charpoly_oracle(HamiltonianSpec.ssh(n, t1, t2, z1, zn, tL, tR))
    assert p.allclose(oracle, rtol=1e-9, atol=1e-9 * oracle.norm())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_continuant_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    spec = HamiltonianSpec(n, tuple(rng.uniform(0.2, 2, n - 1)),
                           tuple(complex(*v) for v in rng.normal(size=(n, 2))),
                           complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
    a, b = charpoly_tridiagonal(spec), charpoly_oracle(spec)
    assert a.allclose(b, rtol=1e-9, atol=1e-9 * b.norm())


def test_oracle_two_site():
    assert charpoly_oracle(HamiltonianSpec(2, (1.0,), (0, 0))).allclose(ComplexPolynomial([-1, 0, 1]))


def test_oracle_matches_determinant(rng):
    spec = HamiltonianSpec(6, tuple(rng.uniform(0.5, 1.5, 5)),
                           tuple(complex(*v) for v in rng.normal(size=(6, 2))))
    lam = complex(*rng.normal(size=2))
    det = np.linalg.det(lam * np.eye(6) - build_dense(spec))
    assert charpoly_oracle(spec)(lam) == pytest.approx(det, rel=1e-10)


def test_oracle_size_cap():
    with pytest.raises(SpecError):
        charpoly_oracle(HamiltonianSpec.uniform(65))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8))
def test_pt_coefficients_are_real(seed, n):
    rng = np.random.default_rng(seed)
    n = 2 * n
    t1, t2 = rng.uniform(0.3, 2.0, 2)
    z1 = complex(*rng.normal(size=2))
    a = complex(rng.normal(), 0) * 1j
    p = charpoly_ssh(n, t1, t2, z1, z1.conjugate(), a, a.conjugate())
    assert p.max_imag() <= 1e-12 * p.norm()
    m = int(rng.integers(1, n // 2 + 1))
    q = charpoly_uniform_defects(n, m, z1, z1.conjugate())
    assert q.max_imag() <= 1e-12 * q.norm()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(2, 8))
def test_alt_form_matches_even_branch(seed, k):
    rng = np.random.default_rng(seed)
    n = 2 * k
    t1, t2 = rng.uniform(0.3, 2.0, 2)
    z1, zn = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    a = rng.normal()
    lam = complex(*rng.normal(size=2))
    lhs = alt_poly_ssh(lam, n, t1, t2, z1, zn, a, -a)
    rhs = charpoly_ssh(n, t1, t2, z1, zn, a, -a)(lam) / (t1 * t2) ** k
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_defect_expansion_feeds_chebyshev_form():
    spec = DefectConfig(2, 0.2, 0.5).expand(6, 1.0)
    p = charpoly_uniform_defects(6, 2, 0.2 + 0.5j, 0.2 - 0.5j).scale_variable(0.5).monic()
    assert p.allclose(charpoly_oracle(spec), rtol=1e-9, atol=1e-12)
