import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pt_profile
from ptchain import SpecError
from ptchain.chebpoly import ComplexPolynomial, charpoly_oracle, cheb_u_poly
from ptchain.lattice import DefectConfig, HamiltonianSpec, build_dense
from ptchain.spectra import (PTPhase, classify_state, closed_form_spectrum, eigensystem,
                             eigenvector_for, inverse_participation_ratio, mat2_power_cheb,
                             multiset_distance, protected_eigenvalues, roots_aberth,
                             spectrum, ssh_transfer_matrix, tridiagonal_roots)


def test_aberth_quadratic():
    assert multiset_distance(roots_aberth(ComplexPolynomial([-1, 0, 1])), [1, -1]) < 1e-14


def test_aberth_chebyshev_zeros():
    roots = roots_aberth(cheb_u_poly(5))
    expected = [math.cos(k * math.pi / 6) for k in range(1, 6)]
    assert multiset_distance(roots, expected) < 1e-12


def test_aberth_is_deterministic(rng):
    p = ComplexPolynomial(rng.normal(size=9) + 1j * rng.normal(size=9))
    np.testing.assert_array_equal(roots_aberth(p), roots_aberth(p))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_aberth_matches_dense_on_random_pt_chain(seed):
    rng = np.random.default_rng(seed)
    n = 10
    t = random_pt_profile(rng, n)
    z = np.zeros(n, dtype=complex)
    for k in range(n // 2):
        z[k] = complex(*rng.normal(size=2))
        z[n - 1 - k] = z[k].conjugate()
    spec = HamiltonianSpec(n, t, tuple(z))
    ev = np.linalg.eigvals(build_dense(spec))
    assert multiset_distance(roots_aberth(charpoly_oracle(spec)), ev) < 1e-8
    assert multiset_distance(tridiagonal_roots(spec), ev) < 1e-8


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10), corners=st.booleans())
def test_spectrum_matches_dense_oracle(seed, n, corners):
    rng = np.random.default_rng(seed)
    spec = HamiltonianSpec(n, tuple(rng.uniform(0.2, 2, n - 1)),
                           tuple(complex(*v) for v in rng.normal(size=(n, 2))),
                           *(complex(*rng.normal(size=2)) for _ in range(2 if corners else 0)))
    rep = spectrum(spec)
    assert sum(c.algebraic_multiplicity for c in rep.clusters) == n
    assert multiset_distance(rep.eigenvalues, np.linalg.eigvals(build_dense(spec))) < 1e-8


def test_uniform_mode_shape():
    spec = HamiltonianSpec.uniform(4)
    lam = 2 * math.cos(math.pi / 5)
    (vec,) = eigenvector_for(spec, lam)
    ref = np.sin(np.arange(1, 5) * math.pi / 5)
    np.testing.assert_allclose(vec.components, ref / np.linalg.norm(ref), atol=1e-12)


def test_ep_chain_has_m_eigenvectors():
    report, vectors = eigensystem(DefectConfig(3, 0.0, 1.0).expand(6, 1.0))
    assert len(vectors) == 3
    assert all(v.defective for v in vectors)
    assert all(c.algebraic_multiplicity == 2 and c.geometric_multiplicity == 1
               for c in report.clusters)
    assert len(report.defective_clusters) == 3
    stacked = np.array([v.components for v in vectors])
    assert np.linalg.matrix_rank(stacked, tol=1e-8) == 3


def test_ssh_eigenvectors_follow_transfer_powers():
    n, t1, t2 = 8, 1.0, 2.0
    spec = HamiltonianSpec.ssh(n, t1, t2, 0.1j, -0.1j)
    _, vectors = eigensystem(spec)
    for v in vectors:
        psi, lam = v.components, v.eigenvalue
        T = ssh_transfer_matrix(lam, t1, t2)
        seed = np.array([psi[1], psi[0]])
        for k in range(1, (n - 2) // 2 + 1):
            expect = np.array([psi[2 * k + 1], psi[2 * k]])
            np.testing.assert_allclose(mat2_power_cheb(T, k) @ seed, expect, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_eigenvector_residuals(seed, n):
    rng = np.random.default_rng(seed)
    spec = HamiltonianSpec(n, tuple(rng.uniform(0.3, 2, n - 1)),
                           tuple(complex(*v) for v in 0.5 * rng.normal(size=(n, 2))))
    H = build_dense(spec)
    _, vectors = eigensystem(spec)
    for v in vectors:
        if v.defective:
            continue
        assert np.linalg.norm(v.components) == pytest.approx(1.0)
        first = v.components[np.argmax(np.abs(v.components) > 1e-12)]
        assert abs(first.imag) < 1e-12 and first.real > 0
        assert np.linalg.norm(H @ v.components - v.eigenvalue * v.components) < 1e-8 * max(1, np.linalg.norm(H, 2))


def test_mat2_power_trivial_cases():
    np.testing.assert_allclose(mat2_power_cheb(np.eye(2), 5), np.eye(2))
    np.testing.assert_allclose(mat2_power_cheb([[0, 1], [-1, 0]], 2), -np.eye(2), atol=1e-15)
    with pytest.raises(ValueError):
        mat2_power_cheb([[1, 2], [2, 4]], 3)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(0, 12))
def test_mat2_power_matches_repeated_product(seed, k):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    ref = np.linalg.matrix_power(A, k)
    out = mat2_power_cheb(A, k)
    assert np.linalg.norm(out - ref) <= 1e-10 * max(1.0, np.linalg.norm(ref))


def test_solvable_row1():
    vals = closed_form_spectrum(1, m=3)
    s2 = math.sqrt(2)
    assert multiset_distance(vals, [s2, s2, 0, 0, -s2, -s2]) < 1e-12


def test_solvable_row4_union_of_families():
    vals = closed_form_spectrum(4, m=2)
    fam_a = [2 * math.cos(j * math.pi / 3) for j in (1, 2)]
    fam_b = [2 * math.cos((2 * j - 1) * math.pi / 5) for j in (1, 2)]
    assert multiset_distance(vals, fam_a + fam_b) < 1e-12
    z = np.exp(1j * math.pi / 3)
    dense = np.linalg.eigvals(build_dense(HamiltonianSpec.uniform(4, 1.0, [0, z, z.conjugate(), 0])))
    assert multiset_distance(vals, dense) < 1e-10


def test_solvable_rejects_wrong_defect():
    with pytest.raises(SpecError):
        closed_form_spectrum(1, m=2, z=0.5j)


def test_ssh_exact_closed_form():
    vals = closed_form_spectrum("ssh-exact", n=4, t1=2.0, t2=1.0, z1=1j, zn=-1j)
    s5, s3 = math.sqrt(5), math.sqrt(3)
    assert multiset_distance(vals, [s5, -s5, s3, -s3]) < 1e-12
    dense = np.linalg.eigvals(build_dense(HamiltonianSpec.ssh(4, 2.0, 1.0, 1j, -1j)))
    assert multiset_distance(vals, dense) < 1e-10
    with pytest.raises(SpecError):
        closed_form_spectrum("ssh-exact", n=4, t1=2.0, t2=1.0, z1=0.5j, zn=-0.5j)


@pytest.mark.parametrize("n, m, detuned, expected", [
    (5, 2, True, [0.0]),
    (11, 4, True, [math.sqrt(2), 0.0, -math.sqrt(2)]),
    (4, 1, True, []),
])
def test_protected_eigenvalues(n, m, detuned, expected):
    vals = protected_eigenvalues(n, m, detuned)
    assert multiset_distance(vals, expected) < 1e-12 if expected else vals == []


@pytest.mark.parametrize("n, m, detuned", [(11, 4, True), (5, 2, True), (11, 3, False)])
def test_protected_values_survive_defects(n, m, detuned, rng):
    for _ in range(5):
        delta = float(rng.uniform(-1, 1)) if detuned else 0.0
        spec = DefectConfig(m, delta, float(rng.uniform(0, 2))).expand(n, 1.0)
        ev = np.linalg.eigvals(build_dense(spec))
        for v in protected_eigenvalues(n, m, detuned):
            assert np.min(np.abs(ev - v)) < 1e-7


def test_classify_state_examples():
    assert classify_state(3.0, 1.0, 2.0) == "bulk"
    assert classify_state(0.0, 1.0, 2.0) == "edge"


def test_complex_pair_is_edge_state():
    n, t1, t2 = 16, 1.0, 2.0
    spec = HamiltonianSpec.ssh(n, t1, t2, 0.05j, -0.05j)
    report, vectors = eigensystem(spec)
    complex_vecs = [v for v in vectors if abs(v.eigenvalue.imag) > 1e-10]
    assert len(complex_vecs) == 2
    bulk_ipr = max(inverse_participation_ratio(v.components) for v in vectors
                   if abs(v.eigenvalue.imag) <= 1e-10)
    for v in complex_vecs:
        assert classify_state(v.eigenvalue, t1, t2) == "edge"
        assert inverse_participation_ratio(v.components) > bulk_ipr


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6))
def test_phase_across_nearest_neighbour_threshold(seed, m):
    rng = np.random.default_rng(seed)
    t = random_pt_profile(rng, 2 * m)
    t_m = t[m - 1]
    delta = float(rng.uniform(-2, 2))
    for factor, phase in ((0.9, PTPhase.UNBROKEN), (1.1, PTPhase.MAXIMALLY_BROKEN)):
        rep = spectrum(DefectConfig(m, delta, factor * t_m).expand(2 * m, t))
        assert rep.phase is phase


def test_reality_tolerance_is_respected():
    spec = DefectConfig(1, 0.0, 0.999).expand(2, 1.0)
    assert spectrum(spec, tol_real=1e-8).phase is PTPhase.UNBROKEN
    spec = DefectConfig(1, 0.0, 1.001).expand(2, 1.0)
    assert spectrum(spec, tol_real=1e-8).phase is PTPhase.MAXIMALLY_BROKEN
    assert spectrum(spec, tol_real=0.1).phase is PTPhase.UNBROKEN
