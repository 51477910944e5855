import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptchain import SpecError
from ptchain.lattice import (DefectConfig, HamiltonianSpec, ParityOperator, build_dense,
                             check_pt_symmetry, dump_spec, is_centrohermitian, load_spec,
                             spec_from_dict, spec_to_dict, transpose_symmetrize)
from ptchain.spectra import multiset_distance


def test_build_dense_two_site():
    h = build_dense(HamiltonianSpec(2, (1.0,), (1j, -1j)))
    np.testing.assert_array_equal(h, [[1j, 1], [1, -1j]])


def test_build_dense_corners():
    h = build_dense(HamiltonianSpec(3, (1.0, 1.0), (0, 0, 0), 2.0, 2.0))
    assert h[0, 2] == 2 and h[2, 0] == 2
    assert h[0, 1] == 1 and h[1, 2] == 1


def test_defect_expansion_diagonal():
    spec = DefectConfig(1, 0.3, 0.7).expand(4, 1.0)
    np.testing.assert_allclose(np.diag(build_dense(spec)), [0.3 + 0.7j, 0, 0, 0.3 - 0.7j])


@pytest.mark.parametrize("kwargs", [
    dict(n=1, t=(), z=(0,)),
    dict(n=3, t=(1.0,), z=(0, 0, 0)),
    dict(n=3, t=(1.0, 1.0), z=(0, 0)),
])
def test_dimension_mismatch_rejected(kwargs):
    with pytest.raises(SpecError):
        HamiltonianSpec(**kwargs)


def test_defect_config_rules():
    with pytest.raises(SpecError):
        DefectConfig(1, 0.0, -0.1)
    with pytest.raises(SpecError):
        DefectConfig(3, 0.0, 0.1).expand(5)


@pytest.mark.parametrize("spec, expected", [
    (HamiltonianSpec(2, (1.0,), (1j, -1j)), True),
    (HamiltonianSpec(3, (1.0, 1.0), (1j, 0, 1j)), False),
    (HamiltonianSpec(4, (1.0, 1.0, 1.0), (0, 0, 0, 0), 0.5j, -0.5j), True),
    (HamiltonianSpec(4, (1.0, 2.0, 1.5), (0, 0, 0, 0)), False),
])
def test_check_pt_symmetry_examples(spec, expected):
    assert check_pt_symmetry(spec) is expected


def test_parity_is_involution():
    P = ParityOperator(5)
    assert P.index(1) == 5 and P.index(3) == 3
    v = np.arange(5.0)
    np.testing.assert_array_equal(P.apply(P.apply(v)), v)
    np.testing.assert_array_equal(P.matrix() @ P.matrix(), np.eye(5))


def test_transpose_symmetrize_two_site():
    spec, S = transpose_symmetrize([4.0], [1.0], [0.0, 0.0])
    assert spec.t == (2.0,)
    np.testing.assert_allclose(np.diag(S), [1, 2])
    H = np.array([[0, 1], [4, 0]], dtype=complex)
    np.testing.assert_allclose(np.linalg.inv(S) @ H @ S, build_dense(spec))


def test_transpose_symmetrize_identity_on_symmetric_input():
    spec, S = transpose_symmetrize([1.0, 2.0], [1.0, 2.0], [0.5, 0.0, -0.5])
    np.testing.assert_allclose(S, np.eye(3))
    assert spec.t == (1.0, 2.0)


def test_transpose_symmetrize_spectrum():
    spec, _ = transpose_symmetrize([1.0, 9.0], [1.0, 1.0], [0.0, 0.0, 0.0])
    assert spec.t == (1.0, 3.0)
    H = np.diag([1.0, 9.0], -1) + np.diag([1.0, 1.0], 1)
    assert multiset_distance(np.linalg.eigvals(H), np.linalg.eigvals(build_dense(spec))) < 1e-12


def test_transpose_symmetrize_zero_bond():
    with pytest.raises(SpecError):
        transpose_symmetrize([0.0], [1.0], [0, 0])


def _random_pt_spec(rng, n, corners=False):
    half = rng.uniform(0.3, 2.0, n // 2)
    t = tuple(float(half[min(k, n - 2 - k)]) for k in range(n - 1))
    z = np.zeros(n, dtype=complex)
    for k in range(n // 2):
        z[k] = complex(*rng.normal(size=2))
        z[n - 1 - k] = z[k].conjugate()
    if n % 2:
        z[n // 2] = rng.normal()
    tl = complex(*rng.normal(size=2)) if corners else 0j
    return HamiltonianSpec(n, t, tuple(z), tl, tl.conjugate())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12), corners=st.booleans())
def test_pt_spectrum_is_conjugation_closed(seed, n, corners):
    spec = _random_pt_spec(np.random.default_rng(seed), n, corners and n > 2)
    assert check_pt_symmetry(spec)
    assert is_centrohermitian(build_dense(spec))
    ev = np.linalg.eigvals(build_dense(spec))
    assert multiset_distance(ev, ev.conj()) < 1e-8 * max(1.0, np.max(np.abs(ev)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_centrohermitian_iff_pt(seed, n):
    rng = np.random.default_rng(seed)
    spec = _random_pt_spec(rng, n)
    if rng.random() < 0.5:
        z = list(spec.z)
        z[0] += 0.3j
        spec = spec.replace(z=tuple(z))
    assert check_pt_symmetry(spec) == is_centrohermitian(build_dense(spec))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_chiral_pairing(seed, n):
    rng = np.random.default_rng(seed)
    half = rng.uniform(0.3, 2.0, n // 2)
    t = tuple(float(half[min(k, n - 2 - k)]) for k in range(n - 1))
    m = int(rng.integers(1, n // 2 + 1))
    g = float(rng.uniform(0, 2))
    plus = DefectConfig(m, 0.0, g).expand(n, t)
    minus = plus.replace(z=tuple(-v for v in plus.z))
    a = np.linalg.eigvals(build_dense(plus))
    b = np.linalg.eigvals(build_dense(minus))
    assert multiset_distance(a, -b) < 1e-7


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10))
def test_transpose_symmetrize_preserves_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(0.2, 3.0, n - 1)
    up = rng.uniform(0.2, 3.0, n - 1)
    z = rng.normal(size=n)
    spec, S = transpose_symmetrize(lo, up, z)
    H = np.diag(z) + np.diag(lo, -1) + np.diag(up, 1)
    np.testing.assert_allclose(np.linalg.inv(S) @ H @ S, build_dense(spec), atol=1e-12)
    ev = np.linalg.eigvals(H)
    assert multiset_distance(ev, np.linalg.eigvals(build_dense(spec))) < 1e-10 * max(1, np.abs(ev).max())


def test_json_round_trip(rng):
    spec = _random_pt_spec(rng, 7, corners=True)
    again = spec_from_dict(json.loads(dump_spec(spec)))
    assert again == spec
    assert spec_to_dict(again) == spec_to_dict(spec)


def test_json_shorthand():
    spec = load_spec('{"n": 6, "t1": 0.5, "t2": 2.0, "defect": {"m": 1, "delta": 0.1, "gamma": 0.4}}')
    assert spec.t == (0.5, 2.0, 0.5, 2.0, 0.5)
    assert spec.z[0] == 0.1 + 0.4j and spec.z[5] == 0.1 - 0.4j
    uniform = load_spec('{"n": 4, "t1": 1.5}')
    assert uniform.t == (1.5, 1.5, 1.5)


@pytest.mark.parametrize("text", ['{"t1": 1}', '{"n": 3}', '{"n": "3", "t1": 1}', "[1, 2]", "{bad"])
def test_json_errors(text):
    with pytest.raises(SpecError):
        load_spec(text)
