from __future__ import annotations

from itertools import product

import numpy as np
import pytest

import brute
from zdquat.errors import ModulusMismatchError, NotAUnitError
from zdquat.lipschitz import LipschitzQuat, class_labels, element_array, qmul_array
from zdquat.mat2 import (
    IsoWitness,
    Mat2,
    ann_left,
    ann_right,
    count_zero_divisors,
    det_array,
    find_uv,
    mat_array,
    mat_to_quat,
    mmul_array,
    nonzero_zero_divisors,
    orbit_of,
    orbit_reduce,
    orbit_reps,
    quat_to_mat,
    quat_to_mat_array,
    right_orbit_reps,
    solve_homogeneous,
    zero_divisor_count_prediction,
)
from zdquat.ring_core import factorize


def test_matrix_arithmetic():
    x = Mat2.of([[1, 2], [3, 4]], 5)
    y = Mat2.of([[0, 1], [1, 0]], 5)
    assert (x * y).entries == (2, 1, 4, 3)
    assert (y * x).entries == (3, 4, 1, 2)
    assert x.det() == (4 - 6) % 5
    assert (x * x.inverse()) == Mat2.identity(x.spec)
    assert (x + Mat2.zero(x.spec)) == x
    assert Mat2.from_code(x.code, x.spec) == x
    with pytest.raises(NotAUnitError):
        Mat2.of([[1, 2], [2, 4]], 5).inverse()
    with pytest.raises(ModulusMismatchError):
        x * Mat2.identity(factorize(7))


def test_vectorized_matrix_product_matches_scalar():
    m = 6
    arr = mat_array(m)
    rng = np.random.default_rng(6)
    idx = rng.integers(0, len(arr), size=(3000, 2))
    prod = mmul_array(arr[idx[:, 0]], arr[idx[:, 1]], m)
    for (i, j), row in zip(idx, prod):
        assert tuple(row) == brute.mmul(tuple(arr[i]), tuple(arr[j]), m)


@pytest.mark.parametrize("p, alpha, expected", [(3, 1, 33), (5, 1, 145), (3, 2, 2673)])
def test_zero_divisor_count(p, alpha, expected):
    m = p**alpha
    assert zero_divisor_count_prediction(p, alpha) == expected
    assert count_zero_divisors(m) == expected
    assert len(brute.singular_matrices(m)) + 1 == expected


def test_zero_divisor_prediction_rejects_even_or_bad_input():
    with pytest.raises(ValueError):
        zero_divisor_count_prediction(2, 1)
    with pytest.raises(ValueError):
        zero_divisor_count_prediction(3, 0)


@pytest.mark.parametrize("p, alpha, uv", [(3, 1, (1, 1)), (5, 1, (0, 2))])
def test_find_uv_small_cases(p, alpha, uv):
    w = find_uv(p, alpha)
    assert (w.u, w.v) == uv


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101])
@pytest.mark.parametrize("alpha", [1, 2, 3, 4])
def test_find_uv_lifts(p, alpha):
    w = find_uv(p, alpha)
    m = p**alpha
    assert (w.u**2 + w.v**2 + 1) % m == 0
    assert w.modulus == m


def test_find_uv_rejects_non_odd_primes():
    for bad in (2, 9, 15):
        with pytest.raises(ValueError):
            find_uv(bad)
    with pytest.raises(ValueError):
        IsoWitness(5, 1, 1, 1)


@pytest.mark.parametrize("m", [3, 5, 7, 9])
def test_isomorphism_is_bijective(m):
    p, alpha = factorize(m).factors[0]
    w = find_uv(p, alpha)
    images = quat_to_mat_array(element_array(m), w)
    codes = images @ (m ** np.arange(4, dtype=np.int64))
    assert len(np.unique(codes)) == m**4


def test_isomorphism_is_multiplicative_exhaustive_m3():
    m, w = 3, find_uv(3)
    arr = element_array(m)
    x = np.repeat(arr, len(arr), axis=0)
    y = np.tile(arr, (len(arr), 1))
    lhs = quat_to_mat_array(qmul_array(x, y, m), w)
    rhs = mmul_array(quat_to_mat_array(x, w), quat_to_mat_array(y, w), m)
    assert np.array_equal(lhs, rhs)
    assert len(x) == 81**2


@pytest.mark.parametrize("m", [5, 7, 9])
def test_isomorphism_is_multiplicative_random(m):
    p, alpha = factorize(m).factors[0]
    w = find_uv(p, alpha)
    rng = np.random.default_rng(m)
    x = rng.integers(0, m, size=(100_000, 4))
    y = rng.integers(0, m, size=(100_000, 4))
    lhs = quat_to_mat_array(qmul_array(x, y, m), w)
    rhs = mmul_array(quat_to_mat_array(x, w), quat_to_mat_array(y, w), m)
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(quat_to_mat_array((x + y) % m, w), (quat_to_mat_array(x, w) + quat_to_mat_array(y, w)) % m)


def test_isomorphism_sends_basis_to_the_chosen_matrices():
    w = find_uv(5)
    spec = factorize(5)
    i = quat_to_mat(LipschitzQuat(0, 1, 0, 0, spec), w)
    j = quat_to_mat(LipschitzQuat(0, 0, 1, 0, spec), w)
    assert i.entries == (w.u, w.v, w.v, (-w.u) % 5)
    assert j.entries == (0, 4, 1, 0)
    assert quat_to_mat(LipschitzQuat(1, 0, 0, 0, spec), w) == Mat2.identity(spec)


@pytest.mark.parametrize("m", [3, 5, 9])
def test_scalar_maps_invert_each_other(m):
    p, alpha = factorize(m).factors[0]
    w = find_uv(p, alpha)
    spec = factorize(m)
    for code in range(0, m**4, 7):
        z = LipschitzQuat.from_code(code, spec)
        assert mat_to_quat(quat_to_mat(z, w), w) == z


@pytest.mark.parametrize("m", [3, 5, 9])
def test_classification_transfers(m):
    p, alpha = factorize(m).factors[0]
    w = find_uv(p, alpha)
    labels = class_labels(factorize(m))
    mats = quat_to_mat_array(element_array(m), w)
    singular = np.gcd(det_array(mats, m), m) != 1
    assert np.array_equal(labels == 1, ~singular)


def test_isomorphism_rejects_even_or_mismatched_moduli():
    w = find_uv(3)
    with pytest.raises(ValueError):
        quat_to_mat(LipschitzQuat.of(1, 1, 0, 0, 6), w)
    with pytest.raises(ModulusMismatchError):
        quat_to_mat(LipschitzQuat.of(1, 1, 0, 0, 5), w)


def _brute_orbits(p):
    units = [x for x in product(range(p), repeat=4) if (x[0] * x[3] - x[1] * x[2]) % p]
    out = []
    for rep in orbit_reps(p):
        r = rep.matrix().entries
        out.append({brute.mmul(u, r, p) for u in units})
    return out


@pytest.mark.parametrize("p", [2, 3, 5])
def test_orbits_partition_the_zero_divisors(p):
    orbits = _brute_orbits(p)
    assert len(orbits) == p + 1
    zd = set(brute.singular_matrices(p))
    assert set().union(*orbits) == zd
    assert sum(len(o) for o in orbits) == len(zd)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_orbit_reduction_is_a_certificate(p):
    orbits = _brute_orbits(p)
    reps = orbit_reps(p)
    spec = factorize(p)
    for entries in brute.singular_matrices(p):
        x = Mat2(*entries, spec)
        u, rep = orbit_reduce(x)
        assert u.is_unit()
        assert u * x == rep.matrix()
        assert entries in orbits[reps.index(rep)]
        assert orbit_of(x) == rep


def test_orbit_reduction_rejects_non_zero_divisors():
    with pytest.raises(ValueError):
        orbit_reduce(Mat2.identity(factorize(5)))
    with pytest.raises(ValueError):
        orbit_reduce(Mat2.zero(factorize(5)))
    with pytest.raises(ValueError):
        orbit_reps(9)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 9])
def test_annihilators_match_brute_force(m):
    spec = factorize(m)
    everything = list(product(range(m), repeat=4))
    stride = 1 if m < 9 else 17  # 2672 singular matrices at m = 9; sample them
    for entries in brute.singular_matrices(m)[::stride]:
        x = Mat2(*entries, spec)
        right = {y for y in everything if brute.mmul(entries, y, m) == (0, 0, 0, 0)}
        left = {y for y in everything if brute.mmul(y, entries, m) == (0, 0, 0, 0)}
        assert {y.entries for y in ann_right(x)} == right
        assert {y.entries for y in ann_left(x)} == left


@pytest.mark.parametrize("p", [2, 3, 5])
def test_annihilator_sizes_and_intersections(p):
    rights, lefts = set(), set()
    for x in nonzero_zero_divisors(p):
        r, l = ann_right(x), ann_left(x)
        assert len(r) == len(l) == p**2
        rights.add(r)
        lefts.add(l)
    assert len(rights) == len(lefts) == p + 1
    for side in (rights, lefts):
        for a in side:
            for b in side:
                if a != b:
                    assert {y.entries for y in a & b} == {(0, 0, 0, 0)}
    for r in rights:
        for l in lefts:
            assert len(r & l) == p


def test_right_orbit_representatives_cover_the_right_annihilators():
    p = 5
    reps = right_orbit_reps(p)
    assert len(reps) == p + 1
    lefts = {ann_left(x) for x in reps}
    assert len(lefts) == p + 1


def test_annihilators_reject_units_and_zero():
    spec = factorize(3)
    with pytest.raises(ValueError):
        ann_right(Mat2.identity(spec))
    with pytest.raises(ValueError):
        ann_left(Mat2.zero(spec))


@pytest.mark.parametrize("m", [4, 8, 9, 12, 27])
def test_solve_homogeneous_random_systems(m):
    rng = np.random.default_rng(m)
    for _ in range(15):
        a = rng.integers(0, m, size=(3, 3)).tolist()
        sols = solve_homogeneous(a, m)
        brute_sols = sorted(
            x for x in product(range(m), repeat=3) if all(sum(r[i] * x[i] for i in range(3)) % m == 0 for r in a)
        )
        assert sols == brute_sols
