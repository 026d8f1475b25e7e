import math

import numpy as np
import pytest

from genjac.albanese import nodal_matrix
from genjac.equivalence import (A0, EquivalenceWitness, NodalGenus2Curve, check_witness,
                                derived_params, equivalent_nodal, nodal_biholomorphic,
                                nodal_witnesses, witness_M)
from genjac.errors import DomainError, WitnessError
from genjac.lattice import unimodular_array

TAU = 2j


def test_check_witness_basic():
    p = nodal_matrix(TAU, 0.3)
    assert check_witness(p, p, np.eye(2), np.eye(3, dtype=int))
    assert not check_witness(p, p, np.eye(2) + 1e-6, np.eye(3, dtype=int))
    with pytest.raises(WitnessError):
        check_witness(p, p, np.zeros((2, 2)), np.eye(3, dtype=int))
    with pytest.raises(DomainError):
        check_witness(p, p, np.eye(3), np.eye(3, dtype=int))


def test_one_minus_b():
    b = math.sqrt(3) - 1
    pb, pc = nodal_matrix(TAU, b), nodal_matrix(TAU, 1 - b)
    m = witness_M(A0, TAU, 0, b)
    assert check_witness(pc, pb, m, A0)
    assert derived_params(A0, TAU, 0, b) == pytest.approx((0, 1 - b, TAU))


def test_derived_params_identity_and_round_trip(rng):
    assert derived_params(np.eye(3, dtype=int), TAU, 0.2, 0.3) == pytest.approx((0.2, 0.3, TAU))
    mats = unimodular_array(3, 1)
    for _ in range(20):
        a = mats[int(rng.integers(len(mats)))]
        try:
            s, t, tau = derived_params(a, TAU, 0.1, 0.37)
        except WitnessError:
            continue
        target = np.array([[0, 1, tau], [1, s, t]])
        src = np.array([[0, 1, TAU], [1, 0.1, 0.37]])
        assert check_witness(target, src, witness_M(a, TAU, 0.1, 0.37), a)


def test_derived_params_rejections():
    with pytest.raises(WitnessError):
        derived_params(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]), TAU, 0, 0.3)
    with pytest.raises(WitnessError):
        derived_params(np.eye(3) * 2, TAU, 0, 0.3)


def test_equivalent_nodal_cases():
    b = math.sqrt(2) / 2
    w = equivalent_nodal(nodal_matrix(TAU, b), nodal_matrix(TAU, b), 1)
    assert np.array_equal(w.A, np.eye(3, dtype=int))
    w = equivalent_nodal(nodal_matrix(TAU, b), nodal_matrix(TAU, 1 - b), 1)
    assert np.array_equal(w.A, A0) or np.array_equal(w.A, -A0)
    self_set = {tuple(x.A.ravel()) for x in nodal_witnesses(nodal_matrix(TAU, b), nodal_matrix(TAU, b), 2)}
    assert self_set == {tuple(np.eye(3, dtype=int).ravel()), tuple(-np.eye(3, dtype=int).ravel())}


def test_no_witness_for_unrelated(rng):
    for _ in range(5):
        a, b = rng.random() * math.sqrt(2) % 1, rng.random() * math.sqrt(3) % 1
        assert equivalent_nodal(nodal_matrix(TAU, a), nodal_matrix(TAU, b), 2) is None


def test_witness_serialization():
    w = EquivalenceWitness(np.eye(2), A0)
    assert np.array_equal(EquivalenceWitness.from_dict(w.to_dict()).A, A0)
    with pytest.raises(WitnessError):
        EquivalenceWitness(np.eye(2), np.eye(3) * 2)


def test_nodal_biholomorphic():
    c1 = NodalGenus2Curve(TAU, 0.5, 0.2)
    assert nodal_biholomorphic(c1, c1) == (True, 1)
    c2 = NodalGenus2Curve(TAU, 0.1, 0.4)
    assert nodal_biholomorphic(c1, c2) == (True, -1)
    c3 = NodalGenus2Curve(TAU, 0.55, 0.2)
    assert not nodal_biholomorphic(c1, c3).biholomorphic
    # square lattice: multiplication by i is an automorphism
    s1, s2 = NodalGenus2Curve(1j, 0.3, 0), NodalGenus2Curve(1j, 0.3j, 0)
    bh = nodal_biholomorphic(s1, s2)
    assert bh.biholomorphic and abs(bh.gamma - 1j) < 1e-12 or abs(bh.gamma + 1j) < 1e-12
    with pytest.raises(DomainError):
        NodalGenus2Curve(TAU, 0.3, 1.3)


def test_reflected_difference_is_biholomorphic():
    # 1 - a = -a mod Z, so z1 - z2 = a and z1' - z2' = 1 - a differ by gamma = -1
    a = math.sqrt(2) / 2
    bh = nodal_biholomorphic(NodalGenus2Curve(TAU, a, 0), NodalGenus2Curve(TAU, 1 - a, 0))
    assert bh == (True, -1)
