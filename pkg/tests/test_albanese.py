import json
import math
from fractions import Fraction

import numpy as np
import pytest

from genjac.albanese import (PeriodMatrix, as_rational, build_period_matrix,
                             build_period_matrix_numeric, canonical_form, discreteness_check,
                             nodal_matrix, toroidal_test, verify)
from genjac.curve import SingularCurveSpec, cusp_spec, genus, node_spec, torus_spec, validate
from genjac.equivalence import check_witness
from genjac.errors import CapabilityError, DomainError
from genjac.lattice import unimodular_array
from conftest import random_point, random_tau
from oracles import brute_small_combination, rational_with_small_denominator

NODE_ORDER = ["gamma1", "alpha1", "beta1"]


def test_node_closed_form():
    tau, z1, z2 = 0.1 + 1.2j, 0.3 + 0.5j, 0.7 + 0.2j
    pm = build_period_matrix(node_spec(tau, z1, z2))
    assert pm.labels == ("alpha1", "beta1", "gamma1")
    want = np.array([[0, 1, tau], [1, 0, z1 - z2]])
    assert np.allclose(pm.reorder(NODE_ORDER).entries, want, atol=1e-15)


def test_node_numeric_agrees(rng):
    for _ in range(3):
        tau = random_tau(rng)
        spec = node_spec(tau, random_point(rng, tau), random_point(rng, tau))
        c, n = build_period_matrix(spec), build_period_matrix_numeric(spec)
        assert np.max(np.abs(c.entries - n.entries)) < 1e-8


def test_cusp_closed_form_and_numeric():
    tau = 0.2 + 1.3j
    spec = cusp_spec(tau, 0.4 + 0.5j)
    c = build_period_matrix(spec)
    assert np.allclose(c.entries, [[1, tau], [0, 0]])
    rep = verify(spec)
    sk = rep["second_kind"][0]
    # the Legendre relation gives eta1 tau - eta2 = 2 pi i, not the zero of the closed form
    assert sk["oracle_agrees"] and abs(sk["beta_oracle"] - 2j * math.pi) < 1e-12
    assert not sk["closed_form_agrees"]
    assert rep["residue_rows_agree"]


def test_two_nodes_shape_and_agreement():
    spec = torus_spec(0.1 + 1.1j, [0.1 + 0.1j, 0.45 + 0.3j, 0.2 + 0.7j, 0.7 + 0.8j], [[0, 1], [2, 3]])
    c = build_period_matrix(spec)
    assert (c.rows, c.cols) == (3, 5)
    assert c.compact().entries.shape == (3, 4)
    assert verify(spec)["agree"]


def test_triple_class_and_mixed():
    spec = torus_spec(0.1 + 1.1j, [0.1 + 0.1j, 0.45 + 0.3j, 0.7 + 0.8j, 0.3 + 0.5j],
                      [[0, 1, 2], [3]], [1, 1, 1, 3])
    rep = verify(spec)
    assert rep["residue_rows_agree"]
    assert [s["order"] for s in rep["second_kind"]] == [2, 3]
    assert all(s["oracle_agrees"] for s in rep["second_kind"])


def test_higher_genus_needs_supplied_h():
    tau = np.array([[1j, 0.2], [0.2, 1.5j]])
    spec = validate(SingularCurveSpec(2, ["A", "B"], [["A", "B"]], {"A": 1, "B": 1}, tau=tau))
    with pytest.raises(CapabilityError):
        build_period_matrix(spec)
    spec = validate(SingularCurveSpec(2, ["A", "B"], [["A", "B"]], {"A": 1, "B": 1}, tau=tau,
                                      supplied_h={"A": (0.1, 0.2j), "B": (0.3, 0.1)}))
    pm = build_period_matrix(spec)
    assert pm.entries.shape == (3, 5)
    assert np.allclose(pm.entries[2, 2:4], [-0.2, 0.2j - 0.1])
    with pytest.raises(CapabilityError):
        build_period_matrix_numeric(spec)


def test_json_round_trip():
    pm = nodal_matrix(1.5j, 0.3)
    doc = json.loads(pm.to_json())
    assert doc["rows"] == 2 and doc["cols"] == 3
    assert np.array_equal(PeriodMatrix.from_dict(doc).entries, pm.entries)
    with pytest.raises(DomainError):
        PeriodMatrix.from_dict({"entries": [[1, 2]]})


def test_discreteness():
    assert discreteness_check(nodal_matrix(2j, math.sqrt(2) / 2), bound=50)
    assert not discreteness_check(np.array([[1, 2, 0.5]]), bound=5)
    assert not discreteness_check(np.array([[1, 2], [0, 0]]), bound=3)


def test_discreteness_against_brute_force(rng):
    for _ in range(10):
        cols = rng.normal(size=(1, 3)) + 1j * rng.normal(size=(1, 3))
        cols[0, 2] = 2 * cols[0, 0] - cols[0, 1] + rng.normal() * 1e-3
        for tol in (1e-2, 1e-5):
            assert discreteness_check(cols, bound=3, tol=tol) == (not brute_small_combination(cols, 3, tol))


@pytest.mark.parametrize("a, toroidal", [
    (0.5, False), (1 / 3 + 0.4 * 2j, False), (math.sqrt(2) / 2, True), (0.25 + 0.75 * 2j, False),
    (math.pi / 4, True)])
def test_toroidal_nodal(a, toroidal):
    assert toroidal_test(nodal_matrix(2j, a), denom_bound=10 ** 4) is toroidal


def test_toroidal_against_rational_oracle(rng):
    tau = 1.7j + 0.2
    for _ in range(50):
        if rng.random() < 0.5:
            r = int(rng.integers(-9, 10)) / int(rng.integers(1, 30))
            q = int(rng.integers(-9, 10)) / int(rng.integers(1, 30))
        else:
            r, q = rng.random(), rng.random() * math.sqrt(2)
        a = r + q * tau
        want_not = (rational_with_small_denominator(r, 1000, 1e-9) is not None
                    and rational_with_small_denominator(q, 1000, 1e-9) is not None)
        assert toroidal_test(nodal_matrix(tau, a), denom_bound=1000) is (not want_not)


def test_as_rational():
    assert as_rational(0.5) == Fraction(1, 2)
    assert as_rational(math.sqrt(2)) is None


def test_canonical_forms():
    cf = canonical_form(build_period_matrix(cusp_spec(0.1 + 1.3j, 0.3)), base_tau=0.1 + 1.3j)
    assert (cf.p, cf.q, cf.compact) == (1, 0, True)
    assert cf.description == "C x J(X)"
    cf = canonical_form(nodal_matrix(2j, 0.5))
    assert (cf.p, cf.q) == (0, 1) and cf.description == "C* x torus"
    cf = canonical_form(nodal_matrix(2j, math.sqrt(2) / 2))
    assert (cf.p, cf.q, cf.block_dim, cf.kind0) == (0, 0, 2, True)
    assert cf.description == "quasi-abelian, kind 0"
    assert cf.p + cf.q + cf.block_dim == 2


def test_canonical_witness_chain():
    pm = build_period_matrix(torus_spec(0.1 + 1.1j, [0.1 + 0.1j, 0.45 + 0.3j, 0.2 + 0.7j, 0.7 + 0.8j],
                                        [[0, 1], [2, 3]])).compact()
    cf = canonical_form(pm)
    w = cf.witness
    assert np.allclose(w["M"] @ pm.entries @ w["A"], w["normalized"], atol=1e-9)
    assert cf.p + cf.q + cf.block_dim == pm.rows


def test_kind0_invariant_under_equivalence(rng):
    p = nodal_matrix(2j, math.sqrt(2) / 2).entries
    mats = unimodular_array(3, 1)
    for _ in range(5):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = mats[int(rng.integers(len(mats)))]
        q = m @ p @ a
        cf = canonical_form(q)
        assert cf.kind0 and cf.block_dim == 2 and cf.q == 0


def test_canonical_idempotent():
    cf = canonical_form(nodal_matrix(2j, math.sqrt(2) / 2))
    block = cf.toroidal_block
    again = canonical_form(block).toroidal_block
    # same block up to an allowed column move: check_witness with identity M
    found = any(check_witness(block.entries, again.entries, np.eye(2), a, 1e-9)
                for a in unimodular_array(3, 1))
    assert found


def test_cusp_only_p_matches_genus(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        pos = [0.1 + 0.25 * i + (0.2 + 0.2 * i) * 1.2j for i in range(n)]
        mult = [int(rng.integers(2, 4)) for _ in range(n)]
        spec = torus_spec(1.2j, pos, [[i] for i in range(n)], mult)
        cf = canonical_form(build_period_matrix(spec))
        assert cf.p == genus(spec).p


def test_numeric_cusp_classification():
    # with the numeric 2 pi i entry the second-kind row is a C* factor
    cf = canonical_form(build_period_matrix_numeric(cusp_spec(0.1 + 1.3j, 0.3 + 0.4j)))
    assert (cf.p, cf.q) == (0, 2)
