import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genjac import elliptic as ell
from genjac.errors import DomainError, ParseError, PoleError
from genjac.mero import Leaf, evaluate, evaluate_dual, is_constant, parse, check_well_formed

CTX = ell.make_context(0.15 + 1.2j)


def test_single_leaf():
    e = parse("wp(z)")
    assert isinstance(e.root, Leaf) and len(e.leaves()) == 1
    assert evaluate(e, CTX, 0.3) == pytest.approx(ell.wp(CTX, 0.3))


def test_quotient_structure():
    e = parse("sigma(z-0.3)*sigma(z+0.3)/(sigma(z-0.1)*sigma(z+0.5))")
    assert len(e.leaves()) == 4
    assert [leaf.center for leaf in e.leaves()] == [0.3, -0.3, 0.1, -0.5]


def test_syntax_errors_have_columns():
    with pytest.raises(ParseError) as exc:
        parse("wp(z")
    assert exc.value.column == 5
    with pytest.raises(ParseError) as exc:
        parse("foo(z)")
    assert exc.value.column == 1 and "wp" in str(exc.value)
    with pytest.raises(ParseError):
        parse("wp(z)^1.5")
    with pytest.raises(ParseError):
        parse("wp(z) wp(z)")


def test_complex_literals_and_offsets():
    e = parse("wp(z-(0.3+0.2i))")
    assert e.leaves()[0].center == 0.3 + 0.2j
    e = parse("wp(z-0.3-0.2i)")
    assert e.leaves()[0].center == 0.3 + 0.2j
    assert evaluate(parse("2i*3"), CTX, 0.1) == 6j
    assert evaluate(parse("wp(0.3)"), CTX, 0.7) == pytest.approx(ell.wp(CTX, 0.3))
    assert is_constant(parse("wp(0.3)^2 - 1"))
    assert not is_constant(parse("wp(z) - 1"))


def test_arithmetic_and_powers():
    z = 0.31 + 0.22j
    p, dp = ell.wp(CTX, z), ell.wp_prime(CTX, z)
    e = parse("-wp(z)^2 + 3*wpp(z)/wp(z) - wp(z)^-1")
    assert evaluate(e, CTX, z) == pytest.approx(-p ** 2 + 3 * dp / p - 1 / p)


def test_dual_derivative_matches_finite_difference():
    e = parse("sigma(z-0.3)*wp(z+0.1i)/(wpp(z)+2)")
    z, h = 0.37 + 0.41j, 1e-6
    v, dv = evaluate_dual(e, CTX, z)
    fd = (evaluate(e, CTX, z + h) - evaluate(e, CTX, z - h)) / (2 * h)
    assert abs(dv - fd) < 1e-5 * max(1, abs(fd))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["wp", "wpp", "sigma"]),
                          st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=4),
       st.lists(st.sampled_from(["+", "-", "*", "/"]), min_size=3, max_size=3))
def test_text_round_trip(leaves, ops):
    parts = [f"{name}(z-({a!r}{'+' if b >= 0 else '-'}{abs(b)!r}i))" for name, a, b in leaves]
    src = parts[0]
    for op, part in zip(ops, parts[1:]):
        src = f"({src}){op}{part}"
    e = parse(src)
    again = parse(e.text())
    z = 0.123 + 0.456j
    try:
        v1 = evaluate(e, CTX, z)
    except PoleError:
        return
    v2 = evaluate(again, CTX, z)
    assert abs(v1 - v2) <= 1e-12 * max(1, abs(v1))


def test_poles():
    with pytest.raises(PoleError):
        evaluate(parse("wp(z-0.3)"), CTX, 0.3)
    with pytest.raises(PoleError):
        evaluate(parse("1/sigma(z)"), CTX, 0.0)


def test_identically_zero_denominator():
    with pytest.raises(DomainError):
        check_well_formed(parse("1/(wp(z)-wp(z))"), CTX)
    check_well_formed(parse("1/wp(z)"), CTX)


def test_constant_everywhere():
    e = parse("2.5")
    zs = np.array([0.1, 0.3 + 0.4j, 2 + 1j])
    assert np.all(evaluate(e, CTX, zs) == 2.5)
