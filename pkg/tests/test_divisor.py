import pytest

from genjac.curve import cusp_spec, genus, node_spec
from genjac.divisor import (Divisor, ExtendedDivisor, Multiconstant, RRResult, add, check_prime_to,
                            degree, format_divisor, geq, is_strictly_positive, parse_divisor,
                            rr_chi, validate_extended)
from genjac.errors import DivisorError, DomainError, ParseError

NODE = node_spec(1j, 0.2, 0.6 + 0.3j)
CUSP = cusp_spec(1j, 0.4 + 0.4j)
GN = genus(NODE)


def test_degree_add_geq():
    assert degree(Divisor()) == 0
    d = parse_divisor("P1' + P2' - Q")
    assert degree(d) == 1
    p = Divisor({"P": 1})
    assert geq(p, Divisor()) and not geq(parse_divisor("P - Q"), Divisor())
    assert is_strictly_positive(p) and not is_strictly_positive(Divisor())
    assert add(p, -p) == Divisor()


def test_parse_and_format():
    d = parse_divisor("2*A - B + C")
    assert d.weights == {"A": 2, "B": -1, "C": 1}
    assert parse_divisor(format_divisor(d)) == d
    assert parse_divisor("0") == Divisor() and parse_divisor("  ") == Divisor()
    assert parse_divisor("3A - A") == Divisor({"A": 2})
    with pytest.raises(ParseError) as exc:
        parse_divisor("2*A -")
    assert exc.value.column == 6
    with pytest.raises(ParseError):
        parse_divisor("A B")
    with pytest.raises(ParseError):
        parse_divisor("A / B")


def test_rr_known_cases():
    assert rr_chi(Divisor(), GN).as_dict() == {"chi": -1, "h0": 1, "h1": 2}
    r = rr_chi(Divisor({"Q": -1}), GN)
    assert (r.chi, r.h0, r.h1) == (-2, 0, 2)
    r = rr_chi(Divisor({"Q": 5}), GN)
    assert (r.chi, r.h0, r.h1) == (4, None, None)


def test_rr_additivity(rng):
    names = [f"R{i}" for i in range(6)]
    for _ in range(100):
        w = {n: int(rng.integers(-4, 5)) for n in rng.choice(names, 3, replace=False)}
        d = Divisor(w)
        p = Divisor({str(rng.choice(names)): 1})
        assert rr_chi(d + p, GN).chi == rr_chi(d, GN).chi + 1


def test_rr_result_invariant():
    with pytest.raises(DomainError):
        RRResult(1, 2, 2)


def test_prime_to_s():
    with pytest.raises(DivisorError):
        rr_chi(Divisor({"P1": 1}), GN, NODE)
    with pytest.raises(DivisorError):
        check_prime_to(Divisor({1.2 + 1j: 1}), NODE)
    check_prime_to(Divisor({0.3 + 0.1j: 1}), NODE)


def test_extended_divisors():
    assert validate_extended(ExtendedDivisor(Divisor(), {("P1", "P2"): (1, 1)}), NODE)
    assert not validate_extended(ExtendedDivisor(Divisor(), {("P1", "P2"): (1, -1)}), NODE)
    assert not validate_extended(ExtendedDivisor(Divisor(), {("P",): (1,)}), CUSP)
    assert validate_extended(ExtendedDivisor(Divisor(), {("P",): (-2,)}), CUSP)
    with pytest.raises(DivisorError):
        validate_extended(ExtendedDivisor(Divisor(), {("P1",): (1,)}), NODE)


def test_multiconstant_nonzero():
    with pytest.raises(DomainError):
        Multiconstant({("P",): 0})
    assert Multiconstant({("P",): 2})[("P",)] == 2
