"""Tests for GF(2) polynomials and the LFSR stream generator"""

import pytest

from optical_anonymity.bitstring import BitString
from optical_anonymity.exceptions import (
    InvalidPolynomialError,
    LengthMismatchError,
    UnsupportedDegreeError,
)
from optical_anonymity.lfsr_engine import (
    GenPoly,
    enumerate_primitive,
    is_irreducible,
    is_primitive,
    lfsr_cycle_structure,
    lfsr_state_period,
    lfsr_stream,
    max_primitive_count,
    parse_polynomial,
    reciprocal,
)

pytestmark = pytest.mark.unit


def bits(text: str) -> BitString:
    return BitString.from_str(text)


class TestParsePolynomial:
    @pytest.mark.parametrize(
        "text, mask",
        [
            ("x^3+x^2+1", 0b1101),
            ("x^3 + x + 1", 0b1011),
            ("b^3+b+1", 0b1011),
            ("1+x+x^3", 0b1011),
            ("13", 0b1101),
            ("0b1101", 0b1101),
            ("0xd", 0b1101),
        ],
    )
    def test_formats(self, text, mask):
        assert parse_polynomial(text).mask == mask

    def test_integer_input(self):
        assert parse_polynomial(11) == GenPoly.from_exponents({3, 1, 0})
        assert parse_polynomial("x^3+x+1").to_int() == 11

    def test_repeated_terms_cancel(self):
        assert parse_polynomial("x^3+x+x+1").to_caret() == "x^3+1"

    def test_caret_output_is_canonical(self):
        assert parse_polynomial("1+x^2+x^3").to_caret() == "x^3+x^2+1"
        assert str(parse_polynomial("x^4+x+1")) == "x^4+x+1"

    @pytest.mark.parametrize("text", ["", "x^^3+1", "y^2+1", "x+x"])
    def test_invalid(self, text):
        with pytest.raises(InvalidPolynomialError):
            parse_polynomial(text)

    def test_reciprocal(self):
        assert reciprocal(parse_polynomial("x^3+x+1")) == parse_polynomial("x^3+x^2+1")
        with pytest.raises(InvalidPolynomialError):
            reciprocal(parse_polynomial("x^3+x"))


class TestIrreducibility:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("x^3+x+1", True),
            ("x^2+1", False),
            ("x^4+x^3+x^2+x+1", True),
            ("x^4+x^2+1", False),
            ("x^2+x+1", True),
        ],
    )
    def test_is_irreducible(self, text, expected):
        assert is_irreducible(parse_polynomial(text)) is expected

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("x^3+x^2+1", True),
            ("x^4+x^3+x^2+x+1", False),
            ("x^2+x+1", True),
            ("x^4+x+1", True),
            ("x^3+x", False),
        ],
    )
    def test_is_primitive(self, text, expected):
        assert is_primitive(parse_polynomial(text)) is expected


class TestEnumeration:
    def test_degree_three(self):
        assert enumerate_primitive(3) == [parse_polynomial("x^3+x+1"), parse_polynomial("x^3+x^2+1")]

    def test_degree_two(self):
        assert enumerate_primitive(2) == [parse_polynomial("x^2+x+1")]

    def test_degree_five_sorted(self):
        polys = enumerate_primitive(5)
        assert len(polys) == 6
        assert [p.mask for p in polys] == sorted(p.mask for p in polys)
        assert all(is_primitive(p) for p in polys)

    @pytest.mark.parametrize("n, count", [(3, 2), (4, 2), (7, 18), (8, 16), (31, 69273666)])
    def test_max_primitive_count(self, n, count):
        assert max_primitive_count(n) == count

    @pytest.mark.slow
    def test_counts_match_totient(self):
        for n in range(2, 17):
            assert len(enumerate_primitive(n)) == max_primitive_count(n), f"n={n}"

    @pytest.mark.parametrize("n", [1, 33])
    def test_enumeration_bounds(self, n):
        with pytest.raises(UnsupportedDegreeError):
            enumerate_primitive(n)

    def test_count_budget(self):
        with pytest.raises(UnsupportedDegreeError):
            max_primitive_count(1)
        with pytest.raises(UnsupportedDegreeError):
            max_primitive_count(64, max_degree=32)


class TestLfsrStream:
    @pytest.mark.parametrize(
        "poly, seed, expected",
        [
            ("x^3+x+1", "101", "00111"),
            ("x^3+x^2+1", "100", "10111"),
            ("x^3+x^2+1", "010", "11100"),
            ("x^3+x+1", "110", "10011"),
        ],
    )
    def test_key_parts(self, poly, seed, expected):
        assert str(lfsr_stream(parse_polynomial(poly), bits(seed), 5)) == expected

    def test_zero_seed(self):
        assert lfsr_stream(parse_polynomial("x^5+x^2+1"), BitString.zeros(5), 40).is_zero()

    def test_zero_length(self):
        assert len(lfsr_stream(parse_polynomial("x^3+x+1"), bits("101"), 0)) == 0

    def test_seed_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            lfsr_stream(parse_polynomial("x^3+x+1"), bits("1011"), 5)

    def test_generator_needs_constant_term(self):
        p = parse_polynomial("x^3+x")
        with pytest.raises(InvalidPolynomialError, match="constant term"):
            lfsr_stream(p, bits("101"), 5)
        with pytest.raises(InvalidPolynomialError):
            lfsr_state_period(p, bits("101"))
        with pytest.raises(InvalidPolynomialError):
            lfsr_cycle_structure(p)

    def test_deterministic(self):
        p = parse_polynomial("x^7+x+1")
        assert lfsr_stream(p, bits("1010011"), 500) == lfsr_stream(p, bits("1010011"), 500)

    def test_output_period(self):
        p = parse_polynomial("x^3+x+1")
        out = str(lfsr_stream(p, bits("101"), 21))
        assert out[:7] == out[7:14] == out[14:]

    def test_linearity(self, rng):
        polys = {n: enumerate_primitive(n) for n in range(3, 13)}
        for _ in range(1000):
            n = rng.randint(3, 12)
            p = rng.choice(polys[n])
            h1 = BitString(rng.getrandbits(n), n)
            h2 = BitString(rng.getrandbits(n), n)
            L = rng.randint(1, 64)
            assert lfsr_stream(p, h1 ^ h2, L) == lfsr_stream(p, h1, L) ^ lfsr_stream(p, h2, L)


class TestPeriods:
    @pytest.mark.parametrize(
        "poly, seed, period",
        [
            ("x^3+x+1", "101", 7),
            ("x^3+x+1", "000", 1),
            ("x^4+x^3+x^2+x+1", "0001", 5),
            ("x^4+x+1", "1000", 15),
        ],
    )
    def test_state_period(self, poly, seed, period):
        assert lfsr_state_period(parse_polynomial(poly), bits(seed)) == period

    def test_period_bound(self):
        with pytest.raises(UnsupportedDegreeError):
            lfsr_state_period(parse_polynomial("x^21+x^2+1"), BitString.zeros(21))

    @pytest.mark.slow
    def test_every_primitive_register_has_one_cycle(self):
        for n in range(2, 11):
            for p in enumerate_primitive(n):
                assert lfsr_cycle_structure(p) == [(BitString(1, n), 2**n - 1)], str(p)

    def test_sampled_periods_up_to_sixteen(self, rng):
        for n in (12, 14, 16):
            p = enumerate_primitive(n)[0]
            seed = BitString(rng.getrandbits(n) | 1, n)
            assert lfsr_state_period(p, seed) == 2**n - 1

    def test_reducible_cycle_structure(self):
        cycles = lfsr_cycle_structure(parse_polynomial("x^4+x^3+x^2+x+1"))
        assert [length for _, length in cycles] == [5, 5, 5]
        assert cycles[0][0] == bits("0001")
