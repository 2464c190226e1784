"""GF(2) polynomial arithmetic and the LFSR stream generator

Polynomials are stored by their exponent set; the canonical integer form is the
coefficient bitmask (bit k set <=> x^k present), e.g. x^3+x^2+1 -> 0b1101 = 13.

Output convention
-----------------
For a generator g of degree n and a seed h of n bits the emitted sequence is

    s_t = h[t]                                      0 <= t < n
    s_t = s_{t-n} XOR (XOR of s_{t-k} for k in g, 1 <= k <= n-1)    t >= n

and the first n bits (the seed itself) are skipped. This is a Fibonacci register
whose characteristic polynomial is reciprocal(g): the label kept on GenPoly is the
generator as printed next to the optical register, not the characteristic
polynomial of the recurrence. Both have the same primitivity.
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache

import sympy

from optical_anonymity.bitstring import BitString
from optical_anonymity.exceptions import (
    InvalidPolynomialError,
    LengthMismatchError,
    UnsupportedDegreeError,
)

logger = logging.getLogger(__name__)

MIN_DEGREE = 2
MAX_ENUMERATION_DEGREE = 32
MAX_PERIOD_DEGREE = 20
MAX_FACTOR_DEGREE = 128

_TERM_RE = re.compile(r"^(?:(?P<one>1)|(?P<x>[xb])(?:\^(?P<exp>\d+))?)$")


@dataclass(frozen=True)
class GenPoly:
    """Monic binary polynomial, identified by its exponent set"""

    degree: int
    coeffs: frozenset[int]

    def __post_init__(self):
        if not self.coeffs:
            raise InvalidPolynomialError("Polynomial has no terms")
        if min(self.coeffs) < 0:
            raise InvalidPolynomialError(f"Negative exponent in {sorted(self.coeffs)}")
        if max(self.coeffs) != self.degree:
            raise InvalidPolynomialError(
                f"Degree {self.degree} does not match highest exponent {max(self.coeffs)}"
            )
        if self.degree < 1:
            raise InvalidPolynomialError(f"Degree must be at least 1, got {self.degree}")

    @classmethod
    def from_int(cls, mask: int) -> "GenPoly":
        if mask < 2:
            raise InvalidPolynomialError(f"Bitmask {mask} is not a polynomial of degree >= 1")
        exps = frozenset(k for k in range(mask.bit_length()) if (mask >> k) & 1)
        return cls(mask.bit_length() - 1, exps)

    @classmethod
    def from_exponents(cls, exponents) -> "GenPoly":
        exps = frozenset(exponents)
        if not exps:
            raise InvalidPolynomialError("Polynomial has no terms")
        return cls(max(exps), exps)

    @property
    def mask(self) -> int:
        return sum(1 << k for k in self.coeffs)

    @property
    def has_constant_term(self) -> bool:
        return 0 in self.coeffs

    def to_int(self) -> int:
        return self.mask

    def to_caret(self) -> str:
        terms = []
        for k in sorted(self.coeffs, reverse=True):
            if k == 0:
                terms.append("1")
            elif k == 1:
                terms.append("x")
            else:
                terms.append(f"x^{k}")
        return "+".join(terms)

    def __str__(self) -> str:
        return self.to_caret()


def parse_polynomial(spec: str | int) -> GenPoly:
    """
    Parse caret notation ("x^3+x^2+1", "b^3+b+1") or an integer bitmask.

    Integer-looking strings ("13", "0b1101", "0xd") are read as bitmasks.
    """
    if isinstance(spec, int):
        return GenPoly.from_int(spec)

    text = spec.strip().replace(" ", "").lower()
    if not text:
        raise InvalidPolynomialError("Empty polynomial text")
    if re.fullmatch(r"0[bx][0-9a-f]+|\d+", text) and text != "1":
        return GenPoly.from_int(int(text, 0))

    exponents: set[int] = set()
    for term in text.split("+"):
        match = _TERM_RE.match(term)
        if match is None:
            raise InvalidPolynomialError(f"Cannot parse term {term!r} in {spec!r}")
        if match.group("one"):
            k = 0
        elif match.group("exp") is not None:
            k = int(match.group("exp"))
        else:
            k = 1
        # terms cancel pairwise over GF(2)
        exponents ^= {k}
    if not exponents:
        raise InvalidPolynomialError(f"Polynomial {spec!r} reduces to zero")
    return GenPoly.from_exponents(exponents)


def reciprocal(p: GenPoly) -> GenPoly:
    """x^n * p(1/x); requires a nonzero constant term to keep the degree"""
    if not p.has_constant_term:
        raise InvalidPolynomialError(f"{p} has no constant term, reciprocal drops degree")
    return GenPoly.from_exponents(p.degree - k for k in p.coeffs)


# ---------------------------------------------------------------------
# GF(2)[x] arithmetic on bitmasks
# ---------------------------------------------------------------------

# byte -> 16-bit value with a zero inserted after every bit (squaring over GF(2))
_SPREAD = [sum(((b >> i) & 1) << (2 * i) for i in range(8)) for b in range(256)]


def _polymod(a: int, m: int) -> int:
    deg_m = m.bit_length() - 1
    while (d := a.bit_length() - 1) >= deg_m:
        a ^= m << (d - deg_m)
    return a


def _mulmod(a: int, b: int, m: int) -> int:
    deg_m = m.bit_length() - 1
    top = 1 << deg_m
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= m
    return result


def _sqrmod(a: int, m: int) -> int:
    spread = 0
    shift = 0
    while a:
        spread |= _SPREAD[a & 0xFF] << shift
        a >>= 8
        shift += 16
    return _polymod(spread, m)


def _powmod_x(exponent: int, m: int) -> int:
    """x^exponent mod m, square-and-multiply from the top bit"""
    result = 1
    for bit in bin(exponent)[2:]:
        result = _sqrmod(result, m)
        if bit == "1":
            result = _mulmod(result, 0b10, m)
    return _polymod(result, m)


@lru_cache(maxsize=None)
def _irreducible_masks(degree: int) -> tuple[int, ...]:
    """All irreducible polynomials of exactly ``degree``, as bitmasks"""
    found = []
    for mask in range(1 << degree, 1 << (degree + 1)):
        if not any(
            _polymod(mask, q) == 0
            for d in range(1, degree // 2 + 1)
            for q in _irreducible_masks(d)
        ):
            found.append(mask)
    return tuple(found)


@lru_cache(maxsize=None)
def _order_prime_factors(n: int) -> tuple[int, ...]:
    return tuple(sympy.primefactors(2**n - 1))


def is_irreducible(p: GenPoly) -> bool:
    """True iff p has no nontrivial factor over GF(2)"""
    mask = p.mask
    for d in range(1, p.degree // 2 + 1):
        for q in _irreducible_masks(d):
            if _polymod(mask, q) == 0:
                return False
    return True


def _has_full_order(mask: int, n: int) -> bool:
    # x^(2^n) == x  <=>  order of x divides 2^n - 1
    x = 0b10
    acc = x
    for _ in range(n):
        acc = _sqrmod(acc, mask)
    if acc != _polymod(x, mask):
        return False
    order = (1 << n) - 1
    return all(_powmod_x(order // q, mask) != 1 for q in _order_prime_factors(n))


def is_primitive(p: GenPoly) -> bool:
    """
    True iff p is irreducible and x has multiplicative order 2^n - 1 modulo p.

    The order test runs first; irreducibility is confirmed only for survivors.
    """
    if not p.has_constant_term:
        return False
    if p.degree == 1:
        # x + 1: the group of GF(2) is trivial
        return True
    return _has_full_order(p.mask, p.degree) and is_irreducible(p)


def enumerate_primitive(n: int) -> list[GenPoly]:
    """All primitive polynomials of degree n, ascending by bitmask"""
    if not MIN_DEGREE <= n <= MAX_ENUMERATION_DEGREE:
        raise UnsupportedDegreeError(
            f"Enumeration supports {MIN_DEGREE} <= n <= {MAX_ENUMERATION_DEGREE}, got {n}"
        )
    found = [
        GenPoly.from_int(mask)
        for mask in range((1 << n) | 1, 1 << (n + 1), 2)
        if _has_full_order(mask, n)
    ]
    # full order already rules out reducible candidates; irreducibility is re-checked
    # so the list honours the definition literally
    primitive = [p for p in found if is_irreducible(p)]
    logger.debug(f"Enumerated {len(primitive)} primitive polynomial(s) of degree {n}")
    return primitive


def max_primitive_count(n: int, max_degree: int = MAX_FACTOR_DEGREE) -> int:
    """phi(2^n - 1) / n, the number of primitive polynomials of degree n"""
    if n < MIN_DEGREE:
        raise UnsupportedDegreeError(f"Degree must be at least {MIN_DEGREE}, got {n}")
    if n > max_degree:
        raise UnsupportedDegreeError(
            f"Factoring 2^{n}-1 is outside the configured budget (n <= {max_degree})"
        )
    return int(sympy.totient(2**n - 1)) // n


# ---------------------------------------------------------------------
# Register
# ---------------------------------------------------------------------


def _feedback_mask(p: GenPoly) -> int:
    if not p.has_constant_term:
        raise InvalidPolynomialError(f"Generator {p} has no constant term, it cannot drive a register")
    # window bit k-1 holds s_{t-k}; exponent 0 is not a tap, exponent n is s_{t-n}
    return p.mask >> 1


def lfsr_stream(p: GenPoly, seed: BitString, count: int) -> BitString:
    """
    Emit ``count`` bits after the seed (seed bits are skipped).

    Args:
        p: generator polynomial of degree n
        seed: initial register content, seed[0] is s_0
        count: number of output bits L
    """
    n = p.degree
    if seed.length != n:
        raise LengthMismatchError(f"Seed has {seed.length} bit(s), register {p} needs {n}")
    if count < 0:
        raise ValueError(f"Bit count must be non-negative, got {count}")

    taps = _feedback_mask(p)
    full = (1 << n) - 1
    window = seed.value
    out = 0
    for _ in range(count):
        fb = (window & taps).bit_count() & 1
        window = ((window << 1) & full) | fb
        out = (out << 1) | fb
    return BitString(out, count)


def lfsr_state_period(p: GenPoly, seed: BitString) -> int:
    """Smallest t >= 1 after which the n-bit register window repeats the seed"""
    n = p.degree
    if n > MAX_PERIOD_DEGREE:
        raise UnsupportedDegreeError(
            f"Period search supports n <= {MAX_PERIOD_DEGREE}, got {n}"
        )
    if seed.length != n:
        raise LengthMismatchError(f"Seed has {seed.length} bit(s), register {p} needs {n}")

    taps = _feedback_mask(p)
    full = (1 << n) - 1
    window = seed.value
    t = 0
    while True:
        fb = (window & taps).bit_count() & 1
        window = ((window << 1) & full) | fb
        t += 1
        if window == seed.value:
            return t


def lfsr_cycle_structure(p: GenPoly) -> list[tuple[BitString, int]]:
    """
    Partition all nonzero seeds into register cycles.

    Returns (smallest seed on the cycle, cycle length) pairs sorted by seed.
    A primitive generator yields a single cycle of length 2^n - 1.
    """
    n = p.degree
    if n > MAX_PERIOD_DEGREE:
        raise UnsupportedDegreeError(
            f"Cycle structure supports n <= {MAX_PERIOD_DEGREE}, got {n}"
        )
    taps = _feedback_mask(p)
    full = (1 << n) - 1
    seen = bytearray(1 << n)
    cycles = []
    for start in range(1, 1 << n):
        if seen[start]:
            continue
        window = start
        length = 0
        while not seen[window]:
            seen[window] = 1
            fb = (window & taps).bit_count() & 1
            window = ((window << 1) & full) | fb
            length += 1
        cycles.append((BitString(start, n), length))
    return cycles
