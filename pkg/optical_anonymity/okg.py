"""Optical key generator (oKG) simulation

A low-rate pRNG emits a true secret key R = [p', h] per reset cycle; the oKG reads
p' as the index of one of P parallel LFSRs and h as its seed, and that LFSR then
emits one key part of L_k bits. N reset cycles make one anonymization key.
"""

import hashlib
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from optical_anonymity.bitstring import BitString
from optical_anonymity.exceptions import (
    ConfigurationError,
    SourceUnderrunError,
    WeakKeyError,
)
from optical_anonymity.lfsr_engine import (
    GenPoly,
    enumerate_primitive,
    is_primitive,
    lfsr_stream,
    max_primitive_count,
)

logger = logging.getLogger(__name__)

REFERENCE_GENERATOR = "sha256-ctr"


# =============================================================================
# Configuration and key types
# =============================================================================


@dataclass(frozen=True)
class OkgConfig:
    """Parameters of one key generator: P registers of length n, N parts of L_k bits"""

    polys: tuple[GenPoly, ...]
    L_k: int
    N: int
    reject_zero_seed: bool = False
    non_repeating: bool = False

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if not self.polys:
            raise ConfigurationError("At least one generator polynomial is required")
        degrees = {p.degree for p in self.polys}
        if len(degrees) != 1:
            raise ConfigurationError(f"All registers must share one length, got {sorted(degrees)}")
        if len(set(self.polys)) != len(self.polys):
            raise ConfigurationError("Generator polynomials must be pairwise distinct")
        for p in self.polys:
            if not is_primitive(p):
                raise ConfigurationError(f"Generator {p} is not primitive")
        p_max = max_primitive_count(self.n)
        if not 1 <= self.P <= p_max:
            raise ConfigurationError(f"P={self.P} outside 1..{p_max} for n={self.n}")
        if self.L_k < 1 or self.N < 1:
            raise ConfigurationError(f"L_k and N must be >= 1, got L_k={self.L_k}, N={self.N}")
        if self.non_repeating and self.P < 2:
            raise ConfigurationError("Non-repeating schedules need at least two registers")

    @classmethod
    def from_degree(cls, n: int, P: int, L_k: int, N: int, **options) -> "OkgConfig":
        """Use the first P primitive polynomials of degree n (ascending bitmask)"""
        return cls(tuple(enumerate_primitive(n)[:P]), L_k, N, **options)

    @property
    def n(self) -> int:
        return self.polys[0].degree

    @property
    def P(self) -> int:
        return len(self.polys)

    @property
    def index_width(self) -> int:
        return math.ceil(math.log2(self.P)) if self.P > 1 else 0

    @property
    def record_width(self) -> int:
        return self.index_width + self.n

    @property
    def key_length(self) -> int:
        return self.N * self.L_k


@dataclass(frozen=True)
class TrueSecretRecord:
    """One reset cycle's pRNG output R = [p', h]"""

    lfsr_index: int
    seed: BitString

    @property
    def zero_seed(self) -> bool:
        return self.seed.is_zero()


@dataclass(frozen=True)
class AnonKey:
    """An anonymization key and the schedule that produced it"""

    bits: BitString
    schedule: tuple[TrueSecretRecord, ...]
    parts: tuple[BitString, ...] = field(default=())

    @property
    def weak(self) -> bool:
        return any(r.zero_seed for r in self.schedule)

    def __len__(self) -> int:
        return self.bits.length


@dataclass(frozen=True)
class KeyOverhead:
    """Secret bits consumed vs. key bits produced for one key"""

    secret_bits: int
    key_bits: int

    @property
    def expansion(self) -> float:
        return self.key_bits / self.secret_bits


# =============================================================================
# Bit sources
# =============================================================================


class PrngSource(ABC):
    """
    Stateful bit stream feeding the oKG.

    A source must not be consumed from two concurrent contexts.
    """

    generator: str = "abstract"

    def __init__(self, ini: str, rate_bps: float | None = None):
        self.ini = ini
        self.rate_bps = rate_bps
        self.consumed = 0

    @abstractmethod
    def _draw(self, count: int) -> BitString:
        """Return exactly ``count`` fresh bits or raise SourceUnderrunError"""

    @property
    def available(self) -> int | None:
        """Bits left, or None for an unbounded stream"""
        return None

    def take(self, count: int) -> BitString:
        if count < 0:
            raise ValueError(f"Bit count must be non-negative, got {count}")
        bits = self._draw(count)
        self.consumed += count
        return bits

    def take_int(self, width: int) -> int:
        """Read ``width`` bits as a big-endian unsigned integer"""
        return self.take(width).value


class ReferencePrng(PrngSource):
    """
    Deterministic stand-in for the electronic pRNG.

    Block i of the stream is SHA-256(ini || ":" || i) with i as a decimal counter,
    emitted most significant bit first. Identical ``ini`` tokens give identical
    streams on every node.
    """

    generator = REFERENCE_GENERATOR

    def __init__(self, ini: str, rate_bps: float | None = None):
        super().__init__(ini, rate_bps)
        self._block = 0
        self._buffer = 0
        self._buffered = 0

    def _next_block(self) -> int:
        digest = hashlib.sha256(f"{self.ini}:{self._block}".encode()).digest()
        self._block += 1
        return int.from_bytes(digest, "big")

    def _draw(self, count: int) -> BitString:
        while self._buffered < count:
            self._buffer = (self._buffer << 256) | self._next_block()
            self._buffered += 256
        rest = self._buffered - count
        value = self._buffer >> rest
        self._buffer &= (1 << rest) - 1
        self._buffered = rest
        return BitString(value, count)


class InjectedSource(PrngSource):
    """Explicit bit sequence standing in for the pRNG output"""

    generator = "injected"

    def __init__(self, bits: BitString | str, ini: str = "injected"):
        super().__init__(ini)
        self.bits = BitString.from_str(bits) if isinstance(bits, str) else bits

    @property
    def remaining(self) -> int:
        return self.bits.length - self.consumed

    @property
    def available(self) -> int | None:
        return self.remaining

    def _draw(self, count: int) -> BitString:
        if count > self.remaining:
            raise SourceUnderrunError(count, self.remaining)
        return self.bits.slice(self.consumed, self.consumed + count)


def reference_prng(ini: str, count: int) -> BitString:
    """First ``count`` bits of the reference stream for ``ini``"""
    return ReferencePrng(ini).take(count)


def monobit_fraction(bits: BitString) -> float:
    """Fraction of ones; 0.5 for a balanced stream"""
    if bits.length == 0:
        return 0.0
    return float(np.mean(bits.to_array()))


def runs_count(bits: BitString) -> int:
    """Number of maximal runs of identical bits"""
    if bits.length == 0:
        return 0
    return int(np.count_nonzero(np.diff(bits.to_array().astype(np.int8)))) + 1


# =============================================================================
# Key generation
# =============================================================================


def parse_record(
    source: PrngSource, config: OkgConfig, previous_index: int | None = None
) -> TrueSecretRecord:
    """
    Read one true secret key R = [p', h] from the source.

    p' is read as a big-endian integer of ``index_width`` bits and reduced modulo P.
    With ``config.non_repeating`` and a previous cycle, it is reduced modulo P - 1
    and mapped onto the registers other than ``previous_index``.
    """
    width = config.record_width
    available = source.available
    if available is not None and available < width:
        raise SourceUnderrunError(width, available)

    raw = source.take_int(config.index_width)
    if config.non_repeating and previous_index is not None:
        index = raw % (config.P - 1)
        if index >= previous_index:
            index += 1
    else:
        index = raw % config.P
    seed = source.take(config.n)
    return TrueSecretRecord(lfsr_index=index, seed=seed)


def generate_key(
    config: OkgConfig, source: PrngSource, length: int | None = None
) -> AnonKey:
    """
    Run the reset cycles and concatenate the key parts.

    Args:
        config: generator parameters
        source: pRNG stand-in or injected bits
        length: key length in bits; defaults to N * L_k. Otherwise
            ceil(length / L_k) parts are generated and the last one truncated.
    """
    if length is None:
        length = config.key_length
        cycles = config.N
    else:
        cycles = -(-length // config.L_k)

    schedule = []
    parts = []
    previous = None
    for cycle in range(cycles):
        record = parse_record(source, config, previous_index=previous)
        if record.zero_seed:
            if config.reject_zero_seed:
                raise WeakKeyError(f"All-zero seed drawn in reset cycle {cycle}")
            logger.warning(f"Reset cycle {cycle}: all-zero seed, key part is all zeros")
        part = lfsr_stream(config.polys[record.lfsr_index], record.seed, config.L_k)
        logger.debug(
            f"Cycle {cycle}: LFSR {record.lfsr_index} ({config.polys[record.lfsr_index]}), "
            f"seed {record.seed} -> {part}"
        )
        schedule.append(record)
        parts.append(part)
        previous = record.lfsr_index

    bits = BitString.concat(parts).truncate(length)
    logger.info(
        f"Generated {bits.length}-bit key over {cycles} reset cycle(s) "
        f"from {source.generator} source '{source.ini}'"
    )
    return AnonKey(bits=bits, schedule=tuple(schedule), parts=tuple(parts))


def replay_schedule(
    config: OkgConfig, schedule: Sequence[TrueSecretRecord], length: int | None = None
) -> BitString:
    """Rebuild key bits from a schedule without a source"""
    bits = BitString.concat(
        lfsr_stream(config.polys[r.lfsr_index], r.seed, config.L_k) for r in schedule
    )
    return bits.truncate(length if length is not None else bits.length)


def interruption_profile(key: AnonKey) -> tuple[int, int]:
    """(interrupted, clean) counts over consecutive reset cycles"""
    interrupted = sum(
        1
        for prev, cur in zip(key.schedule, key.schedule[1:])
        if prev.lfsr_index == cur.lfsr_index
    )
    clean = max(len(key.schedule) - 1, 0) - interrupted
    return interrupted, clean


def key_overhead(config: OkgConfig) -> KeyOverhead:
    return KeyOverhead(secret_bits=config.N * config.record_width, key_bits=config.key_length)
