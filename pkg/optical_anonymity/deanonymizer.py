"""Brute-force deanonymization oracle

Enumerates every oKG schedule (one register index and one seed per reset cycle),
rebuilds the full-length key and checks whether the intercepted flow decrypts to
the known plaintext or to one of the outgoing flows of the node. Only whole
containers are compared; there is no per-cycle pruning.

Enumeration order: each reset cycle has P * 2^n choices c, with register index
c // 2^n and seed c % 2^n. Schedules are numbered as an odometer over these
choices, first cycle most significant.

With a non-repeating configuration, schedules that pick the same register in two
consecutive cycles are skipped and counted in neither tries nor degenerate tries.
"""

import logging
import math
import time
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from optical_anonymity.bitstring import BitString
from optical_anonymity.exceptions import BudgetExceededError, ConfigurationError, LengthMismatchError
from optical_anonymity.lfsr_engine import lfsr_stream
from optical_anonymity.okg import OkgConfig, TrueSecretRecord

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
YEAR_SECONDS = 31_536_000


# =============================================================================
# Keyspace and time
# =============================================================================


def keyspace_paper(P: int, N: int, n: int) -> int:
    """P^N * (2^n - 1): register combinations times one seed factor"""
    _check_space_args(P, N, n)
    return P**N * (2**n - 1)


def keyspace_true(P: int, N: int, n: int) -> int:
    """(P * (2^n - 1))^N: an independent register and nonzero seed per cycle"""
    _check_space_args(P, N, n)
    return (P * (2**n - 1)) ** N


def keyspace_non_repeating(P: int, N: int, n: int) -> int:
    """P * (P-1)^(N-1) * (2^n - 1)^N: no register twice in a row, nonzero seeds"""
    _check_space_args(P, N, n)
    return P * (P - 1) ** (N - 1) * (2**n - 1) ** N


def schedule_count(P: int, N: int, n: int) -> int:
    """(P * 2^n)^N: every schedule the odometer visits, zero seeds included"""
    _check_space_args(P, N, n)
    return (P << n) ** N


def _check_space_args(P: int, N: int, n: int):
    if P < 1 or N < 1 or n < 2:
        raise ValueError(f"Keyspace needs P >= 1, N >= 1, n >= 2; got P={P}, N={N}, n={n}")


@dataclass(frozen=True)
class Duration:
    """Attack duration, kept in the log2 domain so huge values stay finite"""

    log2_seconds: float

    @classmethod
    def from_count(cls, count: int, tau: float) -> "Duration":
        """count tries of tau seconds each; count may be an arbitrarily large int"""
        if tau <= 0:
            raise ValueError(f"Time per try must be positive, got {tau}")
        if count <= 0:
            return cls(-math.inf)
        return cls(math.log2(count) + math.log2(tau))

    @property
    def seconds(self) -> float:
        try:
            return 2.0**self.log2_seconds
        except OverflowError:
            return math.inf

    @property
    def years(self) -> float:
        return self.seconds / YEAR_SECONDS

    @property
    def log10_seconds(self) -> float:
        return self.log2_seconds * math.log10(2)

    @property
    def log10_years(self) -> float:
        return self.log10_seconds - math.log10(YEAR_SECONDS)

    def scaled(self, factor: float) -> "Duration":
        if factor <= 0:
            raise ValueError(f"Scale factor must be positive, got {factor}")
        return Duration(self.log2_seconds + math.log2(factor))

    def __str__(self) -> str:
        if math.isfinite(self.seconds):
            return f"{self.seconds:.4g} s ({self.years:.4g} years)"
        return f"10^{self.log10_years:.2f} years"


def attack_time(keyspace: int, tau: float) -> Duration:
    """Time to try every key once (T^b over P^N * (2^n - 1) keys)"""
    return Duration.from_count(keyspace, tau)


def layered_time(T_b: Duration, layers: int) -> Duration:
    """T^M = K * T^b, removing ``layers`` encryption layers"""
    if layers < 1:
        raise ValueError(f"At least one layer must be removed, got {layers}")
    return T_b.scaled(layers)


def circuit_time(T_b: Duration, r: int) -> Duration:
    """T^L = r * T^b, revealing a whole circuit of r key-holding nodes"""
    if r < 1:
        raise ValueError(f"A circuit has at least one key-holding node, got r={r}")
    return T_b.scaled(r)


# =============================================================================
# Scenario and report
# =============================================================================


@dataclass(frozen=True)
class AttackScenario:
    """What the attacker intercepted and what it correlates against"""

    intercepted: BitString
    config: OkgConfig
    reference: BitString | None = None
    outgoing: frozenset[BitString] | None = None
    layers_to_remove: int = 1

    def __post_init__(self):
        if (self.reference is None) == (self.outgoing is None):
            raise ConfigurationError("Give exactly one of a known plaintext or outgoing flows")
        if self.outgoing is not None:
            object.__setattr__(self, "outgoing", frozenset(self.outgoing))
        L_M = self.intercepted.length
        flows = [self.reference] if self.reference is not None else list(self.outgoing or ())
        for flow in flows:
            if flow.length != L_M:
                raise LengthMismatchError(
                    f"Flow of {flow.length} bit(s) differs from intercepted {L_M} bit(s)"
                )
        if self.layers_to_remove < 1:
            raise ConfigurationError(f"layers_to_remove must be >= 1, got {self.layers_to_remove}")


@dataclass(frozen=True)
class ScheduleMatch:
    """A schedule whose key maps the intercepted flow onto a candidate flow"""

    index: int
    schedule: tuple[TrueSecretRecord, ...]
    flow: BitString
    degenerate: bool

    def pairs(self) -> list[tuple[int, str]]:
        return [(r.lfsr_index, str(r.seed)) for r in self.schedule]


@dataclass
class AttackReport:
    """Outcome of one exhaustive search"""

    matches: list[ScheduleMatch] = field(default_factory=list)
    tries: int = 0
    degenerate_tries: int = 0
    keyspace_paper: int = 0
    keyspace_true: int = 0
    elapsed: float = 0.0
    tau: float = 1e-18

    @property
    def tau_equivalent(self) -> float:
        """tries * tau, the figure comparable with the closed-form T^b"""
        return self.tries * self.tau

    def summary(self) -> dict:
        return {
            "tries": self.tries,
            "degenerate_tries": self.degenerate_tries,
            "matches": len(self.matches),
            "keyspace_paper": self.keyspace_paper,
            "keyspace_true": self.keyspace_true,
            "elapsed_s": self.elapsed,
            "tau_equivalent_s": self.tau_equivalent,
        }


# =============================================================================
# Search
# =============================================================================


@dataclass(frozen=True)
class _SearchJob:
    start: int
    stop: int
    parts: tuple[int, ...]
    cycles: int
    L_k: int
    n: int
    drop: int
    intercepted: int
    targets: frozenset[int]
    non_repeating: bool = False


def _search_range(job: _SearchJob) -> tuple[list[tuple[int, int]], int, int]:
    """Scan schedule indices [start, stop); returns (hits, tries, degenerate tries)"""
    base = len(job.parts)
    seed_mask = (1 << job.n) - 1
    hits = []
    tries = 0
    degenerate = 0
    for index in range(job.start, job.stop):
        key = 0
        zero_seed = False
        rest = index
        shift = 0
        previous = -1
        repeated = False
        # least significant digit first: last cycle, lowest key bits
        for _ in range(job.cycles):
            rest, choice = divmod(rest, base)
            register = choice >> job.n
            if job.non_repeating and register == previous:
                repeated = True
                break
            previous = register
            key |= job.parts[choice] << shift
            shift += job.L_k
            if choice & seed_mask == 0:
                zero_seed = True
        if repeated:
            continue
        key >>= job.drop
        if zero_seed:
            degenerate += 1
        else:
            tries += 1
        flow = job.intercepted ^ key
        if flow in job.targets:
            hits.append((index, flow))
    return hits, tries, degenerate


def _decode_schedule(index: int, config: OkgConfig, cycles: int) -> tuple[TrueSecretRecord, ...]:
    base = config.P << config.n
    choices = []
    for _ in range(cycles):
        index, choice = divmod(index, base)
        choices.append(choice)
    choices.reverse()
    return tuple(
        TrueSecretRecord(lfsr_index=c >> config.n, seed=BitString(c & ((1 << config.n) - 1), config.n))
        for c in choices
    )


def _partition(total: int, chunks: int) -> list[tuple[int, int]]:
    chunks = max(1, min(chunks, total)) if total else 1
    step, extra = divmod(total, chunks)
    ranges = []
    start = 0
    for i in range(chunks):
        stop = start + step + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def _run_search(
    intercepted: BitString,
    targets: Iterable[BitString],
    config: OkgConfig,
    budget: int,
    workers: int,
    tau: float,
) -> AttackReport:
    L_M = intercepted.length
    cycles = -(-L_M // config.L_k)
    if cycles != config.N:
        raise LengthMismatchError(
            f"Flow of {L_M} bit(s) needs {cycles} key part(s), configuration has N={config.N}"
        )
    visited = schedule_count(config.P, config.N, config.n)
    if visited > budget:
        raise BudgetExceededError(visited, budget)
    if 10 * visited > 9 * budget:
        logger.warning(f"Search visits {visited} schedule(s), over 90% of the budget {budget}")
    if config.non_repeating:
        space_true = keyspace_non_repeating(config.P, config.N, config.n)
        logger.info(f"Skipping schedules that repeat a register; {space_true} nonzero schedule(s) remain")
    else:
        space_true = keyspace_true(config.P, config.N, config.n)

    parts = tuple(
        lfsr_stream(config.polys[c >> config.n], BitString(c & ((1 << config.n) - 1), config.n), config.L_k).value
        for c in range(config.P << config.n)
    )
    total = len(parts) ** cycles
    job_template = dict(
        parts=parts,
        cycles=cycles,
        L_k=config.L_k,
        n=config.n,
        drop=cycles * config.L_k - L_M,
        intercepted=intercepted.value,
        targets=frozenset(t.value for t in targets),
        non_repeating=config.non_repeating,
    )
    jobs = [_SearchJob(start=a, stop=b, **job_template) for a, b in _partition(total, workers)]

    started = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_range, jobs))
    else:
        results = [_search_range(job) for job in jobs]
    elapsed = time.perf_counter() - started

    hits = sorted(hit for chunk, _, _ in results for hit in chunk)
    report = AttackReport(
        matches=[
            _make_match(index, flow, config, cycles, L_M) for index, flow in hits
        ],
        tries=sum(t for _, t, _ in results),
        degenerate_tries=sum(d for _, _, d in results),
        keyspace_paper=keyspace_paper(config.P, config.N, config.n),
        keyspace_true=space_true,
        elapsed=elapsed,
        tau=tau,
    )
    logger.info(
        f"Search over {total} schedule(s) in {len(jobs)} range(s): "
        f"{len(report.matches)} match(es), {report.tries} tries, {elapsed:.3f} s"
    )
    return report


def _make_match(index: int, flow: int, config: OkgConfig, cycles: int, L_M: int) -> ScheduleMatch:
    schedule = _decode_schedule(index, config, cycles)
    return ScheduleMatch(
        index=index,
        schedule=schedule,
        flow=BitString(flow, L_M),
        degenerate=any(r.zero_seed for r in schedule),
    )


def brute_force_recover(
    scenario: AttackScenario,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    tau: float = 1e-18,
) -> AttackReport:
    """Known-plaintext search: every schedule with intercepted xor key == reference"""
    if scenario.reference is None:
        raise ConfigurationError("Known-plaintext recovery needs a reference plaintext")
    if scenario.layers_to_remove != 1:
        raise ConfigurationError("Exhaustive recovery removes exactly one layer")
    return _run_search(
        scenario.intercepted, [scenario.reference], scenario.config, budget, workers, tau
    )


def correlate_flows(
    intercepted: BitString,
    outgoing: Iterable[BitString],
    config: OkgConfig,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    tau: float = 1e-18,
) -> AttackReport:
    """Pair the intercepted input flow with outgoing flows of the node"""
    flows = frozenset(outgoing)
    for flow in flows:
        if flow.length != intercepted.length:
            raise LengthMismatchError(
                f"Outgoing flow of {flow.length} bit(s) differs from intercepted "
                f"{intercepted.length} bit(s)"
            )
    if len(flows) >= 2**intercepted.length:
        raise BudgetExceededError(
            len(flows),
            budget,
            message="Outgoing flows cover every possible container, every schedule matches",
        )
    return _run_search(intercepted, flows, config, budget, workers, tau)
