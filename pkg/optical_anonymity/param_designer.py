"""Reverse-engineering calculator for oKG parameters

Given the register length n, the number of parallel registers P, the container
length L_M, the line rates and a target brute-force duration, computes the
key-part length, the reset count, the switching time, the pRNG bit rates and the
attack durations, and sweeps them over (n, P) grids.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, field, replace

from optical_anonymity.deanonymizer import (
    Duration,
    attack_time,
    circuit_time,
    keyspace_paper,
    layered_time,
)
from optical_anonymity.exceptions import BrokenConfigurationError, InfeasibleDesignError

logger = logging.getLogger(__name__)

DEFAULT_TAU = 1e-18
DEFAULT_LINE_RATE = 1e11
# slack for log2-domain comparisons (AES references, zero log arguments)
AES_TOLERANCE_BITS = 1e-6

CALIBRATIONS = {
    # 1.25 Gbit container, read with binary or decimal prefixes
    "binary": 1_342_177_280,
    "decimal": 1_250_000_000,
}

# smallest register length reported as beating AES, per (reference, P)
PUBLISHED_CROSSOVERS = {
    (128, 2): 28,
    (256, 4): 52,
    (256, 3): 98,
}

# switching times in microseconds for the 1.25 Gbit / AES-128 design point
REFERENCE_SWITCH_US = {
    (5, 2): 109, (5, 3): 173, (5, 4): 218,
    (10, 2): 114, (10, 3): 180, (10, 4): 227,
    (15, 2): 119, (15, 3): 188, (15, 4): 238,
    (20, 2): 124, (20, 3): 197, (20, 4): 249,
}

CSV_COLUMNS = [
    "n",
    "P",
    "L_k_bits",
    "N",
    "t_rc_us",
    "C1R_bps",
    "C2R_bps",
    "CR_bps",
    "Tb_log10_years",
    "Tbhat_log10_years",
    "aes128_flag",
    "aes256_flag",
]

INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class DesignInput:
    """Inputs of one design point"""

    n: int
    P: int
    L_M: int
    C: float = DEFAULT_LINE_RATE
    C_L: float = DEFAULT_LINE_RATE
    tau: float = DEFAULT_TAU
    target_Tb: float = 2.0**128 * DEFAULT_TAU
    N_override: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise InfeasibleDesignError(f"Register length must be >= 2, got n={self.n}")
        if self.P < 1:
            raise InfeasibleDesignError(f"At least one register is required, got P={self.P}")
        for name in ("L_M", "C", "C_L", "tau", "target_Tb"):
            if getattr(self, name) <= 0:
                raise InfeasibleDesignError(f"{name} must be positive, got {getattr(self, name)}")
        if self.N_override is not None and self.N_override < 1:
            raise InfeasibleDesignError(f"N_override must be >= 1, got {self.N_override}")

    @property
    def target_log2(self) -> float:
        return math.log2(self.target_Tb)


@dataclass(frozen=True)
class DesignReport:
    """All derived quantities of one design point"""

    input: DesignInput
    L_k: int
    N: int
    N_cover: int
    t_rc: float
    C1_R: float | None
    C2_R: float | None
    C_R: float | None
    T_b: Duration
    T_b_hat: Duration | None
    T_M: Duration
    T_L: Duration
    notes: tuple[str, ...] = field(default=())

    @property
    def key_length(self) -> int:
        """L_K = N * L_k"""
        return self.N * self.L_k

    @property
    def L_k_mbit_decimal(self) -> float:
        return self.L_k / 1e6

    @property
    def L_k_mbit_binary(self) -> float:
        return self.L_k / 2**20

    @property
    def t_rc_us(self) -> float:
        return self.t_rc * 1e6


@dataclass(frozen=True)
class CrossoverResult:
    """Smallest n for which T^b reaches an AES reference"""

    P: int
    N: int
    key_bits: int
    computed: int | None
    published: int | None

    @property
    def deviates(self) -> bool:
        return self.published is not None and self.computed != self.published


# =============================================================================
# Equations
# =============================================================================


def optimal_key_length(design: DesignInput) -> int:
    """L_k = floor(L_M * log2(P) / log2(target_Tb / (tau * (2^n - 1))))"""
    if design.P < 2:
        raise InfeasibleDesignError(
            f"P={design.P}: a single register gives log2(P) = 0 and no usable key length"
        )
    denominator = design.target_log2 - math.log2(design.tau) - math.log2(2**design.n - 1)
    if denominator <= AES_TOLERANCE_BITS:
        raise InfeasibleDesignError(
            f"Target duration {design.target_Tb:g} s does not exceed one full seed sweep "
            f"tau*(2^{design.n}-1); the logarithm is not positive"
        )
    L_k = math.floor(design.L_M * math.log2(design.P) / denominator)
    if L_k < 1:
        raise InfeasibleDesignError(f"Key-part length rounds down to {L_k} bits")
    return L_k


def resets(L_M: int, L_k: int) -> int:
    """
    Reset count N = L_M / L_k rounded down (at least 1).

    The key-part length is itself rounded down, so the ratio lands just above an
    integer at the published design points; covering_resets gives the count that
    actually covers the container.
    """
    if L_k < 1:
        raise InfeasibleDesignError(f"Key-part length must be >= 1, got {L_k}")
    return max(1, L_M // L_k)


def covering_resets(L_M: int, L_k: int) -> int:
    """ceil(L_M / L_k): parts needed so the key spans the whole container"""
    if L_k < 1:
        raise InfeasibleDesignError(f"Key-part length must be >= 1, got {L_k}")
    return -(-L_M // L_k)


def switch_time(L_k: int, C: float) -> float:
    """t_rc = L_k / C in seconds"""
    if C <= 0:
        raise InfeasibleDesignError(f"Line rate must be positive, got {C}")
    return L_k / C


def prng_rates(design: DesignInput, L_k: int) -> tuple[float, float, float]:
    """
    Minimal pRNG bit rates.

    Returns:
        (C1_R with interruption, C2_R without interruption, C_R weighted mean)
    """
    n, P = design.n, design.P
    if P < 2:
        raise InfeasibleDesignError("The mean pRNG rate needs P >= 2")
    if L_k <= n:
        raise InfeasibleDesignError(
            f"L_k={L_k} <= n={n}: the next register cannot be initialised within one cycle"
        )
    record_bits = n + math.log2(P)
    C1_R = record_bits * design.C_L / (2 * n + L_k)
    C2_R = record_bits * design.C_L / (L_k - n)
    C_R = C1_R / P + (P - 1) / P * C2_R
    return C1_R, C2_R, C_R


def bfa_time(P: int, N: int, n: int, tau: float) -> Duration:
    """T^b = P^N * tau * (2^n - 1)"""
    return attack_time(keyspace_paper(P, N, n), tau)


def interrupted_keyspace(P: int, N: int, n: int) -> int:
    """P * (P-1)^(N-1) * (2^n - 1): no register is chosen twice in a row"""
    if P < 2:
        raise BrokenConfigurationError(
            f"P={P}: without repeats there is no second register, the keyspace is empty"
        )
    if N < 1 or n < 2:
        raise InfeasibleDesignError(f"Keyspace needs N >= 1, n >= 2; got N={N}, n={n}")
    return P * (P - 1) ** (N - 1) * (2**n - 1)


def bfa_time_interrupted(P: int, N: int, n: int, tau: float) -> Duration:
    """T^b with interruption-avoiding schedules"""
    return attack_time(interrupted_keyspace(P, N, n), tau)


def aes_reference(key_bits: int, tau: float = DEFAULT_TAU) -> Duration:
    """2^key_bits tries of tau seconds"""
    if key_bits < 0:
        raise ValueError(f"Key size must be non-negative, got {key_bits}")
    return Duration(key_bits + math.log2(tau))


def meets(duration: Duration, reference: Duration) -> bool:
    return duration.log2_seconds >= reference.log2_seconds - AES_TOLERANCE_BITS


# =============================================================================
# Design points and sweeps
# =============================================================================


def reference_design(n: int, P: int, calibration: str = "binary") -> DesignInput:
    """Design input for the 1.25 Gbit container, 100 Gb/s, AES-128 target"""
    if calibration not in CALIBRATIONS:
        raise InfeasibleDesignError(
            f"Unknown calibration '{calibration}', expected one of {sorted(CALIBRATIONS)}"
        )
    return DesignInput(n=n, P=P, L_M=CALIBRATIONS[calibration])


def design_point(design: DesignInput, layers: int = 1, r: int = 1) -> DesignReport:
    """
    Evaluate one design point.

    Without N_override, L_k follows from the target duration and N from L_k.
    With N_override, N is fixed and L_k = ceil(L_M / N).

    Raises:
        InfeasibleDesignError: L_k cannot be derived or pRNG rates are undefined
    """
    notes = []
    if design.N_override is None:
        L_k = optimal_key_length(design)
        N = resets(design.L_M, L_k)
    else:
        N = design.N_override
        L_k = covering_resets(design.L_M, N)
    N_cover = covering_resets(design.L_M, L_k)
    if N_cover != N:
        notes.append(f"{N} resets leave {design.L_M - N * L_k} bit(s) uncovered; {N_cover} cover L_M")

    C1_R, C2_R, C_R = prng_rates(design, L_k)

    T_b = bfa_time(design.P, N, design.n, design.tau)
    try:
        T_b_hat = bfa_time_interrupted(design.P, N, design.n, design.tau)
    except BrokenConfigurationError as e:
        T_b_hat = None
        notes.append(str(e))

    report = DesignReport(
        input=design,
        L_k=L_k,
        N=N,
        N_cover=N_cover,
        t_rc=switch_time(L_k, design.C),
        C1_R=C1_R,
        C2_R=C2_R,
        C_R=C_R,
        T_b=T_b,
        T_b_hat=T_b_hat,
        T_M=layered_time(T_b, layers),
        T_L=circuit_time(T_b, r),
        notes=tuple(notes),
    )
    logger.debug(
        f"Design n={design.n} P={design.P}: L_k={L_k} N={N} "
        f"t_rc={report.t_rc_us:.1f} us C_R={C_R:.1f} b/s T_b=10^{T_b.log10_years:.2f} y"
    )
    return report


def aes_crossover(
    P: int,
    N: int,
    key_bits: int,
    tau: float = DEFAULT_TAU,
    n_range: Iterable[int] = range(2, 257),
) -> CrossoverResult:
    """Smallest n in n_range whose T^b meets the 2^key_bits reference"""
    reference = aes_reference(key_bits, tau)
    computed = next((n for n in n_range if meets(bfa_time(P, N, n, tau), reference)), None)
    result = CrossoverResult(
        P=P,
        N=N,
        key_bits=key_bits,
        computed=computed,
        published=PUBLISHED_CROSSOVERS.get((key_bits, P)),
    )
    if result.deviates:
        logger.warning(
            f"AES-{key_bits} crossover for P={P}, N={N}: computed n={computed}, "
            f"published n={result.published}"
        )
    return result


def _fmt(value: float | None, spec: str) -> str:
    return INFEASIBLE if value is None else format(value, spec)


def _sweep_row(design: DesignInput) -> dict[str, str]:
    row = {column: INFEASIBLE for column in CSV_COLUMNS}
    row["n"] = str(design.n)
    row["P"] = str(design.P)

    if design.N_override is None:
        try:
            L_k = optimal_key_length(design)
        except InfeasibleDesignError as e:
            logger.info(f"Sweep cell n={design.n} P={design.P}: {e}")
            return row
        N = resets(design.L_M, L_k)
    else:
        N = design.N_override
        L_k = covering_resets(design.L_M, N)
    row["L_k_bits"] = str(L_k)
    row["N"] = str(N)
    row["t_rc_us"] = _fmt(switch_time(L_k, design.C) * 1e6, ".3f")

    try:
        C1_R, C2_R, C_R = prng_rates(design, L_k)
        row["C1R_bps"] = _fmt(C1_R, ".6g")
        row["C2R_bps"] = _fmt(C2_R, ".6g")
        row["CR_bps"] = _fmt(C_R, ".6g")
    except InfeasibleDesignError as e:
        logger.info(f"Sweep cell n={design.n} P={design.P}: {e}")

    T_b = bfa_time(design.P, N, design.n, design.tau)
    row["Tb_log10_years"] = _fmt(T_b.log10_years, ".4f")
    try:
        row["Tbhat_log10_years"] = _fmt(
            bfa_time_interrupted(design.P, N, design.n, design.tau).log10_years, ".4f"
        )
    except BrokenConfigurationError:
        pass
    row["aes128_flag"] = str(int(meets(T_b, aes_reference(128, design.tau))))
    row["aes256_flag"] = str(int(meets(T_b, aes_reference(256, design.tau))))
    return row


def design_sweep(
    n_values: Iterable[int],
    P_values: Iterable[int],
    template: DesignInput,
    N_override: int | None = None,
) -> list[dict[str, str]]:
    """
    One CSV row per (n, P), in n-major order.

    Cells that cannot be computed hold the marker "infeasible"; rows are never dropped.
    """
    P_list = list(P_values)
    rows = []
    for n in n_values:
        for P in P_list:
            design = replace(
                template,
                n=n,
                P=P,
                N_override=N_override if N_override is not None else template.N_override,
            )
            rows.append(_sweep_row(design))
    logger.info(f"Sweep produced {len(rows)} row(s)")
    return rows


def switching_grid_rows(calibration: str = "binary") -> list[dict[str, str]]:
    """The 4 x 3 switching-time grid at the 1.25 Gbit design point"""
    return design_sweep((5, 10, 15, 20), (2, 3, 4), reference_design(5, 2, calibration))


def switching_grid_deviation(rows: Iterable[dict[str, str]]) -> dict[tuple[int, int], float]:
    """Relative deviation of each computed switching time from the published grid"""
    deviations = {}
    for row in rows:
        key = (int(row["n"]), int(row["P"]))
        if key in REFERENCE_SWITCH_US and row["t_rc_us"] != INFEASIBLE:
            published = REFERENCE_SWITCH_US[key]
            deviations[key] = (float(row["t_rc_us"]) - published) / published
    return deviations
