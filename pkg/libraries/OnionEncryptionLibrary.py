"""
Robot Framework Library for Optical Layered Encryption

This library provides keywords for key generation, circuit runs, brute-force
attacks and the design calculator in Robot Framework tests.
"""

import logging

from robot.api.deco import keyword, library

from optical_anonymity.bitstring import BitString
from optical_anonymity.config import load_attack, load_circuit, load_okg_settings
from optical_anonymity.deanonymizer import (
    DEFAULT_BUDGET,
    AttackReport,
    brute_force_recover,
    correlate_flows,
)
from optical_anonymity.formats import read_bits
from optical_anonymity.lfsr_engine import (
    enumerate_primitive,
    lfsr_stream,
    max_primitive_count,
    parse_polynomial,
)
from optical_anonymity.okg import InjectedSource, OkgConfig, generate_key
from optical_anonymity.onion_circuit import FlowTrace, injected_sources, run_circuit, xor_bits
from optical_anonymity.param_designer import (
    aes_crossover,
    aes_reference,
    bfa_time,
    design_point,
    reference_design,
    switching_grid_rows,
    switching_grid_deviation,
)

logger = logging.getLogger(__name__)


@library
class OnionEncryptionLibrary:
    """
    Robot Framework library for optical layered encryption.

    Provides keywords for:
    - LFSR key parts and oKG keys from injected pRNG bits
    - Circuit runs and per-hop checks
    - Known-plaintext and correlation attacks
    - Design equations and the switching-time grid
    """

    ROBOT_LIBRARY_SCOPE = "SUITE"
    ROBOT_LIBRARY_VERSION = "0.1.0"

    def __init__(self):
        """Initialize the library"""
        self._config: OkgConfig | None = None
        self._trace: FlowTrace | None = None
        self._report: AttackReport | None = None

    # -------------------------------------------------------------------------
    # Key generation
    # -------------------------------------------------------------------------

    @keyword
    def load_key_generator(self, path: str):
        """
        Load key generator settings from a YAML file

        Arguments:
            path: YAML file with an ``okg`` section

        Example:
            | Load Key Generator | config/two_register/okg.yaml |
        """
        self._config = load_okg_settings(path).to_okg_config()
        logger.info(f"Loaded key generator: P={self._config.P}, n={self._config.n}")

    @keyword
    def generate_key_part(self, polynomial: str, seed: str, length) -> str:
        """
        Run one register from a seed

        Returns:
            The emitted bits, seed bits skipped

        Example:
            | ${part}= | Generate Key Part | x^3+x+1 | 101 | 5 |
        """
        return str(lfsr_stream(parse_polynomial(polynomial), BitString.from_str(seed), int(length)))

    @keyword
    def generate_key_from_bits(self, bits: str) -> str:
        """
        Generate a key with explicit pRNG output

        Example:
            | ${key}= | Generate Key From Bits | 01011100 |
        """
        if self._config is None:
            raise RuntimeError("Key generator not loaded")
        return str(generate_key(self._config, InjectedSource(bits)).bits)

    @keyword
    def xor_bit_strings(self, a: str, b: str) -> str:
        """Bitwise XOR of two equal-length bit strings"""
        return str(xor_bits(BitString.from_str(a), BitString.from_str(b)))

    @keyword
    def primitive_counts_should_match_totient(self, max_degree):
        """
        Enumerate every degree from 2 to max_degree and compare with phi(2^n-1)/n

        Example:
            | Primitive Counts Should Match Totient | 12 |
        """
        for n in range(2, int(max_degree) + 1):
            found = len(enumerate_primitive(n))
            expected = max_primitive_count(n)
            if found != expected:
                raise AssertionError(f"n={n}: enumerated {found}, expected {expected}")

    # -------------------------------------------------------------------------
    # Circuits
    # -------------------------------------------------------------------------

    @keyword
    def run_circuit_file(self, path: str) -> str:
        """
        Run a circuit description file

        Returns:
            The destination output as a bit string

        Example:
            | ${out}= | Run Circuit File | config/two_register/circuit.yaml |
        """
        spec = load_circuit(path)
        if spec.message is None:
            raise RuntimeError(f"{path} names no message file")
        factory = injected_sources(spec.injected) if spec.injected else None
        kwargs = {"source_factory": factory} if factory else {}
        self._trace = run_circuit(
            spec.to_circuit(), spec.okg.to_okg_config(), read_bits(spec.message), **kwargs
        )
        return str(self._trace.recovered)

    @keyword
    def hop_should_carry(self, node_id: str, incoming: str):
        """
        Check the bits arriving at a node in the last circuit run

        Example:
            | Hop Should Carry | C | 0100001111 |
        """
        if self._trace is None:
            raise RuntimeError("No circuit has been run")
        for hop in self._trace.hops:
            if hop.node_id == node_id:
                if str(hop.incoming) != incoming:
                    raise AssertionError(f"Node {node_id} received {hop.incoming}, expected {incoming}")
                return
        raise AssertionError(f"Node {node_id} not on the circuit")

    # -------------------------------------------------------------------------
    # Attacks
    # -------------------------------------------------------------------------

    @keyword
    def run_attack_file(self, path: str, workers=1) -> dict:
        """
        Run an attack scenario file

        Returns:
            Report summary (tries, degenerate_tries, matches, keyspace figures)

        Example:
            | ${summary}= | Run Attack File | config/two_register/attack.yaml | workers=2 |
        """
        spec = load_attack(path)
        scenario = spec.to_scenario()
        budget = spec.budget or DEFAULT_BUDGET
        if scenario.reference is not None:
            self._report = brute_force_recover(scenario, budget=budget, workers=int(workers))
        else:
            self._report = correlate_flows(
                scenario.intercepted, scenario.outgoing, scenario.config,
                budget=budget, workers=int(workers),
            )
        return self._report.summary()

    @keyword
    def attack_should_find_schedule(self, *pairs: str):
        """
        Check that a schedule is among the matches of the last attack

        Arguments:
            pairs: index:seed per reset cycle

        Example:
            | Attack Should Find Schedule | 0:101 | 1:100 |
        """
        if self._report is None:
            raise RuntimeError("No attack has been run")
        wanted = [(int(i), seed) for i, seed in (p.split(":") for p in pairs)]
        if not any(match.pairs() == wanted for match in self._report.matches):
            raise AssertionError(f"Schedule {wanted} not among {len(self._report.matches)} match(es)")

    # -------------------------------------------------------------------------
    # Design calculator
    # -------------------------------------------------------------------------

    @keyword
    def design_values(self, n, P, calibration: str = "binary") -> dict:
        """
        Evaluate the 1.25 Gbit design point

        Returns:
            Dictionary with L_k, N, t_rc_us and CR_bps

        Example:
            | ${d}= | Design Values | 5 | 2 |
        """
        report = design_point(reference_design(int(n), int(P), calibration))
        return {
            "L_k": report.L_k,
            "N": report.N,
            "t_rc_us": report.t_rc_us,
            "CR_bps": report.C_R,
        }

    @keyword
    def switching_grid_should_match_within(self, percent, calibration: str = "binary"):
        """
        Compare the twelve computed switching times with the published grid

        Example:
            | Switching Grid Should Match Within | 1 |
        """
        deviations = switching_grid_deviation(switching_grid_rows(calibration))
        if len(deviations) != 12:
            raise AssertionError(f"Expected 12 grid cells, got {len(deviations)}")
        worst = max(deviations.items(), key=lambda item: abs(item[1]))
        if abs(worst[1]) * 100 > float(percent):
            raise AssertionError(f"Cell {worst[0]} deviates by {worst[1]:+.2%}")
        logger.info(f"Worst switching-time deviation {worst[1]:+.3%} at {worst[0]}")

    @keyword
    def bfa_time_log10_years(self, P, N, n, tau=1e-18) -> float:
        """log10 of P^N * tau * (2^n - 1) in years"""
        return bfa_time(int(P), int(N), int(n), float(tau)).log10_years

    @keyword
    def aes_reference_years(self, key_bits, tau=1e-18) -> float:
        """2^key_bits * tau in years"""
        return aes_reference(int(key_bits), float(tau)).years

    @keyword
    def aes_crossover_length(self, P, N, key_bits) -> int:
        """
        Smallest register length whose attack time reaches the AES reference

        Example:
            | ${n}= | AES Crossover Length | 2 | 100 | 128 |
        """
        result = aes_crossover(int(P), int(N), int(key_bits))
        if result.computed is None:
            raise AssertionError(f"No crossover found for P={P}, N={N}")
        return result.computed
