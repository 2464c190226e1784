"""
Optical Layered Encryption

Software model of all-optical layered (onion) encryption: LFSR key generation
configured by a low-rate pRNG, circuit simulation, brute-force deanonymization
and the parameter-design calculator.
"""

from .bitstring import BitString
from .deanonymizer import (
    AttackReport,
    AttackScenario,
    brute_force_recover,
    correlate_flows,
    keyspace_paper,
    keyspace_true,
)
from .exceptions import ExitCode, OpticalAnonymityError
from .formats import load_polynomials
from .lfsr_engine import (
    GenPoly,
    enumerate_primitive,
    is_primitive,
    lfsr_stream,
    max_primitive_count,
    parse_polynomial,
)
from .okg import AnonKey, OkgConfig, generate_key
from .onion_circuit import Circuit, FlowTrace, run_circuit
from .param_designer import DesignInput, DesignReport, design_point

__version__ = "0.1.0"
__all__ = [
    "AnonKey",
    "AttackReport",
    "AttackScenario",
    "BitString",
    "Circuit",
    "DesignInput",
    "DesignReport",
    "ExitCode",
    "FlowTrace",
    "GenPoly",
    "OkgConfig",
    "OpticalAnonymityError",
    "brute_force_recover",
    "correlate_flows",
    "design_point",
    "enumerate_primitive",
    "generate_key",
    "is_primitive",
    "keyspace_paper",
    "keyspace_true",
    "lfsr_stream",
    "load_polynomials",
    "max_primitive_count",
    "parse_polynomial",
    "run_circuit",
]
