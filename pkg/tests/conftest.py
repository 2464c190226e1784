"""Shared fixtures: the worked two-register example and repository paths"""

import random
from pathlib import Path

import pytest

from optical_anonymity.bitstring import BitString
from optical_anonymity.lfsr_engine import parse_polynomial
from optical_anonymity.okg import OkgConfig

REPO_ROOT = Path(__file__).resolve().parents[1]

# two registers of length 3, 5-bit parts, 10-bit keys and flows
VECTORS = {
    "M": "1001101011",
    "K1": "1110010011",
    "K2": "0011110111",
    "M1": "0100001111",
    "M2": "1010011100",
    "K1_source": "10100110",
    "K2_source": "01011100",
}


@pytest.fixture
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture
def example_dir() -> Path:
    return REPO_ROOT / "config" / "two_register"


@pytest.fixture
def example_polys():
    return (parse_polynomial("x^3+x+1"), parse_polynomial("x^3+x^2+1"))


@pytest.fixture
def example_config(example_polys) -> OkgConfig:
    return OkgConfig(example_polys, L_k=5, N=2)


@pytest.fixture
def vectors():
    return {name: BitString.from_str(bits) for name, bits in VECTORS.items()}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240617)
