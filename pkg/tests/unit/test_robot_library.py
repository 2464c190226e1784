"""Keyword-level checks for the Robot Framework library"""

import pytest

from libraries.OnionEncryptionLibrary import OnionEncryptionLibrary
from optical_anonymity.exceptions import InvalidPolynomialError

pytestmark = pytest.mark.unit


@pytest.fixture
def lib(example_dir):
    library = OnionEncryptionLibrary()
    library.load_key_generator(str(example_dir / "okg.yaml"))
    return library


def test_key_from_bits(lib, vectors):
    assert lib.generate_key_from_bits("01011100") == str(vectors["K2"])


def test_key_needs_generator():
    with pytest.raises(RuntimeError):
        OnionEncryptionLibrary().generate_key_from_bits("01011100")


def test_circuit_hops(lib, example_dir, vectors):
    assert lib.run_circuit_file(str(example_dir / "circuit.yaml")) == str(vectors["M"])
    lib.hop_should_carry("C", str(vectors["M1"]))
    with pytest.raises(AssertionError):
        lib.hop_should_carry("C", str(vectors["M2"]))
    with pytest.raises(AssertionError):
        lib.hop_should_carry("Z", str(vectors["M"]))


def test_attack_keywords(lib, example_dir):
    summary = lib.run_attack_file(str(example_dir / "attack.yaml"))
    assert summary["tries"] == 196
    lib.attack_should_find_schedule("0:101", "1:100")
    with pytest.raises(AssertionError):
        lib.attack_should_find_schedule("1:111", "1:111")


def test_design_keywords(lib):
    lib.switching_grid_should_match_within("1")
    assert lib.design_values("5", "2")["N"] == 123
    assert lib.aes_crossover_length("2", "100", "128") == 28


def test_key_part_needs_constant_term(lib):
    assert lib.generate_key_part("x^3+x+1", "101", "5") == "00111"
    with pytest.raises(InvalidPolynomialError):
        lib.generate_key_part("x^3+x", "101", "5")
