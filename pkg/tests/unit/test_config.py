"""Tests for YAML configuration and run files"""

import logging
import math

import pytest

from optical_anonymity.config import (
    DEFAULT_CONFIG,
    CircuitFile,
    DesignSettings,
    OkgSettings,
    load_attack,
    load_circuit,
    load_design,
    load_okg_settings,
    load_run_config,
)
from optical_anonymity.exceptions import ConfigurationError
from optical_anonymity.onion_circuit import NodeRole
from optical_anonymity.param_designer import CALIBRATIONS

pytestmark = pytest.mark.unit


class TestRunConfig:
    def test_missing_file_gives_defaults(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING):
            config = load_run_config(tmp_path / "absent.yaml")
        assert "Config file not found" in caplog.text
        assert config.attack.budget == DEFAULT_CONFIG["attack"]["budget"]
        assert config.okg.L_k == 5

    def test_no_path(self):
        assert load_run_config(None).logging.level == "INFO"

    def test_shipped_config(self, repo_root):
        config = load_run_config(repo_root / "config" / "olenc_config.yaml")
        assert config.okg.to_okg_config().P == 3
        assert config.design.to_design_input().L_M == CALIBRATIONS["binary"]

    def test_partial_override_keeps_defaults(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("logging:\n  level: debug\nattack:\n  workers: 4\n")
        config = load_run_config(path)
        assert config.logging.level == "DEBUG"
        assert config.attack.workers == 4
        assert config.attack.budget == DEFAULT_CONFIG["attack"]["budget"]

    @pytest.mark.parametrize(
        "text",
        [
            "logging:\n  level: loud\n",
            "attack:\n  budget: 0\n",
            "- just\n- a list\n",
            "okg: {n: 3, P: 2, L_k: [oops\n",
        ],
    )
    def test_invalid_files(self, tmp_path, text):
        path = tmp_path / "bad.yaml"
        path.write_text(text)
        with pytest.raises(ConfigurationError):
            load_run_config(path)


class TestOkgSettings:
    def test_needs_polynomials_or_degree(self):
        with pytest.raises(ValueError):
            OkgSettings(L_k=5, N=2, n=3)

    def test_polynomial_list(self, example_dir, example_config):
        config = load_okg_settings(example_dir / "okg.yaml").to_okg_config()
        assert config.polys == example_config.polys
        assert (config.L_k, config.N) == (5, 2)

    def test_count_mismatch(self):
        settings = OkgSettings(L_k=5, N=2, P=3, polynomials=["x^3+x+1", "x^3+x^2+1"])
        with pytest.raises(ConfigurationError):
            settings.to_okg_config()

    def test_degree_mismatch(self):
        settings = OkgSettings(L_k=5, N=2, n=4, polynomials=["x^3+x+1"])
        with pytest.raises(ConfigurationError):
            settings.to_okg_config()

    def test_options_reach_config(self):
        config = OkgSettings(L_k=5, N=2, n=5, P=3, non_repeating=True).to_okg_config()
        assert config.non_repeating

    def test_polynomial_file_from_example(self, example_dir):
        settings = load_okg_settings(example_dir / "okg.yaml")
        assert settings.polynomials_file == str(example_dir / "polys.txt")

    def test_polynomial_file_relative_to_run_file(self, tmp_path, example_polys):
        (tmp_path / "lists").mkdir()
        (tmp_path / "lists" / "gen.txt").write_text("x^3+x+1\nx^3+x^2+1\n")
        runs = tmp_path / "runs"
        runs.mkdir()
        (runs / "okg.yaml").write_text("okg:\n  polynomials_file: ../lists/gen.txt\n  L_k: 5\n  N: 2\n")
        (runs / "attack.yaml").write_text(
            "okg: {polynomials_file: ../lists/gen.txt, L_k: 5, N: 2}\n"
            "intercepted: \"1010011100\"\nknown_plaintext: \"1001101011\"\n"
        )
        assert load_okg_settings(runs / "okg.yaml").to_okg_config().polys == tuple(example_polys)
        assert load_attack(runs / "attack.yaml").to_scenario().config.polys == tuple(example_polys)

    def test_polynomial_file_and_list_exclusive(self):
        with pytest.raises(ValueError):
            OkgSettings(L_k=5, N=2, polynomials=["x^3+x+1"], polynomials_file="polys.txt")

    def test_missing_polynomial_file(self, tmp_path):
        settings = OkgSettings(L_k=5, N=2, polynomials_file=str(tmp_path / "absent.txt"))
        with pytest.raises(ConfigurationError):
            settings.to_okg_config()

    def test_run_config_resolves_polynomial_file(self, tmp_path, example_dir):
        path = tmp_path / "olenc.yaml"
        path.write_text(f"okg:\n  polynomials_file: {example_dir / 'polys.txt'}\n  L_k: 5\n  N: 2\n")
        (tmp_path / "polys.txt").write_text("x^3+x^2+1\nx^3+x+1\n")
        assert load_run_config(path).okg.to_okg_config().polys[0].to_caret() == "x^3+x+1"
        path.write_text("okg:\n  polynomials_file: polys.txt\n  L_k: 5\n  N: 2\n")
        assert load_run_config(path).okg.to_okg_config().polys[0].to_caret() == "x^3+x^2+1"


class TestCircuitFile:
    def test_example_circuit(self, example_dir):
        spec = load_circuit(example_dir / "circuit.yaml")
        circuit = spec.to_circuit()
        assert [n.id for n in circuit.nodes] == ["A", "C", "E"]
        assert spec.injected == {"INI.C": "10100110", "INI.E": "01011100"}
        assert spec.message == str(example_dir / "message.bits")

    def test_explicit_roles(self):
        spec = CircuitFile.model_validate(
            {
                "okg": {"n": 3, "P": 2, "L_k": 5, "N": 2},
                "nodes": [
                    {"id": "S", "ini": "s", "role": "source"},
                    {"id": "D", "ini": "d", "role": "destination"},
                ],
            }
        )
        assert spec.to_circuit().nodes[1].role is NodeRole.DESTINATION

    def test_mixed_roles(self):
        spec = CircuitFile.model_validate(
            {
                "okg": {"n": 3, "P": 2, "L_k": 5, "N": 2},
                "nodes": [{"id": "S", "ini": "s", "role": "source"}, {"id": "D", "ini": "d"}],
            }
        )
        with pytest.raises(ConfigurationError):
            spec.to_circuit()

    def test_single_node(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("okg: {n: 3, P: 2, L_k: 5, N: 2}\nnodes:\n  - {id: A, ini: a}\n")
        with pytest.raises(ConfigurationError):
            load_circuit(path)


class TestAttackFile:
    def test_known_plaintext(self, example_dir, vectors):
        spec = load_attack(example_dir / "attack.yaml")
        scenario = spec.to_scenario()
        assert scenario.reference == vectors["M"]
        assert scenario.intercepted == vectors["M2"]
        assert spec.budget == 1000

    def test_correlation(self, example_dir, vectors):
        scenario = load_attack(example_dir / "correlate.yaml").to_scenario()
        assert scenario.reference is None
        assert vectors["M2"] in scenario.outgoing
        assert len(scenario.outgoing) == 3

    def test_both_references(self, tmp_path):
        path = tmp_path / "a.yaml"
        path.write_text(
            "okg: {n: 3, P: 2, L_k: 5, N: 2}\n"
            "intercepted: '0101'\nknown_plaintext: '0000'\noutgoing: ['1111']\n"
        )
        with pytest.raises(ConfigurationError):
            load_attack(path)

    def test_non_binary_flow(self, tmp_path):
        path = tmp_path / "a.yaml"
        path.write_text("okg: {n: 3, P: 2, L_k: 5, N: 2}\nintercepted: '01x1'\nknown_plaintext: '0000'\n")
        with pytest.raises(ConfigurationError):
            load_attack(path)


class TestDesignSettings:
    def test_calibration_default(self):
        design = DesignSettings(n=5, P=2, calibration="decimal").to_design_input()
        assert design.L_M == 1_250_000_000
        assert design.target_Tb == pytest.approx(2.0**128 * 1e-18)

    def test_explicit_container(self):
        assert DesignSettings(n=5, P=2, L_M=4096).to_design_input().L_M == 4096

    def test_target_key_bits(self):
        design = DesignSettings(n=5, P=2, target_key_bits=256).to_design_input()
        assert design.target_log2 == pytest.approx(256 + math.log2(1e-18))

    def test_load_nested_section(self, tmp_path):
        path = tmp_path / "d.yaml"
        path.write_text("design:\n  n: 10\n  P: 3\n")
        assert load_design(path).n == 10

    def test_unknown_calibration(self):
        with pytest.raises(ValueError):
            DesignSettings(n=5, P=2, calibration="octal")
