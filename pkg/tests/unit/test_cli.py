"""Tests for the olenc command line"""

import argparse
import csv

import pytest

from optical_anonymity.exceptions import ExitCode
from optical_anonymity.formats import read_bits
from scripts.olenc_cli import main, parse_range

pytestmark = pytest.mark.unit


@pytest.fixture
def run(repo_root):
    """Invoke main() with the shipped configuration"""
    config = str(repo_root / "config" / "olenc_config.yaml")

    def _run(*argv: str) -> int:
        return main(["--config", config, *argv])

    return _run


class TestParseRange:
    @pytest.mark.parametrize(
        "text, expected",
        [("5:20:5", [5, 10, 15, 20]), ("2:4", [2, 3, 4]), ("7", [7]), ("2,3,4", [2, 3, 4])],
    )
    def test_forms(self, text, expected):
        assert parse_range(text) == expected

    @pytest.mark.parametrize("text", ["a:b", "1:2:3:4", "5:10:0"])
    def test_invalid(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_range(text)


class TestPolys:
    def test_list(self, run, capsys):
        assert run("polys", "3") == ExitCode.OK
        assert capsys.readouterr().out == "x^3+x+1\nx^3+x^2+1\n"

    def test_count(self, run, capsys):
        assert run("polys", "31", "--count-only") == ExitCode.OK
        assert capsys.readouterr().out.strip() == "69273666"

    def test_out_of_range(self, run):
        assert run("polys", "40") == ExitCode.USAGE

    def test_to_file(self, run, tmp_path):
        out = tmp_path / "polys.txt"
        assert run("polys", "3", "-o", str(out)) == ExitCode.OK
        assert out.read_text().splitlines() == ["x^3+x+1", "x^3+x^2+1"]


class TestKeygen:
    def test_injected(self, run, capsys, example_dir):
        code = run("keygen", str(example_dir / "okg.yaml"), "--inject", "01011100")
        assert code == ExitCode.OK
        assert capsys.readouterr().out.strip() == "0011110111"

    def test_writes_files(self, run, tmp_path, example_dir, vectors):
        code = run(
            "keygen", str(example_dir / "okg.yaml"), "--inject", "10100110",
            "--output-dir", str(tmp_path), "--stem", "K1",
        )
        assert code == ExitCode.OK
        assert read_bits(tmp_path / "K1.bits") == vectors["K1"]
        assert (tmp_path / "K1.schedule.csv").exists()

    def test_underrun(self, run, example_dir):
        assert run("keygen", str(example_dir / "okg.yaml"), "--inject", "0101") == ExitCode.UNDERRUN

    def test_bad_inject(self, run, example_dir):
        assert run("keygen", str(example_dir / "okg.yaml"), "--inject", "01x1") == ExitCode.USAGE

    def test_reference_prng_with_overrides(self, run, capsys):
        code = run("keygen", "--ini", "INI.C", "--n", "4", "--P", "2", "--L-k", "6", "--N", "3")
        assert code == ExitCode.OK
        assert len(capsys.readouterr().out.strip()) == 18


class TestSingleLayer:
    @pytest.fixture
    def files(self, tmp_path, vectors):
        paths = {}
        for name in ("M", "K1", "M1"):
            paths[name] = tmp_path / f"{name}.bits"
            paths[name].write_text(str(vectors[name]) + "\n")
        return paths

    def test_decrypt(self, run, capsys, files):
        assert run("decrypt", str(files["M1"]), "--key", str(files["K1"])) == ExitCode.OK
        assert capsys.readouterr().out.strip() == "1010011100"

    def test_encrypt_to_file(self, run, tmp_path, files, vectors):
        out = tmp_path / "out.bits"
        assert run("encrypt", str(files["M"]), "-k", str(files["K1"]), "-o", str(out)) == ExitCode.OK
        assert read_bits(out) == vectors["M"] ^ vectors["K1"]

    def test_length_mismatch(self, run, tmp_path, files):
        short = tmp_path / "short.bits"
        short.write_text("101\n")
        assert run("encrypt", str(files["M"]), "-k", str(short)) == ExitCode.USAGE


class TestCircuit:
    def test_worked_example(self, run, capsys, example_dir):
        assert run("circuit", str(example_dir / "circuit.yaml")) == ExitCode.OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[1].split() == ["0", "A", "1001101011", "0100001111"]
        assert lines[2].split() == ["1", "C", "0100001111", "1010011100"]

    def test_random_message_needs_matching_length(self, run, example_dir):
        assert run("circuit", str(example_dir / "circuit.yaml"), "--random", "30") == ExitCode.USAGE

    def test_random_message(self, run, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(
            "okg: {n: 5, P: 3, L_k: 20, N: 3}\n"
            "nodes:\n  - {id: S, ini: s}\n  - {id: X, ini: x}\n  - {id: D, ini: d}\n"
        )
        out = tmp_path / "trace.txt"
        assert run("circuit", str(path), "--random", "60", "--seed", "3", "-o", str(out)) == ExitCode.OK
        assert len(out.read_text().splitlines()) == 4


class TestAttack:
    def test_known_plaintext(self, run, capsys, example_dir):
        assert run("attack", str(example_dir / "attack.yaml")) == ExitCode.OK
        out = capsys.readouterr().out
        assert "(0,101) (1,100)" in out
        assert "\n196,28,196," in out

    def test_correlation(self, run, capsys, example_dir):
        assert run("attack", str(example_dir / "correlate.yaml"), "--workers", "2") == ExitCode.OK
        assert "(1,010) (0,110),1010011100" in capsys.readouterr().out

    def test_budget(self, run, example_dir):
        assert run("attack", str(example_dir / "attack.yaml"), "--budget", "100") == ExitCode.BUDGET

    def test_repeat_runs_match_without_timing(self, run, capsys, example_dir):
        outputs = []
        for _ in range(2):
            assert run("attack", str(example_dir / "attack.yaml"), "--no-timing") == ExitCode.OK
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
        assert "\n196,28,196,,1.960000e-16\n" in outputs[0]

    def test_missing_scenario(self, run, tmp_path):
        assert run("attack", str(tmp_path / "none.yaml")) == ExitCode.USAGE


class TestDesign:
    def test_default_point(self, run, capsys):
        assert run("design") == ExitCode.OK
        values = dict(
            line.split(": ", 1) for line in capsys.readouterr().out.splitlines() if not line.startswith("note")
        )
        assert values["N"] == "123"
        assert values["N_cover"] == "124"
        assert float(values["t_rc_us"]) == pytest.approx(109, rel=0.01)

    def test_decimal_long_registers(self, run, capsys):
        assert run("design", "--n", "40", "--calibration", "decimal") == ExitCode.OK
        out = capsys.readouterr().out
        assert "L_k_mbit_binary: 13.5" in out

    def test_single_register(self, run):
        assert run("design", "--P", "1") == ExitCode.INFEASIBLE


class TestSweep:
    def test_reference_grid_csv(self, run, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run("sweep", "--reference-grid", "-o", str(out)) == ExitCode.OK
        with open(out, newline="") as f:
            rows = list(csv.DictReader(f))
        assert [(r["n"], r["P"]) for r in rows][:3] == [("5", "2"), ("5", "3"), ("5", "4")]
        assert len(rows) == 12
        assert float(rows[0]["t_rc_us"]) == pytest.approx(109, rel=0.01)

    def test_fixed_resets(self, run, capsys):
        assert run("sweep", "--n", "27:28", "--p", "2", "--N", "100") == ExitCode.OK
        rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
        assert [r["aes128_flag"] for r in rows] == ["0", "1"]

    def test_needs_grid(self, run):
        assert run("sweep", "--n", "5") == ExitCode.USAGE


def test_usage_error_exits():
    with pytest.raises(SystemExit) as excinfo:
        main(["keygen", "--length", "ten"])
    assert excinfo.value.code == 2
