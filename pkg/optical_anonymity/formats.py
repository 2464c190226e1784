"""Text file formats: bit strings, polynomial lists, key, trace and report exports

Bit-string files hold ASCII '0'/'1' (whitespace and '_' ignored). A first line of
the form ``#hex <length>`` switches to hex mode: the remaining text is read as hex
digits carrying ``length`` bits, most significant first.
"""

import csv
import logging
import re
from collections.abc import Iterable, Sequence
from pathlib import Path

from optical_anonymity.bitstring import BitString
from optical_anonymity.deanonymizer import AttackReport
from optical_anonymity.exceptions import ConfigurationError
from optical_anonymity.lfsr_engine import GenPoly, parse_polynomial
from optical_anonymity.okg import AnonKey
from optical_anonymity.onion_circuit import FlowTrace
from optical_anonymity.param_designer import CSV_COLUMNS

logger = logging.getLogger(__name__)

HEX_HEADER = "#hex"
# flows longer than this are written in hex unless asked otherwise
HEX_THRESHOLD = 10_000

_HEX_HEADER_RE = re.compile(r"^#hex\s+(\d+)\s*$")


# =============================================================================
# Bit strings
# =============================================================================


def parse_bits(text: str) -> BitString:
    """Parse bit-string file content, auto-detecting the hex header"""
    lines = text.splitlines()
    try:
        if lines and (match := _HEX_HEADER_RE.match(lines[0].strip())):
            return BitString.from_hex("".join(lines[1:]), int(match.group(1)))
        body = "".join(line for line in lines if not line.lstrip().startswith("#"))
        return BitString.from_str(body)
    except ValueError as e:
        raise ConfigurationError(f"Not a bit string: {e}")


def format_bits(bits: BitString, hex_mode: bool | None = None) -> str:
    """Render a bit string; hex_mode=None picks hex for long flows"""
    if hex_mode is None:
        hex_mode = bits.length > HEX_THRESHOLD
    if hex_mode:
        return f"{HEX_HEADER} {bits.length}\n{bits.to_hex()}\n"
    return f"{bits}\n"


def read_bits(path: str | Path) -> BitString:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"Bit-string file not found: {path}")
    return parse_bits(text)


def write_bits(path: str | Path, bits: BitString, hex_mode: bool | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_bits(bits, hex_mode), encoding="utf-8")
    logger.debug(f"Wrote {bits.length} bit(s) to {path}")
    return path


def bits_cell(bits: BitString, hex_mode: bool | None) -> str:
    """Single-line rendering for table cells"""
    if hex_mode is None:
        hex_mode = bits.length > HEX_THRESHOLD
    return bits.to_hex() if hex_mode else str(bits)


# =============================================================================
# Polynomial lists
# =============================================================================


def parse_polynomials(text: str) -> list[GenPoly]:
    """One polynomial per line in caret notation; '#' starts a comment"""
    polys = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        try:
            polys.append(parse_polynomial(content))
        except ValueError as e:
            raise ConfigurationError(f"Line {number}: {e}")
    return polys


def load_polynomials(path: str | Path) -> list[GenPoly]:
    path = Path(path)
    try:
        return parse_polynomials(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"Polynomial list not found: {path}")


def format_polynomials(polys: Iterable[GenPoly], header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.extend(p.to_caret() for p in polys)
    return "\n".join(lines) + "\n"


# =============================================================================
# Key and schedule export
# =============================================================================


def format_schedule(key: AnonKey) -> str:
    """``cycle,index,seed,keypart`` lines, one per reset cycle"""
    lines = ["cycle,index,seed,keypart"]
    for cycle, (record, part) in enumerate(zip(key.schedule, key.parts)):
        lines.append(f"{cycle},{record.lfsr_index},{record.seed},{part}")
    return "\n".join(lines) + "\n"


def write_key(
    directory: str | Path, key: AnonKey, stem: str = "key", hex_mode: bool | None = None
) -> tuple[Path, Path]:
    """Write ``<stem>.bits`` and ``<stem>.schedule.csv``; returns both paths"""
    directory = Path(directory)
    bits_path = write_bits(directory / f"{stem}.bits", key.bits, hex_mode)
    schedule_path = directory / f"{stem}.schedule.csv"
    schedule_path.write_text(format_schedule(key), encoding="utf-8")
    logger.info(f"Key written to {bits_path} ({len(key)} bits), schedule to {schedule_path}")
    return bits_path, schedule_path


# =============================================================================
# Traces and reports
# =============================================================================


def format_trace(trace: FlowTrace, hex_mode: bool | None = None) -> str:
    """Text table, one row per hop: node, incoming bits, outgoing bits"""
    rows = [("hop", "node", "incoming", "outgoing")]
    for position, hop in enumerate(trace.hops):
        rows.append(
            (
                str(position),
                hop.node_id,
                bits_cell(hop.incoming, hex_mode),
                bits_cell(hop.outgoing, hex_mode),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ) + "\n"


def format_attack_report(
    report: AttackReport, hex_mode: bool | None = None, timing: bool = True
) -> str:
    """
    Match table followed by the summary header and line.

    elapsed_s is wall-clock time and the only field that varies between identical
    runs; with ``timing=False`` it is left empty.
    """
    lines = ["match,index,schedule,flow,degenerate"]
    for number, match in enumerate(report.matches):
        schedule = " ".join(f"({i},{seed})" for i, seed in match.pairs())
        lines.append(
            f"{number},{match.index},{schedule},{bits_cell(match.flow, hex_mode)},"
            f"{int(match.degenerate)}"
        )
    elapsed = f"{report.elapsed:.6f}" if timing else ""
    lines.append("")
    lines.append("tries,keyspace_paper,keyspace_true,elapsed_s,tau_equivalent_s")
    lines.append(
        f"{report.tries},{report.keyspace_paper},{report.keyspace_true},"
        f"{elapsed},{report.tau_equivalent:.6e}"
    )
    return "\n".join(lines) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def write_sweep_csv(stream, rows: Sequence[dict[str, str]]) -> None:
    """Write sweep rows with the fixed column header"""
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
