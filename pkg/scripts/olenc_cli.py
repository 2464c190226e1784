#!/usr/bin/env python3
"""
Optical Layered Encryption - Command Line

Polynomial tools, key generation, single-layer encryption, circuit simulation,
brute-force attacks and parameter design, with file-based input and output.
"""

import argparse
import logging
import random
import sys
from pathlib import Path

from optical_anonymity.bitstring import BitString
from optical_anonymity.config import (
    LoggingSettings,
    OkgSettings,
    RunConfig,
    load_attack,
    load_circuit,
    load_design,
    load_okg_settings,
    load_run_config,
)
from optical_anonymity.deanonymizer import brute_force_recover, correlate_flows
from optical_anonymity.exceptions import ConfigurationError, ExitCode, OpticalAnonymityError
from optical_anonymity.formats import (
    bits_cell,
    format_attack_report,
    format_polynomials,
    format_trace,
    parse_bits,
    read_bits,
    write_bits,
    write_key,
    write_sweep_csv,
    write_text,
)
from optical_anonymity.lfsr_engine import enumerate_primitive, max_primitive_count
from optical_anonymity.okg import InjectedSource, ReferencePrng, generate_key
from optical_anonymity.onion_circuit import (
    add_layer,
    injected_sources,
    peel_layer,
    run_circuit,
    verify_trace,
)
from optical_anonymity.param_designer import (
    CALIBRATIONS,
    DesignInput,
    aes_crossover,
    design_point,
    design_sweep,
    reference_design,
    switching_grid_deviation,
)

logger = logging.getLogger("olenc")

DEFAULT_CONFIG_PATH = Path("config/olenc_config.yaml")


# =============================================================================
# Helpers
# =============================================================================


def setup_logging(settings: LoggingSettings, verbose: bool = False, quiet: bool = False):
    """Configure the root logger from the logging section and -v / -q"""
    level = getattr(logging, settings.level)
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.file:
        handlers.append(logging.FileHandler(settings.file))
    logging.basicConfig(level=level, format=settings.format, handlers=handlers)


def parse_range(text: str) -> list[int]:
    """'5:20:5' -> [5, 10, 15, 20] (inclusive); '7' -> [7]; '3,5' -> [3, 5]"""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError(text)
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise ValueError(text)
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid range '{text}', use start:stop[:step] or a,b,c")


def _okg_settings(args, run_config: RunConfig) -> OkgSettings:
    if getattr(args, "config_file", None):
        settings = load_okg_settings(args.config_file)
    elif run_config.okg is not None:
        settings = run_config.okg
    else:
        raise ConfigurationError("No key generator settings: give a config file")
    overrides = {
        field: value
        for field, value in (("n", args.n), ("P", args.P), ("L_k", args.L_k), ("N", args.N))
        if value is not None
    }
    if overrides:
        settings = OkgSettings.model_validate({**settings.model_dump(), **overrides})
    return settings


def _emit(text: str, output: Path | None):
    if output is None:
        sys.stdout.write(text)
    else:
        write_text(output, text)
        logger.info(f"Wrote {output}")


# =============================================================================
# Commands
# =============================================================================


def cmd_polys(args) -> int:
    if args.count_only:
        print(max_primitive_count(args.degree))
        return ExitCode.OK
    polys = enumerate_primitive(args.degree)
    _emit(format_polynomials(polys), args.output)
    return ExitCode.OK


def cmd_keygen(args, run_config: RunConfig) -> int:
    config = _okg_settings(args, run_config).to_okg_config()
    if args.inject is not None:
        source = InjectedSource(parse_bits(args.inject), ini=args.ini)
    else:
        source = ReferencePrng(args.ini)
    key = generate_key(config, source, length=args.length)
    if key.weak:
        logger.warning("Key contains an all-zero key part")
    if args.output_dir is not None:
        write_key(args.output_dir, key, stem=args.stem, hex_mode=args.hex)
    print(bits_cell(key.bits, args.hex))
    return ExitCode.OK


def _single_layer(args, peel: bool) -> int:
    flow = read_bits(args.input)
    key = read_bits(args.key)
    out = peel_layer(flow, key) if peel else add_layer(flow, key)
    if args.output is not None:
        write_bits(args.output, out, args.hex)
    print(bits_cell(out, args.hex))
    return ExitCode.OK


def cmd_circuit(args) -> int:
    spec = load_circuit(args.circuit_file)
    circuit = spec.to_circuit()
    config = spec.okg.to_okg_config()

    if args.message is not None:
        message = read_bits(args.message)
    elif args.random is not None:
        message = BitString(random.Random(args.seed).getrandbits(args.random), args.random)
    elif spec.message is not None:
        message = read_bits(spec.message)
    elif spec.random_length is not None:
        message = BitString(
            random.Random(spec.random_seed).getrandbits(spec.random_length), spec.random_length
        )
    else:
        raise ConfigurationError("No message: give a message file or --random L")

    factory = injected_sources(spec.injected) if spec.injected else ReferencePrng
    trace = run_circuit(circuit, config, message, source_factory=factory)
    _emit(format_trace(trace, args.hex), args.output)
    if not verify_trace(trace):
        logger.error("Trace failed hop verification")
        return ExitCode.FAILURE
    return ExitCode.OK


def cmd_attack(args, run_config: RunConfig) -> int:
    spec = load_attack(args.scenario_file)
    defaults = run_config.attack
    budget = args.budget or spec.budget or defaults.budget
    workers = args.workers or spec.workers or defaults.workers
    tau = spec.tau or defaults.tau

    scenario = spec.to_scenario()
    if scenario.reference is not None:
        report = brute_force_recover(scenario, budget=budget, workers=workers, tau=tau)
    else:
        report = correlate_flows(
            scenario.intercepted, scenario.outgoing, scenario.config,
            budget=budget, workers=workers, tau=tau,
        )
    _emit(format_attack_report(report, args.hex, timing=args.timing), args.output)
    return ExitCode.OK


def _design_input(args, run_config: RunConfig) -> DesignInput:
    if args.design_file:
        settings = load_design(args.design_file)
    elif run_config.design is not None:
        settings = run_config.design
    else:
        raise ConfigurationError("No design settings: give a design file or flags")
    overrides = {
        field: value
        for field, value in (
            ("n", args.n),
            ("P", args.P),
            ("L_M", args.L_M),
            ("calibration", args.calibration),
            ("C", args.C),
            ("C_L", args.C_L),
            ("tau", args.tau),
            ("target_key_bits", args.target_bits),
            ("N_override", args.N),
        )
        if value is not None
    }
    data = {**settings.model_dump(), **overrides}
    if "calibration" in overrides and args.L_M is None:
        data["L_M"] = None
    return type(settings).model_validate(data).to_design_input()


def cmd_design(args, run_config: RunConfig) -> int:
    report = design_point(_design_input(args, run_config), layers=args.layers, r=args.r)
    T_b_hat = report.T_b_hat
    lines = [
        f"n: {report.input.n}",
        f"P: {report.input.P}",
        f"L_M_bits: {report.input.L_M}",
        f"L_k_bits: {report.L_k}",
        f"L_k_mbit_decimal: {report.L_k_mbit_decimal:.3f}",
        f"L_k_mbit_binary: {report.L_k_mbit_binary:.3f}",
        f"N: {report.N}",
        f"N_cover: {report.N_cover}",
        f"t_rc_us: {report.t_rc_us:.3f}",
        f"C1R_bps: {report.C1_R:.6g}",
        f"C2R_bps: {report.C2_R:.6g}",
        f"CR_bps: {report.C_R:.6g}",
        f"Tb_log10_years: {report.T_b.log10_years:.4f}",
        f"Tbhat_log10_years: {'infeasible' if T_b_hat is None else format(T_b_hat.log10_years, '.4f')}",
        f"TM_log10_years: {report.T_M.log10_years:.4f}",
        f"TL_log10_years: {report.T_L.log10_years:.4f}",
    ]
    lines.extend(f"note: {note}" for note in report.notes)
    _emit("\n".join(lines) + "\n", args.output)
    return ExitCode.OK


def cmd_sweep(args, run_config: RunConfig) -> int:
    calibration = args.calibration or "binary"
    if args.reference_grid:
        n_values = args.n_values or [5, 10, 15, 20]
        P_values = args.p_values or [2, 3, 4]
        template = reference_design(n_values[0], P_values[0], calibration)
    else:
        if not args.n_values or not args.p_values:
            raise ConfigurationError("sweep needs --n and --p (or --reference-grid)")
        n_values, P_values = args.n_values, args.p_values
        tau = args.tau or run_config.attack.tau
        template = DesignInput(
            n=n_values[0],
            P=max(P_values),
            L_M=args.L_M or CALIBRATIONS[calibration],
            tau=tau,
            target_Tb=2.0**128 * tau,
        )
    rows = design_sweep(n_values, P_values, template, N_override=args.N)

    if args.output is None:
        write_sweep_csv(sys.stdout, rows)
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        with open(args.output, "w", newline="") as f:
            write_sweep_csv(f, rows)
        logger.info(f"Wrote {len(rows)} row(s) to {args.output}")

    if args.reference_grid:
        for (n, P), deviation in sorted(switching_grid_deviation(rows).items()):
            logger.info(f"Grid cell n={n} P={P}: t_rc deviation {deviation:+.2%}")
    if args.N is not None:
        for P in P_values:
            for key_bits in (128, 256):
                result = aes_crossover(P, args.N, key_bits, template.tau)
                logger.info(
                    f"AES-{key_bits} crossover P={P} N={args.N}: n={result.computed}"
                    + (f" (published n={result.published})" if result.deviates else "")
                )
    return ExitCode.OK


# =============================================================================
# Parser
# =============================================================================


def _add_okg_overrides(parser: argparse.ArgumentParser):
    parser.add_argument("--n", type=int, help="Register length")
    parser.add_argument("--P", type=int, help="Number of registers")
    parser.add_argument("--L-k", dest="L_k", type=int, help="Key-part length in bits")
    parser.add_argument("--N", type=int, help="Reset cycles per key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olenc",
        description="Optical layered encryption: key generation, circuits, attacks, design",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  olenc polys 3                                  # list primitive generators of degree 3
  olenc polys 5 --count-only                     # phi(2^5-1)/5
  olenc keygen config/two_register/okg.yaml --inject 01011100
  olenc circuit config/two_register/circuit.yaml
  olenc attack config/two_register/attack.yaml --workers 4
  olenc sweep --n 5:20:5 --p 2,3,4 --reference-grid
        """,
    )
    parser.add_argument("--config", type=Path, default=None, help="YAML configuration file")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polys", help="Enumerate or count primitive polynomials")
    p.add_argument("degree", type=int, help="Register length n")
    p.add_argument("--count-only", action="store_true", help="Print phi(2^n-1)/n only")
    p.add_argument("--output", "-o", type=Path, help="Write the list to a file")

    p = sub.add_parser("keygen", help="Generate one anonymization key")
    p.add_argument("config_file", nargs="?", type=Path, help="Key generator YAML")
    p.add_argument("--ini", default="INI", help="pRNG initialisation token")
    p.add_argument("--inject", help="Explicit pRNG output bits, replacing the reference pRNG")
    p.add_argument("--length", type=int, help="Key length in bits (default N*L_k)")
    p.add_argument("--output-dir", type=Path, help="Write <stem>.bits and <stem>.schedule.csv")
    p.add_argument("--stem", default="key", help="Output file stem")
    p.add_argument("--hex", action="store_true", default=None, help="Hex output")
    _add_okg_overrides(p)

    for name, help_text in (("encrypt", "Add one layer"), ("decrypt", "Remove one layer")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", type=Path, help="Flow bit-string file")
        p.add_argument("--key", "-k", type=Path, required=True, help="Key bit-string file")
        p.add_argument("--output", "-o", type=Path, help="Result bit-string file")
        p.add_argument("--hex", action="store_true", default=None, help="Hex output")

    p = sub.add_parser("circuit", help="Send a message through a circuit")
    p.add_argument("circuit_file", type=Path, help="Circuit YAML")
    p.add_argument("message", nargs="?", type=Path, help="Message bit-string file")
    p.add_argument("--random", type=int, metavar="L", help="Random message of L bits")
    p.add_argument("--seed", type=int, default=0, help="Seed for --random")
    p.add_argument("--output", "-o", type=Path, help="Trace file")
    p.add_argument("--hex", action="store_true", default=None, help="Hex trace cells")

    p = sub.add_parser("attack", help="Brute-force an intercepted flow")
    p.add_argument("scenario_file", type=Path, help="Attack scenario YAML")
    p.add_argument("--workers", type=int, help="Parallel search ranges")
    p.add_argument("--budget", type=int, help="Maximum schedules to enumerate")
    p.add_argument("--output", "-o", type=Path, help="Report file")
    p.add_argument("--hex", action="store_true", default=None, help="Hex flows in the report")
    p.add_argument(
        "--no-timing", dest="timing", action="store_false",
        help="Leave elapsed_s empty so identical runs give identical reports",
    )

    design_flags = argparse.ArgumentParser(add_help=False)
    design_flags.add_argument("--L-M", dest="L_M", type=int, help="Container length in bits")
    design_flags.add_argument("--calibration", choices=sorted(CALIBRATIONS), help="1.25 Gbit reading")
    design_flags.add_argument("--tau", type=float, help="Seconds per decoding try")
    design_flags.add_argument("--N", type=int, help="Fixed reset count")
    design_flags.add_argument("--output", "-o", type=Path, help="Output file")

    p = sub.add_parser("design", parents=[design_flags], help="Evaluate one design point")
    p.add_argument("design_file", nargs="?", type=Path, help="Design YAML")
    p.add_argument("--n", type=int, help="Register length")
    p.add_argument("--P", type=int, help="Number of registers")
    p.add_argument("--C", type=float, help="Line rate in bits/s")
    p.add_argument("--C-L", dest="C_L", type=float, help="Register output rate in bits/s")
    p.add_argument("--target-bits", type=int, help="AES key size setting the target duration")
    p.add_argument("--layers", type=int, default=1, help="Layers removed for T^M")
    p.add_argument("--r", type=int, default=1, help="Key holders on the circuit for T^L")

    p = sub.add_parser("sweep", parents=[design_flags], help="CSV sweep over n and P")
    p.add_argument("--n", dest="n_values", type=parse_range, help="start:stop[:step] or a,b,c")
    p.add_argument("--p", dest="p_values", type=parse_range, help="a,b,c or start:stop")
    p.add_argument(
        "--reference-grid", "--table1", dest="reference_grid", action="store_true",
        help="1.25 Gbit / AES-128 calibration grid",
    )

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the console script"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        run_config = load_run_config(
            args.config if args.config is not None else (
                DEFAULT_CONFIG_PATH if DEFAULT_CONFIG_PATH.exists() else None
            )
        )
        setup_logging(run_config.logging, args.verbose, args.quiet)

        match args.command:
            case "polys":
                return int(cmd_polys(args))
            case "keygen":
                return int(cmd_keygen(args, run_config))
            case "encrypt":
                return int(_single_layer(args, peel=False))
            case "decrypt":
                return int(_single_layer(args, peel=True))
            case "circuit":
                return int(cmd_circuit(args))
            case "attack":
                return int(cmd_attack(args, run_config))
            case "design":
                return int(cmd_design(args, run_config))
            case "sweep":
                return int(cmd_sweep(args, run_config))
    except OpticalAnonymityError as e:
        logger.error(str(e))
        return int(e.exit_code)
    return int(ExitCode.USAGE)


if __name__ == "__main__":
    sys.exit(main())
