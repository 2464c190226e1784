"""YAML configuration and run files, validated with pydantic"""

import logging
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from optical_anonymity.bitstring import BitString
from optical_anonymity.deanonymizer import DEFAULT_BUDGET, AttackScenario
from optical_anonymity.exceptions import ConfigurationError
from optical_anonymity.formats import load_polynomials
from optical_anonymity.lfsr_engine import parse_polynomial
from optical_anonymity.okg import REFERENCE_GENERATOR, OkgConfig
from optical_anonymity.onion_circuit import Circuit, Node, NodeRole
from optical_anonymity.param_designer import (
    CALIBRATIONS,
    DEFAULT_LINE_RATE,
    DEFAULT_TAU,
    DesignInput,
)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: dict[str, Any] = {
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": None,
    },
    "okg": {
        "n": 3,
        "P": 2,
        "L_k": 5,
        "N": 2,
    },
    "design": {
        "n": 5,
        "P": 2,
        "calibration": "binary",
    },
    "attack": {
        "budget": DEFAULT_BUDGET,
        "workers": 1,
        "tau": DEFAULT_TAU,
    },
}


def _parse_bits_field(v: str | None) -> str | None:
    # normalised to plain '0'/'1'; BitString raises ValueError for anything else
    if v is None:
        return v
    return str(BitString.from_str(v))


class LoggingSettings(BaseModel):
    """Root logger setup used by the command line"""

    level: str = Field("INFO", description="Logging level name")
    format: str = Field(DEFAULT_CONFIG["logging"]["format"], description="Record format")
    file: str | None = Field(None, description="Optional log file, appended to")

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """Accept standard level names only"""
        name = v.upper()
        if name not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown logging level '{v}'")
        return name


class OkgSettings(BaseModel):
    """Key generator parameters"""

    n: int | None = Field(None, description="Register length; derived from polynomials if omitted")
    P: int | None = Field(None, description="Number of registers; derived from polynomials if omitted")
    L_k: int = Field(..., description="Key-part length in bits", ge=1)
    N: int = Field(..., description="Reset cycles per key", ge=1)
    polynomials: list[str] | None = Field(
        None, description="Explicit generators in caret notation, in register order"
    )
    polynomials_file: str | None = Field(
        None, description="Polynomial list file in register order, relative to the run file"
    )
    reject_zero_seed: bool = Field(False, description="Refuse all-zero seeds instead of flagging")
    non_repeating: bool = Field(False, description="Never select the same register twice in a row")
    prng: Literal["sha256-ctr"] = Field(REFERENCE_GENERATOR, description="pRNG stand-in")

    @field_validator("n")
    @classmethod
    def validate_n(cls, v: int | None) -> int | None:
        if v is not None and v < 2:
            raise ValueError("Register length must be at least 2")
        return v

    @field_validator("P")
    @classmethod
    def validate_P(cls, v: int | None) -> int | None:
        if v is not None and v < 1:
            raise ValueError("At least one register is required")
        return v

    @model_validator(mode="after")
    def check_source(self) -> "OkgSettings":
        if self.polynomials is not None and self.polynomials_file is not None:
            raise ValueError("Give polynomials or polynomials_file, not both")
        listed = self.polynomials is not None or self.polynomials_file is not None
        if not listed and (self.n is None or self.P is None):
            raise ValueError("Give either a polynomial list or both n and P")
        return self

    def resolved(self, base: Path) -> "OkgSettings":
        """Copy with a relative polynomials_file anchored at ``base``"""
        if self.polynomials_file is None or Path(self.polynomials_file).is_absolute():
            return self
        return self.model_copy(update={"polynomials_file": str(base / self.polynomials_file)})

    def to_okg_config(self) -> OkgConfig:
        options = {"reject_zero_seed": self.reject_zero_seed, "non_repeating": self.non_repeating}
        if self.polynomials_file is not None:
            polys = tuple(load_polynomials(self.polynomials_file))
        elif self.polynomials is not None:
            polys = tuple(parse_polynomial(text) for text in self.polynomials)
        else:
            return OkgConfig.from_degree(self.n, self.P, self.L_k, self.N, **options)
        if self.P is not None and self.P != len(polys):
            raise ConfigurationError(f"P={self.P} but {len(polys)} polynomial(s) listed")
        if self.n is not None and any(p.degree != self.n for p in polys):
            raise ConfigurationError(f"Listed polynomials are not all of degree n={self.n}")
        return OkgConfig(polys, self.L_k, self.N, **options)


class NodeEntry(BaseModel):
    """One node of a circuit file"""

    id: str = Field(..., description="Node label")
    ini: str = Field(..., description="pRNG initialisation token")
    role: NodeRole | None = Field(None, description="Inferred from position when omitted")


class CircuitFile(BaseModel):
    """Circuit description: nodes in path order plus the key generator"""

    okg: OkgSettings
    nodes: list[NodeEntry] = Field(..., description="Source first, destination last")
    message: str | None = Field(None, description="Message bit-string file, relative to this file")
    random_length: int | None = Field(None, description="Random message length in bits", ge=1)
    random_seed: int = Field(0, description="Seed for the random message")
    injected: dict[str, str] | None = Field(
        None, description="Explicit pRNG output per INI token, replacing the reference pRNG"
    )

    @field_validator("nodes")
    @classmethod
    def validate_nodes(cls, v: list[NodeEntry]) -> list[NodeEntry]:
        if len(v) < 2:
            raise ValueError("A circuit needs at least a source and a destination")
        return v

    @field_validator("injected")
    @classmethod
    def validate_injected(cls, v: dict[str, str] | None) -> dict[str, str] | None:
        if v is None:
            return v
        return {ini: _parse_bits_field(bits) for ini, bits in v.items()}

    def to_circuit(self) -> Circuit:
        if all(node.role is None for node in self.nodes):
            return Circuit.from_path([(node.id, node.ini) for node in self.nodes])
        if any(node.role is None for node in self.nodes):
            raise ConfigurationError("Give a role for every node or for none")
        return Circuit(tuple(Node(id=n.id, ini=n.ini, role=n.role) for n in self.nodes))


class AttackFile(BaseModel):
    """Attack scenario: intercepted flow and what it is correlated against"""

    okg: OkgSettings
    intercepted: str = Field(..., description="Intercepted flow as a bit string")
    known_plaintext: str | None = Field(None, description="Known plaintext for recovery")
    outgoing: list[str] | None = Field(None, description="Outgoing flows to correlate against")
    layers_to_remove: int = Field(1, description="Layers the attacker must remove", ge=1)
    budget: int | None = Field(None, description="Maximum schedules to enumerate", ge=1)
    workers: int | None = Field(None, description="Parallel search ranges", ge=1)
    tau: float | None = Field(None, description="Seconds per decoding try", gt=0)

    @field_validator("intercepted", "known_plaintext")
    @classmethod
    def validate_bits(cls, v: str | None) -> str | None:
        return _parse_bits_field(v)

    @field_validator("outgoing")
    @classmethod
    def validate_outgoing(cls, v: list[str] | None) -> list[str] | None:
        if v is None:
            return v
        return [_parse_bits_field(bits) for bits in v]

    @model_validator(mode="after")
    def check_reference(self) -> "AttackFile":
        if (self.known_plaintext is None) == (self.outgoing is None):
            raise ValueError("Give exactly one of known_plaintext or outgoing")
        return self

    def to_scenario(self) -> AttackScenario:
        return AttackScenario(
            intercepted=BitString.from_str(self.intercepted),
            config=self.okg.to_okg_config(),
            reference=(
                BitString.from_str(self.known_plaintext) if self.known_plaintext is not None else None
            ),
            outgoing=(
                frozenset(BitString.from_str(b) for b in self.outgoing)
                if self.outgoing is not None
                else None
            ),
            layers_to_remove=self.layers_to_remove,
        )


class DesignSettings(BaseModel):
    """Design calculator inputs"""

    n: int = Field(..., description="Register length", ge=2)
    P: int = Field(..., description="Number of parallel registers", ge=1)
    L_M: int | None = Field(None, description="Container length in bits; calibration if omitted", ge=1)
    calibration: Literal["binary", "decimal"] = Field("binary", description="1.25 Gbit reading")
    C: float = Field(DEFAULT_LINE_RATE, description="Line rate in bits/s", gt=0)
    C_L: float = Field(DEFAULT_LINE_RATE, description="Register output rate in bits/s", gt=0)
    tau: float = Field(DEFAULT_TAU, description="Seconds per decoding try", gt=0)
    target_Tb: float | None = Field(None, description="Target attack duration in seconds", gt=0)
    target_key_bits: int = Field(128, description="AES key size setting the target when target_Tb is omitted", ge=1)
    N_override: int | None = Field(None, description="Fixed reset count", ge=1)

    def to_design_input(self) -> DesignInput:
        target = self.target_Tb if self.target_Tb is not None else 2.0**self.target_key_bits * self.tau
        return DesignInput(
            n=self.n,
            P=self.P,
            L_M=self.L_M if self.L_M is not None else CALIBRATIONS[self.calibration],
            C=self.C,
            C_L=self.C_L,
            tau=self.tau,
            target_Tb=target,
            N_override=self.N_override,
        )


class AttackDefaults(BaseModel):
    budget: int = Field(DEFAULT_BUDGET, ge=1)
    workers: int = Field(1, ge=1)
    tau: float = Field(DEFAULT_TAU, gt=0)


class RunConfig(BaseModel):
    """The whole command-line configuration file"""

    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    okg: OkgSettings | None = None
    design: DesignSettings | None = None
    attack: AttackDefaults = Field(default_factory=AttackDefaults)


# =============================================================================
# Loading
# =============================================================================


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_yaml(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"File not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in {path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return data


def _validate(model: type[BaseModel], data: dict, source: str) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"{source}: {e}")


def load_run_config(config_path: str | Path | None) -> RunConfig:
    """Load the YAML configuration over the defaults; a missing file yields defaults"""
    data = DEFAULT_CONFIG
    if config_path:
        try:
            data = _merge(DEFAULT_CONFIG, read_yaml(config_path))
        except ConfigurationError:
            if Path(config_path).exists():
                raise
            logger.warning(f"Config file not found: {config_path}")
    run_config = _validate(RunConfig, data, str(config_path or "defaults"))
    if run_config.okg is not None and config_path:
        run_config.okg = run_config.okg.resolved(Path(config_path).parent)
    return run_config


def load_okg_settings(path: str | Path) -> OkgSettings:
    path = Path(path)
    data = read_yaml(path)
    return _validate(OkgSettings, data.get("okg", data), str(path)).resolved(path.parent)


def load_circuit(path: str | Path) -> CircuitFile:
    """Circuit file; relative message and polynomial paths are resolved against the file"""
    path = Path(path)
    circuit = _validate(CircuitFile, read_yaml(path), str(path))
    circuit = circuit.model_copy(update={"okg": circuit.okg.resolved(path.parent)})
    if circuit.message is not None and not Path(circuit.message).is_absolute():
        circuit = circuit.model_copy(update={"message": str(path.parent / circuit.message)})
    return circuit


def load_attack(path: str | Path) -> AttackFile:
    path = Path(path)
    attack = _validate(AttackFile, read_yaml(path), str(path))
    return attack.model_copy(update={"okg": attack.okg.resolved(path.parent)})


def load_design(path: str | Path) -> DesignSettings:
    data = read_yaml(path)
    return _validate(DesignSettings, data.get("design", data), str(path))
