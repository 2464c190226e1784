"""Layered XOR encryption over a chain of nodes

The source inserts one layer per key-holding node (anonymizers and the
destination), applying K_r first and K_1 last. Node i removes layer K_i, so the
flow on the hop into node i is M xor K_i xor ... xor K_r.
"""

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import reduce

from optical_anonymity.bitstring import BitString
from optical_anonymity.exceptions import ConfigurationError, LengthMismatchError
from optical_anonymity.okg import (
    AnonKey,
    InjectedSource,
    OkgConfig,
    PrngSource,
    ReferencePrng,
    generate_key,
)

logger = logging.getLogger(__name__)

SourceFactory = Callable[[str], PrngSource]


class NodeRole(Enum):
    """Role of a node on the circuit"""

    SOURCE = "source"
    ANONYMIZER = "anonymizer"
    DESTINATION = "destination"


@dataclass(frozen=True)
class Node:
    """A circuit node and the INI token its pRNG starts from"""

    id: str
    ini: str
    role: NodeRole


@dataclass(frozen=True)
class Circuit:
    """Ordered path from source to destination"""

    nodes: tuple[Node, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) < 2:
            raise ConfigurationError("A circuit needs at least a source and a destination")
        roles = [node.role for node in self.nodes]
        if roles[0] is not NodeRole.SOURCE or roles.count(NodeRole.SOURCE) != 1:
            raise ConfigurationError("The first node must be the only source")
        if roles[-1] is not NodeRole.DESTINATION or roles.count(NodeRole.DESTINATION) != 1:
            raise ConfigurationError("The last node must be the only destination")
        ids = [node.id for node in self.nodes]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Duplicate node ids in circuit: {ids}")

    @classmethod
    def from_path(cls, path: Sequence[tuple[str, str]]) -> "Circuit":
        """Build from (id, ini) pairs: first is the source, last the destination"""
        nodes = []
        for position, (node_id, ini) in enumerate(path):
            if position == 0:
                role = NodeRole.SOURCE
            elif position == len(path) - 1:
                role = NodeRole.DESTINATION
            else:
                role = NodeRole.ANONYMIZER
            nodes.append(Node(id=node_id, ini=ini, role=role))
        return cls(tuple(nodes))

    @property
    def source(self) -> Node:
        return self.nodes[0]

    @property
    def key_holders(self) -> tuple[Node, ...]:
        """Nodes 1..r in path order; position i holds key K_i"""
        return self.nodes[1:]

    @property
    def r(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class HopRecord:
    """Bits entering and leaving one node"""

    node_id: str
    incoming: BitString
    outgoing: BitString


@dataclass(frozen=True)
class FlowTrace:
    """Per-hop record of one flow through a circuit"""

    hops: tuple[HopRecord, ...]
    layers: tuple[BitString, ...]
    keys: tuple[AnonKey, ...]

    @property
    def plaintext(self) -> BitString:
        return self.hops[0].incoming

    @property
    def recovered(self) -> BitString:
        return self.hops[-1].outgoing


# =============================================================================
# Layer operations
# =============================================================================


def xor_bits(a: BitString, b: BitString) -> BitString:
    return a.xor(b)


def add_layer(M_next: BitString, K_i: BitString) -> BitString:
    """M_i = M_{i+1} xor K_i (one pass through the encryption loop)"""
    return xor_bits(M_next, K_i)


def peel_layer(M_i: BitString, K_i: BitString) -> BitString:
    """M_{i+1} = M_i xor K_i"""
    return xor_bits(M_i, K_i)


def source_encrypt(
    M: BitString, keys: Sequence[BitString]
) -> tuple[BitString, list[BitString]]:
    """
    Apply every layer at the source.

    Args:
        M: plaintext
        keys: [K_r, ..., K_1], applied in list order
    Returns:
        (M_1, [M_r, ..., M_1])
    """
    if not keys:
        raise ValueError("At least one key is required for layered encryption")
    trace = []
    current = M
    for key in keys:
        current = add_layer(current, key)
        trace.append(current)
    return current, trace


def hop_expectations(M: BitString, keys: Sequence[BitString]) -> list[BitString]:
    """
    Expected flow on the hop into each key-holding node, recomputed from the keys.

    Args:
        keys: [K_1, ..., K_r] in path order
    Returns:
        [M_1, ..., M_r] where M_i = M xor K_i xor ... xor K_r
    """
    return [reduce(xor_bits, keys[i:], M) for i in range(len(keys))]


# =============================================================================
# Circuit simulation
# =============================================================================


def injected_sources(streams: Mapping[str, BitString | str]) -> SourceFactory:
    """Source factory handing out explicit bits per INI token"""

    def factory(ini: str) -> PrngSource:
        if ini not in streams:
            raise ConfigurationError(f"No injected bits for INI token '{ini}'")
        return InjectedSource(streams[ini], ini=ini)

    return factory


def node_key(
    node: Node, config: OkgConfig, length: int, source_factory: SourceFactory = ReferencePrng
) -> AnonKey:
    """Key a node derives from its own INI token"""
    return generate_key(config, source_factory(node.ini), length=length)


def run_circuit(
    circuit: Circuit,
    config: OkgConfig,
    M: BitString,
    source_factory: SourceFactory = ReferencePrng,
) -> FlowTrace:
    """
    Send M from source to destination through every node of the circuit.

    The source generates K_r down to K_1 from the downstream INI tokens and applies
    them in that order; every key holder regenerates its own key independently and
    peels one layer.
    """
    L_M = M.length
    parts_needed = -(-L_M // config.L_k)
    if parts_needed != config.N:
        raise LengthMismatchError(
            f"Flow of {L_M} bit(s) needs {parts_needed} key part(s) of {config.L_k} bits, "
            f"configuration generates N={config.N}"
        )

    holders = circuit.key_holders
    source_keys = [
        node_key(node, config, L_M, source_factory) for node in reversed(holders)
    ]
    M_1, layers = source_encrypt(M, [key.bits for key in source_keys])
    hops = [HopRecord(circuit.source.id, M, M_1)]

    node_keys = []
    current = M_1
    for position, node in enumerate(holders, start=1):
        key = node_key(node, config, L_M, source_factory)
        node_keys.append(key)
        outgoing = peel_layer(current, key.bits)
        logger.debug(f"Node {node.id} (K_{position}): {current.to_hex()} -> {outgoing.to_hex()}")
        hops.append(HopRecord(node.id, current, outgoing))
        current = outgoing

    if current != M:
        logger.warning(f"Destination {circuit.nodes[-1].id} did not recover the plaintext")
    logger.info(f"Circuit {'-'.join(n.id for n in circuit.nodes)}: {L_M}-bit flow, r={circuit.r}")
    return FlowTrace(hops=tuple(hops), layers=tuple(layers), keys=tuple(node_keys))


def verify_trace(trace: FlowTrace) -> bool:
    """Hop correctness plus end-to-end identity"""
    M = trace.plaintext
    expected = hop_expectations(M, [key.bits for key in trace.keys])
    arriving = [hop.incoming for hop in trace.hops[1:]]
    return arriving == expected and trace.recovered == M
