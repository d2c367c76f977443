"""Dimension-4 qudit protocols: qubit-pair encoding, the teleported CSUM_4,
distributed CZ_4 powers, the single-control multitarget CSUM''_4, and the
qudit-compressed distributed GCZ.

A dimension-4 qudit encodes two co-located qubits via |q_a q_b> -> |2 q_a + q_b>.
Conjugating a qudit by X23 moves the pair parity q_a xor q_b into its low
digit, so two (CZ_4)^2 gates between conjugated qudits contribute exactly the
cross-pair phase (-1)^((q_a xor q_b)(q_c xor q_d)); P3 supplies the intra-pair
phase (-1)^(q_a q_b). That decomposition turns an n-qubit GCZ into one
diagonal block per node pair, distributable with one qudit pair or one qudit
GHZ state per fan-out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import CircuitBuilder, DistCircuit, NodeLayout
from .qubit_protocols import Partition
from .statevec import MixedRegister, permute


@dataclass(frozen=True)
class QuditEncoding:
    """Ordered pairing of qubit labels onto qudit labels (|q_a q_b> -> |2 q_a + q_b>)."""

    pairs: tuple[tuple[str, str], ...]
    qudit_labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((a, b) for a, b in self.pairs))
        object.__setattr__(self, "qudit_labels", tuple(self.qudit_labels))
        if len(self.pairs) != len(self.qudit_labels):
            raise ValueError("one qudit label per qubit pair required")
        flat = [q for pair in self.pairs for q in pair]
        if len(set(flat)) != len(flat):
            raise ValueError("qubit labels must be distinct across pairs")

    @property
    def qubit_order(self) -> tuple[str, ...]:
        return tuple(q for pair in self.pairs for q in pair)


def encode(state: MixedRegister, enc: QuditEncoding) -> MixedRegister:
    """Merge each qubit pair into one dimension-4 subsystem (amplitude-preserving)."""
    expected = set(enc.qubit_order)
    if set(state.labels) != expected:
        missing = expected ^ set(state.labels)
        raise ValueError(f"encoding pairs do not cover the register (mismatch: {sorted(missing)})")
    for label in state.labels:
        if state.dim_of(label) != 2:
            raise ValueError(f"{label!r} is not a qubit (dimension {state.dim_of(label)})")
    ordered = permute(state, enc.qubit_order)
    dims = (4,) * len(enc.pairs)
    return MixedRegister(dims, ordered.amps, enc.qudit_labels)


def decode(state: MixedRegister, enc: QuditEncoding) -> MixedRegister:
    """Split each dimension-4 subsystem back into its qubit pair."""
    if tuple(state.labels) != enc.qudit_labels:
        ordered = permute(state, enc.qudit_labels)
    else:
        ordered = state
    if any(d != 4 for d in ordered.dims):
        raise ValueError(f"decode expects dimension-4 subsystems, got {ordered.dims}")
    dims = (2,) * (2 * len(enc.pairs))
    return MixedRegister(dims, ordered.amps, enc.qubit_order)


def qudit_gcz_local_pair() -> list[tuple[str, tuple[int, ...]]]:
    """Gate sequence equal to the encoded 4-qubit GCZ on two dimension-4 qudits.

    Returned as (gate name, qudit slots) in execution order: X23 conjugation
    around a double CZ_4 produces the cross-pair parity phase, then P3 adds
    the intra-pair phases.
    """
    return [
        ("X23", (0,)), ("X23", (1,)),
        ("CZ4", (0, 1)), ("CZ4", (0, 1)),
        ("X23", (0,)), ("X23", (1,)),
        ("P3", (0,)), ("P3", (1,)),
    ]


def _receiver_gates(op: str):
    """Receiver-side block of the teleported qudit protocols.

    csum: plain CSUM_4 from the entangled share onto the data qudit.
    cz4: H4-conjugated CSUM_4, realizing CZ_4.
    cz4_sq: H4-conjugated double CSUM_4, realizing (CZ_4)^2.
    """
    if op == "csum":
        return lambda b, share, data, layer=None: b.gate("CSUM4", (share, data), layer=layer)
    if op in ("cz4", "cz4_sq"):
        reps = 1 if op == "cz4" else 2

        def emit(b, share, data, layer=None):
            b.gate("H4_dag", (data,), layer=layer)
            for _ in range(reps):
                b.gate("CSUM4", (share, data), layer=layer)
            b.gate("H4", (data,), layer=layer)

        return emit
    raise ValueError(f"unknown receiver operation {op!r}")


def _dcsum_skeleton(b: CircuitBuilder, control: str, groups: dict[str, list[str]],
                    receiver, layer: int | None = None):
    """Teleported qudit fan-out: control-side share absorbs the control value,
    is complemented and measured; remote shares are shifted into |control>,
    drive the receiver block, and are measured in the Fourier basis; the
    summed Fourier outcomes fix the residual phase on the control."""
    cnode = b.node_of(control)
    rnodes = list(groups)
    labels = b.qudit_ghz([cnode] + rnodes, dim=4, layer=layer)
    share0, shares = labels[0], labels[1:]
    b.gate("CSUM4_dag", (control, share0), layer=layer)
    b.gate("K4", (share0,), layer=layer)
    m0 = b.measure(share0, layer=layer)
    b.send(m0, cnode, rnodes, bits=2, layer=layer)
    fourier_outcomes = []
    for node, share in zip(rnodes, shares):
        b.cond("X4", (share,), (m0,), mod=4, layer=layer)
        for data in groups[node]:
            receiver(b, share, data, layer)
        b.gate("H4", (share,), layer=layer)
        m = b.measure(share, layer=layer)
        b.send(m, node, [cnode], bits=2, layer=layer)
        fourier_outcomes.append(m)
    b.cond("Z4_dag", (control,), tuple(fourier_outcomes), mod=4, layer=layer)


def build_dcsum4(q1: str, q2: str, layout: NodeLayout) -> DistCircuit:
    """Teleported CSUM_4 between qudits on two nodes, using one qudit pair."""
    b = CircuitBuilder(layout)
    if b.node_of(q1) == b.node_of(q2):
        raise ValueError(f"{q1} and {q2} share a node; use a local CSUM4")
    _dcsum_skeleton(b, q1, {b.node_of(q2): [q2]}, _receiver_gates("csum"))
    return b.build((q1, q2))


def build_dcz4_pow(q1: str, q2: str, power: int, layout: NodeLayout) -> DistCircuit:
    """Teleported CZ_4 (power 1) or (CZ_4)^2 (power 2) over one qudit pair."""
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    b = CircuitBuilder(layout)
    if b.node_of(q1) == b.node_of(q2):
        raise ValueError(f"{q1} and {q2} share a node; use a local gate")
    op = "cz4" if power == 1 else "cz4_sq"
    _dcsum_skeleton(b, q1, {b.node_of(q2): [q2]}, _receiver_gates(op))
    return b.build((q1, q2))


def build_dcsum4_multitarget(control: str, targets, layout: NodeLayout,
                             receiver_op: str = "csum") -> DistCircuit:
    """Single-control multitarget qudit fan-out over one qudit GHZ state.

    receiver_op "csum" realizes CSUM''_4 (|i>|j>|k> -> |i>|i+j>|i+k| mod 4);
    "cz4_sq" drives (CZ_4)^2 from the control onto every target.
    """
    targets = tuple(targets)
    if not targets:
        raise ValueError("fan-out needs at least one target")
    b = CircuitBuilder(layout)
    cnode = b.node_of(control)
    groups: dict[str, list[str]] = {}
    seen = {control}
    for t in targets:
        if t in seen:
            raise ValueError(f"duplicate qudit {t!r} in fan-out")
        seen.add(t)
        node = b.node_of(t)
        if node == cnode:
            raise ValueError(f"target {t!r} is co-located with the control")
        groups.setdefault(node, []).append(t)
    _dcsum_skeleton(b, control, groups, _receiver_gates(receiver_op))
    return b.build((control, *targets))


def build_qudit_gcz(n_qubits: int, partition: Partition,
                    enc: QuditEncoding) -> DistCircuit:
    """Qudit-compressed distributed GCZ over one dimension-4 qudit per node.

    Each interacting node pair needs one (CZ_4)^2 between X23-conjugated
    qudits; the fan-outs from each qudit to all later ones use one qudit GHZ
    state each, the final pair a single entangled qudit pair, and P3 per
    qudit supplies the intra-pair phases.
    """
    if n_qubits % 2:
        raise ValueError("qudit compression pairs qubits; n_qubits must be even")
    if n_qubits != 2 * len(enc.pairs):
        raise ValueError("encoding must cover exactly n_qubits qubits")
    qudits = enc.qudit_labels
    d_nodes = len(qudits)
    b = CircuitBuilder(partition.layout)
    nodes = [b.node_of(q) for q in qudits]
    if len(set(nodes)) != d_nodes:
        raise ValueError("expected one qudit per node")
    for (qa, qb), qd in zip(enc.pairs, qudits):
        pa = partition.layout.placement.get(qa)
        pb = partition.layout.placement.get(qb)
        if pa is not None and pb is not None and pa != pb:
            raise ValueError(f"encoded pair ({qa}, {qb}) spans nodes {pa} and {pb}")

    cz2 = _receiver_gates("cz4_sq")
    for i in range(d_nodes - 1):
        block = qudits[i:]
        for q in block:
            b.gate("X23", (q,), layer=i)
        if len(block) == 2:
            _dcsum_skeleton(b, block[0], {b.node_of(block[1]): [block[1]]}, cz2, layer=i)
        else:
            groups = {b.node_of(t): [t] for t in block[1:]}
            _dcsum_skeleton(b, block[0], groups, cz2, layer=i)
        for q in block:
            b.gate("X23", (q,), layer=i)
    for q in enc.qudit_labels:
        b.gate("P3", (q,))
    return b.build(enc.qudit_labels)
