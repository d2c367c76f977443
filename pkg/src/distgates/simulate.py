"""Execute distributed circuits with full measurement-branch enumeration.

Every projective measurement forks the frontier into one branch per nonzero
outcome; classically conditioned corrections apply the named gate raised to
the condition's value. Results are deterministic and ordered by outcome
record.

Teleported-gate protocols reconverge: once corrections have been applied, all
branches hold the same state. ``merge_equal=True`` collapses branches whose
states coincide (and whose still-referenced outcome symbols agree), keeping
enumeration polynomial for circuits with many teleported gates while the
reported ``weight`` preserves the underlying branch count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import DistCircuit, Instruction
from .gates import gate_arity, gate_power, gate_unitary
from .statevec import (BranchResult, MixedRegister, apply_unitary,
                       measure_enumerate, tensor)

MERGE_ATOL = 1e-12

_QUDIT_GATES = ("P3", "X23", "X4", "Z4_dag", "K4", "H4", "H4_dag",
                "CSUM4", "CSUM4_dag", "CZ4")


def infer_dims(circuit: DistCircuit) -> dict[str, int]:
    """Subsystem dimensions implied by the circuit's gates and resources."""
    dims: dict[str, int] = {}

    def put(label, d):
        if dims.setdefault(label, d) != d:
            raise ValueError(f"subsystem {label!r} used with dimensions {dims[label]} and {d}")

    for ins in circuit.instructions:
        if ins.kind in ("LocalGate", "CondGate") and ins.gate is not None:
            for label, d in zip(ins.targets, gate_arity(ins.gate)):
                put(label, d)
        elif ins.kind in ("CreateBell", "CreateGHZ"):
            for label in ins.targets:
                put(label, 2)
        elif ins.kind in ("CreateQuditPair", "CreateQuditGHZ"):
            for label in ins.targets:
                put(label, ins.dim or 4)
    for label in circuit.inputs:
        dims.setdefault(label, 2)
    return dims


def _resource_state(ins: Instruction) -> MixedRegister:
    if ins.kind in ("CreateBell", "CreateGHZ"):
        d = 2
    else:
        d = ins.dim or 4
    n = len(ins.targets)
    amps = np.zeros(d ** n, dtype=np.complex128)
    step = (d ** n - 1) // (d - 1)  # |kk...k> has flat index k * (1 + d + d^2 + ...)
    amps[np.arange(d) * step] = 1 / math.sqrt(d)
    return MixedRegister((d,) * n, amps, ins.targets)


@dataclass
class _Branch:
    state: MixedRegister
    prob: float
    outcomes: tuple[tuple[str, int], ...]
    values: dict[str, int]
    weight: int


def _future_symbols(instructions) -> list[frozenset[str]]:
    """For each index, the outcome symbols any later condition still reads."""
    out = [frozenset()] * (len(instructions) + 1)
    live: frozenset[str] = frozenset()
    for i in range(len(instructions) - 1, -1, -1):
        ins = instructions[i]
        if ins.condition is not None:
            live = live | frozenset(ins.condition.terms)
        out[i] = live
    return out


def _merge(frontier: list[_Branch], live: frozenset[str]) -> list[_Branch]:
    merged: list[_Branch] = []
    for br in frontier:
        key_vals = tuple(br.values.get(s) for s in sorted(live))
        for kept in merged:
            if (kept.state.labels == br.state.labels
                    and kept.state.dims == br.state.dims
                    and tuple(kept.values.get(s) for s in sorted(live)) == key_vals
                    and np.allclose(kept.state.amps, br.state.amps,
                                    rtol=0.0, atol=MERGE_ATOL)):
                kept.prob += br.prob
                kept.weight += br.weight
                break
        else:
            merged.append(br)
    return merged


def enumerate_branches(circuit: DistCircuit, input_state: MixedRegister | None = None,
                       merge_equal: bool = False, upto: int | None = None,
                       ) -> list[BranchResult]:
    """Run the circuit on ``input_state``, returning every measurement branch.

    ``input_state`` labels must equal the circuit's declared inputs in order
    (defaults to the all-zeros basis state). ``upto`` executes only the first
    ``upto`` instructions, which exposes intermediate protocol states.
    """
    dims = infer_dims(circuit)
    if input_state is None:
        input_state = MixedRegister.basis(
            circuit.inputs, tuple(dims[l] for l in circuit.inputs),
            (0,) * len(circuit.inputs))
    if tuple(input_state.labels) != tuple(circuit.inputs):
        raise ValueError(
            f"input labels {input_state.labels} do not match circuit inputs {circuit.inputs}")
    for label, d in zip(input_state.labels, input_state.dims):
        if dims.get(label, d) != d:
            raise ValueError(f"input {label!r} has dimension {d}, circuit expects {dims[label]}")

    instructions = circuit.instructions[:upto] if upto is not None else circuit.instructions
    live_after = _future_symbols(circuit.instructions)
    frontier = [_Branch(input_state, 1.0, (), {}, 1)]

    for i, ins in enumerate(instructions):
        if ins.kind == "LocalGate":
            u = gate_unitary(ins.gate, ins.params)
            for br in frontier:
                br.state = apply_unitary(br.state, u, ins.targets)
        elif ins.kind in ("CreateBell", "CreateGHZ", "CreateQuditPair", "CreateQuditGHZ"):
            resource = _resource_state(ins)
            for br in frontier:
                br.state = tensor(br.state, resource)
        elif ins.kind == "Measure":
            target = ins.targets[0]
            symbol = ins.outcome or f"_m{i}"
            new_frontier: list[_Branch] = []
            for br in frontier:
                for sub in measure_enumerate(br.state, target):
                    outcome = sub.outcomes[0][1]
                    new_frontier.append(_Branch(
                        sub.state, br.prob * sub.probability,
                        br.outcomes + ((symbol, outcome),),
                        {**br.values, symbol: outcome}, br.weight))
            frontier = new_frontier
        elif ins.kind == "CondGate":
            for br in frontier:
                value = ins.condition.evaluate(br.values)
                if value:
                    u = gate_power(ins.gate, ins.params, value)
                    br.state = apply_unitary(br.state, u, ins.targets)
        elif ins.kind == "ClassicalSend":
            pass  # free in simulation; audited by the resource tally
        else:  # pragma: no cover - Instruction rejects unknown kinds
            raise ValueError(f"unknown instruction kind {ins.kind!r}")
        if merge_equal and len(frontier) > 1:
            frontier = _merge(frontier, live_after[i + 1])

    return [BranchResult(br.outcomes, br.prob, br.state, br.weight) for br in frontier]
