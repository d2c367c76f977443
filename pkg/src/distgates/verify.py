"""Oracle gates and branch-exhaustive equivalence checking.

``verify`` runs a compiled distributed circuit on a set of inputs, enumerates
every measurement branch, and compares each branch's post-correction state
(restricted and reordered to the declared outputs) against the ideal
monolithic gate, up to global phase. Teleported-gate protocols rely on all
branches converging to the same state, so branch merging is on by default;
the reported branch count includes merged multiplicities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .circuit import DistCircuit, ResourceTally, tally
from .gates import (cz4_sq_matrix, cz_matrix, czd_matrix, csum_matrix,
                    csum_multi_matrix, h_matrix, s_dag_matrix)
from .qubit_protocols import lms_matrix
from .simulate import enumerate_branches, infer_dims
from .statevec import MixedRegister, Unitary, fidelity_up_to_phase, permute, random_register

DEFAULT_THRESHOLD = 1 - 1e-9


def embed_unitary(mat: np.ndarray, axes, dims) -> np.ndarray:
    """Embed a small matrix acting on the given axes into the full register space."""
    dims = tuple(dims)
    total = math.prod(dims)
    out = np.empty((total, total), dtype=np.complex128)
    basis = np.zeros(total, dtype=np.complex128)
    for col in range(total):
        basis[:] = 0.0
        basis[col] = 1.0
        out[:, col] = backend.apply_matrix(basis, dims, tuple(axes), mat)
    return out


def oracle_gms(n: int, theta: float) -> Unitary:
    """Global MS gate on n qubits as the product of its commuting pair factors."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    dims = (2,) * n
    total = 2 ** n
    mat = np.eye(total, dtype=np.complex128)
    pair = lms_matrix(theta).entries
    for i in range(n):
        for j in range(i + 1, n):
            mat = embed_unitary(pair, (i, j), dims) @ mat
    return Unitary(mat, dims)


def oracle_gcz(n: int) -> Unitary:
    """Global CZ on n qubits: diagonal phase (-1)^(sum of q_i q_j over pairs)."""
    if n < 2:
        raise ValueError("need at least 2 qubits")
    diag = np.ones(2 ** n, dtype=np.complex128)
    for idx in range(2 ** n):
        bits = [(idx >> (n - 1 - p)) & 1 for p in range(n)]
        parity = sum(bits[i] * bits[j] for i in range(n) for j in range(i + 1, n)) % 2
        diag[idx] = -1.0 if parity else 1.0
    return Unitary(np.diag(diag), (2,) * n)


def oracle_multitarget_cu(gates) -> Unitary:
    """Single-control multitarget gate: product of controlled-u onto each target.

    ``gates`` is an ordered list of 2x2 target unitaries; the control qubit is
    subsystem 0, targets follow in order.
    """
    n = len(gates) + 1
    dims = (2,) * n
    mat = np.eye(2 ** n, dtype=np.complex128)
    for t, u in enumerate(gates, start=1):
        cu = np.eye(4, dtype=np.complex128)
        cu[2:, 2:] = u
        mat = embed_unitary(cu, (0, t), dims) @ mat
    return Unitary(mat, dims)


def oracle_csum4() -> Unitary:
    return Unitary(csum_matrix(4), (4, 4))


def oracle_csum4_multi(n_targets: int = 2) -> Unitary:
    return Unitary(csum_multi_matrix(4, n_targets), (4,) * (n_targets + 1))


def oracle_cz4_pow(power: int) -> Unitary:
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    mat = czd_matrix(4) if power == 1 else cz4_sq_matrix()
    return Unitary(mat, (4, 4))


def oracle_cz4_sq_fanout(n_targets: int) -> Unitary:
    """(CZ_4)^2 from one control qudit onto each of n_targets target qudits."""
    dims = (4,) * (n_targets + 1)
    mat = np.eye(4 ** (n_targets + 1), dtype=np.complex128)
    for t in range(1, n_targets + 1):
        mat = embed_unitary(cz4_sq_matrix(), (0, t), dims) @ mat
    return Unitary(mat, dims)


def oracle_qudit_gcz(n_qudits: int) -> Unitary:
    """Encoded n-qubit GCZ on dimension-4 qudits: each digit is a qubit pair."""
    diag = np.ones(4 ** n_qudits, dtype=np.complex128)
    for idx in range(4 ** n_qudits):
        digits = []
        v = idx
        for _ in range(n_qudits):
            digits.append(v % 4)
            v //= 4
        digits.reverse()
        bits = [b for d in digits for b in (d >> 1, d & 1)]
        n = len(bits)
        parity = sum(bits[i] * bits[j] for i in range(n) for j in range(i + 1, n)) % 2
        diag[idx] = -1.0 if parity else 1.0
    return Unitary(np.diag(diag), (4,) * n_qudits)


@dataclass(frozen=True)
class OracleSpec:
    """Named ideal operation a compiled circuit is checked against."""

    kind: str
    labels: tuple[str, ...] = ()
    theta: float | None = None
    power: int = 2

    def unitary(self, n: int) -> Unitary:
        if self.kind == "gms":
            if self.theta is None:
                raise ValueError("GMS oracle needs theta")
            return oracle_gms(n, self.theta)
        if self.kind == "gcz":
            return oracle_gcz(n)
        if self.kind == "cnot":
            return oracle_multitarget_cu([np.array([[0, 1], [1, 0]], dtype=complex)] * (n - 1))
        if self.kind == "csum4":
            return oracle_csum4()
        if self.kind == "csum4_multi":
            return oracle_csum4_multi(n - 1)
        if self.kind == "cz4":
            return oracle_cz4_pow(1)
        if self.kind == "cz4_sq":
            return oracle_cz4_pow(2) if n == 2 else oracle_cz4_sq_fanout(n - 1)
        if self.kind == "qudit_gcz":
            return oracle_qudit_gcz(n)
        raise ValueError(f"unknown oracle kind {self.kind!r}")


@dataclass
class Failure:
    input_index: int
    outcomes: tuple[tuple[str, int], ...]
    fidelity: float


@dataclass
class VerificationReport:
    branches: int = 0
    min_fidelity: float = 1.0
    failures: list[Failure] = field(default_factory=list)
    resource_tally: ResourceTally | None = None
    inputs_checked: int = 0
    seed: int | None = None
    threshold: float = DEFAULT_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.min_fidelity >= self.threshold

    def to_json(self) -> str:
        doc = {
            "branches": self.branches,
            "min_fidelity": self.min_fidelity,
            "inputs_checked": self.inputs_checked,
            "passed": self.passed,
            "threshold": self.threshold,
            "seed": self.seed,
            "failures": [
                {"input": f.input_index,
                 "outcomes": [[s, v] for s, v in f.outcomes],
                 "fidelity": f.fidelity}
                for f in sorted(self.failures, key=lambda f: (f.input_index, f.outcomes))
            ],
            "resource_tally": self.resource_tally.as_dict() if self.resource_tally else None,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def basis_inputs(circuit: DistCircuit) -> list[MixedRegister]:
    """Every computational basis state over the circuit's declared inputs."""
    dims = infer_dims(circuit)
    in_dims = tuple(dims[l] for l in circuit.inputs)
    states = []
    for idx in range(math.prod(in_dims)):
        digits = []
        v = idx
        for d in reversed(in_dims):
            digits.append(v % d)
            v //= d
        digits.reverse()
        states.append(MixedRegister.basis(circuit.inputs, in_dims, digits))
    return states


def random_inputs(circuit: DistCircuit, count: int, seed: int = 7) -> list[MixedRegister]:
    """Seeded Haar-ish random input states over the circuit's declared inputs."""
    dims = infer_dims(circuit)
    in_dims = tuple(dims[l] for l in circuit.inputs)
    rng = np.random.default_rng(seed)
    return [random_register(circuit.inputs, in_dims, rng) for _ in range(count)]


def verify(circuit: DistCircuit, oracle, inputs, threshold: float = DEFAULT_THRESHOLD,
           merge: bool = True, seed: int | None = None) -> VerificationReport:
    """Compare every measurement branch of the circuit against the ideal gate.

    ``oracle`` is a Unitary or an OracleSpec over the circuit's inputs. Each
    branch's final state is reordered to the declared outputs (output i holds
    logical input i) before the fidelity check.
    """
    if isinstance(oracle, OracleSpec):
        oracle = oracle.unitary(len(circuit.inputs))
    report = VerificationReport(resource_tally=tally(circuit), seed=seed,
                                threshold=threshold)
    for idx, state in enumerate(inputs):
        expected_amps = oracle.entries @ state.amps
        expected = MixedRegister(state.dims, expected_amps, circuit.outputs)
        for branch in enumerate_branches(circuit, state, merge_equal=merge):
            if sorted(branch.state.labels) != sorted(circuit.outputs):
                raise ValueError(
                    f"branch left subsystems {branch.state.labels}, expected {circuit.outputs}")
            final = permute(branch.state, circuit.outputs)
            fid = fidelity_up_to_phase(final, expected)
            report.branches += branch.weight
            if fid < report.min_fidelity:
                report.min_fidelity = fid
            if fid < threshold:
                report.failures.append(Failure(idx, branch.outcomes, fid))
        report.inputs_checked += 1
    return report


# ---------------------------------------------------------------------------
# gate-algebra identity suite (also surfaced by the CLI)
# ---------------------------------------------------------------------------

def _dev(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def identity_checks(theta: float = math.pi / 3) -> list[tuple[str, float]]:
    """(name, max deviation) for each algebraic identity the protocols rest on."""
    from .gates import (cnot_matrix, fourier_matrix, gate_unitary,
                        level_swap_matrix, rz_matrix, shift_matrix)

    h2 = np.kron(h_matrix(), h_matrix())
    eye2 = np.eye(2)
    cnot = cnot_matrix()
    lms = lms_matrix(theta).entries
    lms_half = lms_matrix(math.pi / 2).entries

    checks: list[tuple[str, float]] = []

    cnot_form = h2 @ cnot @ np.kron(eye2, rz_matrix(theta)) @ cnot @ h2
    checks.append(("LMS = (HxH) CNOT (I x RZ) CNOT (HxH)", _dev(lms, cnot_form)))

    conditional = np.zeros((4, 4), dtype=complex)
    conditional[:2, :2] = rz_matrix(theta)
    conditional[2:, 2:] = rz_matrix(-theta)
    cond_form = h2 @ conditional @ h2
    checks.append(("LMS = (HxH) C(RZ(t), RZ(-t)) (HxH)", _dev(lms, cond_form)))

    checks.append(("LMS(t) LMS(-t) = I",
                   _dev(lms @ lms_matrix(-theta).entries, np.eye(4))))

    sdg2 = np.kron(s_dag_matrix(), s_dag_matrix())
    cz_from_lms = np.exp(1j * math.pi / 4) * sdg2 @ h2 @ lms_half @ h2
    checks.append(("CZ = e^{i pi/4} (Sdg x Sdg)(HxH) LMS(pi/2) (HxH)",
                   _dev(cz_matrix(), cz_from_lms)))

    h4 = fourier_matrix(4)
    csum = csum_matrix(4)
    eye4 = np.eye(4)
    cz4 = czd_matrix(4)
    checks.append(("CZ4 = (I x H4) CSUM4 (I x H4_dag)",
                   _dev(cz4, np.kron(eye4, h4) @ csum @ np.kron(eye4, h4.conj().T))))

    expected_sq = np.diag([(-1.0) ** (j * k) for j in range(4) for k in range(4)])
    checks.append(("(CZ4)^2 diagonal = (-1)^(jk)", _dev(cz4 @ cz4, expected_sq)))

    checks.append(("H4 H4_dag = I", _dev(h4 @ h4.conj().T, eye4)))
    x4 = shift_matrix(4)
    checks.append(("X4^4 = I", _dev(np.linalg.matrix_power(x4, 4), eye4)))
    k4 = gate_unitary("K4").entries
    checks.append(("K4^2 = I", _dev(k4 @ k4, eye4)))
    checks.append(("CSUM4 CSUM4_dag = I", _dev(csum @ csum.conj().T, np.eye(16))))
    checks.append(("(CZ4)^4 = I", _dev(np.linalg.matrix_power(cz4, 4), np.eye(16))))

    x23 = level_swap_matrix(4, 2, 3)
    parity_dev = 0.0
    for qa in range(2):
        for qb in range(2):
            col = 2 * qa + qb
            row = int(np.argmax(np.abs(x23[:, col])))
            parity_dev = max(parity_dev, abs(row % 2 - (qa ^ qb)))
    checks.append(("X23 low digit = pair parity", parity_dev))

    for n, count in ((4, 16), (6, 64)):
        worst = 0
        for idx in range(count):
            q = [(idx >> (n - 1 - p)) & 1 for p in range(n)]
            direct = sum(q[i] * q[j] for i in range(n) for j in range(i + 1, n)) % 2
            pairs = [(q[2 * t], q[2 * t + 1]) for t in range(n // 2)]
            rewritten = 0
            for t, (a, bb) in enumerate(pairs):
                rewritten ^= a & bb
                for (c, dd) in pairs[t + 1:]:
                    rewritten ^= (a ^ bb) & (c ^ dd)
            worst = max(worst, abs(direct - rewritten))
        checks.append((f"phase polynomial rewrite, n={n}", float(worst)))

    gcz4 = oracle_gcz(4).entries
    pairwise_cz = np.eye(16, dtype=complex)
    for i in range(4):
        for j in range(i + 1, 4):
            pairwise_cz = embed_unitary(cz_matrix(), (i, j), (2,) * 4) @ pairwise_cz
    checks.append(("GCZ(4) = product of pairwise CZ", _dev(gcz4, pairwise_cz)))
    return checks
