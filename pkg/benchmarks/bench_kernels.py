"""Micro-benchmark: numba kernel vs pure-numpy fallback for gate application.

Times the hot path (applying small unitaries to a dense statevector) across
register sizes, plus one realistic workload: branch-exhaustive verification
of the 6-qubit fan-out GCZ. Run as:

    python3 benchmarks/bench_kernels.py [--repeats 2000]

The same selection is available process-wide via DISTGATES_BACKEND=numpy.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from distgates import backend
from distgates.backend import HAS_NUMBA, apply_matrix, use_backend
from distgates.cli import block_layout
from distgates.qubit_protocols import Partition, build_dgcz
from distgates.verify import OracleSpec, basis_inputs, verify


def random_state(total: int, rng) -> np.ndarray:
    v = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bench_apply(dims: tuple[int, ...], axes: tuple[int, ...], repeats: int,
                rng) -> dict[str, float]:
    total = math.prod(dims)
    amps = random_state(total, rng)
    mat = random_unitary(math.prod(dims[a] for a in axes), rng)
    results = {}
    for name in ("numba", "numpy"):
        if name == "numba" and not HAS_NUMBA:
            continue
        with use_backend(name):
            apply_matrix(amps, dims, axes, mat)  # warm-up (JIT compile)
            start = time.perf_counter()
            out = amps
            for _ in range(repeats):
                out = apply_matrix(out, dims, axes, mat)
            results[name] = (time.perf_counter() - start) / repeats
    return results


def bench_workload() -> dict[str, float]:
    layout, labels = block_layout(6, 3)
    circuit = build_dgcz(labels, Partition(layout), "fanout")
    inputs = basis_inputs(circuit)
    results = {}
    for name in ("numba", "numpy"):
        if name == "numba" and not HAS_NUMBA:
            continue
        with use_backend(name):
            verify(circuit, OracleSpec("gcz"), inputs[:2])  # warm-up
            start = time.perf_counter()
            report = verify(circuit, OracleSpec("gcz"), inputs)
            results[name] = time.perf_counter() - start
            assert report.passed
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()
    rng = np.random.default_rng(99)

    print(f"numba available: {HAS_NUMBA}; default backend: {backend.active_backend()}")
    print()
    print(f"{'case':<38} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    cases = [
        ("2-qubit gate, 10 qubits", (2,) * 10, (3, 7)),
        ("2-qubit gate, 12 qubits", (2,) * 12, (0, 11)),
        ("2-qubit gate, 14 qubits", (2,) * 14, (6, 9)),
        ("1-qudit gate, 6 qudits (d=4)", (4,) * 6, (2,)),
        ("2-qudit gate, 6 qudits (d=4)", (4,) * 6, (1, 4)),
        ("2-qudit gate, 7 qudits (d=4)", (4,) * 7, (0, 6)),
    ]
    for label, dims, axes in cases:
        if math.prod(dims) > 2 ** 14:
            continue
        res = bench_apply(dims, axes, args.repeats, rng)
        nb = res.get("numba")
        np_t = res["numpy"]
        ratio = f"{np_t / nb:8.2f}x" if nb else "      n/a"
        nb_s = f"{nb * 1e6:10.1f}us" if nb else "       n/a"
        print(f"{label:<38} {nb_s:>12} {np_t * 1e6:10.1f}us {ratio:>9}")

    print()
    res = bench_workload()
    nb = res.get("numba")
    np_t = res["numpy"]
    print(f"{'verify 6-qubit fan-out GCZ (64 inputs)':<38} "
          f"{(nb or float('nan')):>11.2f}s {np_t:>11.2f}s "
          f"{(np_t / nb if nb else float('nan')):>8.2f}x")


if __name__ == "__main__":
    main()
