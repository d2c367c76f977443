"""Closed-form entanglement-resource and timing formulas for distributed
global gates, independent of circuit construction.

Conventions: n qubits over D nodes with k = n/D qubits per node; a Bell or
qudit pair costs one time unit t_ep, a GHZ state of any arity costs epsilon
t_ep (epsilon may also be a per-arity mapping or callable). Qudit compression
packs m qubits per qudit (dimension 2^m), so each node holds k/m qudits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import _eps_for


@dataclass(frozen=True)
class GczConfig:
    """Shape of a distributed n-qubit GCZ: n = k * D, qudits pack m | k qubits."""

    n: int
    D: int
    k: int | None = None
    m: int | None = None
    epsilon: float = 1.0

    def __post_init__(self):
        k = self.k if self.k is not None else self.n // self.D
        object.__setattr__(self, "k", k)
        m = self.m if self.m is not None else k
        object.__setattr__(self, "m", m)
        if self.n != k * self.D:
            raise ValueError(f"n = {self.n} is not k * D = {k} * {self.D}")
        if self.n < 2 or self.D < 2 or k < 1:
            raise ValueError("need n >= 2 qubits over D >= 2 nodes")
        if m < 1 or k % m:
            raise ValueError(f"qudit pack size m = {m} must divide k = {k}")


@dataclass
class CostReport:
    """Resource counts per strategy plus time estimates in t_ep units."""

    pairwise_ep: int = 0
    fanout_ghz: int = 0
    fanout_ep: int = 0
    qudit_ghz: int = 0
    qudit_ep: int = 0
    time_pairwise: float = 0.0
    time_fanout: float = 0.0
    fanout_ghz_arities: dict[int, int] = field(default_factory=dict)
    qudit_ghz_arities: dict[int, int] = field(default_factory=dict)


def gcz_costs(cfg: GczConfig) -> CostReport:
    """Entanglement needs of an n-qubit GCZ over D nodes, k qubits per node.

    pairwise: one Bell pair per cross-node pair, n(n-k)/2 in all. fanout: one
    GHZ per fan-out layer with remote targets, k layers each of arity D,
    D-1, ..., 3 (so n-2k states), plus k Bell pairs for the final-node layers.
    qudit compression with l = k/m qudits per node: n/m - 2k/m qudit GHZ
    states and k/m qudit pairs (one qudit per node gives D-2 states and one
    pair).
    """
    n, D, k, m = cfg.n, cfg.D, cfg.k, cfg.m
    r = CostReport()
    r.pairwise_ep = n * (n - k) // 2
    r.fanout_ghz = n - 2 * k
    r.fanout_ep = k
    r.fanout_ghz_arities = {arity: k for arity in range(3, D + 1)}
    r.qudit_ghz = n // m - 2 * k // m
    r.qudit_ep = k // m
    r.qudit_ghz_arities = {arity: k // m for arity in range(3, D + 1)}
    r.time_pairwise = float(r.pairwise_ep)
    r.time_fanout = r.fanout_ep + sum(
        count * _eps_for(cfg.epsilon, arity) for arity, count in r.fanout_ghz_arities.items())
    return r


def gms_costs(n: int, strategy: str, epsilon: float = 1.0) -> CostReport:
    """Entanglement needs of an n-qubit GMS gate, one qubit per node.

    pairwise: two teleported CNOTs per two-qubit MS factor, n(n-1) Bell
    pairs. pairwise_conditional: one distributed conditional rotation per
    factor, n(n-1)/2. fanout: n-2 GHZ states of arities n down to 3 plus one
    Bell pair.
    """
    if n < 2:
        raise ValueError("need at least 2 qubits")
    r = CostReport()
    if strategy == "pairwise":
        r.pairwise_ep = n * (n - 1)
        r.time_pairwise = float(r.pairwise_ep)
    elif strategy == "pairwise_conditional":
        r.pairwise_ep = n * (n - 1) // 2
        r.time_pairwise = float(r.pairwise_ep)
    elif strategy == "fanout":
        r.fanout_ghz = n - 2
        r.fanout_ep = 1
        r.fanout_ghz_arities = {arity: 1 for arity in range(3, n + 1)}
        r.time_fanout = 1 + sum(_eps_for(epsilon, a) for a in r.fanout_ghz_arities)
    else:
        raise ValueError(f"unknown GMS strategy {strategy!r}")
    return r


def fanout_gain(n: int, epsilon: float = 1.0) -> float:
    """Time saved by one (n+1)-party GHZ fan-out over n Bell pairs: n - epsilon."""
    if n < 1:
        raise ValueError("need at least one target")
    return n - _eps_for(epsilon, n + 1)
