"""Shared test helpers: seeded random circuits and full-matrix embeddings."""

from __future__ import annotations

import numpy as np

from blockpec.circuits import Circuit
from blockpec.gates import GATE_KINDS, GateOp, unitary_of
from blockpec.simulate import apply_unitary_state

# Kinds whose string propagation is numerically exact, so mitigation
# identities can be asserted at solver tolerance.
EXACT_KINDS = ("X", "Z", "S", "T", "RZ", "CZ", "RZZ", "CNOT", "SWAP")

# Adds the two angled two-qubit kinds routed by the pass-through rule.
COMPATIBLE_KINDS = EXACT_KINDS + ("XCZ", "RBS")


def random_op(rng: np.random.Generator, n: int, kinds=COMPATIBLE_KINDS) -> GateOp:
    usable = tuple(k for k in kinds if GATE_KINDS[k][0] <= n)
    kind = usable[int(rng.integers(len(usable)))]
    arity, takes_angle = GATE_KINDS[kind]
    qubits = tuple(int(q) for q in rng.choice(n, size=arity, replace=False))
    angle = float(rng.uniform(0.0, 2.0 * np.pi)) if takes_angle else None
    return GateOp(kind, qubits, angle)


def random_circuit(
    rng: np.random.Generator, n: int, depth: int, kinds=COMPATIBLE_KINDS
) -> Circuit:
    return Circuit(n, tuple(random_op(rng, n, kinds) for _ in range(depth)))


def total_unitary(ops, n: int) -> np.ndarray:
    """Full 2^n x 2^n unitary of an op sequence in circuit order."""
    dim = 1 << n
    cols = np.empty((dim, dim), dtype=complex)
    for b in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[b] = 1.0
        for op in ops:
            psi = apply_unitary_state(psi, unitary_of(op), op.qubits, n)
        cols[:, b] = psi
    return cols
