"""Gate and circuit compatibility classifiers.

Three per-gate predicates and a circuit-level report:

- bias-preserving: the unitary is a generalized permutation matrix (one
  unit-modulus entry per column), so phase flips map to phase flips.
- S1-bias-preserving: bias-preserving restricted to the single-excitation
  span{|01>, |10>} of a 2-qubit gate.
- Pauli-Z compatible: every phase-flip string on the gate's support commutes
  through it (possibly transformed), so aggregated correction layers can be
  pushed past the gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit
from .conjugation import conjugate_z_string
from .errors import NotZClosed, UnsupportedGate
from .gates import GateOp, unitary_of
from .pauli import PauliZString

_TOL = 1e-10


def is_bias_preserving(g: GateOp) -> bool:
    """True iff every column of the unitary has exactly one entry of modulus
    >= 1 - 1e-10 and the rest <= 1e-10."""
    u = np.abs(unitary_of(g))
    big = u >= 1.0 - _TOL
    small = u <= _TOL
    per_column_ok = (big.sum(axis=0) == 1) & ((big | small).all(axis=0))
    return bool(per_column_ok.all())


def is_s1_bias_preserving(g: GateOp) -> bool:
    """Bias preservation on the single-excitation subspace of a 2-qubit gate.

    Checks (1) the unitary maps span{|01>, |10>} into itself and (2) for each
    phase-flip generator D in {Z1, Z2, Z1Z2}, the D' solved on that 2x2 block
    (D' = R D_blk R^-1) is unitary.
    """
    if g.arity != 2:
        raise UnsupportedGate(f"S1 classification needs a 2-qubit gate, got {g}")
    u = unitary_of(g)
    inside = [1, 2]  # |01>, |10>
    outside = [0, 3]
    if np.abs(u[np.ix_(outside, inside)]).max() > _TOL:
        return False
    block = u[np.ix_(inside, inside)]
    # Z1, Z2, Z1Z2 restricted to (|01>, |10>).
    for d_blk in (np.diag([1.0, -1.0]), np.diag([-1.0, 1.0]), -np.eye(2)):
        d_prime = block @ d_blk @ np.linalg.inv(block)
        if np.abs(d_prime @ d_prime.conj().T - np.eye(2)).max() > _TOL:
            return False
    return True


def pauli_z_compatible(g: GateOp) -> bool:
    """True iff conjugation succeeds for every local Z-string of the gate."""
    n = max(g.qubits) + 1
    for local in range(1 << g.arity):
        s = PauliZString.from_qubits(
            n, (q for a, q in enumerate(g.qubits) if local >> a & 1)
        )
        try:
            conjugate_z_string(g, s)
        except NotZClosed:
            return False
    return True


@dataclass(frozen=True)
class CompatReport:
    """Per-gate classifier flags plus maximal compatible segments.

    ``segments`` holds (start, stop) index ranges with exclusive stop, in
    order, disjoint, covering exactly the compatible ops.
    """

    bias_preserving: tuple[bool, ...]
    s1_bias_preserving: tuple[bool, ...]
    pauli_z_compatible: tuple[bool, ...]
    segments: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "bias_preserving": list(self.bias_preserving),
            "s1_bias_preserving": list(self.s1_bias_preserving),
            "pauli_z_compatible": list(self.pauli_z_compatible),
            "segments": [list(seg) for seg in self.segments],
        }


def maximal_segments(flags) -> tuple[tuple[int, int], ...]:
    """Maximal runs of consecutive True flags as (start, stop) ranges."""
    flags = list(flags)
    segments = []
    start = None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            segments.append((start, i))
            start = None
    if start is not None:
        segments.append((start, len(flags)))
    return tuple(segments)


def classify_circuit(c: Circuit) -> CompatReport:
    bias, s1, compat = [], [], []
    for op in c.ops:
        bias.append(is_bias_preserving(op))
        if op.arity == 2:
            s1.append(is_s1_bias_preserving(op))
        else:
            s1.append(False)
        compat.append(pauli_z_compatible(op))
    return CompatReport(
        bias_preserving=tuple(bias),
        s1_bias_preserving=tuple(s1),
        pauli_z_compatible=tuple(compat),
        segments=maximal_segments(compat),
    )
