"""Gate operations and their unitary matrices.

Matrices are returned on the gate's local qubits in big-endian order:
``qubits[0]`` is the most significant bit of the basis index. Parameterized
rotations follow the exp(-i*theta*G/2) convention, e.g. RZ(theta) =
diag(e^{-i theta/2}, e^{+i theta/2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnsupportedGate

# kind -> (arity, takes_angle)
GATE_KINDS: dict[str, tuple[int, bool]] = {
    "X": (1, False),
    "Z": (1, False),
    "S": (1, False),
    "T": (1, False),
    "H": (1, False),
    "RZ": (1, True),
    "RY": (1, True),
    "RZZ": (2, True),
    "CZ": (2, False),
    "CNOT": (2, False),
    "SWAP": (2, False),
    "XCZ": (2, True),
    "RBS": (2, True),
    "CRY": (2, True),
    "TOFFOLI": (3, False),
}

# Composite kinds are convenience wrappers; generators expand them to the
# primitive gate set before the circuits are analyzed or simulated.
COMPOSITE_KINDS = ("RY", "CRY")


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in GATE_KINDS:
            raise UnsupportedGate(f"unknown gate kind {kind!r}")
        arity, takes_angle = GATE_KINDS[kind]
        if len(self.qubits) != arity:
            raise UnsupportedGate(
                f"{kind} acts on {arity} qubit(s), got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != arity:
            raise UnsupportedGate(f"{kind} qubits must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise UnsupportedGate(f"negative qubit index in {self.qubits}")
        if takes_angle:
            if self.angle is None:
                raise UnsupportedGate(f"{kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise UnsupportedGate(f"{kind} takes no angle")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def __str__(self) -> str:
        qs = ",".join(str(q) for q in self.qubits)
        if self.angle is not None:
            return f"{self.kind} {qs};theta={self.angle!r}"
        return f"{self.kind} {qs}"


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def unitary_of(g: GateOp) -> np.ndarray:
    """Unitary matrix of ``g`` on its local qubits (2^arity x 2^arity)."""
    kind, theta = g.kind, g.angle
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Z":
        return np.diag([1.0 + 0j, -1.0])
    if kind == "S":
        return np.diag([1.0 + 0j, 1j])
    if kind == "T":
        return np.diag([1.0 + 0j, np.exp(0.25j * math.pi)])
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if kind == "RZ":
        return _rz(theta)
    if kind == "RY":
        return _ry(theta)
    if kind == "RZZ":
        a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
        return np.diag([a, b, b, a])
    if kind == "CZ":
        return np.diag([1.0 + 0j, 1.0, 1.0, -1.0])
    if kind == "CNOT":
        m = np.eye(4, dtype=complex)
        m[[2, 3]] = m[[3, 2]]
        return m
    if kind == "SWAP":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    if kind == "XCZ":
        # X-basis control on qubits[0], Z rotation by -theta on qubits[1]:
        # |+><+| (x) I + |-><-| (x) RZ(-theta).
        plus = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
        minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
        return np.kron(plus, np.eye(2)) + np.kron(minus, _rz(-theta))
    if kind == "RBS":
        c, s = math.cos(theta), math.sin(theta)
        return np.array(
            [
                [1, 0, 0, 0],
                [0, c, s, 0],
                [0, -s, c, 0],
                [0, 0, 0, 1],
            ],
            dtype=complex,
        )
    if kind == "CRY":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _ry(theta)
        return m
    if kind == "TOFFOLI":
        m = np.eye(8, dtype=complex)
        m[[6, 7]] = m[[7, 6]]
        return m
    raise UnsupportedGate(f"unknown gate kind {kind!r}")


def expand_composite(g: GateOp) -> list[GateOp]:
    """Expand RY/CRY into the primitive gate set; other kinds pass through.

    RY(theta) = S H RZ(theta) H S† with S† realized as S.Z, so the
    circuit-order expansion is [Z, S, H, RZ(theta), H, S]. CRY(theta) on
    (j, k) is [CNOT, RY(-theta/2)_k, CNOT, RY(theta/2)_k] in circuit order,
    each RY expanded recursively. Both identities are exact (no stray global
    phase).
    """
    if g.kind == "RY":
        (q,) = g.qubits
        return [
            GateOp("Z", (q,)),
            GateOp("S", (q,)),
            GateOp("H", (q,)),
            GateOp("RZ", (q,), g.angle),
            GateOp("H", (q,)),
            GateOp("S", (q,)),
        ]
    if g.kind == "CRY":
        j, k = g.qubits
        half = g.angle / 2
        out = [GateOp("CNOT", (j, k))]
        out += expand_composite(GateOp("RY", (k,), -half))
        out.append(GateOp("CNOT", (j, k)))
        out += expand_composite(GateOp("RY", (k,), half))
        return out
    return [g]


def local_z_diag(local_mask: int, arity: int) -> np.ndarray:
    """Diagonal (+/-1) of the Z-string ``local_mask`` in gate-local big-endian
    basis order: local bit a of the mask refers to ``qubits[a]``, whose basis
    bit sits at position arity-1-a of the index."""
    if not 0 <= local_mask < (1 << arity):
        raise InvalidArgument(f"local mask {local_mask} out of range for arity {arity}")
    dim = 1 << arity
    diag = np.ones(dim)
    for a in range(arity):
        if local_mask >> a & 1:
            bit = (np.arange(dim) >> (arity - 1 - a)) & 1
            diag = diag * np.where(bit, -1.0, 1.0)
    return diag
