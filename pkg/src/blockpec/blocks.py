"""Quasi-probability engines.

Standard PEC inverts each gate's noise right where it acts; the block engine
commutes every per-gate correction to the end of a compatible block and
aggregates them into a single signed distribution over the 2^n phase-flip
strings. Aggregation can only shrink the L1 norm (triangle inequality), so
gamma_blk <= gamma_std.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit
from .classify import classify_circuit
from .conjugation import generator_images
from .errors import GuardExceeded, InvalidArgument, Unsupported
from .gates import GateOp
from .noise import (
    NoiseSpec,
    ZMixtureChannel,
    gamma_of,
    invert_z_mixture,
    make_dephasing,
)

_DENSE_GUARD_QUBITS = 20
_NAIVE_GUARD = 16


def layer_distribution(g: GateOp, spec: NoiseSpec | None) -> ZMixtureChannel:
    """Quasi-distribution cancelling the noise of one gate treated as its own
    layer: the exact inverse of the given dephasing on the gate's support."""
    support = tuple(sorted(g.qubits))
    if spec is None or spec.is_noiseless():
        return ZMixtureChannel.identity(support)
    return invert_z_mixture(make_dephasing(spec, support))


def gamma_std(c: Circuit) -> float:
    """Per-gate sampling cost: the product of per-layer L1 norms."""
    total = 1.0
    for op, tag in zip(c.ops, c.noise_tags):
        total *= gamma_of(layer_distribution(op, tag))
    return total


@dataclass(frozen=True)
class BlockCoefficients:
    """Signed coefficients over all 2^n phase-flip strings of a block."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (1 << self.n,):
            raise InvalidArgument(
                f"need 2^{self.n} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    def gamma(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def total(self) -> float:
        return float(self.coeffs.sum())

    def to_mixture(self) -> ZMixtureChannel:
        return ZMixtureChannel(tuple(range(self.n)), self.coeffs.copy())


def _support_mask(op: GateOp) -> int:
    mask = 0
    for q in op.qubits:
        mask |= 1 << q
    return mask


def _op_permutation(op: GateOp, n: int, masks: np.ndarray) -> np.ndarray | None:
    """Image of every mask under conjugation through ``op``; None if the map
    is the identity."""
    imgs = generator_images(op, n)
    if all(imgs[q] == 1 << q for q in op.qubits):
        return None
    perm = masks & ~_support_mask(op)
    for q in op.qubits:
        bit = (masks >> q) & 1
        perm = perm ^ bit * imgs[q]
    return perm


def _global_masks(dist: ZMixtureChannel) -> np.ndarray:
    """Global Z-string mask of each local coefficient index."""
    out = np.zeros(len(dist.coeffs), dtype=np.int64)
    for i, q in enumerate(dist.support):
        out |= ((np.arange(len(dist.coeffs)) >> i) & 1) << q
    return out


def _accumulate(c: Circuit, dist_of) -> np.ndarray:
    """Forward accumulation: push the running mask distribution through each
    op, then XOR-convolve with that op's own distribution.

    ``dist_of(op, tag)`` supplies the per-layer distribution (noise inverse
    for block coefficients, forward noise for the effective channel).
    """
    if c.n > _DENSE_GUARD_QUBITS:
        raise GuardExceeded(
            f"dense 2^n coefficient vector refused for n={c.n} > "
            f"{_DENSE_GUARD_QUBITS}"
        )
    size = 1 << c.n
    masks = np.arange(size, dtype=np.int64)
    vec = np.zeros(size)
    vec[0] = 1.0
    for op, tag in zip(c.ops, c.noise_tags):
        perm = _op_permutation(op, c.n, masks)
        if perm is not None:
            moved = np.empty_like(vec)
            moved[perm] = vec
            vec = moved
        dist = dist_of(op, tag)
        gmasks = _global_masks(dist)
        if len(gmasks) == 1 and gmasks[0] == 0:
            continue
        out = np.zeros(size)
        for gmask, a in zip(gmasks, dist.coeffs):
            if a != 0.0:
                out += a * vec[masks ^ gmask]
        vec = out
    return vec


def block_coefficients(c: Circuit) -> BlockCoefficients:
    """Aggregated control-layer coefficients of a fully compatible block.

    Cost is O(d * 2^n) vectorized ops; raises NotZClosed on incompatible
    gates, SingularChannel on non-invertible noise, GuardExceeded for n > 20.
    """
    return BlockCoefficients(c.n, _accumulate(c, layer_distribution))


def effective_noise(c: Circuit) -> ZMixtureChannel:
    """All per-gate noise channels commuted to the end and composed: the
    single Z-mixture N_eff with (noisy circuit) = N_eff o (ideal circuit).

    Inverting it reproduces block_coefficients; kept as an independent route
    for cross-checking."""

    def forward(op, tag):
        if tag is None or tag.is_noiseless():
            return ZMixtureChannel.identity(tuple(sorted(op.qubits)))
        return make_dephasing(tag, tuple(sorted(op.qubits)))

    return ZMixtureChannel(tuple(range(c.n)), _accumulate(c, forward))


def naive_block_coefficients(c: Circuit) -> BlockCoefficients:
    """Brute-force oracle: enumerate every tuple of per-layer controls,
    commute each control individually to the end, XOR-compose and accumulate
    the coefficient products. Exponential; guarded by n*d <= 16."""
    d = len(c.ops)
    if c.n * d > _NAIVE_GUARD:
        raise GuardExceeded(
            f"naive enumeration refused for n*d = {c.n * d} > {_NAIVE_GUARD}"
        )
    size = 1 << c.n
    op_images = [generator_images(op, c.n) for op in c.ops]

    def push(mask: int, start: int) -> int:
        for op, imgs in zip(c.ops[start:], op_images[start:]):
            moved = mask & ~_support_mask(op)
            for q in op.qubits:
                if mask >> q & 1:
                    moved ^= imgs[q]
            mask = moved
        return mask

    acc_masks = np.zeros(1, dtype=np.int64)
    acc_coeffs = np.ones(1)
    for l, (op, tag) in enumerate(zip(c.ops, c.noise_tags)):
        dist = layer_distribution(op, tag)
        gmasks = _global_masks(dist)
        pushed = np.array([push(int(m), l + 1) for m in gmasks], dtype=np.int64)
        acc_masks = (acc_masks[:, None] ^ pushed[None, :]).ravel()
        acc_coeffs = (acc_coeffs[:, None] * dist.coeffs[None, :]).ravel()
    vec = np.bincount(acc_masks, weights=acc_coeffs, minlength=size)
    return BlockCoefficients(c.n, vec)


def gamma_blk(c: Circuit) -> float:
    """Aggregated-control sampling cost; always <= gamma_std."""
    return block_coefficients(c).gamma()


def fold_noisy_controls(
    b: BlockCoefficients, spec: NoiseSpec | None
) -> ZMixtureChannel:
    """Rewrite the perfect-control distribution over noisy controls.

    Each nontrivial control V' is realized as (dephasing on its support)
    followed by V', so the perfect V' expands with the inverse of that
    dephasing: beta_{V'}(W) = inv(W xor V'). The identity control needs no
    gate and stays noiseless. Its L1 norm can only grow: gamma(delta) >=
    gamma(alpha).
    """
    size = 1 << b.n
    if spec is None or spec.is_noiseless():
        return ZMixtureChannel(tuple(range(b.n)), b.coeffs.copy())
    delta = np.zeros(size)
    delta[0] = b.coeffs[0]
    for mask in np.flatnonzero(b.coeffs):
        mask = int(mask)
        if mask == 0:
            continue
        support = tuple(q for q in range(b.n) if mask >> q & 1)
        inv = invert_z_mixture(make_dephasing(spec, support))
        gmasks = _global_masks(inv)
        for gmask, beta in zip(gmasks, inv.coeffs):
            delta[mask ^ gmask] += b.coeffs[mask] * beta
    return ZMixtureChannel(tuple(range(b.n)), delta)


@dataclass(frozen=True)
class PlanSegment:
    kind: str  # "block" | "per_gate"
    start: int
    stop: int
    gamma: float
    coeffs: BlockCoefficients | ZMixtureChannel


@dataclass(frozen=True)
class MitigationPlan:
    """Ordered, disjoint segments covering all ops; total_gamma is the
    product of segment costs."""

    segments: tuple[PlanSegment, ...]
    total_gamma: float

    def to_json(self) -> str:
        payload = []
        for seg in self.segments:
            if isinstance(seg.coeffs, BlockCoefficients):
                coeffs = seg.coeffs.coeffs
                gmasks = np.arange(len(coeffs), dtype=np.int64)
            else:
                coeffs = seg.coeffs.coeffs
                gmasks = _global_masks(seg.coeffs)
            pairs = [
                [int(m), float(vv)]
                for m, vv in zip(gmasks, coeffs)
                if vv != 0.0
            ]
            payload.append(
                {
                    "type": seg.kind,
                    "op_range": [seg.start, seg.stop],
                    "gamma": seg.gamma,
                    "coeffs": pairs,
                }
            )
        return json.dumps({"segments": payload, "total_gamma": self.total_gamma})


def hybrid_plan(c: Circuit) -> MitigationPlan:
    """Block segments for maximal compatible runs, per-gate inversion for
    everything else. A circuit with no compatible gate degenerates to
    standard PEC with the same total cost."""
    report = classify_circuit(c)
    compatible_ranges = list(report.segments)
    segments: list[PlanSegment] = []
    total = 1.0
    i = 0
    while i < len(c.ops):
        run = next((r for r in compatible_ranges if r[0] == i), None)
        if run is not None:
            start, stop = run
            coeffs = block_coefficients(c.subcircuit(start, stop))
            g = coeffs.gamma()
            segments.append(PlanSegment("block", start, stop, g, coeffs))
            total *= g
            i = stop
        else:
            dist = layer_distribution(c.ops[i], c.noise_tags[i])
            g = gamma_of(dist)
            segments.append(PlanSegment("per_gate", i, i + 1, g, dist))
            total *= g
            i += 1
    return MitigationPlan(tuple(segments), total)


def analytic_pattern_gammas(
    pattern: str, p: float, correlated: bool = False
) -> tuple[float, float]:
    """Closed-form (gamma_std, gamma_blk) for the three two-layer motifs.

    Patterns: 'a' = 1q rotation then CNOT on the same target; 'b' = 2q
    rotation then CNOT on the same pair; 'c' = 2q rotation then CNOT
    overlapping on one qubit. The correlated variant exists for 'b' only.
    """
    if pattern not in ("a", "b", "c"):
        raise InvalidArgument(f"unknown pattern {pattern!r}")
    if not 0.0 < p < 0.5:
        raise InvalidArgument(f"p must lie in (0, 0.5), got {p}")
    if correlated:
        if pattern != "b":
            raise Unsupported(
                f"no closed form for correlated pattern {pattern!r}"
            )
        g_layer = (3.0 + 2.0 * p) / (3.0 - 4.0 * p)
        g_std = g_layer**2
        g_blk = (9.0 + 12.0 * p - 8.0 * p * p) / (3.0 - 4.0 * p) ** 2
        return g_std, g_blk
    g1 = 1.0 / (1.0 - 2.0 * p)
    if pattern == "a":
        return g1**3, (1.0 + 2.0 * p - 2.0 * p * p) * g1**2
    if pattern == "b":
        return g1**4, (1.0 + 2.0 * p - 6.0 * p * p + 4.0 * p**3) * g1**3
    return g1**4, (1.0 + 2.0 * p - 2.0 * p * p) * g1**3


def pattern_circuit(pattern: str, theta: float = 0.37) -> Circuit:
    """Reference circuits matching ``analytic_pattern_gammas``."""
    if pattern == "a":
        return Circuit(2, (GateOp("RZ", (1,), theta), GateOp("CNOT", (0, 1))))
    if pattern == "b":
        return Circuit(2, (GateOp("RZZ", (0, 1), theta), GateOp("CNOT", (0, 1))))
    if pattern == "c":
        return Circuit(3, (GateOp("RZZ", (1, 2), theta), GateOp("CNOT", (0, 1))))
    raise InvalidArgument(f"unknown pattern {pattern!r}")
