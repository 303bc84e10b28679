"""Exact simulation and Monte Carlo estimation of mitigated expectations.

Statevector simulation covers ideal circuits up to n = 14; exact noisy
evolution uses a dense density matrix up to n = 10, applying Z-mixtures as
elementwise coherence factors (rho'_{xy} = lambda(x xor y) * rho_{xy}).
The Monte Carlo estimator draws correction strings per sample from a single
keyed counter-based stream, so results are bitwise reproducible per seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .blocks import (
    BlockCoefficients,
    _global_masks,
    block_coefficients,
    hybrid_plan,
    layer_distribution,
)
from .circuits import Circuit
from .errors import (
    GuardExceeded,
    InvalidArgument,
    InvalidSamples,
)
from .gates import unitary_of
from .noise import ZMixtureChannel, make_dephasing, make_impure
from .pauli import PauliZString

STATEVECTOR_GUARD = 14
DENSITY_GUARD = 10
_ENUM_GUARD = 1 << 16

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


def z_sign_vector(mask: int, n: int) -> np.ndarray:
    """(+/-1)^{parity of mask bits} over the 2^n basis indices (qubit q lives
    at index bit n-1-q)."""
    idx = np.arange(1 << n)
    signs = np.ones(1 << n)
    for q in range(n):
        if mask >> q & 1:
            signs *= np.where((idx >> (n - 1 - q)) & 1, -1.0, 1.0)
    return signs


def apply_unitary_state(psi: np.ndarray, u: np.ndarray, qubits, n: int) -> np.ndarray:
    k = len(qubits)
    tensor = psi.reshape((2,) * n)
    u_t = u.reshape((2,) * (2 * k))
    moved = np.tensordot(u_t, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(moved, range(k), qubits).reshape(-1)


def apply_unitary_density(rho: np.ndarray, u: np.ndarray, qubits, n: int) -> np.ndarray:
    dim = 1 << n
    k = len(qubits)
    tensor = rho.reshape((2,) * (2 * n))
    u_t = u.reshape((2,) * (2 * k))
    # Row side: U rho
    moved = np.tensordot(u_t, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    tensor = np.moveaxis(moved, range(k), qubits)
    # Column side: ... U^dag
    cols = [n + q for q in qubits]
    moved = np.tensordot(u_t.conj(), tensor, axes=(list(range(k, 2 * k)), cols))
    tensor = np.moveaxis(moved, range(k), cols)
    return tensor.reshape(dim, dim)


def _local_pattern_table(support, n: int) -> np.ndarray:
    """Local coefficient index of each global basis-index XOR pattern."""
    idx = np.arange(1 << n)
    table = np.zeros(1 << n, dtype=np.int64)
    for a, q in enumerate(support):
        table |= ((idx >> (n - 1 - q)) & 1) << a
    return table


def apply_z_mixture_density(rho: np.ndarray, mix: ZMixtureChannel, n: int) -> np.ndarray:
    """Apply a (possibly signed) Z-mixture: multiply each coherence by the
    mixture's Walsh-Hadamard eigenvalue at that XOR pattern."""
    lam_local = mix.eigenvalues()
    table = _local_pattern_table(mix.support, n)
    idx = np.arange(1 << n)
    factors = lam_local[table[idx[:, None] ^ idx[None, :]]]
    return rho * factors


def apply_block_mixture_density(rho: np.ndarray, b: BlockCoefficients) -> np.ndarray:
    return apply_z_mixture_density(rho, b.to_mixture(), b.n)


def apply_z_string_density(rho: np.ndarray, mask: int, n: int) -> np.ndarray:
    s = z_sign_vector(mask, n)
    return rho * (s[:, None] * s[None, :])


def apply_pauli1_density(rho: np.ndarray, coeffs, qubit: int, n: int) -> np.ndarray:
    """Single-qubit Pauli mixture rho -> sum_P c_P P rho P^dag."""
    out = np.zeros_like(rho)
    for c, label in zip(coeffs, "IXYZ"):
        if c == 0.0:
            continue
        out = out + c * apply_unitary_density(rho, _PAULI_1Q[label], (qubit,), n)
    return out


def _apply_op_noise_density(rho: np.ndarray, op, tag, n: int) -> np.ndarray:
    if tag is None or tag.is_noiseless():
        return rho
    if tag.kind == "impure":
        forward, _ = make_impure(tag.p, tag.q)
        for q in op.qubits:
            rho = apply_pauli1_density(rho, forward.coeffs, q, n)
        return rho
    mix = make_dephasing(tag, tuple(sorted(op.qubits)))
    return apply_z_mixture_density(rho, mix, n)


@dataclass(frozen=True)
class Observable:
    """Measurement operator with operator norm at most 1.

    Kinds: 'pauli_z_string' (payload PauliZString), 'diagonal_projector'
    (payload boolean vector over basis states), 'dense_hermitian' (payload
    Hermitian matrix, scaled down at construction if its norm exceeds 1).
    """

    kind: str
    n: int
    payload: object

    @classmethod
    def z_string(cls, s: PauliZString) -> "Observable":
        return cls("pauli_z_string", s.n, s)

    @classmethod
    def z(cls, n: int, qubit: int = 0) -> "Observable":
        return cls.z_string(PauliZString.single(n, qubit))

    @classmethod
    def projector(cls, n: int, basis_states) -> "Observable":
        mask = np.zeros(1 << n, dtype=bool)
        mask[list(basis_states)] = True
        return cls("diagonal_projector", n, mask)

    @classmethod
    def qubit_one_projector(cls, n: int, qubit: int) -> "Observable":
        """Projector onto basis states where ``qubit`` reads 1."""
        idx = np.arange(1 << n)
        return cls("diagonal_projector", n, ((idx >> (n - 1 - qubit)) & 1).astype(bool))

    @classmethod
    def dense(cls, matrix) -> "Observable":
        m = np.asarray(matrix, dtype=complex)
        dim = m.shape[0]
        n = dim.bit_length() - 1
        if m.shape != (dim, dim) or (1 << n) != dim:
            raise InvalidArgument(f"dense observable needs a 2^n square matrix, got {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise InvalidArgument("dense observable must be Hermitian")
        norm = float(np.abs(np.linalg.eigvalsh(m)).max())
        if norm > 1.0 + 1e-12:
            m = m / norm
        return cls("dense_hermitian", n, m)

    def expectation_state(self, psi: np.ndarray) -> float:
        if self.kind == "pauli_z_string":
            return float((np.abs(psi) ** 2 @ z_sign_vector(self.payload.mask, self.n)))
        if self.kind == "diagonal_projector":
            return float((np.abs(psi) ** 2)[self.payload].sum())
        return float(np.vdot(psi, self.payload @ psi).real)

    def expectation_density(self, rho: np.ndarray) -> float:
        diag = np.diagonal(rho).real
        if self.kind == "pauli_z_string":
            return float(diag @ z_sign_vector(self.payload.mask, self.n))
        if self.kind == "diagonal_projector":
            return float(diag[self.payload].sum())
        return float(np.trace(self.payload @ rho).real)


def _check_obs(c: Circuit, obs: Observable) -> None:
    if obs.n != c.n:
        raise InvalidArgument(f"observable on {obs.n} qubits, circuit on {c.n}")


def ideal_expectation(c: Circuit, obs: Observable) -> float:
    """Noiseless expectation from the all-zeros initial state (statevector)."""
    _check_obs(c, obs)
    if c.n > STATEVECTOR_GUARD:
        raise GuardExceeded(f"statevector refused for n={c.n} > {STATEVECTOR_GUARD}")
    psi = np.zeros(1 << c.n, dtype=complex)
    psi[0] = 1.0
    for op in c.ops:
        psi = apply_unitary_state(psi, unitary_of(op), op.qubits, c.n)
    return obs.expectation_state(psi)


def _zero_density(n: int) -> np.ndarray:
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def _evolve_noisy_density(c: Circuit, controls=None) -> np.ndarray:
    """Exact noisy evolution; ``controls`` optionally maps op index -> list of
    Z-string masks to apply right after that op's noise."""
    rho = _zero_density(c.n)
    for i, (op, tag) in enumerate(zip(c.ops, c.noise_tags)):
        rho = apply_unitary_density(rho, unitary_of(op), op.qubits, c.n)
        rho = _apply_op_noise_density(rho, op, tag, c.n)
        if controls:
            for mask in controls.get(i, ()):
                rho = apply_z_string_density(rho, mask, c.n)
    return rho


def noisy_expectation(c: Circuit, obs: Observable) -> float:
    """Exact expectation under the circuit's noise tags (density matrix)."""
    _check_obs(c, obs)
    if c.n > DENSITY_GUARD:
        raise GuardExceeded(f"density matrix refused for n={c.n} > {DENSITY_GUARD}")
    return obs.expectation_density(_evolve_noisy_density(c))


def _std_enum_size(c: Circuit) -> int:
    """Product of noisy-layer support sizes (the std-mode feasibility guard)."""
    size = 1
    for op, tag in zip(c.ops, c.noise_tags):
        if tag is not None and not tag.is_noiseless():
            size *= op.arity
    return size


def exact_mitigated_expectation(c: Circuit, obs: Observable, mode: str) -> float:
    """Full quasi-probability-weighted sum of noisy expectations.

    In std mode every noise layer is inverted in place, which is exact for
    any gate set, so the result equals the ideal expectation up to roundoff.
    blk/hybrid modes correct with one aggregated Z-string layer per block,
    which is an exact inverse precisely when every gate in the block maps
    Z-strings to Z-strings under conjugation (the bias-preserving kinds).
    For the pass-through kinds XCZ and RBS the aggregated layer keeps the
    sampling-cost accounting but is not an exact channel inverse, so the
    value can remain at the uncorrected noisy expectation — in particular
    for observables that commute with every Z-string.

    Evaluated by applying each slot's signed distribution as a Z-mixture
    inside one density evolution — an exact distributive refactoring of the
    tuple-by-tuple sum.
    """
    _check_obs(c, obs)
    if mode not in ("std", "blk", "hybrid"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    if c.n > DENSITY_GUARD:
        raise GuardExceeded(f"density matrix refused for n={c.n} > {DENSITY_GUARD}")
    if mode == "std":
        if _std_enum_size(c) > _ENUM_GUARD:
            raise GuardExceeded("standard-mode control enumeration too large")
        rho = _zero_density(c.n)
        for op, tag in zip(c.ops, c.noise_tags):
            rho = apply_unitary_density(rho, unitary_of(op), op.qubits, c.n)
            rho = _apply_op_noise_density(rho, op, tag, c.n)
            if tag is not None and not tag.is_noiseless():
                rho = apply_z_mixture_density(rho, layer_distribution(op, tag), c.n)
        return obs.expectation_density(rho)
    if (1 << c.n) > _ENUM_GUARD:
        raise GuardExceeded("aggregated-control enumeration too large")
    if mode == "blk":
        coeffs = block_coefficients(c)
        rho = _evolve_noisy_density(c)
        return obs.expectation_density(apply_block_mixture_density(rho, coeffs))
    plan = hybrid_plan(c)
    rho = _zero_density(c.n)
    for seg in plan.segments:
        for i in range(seg.start, seg.stop):
            op, tag = c.ops[i], c.noise_tags[i]
            rho = apply_unitary_density(rho, unitary_of(op), op.qubits, c.n)
            rho = _apply_op_noise_density(rho, op, tag, c.n)
        if isinstance(seg.coeffs, BlockCoefficients):
            rho = apply_block_mixture_density(rho, seg.coeffs)
        else:
            rho = apply_z_mixture_density(rho, seg.coeffs, c.n)
    return obs.expectation_density(rho)


@dataclass(frozen=True)
class EstimatorReport:
    mean: float
    sample_variance: float
    n_samples: int
    gamma_used: float
    mode: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "sample_variance": self.sample_variance,
            "n_samples": self.n_samples,
            "gamma_used": self.gamma_used,
            "mode": self.mode,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class _Slot:
    """One sampling slot: a signed distribution whose drawn string is applied
    after op ``after_op``."""

    after_op: int
    gmasks: np.ndarray
    probs: np.ndarray
    cum: np.ndarray
    signs: np.ndarray
    gamma: float


def _make_slot(after_op: int, gmasks: np.ndarray, coeffs: np.ndarray) -> _Slot | None:
    keep = coeffs != 0.0
    gmasks, coeffs = gmasks[keep], coeffs[keep]
    gamma = float(np.abs(coeffs).sum())
    if len(coeffs) == 1 and gmasks[0] == 0 and coeffs[0] > 0:
        return None  # identity slot: nothing to draw
    probs = np.abs(coeffs) / gamma
    return _Slot(
        after_op=after_op,
        gmasks=gmasks,
        probs=probs,
        cum=np.cumsum(probs),
        signs=np.sign(coeffs),
        gamma=gamma,
    )


def _build_slots(c: Circuit, mode: str) -> tuple[list[_Slot], float]:
    slots: list[_Slot] = []
    gamma_total = 1.0
    if mode == "std":
        for i, (op, tag) in enumerate(zip(c.ops, c.noise_tags)):
            dist = layer_distribution(op, tag)
            slot = _make_slot(i, _global_masks(dist), dist.coeffs)
            if slot is not None:
                slots.append(slot)
                gamma_total *= slot.gamma
    elif mode == "blk":
        b = block_coefficients(c)
        slot = _make_slot(
            len(c.ops) - 1, np.arange(1 << c.n, dtype=np.int64), b.coeffs
        )
        if slot is not None:
            slots.append(slot)
            gamma_total *= slot.gamma
    elif mode == "hybrid":
        for seg in hybrid_plan(c).segments:
            if isinstance(seg.coeffs, BlockCoefficients):
                gmasks = np.arange(1 << c.n, dtype=np.int64)
                coeffs = seg.coeffs.coeffs
            else:
                gmasks = _global_masks(seg.coeffs)
                coeffs = seg.coeffs.coeffs
            slot = _make_slot(seg.stop - 1, gmasks, coeffs)
            if slot is not None:
                slots.append(slot)
                gamma_total *= slot.gamma
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    return slots, gamma_total


_SEED_SALT = 0x5EC0_11EC


def _estimator_rng(seed: int) -> np.random.Generator:
    key = np.array([seed & (2**64 - 1), _SEED_SALT], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _trajectory_outcome(c: Circuit, obs: Observable, masks) -> float:
    """Statevector path for 10 < n <= 14: evolve one trajectory, applying the
    per-op Z-string ``masks`` (drawn noise XOR drawn controls) as sign flips."""
    psi = np.zeros(1 << c.n, dtype=complex)
    psi[0] = 1.0
    for i, op in enumerate(c.ops):
        psi = apply_unitary_state(psi, unitary_of(op), op.qubits, c.n)
        m = int(masks[i])
        if m:
            psi = psi * z_sign_vector(m, c.n)
    return obs.expectation_state(psi)


def pec_estimate(
    c: Circuit,
    obs: Observable,
    mode: str,
    n_samples: int,
    seed: int,
    shots: int | None = None,
) -> EstimatorReport:
    """Monte Carlo mitigated estimator.

    Per sample: draw one string per slot with probability |coeff|/gamma,
    record the product of signs, evolve the noisy circuit with the drawn
    strings inserted, and average gamma * sign * outcome. The default outcome
    is the exact expectation of the sampled circuit (isolating mitigation
    variance from shot noise); ``shots=k`` draws k +/-1 outcomes instead.

    One Philox stream per seed, consumed in a fixed order (slot uniforms,
    then forward-noise uniforms on the statevector path, then shot draws),
    so fixed (inputs, seed) give bitwise-identical reports. Trajectories
    sharing the same inserted strings are evaluated once.
    """
    _check_obs(c, obs)
    if not isinstance(n_samples, (int, np.integer)) or n_samples < 1:
        raise InvalidSamples(f"n_samples must be a positive integer, got {n_samples}")
    if shots is not None and shots < 1:
        raise InvalidSamples(f"shots must be a positive integer, got {shots}")
    if c.n > STATEVECTOR_GUARD:
        raise GuardExceeded(f"estimator refused for n={c.n} > {STATEVECTOR_GUARD}")
    slots, gamma_total = _build_slots(c, mode)
    use_density = c.n <= DENSITY_GUARD
    rng = _estimator_rng(seed)

    # Per-op combined Z-string masks, one row per sample.
    comb = np.zeros((n_samples, len(c.ops)), dtype=np.int64)
    signs = np.ones(n_samples)
    if slots:
        u = rng.random((n_samples, len(slots)))
        for j, slot in enumerate(slots):
            idx = np.minimum(
                np.searchsorted(slot.cum, u[:, j], side="right"),
                len(slot.gmasks) - 1,
            )
            comb[:, slot.after_op] ^= slot.gmasks[idx]
            signs *= slot.signs[idx]

    if use_density:
        uniq, inverse = np.unique(comb, axis=0, return_inverse=True)
        out_u = np.empty(len(uniq))
        for r, row in enumerate(uniq):
            controls = {i: [int(m)] for i, m in enumerate(row) if m}
            rho = _evolve_noisy_density(c, controls)
            out_u[r] = obs.expectation_density(rho)
        outcomes = out_u[inverse]
    else:
        # Statevector path: noise enters as sampled forward Z-strings.
        for i, (op, tag) in enumerate(zip(c.ops, c.noise_tags)):
            if tag is None or tag.is_noiseless():
                continue
            if tag.kind == "impure":
                raise InvalidArgument(
                    "impure noise is density-only; statevector path unsupported"
                )
            mix = make_dephasing(tag, tuple(sorted(op.qubits)))
            gmasks = _global_masks(mix)
            cum = np.cumsum(mix.coeffs)
            draw = np.minimum(
                np.searchsorted(cum, rng.random(n_samples), side="right"),
                len(gmasks) - 1,
            )
            comb[:, i] ^= gmasks[draw]
        uniq, inverse = np.unique(comb, axis=0, return_inverse=True)
        out_u = np.array([_trajectory_outcome(c, obs, row) for row in uniq])
        outcomes = out_u[inverse]

    if shots is not None:
        p_plus = np.clip((1.0 + outcomes) / 2.0, 0.0, 1.0)
        heads = rng.binomial(shots, p_plus)
        outcomes = 2.0 * heads / shots - 1.0
    values = gamma_total * signs * outcomes
    if np.all(values == values[0]):
        # Point-mass sample (e.g. p = 0): averaging identical floats can
        # perturb the last bit, so report the exact value directly.
        mean, variance = float(values[0]), 0.0
    else:
        mean = float(np.mean(values))
        variance = float(np.var(values, ddof=1)) if n_samples > 1 else 0.0
    return EstimatorReport(
        mean=mean,
        sample_variance=variance,
        n_samples=int(n_samples),
        gamma_used=gamma_total,
        mode=mode,
        seed=int(seed),
    )


def required_samples(gamma: float, delta: float, epsilon: float) -> int:
    """Hoeffding budget: smallest S with failure probability <= epsilon at
    precision delta, S = ceil(gamma^2 / (2 delta^2) * ln(2/epsilon))."""
    if gamma < 1.0:
        raise InvalidArgument(f"gamma must be >= 1, got {gamma}")
    if delta <= 0.0:
        raise InvalidArgument(f"delta must be > 0, got {delta}")
    if not 0.0 < epsilon <= 2.0:
        raise InvalidArgument(f"epsilon must lie in (0, 2], got {epsilon}")
    return int(math.ceil(gamma * gamma / (2.0 * delta * delta) * math.log(2.0 / epsilon)))
