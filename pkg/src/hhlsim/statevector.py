"""Dense state-vector simulation engine.

Conventions (fixed everywhere in this package):

* Qubit ``q`` is bit ``q`` of the basis-state index, so qubit 0 is the least
  significant bit.
* A register layout is (ancilla, clock, data) from most to least significant:
  data qubits are ``0 .. n_data-1``, clock qubits ``n_data .. n_data+n_clock-1``
  and the single ancilla sits on top. Basis index = a*2^(nc+nd) + m*2^nd + d.
* For a k-qubit gate matrix, ``targets[i]`` supplies bit ``i`` of the gate's
  row/column index.

Gates are applied in place by reshaping the amplitude array into a rank-n
tensor and contracting the target axes; the full 2^n x 2^n operator is never
materialized (test oracles build it explicitly for cross-checking).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOverlap,
    NonUnitary,
    RegisterTooLarge,
    ZeroProbabilityBranch,
    ZeroVector,
)

# Hard amplitude budget: 2^26 complex doubles = 1 GiB.
MAX_QUBITS = 26

DEAD_BRANCH_PROBABILITY = 1e-14


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit counts for the (ancilla, clock, data) register split."""

    n_clock: int
    n_data: int
    n_ancilla: int = 1

    def __post_init__(self):
        if self.n_clock < 0 or self.n_data < 1 or self.n_ancilla < 0:
            raise ValueError(f"invalid register layout {self}")
        if self.num_qubits > MAX_QUBITS:
            raise RegisterTooLarge(
                f"{self.num_qubits} qubits exceed the {MAX_QUBITS}-qubit budget"
            )

    @property
    def num_qubits(self) -> int:
        return self.n_ancilla + self.n_clock + self.n_data

    @property
    def data_qubits(self) -> list[int]:
        return list(range(self.n_data))

    @property
    def clock_qubits(self) -> list[int]:
        return list(range(self.n_data, self.n_data + self.n_clock))

    @property
    def ancilla_qubit(self) -> int:
        if self.n_ancilla == 0:
            raise ValueError("layout has no ancilla qubit")
        return self.n_data + self.n_clock


@dataclass
class StateVector:
    """2^n complex amplitudes over a register layout."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class ShotHistogram:
    """Measurement counts over bitstrings, with the RNG seed that drew them."""

    counts: dict[str, int]
    shots: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram counts do not sum to the shot total")


def init_state(layout: RegisterLayout) -> StateVector:
    """All-zeros computational basis state for the layout."""
    amps = np.zeros(1 << layout.num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(layout, amps)


def state_from_amplitudes(layout: RegisterLayout, amplitudes) -> StateVector:
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if len(amps) != 1 << layout.num_qubits:
        raise DimensionMismatch(
            f"expected {1 << layout.num_qubits} amplitudes, got {len(amps)}"
        )
    return StateVector(layout, amps.copy())


def _check_unitary(u: np.ndarray, atol: float = 1e-10) -> None:
    """Unitarity check: exact Gram test for small gates, randomized probe above.

    The probe uses a fixed-seed batch of vectors so behaviour is deterministic;
    it preserves norms and pairwise inner products only if U is an isometry.
    """
    dim = u.shape[0]
    if dim <= 64:
        gram = u.conj().T @ u
        err = float(np.max(np.abs(gram - np.eye(dim))))
    else:
        rng = np.random.default_rng(0x5EED)
        probes = rng.standard_normal((dim, 8)) + 1j * rng.standard_normal((dim, 8))
        probes, _ = np.linalg.qr(probes)
        image = u @ probes
        err = float(np.max(np.abs(image.conj().T @ image - np.eye(probes.shape[1]))))
    if err > atol:
        raise NonUnitary(f"gate deviates from unitarity by {err:.3e}")


def apply_unitary(
    state: StateVector,
    u: np.ndarray,
    targets: list[int],
    controls: list[int] | None = None,
) -> StateVector:
    """Apply a k-qubit unitary to ``targets``, conditioned on all ``controls`` = 1.

    Mutates ``state`` in place and returns it.
    """
    controls = list(controls or [])
    targets = list(targets)
    n = state.num_qubits
    k = len(targets)
    u = np.asarray(u, dtype=np.complex128)

    touched = targets + controls
    if len(set(touched)) != len(touched):
        raise IndexOverlap(f"targets {targets} and controls {controls} overlap")
    if any(q < 0 or q >= n for q in touched):
        raise IndexOverlap(f"qubit index out of range for {n}-qubit state")
    if u.shape != (1 << k, 1 << k):
        raise DimensionMismatch(f"gate shape {u.shape} does not match {k} target qubits")
    _check_unitary(u)

    # View as rank-n tensor; axis j corresponds to qubit (n-1-j).
    arr = state.amplitudes.reshape((2,) * n)
    indexer = [slice(None)] * n
    for c in controls:
        indexer[n - 1 - c] = 1
    sub = arr[tuple(indexer)]

    remaining = [q for q in range(n - 1, -1, -1) if q not in controls]
    pos = {q: i for i, q in enumerate(remaining)}
    # Gate bit i lives on targets[i]; order axes MSB-first for the reshape.
    src = [pos[q] for q in reversed(targets)]
    moved = np.moveaxis(sub, src, range(k))
    block = moved.reshape(1 << k, -1)
    moved[...] = (u @ block).reshape(moved.shape)
    return state


def measure_qubit(state: StateVector, qubit: int):
    """Projective measurement of one qubit.

    Returns ``(p0, p1, collapsed0, collapsed1)``. A branch whose probability
    is below ``DEAD_BRANCH_PROBABILITY`` has no normalizable post-measurement
    state and is returned as ``None``; use :func:`collapse` to get the error
    instead.
    """
    p0, p1 = _branch_probabilities(state, qubit)
    collapsed = []
    for outcome, p in ((0, p0), (1, p1)):
        if p < DEAD_BRANCH_PROBABILITY:
            collapsed.append(None)
        else:
            collapsed.append(_collapse_to(state, qubit, outcome, p))
    return p0, p1, collapsed[0], collapsed[1]


def collapse(state: StateVector, qubit: int, outcome: int) -> tuple[float, StateVector]:
    """Collapse onto one outcome; returns (probability, renormalized state)."""
    p0, p1 = _branch_probabilities(state, qubit)
    p = p1 if outcome else p0
    if p < DEAD_BRANCH_PROBABILITY:
        raise ZeroProbabilityBranch(
            f"outcome {outcome} on qubit {qubit} has probability {p:.3e}"
        )
    return p, _collapse_to(state, qubit, outcome, p)


def _branch_probabilities(state: StateVector, qubit: int) -> tuple[float, float]:
    n = state.num_qubits
    if qubit < 0 or qubit >= n:
        raise IndexOverlap(f"qubit {qubit} out of range for {n}-qubit state")
    probs = state.probabilities().reshape((2,) * n)
    axis = n - 1 - qubit
    marg = probs.sum(axis=tuple(i for i in range(n) if i != axis))
    return float(marg[0]), float(marg[1])


def _collapse_to(state: StateVector, qubit: int, outcome: int, p: float) -> StateVector:
    n = state.num_qubits
    arr = state.amplitudes.reshape((2,) * n)
    indexer = [slice(None)] * n
    indexer[n - 1 - qubit] = 1 - outcome
    new = arr.copy()
    new[tuple(indexer)] = 0.0
    return StateVector(state.layout, new.reshape(-1) / np.sqrt(p))


def marginal_probabilities(state: StateVector, qubits: list[int]) -> np.ndarray:
    """Marginal distribution over the listed qubits; qubits[i] is bit i of the outcome."""
    n = state.num_qubits
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits) or any(q < 0 or q >= n for q in qubits):
        raise IndexOverlap(f"invalid qubit list {qubits} for {n}-qubit state")
    probs = state.probabilities().reshape((2,) * n)
    keep = [n - 1 - q for q in reversed(qubits)]  # outcome MSB first
    drop = tuple(i for i in range(n) if i not in keep)
    marg = probs.sum(axis=drop) if drop else probs
    src = [sorted(keep).index(ax) for ax in keep]
    marg = np.moveaxis(marg, src, range(len(keep)))
    return marg.reshape(-1)


def sample_counts(
    state: StateVector, qubits: list[int], shots: int, seed: int
) -> ShotHistogram:
    """Draw shot counts from the marginal distribution of the listed qubits.

    Reproducible for a fixed seed (PCG64 generator). Bitstring keys are
    rendered MSB-first over ``len(qubits)`` bits; zero-count outcomes are
    omitted.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = marginal_probabilities(state, qubits)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    width = len(qubits)
    counts = {
        format(i, f"0{width}b"): int(c) for i, c in enumerate(draws) if c > 0
    }
    return ShotHistogram(counts=counts, shots=shots, seed=seed)


def fidelity(a, b) -> float:
    """Squared overlap |<a|b>|^2 of two normalized states or amplitude vectors."""
    av = a.amplitudes if isinstance(a, StateVector) else np.asarray(a, dtype=np.complex128)
    bv = b.amplitudes if isinstance(b, StateVector) else np.asarray(b, dtype=np.complex128)
    av, bv = av.reshape(-1), bv.reshape(-1)
    if av.shape != bv.shape:
        raise DimensionMismatch(f"state dimensions differ: {av.shape} vs {bv.shape}")
    na, nb = np.linalg.norm(av), np.linalg.norm(bv)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("fidelity of a zero vector is undefined")
    if abs(na - 1.0) > 1e-8 or abs(nb - 1.0) > 1e-8:
        raise ValueError(f"fidelity requires normalized inputs (norms {na:.6f}, {nb:.6f})")
    return float(np.abs(np.vdot(av, bv)) ** 2)
