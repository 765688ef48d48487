"""Hamiltonian-simulation backends for the controlled-U ladder.

Three interchangeable ways to realize U^power with U = exp(i*A*t):

* ``exact``   - eigendecomposition, numerically exact;
* ``trotter`` - product formula over the Pauli decomposition of A, with a
  fixed per-step size so U^power reuses the same splitting at power-fold cost;
* ``block``   - A embedded in a larger unitary; exp(i*A*t) built from the
  truncated Taylor series of the encoded block and projected back to the
  nearest unitary.

Every backend keeps two cost counters: ``controlled_u_count`` (applications
of U, i.e. the sum of requested powers) and ``elementary_exp_count`` (the
number of elementary exponential factors the realization would spend). The
counters model circuit cost; the matrix algebra itself uses repeated squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import NonPowerOfTwoDimension, NormalizationFailure, TruncationInsufficient
from .linalg import (
    Spectrum,
    hermitian_eigendecomposition,
    propagator_from_spectrum,
    require_hermitian,
    require_power_of_two,
)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

COEFFICIENT_CUTOFF = 1e-12


def pauli_word_matrix(word: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis; word[0] acts on the top qubit."""
    return reduce(np.kron, [PAULI_MATRICES[ch] for ch in word])


@dataclass(frozen=True)
class PauliTermList:
    """Real-weighted Pauli words whose sum reconstructs a Hermitian matrix."""

    terms: tuple[tuple[float, str], ...]
    num_qubits: int

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def reconstruct(self) -> np.ndarray:
        dim = 1 << self.num_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for coeff, word in self.terms:
            perm, phases = _word_action(word)
            out[perm, np.arange(dim)] += coeff * phases
        return out


def pauli_decompose(a) -> PauliTermList:
    """Expand a Hermitian matrix over Pauli words (lexicographic order).

    Uses the recursive 2x2-block reduction, pruning all-zero blocks, so sparse
    structure costs far less than the naive 4^n trace evaluation. Terms with
    |coefficient| <= 1e-12 are dropped.
    """
    a = require_hermitian(a)
    n = require_power_of_two(a.shape[0])
    if n < 1:
        raise NonPowerOfTwoDimension("Pauli decomposition needs dimension >= 2")
    found: list[tuple[str, complex]] = []
    _decompose_block(a, "", found)
    terms = []
    for word, coeff in found:
        if abs(coeff) <= COEFFICIENT_CUTOFF:
            continue
        # Hermitian input guarantees real weights; imaginary dust is roundoff.
        terms.append((float(coeff.real), word))
    return PauliTermList(terms=tuple(terms), num_qubits=n)


def _decompose_block(block: np.ndarray, prefix: str, out: list) -> None:
    if block.shape[0] == 1:
        out.append((prefix, complex(block[0, 0])))
        return
    h = block.shape[0] // 2
    b00, b01 = block[:h, :h], block[:h, h:]
    b10, b11 = block[h:, :h], block[h:, h:]
    children = (
        ("I", (b00 + b11) / 2.0),
        ("X", (b01 + b10) / 2.0),
        ("Y", 1j * (b01 - b10) / 2.0),
        ("Z", (b00 - b11) / 2.0),
    )
    for letter, child in children:
        if np.max(np.abs(child)) <= 1e-13:
            continue
        _decompose_block(child, prefix + letter, out)


def _word_action(word: str) -> tuple[np.ndarray, np.ndarray]:
    """Permutation/phase form of a Pauli word: P|k> = phases[k] |k ^ xmask>.

    Returns ``(perm, col_phases)`` with ``perm = arange ^ xmask`` so that a
    dense P satisfies ``P[perm[k], k] = col_phases[k]``.
    """
    n = len(word)
    xmask = zmask = 0
    n_y = 0
    for pos, ch in enumerate(word):
        qubit = n - 1 - pos
        if ch in "XY":
            xmask |= 1 << qubit
        if ch in "YZ":
            zmask |= 1 << qubit
        if ch == "Y":
            n_y += 1
    dim = 1 << n
    idx = np.arange(dim)
    parity = np.bitwise_count(idx & zmask) & 1
    phases = (1j**n_y) * np.where(parity, -1.0, 1.0)
    return idx ^ xmask, phases.astype(np.complex128)


def _apply_exp_word_left(m: np.ndarray, word: str, theta: float) -> np.ndarray:
    """exp(i*theta*P) @ m for a Pauli word P, via cos/sin split (P^2 = I)."""
    perm, col_phases = _word_action(word)
    row_phases = col_phases[perm]
    return math.cos(theta) * m + (1j * math.sin(theta)) * (row_phases[:, None] * m[perm])


@dataclass(frozen=True)
class TrotterPlan:
    """Product-formula splitting: terms, order, step count and step size."""

    terms: PauliTermList
    order: int
    steps: int
    stage_coefficients: tuple[tuple[float, ...], tuple[float, ...]]
    h: float

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"unsupported product-formula order {self.order}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        c, d = self.stage_coefficients
        if abs(sum(c) + sum(d) - 1.0) > 1e-12:
            raise ValueError("stage coefficients of one step must sum to 1")

    @property
    def factors_per_step(self) -> int:
        """Elementary exponentials spent by one step."""
        stages = sum(1 for coeffs in self.stage_coefficients for c in coeffs if c != 0.0)
        return stages * self.terms.term_count


def make_trotter_plan(a, t: float, steps: int, order: int = 2) -> TrotterPlan:
    terms = a if isinstance(a, PauliTermList) else pauli_decompose(a)
    stage = ((1.0,), (0.0,)) if order == 1 else ((0.5,), (0.5,))
    return TrotterPlan(
        terms=terms, order=order, steps=steps, stage_coefficients=stage, h=t / steps
    )


def _trotter_step_matrix(plan: TrotterPlan, h: float) -> np.ndarray:
    """One product-formula step for step size h.

    Order 1 sweeps the terms forward; order 2 (symmetric) sweeps forward at
    h/2 and back at h/2. Factors are written left-to-right and therefore
    applied to the accumulating matrix in reverse.
    """
    factors: list[tuple[str, float]] = []
    forward = [(word, coeff * h) for coeff, word in plan.terms.terms]
    if plan.order == 1:
        factors = forward
    else:
        half = [(word, angle / 2.0) for word, angle in forward]
        factors = half + half[::-1]
    dim = 1 << plan.terms.num_qubits
    m = np.eye(dim, dtype=np.complex128)
    for word, angle in reversed(factors):
        m = _apply_exp_word_left(m, word, angle)
    return m


def trotter_unitary(plan: TrotterPlan, t: float) -> np.ndarray:
    """Approximate exp(i*A*t) by `steps` repetitions of the product formula."""
    step = _trotter_step_matrix(plan, t / plan.steps)
    return np.linalg.matrix_power(step, plan.steps)


@dataclass(frozen=True)
class BlockEncoding:
    """Unitary of twice the dimension whose top-left block is A/alpha."""

    unitary: np.ndarray
    alpha: float
    extra_ancillas: int = 1

    @property
    def block_dim(self) -> int:
        return self.unitary.shape[0] // 2

    def encoded_matrix(self) -> np.ndarray:
        """alpha * (top-left block), i.e. the matrix that was encoded."""
        n = self.block_dim
        return self.alpha * self.unitary[:n, :n]


def block_encode(a) -> BlockEncoding:
    """Embed Hermitian A into U = [[A/a, B], [B, -A/a]] with B = sqrt(I-(A/a)^2).

    alpha is the spectral norm with a tiny safety margin so I - (A/alpha)^2
    stays positive semidefinite; B commutes with A, which makes U unitary.
    """
    a = require_hermitian(a)
    spec = hermitian_eigendecomposition(a)
    norm2 = float(np.max(np.abs(spec.eigenvalues))) if spec.dim else 0.0
    alpha = norm2 * (1.0 + 1e-9) if norm2 > 0.0 else 1.0
    scaled = spec.eigenvalues / alpha
    complement = 1.0 - scaled**2
    if np.min(complement) < -1e-12:
        raise NormalizationFailure(
            f"I - (A/alpha)^2 has eigenvalue {float(np.min(complement)):.3e}"
        )
    v = spec.eigenvectors
    a_tilde = (v * scaled) @ v.conj().T
    b = (v * np.sqrt(np.clip(complement, 0.0, None))) @ v.conj().T
    u = np.block([[a_tilde, b], [b, -a_tilde]])
    return BlockEncoding(unitary=u, alpha=alpha)


def taylor_truncation_bound(alpha: float, t: float, k: int) -> float:
    """Remainder bound (alpha*|t|)^(k+1) / (k+1)! of the exponential series."""
    x = alpha * abs(t)
    return math.exp((k + 1) * math.log(x) - math.lgamma(k + 2)) if x > 0 else 0.0


def select_taylor_truncation(
    alpha: float, t: float, tolerance: float = 1e-12, cap: int = 40
) -> int:
    """Smallest K with series remainder <= tolerance, capped at 40."""
    for k in range(cap + 1):
        if taylor_truncation_bound(alpha, t, k) <= tolerance:
            return k
    raise TruncationInsufficient(
        f"series remainder at K={cap} is "
        f"{taylor_truncation_bound(alpha, t, cap):.3e} > {tolerance:.1e} "
        f"for alpha*|t| = {alpha * abs(t):.3f}"
    )


def taylor_exponential(
    encoding: BlockEncoding,
    t: float,
    truncation: int | None = None,
    tolerance: float | None = None,
) -> np.ndarray:
    """Truncated-series exp(i*A*t) from a block encoding, re-unitarized.

    With ``truncation=None`` the order is auto-selected for a 1e-12 remainder
    (capped at K=40). An explicit truncation is validated against ``tolerance``
    when one is given. The partial sum is projected to the nearest unitary
    (polar projection), which at most doubles the truncation error.
    """
    if truncation is None:
        k = select_taylor_truncation(encoding.alpha, t)
    else:
        k = int(truncation)
        if tolerance is not None:
            bound = taylor_truncation_bound(encoding.alpha, t, k)
            if bound > tolerance:
                raise TruncationInsufficient(
                    f"remainder bound {bound:.3e} exceeds tolerance {tolerance:.1e} at K={k}"
                )
    a = encoding.encoded_matrix()
    dim = a.shape[0]
    acc = np.eye(dim, dtype=np.complex128)
    term = np.eye(dim, dtype=np.complex128)
    iat = 1j * t * a
    for j in range(1, k + 1):
        term = term @ iat / j
        acc = acc + term
    u_left, _, v_right = np.linalg.svd(acc)
    return u_left @ v_right


class EvolutionBackend:
    """Shared counter bookkeeping for the controlled-U providers."""

    method = "abstract"

    def __init__(self):
        self.controlled_u_count = 0
        self.elementary_exp_count = 0

    def reset_counters(self) -> None:
        self.controlled_u_count = 0
        self.elementary_exp_count = 0

    def propagator(self, t: float, power: int) -> np.ndarray:
        if power < 1:
            raise ValueError(f"power must be >= 1, got {power}")
        self.controlled_u_count += power
        self.elementary_exp_count += self._exp_cost(power)
        return self._propagator(t, power)

    def _exp_cost(self, power: int) -> int:
        raise NotImplementedError

    def _propagator(self, t: float, power: int) -> np.ndarray:
        raise NotImplementedError


class ExactEvolution(EvolutionBackend):
    """exp(i*A*t*power) straight from the eigendecomposition."""

    method = "exact"

    def __init__(self, a):
        super().__init__()
        self.spectrum: Spectrum = (
            a if isinstance(a, Spectrum) else hermitian_eigendecomposition(a)
        )

    def _exp_cost(self, power: int) -> int:
        return power

    def _propagator(self, t: float, power: int) -> np.ndarray:
        return propagator_from_spectrum(self.spectrum, t * power)


class TrotterEvolution(EvolutionBackend):
    """Product formula with a per-step size fixed by the base time t.

    U^power re-applies the same step, so the modelled circuit spends
    power * steps * factors_per_step elementary exponentials; the matrix is
    computed by repeated squaring.
    """

    method = "trotter"

    def __init__(self, a, steps: int = 8, order: int = 2):
        super().__init__()
        self.terms = a if isinstance(a, PauliTermList) else pauli_decompose(a)
        self.steps = steps
        self.order = order
        self._step_cache: dict[float, np.ndarray] = {}

    def plan(self, t: float) -> TrotterPlan:
        return make_trotter_plan(self.terms, t, self.steps, self.order)

    def _exp_cost(self, power: int) -> int:
        return power * self.steps * self.plan(1.0).factors_per_step

    def _propagator(self, t: float, power: int) -> np.ndarray:
        step = self._step_cache.get(t)
        if step is None:
            step = _trotter_step_matrix(self.plan(t), t / self.steps)
            self._step_cache[t] = step
        return np.linalg.matrix_power(step, self.steps * power)


class BlockEvolution(EvolutionBackend):
    """Taylor-series propagator from the block encoding of A.

    The base propagator exp(i*A*t) is built once per t; higher powers compose
    it, because a single series at time t*power would need an ever larger
    truncation order (the remainder bound grows like (alpha*t*power)^K / K!).
    """

    method = "block"

    def __init__(self, a, truncation: int | None = None):
        super().__init__()
        self.encoding = a if isinstance(a, BlockEncoding) else block_encode(a)
        self.truncation = truncation
        self._base_cache: dict[float, tuple[np.ndarray, int]] = {}
        self._last_k = 0

    def _truncation_for(self, t: float) -> int:
        if self.truncation is not None:
            return self.truncation
        return select_taylor_truncation(self.encoding.alpha, t)

    def _exp_cost(self, power: int) -> int:
        # Series terms per application of U; t is resolved at propagator
        # time, so propagator() stashes the truncation order first.
        return power * self._last_k

    def propagator(self, t: float, power: int) -> np.ndarray:
        self._last_k = self._truncation_for(t)
        return super().propagator(t, power)

    def _propagator(self, t: float, power: int) -> np.ndarray:
        cached = self._base_cache.get(t)
        if cached is None:
            k = self._truncation_for(t)
            base = taylor_exponential(self.encoding, t, truncation=k)
            self._base_cache[t] = (base, k)
        else:
            base, _ = cached
        return np.linalg.matrix_power(base, power)


def controlled_evolution(backend: EvolutionBackend, t: float, power: int) -> np.ndarray:
    """Matrix implementing U^power for the chosen backend, updating its counters."""
    return backend.propagator(t, power)


def make_backend(
    a,
    method: str,
    trotter_steps: int = 8,
    trotter_order: int = 2,
    taylor_k: int | None = None,
    spectrum: Spectrum | None = None,
) -> EvolutionBackend:
    if method == "exact":
        return ExactEvolution(spectrum if spectrum is not None else a)
    if method == "trotter":
        return TrotterEvolution(a, steps=trotter_steps, order=trotter_order)
    if method == "block":
        return BlockEvolution(a, truncation=taylor_k)
    raise ValueError(f"unknown simulation method '{method}' (expected exact|trotter|block)")
