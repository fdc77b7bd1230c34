"""Exact single-qubit and Bell-pair simulation.

Everything here works on tiny fixed-size state vectors (2, 4 or 8 complex
amplitudes), so results are exact up to floating-point rounding.  States keep
their global phase; equality is always tested with :func:`equal_up_to_phase`.

Stochastic operations (teleportation, swap test, measurement, Haar sampling)
take an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import NotCanonicalPair, NotNormalizable, ZeroVector

STATE_TOL = 1e-9
ISOMETRY_TOL = 1e-12
_SQRT2_INV = 1 / math.sqrt(2)


@dataclass(frozen=True)
class PureQubit:
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm2 = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm2 - 1.0) > STATE_TOL:
            raise NotNormalizable(f"qubit norm^2 {norm2!r} is not 1")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)

    def prob(self, bit: int) -> float:
        """Probability of reading ``bit`` in the computational basis."""
        return abs(self.amp1 if bit else self.amp0) ** 2

    def scaled(self, phase: complex) -> PureQubit:
        return PureQubit(phase * self.amp0, phase * self.amp1)

    def __repr__(self):
        return f"PureQubit({self.amp0:.6g}, {self.amp1:.6g})"


ZERO = PureQubit(1 + 0j, 0j)
ONE = PureQubit(0j, 1 + 0j)
PLUS = PureQubit(_SQRT2_INV + 0j, _SQRT2_INV + 0j)
MINUS = PureQubit(_SQRT2_INV + 0j, -_SQRT2_INV + 0j)


def make_qubit(amp0: complex, amp1: complex) -> PureQubit:
    """Build a qubit, absorbing rounding-level normalization errors.

    Inputs whose norm is off by less than 1e-12 pass through untouched;
    deviations below 1e-6 are renormalized; anything larger is treated as
    a caller bug and raises :class:`NotNormalizable`.
    """
    amp0, amp1 = complex(amp0), complex(amp1)
    if amp0 == 0 and amp1 == 0:
        raise ZeroVector("both amplitudes are zero")
    norm = math.sqrt(abs(amp0) ** 2 + abs(amp1) ** 2)
    dev = abs(norm - 1.0)
    if dev >= 1e-6:
        raise NotNormalizable(f"norm {norm!r} deviates from 1 by {dev:.3g}")
    if dev > 1e-12:
        amp0, amp1 = amp0 / norm, amp1 / norm
    return PureQubit(amp0, amp1)


def basis_qubit(bit: int) -> PureQubit:
    return ONE if bit else ZERO


# ---------------------------------------------------------------------------
# Pauli group modulo global phase
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliOp:
    """The operator ``sigma_x**x @ sigma_z**z`` (z is applied first)."""

    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.x not in (0, 1) or self.z not in (0, 1):
            raise ValueError(f"Pauli exponents must be bits, got x={self.x}, z={self.z}")

    @property
    def matrix(self) -> np.ndarray:
        return np.linalg.matrix_power(SIGMA_X, self.x) @ np.linalg.matrix_power(SIGMA_Z, self.z)

    @property
    def name(self) -> str:
        return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "XZ"}[(self.x, self.z)]

    @classmethod
    def from_name(cls, name: str) -> PauliOp:
        try:
            return _BY_NAME[name.upper()]
        except KeyError:
            raise ValueError(f"unknown Pauli {name!r}") from None

    def __repr__(self):
        return f"PauliOp.{self.name}"


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

I = PauliOp(0, 0)  # noqa: E741
X = PauliOp(1, 0)
Z = PauliOp(0, 1)
XZ = PauliOp(1, 1)
PAULIS = (I, X, Z, XZ)
_BY_NAME = {"I": I, "X": X, "Z": Z, "XZ": XZ}
_BY_BITS = {(0, 0): I, (1, 0): X, (0, 1): Z, (1, 1): XZ}


def pauli(x: int, z: int) -> PauliOp:
    """Shared instance of ``sigma_x**x sigma_z**z``."""
    return _BY_BITS[(int(x), int(z))]


def apply_pauli(u: PauliOp, q: PureQubit) -> PureQubit:
    a, b = q.amp0, q.amp1
    if u.z:
        b = -b
    if u.x:
        a, b = b, a
    return PureQubit(a, b)


def pauli_compose(u: PauliOp, v: PauliOp) -> tuple[PauliOp, complex]:
    """Return ``(w, phase)`` with ``matrix(u) @ matrix(v) == phase * matrix(w)``.

    ``X^a Z^b X^c Z^d = (-1)^(b*c) X^(a^c) Z^(b^d)``, so with the XZ element
    as a group member the phase is always real.
    """
    phase = -1 + 0j if (u.z & v.x) else 1 + 0j
    return pauli(u.x ^ v.x, u.z ^ v.z), phase


def apply_unitary(matrix: np.ndarray, q: PureQubit) -> PureQubit:
    a, b = matrix @ q.vector
    return PureQubit(complex(a), complex(b))


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------

def inner(a: PureQubit, b: PureQubit) -> complex:
    return a.amp0.conjugate() * b.amp0 + a.amp1.conjugate() * b.amp1


def fidelity(a: PureQubit, b: PureQubit) -> float:
    return min(1.0, abs(inner(a, b)) ** 2)


def equal_up_to_phase(a: PureQubit, b: PureQubit, tol: float = STATE_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return abs(inner(a, b)) >= 1 - tol


def sequences_equal_up_to_phase(a: Sequence[PureQubit], b: Sequence[PureQubit],
                                tol: float = STATE_TOL) -> bool:
    """Qubit-wise equality of two product states, each qubit modulo its own phase."""
    return len(a) == len(b) and all(equal_up_to_phase(p, q, tol) for p, q in zip(a, b))


def swap_test(a: PureQubit, b: PureQubit, rng: np.random.Generator) -> bool:
    """One run of the controlled-SWAP test; True means the ancilla read 0 ("pass")."""
    return bool(rng.random() < swap_test_pass_probability(a, b))


def swap_test_pass_probability(a: PureQubit, b: PureQubit) -> float:
    # ancilla (axis 0) x a (axis 1) x b (axis 2); H, CSWAP, H, read P(ancilla=0)
    ab = np.multiply.outer(a.vector, b.vector)
    state = np.stack([ab, ab]) * _SQRT2_INV
    state[1] = state[1].T
    after = np.stack([state[0] + state[1], state[0] - state[1]]) * _SQRT2_INV
    return float(np.sum(np.abs(after[0]) ** 2))


class ComparisonMode(str, enum.Enum):
    ORACLE = "oracle"
    PHYSICAL = "physical"


def compare_qubits(a: PureQubit, b: PureQubit, mode: ComparisonMode,
                   rng: np.random.Generator | None = None, repetitions: int = 1) -> bool:
    """Equality test used by every protocol check.

    Oracle mode is the exact fidelity threshold.  Physical mode runs
    ``repetitions`` swap tests and passes only if all of them pass; a pass
    leaves both states usable.
    """
    if ComparisonMode(mode) is ComparisonMode.ORACLE:
        return equal_up_to_phase(a, b)
    if rng is None:
        raise ValueError("physical comparison needs an rng")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    return all(swap_test(a, b, rng) for _ in range(repetitions))


def compare_sequences(a: Sequence[PureQubit], b: Sequence[PureQubit], mode: ComparisonMode,
                      rng: np.random.Generator | None = None, repetitions: int = 1) -> bool:
    """Qubit-by-qubit comparison; stops at the first failing qubit."""
    if len(a) != len(b):
        return False
    return all(compare_qubits(p, q, mode, rng, repetitions) for p, q in zip(a, b))


# ---------------------------------------------------------------------------
# Measurement and sampling
# ---------------------------------------------------------------------------

def measure_computational(q: PureQubit, rng: np.random.Generator | None = None) -> int:
    """Computational-basis readout.  Basis states are read without drawing randomness."""
    p1 = q.prob(1)
    if p1 <= ISOMETRY_TOL:
        return 0
    if p1 >= 1 - ISOMETRY_TOL:
        return 1
    if rng is None:
        raise ValueError("measuring a superposition needs an rng")
    return int(rng.random() < p1)


def random_qubit(rng: np.random.Generator) -> PureQubit:
    """Haar-random pure qubit (normalized complex Gaussian pair)."""
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    return PureQubit(complex(v[0]), complex(v[1]))


def random_unitaries(count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random 2x2 unitaries, shape ``(count, 2, 2)``."""
    from scipy.stats import unitary_group

    if count == 0:
        return np.zeros((0, 2, 2), dtype=complex)
    return unitary_group.rvs(2, size=count, random_state=rng).reshape(count, 2, 2)


def density(q: PureQubit) -> np.ndarray:
    v = q.vector
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# Bell pairs and teleportation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoQubitState:
    """Amplitudes in the order |00>, |01>, |10>, |11>; the first factor is the sender's half."""

    amps: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.amps) != 4:
            raise ValueError("a two-qubit state has 4 amplitudes")
        norm2 = sum(abs(a) ** 2 for a in self.amps)
        if abs(norm2 - 1.0) > STATE_TOL:
            raise NotNormalizable(f"two-qubit norm^2 {norm2!r} is not 1")

    @property
    def tensor(self) -> np.ndarray:
        return np.array(self.amps, dtype=complex).reshape(2, 2)

    def reduced_probabilities(self, half: int) -> tuple[float, float]:
        """Computational-basis outcome probabilities of one half (0 = sender, 1 = receiver)."""
        t = np.abs(self.tensor) ** 2
        p = t.sum(axis=1 - half)
        return float(p[0]), float(p[1])


class BellIndex(NamedTuple):
    """Bell outcome ``(b1, b2)``: b1 is the phase bit, b2 the parity bit.

    ``|beta_{b1 b2}> = (|0, b2> + (-1)**b1 |1, 1^b2>) / sqrt(2)``
    """

    b1: int
    b2: int


BELL_INDICES = tuple(BellIndex(b1, b2) for b1 in (0, 1) for b2 in (0, 1))


def bell_pair() -> TwoQubitState:
    return TwoQubitState((_SQRT2_INV + 0j, 0j, 0j, _SQRT2_INV + 0j))


def bell_vector(idx: BellIndex) -> np.ndarray:
    v = np.zeros((2, 2), dtype=complex)
    v[0, idx.b2] = _SQRT2_INV
    v[1, 1 - idx.b2] = (-1) ** idx.b1 * _SQRT2_INV
    return v


def _check_canonical(pair: TwoQubitState):
    diff = np.array(pair.amps) - np.array(bell_pair().amps)
    if np.linalg.norm(diff) > STATE_TOL:
        raise NotCanonicalPair("teleportation requires the (|00>+|11>)/sqrt2 pair")


def teleport_branches(msg: PureQubit, pair: TwoQubitState) -> list[tuple[BellIndex, float, np.ndarray]]:
    """All four Bell-measurement branches: (outcome, Born probability, unnormalized remote)."""
    _check_canonical(pair)
    # axes: message qubit m, sender half a, receiver half b
    psi = np.multiply.outer(msg.vector, pair.tensor)
    out = []
    for idx in BELL_INDICES:
        remote = np.einsum("ma,mab->b", bell_vector(idx).conj(), psi)
        out.append((idx, float(np.vdot(remote, remote).real), remote))
    return out


def teleport(msg: PureQubit, pair: TwoQubitState, rng: np.random.Generator) -> tuple[BellIndex, PureQubit]:
    """Bell-measure ``msg`` with the sender half of ``pair``.

    Returns the sampled outcome and the receiver half collapsed onto that
    branch (before any correction).
    """
    branches = teleport_branches(msg, pair)
    probs = np.array([p for _, p, _ in branches])
    k = int(rng.choice(4, p=probs / probs.sum()))
    idx, p, remote = branches[k]
    remote = remote / math.sqrt(p)
    return idx, PureQubit(complex(remote[0]), complex(remote[1]))


def correction_for(outcome: BellIndex) -> PauliOp:
    return pauli(outcome.b2, outcome.b1)


def teleport_correct(outcome: BellIndex, remote: PureQubit) -> PureQubit:
    # remote = X^b2 Z^b1 |msg>; undo X first, then Z
    outcome = BellIndex(*outcome)
    q = apply_pauli(pauli(outcome.b2, 0), remote)
    return apply_pauli(pauli(0, outcome.b1), q)


def as_bits(qubits: Iterable[PureQubit], rng: np.random.Generator | None = None) -> list[int]:
    return [measure_computational(q, rng) for q in qubits]
