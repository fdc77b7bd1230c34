"""Attacks by the protocol participants.

* Bob's existential forgery: apply the same Pauli ``U_i`` to message qubit
  ``i`` and to the matching check qubit.  The key Paulis commute or
  anticommute with ``U_i``, so the check relation survives up to a sign
  that is a global phase on a single-qubit pure state.
* Bob's universal forgery on classical messages: ``U_i = X**(p_i ^ q_i)``.
* Alice's disavowal: disturb the check block while it travels back to Bob
  under the Trent-Bob key.  Bob never reads that block, so he cannot notice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .aqs_bell import BellSession, BellSignature, DisputeVerdict, resolve_dispute
from .aqs_plain import PlainSession, PlainSignedRecord, plain_resolve_dispute
from .errors import LayoutMismatch, LengthMismatch, NotClassical, RangeMismatch, TooLarge
from .qcore import (
    I,
    PAULIS,
    ComparisonMode,
    PauliOp,
    PureQubit,
    STATE_TOL,
    apply_pauli,
    apply_unitary,
    fidelity,
    pauli_compose,
    random_unitaries,
    ONE,
    ZERO,
)
from .qotp import QubitSequence

MAX_ENUMERATION_N = 8

Acceptor = Callable[[QubitSequence, QubitSequence], bool]


@dataclass(frozen=True)
class ForgeryPlan:
    paulis: tuple[PauliOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "paulis", tuple(self.paulis))

    @classmethod
    def identity(cls, n: int) -> ForgeryPlan:
        return cls((I,) * n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, non_identity: bool = False) -> ForgeryPlan:
        while True:
            plan = cls(tuple(PAULIS[k] for k in rng.integers(0, 4, size=n)))
            if not (non_identity and plan.is_identity):
                return plan

    @classmethod
    def parse(cls, text: str) -> ForgeryPlan:
        """``"X,Z,I"`` -> plan."""
        return cls(tuple(PauliOp.from_name(t.strip()) for t in text.split(",") if t.strip()))

    @property
    def is_identity(self) -> bool:
        return all(u == I for u in self.paulis)

    def __len__(self):
        return len(self.paulis)

    def __str__(self):
        return ",".join(u.name for u in self.paulis)


def _seq(x) -> QubitSequence:
    return x if isinstance(x, QubitSequence) else QubitSequence.of(x)


def _apply_plan(plan: ForgeryPlan, seq: QubitSequence) -> QubitSequence:
    return QubitSequence(tuple(apply_pauli(u, q) for u, q in zip(plan.paulis, seq)), seq.layout)


def forge_existential(known_P, known_S_prime, plan: ForgeryPlan) -> tuple[QubitSequence, QubitSequence]:
    known_P, known_S_prime = _seq(known_P), _seq(known_S_prime)
    if not (len(known_P) == len(known_S_prime) == len(plan)):
        raise LengthMismatch(
            f"message {len(known_P)}, check block {len(known_S_prime)} and plan {len(plan)} must match")
    return _apply_plan(plan, known_P), _apply_plan(plan, known_S_prime)


def classical_bit(q: PureQubit, tol: float = STATE_TOL) -> int:
    if fidelity(q, ZERO) >= 1 - tol:
        return 0
    if fidelity(q, ONE) >= 1 - tol:
        return 1
    raise NotClassical(f"{q!r} is not a computational basis state")


def universal_plan(known_bits: Sequence[int], target_bits: Sequence[int]) -> ForgeryPlan:
    return ForgeryPlan(tuple(PauliOp(x=int(p) ^ int(q)) for p, q in zip(known_bits, target_bits)))


def forge_universal_classical(known_P, known_S_prime, target_Q: Sequence[int]
                              ) -> tuple[QubitSequence, QubitSequence]:
    known_P = _seq(known_P)
    if len(target_Q) != len(known_P):
        raise LengthMismatch(f"target has {len(target_Q)} bits, message has {len(known_P)} qubits")
    bits = [classical_bit(q) for q in known_P]
    return forge_existential(known_P, known_S_prime, universal_plan(bits, target_Q))


def iter_plans(n: int) -> Iterator[ForgeryPlan]:
    for ops in itertools.product(PAULIS, repeat=n):
        yield ForgeryPlan(ops)


def enumerate_forgeries(known_P, known_S_prime, accepts: Acceptor) -> int:
    """Count non-identity plans whose forged pair passes ``accepts`` (exhaustive over 4**n)."""
    known_P = _seq(known_P)
    n = len(known_P)
    if n > MAX_ENUMERATION_N:
        raise TooLarge(f"exhaustive enumeration is limited to n <= {MAX_ENUMERATION_N}, got {n}")
    count = 0
    for plan in iter_plans(n):
        if plan.is_identity:
            continue
        if accepts(*forge_existential(known_P, known_S_prime, plan)):
            count += 1
    return count


def select_preferred(known_P, known_S_prime, prefer: Callable[[ForgeryPlan, QubitSequence], bool],
                     accepts: Acceptor | None = None) -> tuple[ForgeryPlan, QubitSequence, QubitSequence] | None:
    """First non-identity forgery whose message satisfies ``prefer`` (and ``accepts``, if given)."""
    known_P = _seq(known_P)
    if len(known_P) > MAX_ENUMERATION_N:
        raise TooLarge(f"search is limited to n <= {MAX_ENUMERATION_N}")
    for plan in iter_plans(len(known_P)):
        if plan.is_identity:
            continue
        p, s = forge_existential(known_P, known_S_prime, plan)
        if prefer(plan, p) and (accepts is None or accepts(p, s)):
            return plan, p, s
    return None


def commutation_sign(u: PauliOp, key_op: PauliOp) -> complex:
    """``s`` with ``U K = s K U``; always +1 or -1."""
    w1, ph1 = pauli_compose(u, key_op)
    w2, ph2 = pauli_compose(key_op, u)
    assert w1 == w2
    return ph1 / ph2


# ---------------------------------------------------------------------------
# Protocol-specific wrappers
# ---------------------------------------------------------------------------

def forge_bell(message, signature: BellSignature, plan: ForgeryPlan) -> tuple[QubitSequence, BellSignature]:
    """Apply a forgery plan to a held (message, signature) pair of the Bell protocol."""
    p, s_prime = forge_existential(message, signature.s_prime, plan)
    return p, signature.with_s_prime(list(s_prime))


def bell_acceptor(session: BellSession, signature: BellSignature,
                  comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                  rng: np.random.Generator | None = None, repetitions: int = 1) -> Acceptor:
    def accepts(p: QubitSequence, s_prime: QubitSequence) -> bool:
        forged = signature.with_s_prime(list(s_prime))
        verdict = resolve_dispute(session, p, forged, comparison_mode, rng, repetitions)
        return verdict is DisputeVerdict.ALICE_DISAVOWING

    return accepts


def forge_plain_record(session: PlainSession, record: PlainSignedRecord,
                       plan: ForgeryPlan) -> PlainSignedRecord:
    """Forge a stored record.  Only possible once Alice has published the mask."""
    session.require_published()
    p, s_a = forge_existential(record.P, record.S_A, plan)
    return PlainSignedRecord(p, s_a, record.r_mask)


def plain_acceptor(session: PlainSession, record: PlainSignedRecord,
                   comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                   rng: np.random.Generator | None = None, repetitions: int = 1) -> Acceptor:
    def accepts(p: QubitSequence, s_a: QubitSequence) -> bool:
        verdict = plain_resolve_dispute(session, PlainSignedRecord(p, s_a, record.r_mask),
                                        comparison_mode, rng, repetitions)
        return verdict is DisputeVerdict.ALICE_DISAVOWING

    return accepts


def apply_plan_to_blocks(seq: QubitSequence, plan: ForgeryPlan, *names: str) -> QubitSequence:
    """Apply the same per-qubit plan to every named block of ``seq``."""
    for name in names:
        seq = seq.with_block(name, list(_apply_plan(plan, seq.block(name))))
    return seq


# ---------------------------------------------------------------------------
# Disavowal
# ---------------------------------------------------------------------------

RANDOMIZE = "randomize"


@dataclass(frozen=True)
class TamperPlan:
    """Which qubits of a wire to disturb, and how.

    ``target`` is a block name of the wire layout or a half-open index
    range.  ``disturbance`` is ``"randomize"`` (independent Haar-random
    unitary per qubit) or an explicit Pauli per target qubit.
    """

    target: str | tuple[int, int]
    disturbance: str | tuple[PauliOp, ...] = RANDOMIZE


def _target_range(wire: QubitSequence, target) -> tuple[int, int]:
    if isinstance(target, str):
        try:
            return wire.span(target)
        except LayoutMismatch as exc:
            raise RangeMismatch(str(exc)) from None
    start, stop = target
    if not 0 <= start <= stop <= len(wire):
        raise RangeMismatch(f"range [{start}, {stop}) outside wire of length {len(wire)}")
    return start, stop


def disavow_tamper(wire: QubitSequence, plan: TamperPlan, rng: np.random.Generator | None = None) -> QubitSequence:
    start, stop = _target_range(wire, plan.target)
    qubits = list(wire.qubits)
    if plan.disturbance == RANDOMIZE:
        if rng is None and stop > start:
            raise ValueError("randomized tampering needs an rng")
        for i, u in zip(range(start, stop), random_unitaries(stop - start, rng)):
            qubits[i] = apply_unitary(u, qubits[i])
    else:
        ops = tuple(plan.disturbance)
        if len(ops) != stop - start:
            raise RangeMismatch(f"{len(ops)} Paulis for a {stop - start}-qubit target")
        for i, u in zip(range(start, stop), ops):
            qubits[i] = apply_pauli(u, qubits[i])
    return QubitSequence(tuple(qubits), wire.layout)


def bell_disavowal(rng: np.random.Generator) -> Callable[[QubitSequence], QubitSequence]:
    """Alice's interception of Trent's reply: scramble the S_prime block."""
    return lambda y_tb: disavow_tamper(y_tb, TamperPlan("S_prime"), rng)


def plain_disavowal(rng: np.random.Generator) -> Callable[[QubitSequence], QubitSequence]:
    """Alice's interception of Trent's reply: scramble the S_A block."""
    return lambda y_ret: disavow_tamper(y_ret, TamperPlan("S_A"), rng)


__all__ = [
    "Acceptor", "ForgeryPlan", "TamperPlan", "RANDOMIZE", "MAX_ENUMERATION_N",
    "forge_existential", "forge_universal_classical", "universal_plan", "classical_bit",
    "iter_plans", "enumerate_forgeries", "select_preferred", "commutation_sign",
    "forge_bell", "bell_acceptor", "forge_plain_record", "plain_acceptor",
    "apply_plan_to_blocks", "disavow_tamper", "bell_disavowal", "plain_disavowal",
]
