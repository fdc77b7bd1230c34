"""Bell-state arbitrated quantum signature protocol.

Parties: Alice signs, Bob receives and verifies with the help of the
arbitrator Trent.  Alice shares ``key_a`` with Trent, Bob shares ``key_b``
with Trent, and Alice and Bob share ``n`` Bell pairs.

Key layouts::

    key_a = eprime[n] | qotp_S[6n]
    key_b = qotp_V1[8n] | qotp_V3[2(6n+1)]

Wire layouts::

    signature S = S_M_A[2n] | S_prime[n]                  (under key_a.qotp_S)
    Y_B         = S_M_A[2n] | S_prime[n] | P[n]           (under key_b.qotp_V1)
    Y_TB        = M_A[2n] | S_M_A[2n] | S_prime[n] | P[n] | r[1]   (under key_b.qotp_V3)

Each Bell outcome ``(b1, b2)`` travels as two computational-basis qubits.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import LayoutMismatch, LengthMismatch, ProtocolError
from .qcore import (
    BellIndex,
    ComparisonMode,
    PureQubit,
    TwoQubitState,
    as_bits,
    basis_qubit,
    bell_pair,
    compare_sequences,
    teleport,
    teleport_correct,
    ZERO,
)
from .qotp import BitKey, QubitSequence, eprime_encrypt, qotp_decrypt, qotp_encrypt


class Variant(str, enum.Enum):
    STANDARD = "standard"
    # Trent keeps the verified signature instead of forwarding it to Bob
    TRENT_RETAINS = "trent_retains"


class DisputeVerdict(str, enum.Enum):
    ALICE_DISAVOWING = "alice_disavowing"
    BOB_FORGED = "bob_forged"


def key_a_segments(n: int) -> list[tuple[str, int]]:
    return [("eprime", n), ("qotp_S", 6 * n)]


def key_b_segments(n: int) -> list[tuple[str, int]]:
    return [("qotp_V1", 8 * n), ("qotp_V3", 2 * (6 * n + 1))]


def signature_blocks(n: int) -> list[tuple[str, int]]:
    return [("S_M_A", 2 * n), ("S_prime", n)]


def y_b_blocks(n: int) -> list[tuple[str, int]]:
    return signature_blocks(n) + [("P", n)]


def y_tb_blocks(n: int) -> list[tuple[str, int]]:
    return [("M_A", 2 * n)] + signature_blocks(n) + [("P", n), ("r", 1)]


@dataclass(frozen=True)
class BellSignature:
    s: QubitSequence

    def __post_init__(self):
        if len(self.s) % 3:
            raise LayoutMismatch(f"signature length {len(self.s)} is not 3n")
        self.s.expect_layout(signature_blocks(len(self.s) // 3), "signature")

    @property
    def n(self) -> int:
        return len(self.s) // 3

    @property
    def s_prime(self) -> QubitSequence:
        return self.s.block("S_prime")

    def with_s_prime(self, qubits: Sequence[PureQubit]) -> BellSignature:
        return BellSignature(self.s.with_block("S_prime", qubits))

    def __len__(self):
        return len(self.s)


@dataclass
class BellSession:
    n: int
    key_a: BitKey
    key_b: BitKey
    pairs: tuple[TwoQubitState, ...]
    variant: Variant = Variant.STANDARD
    stored_signature: BellSignature | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        self.variant = Variant(self.variant)
        if dict(self.key_a.layout) != dict(BitKey.zeros(key_a_segments(self.n)).layout):
            raise LayoutMismatch(f"key_a layout {dict(self.key_a.layout)} does not match n={self.n}")
        if dict(self.key_b.layout) != dict(BitKey.zeros(key_b_segments(self.n)).layout):
            raise LayoutMismatch(f"key_b layout {dict(self.key_b.layout)} does not match n={self.n}")
        if len(self.pairs) != self.n:
            raise LengthMismatch(f"need {self.n} Bell pairs, got {len(self.pairs)}")


def init_session(n: int, rng: np.random.Generator, variant: Variant | str = Variant.STANDARD) -> BellSession:
    if n < 1:
        raise ValueError("n must be >= 1")
    return BellSession(
        n=n,
        key_a=BitKey.random(key_a_segments(n), rng),
        key_b=BitKey.random(key_b_segments(n), rng),
        pairs=tuple(bell_pair() for _ in range(n)),
        variant=Variant(variant),
    )


class SignOutput(NamedTuple):
    signature: BellSignature
    plaintext_copy: QubitSequence
    bob_remote: QubitSequence
    outcomes: list[BellIndex]


class Verdict(NamedTuple):
    r: int
    source: str


class BobVerification(NamedTuple):
    accept: int
    r: int
    message: QubitSequence
    signature: BellSignature


def _message(session: BellSession, message) -> QubitSequence:
    message = message if isinstance(message, QubitSequence) else QubitSequence.of(message)
    if len(message) != session.n:
        raise LengthMismatch(f"message has {len(message)} qubits, session expects {session.n}")
    return message.relabel("P")


def sign(session: BellSession, message, rng: np.random.Generator) -> SignOutput:
    """Alice's signing steps: encrypt copy one with E', teleport copy two, encrypt the lot."""
    message = _message(session, message)
    r_a = eprime_encrypt(session.key_a.segment("eprime"), message)
    outcomes, remotes = [], []
    for q, pair in zip(message, session.pairs):
        idx, remote = teleport(q, pair, rng)
        outcomes.append(idx)
        remotes.append(remote)
    m_a = [basis_qubit(b) for idx in outcomes for b in idx]
    plain = QubitSequence.join([("S_M_A", m_a), ("S_prime", r_a)])
    s = qotp_encrypt(session.key_a.segment("qotp_S"), plain)
    return SignOutput(BellSignature(s), message, QubitSequence.of(remotes, "remote"), outcomes)


def bob_prepare(session: BellSession, signature: BellSignature, message: QubitSequence) -> QubitSequence:
    """Bob wraps the received (signature, message) under his key for Trent."""
    message = _message(session, message)
    if signature.n != session.n:
        raise LayoutMismatch(f"signature is for n={signature.n}, session n={session.n}")
    plain = QubitSequence.join([(None, signature.s), ("P", message)])
    return qotp_encrypt(session.key_b.segment("qotp_V1"), plain)


def trent_verify(session: BellSession, y_b: QubitSequence,
                 comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                 rng: np.random.Generator | None = None,
                 repetitions: int = 1) -> tuple[Verdict, QubitSequence]:
    n = session.n
    y_b.expect_layout(y_b_blocks(n), "Y_B")
    plain = qotp_decrypt(session.key_b.segment("qotp_V1"), y_b)
    p = plain.block("P")
    inner = qotp_decrypt(session.key_a.segment("qotp_S"), plain.block("S_M_A", "S_prime"))
    expected = eprime_encrypt(session.key_a.segment("eprime"), p)
    r = int(compare_sequences(inner.block("S_prime"), expected, comparison_mode, rng, repetitions))

    m_a = [basis_qubit(b) for b in as_bits(inner.block("S_M_A"), rng)]
    s = qotp_encrypt(session.key_a.segment("qotp_S"), inner)
    if session.variant is Variant.TRENT_RETAINS:
        session.stored_signature = BellSignature(s)
        s = QubitSequence((ZERO,) * len(s), s.layout)
    y_tb = QubitSequence.join([("M_A", m_a), (None, s), ("P", p), ("r", [basis_qubit(r)])])
    return Verdict(r, "trent_verify"), qotp_encrypt(session.key_b.segment("qotp_V3"), y_tb)


def bob_verify(session: BellSession, y_tb: QubitSequence, bob_remote: QubitSequence,
               comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
               rng: np.random.Generator | None = None,
               repetitions: int = 1,
               plaintext_copy: QubitSequence | None = None) -> BobVerification:
    """Bob's checks on Trent's reply.

    Rejects when the verdict qubit reads 0.  Otherwise corrects the
    teleported copy with the relayed Bell outcomes and compares it against
    ``plaintext_copy`` (by default the message block returned by Trent).
    """
    n = session.n
    y_tb.expect_layout(y_tb_blocks(n), "Y_TB")
    if len(bob_remote) != n:
        raise LayoutMismatch(f"expected {n} teleported qubits, got {len(bob_remote)}")
    plain = qotp_decrypt(session.key_b.segment("qotp_V3"), y_tb)
    message = plain.block("P")
    signature = BellSignature(plain.block("S_M_A", "S_prime"))
    r = as_bits(plain.block("r"), rng)[0]
    if r != 1:
        return BobVerification(0, r, message, signature)
    bits = as_bits(plain.block("M_A"), rng)
    outcomes = [BellIndex(bits[2 * i], bits[2 * i + 1]) for i in range(n)]
    copy = [teleport_correct(o, q) for o, q in zip(outcomes, bob_remote)]
    reference = message if plaintext_copy is None else plaintext_copy
    ok = compare_sequences(copy, list(reference), comparison_mode, rng, repetitions)
    return BobVerification(int(ok), r, message, signature)


def resolve_dispute(session: BellSession, claimed_P, claimed_S: BellSignature | None,
                    comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                    rng: np.random.Generator | None = None,
                    repetitions: int = 1) -> DisputeVerdict:
    """Trent's arbitration over a (message, signature) pair submitted by Bob.

    Under ``TRENT_RETAINS`` the submitted signature is ignored in favour of
    the one Trent stored during verification.
    """
    claimed_P = claimed_P if isinstance(claimed_P, QubitSequence) else QubitSequence.of(claimed_P)
    if len(claimed_P) != session.n:
        raise LayoutMismatch(f"claimed message has {len(claimed_P)} qubits, expected {session.n}")
    if session.variant is Variant.TRENT_RETAINS:
        if session.stored_signature is None:
            raise ProtocolError("Trent has no stored signature for this session")
        claimed_S = session.stored_signature
    if claimed_S is None or claimed_S.n != session.n:
        raise LayoutMismatch("claimed signature must hold 3n qubits")
    inner = qotp_decrypt(session.key_a.segment("qotp_S"), claimed_S.s)
    expected = eprime_encrypt(session.key_a.segment("eprime"), claimed_P)
    if compare_sequences(inner.block("S_prime"), expected, comparison_mode, rng, repetitions):
        return DisputeVerdict.ALICE_DISAVOWING
    return DisputeVerdict.BOB_FORGED


@dataclass
class BellTranscript:
    session: BellSession
    message: QubitSequence
    outcomes: list[BellIndex]
    signature: BellSignature
    y_b: QubitSequence
    y_tb: QubitSequence
    verdict: Verdict
    accept: int
    bob_message: QubitSequence
    bob_signature: BellSignature
    disputes: list[tuple[str, DisputeVerdict]] = field(default_factory=list)


def run_protocol(session: BellSession, message, rng: np.random.Generator,
                 comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                 repetitions: int = 1,
                 bob_pre_verify: Callable[[QubitSequence, BellSignature],
                                          tuple[QubitSequence, BellSignature]] | None = None,
                 tamper_y_tb: Callable[[QubitSequence], QubitSequence] | None = None) -> BellTranscript:
    """Sign and verify one message end to end.

    ``bob_pre_verify`` lets a dishonest Bob rewrite the pair he received
    before sending it to Trent; ``tamper_y_tb`` lets a dishonest Alice
    rewrite Trent's reply in transit.
    """
    signed = sign(session, message, rng)
    p, s = signed.plaintext_copy, signed.signature
    if bob_pre_verify is not None:
        p, s = bob_pre_verify(p, s)
    y_b = bob_prepare(session, s, p)
    verdict, y_tb = trent_verify(session, y_b, comparison_mode, rng, repetitions)
    if tamper_y_tb is not None:
        y_tb = tamper_y_tb(y_tb)
    bob = bob_verify(session, y_tb, signed.bob_remote, comparison_mode, rng, repetitions)
    return BellTranscript(
        session=session,
        message=signed.plaintext_copy,
        outcomes=signed.outcomes,
        signature=signed.signature,
        y_b=y_b,
        y_tb=y_tb,
        verdict=verdict,
        accept=bob.accept,
        bob_message=bob.message,
        bob_signature=bob.signature,
    )
