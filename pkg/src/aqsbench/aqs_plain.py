"""Entanglement-free arbitrated quantum signature protocol.

Alice hides the message under a one-time mask (a fresh 2n-bit QOTP key),
then sends Bob ``S = E_AB(P', R_AB, S_A)`` where ``P'`` is the masked message,
``R_AB = E_AB(P')`` is Bob's check block and ``S_A = E_AT(P')`` is Trent's.

Key layouts::

    key_ab = R_seg[2n] | S_seg[6n]
    key_at = qotp[2n]
    key_bt = to_trent[4n] | to_bob[4n]
    r_mask = qotp[2n]            (chosen by Alice per signing)

Wire layouts::

    S           = P_prime[n] | R_AB[n] | S_A[n]   (under key_ab.S_seg)
    Y_B         = P_prime[n] | S_A[n]             (under key_bt.to_trent)
    Y_B return  = P_prime[n] | S_A[n]             (under key_bt.to_bob)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .aqs_bell import DisputeVerdict
from .errors import LayoutMismatch, LengthMismatch, ProtocolError
from .qcore import ComparisonMode, compare_sequences
from .qotp import BitKey, QubitSequence, qotp_decrypt, qotp_encrypt


def key_ab_segments(n: int) -> list[tuple[str, int]]:
    return [("R_seg", 2 * n), ("S_seg", 6 * n)]


def key_at_segments(n: int) -> list[tuple[str, int]]:
    return [("qotp", 2 * n)]


def key_bt_segments(n: int) -> list[tuple[str, int]]:
    return [("to_trent", 4 * n), ("to_bob", 4 * n)]


def mask_segments(n: int) -> list[tuple[str, int]]:
    return [("qotp", 2 * n)]


def s_blocks(n: int) -> list[tuple[str, int]]:
    return [("P_prime", n), ("R_AB", n), ("S_A", n)]


def y_b_blocks(n: int) -> list[tuple[str, int]]:
    return [("P_prime", n), ("S_A", n)]


@dataclass
class PlainSession:
    n: int
    key_ab: BitKey
    key_at: BitKey
    key_bt: BitKey
    r_mask: BitKey | None = None
    published: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name, key, segs in (("key_ab", self.key_ab, key_ab_segments),
                                ("key_at", self.key_at, key_at_segments),
                                ("key_bt", self.key_bt, key_bt_segments)):
            if dict(key.layout) != dict(BitKey.zeros(segs(self.n)).layout):
                raise LayoutMismatch(f"{name} layout {dict(key.layout)} does not match n={self.n}")

    def publish_mask(self) -> BitKey:
        """Alice reveals the mask once both verification bits are 1."""
        if self.r_mask is None:
            raise ProtocolError("nothing has been signed in this session")
        self.published = True
        return self.r_mask

    def require_published(self) -> BitKey:
        if not self.published or self.r_mask is None:
            raise ProtocolError("the mask has not been published yet")
        return self.r_mask


def init_plain_session(n: int, rng: np.random.Generator) -> PlainSession:
    if n < 1:
        raise ValueError("n must be >= 1")
    return PlainSession(
        n=n,
        key_ab=BitKey.random(key_ab_segments(n), rng),
        key_at=BitKey.random(key_at_segments(n), rng),
        key_bt=BitKey.random(key_bt_segments(n), rng),
    )


@dataclass(frozen=True)
class PlainSignedRecord:
    """What Bob keeps after acceptance: message, Trent's check block, and the mask bits."""

    P: QubitSequence
    S_A: QubitSequence
    r_mask: tuple[int, ...]

    def __post_init__(self):
        n = len(self.P)
        if len(self.S_A) != n or len(self.r_mask) != 2 * n:
            raise LayoutMismatch(
                f"record lengths P={n}, S_A={len(self.S_A)}, r_mask={len(self.r_mask)} are inconsistent")


def plain_sign(session: PlainSession, message, rng: np.random.Generator,
               r_mask: BitKey | None = None) -> QubitSequence:
    message = message if isinstance(message, QubitSequence) else QubitSequence.of(message)
    n = session.n
    if len(message) != n:
        raise LengthMismatch(f"message has {len(message)} qubits, session expects {n}")
    session.r_mask = r_mask if r_mask is not None else BitKey.random(mask_segments(n), rng)
    session.published = False
    mask = session.r_mask.segment("qotp")
    # three copies, each masked identically
    p1, p2, p3 = (qotp_encrypt(mask, message.relabel("P_prime")) for _ in range(3))
    r_ab = qotp_encrypt(session.key_ab.segment("R_seg"), p2)
    s_a = qotp_encrypt(session.key_at.segment("qotp"), p3)
    plain = QubitSequence.join([("P_prime", p1), ("R_AB", r_ab), ("S_A", s_a)])
    return qotp_encrypt(session.key_ab.segment("S_seg"), plain)


def plain_open(session: PlainSession, s_wire: QubitSequence) -> QubitSequence:
    """Bob's decryption of the signed wire with the shared Alice-Bob key."""
    s_wire.expect_layout(s_blocks(session.n), "S")
    return qotp_decrypt(session.key_ab.segment("S_seg"), s_wire)


def plain_seal(session: PlainSession, opened: QubitSequence) -> QubitSequence:
    opened.expect_layout(s_blocks(session.n), "S")
    return qotp_encrypt(session.key_ab.segment("S_seg"), opened)


def plain_trent_verify(session: PlainSession, y_b: QubitSequence,
                       comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                       rng: np.random.Generator | None = None,
                       repetitions: int = 1) -> tuple[int, QubitSequence | None]:
    """Trent checks ``S_A == E_AT(P')``; on success the pair goes back to Bob re-encrypted."""
    y_b.expect_layout(y_b_blocks(session.n), "Y_B")
    plain = qotp_decrypt(session.key_bt.segment("to_trent"), y_b)
    expected = qotp_encrypt(session.key_at.segment("qotp"), plain.block("P_prime"))
    v_t = int(compare_sequences(plain.block("S_A"), expected, comparison_mode, rng, repetitions))
    if not v_t:
        return 0, None
    return 1, qotp_encrypt(session.key_bt.segment("to_bob"), plain)


TrentRound = Callable[[QubitSequence], "tuple[int, QubitSequence | None]"]


class PlainBobResult(NamedTuple):
    v_b: int
    record: PlainSignedRecord | None
    v_t: int
    y_b: QubitSequence
    y_b_return: QubitSequence | None


def plain_bob_verify(session: PlainSession, s_wire: QubitSequence,
                     trent_round: TrentRound | None = None,
                     comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                     rng: np.random.Generator | None = None,
                     repetitions: int = 1) -> PlainBobResult:
    """Bob's side of verification, with Trent's round injected as a callable.

    ``trent_round`` receives Bob's ``Y_B`` and returns ``(V_T, Y_B return)``;
    it defaults to an honest :func:`plain_trent_verify`.  Wrapping it is how
    a dishonest Alice interferes with the return channel.
    """
    if trent_round is None:
        def trent_round(y):
            return plain_trent_verify(session, y, comparison_mode, rng, repetitions)

    opened = plain_open(session, s_wire)
    r_ab = opened.block("R_AB")
    forward = QubitSequence.join([("P_prime", opened.block("P_prime")), ("S_A", opened.block("S_A"))])
    y_b = qotp_encrypt(session.key_bt.segment("to_trent"), forward)
    v_t, y_ret = trent_round(y_b)
    if not v_t or y_ret is None:
        return PlainBobResult(0, None, int(v_t), y_b, y_ret)
    y_ret.expect_layout(y_b_blocks(session.n), "Y_B return")
    back = qotp_decrypt(session.key_bt.segment("to_bob"), y_ret)
    expected = qotp_encrypt(session.key_ab.segment("R_seg"), back.block("P_prime"))
    v_b = int(compare_sequences(r_ab, expected, comparison_mode, rng, repetitions))
    if not v_b:
        return PlainBobResult(0, None, 1, y_b, y_ret)
    mask = session.publish_mask().segment("qotp")
    p = qotp_decrypt(mask, back.block("P_prime")).relabel("P")
    record = PlainSignedRecord(p, back.block("S_A").relabel("S_A"), tuple(mask))
    return PlainBobResult(1, record, 1, y_b, y_ret)


def plain_resolve_dispute(session: PlainSession, record: PlainSignedRecord,
                          comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                          rng: np.random.Generator | None = None,
                          repetitions: int = 1) -> DisputeVerdict:
    if len(record.P) != session.n:
        raise LayoutMismatch(f"record holds {len(record.P)} qubits, session expects {session.n}")
    masked = qotp_encrypt(record.r_mask, record.P)
    expected = qotp_encrypt(session.key_at.segment("qotp"), masked)
    if compare_sequences(record.S_A, expected, comparison_mode, rng, repetitions):
        return DisputeVerdict.ALICE_DISAVOWING
    return DisputeVerdict.BOB_FORGED


@dataclass
class PlainTranscript:
    session: PlainSession
    message: QubitSequence
    s_wire: QubitSequence
    y_b: QubitSequence
    y_b_return: QubitSequence | None
    v_t: int
    v_b: int
    record: PlainSignedRecord | None
    disputes: list[tuple[str, DisputeVerdict]] = field(default_factory=list)

    @property
    def accept(self) -> int:
        return int(self.v_t == 1 and self.v_b == 1)


def run_plain_protocol(session: PlainSession, message, rng: np.random.Generator,
                       comparison_mode: ComparisonMode | str = ComparisonMode.ORACLE,
                       repetitions: int = 1,
                       bob_pre_verify: Callable[[QubitSequence], QubitSequence] | None = None,
                       tamper_return: Callable[[QubitSequence], QubitSequence] | None = None
                       ) -> PlainTranscript:
    """Sign and verify one message end to end.

    ``bob_pre_verify`` receives Bob's opened ``P_prime | R_AB | S_A`` blocks
    and returns replacements; ``tamper_return`` rewrites Trent's reply to Bob.
    """
    message = message if isinstance(message, QubitSequence) else QubitSequence.of(message)
    s_wire = plain_sign(session, message, rng)
    sent = s_wire
    if bob_pre_verify is not None:
        sent = plain_seal(session, bob_pre_verify(plain_open(session, s_wire)))

    def trent_round(y):
        v_t, y_ret = plain_trent_verify(session, y, comparison_mode, rng, repetitions)
        if y_ret is not None and tamper_return is not None:
            y_ret = tamper_return(y_ret)
        return v_t, y_ret

    res = plain_bob_verify(session, sent, trent_round, comparison_mode, rng, repetitions)
    return PlainTranscript(session, message.relabel("P"), s_wire, res.y_b, res.y_b_return,
                           res.v_t, res.v_b, res.record)
