import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aqsbench.errors import KeyLengthMismatch, LayoutMismatch
from aqsbench.qcore import MINUS, ONE, PAULIS, PLUS, ZERO, XZ, apply_pauli, density, equal_up_to_phase, random_qubit
from aqsbench.qotp import (
    BitKey,
    QubitSequence,
    eprime_decrypt,
    eprime_encrypt,
    qotp_decrypt,
    qotp_encrypt,
)

from conftest import SX, SZ, bits, mpow, qubits, same_ray, vec


def seq(*qs):
    return QubitSequence.of(qs)


# -- containers -----------------------------------------------------------------

def test_bitkey_layout_and_segments():
    key = BitKey.from_segments([("eprime", [1, 0]), ("qotp", [0, 1, 1, 1])])
    assert key.layout == {"eprime": (0, 2), "qotp": (2, 6)}
    assert key.segment("qotp") == (0, 1, 1, 1)


def test_bitkey_rejects_bad_layout():
    with pytest.raises(LayoutMismatch):
        BitKey((0, 1, 1), {"a": (0, 1), "b": (2, 3)})
    with pytest.raises(LayoutMismatch):
        BitKey((0, 1), {"a": (0, 2), "b": (1, 2)})
    with pytest.raises(ValueError):
        BitKey((0, 2))


def test_bitkey_random_is_deterministic():
    a = BitKey.random([("x", 10)], np.random.default_rng(3))
    b = BitKey.random([("x", 10)], np.random.default_rng(3))
    assert a == b


def test_qubit_sequence_join_and_blocks():
    s = QubitSequence.join([("A", [ZERO, ONE]), ("B", [PLUS])])
    inner = QubitSequence.join([(None, s), ("C", [MINUS])])
    assert inner.layout == {"A": (0, 2), "B": (2, 3), "C": (3, 4)}
    assert list(inner.block("B")) == [PLUS]
    assert inner.block("A", "B").layout == {"A": (0, 2), "B": (2, 3)}
    assert list(inner.with_block("C", [ZERO]).block("C")) == [ZERO]
    with pytest.raises(LayoutMismatch):
        inner.block("A", "C")
    with pytest.raises(LayoutMismatch):
        inner.block("nope")
    with pytest.raises(LayoutMismatch):
        inner.with_block("A", [ZERO])


# -- QOTP -------------------------------------------------------------------------

def test_qotp_examples():
    q = random_qubit(np.random.default_rng(0))
    assert list(qotp_encrypt([0, 0], seq(q))) == [q]
    assert list(qotp_encrypt([0, 1], seq(ZERO))) == [ONE]
    assert equal_up_to_phase(qotp_encrypt([1, 0], seq(PLUS))[0], MINUS)


def test_qotp_decrypt_examples():
    assert equal_up_to_phase(qotp_decrypt([1, 1], seq(apply_pauli(XZ, ZERO)))[0], ZERO)
    q = random_qubit(np.random.default_rng(1))
    assert list(qotp_decrypt([0, 0], seq(q))) == [q]


def test_qotp_length_checks():
    with pytest.raises(KeyLengthMismatch):
        qotp_encrypt([0], seq(ZERO))
    with pytest.raises(KeyLengthMismatch):
        qotp_decrypt([0, 0, 0], seq(ZERO))
    with pytest.raises(KeyLengthMismatch):
        eprime_encrypt([0, 0], seq(ZERO))


def test_qotp_preserves_layout():
    s = QubitSequence.join([("A", [ZERO]), ("B", [ONE])])
    assert qotp_encrypt([1, 1, 0, 1], s).layout == s.layout


@settings(max_examples=200)
@given(qs=st.lists(qubits(), min_size=1, max_size=4), data=st.data())
def test_qotp_matches_matrix_oracle(qs, data):
    key = data.draw(st.lists(bits, min_size=2 * len(qs), max_size=2 * len(qs)))
    ct = qotp_encrypt(key, QubitSequence.of(qs))
    for i, q in enumerate(qs):
        # 1-based k^(2i-1) drives sigma_z, k^(2i) drives sigma_x
        k_z, k_x = key[2 * i], key[2 * i + 1]
        expected = mpow(SX, k_x) @ mpow(SZ, k_z) @ vec(q)
        assert np.allclose(vec(ct[i]), expected, atol=1e-15)
        back = mpow(SZ, k_z) @ mpow(SX, k_x) @ vec(ct[i])
        assert np.allclose(vec(qotp_decrypt(key, ct)[i]), back, atol=1e-15)


def test_qotp_round_trip_1000(rng):
    worst = 0.0
    for _ in range(1000):
        q = random_qubit(rng)
        key = [int(b) for b in rng.integers(0, 2, size=2)]
        out = qotp_decrypt(key, qotp_encrypt(key, seq(q)))[0]
        worst = max(worst, 1 - abs(np.vdot(vec(out), vec(q))) ** 2)
    assert worst < 1e-9


@settings(max_examples=100)
@given(q=qubits())
def test_qotp_key_average_is_maximally_mixed(q):
    rho = sum(density(qotp_encrypt(list(k), seq(q))[0]) for k in itertools.product((0, 1), repeat=2)) / 4
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-9)


# -- E' ---------------------------------------------------------------------------

def test_eprime_examples():
    assert list(eprime_encrypt([0], seq(ZERO))) == [ONE]
    assert equal_up_to_phase(eprime_encrypt([1], seq(PLUS))[0], MINUS)
    assert list(eprime_decrypt([0], seq(ONE))) == [ZERO]
    assert equal_up_to_phase(eprime_decrypt([1], seq(MINUS))[0], PLUS)


@settings(max_examples=100)
@given(qs=st.lists(qubits(), min_size=1, max_size=4), data=st.data())
def test_eprime_round_trip(qs, data):
    key = data.draw(st.lists(bits, min_size=len(qs), max_size=len(qs)))
    s = QubitSequence.of(qs)
    twice = eprime_encrypt(key, eprime_encrypt(key, s))
    back = eprime_decrypt(key, eprime_encrypt(key, s))
    for a, b, q in zip(twice, back, qs):
        assert equal_up_to_phase(a, q) and equal_up_to_phase(b, q)


@settings(max_examples=300)
@given(q=qubits(), u=st.sampled_from(PAULIS), k1=bits, k2=bits, b=bits)
def test_commutation_transfer(q, u, k1, k2, b):
    """U then (E o E') equals (E o E') then U, up to phase."""
    def enc(x):
        return qotp_encrypt([k1, k2], eprime_encrypt([b], seq(x)))[0]

    lhs = enc(apply_pauli(u, q))
    rhs = apply_pauli(u, enc(q))
    assert same_ray(vec(lhs), vec(rhs))
