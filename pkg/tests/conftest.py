import math

import numpy as np
import pytest
from hypothesis import strategies as st

from aqsbench.qcore import PureQubit, make_qubit

# Literal matrices, deliberately not imported from the package under test.
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def mpow(m, k):
    return m if k else ID


def vec(q: PureQubit) -> np.ndarray:
    return np.array([q.amp0, q.amp1], dtype=complex)


def same_ray(u: np.ndarray, v: np.ndarray, tol=1e-9) -> bool:
    return abs(np.vdot(u, v)) >= 1 - tol


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def qubits(draw):
    """Arbitrary pure qubit: Bloch angles plus a global phase."""
    theta = draw(st.floats(0, math.pi))
    phi = draw(st.floats(0, 2 * math.pi))
    gamma = draw(st.floats(0, 2 * math.pi))
    g = complex(math.cos(gamma), math.sin(gamma))
    return make_qubit(g * math.cos(theta / 2), g * complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2))


bits = st.integers(0, 1)


def oracle_valid_pair(key_a_bits, n, p_seq, s_prime_seq) -> bool:
    """Brute-force check |<s'_i| E_K E'_K |p_i>| = 1 for the Bell protocol's key_a, with literal matrices."""
    eprime, qotp_s = key_a_bits[:n], key_a_bits[n:]
    for i in range(n):
        e1 = SZ if eprime[i] else SX
        kz, kx = qotp_s[4 * n + 2 * i], qotp_s[4 * n + 2 * i + 1]
        target = mpow(SX, kx) @ mpow(SZ, kz) @ e1 @ vec(p_seq[i])
        if not same_ray(vec(s_prime_seq[i]), target):
            return False
    return True


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
