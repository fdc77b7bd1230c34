"""Quantum one-time pad and the one-bit-per-qubit Pauli cipher.

Key bits are stored 0-based.  The textbook statement uses 1-based bits
``k^(2i-1)`` (phase flip) and ``k^(2i)`` (bit flip) for qubit ``i``; those
live at storage positions ``2i-2`` and ``2i-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import KeyLengthMismatch, LayoutMismatch
from .qcore import X, Z, PauliOp, PureQubit, apply_pauli, pauli


def _check_layout(layout: Mapping[str, tuple[int, int]], length: int, what: str):
    spans = sorted(layout.values())
    pos = 0
    for start, stop in spans:
        if start != pos or stop < start:
            raise LayoutMismatch(f"{what} layout {dict(layout)} does not tile [0, {length})")
        pos = stop
    if pos != length:
        raise LayoutMismatch(f"{what} layout {dict(layout)} does not tile [0, {length})")


def _layout_from_lengths(segments: Iterable[tuple[str, int]]) -> dict[str, tuple[int, int]]:
    layout, pos = {}, 0
    for name, n in segments:
        if name in layout:
            raise LayoutMismatch(f"duplicate segment {name!r}")
        layout[name] = (pos, pos + n)
        pos += n
    return layout


@dataclass(frozen=True)
class BitKey:
    """A classical key with named, disjoint segments covering every bit."""

    bits: tuple[int, ...]
    layout: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("key bits must be 0 or 1")
        layout = dict(self.layout) if self.layout else {"all": (0, len(self.bits))}
        _check_layout(layout, len(self.bits), "key")
        object.__setattr__(self, "layout", layout)

    @classmethod
    def from_segments(cls, segments: Sequence[tuple[str, Sequence[int]]]) -> BitKey:
        layout = _layout_from_lengths((name, len(bits)) for name, bits in segments)
        return cls(tuple(b for _, bits in segments for b in bits), layout)

    @classmethod
    def random(cls, segments: Sequence[tuple[str, int]], rng: np.random.Generator) -> BitKey:
        layout = _layout_from_lengths(segments)
        total = sum(n for _, n in segments)
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=total)), layout)

    @classmethod
    def zeros(cls, segments: Sequence[tuple[str, int]]) -> BitKey:
        return cls.from_segments([(name, [0] * n) for name, n in segments])

    def segment(self, name: str) -> tuple[int, ...]:
        start, stop = self.layout[name]
        return self.bits[start:stop]

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class QubitSequence:
    """Ordered product state with a named sub-range layout (e.g. ``M_A | S_prime``)."""

    qubits: tuple[PureQubit, ...]
    layout: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        layout = dict(self.layout) if self.layout else ({"all": (0, len(self.qubits))} if self.qubits else {})
        _check_layout(layout, len(self.qubits), "qubit")
        object.__setattr__(self, "layout", layout)

    @classmethod
    def of(cls, qubits: Iterable[PureQubit], name: str = "all") -> QubitSequence:
        qubits = tuple(qubits)
        return cls(qubits, {name: (0, len(qubits))} if qubits else {})

    @classmethod
    def join(cls, parts: Sequence[tuple[str | None, QubitSequence | Sequence[PureQubit]]]) -> QubitSequence:
        """Concatenate blocks.  A ``None`` name keeps the part's own layout names."""
        qubits: list[PureQubit] = []
        layout: dict[str, tuple[int, int]] = {}
        for name, part in parts:
            offset = len(qubits)
            if name is None:
                if not isinstance(part, QubitSequence):
                    raise LayoutMismatch("unnamed parts must carry their own layout")
                entries = part.layout.items()
            else:
                entries = [(name, (0, len(part)))]
            for key, (start, stop) in entries:
                if key in layout:
                    raise LayoutMismatch(f"duplicate block {key!r}")
                layout[key] = (start + offset, stop + offset)
            qubits.extend(part)
        return cls(tuple(qubits), layout)

    def __len__(self):
        return len(self.qubits)

    def __iter__(self) -> Iterator[PureQubit]:
        return iter(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    @property
    def names(self) -> list[str]:
        return sorted(self.layout, key=lambda k: self.layout[k])

    def span(self, *names: str) -> tuple[int, int]:
        """Index range covered by contiguous blocks ``names`` (in layout order)."""
        try:
            spans = sorted(self.layout[n] for n in names)
        except KeyError as exc:
            raise LayoutMismatch(f"no block {exc.args[0]!r} in layout {self.names}") from None
        for (_, stop), (start, _) in zip(spans, spans[1:]):
            if stop != start:
                raise LayoutMismatch(f"blocks {names} are not contiguous")
        return spans[0][0], spans[-1][1]

    def block(self, *names: str) -> QubitSequence:
        """Sub-sequence for one or more contiguous blocks, keeping their names."""
        start, stop = self.span(*names)
        return QubitSequence(self.qubits[start:stop],
                             {n: (self.layout[n][0] - start, self.layout[n][1] - start) for n in names})

    def with_block(self, name: str, qubits: Sequence[PureQubit]) -> QubitSequence:
        start, stop = self.span(name)
        if len(qubits) != stop - start:
            raise LayoutMismatch(f"block {name!r} holds {stop - start} qubits, got {len(qubits)}")
        return QubitSequence(self.qubits[:start] + tuple(qubits) + self.qubits[stop:], self.layout)

    def relabel(self, name: str) -> QubitSequence:
        return QubitSequence.of(self.qubits, name)

    def expect_layout(self, blocks: Sequence[tuple[str, int]], what: str = "wire"):
        expected = _layout_from_lengths(blocks)
        if dict(self.layout) != expected:
            raise LayoutMismatch(f"{what} layout {dict(self.layout)} != expected {expected}")


def _map(ops: Sequence[PauliOp], msg: QubitSequence, reverse_order: bool = False) -> QubitSequence:
    out = []
    for op, q in zip(ops, msg):
        if reverse_order:
            # z^k1 x^k2: x first, then z
            q = apply_pauli(pauli(op.x, 0), q)
            q = apply_pauli(pauli(0, op.z), q)
        else:
            q = apply_pauli(op, q)
        out.append(q)
    return QubitSequence(tuple(out), msg.layout)


def qotp_ops(key_segment: Sequence[int]) -> list[PauliOp]:
    """Per-qubit encryption operator ``sigma_x**k(2i) sigma_z**k(2i-1)``."""
    return [pauli(key_segment[2 * i + 1], key_segment[2 * i])
            for i in range(len(key_segment) // 2)]


def eprime_ops(key_segment: Sequence[int]) -> list[PauliOp]:
    """Bit 0 selects sigma_x, bit 1 selects sigma_z."""
    return [Z if int(b) else X for b in key_segment]


def _as_seq(msg) -> QubitSequence:
    return msg if isinstance(msg, QubitSequence) else QubitSequence.of(msg)


def qotp_encrypt(key_segment: Sequence[int], msg: QubitSequence) -> QubitSequence:
    msg = _as_seq(msg)
    if len(key_segment) != 2 * len(msg):
        raise KeyLengthMismatch(f"QOTP needs {2 * len(msg)} key bits, got {len(key_segment)}")
    return _map(qotp_ops(key_segment), msg)


def qotp_decrypt(key_segment: Sequence[int], ct: QubitSequence) -> QubitSequence:
    ct = _as_seq(ct)
    if len(key_segment) != 2 * len(ct):
        raise KeyLengthMismatch(f"QOTP needs {2 * len(ct)} key bits, got {len(key_segment)}")
    return _map(qotp_ops(key_segment), ct, reverse_order=True)


def eprime_encrypt(key_segment: Sequence[int], msg: QubitSequence) -> QubitSequence:
    msg = _as_seq(msg)
    if len(key_segment) != len(msg):
        raise KeyLengthMismatch(f"E' needs {len(msg)} key bits, got {len(key_segment)}")
    return _map(eprime_ops(key_segment), msg)


def eprime_decrypt(key_segment: Sequence[int], ct: QubitSequence) -> QubitSequence:
    # sigma_x and sigma_z are self-inverse
    return eprime_encrypt(key_segment, ct)
