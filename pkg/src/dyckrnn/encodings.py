"""Stack-slot encodings of bracket symbols.

Two codebooks: one-hot (slot width k) and binary-with-negation (slot width
3*ceil(log2 k) - 1).  The binary codeword for bracket i is the ceil(log2 k)-bit
expansion of i-1 (least-significant bit first), concatenated with its bitwise
negation and a constant tail.  The tail is +1s for the simple RNN, whose
hidden units only take values in {0, 1}, and -1s for the LSTM, whose cell
units can hold -1; the -1 tail makes every codeword's coordinate sum exactly
1, which the LSTM gates rely on.  The all-zero vector is reserved for an
empty slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .automaton import DyckParams

ONEHOT = "onehot"
BINARY = "binary"

ARCH_SIMPLE = "simple"
ARCH_LSTM = "lstm"
ARCH_NAIVE = "naive"


def log2_ceil(k: int) -> int:
    return max(1, math.ceil(math.log2(k)))


def slot_width(kind: str, k: int) -> int:
    if kind == ONEHOT:
        return k
    if kind == BINARY:
        return 3 * log2_ceil(k) - 1
    raise ValueError(f"unknown encoding kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Encoding:
    """A codebook mapping bracket indices 1..k to slot vectors."""

    kind: str
    k: int
    architecture: str
    codebook: np.ndarray = field(repr=False)  # (slot_width, k), column i-1 = bracket i

    @property
    def width(self) -> int:
        return self.codebook.shape[0]

    def codeword(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.k:
            raise ValueError(f"bracket index {i} out of 1..{self.k}")
        return self.codebook[:, i - 1].copy()

    def decode_slot(self, vec: np.ndarray, tol: float = 1e-9) -> int | None:
        """Bracket index of a slot vector, None for the empty (zero) slot.

        Raises ValueError when the vector matches neither any codeword nor
        zero within the per-coordinate tolerance.
        """
        if np.abs(vec).max(initial=0.0) <= tol:
            return None
        errs = np.abs(self.codebook - vec[:, None]).max(axis=0)
        hits = np.flatnonzero(errs <= tol)
        if hits.size != 1:
            raise ValueError(f"slot vector {vec} is outside the codebook")
        return int(hits[0]) + 1


def build_encoding(params: DyckParams, kind: str,
                   architecture: str = ARCH_SIMPLE) -> Encoding:
    """Construct the codebook for one architecture.

    Binary-negated encodings require k > 1; one-hot covers k = 1.
    """
    k = params.k
    if kind == ONEHOT:
        return Encoding(ONEHOT, k, architecture, np.eye(k))
    if kind != BINARY:
        raise ValueError(f"unknown encoding kind {kind!r}")
    if k == 1:
        raise ValueError("binary encoding requires k > 1; use onehot for k = 1")
    if architecture not in (ARCH_SIMPLE, ARCH_LSTM):
        raise ValueError(f"binary encoding is defined for simple/lstm, not {architecture!r}")
    bits_n = log2_ceil(k)
    bits = ((np.arange(k)[None, :] >> np.arange(bits_n)[:, None]) & 1).astype(float)
    tail_sign = 1.0 if architecture == ARCH_SIMPLE else -1.0
    tail = np.full((bits_n - 1, k), tail_sign)
    codebook = np.concatenate([bits, 1.0 - bits, tail], axis=0)
    return Encoding(BINARY, k, architecture, codebook)
