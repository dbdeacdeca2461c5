"""Packed GF(2) vectors and matrices.

The bit layout is fixed so that serialized values are portable: bit j of a
vector is stored in bit (j mod 64) of 64-bit word j // 64, with words ordered
low index first (little-endian within each word).  All values are immutable
after construction and every operation is a pure function, so they can be
shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WORD_BITS = 64
MAX_LENGTH = 1 << 16  # lengths beyond this are out of contract
_WORD_LE = np.dtype("<u8")


def num_words(length: int) -> int:
    """Number of 64-bit words needed for `length` bits."""
    return (length + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array (last axis = bits) into uint64 words.

    Accepts 1-D or 2-D input; the packed word axis replaces the bit axis.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    pad = (-n) % WORD_BITS
    if pad:
        pad_block = np.zeros(bits.shape[:-1] + (pad,), dtype=np.uint8)
        bits = np.concatenate([bits, pad_block], axis=-1)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view(_WORD_LE).astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, length: int) -> np.ndarray:
    """Inverse of pack_bits; returns a 0/1 uint8 array of `length` bits."""
    raw = np.ascontiguousarray(words, dtype=np.uint64).astype(_WORD_LE, copy=False)
    if raw.size == 0:
        return np.zeros(raw.shape[:-1] + (length,), dtype=np.uint8)
    bits = np.unpackbits(raw.view(np.uint8).reshape(raw.shape[:-1] + (-1,)),
                         axis=-1, bitorder="little")
    return bits[..., :length]


def popcount_words(words: np.ndarray) -> np.ndarray:
    """Per-row population count of a (..., W) uint64 array."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def _check_tail(words: np.ndarray, length: int) -> None:
    tail = length % WORD_BITS
    if tail and (int(words[..., -1].max() if words.ndim > 1 else words[-1]) >> tail):
        raise ValueError("bits set beyond declared length")


@dataclass(eq=False)
class BitVector:
    """Immutable packed bit vector over GF(2)."""

    length: int
    words: np.ndarray

    def __post_init__(self):
        if not 1 <= self.length <= MAX_LENGTH:
            raise ValueError(f"length {self.length} out of range [1, {MAX_LENGTH}]")
        words = np.ascontiguousarray(self.words, dtype=np.uint64)
        if words.shape != (num_words(self.length),):
            raise ValueError("word count does not match length")
        _check_tail(words, self.length)
        words.flags.writeable = False
        object.__setattr__(self, "words", words)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros(num_words(length), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("from_bits expects a 1-D array")
        return cls(len(bits), pack_bits(bits))

    @classmethod
    def from_support(cls, indices, length: int) -> "BitVector":
        bits = np.zeros(length, dtype=np.uint8)
        bits[np.asarray(indices, dtype=np.int64)] = 1
        return cls(length, pack_bits(bits))

    @classmethod
    def unit(cls, index: int, length: int) -> "BitVector":
        return cls.from_support([index], length)

    def bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.length)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.bits())

    def weight(self) -> int:
        return int(popcount_words(self.words))

    def sort_key(self) -> tuple:
        """Deterministic ordering key: packed words ascending, word 0 first."""
        return tuple(int(w) for w in self.words)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        shown = "".join(str(b) for b in self.bits()[:32])
        dots = "..." if self.length > 32 else ""
        return f"BitVector({self.length}, {shown}{dots})"


@dataclass(eq=False)
class BitMatrix:
    """Immutable packed bit matrix over GF(2), rows stored word-packed."""

    rows: int
    cols: int
    words: np.ndarray  # shape (rows, num_words(cols))

    def __post_init__(self):
        if self.rows < 1 or not 1 <= self.cols <= MAX_LENGTH:
            raise ValueError("invalid matrix shape")
        words = np.ascontiguousarray(self.words, dtype=np.uint64)
        if words.shape != (self.rows, num_words(self.cols)):
            raise ValueError("word array does not match declared shape")
        _check_tail(words, self.cols)
        words.flags.writeable = False
        object.__setattr__(self, "words", words)

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("from_bits expects a 2-D array")
        return cls(bits.shape[0], bits.shape[1], pack_bits(bits))

    @classmethod
    def from_rows(cls, rows) -> "BitMatrix":
        rows = list(rows)
        cols = rows[0].length
        if any(r.length != cols for r in rows):
            raise ValueError("rows differ in length")
        return cls(len(rows), cols, np.stack([r.words for r in rows]))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_bits(np.eye(n, dtype=np.uint8))

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.words[i])

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and bool(
            np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))


def mat_vec_mul(v: BitVector, g: BitMatrix) -> BitVector:
    """Row-combination product v * G over GF(2).

    Equals the XOR of the rows of G selected by the support of v.
    """
    if v.length != g.rows:
        raise ValueError(f"dimension mismatch: vector length {v.length}, matrix rows {g.rows}")
    supp = v.support()
    if supp.size == 0:
        return BitVector.zeros(g.cols)
    acc = np.bitwise_xor.reduce(g.words[supp], axis=0)
    return BitVector(g.cols, acc)


def hamming_weight(v: BitVector) -> int:
    return v.weight()


def hamming_distance(a: BitVector, b: BitVector) -> int:
    if a.length != b.length:
        raise ValueError("length mismatch")
    return int(popcount_words(a.words ^ b.words))


def row_reduce(g: BitMatrix, column_order=None):
    """Gauss-Jordan elimination over GF(2), visiting columns in `column_order`.

    Dependent columns are skipped and elimination continues with the next
    column in the order, so the pivot set is the first maximal independent
    column subset met along the order.  The returned matrix spans the same
    row space as the input (zero rows, if any, sit at the bottom), pivot
    columns carry an identity submatrix, and `rank` pivots are reported.

    Returns (reduced: BitMatrix, pivot_columns: list[int], rank: int).
    """
    if column_order is None:
        column_order = range(g.cols)
    order = [int(c) for c in column_order]
    if sorted(order) != list(range(g.cols)):
        raise ValueError("column_order must be a permutation of 0..cols-1")

    work = g.words.copy()
    rank = 0
    pivots: list[int] = []
    for col in order:
        w, b = divmod(col, WORD_BITS)
        shift = np.uint64(b)
        colbits = (work[rank:, w] >> shift) & np.uint64(1)
        hits = np.nonzero(colbits)[0]
        if hits.size == 0:
            continue
        p = rank + int(hits[0])
        if p != rank:
            work[[rank, p]] = work[[p, rank]]
        mask = ((work[:, w] >> shift) & np.uint64(1)).astype(bool)
        mask[rank] = False
        if mask.any():
            work[mask] ^= work[rank]
        pivots.append(col)
        rank += 1
        if rank == g.rows:
            break
    return BitMatrix(g.rows, g.cols, work), pivots, rank
