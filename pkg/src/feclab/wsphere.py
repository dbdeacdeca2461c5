"""Weight-spectrum enumeration and code-weight sphere construction.

The sphere around the all-zero codeword collects every codeword whose weight
is at most the r-th smallest nonzero weight of the code, grouped into shells
of equal weight.  By linearity the neighborhood of any codeword is this set
translated by XOR, so it is computed once offline and reused for every search
center.

Enumeration walks all 2^K codewords in blocks: the low `min(K, 20)` message
bits are expanded once into a table (built by repeated doubling, one row XOR
per new entry), and the remaining high bits are walked in Gray-code order so
each outer step XORs exactly one generator row into the running block center.
Block tallies are plain bincounts and merge associatively, so blocks may be
processed in any order or in parallel.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from feclab.binlin import BitVector, num_words, popcount_words, unpack_bits
from feclab.codebook import LinearCode

ENUM_DIM_LIMIT = 30
_BLOCK_BITS = 20
_MAGIC = b"CWS1"
_CHECKSUM_BYTES = 8


class SphereFormatError(ValueError):
    """Raised when a sphere file is malformed or fails its checksum."""


@dataclass(eq=False)
class WeightSpectrum:
    """Sorted (weight, count) pairs of a code; weight 0 always has count 1.

    When built with a weight cap, codewords above the cap are aggregated into
    `overflow` and `entries` only covers weights <= cap.
    """

    dimension: int
    entries: list
    weight_cap: int | None = None
    overflow: int = 0

    def __post_init__(self):
        if not self.entries or self.entries[0] != (0, 1):
            raise ValueError("spectrum must start with weight 0, count 1")
        weights = [w for w, _ in self.entries]
        if weights != sorted(set(weights)):
            raise ValueError("weights must be strictly increasing")
        total = sum(c for _, c in self.entries) + self.overflow
        if total != 1 << self.dimension:
            raise ValueError("spectrum counts do not sum to 2^K")

    @property
    def max_shell_index(self) -> int:
        """Largest usable radius index L (number of nonzero shells seen)."""
        return len(self.entries) - 1

    def weight_at(self, shell_index: int) -> int:
        return self.entries[shell_index][0]

    def count_at(self, shell_index: int) -> int:
        return self.entries[shell_index][1]


@dataclass(eq=False)
class CodeWeightSphere:
    """All codewords within the r-th smallest nonzero weight of zero,
    stored shell-major (weight ascending, lexicographic within a shell).

    Member 0 is always the zero codeword; candidate scans use the cached
    concatenated supports of the nonzero members.  `size` counts the zero
    codeword, `nonzero_size` does not.
    """

    n: int
    k: int
    radius_index: int
    shell_weights: np.ndarray
    shell_counts: np.ndarray
    member_words: np.ndarray   # (size, W) uint64, zero codeword first
    member_weights: np.ndarray
    support_cat: np.ndarray = field(repr=False)   # nonzero members only
    support_off: np.ndarray = field(repr=False)
    mean_nonzero_weight: float = 0.0

    @property
    def size(self) -> int:
        return self.member_words.shape[0]

    @property
    def nonzero_size(self) -> int:
        return self.size - 1

    def member(self, i: int) -> BitVector:
        return BitVector(self.n, self.member_words[i])

    def member_support(self, i: int) -> np.ndarray:
        """Support indices of nonzero member i (i >= 1)."""
        if i < 1:
            raise IndexError("member 0 is the zero codeword (empty support)")
        return self.support_cat[self.support_off[i - 1]:self.support_off[i]]

    def shell_table(self) -> list:
        return list(zip(self.shell_weights.tolist(), self.shell_counts.tolist()))


def _low_table(row_words: np.ndarray, bits: int, width: int) -> np.ndarray:
    """Codewords of all 2^bits combinations of the first rows, index bit i
    selecting row i, built by doubling (one vectorized XOR per row)."""
    table = np.zeros((1, width), dtype=np.uint64)
    for i in range(bits):
        table = np.concatenate([table, table ^ row_words[i]], axis=0)
    return table


def _gray_flip_positions(count: int):
    """Bit flipped at each step of a reflected Gray walk of `count` steps."""
    for t in range(1, count):
        yield (t & -t).bit_length() - 1


def _enumerate_blocks(code: LinearCode):
    """Yield (center_words, low_table) covering all 2^K codewords as
    {center XOR t : t in low_table} per block."""
    k = code.k
    width = num_words(code.n)
    rows = code.generator.words
    low_bits = min(k, _BLOCK_BITS)
    table = _low_table(rows, low_bits, width)
    center = np.zeros(width, dtype=np.uint64)
    yield center, table
    high = k - low_bits
    if high:
        for flip in _gray_flip_positions(1 << high):
            center = center ^ rows[low_bits + flip]
            yield center, table


def _check_enum_budget(code: LinearCode) -> None:
    if code.k > ENUM_DIM_LIMIT:
        raise ValueError(
            f"K = {code.k} exceeds the enumeration budget of {ENUM_DIM_LIMIT}; "
            "use a weight_cap together with shell collection on a smaller subcode")


def enumerate_spectrum(code: LinearCode, weight_cap: int | None = None) -> WeightSpectrum:
    """Tally the Hamming weights of all 2^K codewords.

    Visits the message space in blocks built by a Gray-code walk (one row XOR
    per block step) and a doubling table for the low bits; each codeword
    costs one packed XOR plus one population count.
    """
    _check_enum_budget(code)
    tally = np.zeros(code.n + 1, dtype=np.int64)
    for center, table in _enumerate_blocks(code):
        weights = popcount_words(table ^ center)
        tally += np.bincount(weights, minlength=code.n + 1)
    entries = [(int(w), int(c)) for w, c in enumerate(tally) if c]
    overflow = 0
    if weight_cap is not None:
        kept = [(w, c) for w, c in entries if w <= weight_cap]
        overflow = sum(c for w, c in entries if w > weight_cap)
        entries = kept
    return WeightSpectrum(code.k, entries, weight_cap=weight_cap, overflow=overflow)


def build_sphere(code: LinearCode, r: int) -> CodeWeightSphere:
    """Collect every codeword of weight <= d_r (the r-th smallest nonzero
    weight), grouped into shells; deterministic member order."""
    _check_enum_budget(code)
    spectrum = enumerate_spectrum(code)
    if r < 0 or r > spectrum.max_shell_index:
        raise ValueError(
            f"radius index {r} exceeds the {spectrum.max_shell_index} available shells")
    d_r = spectrum.weight_at(r)

    collected_words = []
    collected_weights = []
    for center, table in _enumerate_blocks(code):
        block = table ^ center
        weights = popcount_words(block)
        keep = weights <= d_r
        if keep.any():
            collected_words.append(block[keep])
            collected_weights.append(weights[keep])
    words = np.concatenate(collected_words, axis=0)
    weights = np.concatenate(collected_weights)

    # Shell-major order: weight ascending, then packed words ascending
    # (word 0 is the most significant sort key).
    keys = tuple(words[:, w] for w in reversed(range(words.shape[1]))) + (weights,)
    order = np.lexsort(keys)
    words = np.ascontiguousarray(words[order])
    weights = weights[order]

    shell_weights = spectrum.entries[:r + 1]
    return _assemble_sphere(code.n, code.k, r,
                            np.array([w for w, _ in shell_weights], dtype=np.int64),
                            np.array([c for _, c in shell_weights], dtype=np.int64),
                            words, weights)


def _assemble_sphere(n, k, r, shell_weights, shell_counts, words, weights) -> CodeWeightSphere:
    if weights[0] != 0:
        raise ValueError("sphere must contain the zero codeword")
    bits = unpack_bits(words[1:], n)
    rows, cols = np.nonzero(bits)
    if not np.array_equal(np.bincount(rows, minlength=words.shape[0] - 1),
                          weights[1:]):
        raise ValueError("support extraction inconsistent with member weights")
    off = np.concatenate([[0], np.cumsum(weights[1:])]).astype(np.int64)
    wbar = float(weights[1:].mean()) if words.shape[0] > 1 else 0.0
    words = np.ascontiguousarray(words)
    words.flags.writeable = False
    return CodeWeightSphere(
        n=n, k=k, radius_index=r,
        shell_weights=shell_weights, shell_counts=shell_counts,
        member_words=words, member_weights=weights.astype(np.int64),
        support_cat=cols.astype(np.int64), support_off=off,
        mean_nonzero_weight=wbar)


def translate_member(center: BitVector, s: BitVector) -> BitVector:
    """Affine translation center XOR s; maps the zero-centered sphere onto
    the sphere around `center`."""
    return center ^ s


def save_sphere(sphere: CodeWeightSphere, path) -> None:
    """Bit-exact persistence.  Layout: magic 'CWS1'; u32 LE header fields
    (N, K, r, shell_count); per shell u32 LE (weight, count); member words
    packed little-endian, shell-major; 8-byte BLAKE2b checksum trailer over
    all preceding bytes."""
    parts = [_MAGIC,
             struct.pack("<IIII", sphere.n, sphere.k, sphere.radius_index,
                         len(sphere.shell_weights))]
    for w, c in zip(sphere.shell_weights, sphere.shell_counts):
        parts.append(struct.pack("<II", int(w), int(c)))
    parts.append(sphere.member_words.astype("<u8").tobytes())
    blob = b"".join(parts)
    digest = hashlib.blake2b(blob, digest_size=_CHECKSUM_BYTES).digest()
    with open(path, "wb") as fh:
        fh.write(blob + digest)


def load_sphere(path) -> CodeWeightSphere:
    """Load and verify a sphere file written by save_sphere."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(_MAGIC) + 16 + _CHECKSUM_BYTES:
        raise SphereFormatError("file truncated: too short for header")
    if raw[:4] != _MAGIC:
        raise SphereFormatError(f"bad magic {raw[:4]!r}, expected {_MAGIC!r}")
    body, digest = raw[:-_CHECKSUM_BYTES], raw[-_CHECKSUM_BYTES:]
    if hashlib.blake2b(body, digest_size=_CHECKSUM_BYTES).digest() != digest:
        raise SphereFormatError("checksum mismatch: file corrupted")
    n, k, r, shell_count = struct.unpack("<IIII", body[4:20])
    pos = 20
    shell_weights = np.zeros(shell_count, dtype=np.int64)
    shell_counts = np.zeros(shell_count, dtype=np.int64)
    for i in range(shell_count):
        if pos + 8 > len(body):
            raise SphereFormatError("file truncated inside shell table")
        shell_weights[i], shell_counts[i] = struct.unpack("<II", body[pos:pos + 8])
        pos += 8
    total = int(shell_counts.sum())
    width = num_words(n)
    expected = total * width * 8
    if len(body) - pos != expected:
        raise SphereFormatError(
            f"payload is {len(body) - pos} bytes, expected {expected}")
    words = np.frombuffer(body[pos:], dtype="<u8").astype(np.uint64).reshape(total, width)
    weights = popcount_words(words)
    declared = np.repeat(shell_weights, shell_counts)
    if not np.array_equal(weights, declared):
        raise SphereFormatError("member weights disagree with shell table")
    return _assemble_sphere(int(n), int(k), int(r), shell_weights, shell_counts,
                            words, weights)
