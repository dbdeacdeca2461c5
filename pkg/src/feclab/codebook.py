"""Code constructions: CRC precoding, polar codes, Reed-Muller codes, and
CRC-concatenated codes exposed through a single effective generator.

Conventions fixed here:
  * CRC attachment is systematic, message first, MSB-first polynomial
    division, parity appended (crc_append(0) == 0).
  * Polar info bits are placed onto the info set in ascending index order
    with no interleaver; the precoded vector [message, parity] maps onto
    the K' most reliable positions.
  * Generator rows are stored in ascending info-set (or monomial) order so
    effective generators are deterministic and sphere files cacheable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from feclab.binlin import BitMatrix, BitVector, mat_vec_mul, pack_bits, row_reduce
from feclab.nr_sequence import NR_SEQUENCE_1024


@dataclass(eq=False)
class CrcSpec:
    """Cyclic redundancy check: degree and generator polynomial.

    `coefficients` holds the polynomial with the constant term first, so
    bit i is the coefficient of x**i; constant and leading terms must be 1.
    """

    degree: int
    coefficients: BitVector

    def __post_init__(self):
        if self.coefficients.length != self.degree + 1:
            raise ValueError("polynomial length must be degree + 1")
        bits = self.coefficients.bits()
        if bits[0] != 1 or bits[-1] != 1:
            raise ValueError("constant and leading coefficients must be 1")

    def poly_msb_first(self) -> np.ndarray:
        return self.coefficients.bits()[::-1].copy()


# Default 11-bit CRC, generator polynomial 1 + x^5 + x^9 + x^10 + x^11.
CRC11 = CrcSpec(11, BitVector.from_support([0, 5, 9, 10, 11], 12))


@dataclass(eq=False)
class ReliabilityOrder:
    """Permutation of 0..N-1 from least to most reliable position."""

    n: int
    ranked_indices: np.ndarray
    source: str

    def __post_init__(self):
        ranked = np.asarray(self.ranked_indices, dtype=np.int64)
        if sorted(ranked.tolist()) != list(range(self.n)):
            raise ValueError("ranked_indices must be a permutation of 0..N-1")
        ranked.flags.writeable = False
        object.__setattr__(self, "ranked_indices", ranked)

    def most_reliable(self, k: int) -> np.ndarray:
        """The k most reliable indices, returned in ascending index order."""
        return np.sort(self.ranked_indices[self.n - k:])


@dataclass(eq=False)
class LinearCode:
    """A binary linear block code held as a full-rank K x N generator.

    `kind` is one of 'generic', 'polar', 'reed_muller', 'crc_concatenated'.
    Polar codes carry their info set; CRC-concatenated codes carry the outer
    CRC and the inner code, and their generator is the effective K x N map
    message -> inner_encode(crc_append(message)).
    """

    n: int
    k: int
    generator: BitMatrix
    kind: str = "generic"
    info_set: tuple = ()
    rm_variables: int = 0
    rm_order: int = -1
    crc: CrcSpec | None = None
    inner: "LinearCode | None" = None
    _decode_pivots: np.ndarray = field(init=False, repr=False)
    _decode_mix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.generator.rows != self.k or self.generator.cols != self.n:
            raise ValueError("generator shape does not match (K, N)")
        if self.kind == "polar":
            if len(self.info_set) != self.k or self.n & (self.n - 1):
                raise ValueError("polar code needs |info_set| == K and N a power of two")
        if self.kind == "crc_concatenated":
            if self.inner is None or self.crc is None:
                raise ValueError("crc_concatenated code needs inner code and CRC spec")
            if self.inner.k != self.k + self.crc.degree:
                raise ValueError("inner dimension must be K + CRC degree")
        # One augmented reduction serves both the rank check and the inverse
        # map used by message_of: reduce [G | I_K], read pivots and the row
        # mix T with reduced = T G.
        aug_bits = np.concatenate([self.generator.to_bits(),
                                   np.eye(self.k, dtype=np.uint8)], axis=1)
        reduced, pivots, rank = row_reduce(
            BitMatrix.from_bits(aug_bits),
            list(range(self.n)) + list(range(self.n, self.n + self.k)))
        pivots = [p for p in pivots if p < self.n]
        if len(pivots) != self.k:
            raise ValueError(f"generator rank {len(pivots)} < K = {self.k}")
        red_bits = reduced.to_bits()
        object.__setattr__(self, "_decode_pivots", np.asarray(pivots, dtype=np.int64))
        object.__setattr__(self, "_decode_mix", pack_bits(red_bits[:, self.n:]))

    @property
    def rate(self) -> float:
        return self.k / self.n

    def message_of(self, codeword: BitVector) -> BitVector:
        """Invert encode(): recover the message of a valid codeword."""
        if codeword.length != self.n:
            raise ValueError("codeword length mismatch")
        coeffs = codeword.bits()[self._decode_pivots]
        sel = np.flatnonzero(coeffs)
        if sel.size == 0:
            return BitVector.zeros(self.k)
        words = np.bitwise_xor.reduce(self._decode_mix[sel], axis=0)
        return BitVector(self.k, words)

    def label(self) -> str:
        """Comma-free identifier, same syntax the CLI accepts (family:N:K)."""
        names = {"generic": "linear", "polar": "polar",
                 "reed_muller": "rm", "crc_concatenated": "ca-polar"}
        return f"{names[self.kind]}:{self.n}:{self.k}"


def crc_append(msg: BitVector, crc: CrcSpec) -> BitVector:
    """Systematic CRC attachment: message followed by the remainder of
    msg * x^degree divided by g(x), MSB-first."""
    k = msg.length
    buf = np.concatenate([msg.bits(), np.zeros(crc.degree, dtype=np.uint8)])
    poly = crc.poly_msb_first()
    for i in range(k):
        if buf[i]:
            buf[i:i + crc.degree + 1] ^= poly
    out = np.concatenate([msg.bits(), buf[k:]])
    return BitVector.from_bits(out)


def crc_check(v: BitVector, crc: CrcSpec) -> bool:
    """True iff v, read MSB-first, is divisible by the CRC polynomial."""
    if v.length <= crc.degree:
        raise ValueError("vector shorter than CRC parity length")
    buf = v.bits().copy()
    poly = crc.poly_msb_first()
    for i in range(v.length - crc.degree):
        if buf[i]:
            buf[i:i + crc.degree + 1] ^= poly
    return not buf[v.length - crc.degree:].any()


def polar_transform_bits(bits: np.ndarray) -> np.ndarray:
    """Kronecker butterfly of [[1,0],[1,1]] over the last axis (in place on
    a copy), natural bit order.  The transform is a GF(2) involution."""
    n = bits.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    out = np.array(bits, dtype=np.uint8, copy=True)
    h = 1
    while h < n:
        view = out.reshape(-1, n // (2 * h), 2 * h)
        view[:, :, :h] ^= view[:, :, h:]
        h *= 2
    return out.reshape(bits.shape)


def polar_transform(u: BitVector) -> BitVector:
    return BitVector.from_bits(polar_transform_bits(u.bits()))


def reliability_order(n: int, source: str = "bundled_5g_table") -> ReliabilityOrder:
    """Position reliability ranking for blocklength n (a power of two).

    'bundled_5g_table' filters the universal length-1024 sequence to
    indices < n preserving order (n <= 1024).  'beta_expansion' ranks by the
    polarization weight sum(b_i * 2^(i/4)) over the binary digits of each
    index, ties broken by index ascending.
    """
    if n < 2 or n & (n - 1):
        raise ValueError("n must be a power of two, n >= 2")
    if source == "bundled_5g_table":
        if n > 1024:
            raise ValueError("bundled table covers n <= 1024; use beta_expansion")
        ranked = NR_SEQUENCE_1024[NR_SEQUENCE_1024 < n]
        return ReliabilityOrder(n, ranked, source)
    if source == "beta_expansion":
        idx = np.arange(n, dtype=np.int64)
        nbits = n.bit_length() - 1
        w = np.zeros(n, dtype=np.float64)
        for i in range(nbits):
            w += ((idx >> i) & 1) * 2.0 ** (i / 4.0)
        ranked = idx[np.lexsort((idx, w))]
        return ReliabilityOrder(n, ranked, source)
    raise ValueError(f"unknown reliability source: {source!r}")


def reliability_order_from_file(path, n: int) -> ReliabilityOrder:
    """Load an external ranking: one index per line, least reliable first.

    The file may rank a longer blocklength; entries >= n are dropped while
    preserving order, and the survivors must form a permutation of 0..n-1.
    """
    with open(path) as fh:
        raw = [int(line) for line in fh if line.strip()]
    if len(raw) < n:
        raise ValueError(f"sequence file has {len(raw)} entries, need >= {n}")
    ranked = np.array([v for v in raw if v < n], dtype=np.int64)
    return ReliabilityOrder(n, ranked, f"file:{path}")


def build_polar_code(n: int, k_effective: int, order: ReliabilityOrder) -> LinearCode:
    """Polar code whose info set is the k most reliable positions; generator
    row t is the butterfly transform of the unit vector at the t-th info
    index (info set ascending)."""
    if k_effective > n:
        raise ValueError("dimension exceeds blocklength")
    if order.n != n:
        raise ValueError("reliability order built for a different blocklength")
    info = order.most_reliable(k_effective)
    eye = np.zeros((k_effective, n), dtype=np.uint8)
    eye[np.arange(k_effective), info] = 1
    rows = polar_transform_bits(eye)
    return LinearCode(n, k_effective, BitMatrix.from_bits(rows),
                      kind="polar", info_set=tuple(int(i) for i in info))


def build_rm_code(m: int, r: int) -> LinearCode:
    """Reed-Muller code of length 2^m and order r: generator rows are the
    evaluation vectors of all monomials of degree <= r in m variables,
    ordered by degree then lexicographic variable subset."""
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    n = 1 << m
    points = np.arange(n, dtype=np.int64)
    var_bits = [((points >> i) & 1).astype(np.uint8) for i in range(m)]
    rows = []
    for degree in range(r + 1):
        for subset in itertools.combinations(range(m), degree):
            row = np.ones(n, dtype=np.uint8)
            for i in subset:
                row &= var_bits[i]
            rows.append(row)
    gen = BitMatrix.from_bits(np.stack(rows))
    return LinearCode(n, gen.rows, gen, kind="reed_muller", rm_variables=m, rm_order=r)


def build_ca_code(k: int, crc: CrcSpec, inner: LinearCode) -> LinearCode:
    """CRC-concatenated code: effective generator row i is the inner encoding
    of crc_append(e_i), so encode(msg) == inner_encode(crc_append(msg))."""
    if inner.k != k + crc.degree:
        raise ValueError(f"inner dimension {inner.k} != K + CRC degree = {k + crc.degree}")
    rows = []
    for i in range(k):
        v = crc_append(BitVector.unit(i, k), crc)
        rows.append(mat_vec_mul(v, inner.generator))
    return LinearCode(inner.n, k, BitMatrix.from_rows(rows),
                      kind="crc_concatenated", crc=crc, inner=inner)


def build_ca_polar_code(n: int, k: int, crc: CrcSpec = CRC11,
                        source: str = "bundled_5g_table") -> LinearCode:
    """Convenience builder for the CRC-aided polar family."""
    order = reliability_order(n, source)
    inner = build_polar_code(n, k + crc.degree, order)
    return build_ca_code(k, crc, inner)


def encode(code: LinearCode, msg: BitVector) -> BitVector:
    """Encode a K-bit message through the (effective) generator."""
    return mat_vec_mul(msg, code.generator)


def precoded_of_codeword(code: LinearCode, codeword: BitVector) -> BitVector:
    """For a polar codeword, recover the length-K' precoded vector sitting on
    the info set (uses the involution property of the butterfly)."""
    if code.kind == "crc_concatenated":
        inner = code.inner
    elif code.kind == "polar":
        inner = code
    else:
        raise ValueError("precoded_of_codeword applies to polar-based codes")
    u = polar_transform_bits(codeword.bits())
    return BitVector.from_bits(u[np.asarray(inner.info_set, dtype=np.int64)])
