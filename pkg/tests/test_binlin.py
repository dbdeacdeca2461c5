import numpy as np
import pytest

from feclab.binlin import (BitMatrix, BitVector, hamming_distance, hamming_weight,
                           mat_vec_mul, row_reduce)


def test_mat_vec_zero_message():
    g = BitMatrix.from_bits(np.random.default_rng(0).integers(0, 2, (5, 12), dtype=np.uint8))
    out = mat_vec_mul(BitVector.zeros(5), g)
    assert out.weight() == 0


def test_mat_vec_unit_vectors_select_rows():
    g = BitMatrix.from_bits(np.random.default_rng(1).integers(0, 2, (6, 20), dtype=np.uint8))
    for i in range(6):
        assert mat_vec_mul(BitVector.unit(i, 6), g) == g.row(i)


def test_mat_vec_hand_example():
    # (1,1) x [[1,0,1],[0,1,1]] -> per-bit XOR by hand: (1,1,0)
    g = BitMatrix.from_bits([[1, 0, 1], [0, 1, 1]])
    out = mat_vec_mul(BitVector.from_bits([1, 1]), g)
    assert out.bits().tolist() == [1, 1, 0]


def test_mat_vec_dimension_mismatch():
    g = BitMatrix.from_bits([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        mat_vec_mul(BitVector.from_bits([1, 0, 1]), g)


def test_mat_vec_distributes_over_xor():
    rng = np.random.default_rng(2)
    g = BitMatrix.from_bits(rng.integers(0, 2, (8, 33), dtype=np.uint8))
    for _ in range(50):
        a = BitVector.from_bits(rng.integers(0, 2, 8, dtype=np.uint8))
        b = BitVector.from_bits(rng.integers(0, 2, 8, dtype=np.uint8))
        assert mat_vec_mul(a ^ b, g) == mat_vec_mul(a, g) ^ mat_vec_mul(b, g)


def test_weight_trivial_cases():
    assert hamming_weight(BitVector.zeros(128)) == 0
    assert hamming_weight(BitVector.from_bits([1] * 7)) == 7


def test_weight_matches_per_bit_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        length = int(rng.integers(1, 513))
        bits = rng.integers(0, 2, length, dtype=np.uint8)
        assert BitVector.from_bits(bits).weight() == int(bits.sum())


def test_distance_cases_and_oracle():
    rng = np.random.default_rng(4)
    v = BitVector.from_bits(rng.integers(0, 2, 100, dtype=np.uint8))
    assert hamming_distance(v, v) == 0
    comp = BitVector.from_bits(1 - v.bits())
    assert hamming_distance(v, comp) == 100
    for _ in range(200):
        a_bits = rng.integers(0, 2, 77, dtype=np.uint8)
        b_bits = rng.integers(0, 2, 77, dtype=np.uint8)
        a, b = BitVector.from_bits(a_bits), BitVector.from_bits(b_bits)
        assert hamming_distance(a, b) == int((a_bits != b_bits).sum())
        assert hamming_distance(a, b) == hamming_weight(a ^ b)


def test_distance_length_mismatch():
    with pytest.raises(ValueError):
        hamming_distance(BitVector.zeros(4), BitVector.zeros(5))


def test_pack_layout_is_little_endian_within_words():
    # bit j lives in bit (j mod 64) of word j // 64
    v = BitVector.from_support([0, 63, 64, 70], 128)
    assert int(v.words[0]) == 1 | (1 << 63)
    assert int(v.words[1]) == 1 | (1 << 6)


def test_trailing_bits_must_be_zero():
    with pytest.raises(ValueError):
        BitVector(3, np.array([0b1111], dtype=np.uint64))


def test_row_reduce_identity():
    red, pivots, rank = row_reduce(BitMatrix.identity(4))
    assert rank == 4 and pivots == [0, 1, 2, 3]
    assert red == BitMatrix.identity(4)


def test_row_reduce_duplicate_row():
    m = BitMatrix.from_bits([[1, 0, 1], [1, 0, 1], [0, 1, 1]])
    _, _, rank = row_reduce(m)
    assert rank == 2


def _span(bits_matrix: np.ndarray) -> set:
    rows, _ = bits_matrix.shape
    out = set()
    for msg in range(1 << rows):
        acc = np.zeros(bits_matrix.shape[1], dtype=np.uint8)
        for i in range(rows):
            if (msg >> i) & 1:
                acc ^= bits_matrix[i]
        out.add(acc.tobytes())
    return out


def test_row_reduce_preserves_row_space_exhaustively():
    rng = np.random.default_rng(5)
    for trial in range(10):
        bits = rng.integers(0, 2, (8, 16), dtype=np.uint8)
        order = rng.permutation(16).tolist()
        red, pivots, rank = row_reduce(BitMatrix.from_bits(bits), order)
        assert _span(bits) == _span(red.to_bits())
        # pivot columns carry an identity submatrix
        sub = red.to_bits()[:rank][:, pivots]
        assert np.array_equal(sub, np.eye(rank, dtype=np.uint8))


def test_row_reduce_rejects_non_permutation():
    with pytest.raises(ValueError):
        row_reduce(BitMatrix.identity(3), [0, 0, 1])


def test_vector_equality_and_hash():
    a = BitVector.from_bits([1, 0, 1])
    b = BitVector.from_support([0, 2], 3)
    assert a == b and hash(a) == hash(b)
    assert a != BitVector.from_bits([1, 0, 0])


def test_sort_key_orders_by_low_word_first():
    a = BitVector.from_support([0], 100)
    b = BitVector.from_support([65], 100)
    assert a.sort_key() > b.sort_key()  # word 0 compares first
