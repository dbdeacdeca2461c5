"""Decoding machinery: brute-force ML, successive-cancellation list (SCL),
ordered-statistics decoding (OSD), single-trajectory code-weight sphere
search with correlation filtering, the multipoint orchestrator running
several such trajectories from distinct anchors, and the two-stage pipeline
with CRC early termination.

Determinism: every tie anywhere is broken first by score and then by the
lowest index (message index, path index, candidate generation order, or
sphere member order), so repeated decodes of the same input are identical.

Euclidean distances are squared throughout (monotone equivalent of the
plain norm) and the value stored in any result is always the canonical
full-length recomputation ||y - x(c)||^2, never an incrementally updated
running value.
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass

import numpy as np

from feclab.binlin import BitVector, row_reduce, unpack_bits
from feclab.channel import modulate, modulate_bits, squared_distance
from feclab.codebook import (LinearCode, crc_check, encode, polar_transform_bits,
                             precoded_of_codeword)
from feclab.complexity import OpCounter
from feclab.wsphere import CodeWeightSphere

ML_DIM_LIMIT = 26
_ML_BLOCK_BITS = 16


@dataclass
class CandidateList:
    """Best-first candidates: (codeword, score) with nondecreasing scores."""

    entries: list

    def __post_init__(self):
        scores = [s for _, s in self.entries]
        if any(a > b for a, b in zip(scores, scores[1:])):
            raise ValueError("candidate scores must be nondecreasing")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SclStage:
    """Stage-1 spec: SCL with the given list size."""
    list_size: int


@dataclass(frozen=True)
class OsdStage:
    """Stage-1 spec: OSD with the given reprocessing order."""
    order: int
    list_cap: int | None = None


@dataclass
class WsdParams:
    """Sphere-search parameters.

    filter_size None resolves to max(10, ceil(0.02 * |sphere|)) against the
    sphere in use; when it exceeds the nonzero sphere size, all members are
    scored exactly.
    """

    radius_index: int
    filter_size: int | None = None
    max_iterations: int = 4
    num_paths: int = 4
    activation_mode: str = "crc_gated"

    def __post_init__(self):
        if self.max_iterations < 1 or self.num_paths < 1:
            raise ValueError("max_iterations and num_paths must be >= 1")
        if self.filter_size is not None and self.filter_size < 1:
            raise ValueError("filter_size must be >= 1")
        if self.activation_mode not in ("crc_gated", "always_on"):
            raise ValueError(f"unknown activation mode {self.activation_mode!r}")

    def resolve_filter_size(self, sphere: CodeWeightSphere) -> int:
        if self.filter_size is not None:
            return self.filter_size
        return default_filter_size(sphere.size)


def default_filter_size(sphere_size: int) -> int:
    """Default correlation-filter width: max(10, ceil(0.02 * |sphere|))."""
    return max(10, math.ceil(0.02 * sphere_size))


@dataclass
class TrajectoryTrace:
    """History of one search path: accepted centers (initial anchor first),
    their canonical squared EDs, and the per-iteration improvement flags."""

    path_index: int
    centers: list
    squared_eds: list
    active_history: list
    iterations_used: int


@dataclass
class DecodeResult:
    best_codeword: BitVector
    best_message: BitVector | None
    squared_ed: float
    stage: str  # 'stage1_crc_pass' or 'mp_wsd'
    traces: list
    counters: OpCounter


# ---------------------------------------------------------------------------
# Brute-force ML

_ml_cache: "weakref.WeakKeyDictionary[LinearCode, tuple]" = weakref.WeakKeyDictionary()


def _ml_tables(code: LinearCode):
    entry = _ml_cache.get(code)
    if entry is None:
        blk = min(code.k, _ML_BLOCK_BITS)
        table = np.zeros((1, code.generator.words.shape[1]), dtype=np.uint64)
        for i in range(blk):
            table = np.concatenate([table, table ^ code.generator.words[i]], axis=0)
        x_low = modulate_bits(unpack_bits(table, code.n))
        entry = (blk, x_low)
        _ml_cache[code] = entry
    return entry


def ml_decode(y: np.ndarray, code: LinearCode, counters: OpCounter | None = None):
    """Exact argmin of ||y - x(c)||^2 over all 2^K codewords, realized as a
    blocked correlation scan; ties go to the smallest message index (message
    index = sum of m_i 2^i).  Returns (codeword, squared_ed)."""
    if code.k > ML_DIM_LIMIT:
        raise ValueError(f"K = {code.k} exceeds the ML enumeration budget of {ML_DIM_LIMIT}")
    y = np.asarray(y, dtype=np.float64)
    blk, x_low = _ml_tables(code)
    rows = code.generator.words
    best_corr = -np.inf
    best_index = 0
    for h in range(1 << (code.k - blk)):
        if h == 0:
            x_high = np.ones(code.n)
        else:
            sel = blk + np.flatnonzero([(h >> t) & 1 for t in range(code.k - blk)])
            high_words = np.bitwise_xor.reduce(rows[sel], axis=0)
            x_high = modulate_bits(unpack_bits(high_words, code.n))
        corr = x_low @ (y * x_high)
        i = int(np.argmax(corr))
        if corr[i] > best_corr:
            best_corr = float(corr[i])
            best_index = i | (h << blk)
    if counters is not None:
        counters.ed_evaluations += 1 << code.k  # reported at the 2^K convention
    msg_bits = np.array([(best_index >> i) & 1 for i in range(code.k)], dtype=np.uint8)
    codeword = encode(code, BitVector.from_bits(msg_bits))
    return codeword, squared_distance(y, modulate(codeword))


# ---------------------------------------------------------------------------
# Successive-cancellation list decoding

def _scl_f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _scl_g(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> np.ndarray:
    return b + (1.0 - 2.0 * u) * a


def scl_decode(llrs: np.ndarray, code: LinearCode, list_size: int,
               counters: OpCounter | None = None) -> CandidateList:
    """LLR-domain SCL with min-sum check nodes over a polar code.

    Path metrics accumulate |llr| whenever a decision contradicts its LLR
    sign (frozen bits decode to 0 and pay the same penalty).  Returns up to
    `list_size` surviving paths as full codewords, path metric ascending,
    ties broken by path index.
    """
    if code.kind != "polar":
        raise ValueError("scl_decode requires a polar code (pass the inner code "
                         "of a CRC-concatenated construction)")
    llrs = np.asarray(llrs, dtype=np.float64)
    n_len = code.n
    if llrs.shape != (n_len,):
        raise ValueError("LLR length mismatch")
    stages = n_len.bit_length() - 1
    big_l = list_size
    if counters is None:
        counters = OpCounter()
    frozen = np.ones(n_len, dtype=bool)
    frozen[np.asarray(code.info_set, dtype=np.int64)] = False

    llr_mem = np.zeros((big_l, stages + 1, n_len))
    llr_mem[:, 0, :] = llrs
    bit_mem = np.zeros((big_l, stages + 1, n_len), dtype=np.uint8)
    pm = np.full(big_l, np.inf)
    pm[0] = 0.0
    node_state = np.zeros(2 * n_len - 1, dtype=np.int8)

    depth = 0
    node = 0
    while True:
        if depth == stages:
            dm = llr_mem[:, stages, node]
            if frozen[node]:
                bit_mem[:, stages, node] = 0
                pm = pm + np.abs(dm) * (dm < 0)
            else:
                natural = (dm < 0).astype(np.uint8)
                pm2 = np.concatenate([pm, pm + np.abs(dm)])
                order = np.argsort(pm2, kind="stable")[:big_l]
                src = order % big_l
                flipped = (order >= big_l).astype(np.uint8)
                llr_mem = llr_mem[src]
                bit_mem = bit_mem[src]
                pm = pm2[order]
                bit_mem[:, stages, node] = natural[src] ^ flipped
            if node == n_len - 1:
                break
            node //= 2
            depth -= 1
        else:
            seg = n_len >> depth
            half = seg // 2
            state_idx = (1 << depth) - 1 + node
            lo = node * seg
            block = llr_mem[:, depth, lo:lo + seg]
            if node_state[state_idx] == 0:
                llr_mem[:, depth + 1, lo:lo + half] = _scl_f(block[:, :half], block[:, half:])
                counters.scl_node_ops += big_l * half
                node_state[state_idx] = 1
                node = 2 * node
                depth += 1
            elif node_state[state_idx] == 1:
                left_bits = bit_mem[:, depth + 1, lo:lo + half]
                llr_mem[:, depth + 1, lo + half:lo + seg] = _scl_g(
                    block[:, :half], block[:, half:], left_bits)
                counters.scl_node_ops += big_l * half
                node_state[state_idx] = 2
                node = 2 * node + 1
                depth += 1
            else:
                left = bit_mem[:, depth + 1, lo:lo + half]
                right = bit_mem[:, depth + 1, lo + half:lo + seg]
                bit_mem[:, depth, lo:lo + half] = left ^ right
                bit_mem[:, depth, lo + half:lo + seg] = right
                node //= 2
                depth -= 1

    finite = np.isfinite(pm)
    order = np.argsort(pm[finite], kind="stable")
    u_rows = bit_mem[finite][order][:, stages, :]
    metrics = pm[finite][order]
    codeword_bits = polar_transform_bits(u_rows)
    entries = [(BitVector.from_bits(codeword_bits[i]), float(metrics[i]))
               for i in range(u_rows.shape[0])]
    return CandidateList(entries)


# ---------------------------------------------------------------------------
# Ordered-statistics decoding

def osd_decode(y: np.ndarray, code: LinearCode, order_k: int,
               list_cap: int | None = None,
               counters: OpCounter | None = None) -> CandidateList:
    """Order-k OSD: rank positions by |y| descending, reduce the generator in
    that column order to a most-reliable-basis systematic form, hard-decide
    the K basis bits, and re-encode every test error pattern of weight <=
    order_k on them.  Returns the `list_cap` best candidates by squared ED.
    """
    if order_k < 0:
        raise ValueError("order must be >= 0")
    y = np.asarray(y, dtype=np.float64)
    if counters is None:
        counters = OpCounter()
    column_order = np.argsort(-np.abs(y), kind="stable")
    reduced, pivots, rank = row_reduce(code.generator, column_order)
    if rank != code.k:
        raise ValueError("generator is rank deficient")
    basis = reduced.words[:rank]
    pivots = np.asarray(pivots, dtype=np.int64)

    hard = (y[pivots] < 0)
    base_sel = np.flatnonzero(hard)
    if base_sel.size:
        base = np.bitwise_xor.reduce(basis[base_sel], axis=0)
    else:
        base = np.zeros(basis.shape[1], dtype=np.uint64)

    chunks = [base[None, :]]
    for weight in range(1, order_k + 1):
        combos = _combination_indices(code.k, weight)
        if combos.size == 0:
            continue
        chunks.append(base ^ np.bitwise_xor.reduce(basis[combos], axis=1))
    words = np.concatenate(chunks, axis=0)
    counters.osd_reencodes += words.shape[0]

    bits = unpack_bits(words, code.n)
    diffs = y[None, :] - modulate_bits(bits)
    eds = np.einsum("ij,ij->i", diffs, diffs)
    order = np.argsort(eds, kind="stable")
    if list_cap is not None:
        order = order[:list_cap]
    entries = [(BitVector(code.n, words[i]), float(eds[i])) for i in order]
    return CandidateList(entries)


def _combination_indices(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) in lexicographic order, as an (C, k) array."""
    combos = list(itertools.combinations(range(n), k))
    return np.array(combos, dtype=np.int64).reshape(len(combos), k)


# ---------------------------------------------------------------------------
# Code-weight sphere search

def gain_metric(y: np.ndarray, x_hat: np.ndarray, support) -> float:
    """Correlation improvement of flipping `support`:
    sum_j in support of -2 y_j x_hat_j, which equals
    <y, x(c XOR s)> - <y, x(c)> exactly."""
    idx = np.asarray(support, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    return float(-2.0 * np.sum(y[idx] * x_hat[idx]))


_sign_cache: "weakref.WeakKeyDictionary[CodeWeightSphere, np.ndarray]" = \
    weakref.WeakKeyDictionary()


def _sphere_signs(sphere: CodeWeightSphere) -> np.ndarray:
    """Modulated (+1/-1) rows of the nonzero sphere members, cached."""
    signs = _sign_cache.get(sphere)
    if signs is None:
        signs = modulate_bits(unpack_bits(sphere.member_words[1:], sphere.n))
        signs.flags.writeable = False
        _sign_cache[sphere] = signs
    return signs


def _scan_gains(t, sphere: CodeWeightSphere, counters: OpCounter):
    """Per-member gains from the shared correlation products t = y * x."""
    gains = -2.0 * np.add.reduceat(t[sphere.support_cat], sphere.support_off[:-1])
    counters.gain_additions += int(sphere.support_cat.size)
    return gains


def _wsd_step_core(y, center_words, x_center, ed_center,
                   sphere: CodeWeightSphere, m: int, counters: OpCounter):
    """One filter-and-search step.  Returns
    (new_words, new_x, new_ed, improved).

    Survivor EDs come from full-length correlations against the candidate
    symbol vectors (||y||^2 + N - 2 <y, x>), one evaluation per survivor;
    the accepted hop's ED is then recomputed canonically.  When m covers
    every nonzero member the gain filter cannot change the outcome and the
    scan goes straight to the exact evaluations.
    """
    m_nz = sphere.nonzero_size
    if m_nz == 0:
        return center_words, x_center, ed_center, False
    t = y * x_center
    counters.misc_flops += t.size  # shared correlation products
    m_eff = min(m, m_nz)
    if m_eff < m_nz:
        gains = _scan_gains(t, sphere, counters)
        picks = np.argsort(-gains, kind="stable")[:m_eff]
        if m_eff >= 2:
            counters.sort_comparisons += m_nz * math.ceil(math.log2(m_eff))
    else:
        picks = None  # filter would keep everything

    signs = _sphere_signs(sphere)
    corr = (signs @ t) if picks is None else (signs[picks] @ t)
    eds = (float(y @ y) + sphere.n) - 2.0 * corr
    counters.ed_evaluations += m_eff
    counters.misc_flops += m_eff  # min scan over the survivors

    best = int(np.argmin(eds))
    member = best + 1 if picks is None else int(picks[best]) + 1
    x_best = x_center * signs[member - 1]
    best_ed = squared_distance(y, x_best)
    if best_ed < ed_center:
        new_words = center_words ^ sphere.member_words[member]
        return new_words, x_best, best_ed, True
    return center_words, x_center, ed_center, False


def wsd_step(y: np.ndarray, center: BitVector, x_center: np.ndarray,
             sphere: CodeWeightSphere, m: int,
             counters: OpCounter | None = None):
    """Score every nonzero sphere member by the gain metric, keep the top m
    (ties by member order), evaluate their exact squared EDs, and hop to the
    best if it strictly improves.  Returns (new_center, improved)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if counters is None:
        counters = OpCounter()
    y = np.asarray(y, dtype=np.float64)
    ed_center = squared_distance(y, x_center)
    counters.ed_evaluations += 1
    new_words, _, _, improved = _wsd_step_core(
        y, center.words, np.asarray(x_center, dtype=np.float64), ed_center,
        sphere, m, counters)
    return BitVector(center.length, new_words), improved


def wsd_trajectory(y: np.ndarray, c0: BitVector, sphere: CodeWeightSphere,
                   params: WsdParams, counters: OpCounter | None = None,
                   force_full_iterations: bool = False,
                   path_index: int = 0) -> TrajectoryTrace:
    """Iterate wsd_step from anchor c0 up to max_iterations, stopping at the
    first non-improving step; squared EDs strictly decrease along the trace.

    `force_full_iterations` keeps scanning after convergence (the result is
    unchanged); it exists so worst-case costs can be measured.
    """
    if counters is None:
        counters = OpCounter()
    y = np.asarray(y, dtype=np.float64)
    m = params.resolve_filter_size(sphere)
    x = modulate(c0)
    ed = squared_distance(y, x)
    counters.ed_evaluations += 1
    words = c0.words
    centers = [c0]
    eds = [ed]
    history = []
    used = 0
    for _ in range(params.max_iterations):
        words2, x2, ed2, improved = _wsd_step_core(y, words, x, ed, sphere, m, counters)
        used += 1
        history.append(improved)
        if improved:
            words, x, ed = words2, x2, ed2
            centers.append(BitVector(c0.length, words))
            eds.append(ed)
        elif not force_full_iterations:
            break
    return TrajectoryTrace(path_index, centers, eds, history, used)


def mp_wsd(y: np.ndarray, init_list: CandidateList, sphere: CodeWeightSphere,
           params: WsdParams, counters: OpCounter | None = None) -> DecodeResult:
    """Run up to num_paths independent refinement trajectories from the first
    entries of `init_list` (iteration loop outer, paths inner, stopping when
    no path improves), and return the minimum-ED center over all paths, ties
    to the lowest path index.
    """
    if len(init_list) == 0:
        raise ValueError("initial candidate list is empty")
    if counters is None:
        counters = OpCounter()
    y = np.asarray(y, dtype=np.float64)
    m = params.resolve_filter_size(sphere)
    anchors = init_list.entries[:params.num_paths]

    words = []
    xs = []
    eds = []
    for cw, _ in anchors:
        x = modulate(cw)
        words.append(cw.words)
        xs.append(x)
        eds.append(squared_distance(y, x))
        counters.ed_evaluations += 1
    count = len(anchors)
    active = [True] * count
    centers = [[BitVector(anchors[k][0].length, words[k])] for k in range(count)]
    ed_hist = [[eds[k]] for k in range(count)]
    history = [[] for _ in range(count)]
    used = [0] * count

    for _ in range(params.max_iterations):
        updated = False
        for k in range(count):
            if not active[k]:
                continue
            w2, x2, ed2, improved = _wsd_step_core(y, words[k], xs[k], eds[k],
                                                   sphere, m, counters)
            used[k] += 1
            history[k].append(improved)
            if improved:
                words[k], xs[k], eds[k] = w2, x2, ed2
                centers[k].append(BitVector(anchors[k][0].length, w2))
                ed_hist[k].append(ed2)
                updated = True
            else:
                active[k] = False
        if not updated:
            break

    best_k = int(np.argmin(eds))
    traces = [TrajectoryTrace(k, centers[k], ed_hist[k], history[k], used[k])
              for k in range(count)]
    return DecodeResult(
        best_codeword=centers[best_k][-1],
        best_message=None,
        squared_ed=eds[best_k],
        stage="mp_wsd",
        traces=traces,
        counters=counters)


# ---------------------------------------------------------------------------
# Two-stage pipeline

def two_stage_decode(y: np.ndarray, code: LinearCode, stage1,
                     params: WsdParams, sphere: CodeWeightSphere,
                     sigma: float = 1.0,
                     counters: OpCounter | None = None) -> DecodeResult:
    """Stage 1 list decoding with CRC early termination, then multipoint
    sphere refinement from the best stage-1 candidates.

    In crc_gated mode the stage-1 list is scanned best-first and the first
    CRC-valid candidate is returned without any sphere search; otherwise (or
    in always_on mode) the first num_paths candidates become anchors.  SCL
    anchors are projected into the CRC subcode by truncating the decoded
    precoded vector to the K message bits and re-encoding.

    `sigma` only scales the LLRs handed to SCL; decisions and orderings are
    invariant to it, so the default is safe when the noise level is unknown.
    """
    if counters is None:
        counters = OpCounter()
    y = np.asarray(y, dtype=np.float64)
    gated = params.activation_mode == "crc_gated"
    if gated and code.kind != "crc_concatenated":
        raise ValueError("crc_gated mode requires a CRC-concatenated code")

    if isinstance(stage1, SclStage):
        if code.kind == "crc_concatenated" and code.inner.kind == "polar":
            inner = code.inner
        elif code.kind == "polar":
            inner = code
        else:
            raise ValueError("SCL stage requires a polar or CRC-polar code")
        channel_llrs = 2.0 * y / (sigma * sigma)
        stage1_list = scl_decode(channel_llrs, inner, stage1.list_size, counters)
        in_subcode = False
    elif isinstance(stage1, OsdStage):
        stage1_list = osd_decode(y, code, stage1.order, stage1.list_cap, counters)
        in_subcode = True
    else:
        raise ValueError(f"unknown stage-1 spec {stage1!r}")

    if gated:
        for cw, _ in stage1_list.entries:
            precoded = precoded_of_codeword(code, cw)
            if crc_check(precoded, code.crc):
                msg = BitVector.from_bits(precoded.bits()[:code.k])
                return DecodeResult(
                    best_codeword=cw if in_subcode else encode(code, msg),
                    best_message=msg,
                    squared_ed=squared_distance(y, modulate(cw)),
                    stage="stage1_crc_pass",
                    traces=[],
                    counters=counters)

    anchors = []
    for cw, score in stage1_list.entries[:params.num_paths]:
        if in_subcode or code.kind != "crc_concatenated":
            anchors.append((cw, score))
        else:
            precoded = precoded_of_codeword(code, cw)
            msg = BitVector.from_bits(precoded.bits()[:code.k])
            anchors.append((encode(code, msg), score))

    result = mp_wsd(y, _as_candidates(anchors), sphere, params, counters)
    result.best_message = code.message_of(result.best_codeword)
    return result


def _as_candidates(entries: list) -> CandidateList:
    """Wrap projected anchors without re-validating score order (projection
    preserves the stage-1 ordering, which is what anchor selection uses)."""
    lst = CandidateList.__new__(CandidateList)
    lst.entries = entries
    return lst
