import math

import numpy as np
import pytest

from feclab.binlin import BitMatrix, BitVector, row_reduce
from feclab.channel import llr, modulate, squared_distance
from feclab.codebook import (LinearCode, build_ca_polar_code, build_polar_code,
                             build_rm_code, encode, precoded_of_codeword,
                             reliability_order)
from feclab.complexity import OpCounter
from feclab.decoders import (CandidateList, OsdStage, SclStage, WsdParams,
                             default_filter_size, gain_metric, ml_decode, mp_wsd,
                             osd_decode, scl_decode, two_stage_decode, wsd_step,
                             wsd_trajectory)
from feclab.wsphere import build_sphere, enumerate_spectrum, translate_member


def random_code(rng, k, n):
    while True:
        bits = rng.integers(0, 2, (k, n), dtype=np.uint8)
        g = BitMatrix.from_bits(bits)
        _, _, rank = row_reduce(g)
        if rank == k:
            return LinearCode(n, k, g)


def random_message(rng, k):
    return BitVector.from_bits(rng.integers(0, 2, k, dtype=np.uint8))


def naive_ml_scan(y, code):
    """Oracle: full squared-ED scan over explicitly encoded codewords."""
    best, best_ed = None, np.inf
    for msg in range(1 << code.k):
        bits = [(msg >> i) & 1 for i in range(code.k)]
        cw = encode(code, BitVector.from_bits(bits))
        ed = squared_distance(y, modulate(cw))
        if ed < best_ed:
            best, best_ed = cw, ed
    return best, best_ed


def full_sphere(code):
    return build_sphere(code, enumerate_spectrum(code).max_shell_index)


# ---------------------------------------------------------------------------
# ML decoder

def test_ml_noiseless_returns_transmitted():
    rng = np.random.default_rng(0)
    code = build_rm_code(3, 1)
    msg = random_message(rng, 4)
    cw = encode(code, msg)
    out, ed = ml_decode(modulate(cw), code)
    assert out == cw and ed == 0.0


def test_ml_survives_single_sign_flip_on_rm_3_1():
    rng = np.random.default_rng(1)
    code = build_rm_code(3, 1)  # minimum distance 4
    for t in range(20):
        cw = encode(code, random_message(rng, 4))
        y = modulate(cw)
        j = int(rng.integers(0, 8))
        y[j] = -0.5 * y[j]
        out, _ = ml_decode(y, code)
        assert out == cw


def test_ml_matches_naive_scan():
    rng = np.random.default_rng(2)
    code = random_code(rng, 10, 18)
    for _ in range(100):
        y = rng.normal(size=18)
        out, ed = ml_decode(y, code)
        oracle_cw, oracle_ed = naive_ml_scan(y, code)
        assert out == oracle_cw
        assert ed == pytest.approx(oracle_ed, abs=1e-12)


def test_ml_budget_guard():
    bits = np.eye(27, 30, dtype=np.uint8)
    code = LinearCode(30, 27, BitMatrix.from_bits(bits))
    with pytest.raises(ValueError, match="budget"):
        ml_decode(np.zeros(30), code)


def test_ml_cost_reported_at_codebook_convention():
    code = build_rm_code(3, 1)
    counters = OpCounter()
    ml_decode(np.zeros(8), code, counters)
    assert counters.ed_evaluations == 16


# ---------------------------------------------------------------------------
# SCL

def test_scl_two_bit_all_positive_llrs():
    code = build_polar_code(2, 2, reliability_order(2))
    out = scl_decode(np.array([5.0, 3.0]), code, 1)
    cw, metric = out.entries[0]
    assert cw.bits().tolist() == [0, 0] and metric == 0.0


def test_scl_full_list_equals_ml_over_inner_code():
    rng = np.random.default_rng(3)
    code = build_polar_code(16, 8, reliability_order(16))
    for t in range(100):
        y = modulate(encode(code, random_message(rng, 8))) + 0.9 * rng.normal(size=16)
        top = scl_decode(llr(y, 0.9), code, 256).entries[0][0]
        assert top == ml_decode(y, code)[0]


def test_scl_noiseless_roundtrip_list_one():
    rng = np.random.default_rng(4)
    code = build_polar_code(64, 16, reliability_order(64))
    for _ in range(100):
        cw = encode(code, random_message(rng, 16))
        out = scl_decode(llr(modulate(cw), 0.7), code, 1)
        assert out.entries[0][0] == cw


def test_scl_rejects_non_polar():
    code = build_rm_code(3, 1)
    with pytest.raises(ValueError):
        scl_decode(np.zeros(8), code, 2)


def test_scl_metrics_sorted_and_codewords_valid():
    rng = np.random.default_rng(5)
    code = build_polar_code(32, 12, reliability_order(32))
    y = rng.normal(size=32)
    out = scl_decode(llr(y, 1.0), code, 8)
    metrics = [m for _, m in out.entries]
    assert metrics == sorted(metrics)
    for cw, _ in out.entries:
        assert code.message_of(cw) is not None  # in the row space


def test_scl_node_costs_match_the_model():
    code = build_polar_code(64, 16, reliability_order(64))
    counters = OpCounter()
    scl_decode(np.ones(64), code, 4, counters)
    assert counters.scl_node_ops == 4 * 64 * 6  # L * N * log2(N)


# ---------------------------------------------------------------------------
# OSD

def test_osd_noiseless_order_zero():
    rng = np.random.default_rng(6)
    code = build_rm_code(4, 2)
    cw = encode(code, random_message(rng, code.k))
    out = osd_decode(modulate(cw), code, 0)
    assert out.entries[0][0] == cw and out.entries[0][1] == 0.0


def test_osd_full_order_equals_ml():
    rng = np.random.default_rng(7)
    code = random_code(rng, 8, 16)
    for _ in range(100):
        y = modulate(encode(code, random_message(rng, 8))) + rng.normal(size=16)
        top = osd_decode(y, code, 8, list_cap=1).entries[0][0]
        assert top == ml_decode(y, code)[0]


def test_osd_candidate_count_is_binomial_sum():
    code = build_rm_code(7, 2)  # K = 29
    counters = OpCounter()
    out = osd_decode(np.ones(128) * 0.1, code, 2, counters=counters)
    expected = 1 + 29 + math.comb(29, 2)
    assert counters.osd_reencodes == expected == 436
    assert len(out) == expected


def test_osd_candidates_are_codewords_and_capped():
    rng = np.random.default_rng(8)
    code = build_rm_code(3, 1)
    y = rng.normal(size=8)
    out = osd_decode(y, code, 2, list_cap=5)
    assert len(out) == 5
    from test_wsphere import all_codewords
    codewords = set(all_codewords(code))
    for cw, score in out.entries:
        assert cw in codewords
        assert score == pytest.approx(squared_distance(y, modulate(cw)))


# ---------------------------------------------------------------------------
# Gain metric and sphere search

def test_gain_metric_examples():
    y = np.array([0.9, -1.1, 0.2])
    x_hat = np.array([1.0, -1.0, 1.0])
    assert gain_metric(y, x_hat, []) == 0.0
    assert gain_metric(y, x_hat, [0, 1]) == pytest.approx(-4.0)


def test_gain_metric_is_correlation_difference():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = 24
        y = rng.normal(size=n)
        center_bits = rng.integers(0, 2, n, dtype=np.uint8)
        hop_bits = rng.integers(0, 2, n, dtype=np.uint8)
        x_old = 1.0 - 2.0 * center_bits
        x_new = 1.0 - 2.0 * (center_bits ^ hop_bits)
        g = gain_metric(y, x_old, np.flatnonzero(hop_bits))
        assert g == pytest.approx(float(y @ x_new - y @ x_old), abs=1e-10)
        # squared-ED change equals -2 G
        delta = squared_distance(y, x_new) - squared_distance(y, x_old)
        assert delta == pytest.approx(-2.0 * g, abs=1e-9)


def test_wsd_step_no_hop_from_exact_center():
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    rng = np.random.default_rng(10)
    cw = encode(code, random_message(rng, 16))
    x = modulate(cw)
    new_center, improved = wsd_step(x, cw, x, sphere, m=10)
    assert not improved and new_center == cw


def test_wsd_step_full_sphere_reaches_ml_in_one_hop():
    rng = np.random.default_rng(11)
    code = build_ca_polar_code(32, 8)
    sphere = full_sphere(code)
    for _ in range(30):
        y = modulate(encode(code, random_message(rng, 8))) + 0.7 * rng.normal(size=32)
        anchor = encode(code, random_message(rng, 8))
        new_center, _ = wsd_step(y, anchor, modulate(anchor), sphere,
                                 m=sphere.nonzero_size)
        assert new_center == ml_decode(y, code)[0]


def test_gain_argmax_equals_ed_argmin_over_members():
    rng = np.random.default_rng(12)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    for _ in range(200):
        y = rng.normal(size=64)
        center = encode(code, random_message(rng, 16))
        x_c = modulate(center)
        gains = np.array([gain_metric(y, x_c, sphere.member_support(i))
                          for i in range(1, sphere.size)])
        eds = np.array([squared_distance(y, modulate(translate_member(center, sphere.member(i))))
                        for i in range(1, sphere.size)])
        assert int(np.argmax(gains)) == int(np.argmin(eds))


def test_trajectory_monotone_and_bounded():
    rng = np.random.default_rng(13)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, filter_size=12, max_iterations=4)
    for _ in range(100):
        y = modulate(encode(code, random_message(rng, 16))) + 0.9 * rng.normal(size=64)
        anchor = encode(code, random_message(rng, 16))
        trace = wsd_trajectory(y, anchor, sphere, params)
        assert trace.squared_eds[-1] <= trace.squared_eds[0]
        assert all(b < a for a, b in zip(trace.squared_eds, trace.squared_eds[1:]))
        assert len(trace.centers) == len(trace.squared_eds)
        assert trace.iterations_used <= params.max_iterations


def test_trajectory_with_full_sphere_converges_in_one_hop():
    rng = np.random.default_rng(14)
    code = build_ca_polar_code(32, 8)
    sphere = full_sphere(code)
    params = WsdParams(radius_index=sphere.radius_index,
                       filter_size=sphere.nonzero_size, max_iterations=4)
    for _ in range(20):
        y = modulate(encode(code, random_message(rng, 8))) + 0.8 * rng.normal(size=32)
        anchor = encode(code, random_message(rng, 8))
        trace = wsd_trajectory(y, anchor, sphere, params)
        assert trace.centers[-1] == ml_decode(y, code)[0]
        assert len(trace.centers) <= 2


def test_mp_wsd_single_path_equals_trajectory():
    rng = np.random.default_rng(15)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, max_iterations=4, num_paths=1)
    y = modulate(encode(code, random_message(rng, 16))) + rng.normal(size=64)
    anchor = encode(code, random_message(rng, 16))
    init = CandidateList([(anchor, 0.0)])
    res = mp_wsd(y, init, sphere, params)
    trace = wsd_trajectory(y, anchor, sphere, params)
    assert res.best_codeword == trace.centers[-1]
    assert res.squared_ed == trace.squared_eds[-1]


def test_mp_wsd_duplicate_anchors_match_single():
    rng = np.random.default_rng(16)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    y = modulate(encode(code, random_message(rng, 16))) + rng.normal(size=64)
    anchor = encode(code, random_message(rng, 16))
    one = mp_wsd(y, CandidateList([(anchor, 0.0)]), sphere,
                 WsdParams(radius_index=2, num_paths=1))
    four = mp_wsd(y, CandidateList([(anchor, 0.0)] * 4), sphere,
                  WsdParams(radius_index=2, num_paths=4))
    assert one.best_codeword == four.best_codeword
    assert one.squared_ed == four.squared_ed


def test_mp_wsd_empty_list_rejected():
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 1)
    with pytest.raises(ValueError):
        mp_wsd(np.zeros(64), CandidateList([]), sphere, WsdParams(radius_index=1))


def test_mp_wsd_result_never_worse_than_best_anchor():
    rng = np.random.default_rng(17)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, num_paths=4, max_iterations=4)
    for _ in range(50):
        y = modulate(encode(code, random_message(rng, 16))) + rng.normal(size=64)
        anchors = [(encode(code, random_message(rng, 16)), float(i)) for i in range(4)]
        res = mp_wsd(y, CandidateList(anchors), sphere, params)
        anchor_eds = [squared_distance(y, modulate(cw)) for cw, _ in anchors]
        assert res.squared_ed <= min(anchor_eds)
        assert res.squared_ed == squared_distance(y, modulate(res.best_codeword))


def test_default_filter_size_formula():
    assert default_filter_size(538) == 11
    assert default_filter_size(100) == 10
    assert default_filter_size(10000) == 200


# ---------------------------------------------------------------------------
# Two-stage pipeline

def test_two_stage_noiseless_terminates_at_stage_one():
    rng = np.random.default_rng(18)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, num_paths=4)
    msg = random_message(rng, 16)
    res = two_stage_decode(modulate(encode(code, msg)), code, SclStage(4),
                           params, sphere, sigma=0.5)
    assert res.stage == "stage1_crc_pass"
    assert res.best_message == msg
    assert res.traces == [] and res.counters.gain_additions == 0
    assert res.squared_ed == 0.0


def test_two_stage_always_on_runs_search_every_time():
    rng = np.random.default_rng(19)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, num_paths=4, activation_mode="always_on")
    for _ in range(10):
        msg = random_message(rng, 16)
        y = modulate(encode(code, msg)) + 0.3 * rng.normal(size=64)
        res = two_stage_decode(y, code, SclStage(4), params, sphere, sigma=0.3)
        assert res.stage == "mp_wsd"
        assert len(res.traces) == 4


def test_two_stage_crc_gated_needs_crc_code():
    code = build_rm_code(3, 1)
    sphere = build_sphere(code, 1)
    with pytest.raises(ValueError, match="crc"):
        two_stage_decode(np.zeros(8), code, OsdStage(1),
                         WsdParams(radius_index=1), sphere)


def test_two_stage_osd_always_on_on_rm_code():
    rng = np.random.default_rng(20)
    code = build_rm_code(4, 1)
    sphere = build_sphere(code, 1)
    params = WsdParams(radius_index=1, num_paths=2, activation_mode="always_on")
    msg = random_message(rng, code.k)
    y = modulate(encode(code, msg)) + 0.4 * rng.normal(size=16)
    res = two_stage_decode(y, code, OsdStage(1), params, sphere)
    assert res.stage == "mp_wsd"
    assert res.best_message is not None
    assert res.squared_ed == squared_distance(y, modulate(res.best_codeword))


def test_two_stage_scl_anchors_live_in_the_crc_subcode():
    rng = np.random.default_rng(21)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, num_paths=4, activation_mode="always_on")
    y = modulate(encode(code, random_message(rng, 16))) + 1.2 * rng.normal(size=64)
    res = two_stage_decode(y, code, SclStage(4), params, sphere, sigma=1.2)
    from feclab.codebook import crc_check
    for trace in res.traces:
        anchor = trace.centers[0]
        assert crc_check(precoded_of_codeword(code, anchor), code.crc)


def test_two_stage_is_deterministic():
    rng = np.random.default_rng(22)
    code = build_ca_polar_code(64, 16)
    sphere = build_sphere(code, 2)
    params = WsdParams(radius_index=2, num_paths=4)
    y = modulate(encode(code, random_message(rng, 16))) + rng.normal(size=64)
    a = two_stage_decode(y, code, SclStage(4), params, sphere)
    b = two_stage_decode(y, code, SclStage(4), params, sphere)
    assert a.best_codeword == b.best_codeword
    assert a.squared_ed == b.squared_ed
    assert a.stage == b.stage


def test_candidate_list_validates_ordering():
    code = build_rm_code(3, 1)
    cw = encode(code, BitVector.zeros(4))
    with pytest.raises(ValueError):
        CandidateList([(cw, 2.0), (cw, 1.0)])


def test_wsd_params_validation():
    with pytest.raises(ValueError):
        WsdParams(radius_index=1, max_iterations=0)
    with pytest.raises(ValueError):
        WsdParams(radius_index=1, activation_mode="sometimes")
