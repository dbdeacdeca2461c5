import pytest

from feclab.complexity import (OpCounter, c_bpc, c_mp_wsd, c_osd, c_scl, c_wsd,
                               to_ed_units)


def test_ed_unit_definition():
    assert to_ed_units(OpCounter(ed_evaluations=1), 64) == 1.0
    assert to_ed_units(OpCounter(ed_evaluations=1), 500) == 1.0
    assert to_ed_units(OpCounter(), 64) == 0.0
    assert to_ed_units(OpCounter(gain_additions=3 * 77), 77) == 1.0


def test_ed_unit_category_weights():
    c = OpCounter(scl_node_ops=3, sort_comparisons=6, osd_reencodes=2, misc_flops=12)
    n = 4
    expected = (4 * 3 + 6 + 3 * n * 2 + 12) / (3 * n)
    assert to_ed_units(c, n) == pytest.approx(expected)


def test_counter_merge_is_associative_and_commutative():
    a = OpCounter(1, 2, 3, 4, 5, 6)
    b = OpCounter(10, 20, 30, 40, 50, 60)
    c = OpCounter(100, 0, 1, 0, 2, 7)
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    acc = OpCounter()
    acc.merge(a)
    acc.merge(b)
    assert acc == a + b


def test_c_scl_values():
    assert c_scl(16, 256) == pytest.approx(170.6667, abs=1e-3)
    assert c_scl(1, 2) == pytest.approx(4.0 / 3.0)
    assert c_scl(8, 128) == pytest.approx(2 * c_scl(4, 128))


def test_c_bpc_values():
    assert c_bpc(4, 64, []) == c_scl(4, 64)
    assert c_bpc(4, 64, [64]) == pytest.approx(c_scl(4, 64) + (4.0 / 3.0) * 6)
    expected = 32 * (4.0 / 3.0) * 7 + (4.0 / 384.0) * (2 * 64 * 6)
    assert c_bpc(32, 128, [64, 64]) == pytest.approx(expected)


def test_c_osd_values():
    assert c_osd(0, 29) == 1
    assert c_osd(2, 29) == 436
    assert c_osd(4, 29) == 1 + 29 + 406 + 3654 + 23751 == 27841


def test_c_wsd_edge_and_scaling():
    n, size, wbar = 64, 100, 12.0
    base = c_wsd(1, 1, n, size, wbar)
    assert base == pytest.approx(1 + 1 / (3 * n) + size * wbar / (3 * n))
    assert c_wsd(4, 11, n, size, wbar) == pytest.approx(4 * c_wsd(1, 11, n, size, wbar))
    with pytest.raises(ValueError):
        c_wsd(0, 1, n, size, wbar)


def test_c_mp_wsd():
    assert c_mp_wsd(100.0, 0.0, 16, 321.0) == 100.0
    assert c_mp_wsd(100.0, 1.0, 1, 321.0) == 421.0
    assert c_mp_wsd(0.0, 0.5, 8, 10.0) == pytest.approx(2 * c_mp_wsd(0.0, 0.5, 4, 10.0))
    with pytest.raises(ValueError):
        c_mp_wsd(1.0, 1.5, 1, 1.0)
