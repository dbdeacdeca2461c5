"""Operation counting and closed-form decoder cost models.

Costs are normalized into ED units: one unit is the cost of evaluating a
full-length squared Euclidean distance, about 3N floating-point operations.
Counters tally raw category counts; conversion applies the per-category FLOP
weights (an SCL processing node is 4 FLOPs, a re-encoded candidate costs one
full ED evaluation).  CRC checks and control flow are not charged, matching
the closed-form models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class OpCounter:
    """Categorized operation tallies; merge is componentwise addition."""

    ed_evaluations: int = 0
    gain_additions: int = 0
    sort_comparisons: int = 0
    scl_node_ops: int = 0
    osd_reencodes: int = 0
    misc_flops: int = 0

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(
            self.ed_evaluations + other.ed_evaluations,
            self.gain_additions + other.gain_additions,
            self.sort_comparisons + other.sort_comparisons,
            self.scl_node_ops + other.scl_node_ops,
            self.osd_reencodes + other.osd_reencodes,
            self.misc_flops + other.misc_flops,
        )

    def merge(self, other: "OpCounter") -> None:
        self.ed_evaluations += other.ed_evaluations
        self.gain_additions += other.gain_additions
        self.sort_comparisons += other.sort_comparisons
        self.scl_node_ops += other.scl_node_ops
        self.osd_reencodes += other.osd_reencodes
        self.misc_flops += other.misc_flops


def to_ed_units(c: OpCounter, n: int) -> float:
    """Convert a counter to ED units for blocklength n."""
    if n < 1:
        raise ValueError("blocklength must be >= 1")
    flops = (3 * n * c.ed_evaluations
             + c.gain_additions
             + c.sort_comparisons
             + 4 * c.scl_node_ops
             + 3 * n * c.osd_reencodes
             + c.misc_flops)
    return flops / (3.0 * n)


def c_scl(list_size: int, n: int) -> float:
    """List decoding cost model: (4/3) * L * log2(N)."""
    if n & (n - 1) or n < 2:
        raise ValueError("n must be a power of two")
    return (4.0 / 3.0) * list_size * math.log2(n)


def c_bpc(list_size: int, n: int, block_sizes) -> float:
    """List cost plus pre-transformation overhead (4/(3N)) * sum N_l log2 N_l."""
    extra = 0.0
    for nl in block_sizes:
        if nl & (nl - 1) or nl < 2:
            raise ValueError("every block size must be a power of two")
        extra += nl * math.log2(nl)
    return c_scl(list_size, n) + (4.0 / (3.0 * n)) * extra


def c_osd(order_k: int, k: int) -> float:
    """Reprocessing cost model: sum_{i<=k} C(K, i) candidate re-encodings."""
    return float(sum(math.comb(k, i) for i in range(order_k + 1)))


def c_wsd(iterations: int, m: int, n: int, sphere_size: int, w_bar: float) -> float:
    """Worst-case cost of one sphere-refinement trajectory:
    J * ( m*(1 + 1/(3N)) + |S|*(w_bar + log2 m) / (3N) )."""
    if min(iterations, m, n, sphere_size) < 1 or w_bar < 0:
        raise ValueError("all model parameters must be positive")
    exact_part = m * (1.0 + 1.0 / (3.0 * n))
    filter_part = sphere_size * (w_bar + math.log2(m)) / (3.0 * n)
    return iterations * (exact_part + filter_part)


def c_mp_wsd(c_init: float, p_act: float, num_paths: int, c_wsd_val: float) -> float:
    """Two-stage total: stage-1 cost plus activation-weighted parallel paths."""
    if not 0.0 <= p_act <= 1.0:
        raise ValueError("p_act must lie in [0, 1]")
    return c_init + p_act * num_paths * c_wsd_val
