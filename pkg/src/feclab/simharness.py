"""Seeded Monte-Carlo BLER/complexity sweeps with CSV persistence.

Reproducibility contract: every trial draws its message and noise from
Philox streams keyed by (seed, snr index, trial index), and trials are
processed in fixed-size batches whose results are folded in trial order, so
a sweep is byte-identical for any worker-thread count.  The only escape
hatch is max_wall_seconds: if it fires, the trial count depends on machine
speed, so leave it unset when bit-stable output matters.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from feclab.binlin import BitVector
from feclab.channel import awgn, ebno_to_sigma, esno_to_sigma, gaussian_stream, modulate
from feclab.codebook import (CrcSpec, LinearCode, build_ca_code, build_polar_code,
                             build_rm_code, encode, reliability_order,
                             reliability_order_from_file)
from feclab.complexity import OpCounter, to_ed_units
from feclab.decoders import (OsdStage, SclStage, WsdParams, ml_decode,
                             two_stage_decode)
from feclab.wsphere import CodeWeightSphere, build_sphere, load_sphere

_BATCH = 64
CSV_HEADER = ("code,stage1,wsd_r,wsd_m,wsd_J,L_init,snr_db,trials,errors,"
              "bler,bler_lo,bler_hi,p_act,ed_units,avg_iters,seed")
DATA_DIR_ENV = "FECLAB_DATA_DIR"


def data_path(path):
    """Resolve a relative data path under $FECLAB_DATA_DIR when it is set."""
    if path is None:
        return None
    base = os.environ.get(DATA_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


class ConfigError(ValueError):
    """Raised for unknown keys, missing keys, or invalid values."""


@dataclass
class ExperimentConfig:
    code_family: str                 # ca_polar | polar | rm
    code_n: int
    code_k: int
    snr_db_grid: list
    stage1: str                      # scl | osd
    seed: int
    max_trials: int
    crc_degree: int = 11
    crc_polynomial: tuple = (0, 5, 9, 10, 11)
    reliability_source: str = "bundled_5g_table"
    snr_convention: str = "ebno"     # ebno (rate K/N over info bits) | esno
    scl_list_size: int = 8
    osd_order: int = 2
    stage1_list_cap: int | None = None
    wsd_radius_index: int = 0
    wsd_filter_size: int | None = None   # None means the formula default
    wsd_max_iterations: int = 4
    wsd_num_paths: int = 4
    activation_mode: str = "crc_gated"
    min_block_errors: int = 100
    max_wall_seconds: float | None = None
    sphere_path: str | None = None

    def __post_init__(self):
        if not self.snr_db_grid:
            raise ConfigError("snr_db_grid must be nonempty")
        if any(b >= a for a, b in zip(self.snr_db_grid[1:], self.snr_db_grid)):
            raise ConfigError("snr_db_grid must be strictly ascending")
        if self.min_block_errors < 1:
            raise ConfigError("min_block_errors must be >= 1")
        if self.max_trials < 1 or self.max_trials > 2 ** 31:
            raise ConfigError("max_trials out of range")
        if self.code_family not in ("ca_polar", "polar", "rm"):
            raise ConfigError(f"unknown code_family {self.code_family!r}")
        if self.stage1 not in ("scl", "osd"):
            raise ConfigError(f"unknown stage1 {self.stage1!r}")
        if self.snr_convention not in ("ebno", "esno"):
            raise ConfigError(f"unknown snr_convention {self.snr_convention!r}")
        if self.activation_mode == "crc_gated" and self.code_family != "ca_polar":
            raise ConfigError("crc_gated activation requires the ca_polar family")


@dataclass
class SweepRecord:
    code_label: str
    stage1_label: str
    wsd_r: int
    wsd_m: int
    wsd_j: int
    num_paths: int
    snr_db: float
    trials: int
    block_errors: int
    bler: float
    bler_lo: float
    bler_hi: float
    activation_rate: float
    ed_units_mean: float
    avg_iterations: float
    stage1_pass_rate: float
    wall_seconds: float
    seed: int


_BOOLISH = {"none": None, "": None}

_INT_KEYS = {"code_n", "code_k", "crc_degree", "scl_list_size", "osd_order",
             "wsd_radius_index", "wsd_max_iterations", "wsd_num_paths",
             "max_trials", "min_block_errors", "seed"}
_OPT_INT_KEYS = {"stage1_list_cap", "wsd_filter_size"}
_STR_KEYS = {"code_family", "reliability_source", "snr_convention", "stage1",
             "activation_mode", "sphere_path"}
_REQUIRED = {"code_family", "code_n", "code_k", "snr_db_grid", "stage1",
             "seed", "max_trials"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse a key = value document; '#' starts a comment; unknown keys are
    rejected outright."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val

    known = (_INT_KEYS | _OPT_INT_KEYS | _STR_KEYS
             | {"snr_db_grid", "crc_polynomial", "max_wall_seconds"})
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED - set(values)
    if missing:
        raise ConfigError(f"missing required config keys: {sorted(missing)}")

    kwargs = {}
    for key, val in values.items():
        if key in _INT_KEYS:
            kwargs[key] = int(val)
        elif key in _OPT_INT_KEYS:
            if val.lower() in ("formula", "none", ""):
                kwargs[key] = None
            else:
                kwargs[key] = int(val)
        elif key == "snr_db_grid":
            kwargs[key] = [float(v) for v in val.split(",") if v.strip()]
        elif key == "crc_polynomial":
            kwargs[key] = tuple(int(v) for v in val.split(",") if v.strip())
        elif key == "max_wall_seconds":
            kwargs[key] = None if val.lower() in ("none", "") else float(val)
        elif key == "sphere_path":
            kwargs[key] = None if val.lower() in ("none", "") else val
        else:
            kwargs[key] = val
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def build_code(config: ExperimentConfig) -> LinearCode:
    n, k = config.code_n, config.code_k
    if config.code_family == "rm":
        m = n.bit_length() - 1
        if 1 << m != n:
            raise ConfigError("rm code_n must be a power of two")
        total = 0
        for r in range(m + 1):
            total += math.comb(m, r)
            if total == k:
                return build_rm_code(m, r)
            if total > k:
                break
        raise ConfigError(f"no Reed-Muller order gives K = {k} at N = {n}")
    source = config.reliability_source
    if source.startswith("file:"):
        order = reliability_order_from_file(source[5:], n)
    else:
        order = reliability_order(n, source)
    if config.code_family == "polar":
        return build_polar_code(n, k, order)
    crc = CrcSpec(config.crc_degree,
                  BitVector.from_support(list(config.crc_polynomial),
                                         config.crc_degree + 1))
    inner = build_polar_code(n, k + crc.degree, order)
    return build_ca_code(k, crc, inner)


def wilson_interval(errors: int, trials: int, z: float = 1.96):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _stream_ids(snr_idx: int, trial: int):
    base = (snr_idx << 40) | (trial << 2)
    return base, base | 1   # noise stream, message stream


def _sigma_for(config: ExperimentConfig, snr_db: float) -> float:
    if config.snr_convention == "esno":
        return esno_to_sigma(snr_db)
    return ebno_to_sigma(snr_db, config.code_k / config.code_n)


@dataclass
class _TrialOutcome:
    error: bool
    activated: bool
    path_iterations: int
    paths: int
    counters: OpCounter


def _stage1_spec(config: ExperimentConfig):
    if config.stage1 == "scl":
        return SclStage(config.scl_list_size)
    return OsdStage(config.osd_order, config.stage1_list_cap)


def _wsd_params(config: ExperimentConfig) -> WsdParams:
    return WsdParams(radius_index=config.wsd_radius_index,
                     filter_size=config.wsd_filter_size,
                     max_iterations=config.wsd_max_iterations,
                     num_paths=config.wsd_num_paths,
                     activation_mode=config.activation_mode)


def resolve_sphere(config: ExperimentConfig, code: LinearCode) -> CodeWeightSphere:
    if config.sphere_path:
        sphere = load_sphere(data_path(config.sphere_path))
        if (sphere.n, sphere.k) != (code.n, code.k):
            raise ConfigError("sphere file does not match the configured code")
        if sphere.radius_index != config.wsd_radius_index:
            raise ConfigError("sphere file radius does not match wsd_radius_index")
        return sphere
    if config.wsd_radius_index == 0:
        return build_sphere(code, 0)
    raise ConfigError("sphere_path is required when wsd_radius_index > 0")


def run_sweep(config: ExperimentConfig, threads: int = 1,
              sphere: CodeWeightSphere | None = None,
              decoder_kind: str = "two_stage") -> list:
    """Run the configured Monte-Carlo sweep.

    decoder_kind 'two_stage' runs the full pipeline; 'ml' runs the exact
    brute-force decoder on the same trial streams (oracle curves).
    Returns one SweepRecord per SNR point.
    """
    code = build_code(config)
    stage1 = _stage1_spec(config)
    params = _wsd_params(config)
    if decoder_kind == "two_stage":
        if sphere is None:
            sphere = resolve_sphere(config, code)
        resolved_m = params.resolve_filter_size(sphere)
    elif decoder_kind == "ml":
        sphere = None
        resolved_m = 0
        ml_decode(np.zeros(code.n), code)  # warm the codebook cache up front
    else:
        raise ConfigError(f"unknown decoder_kind {decoder_kind!r}")

    records = []
    start = time.monotonic()
    for snr_idx, snr_db in enumerate(config.snr_db_grid):
        sigma = _sigma_for(config, snr_db)

        def one_trial(trial: int) -> _TrialOutcome:
            sid_noise, sid_msg = _stream_ids(snr_idx, trial)
            msg_bits = gaussian_stream(config.seed, sid_msg).integers(
                0, 2, config.code_k, dtype=np.uint8)
            msg = BitVector.from_bits(msg_bits)
            x = modulate(encode(code, msg))
            y = awgn(x, sigma, config.seed, sid_noise)
            counters = OpCounter()
            if decoder_kind == "ml":
                codeword, _ = ml_decode(y, code, counters)
                return _TrialOutcome(code.message_of(codeword) != msg,
                                     False, 0, 0, counters)
            result = two_stage_decode(y, code, stage1, params, sphere,
                                      sigma=sigma, counters=counters)
            activated = result.stage == "mp_wsd"
            path_iters = sum(t.iterations_used for t in result.traces)
            return _TrialOutcome(result.best_message != msg, activated,
                                 path_iters, len(result.traces), counters)

        trials = errors = activated = 0
        path_iters_total = paths_total = 0
        total_counter = OpCounter()
        point_start = time.monotonic()
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            while trials < config.max_trials and errors < config.min_block_errors:
                if (config.max_wall_seconds is not None
                        and time.monotonic() - start > config.max_wall_seconds):
                    break
                batch = range(trials, min(trials + _BATCH, config.max_trials))
                for outcome in pool.map(one_trial, batch):
                    trials += 1
                    errors += outcome.error
                    activated += outcome.activated
                    path_iters_total += outcome.path_iterations
                    paths_total += outcome.paths
                    total_counter.merge(outcome.counters)

        bler = errors / trials
        lo, hi = wilson_interval(errors, trials)
        records.append(SweepRecord(
            code_label=code.label(),
            stage1_label=("ml" if decoder_kind == "ml"
                          else f"{config.stage1}{_stage1_size(config)}"),
            wsd_r=0 if decoder_kind == "ml" else config.wsd_radius_index,
            wsd_m=resolved_m,
            wsd_j=0 if decoder_kind == "ml" else config.wsd_max_iterations,
            num_paths=0 if decoder_kind == "ml" else config.wsd_num_paths,
            snr_db=snr_db,
            trials=trials,
            block_errors=errors,
            bler=bler,
            bler_lo=lo,
            bler_hi=hi,
            activation_rate=activated / trials,
            ed_units_mean=to_ed_units(total_counter, code.n) / trials,
            avg_iterations=(path_iters_total / paths_total) if paths_total else 0.0,
            stage1_pass_rate=(trials - activated) / trials,
            wall_seconds=time.monotonic() - point_start,
            seed=config.seed))
    return records


def _stage1_size(config: ExperimentConfig) -> int:
    return config.scl_list_size if config.stage1 == "scl" else config.osd_order


def _fmt(x: float) -> str:
    return format(x, ".6g")


def write_csv(records: list, path) -> None:
    """Fixed-schema CSV, one row per SNR point, 6 significant digits."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            r.code_label, r.stage1_label, str(r.wsd_r), str(r.wsd_m),
            str(r.wsd_j), str(r.num_paths), _fmt(r.snr_db), str(r.trials),
            str(r.block_errors), _fmt(r.bler), _fmt(r.bler_lo), _fmt(r.bler_hi),
            _fmt(r.activation_rate), _fmt(r.ed_units_mean),
            _fmt(r.avg_iterations), str(r.seed)]))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> list:
    """Read a sweep CSV back into a list of dicts (schema contract check)."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def sphere_summary(code: LinearCode, r: int) -> str:
    """Build the sphere and format its shell table (CLI support)."""
    sphere = build_sphere(code, r)
    lines = [f"code {code.label()}  radius index r = {r}",
             f"{'shell':>6} {'weight':>7} {'count':>10} {'cumulative':>11}"]
    cum = 0
    for i, (w, c) in enumerate(sphere.shell_table()):
        cum += c
        lines.append(f"{i:>6} {w:>7} {c:>10} {cum:>11}")
    lines.append(f"|S_r(0)| = {sphere.size} including the zero codeword "
                 f"({sphere.nonzero_size} without)")
    lines.append(f"mean nonzero member weight = {sphere.mean_nonzero_weight:.4f}")
    return "\n".join(lines)
