"""BPSK modulation, AWGN corruption, SNR conversion and LLR computation.

Received vectors are plain float64 arrays (finite entries enforced at the
channel boundary); ChannelParams bundles the noise level when a record of
the operating point is needed.

Randomness contract: noise is drawn from a counter-based Philox generator
keyed by (seed, stream_id), so every (seed, stream) pair is an independent,
reproducible stream regardless of how many trials run in parallel or in what
order.  Normal variates use numpy's ziggurat `standard_normal`; the numpy
major version is pinned in the package metadata to keep runs bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from feclab.binlin import BitVector

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelParams:
    """Noise level bundle; sigma is the linear noise standard deviation."""

    sigma: float
    ebno_db: float | None = None
    rate: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @classmethod
    def from_ebno(cls, ebno_db: float, rate: float) -> "ChannelParams":
        return cls(ebno_to_sigma(ebno_db, rate), ebno_db=ebno_db, rate=rate)


def modulate(c: BitVector) -> np.ndarray:
    """BPSK map: bit 0 -> +1.0, bit 1 -> -1.0."""
    return 1.0 - 2.0 * c.bits().astype(np.float64)


def modulate_bits(bits: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def ebno_to_sigma(ebno_db: float, rate: float) -> float:
    """Noise sigma for a per-information-bit SNR at unit symbol energy."""
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0)))


def esno_to_sigma(esno_db: float) -> float:
    """Noise sigma for a per-symbol SNR at unit symbol energy."""
    return math.sqrt(1.0 / (2.0 * 10.0 ** (esno_db / 10.0)))


def gaussian_stream(rng_seed: int, stream_id: int) -> np.random.Generator:
    """Independent reproducible stream for a (seed, stream) pair."""
    key = np.array([rng_seed & _MASK64, stream_id & _MASK64], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))


def awgn(x: np.ndarray, sigma: float, rng_seed: int, stream_id: int = 0) -> np.ndarray:
    """y = x + sigma * z with z i.i.d. standard normal from the (seed,
    stream_id) stream; identical arguments reproduce identical output."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("input symbols must be finite")
    z = gaussian_stream(rng_seed, stream_id).standard_normal(x.shape)
    return x + sigma * z


def llr(y: np.ndarray, sigma: float) -> np.ndarray:
    """Channel log-likelihood ratios 2*y/sigma^2; positive favors bit 0."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 2.0 * np.asarray(y, dtype=np.float64) / (sigma * sigma)


def squared_distance(y: np.ndarray, x: np.ndarray) -> float:
    """Squared Euclidean distance ||y - x||^2."""
    d = np.asarray(y, dtype=np.float64) - np.asarray(x, dtype=np.float64)
    return float(d @ d)
