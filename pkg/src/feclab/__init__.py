"""feclab: a short-blocklength forward-error-correction laboratory.

Provides packed GF(2) linear algebra, code constructions (CRC-precoded polar,
Reed-Muller, generic linear codes), a BPSK/AWGN channel with reproducible
counter-keyed randomness, offline code-weight-sphere construction, a family of
decoders (brute-force ML, successive-cancellation list, ordered-statistics,
and iterative sphere-refinement search from multiple anchors), a normalized
operation-cost model, and a seeded Monte-Carlo simulation harness with CSV
output and a CLI (`feclab sphere | simulate | mltruth`).
"""

__version__ = "0.1.0"

from feclab.binlin import BitMatrix, BitVector
from feclab.codebook import (
    CRC11,
    CrcSpec,
    LinearCode,
    ReliabilityOrder,
    build_ca_code,
    build_polar_code,
    build_rm_code,
    crc_append,
    crc_check,
    encode,
    polar_transform,
    reliability_order,
)
from feclab.channel import awgn, ebno_to_sigma, llr, modulate
from feclab.complexity import OpCounter, c_mp_wsd, c_osd, c_scl, c_wsd, to_ed_units
from feclab.decoders import (
    CandidateList,
    DecodeResult,
    OsdStage,
    SclStage,
    WsdParams,
    ml_decode,
    mp_wsd,
    osd_decode,
    scl_decode,
    two_stage_decode,
)
from feclab.wsphere import (
    CodeWeightSphere,
    WeightSpectrum,
    build_sphere,
    enumerate_spectrum,
    load_sphere,
    save_sphere,
)
