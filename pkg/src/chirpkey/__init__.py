"""Physical-layer secret key generation over chirp-spread-spectrum links.

Pipeline: chirp-preamble channel probing -> least-squares CFR estimation ->
shuffle-preprocessed adaptive dual-threshold quantization -> cascade
reconciliation -> SHA-256 key confirmation, with a randomness suite and a
seeded experiment harness on top.
"""
from .captures import ingest_capture, write_capture
from .cfr import Cfr, CfrAmplitudes, average_cfr, estimate_from_frame, ls_estimate
from .channel import (
    ChannelModel,
    ChannelRealization,
    ProbeResult,
    apply_channel,
    exponential_profile,
    probe,
    sample_channel,
)
from .config import ExperimentConfig, load_config
from .confirm import ConfirmationResult, KeyDigest, confirm, digest, serialize_key
from .errors import CaptureFormatError, ParameterError, PreambleNotFoundError
from .metrics import MetricsReport, max_run_lengths, skdr, skgr
from .nist import NistReport, run_suite
from .pipeline import (
    ExperimentRow,
    PipelineResult,
    export_probe_captures,
    run_captures,
    run_pipeline_once,
    run_sweep,
    run_trials,
)
from .quantizer import (
    BitKey,
    IndexList,
    QuantizerConfig,
    ThresholdPair,
    censoring_exchange,
    compute_thresholds,
    quantize,
    quantize_pipeline,
    shuffle,
)
from .reconciliation import (
    CascadeConfig,
    LocalParityOracle,
    ReconciliationOutcome,
    binary_search_error,
    cascade,
    estimate_qber,
)
from .waveform import IqSamples, LoRaParams, detect_preamble, gen_preamble, gen_upchirp

__version__ = "0.1.0"
