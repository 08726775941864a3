"""End-to-end key generation runs, sweeps, and capture replay.

One trial: probe the channel, quantize both parties' CFR amplitudes into
initial keys, score them, estimate the disagreement rate (consuming the
sampled bits), cascade-reconcile, and confirm by digest exchange.  The
eavesdropper runs the identical public pipeline (shared shuffle rule, its
own thresholds, the overheard retained-index list) against its own CFR.

Simulated received frames are rounded to capture depth (complex64) before
estimation so that serializing them to capture files and replaying through
``run_captures`` reproduces a simulate-mode trial bit-for-bit.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np

from .captures import ingest_capture, write_capture
from .cfr import estimate_from_frame
from .channel import sample_channel, apply_channel
from .config import CSV_HEADER, ExperimentConfig, with_sweep_value
from .confirm import ConfirmationResult, confirm
from .errors import ParameterError, PreambleNotFoundError
from .metrics import MetricsReport
from .metrics import report as metrics_report
from .metrics import skdr as skdr_of
from .pipeline_seeds import TrialSeeds, derive_trial_seeds
from .quantizer import (
    BitKey,
    block_thresholds,
    censoring_exchange,
    quantize,
    shuffle,
)
from .reconciliation import (
    CascadeConfig,
    LocalParityOracle,
    QberSample,
    ReconciliationOutcome,
    cascade,
    consume_positions,
    estimate_qber,
)
from .waveform import IqSamples, detect_preamble, gen_preamble


@dataclass(frozen=True)
class PipelineResult:
    metrics: MetricsReport
    reconciliation: ReconciliationOutcome
    confirmation: ConfirmationResult
    eve_skdr: float | None
    key_a: BitKey
    key_g: BitKey
    reconciled_key_g: BitKey
    qber_estimate: float


@dataclass(frozen=True)
class ExperimentRow:
    sweep_axis: str
    sweep_value: float
    shuffle_on: bool
    skdr_mean: float
    skdr_std: float
    skgr_mean: float
    l0_mean: float
    l1_mean: float
    eve_skdr_mean: float
    cascade_converged_frac: float
    leak_mean: float
    trials: int
    seed: int

    def to_csv(self) -> str:
        def num(x: float) -> str:
            return f"{x:.10g}"

        return ",".join([
            self.sweep_axis,
            num(self.sweep_value),
            "on" if self.shuffle_on else "off",
            num(self.skdr_mean),
            num(self.skdr_std),
            num(self.skgr_mean),
            num(self.l0_mean),
            num(self.l1_mean),
            num(self.eve_skdr_mean),
            num(self.cascade_converged_frac),
            num(self.leak_mean),
            str(self.trials),
            str(self.seed),
        ])


def _capture_depth(iq: IqSamples) -> IqSamples:
    return IqSamples(iq.samples.astype(np.complex64).astype(np.complex128), iq.fs)


def _with_tail_pad(iq: IqSamples, params) -> IqSamples:
    # one symbol of silence after the frame, room for the aligner's slice
    pad = np.zeros(params.samples_per_symbol, dtype=np.complex128)
    return IqSamples(np.concatenate([iq.samples, pad]), iq.fs)


def aligned_frame(capture: IqSamples, params) -> IqSamples:
    """Locate the preamble and slice exactly K symbols from its start.

    Both simulate and capture-replay modes align through this one helper, so
    a serialized round reproduces a simulated one sample-for-sample even
    when multipath skews the correlation peak off the first tap.
    """
    offset = detect_preamble(capture, params)
    n = params.preamble_len * params.samples_per_symbol
    if offset + n > len(capture.samples):
        raise ParameterError(
            f"detected preamble at {offset} runs past the capture end"
        )
    return IqSamples(capture.samples[offset : offset + n], capture.fs)


def simulate_probe_frames(
    config: ExperimentConfig, trial_seeds: TrialSeeds
) -> tuple[IqSamples, IqSamples, IqSamples]:
    """Received frames at G, A, and the eavesdropper for one probing round.

    Frames carry a silent tail and are rounded to capture depth (complex64),
    exactly what export_probe_captures serializes.
    """
    model = config.channel
    realization = sample_channel(model, trial_seeds.channel)
    tx = gen_preamble(config.lora)
    rx_g = apply_channel(tx, realization.forward_taps, model.snr_db, trial_seeds.noise_g)
    rx_a = apply_channel(tx, realization.reverse_taps, model.snr_db, trial_seeds.noise_a)
    rx_e = apply_channel(tx, realization.eve_taps, model.snr_db, trial_seeds.noise_e)
    return tuple(
        _capture_depth(_with_tail_pad(rx, config.lora)) for rx in (rx_g, rx_a, rx_e)
    )


def _pipeline_from_frames(
    rx_g: IqSamples,
    rx_a: IqSamples,
    rx_e: IqSamples | None,
    config: ExperimentConfig,
    seeds: TrialSeeds,
) -> PipelineResult:
    """Distill keys from preamble-aligned received frames."""
    amps_g = estimate_from_frame(rx_g, config.lora, config.bin_policy).amplitudes()
    amps_a = estimate_from_frame(rx_a, config.lora, config.bin_policy).amplitudes()

    qcfg = config.quantizer
    if qcfg.shuffle_enabled:
        qcfg = replace(qcfg, shuffle_seed=seeds.shuffle)
        amps_a = shuffle(amps_a, qcfg.shuffle_seed)
        amps_g = shuffle(amps_g, qcfg.shuffle_seed)
    retained, th_a, th_g = censoring_exchange(amps_a, amps_g, qcfg)
    key_a = quantize(amps_a, retained, th_a, qcfg.encoding, qcfg.block_size)
    key_g = quantize(amps_g, retained, th_g, qcfg.encoding, qcfg.block_size)
    if len(key_g) == 0:
        raise ParameterError("quantization censored every position; lower alpha")

    scores = metrics_report(key_a, key_g, probes=1)

    eve_skdr = None
    if rx_e is not None:
        amps_e = estimate_from_frame(rx_e, config.lora, config.bin_policy).amplitudes()
        if qcfg.shuffle_enabled:
            amps_e = shuffle(amps_e, qcfg.shuffle_seed)
        th_e = block_thresholds(amps_e, qcfg)
        key_e = quantize(amps_e, retained, th_e, qcfg.encoding, qcfg.block_size)
        eve_skdr = skdr_of(key_e, key_g)

    # disagreement-rate estimation consumes its disclosed sample
    work_a, work_g = key_a, key_g
    qber = config.cascade.qber_estimate
    if isinstance(qber, str):
        sample: QberSample = estimate_qber(
            key_a, key_g, config.qber_sample_fraction, seeds.qber
        )
        qber = sample.estimate
        work_a = consume_positions(key_a, sample.positions)
        work_g = consume_positions(key_g, sample.positions)
    cascade_cfg = CascadeConfig(
        num_passes=config.cascade.num_passes,
        qber_estimate=float(qber),
        rng_seed=seeds.cascade,
    )
    outcome = cascade(work_a, LocalParityOracle(work_g), cascade_cfg)
    reconciled_g = replace(work_g, stage="reconciled")
    confirmation = confirm(outcome.corrected_key, reconciled_g)

    return PipelineResult(
        metrics=scores,
        reconciliation=outcome,
        confirmation=confirmation,
        eve_skdr=eve_skdr,
        key_a=key_a,
        key_g=key_g,
        reconciled_key_g=reconciled_g,
        qber_estimate=float(qber),
    )


def run_pipeline_once(config: ExperimentConfig, trial_seed: int) -> PipelineResult:
    """One simulated probing-and-distillation round."""
    seeds = derive_trial_seeds(config.master_seed, trial_seed)
    rx_g, rx_a, rx_e = simulate_probe_frames(config, seeds)
    return _pipeline_from_frames(
        aligned_frame(rx_g, config.lora),
        aligned_frame(rx_a, config.lora),
        aligned_frame(rx_e, config.lora),
        config,
        seeds,
    )


def run_captures(config: ExperimentConfig, trial_seed: int = 0) -> PipelineResult:
    """Replay recorded receptions instead of simulating the channel.

    Requires capture paths for the A->G and G->A receptions (and optionally
    the eavesdropper's).  Preambles are located by correlation before
    estimation; everything downstream is the simulate-mode pipeline.
    """
    if not config.capture_a2g or not config.capture_g2a:
        raise ParameterError("captures mode needs capture_a2g and capture_g2a paths")
    seeds = derive_trial_seeds(config.master_seed, trial_seed)

    def frame_from(path) -> IqSamples:
        cap = ingest_capture(path, config.lora)
        try:
            return aligned_frame(cap, config.lora)
        except (PreambleNotFoundError, ParameterError) as exc:
            # a capture too short for the configured preamble cannot contain it
            raise PreambleNotFoundError(f"{path}: {exc}") from exc

    rx_g = frame_from(config.capture_a2g)
    rx_a = frame_from(config.capture_g2a)
    rx_e = frame_from(config.capture_eve) if config.capture_eve else None
    return _pipeline_from_frames(rx_g, rx_a, rx_e, config, seeds)


def export_probe_captures(config: ExperimentConfig, trial_seed: int, directory) -> dict:
    """Simulate one round and serialize the three receptions as capture files."""
    import os

    os.makedirs(directory, exist_ok=True)
    seeds = derive_trial_seeds(config.master_seed, trial_seed)
    rx_g, rx_a, rx_e = simulate_probe_frames(config, seeds)
    paths = {
        "a2g": os.path.join(directory, f"trial{trial_seed}_a2g.cf32"),
        "g2a": os.path.join(directory, f"trial{trial_seed}_g2a.cf32"),
        "eve": os.path.join(directory, f"trial{trial_seed}_eve.cf32"),
    }
    write_capture(paths["a2g"], rx_g)
    write_capture(paths["g2a"], rx_a)
    write_capture(paths["eve"], rx_e)
    return paths


def _aggregate(
    results: list[PipelineResult],
    axis: str,
    value: float,
    shuffle_on: bool,
    seed: int,
) -> ExperimentRow:
    skdrs = np.array([r.metrics.skdr for r in results])
    eves = np.array([r.eve_skdr for r in results if r.eve_skdr is not None], dtype=float)
    return ExperimentRow(
        sweep_axis=axis,
        sweep_value=value,
        shuffle_on=shuffle_on,
        skdr_mean=float(skdrs.mean()),
        skdr_std=float(skdrs.std()),
        skgr_mean=float(np.mean([r.metrics.skgr_bits_per_probe for r in results])),
        l0_mean=float(np.mean([r.metrics.l0 for r in results])),
        l1_mean=float(np.mean([r.metrics.l1 for r in results])),
        eve_skdr_mean=float(eves.mean()) if eves.size else float("nan"),
        cascade_converged_frac=float(
            np.mean([r.reconciliation.converged for r in results])
        ),
        leak_mean=float(np.mean([r.reconciliation.parity_bits_leaked for r in results])),
        trials=len(results),
        seed=seed,
    )


def run_trials(config: ExperimentConfig) -> list[PipelineResult]:
    """``config.trials`` independent seeded rounds."""
    return [run_pipeline_once(config, t) for t in range(config.trials)]


def run_sweep(config: ExperimentConfig) -> list[ExperimentRow]:
    """Paired shuffle-on/off trials for every sweep value.

    Both arms of a sweep point consume identical channel realizations and
    noise (the trial seeds do not depend on the shuffle flag), so row
    differences are attributable to the preprocessing alone.
    """
    if config.sweep_axis is None:
        raise ParameterError("config has no sweep axis")
    rows = []
    for value in config.sweep_values:
        pinned = with_sweep_value(config, config.sweep_axis, value)
        for shuffle_on in (True, False):
            arm = replace(
                pinned, quantizer=replace(pinned.quantizer, shuffle_enabled=shuffle_on)
            )
            results = run_trials(arm)
            rows.append(
                _aggregate(results, config.sweep_axis, value, shuffle_on,
                           config.master_seed)
            )
    return rows


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for row in rows:
        out.write(row.to_csv() + "\n")
    return out.getvalue()
