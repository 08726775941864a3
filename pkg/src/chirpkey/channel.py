"""Reciprocal multipath channel simulation and bidirectional probing.

Stands in for a physical indoor link: an L-tap Rayleigh channel with an
exponential power delay profile, a reciprocity knob rho correlating the
forward and reverse tap draws, and an eavesdropper channel drawn
independently (or co-located with the far end when independence is off).
All randomness is seed-deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cfr import Cfr, estimate_from_frame
from .errors import ParameterError
from .waveform import IqSamples, LoRaParams, gen_preamble


def exponential_profile(num_taps: int, decay_db: float = 3.0) -> np.ndarray:
    """Per-tap average power decaying by ``decay_db`` per tap, normalized to 1."""
    if num_taps < 1:
        raise ParameterError("num_taps must be >= 1")
    p = 10.0 ** (-decay_db * np.arange(num_taps) / 10.0)
    return p / p.sum()


@dataclass(frozen=True)
class ChannelModel:
    num_taps: int = 4
    power_delay_profile: np.ndarray | None = None
    reciprocity_rho: float = 0.99
    snr_db: float = 50.0
    eavesdropper_independent: bool = True

    def __post_init__(self) -> None:
        if self.num_taps < 1:
            raise ParameterError("num_taps must be >= 1")
        pdp = self.power_delay_profile
        if pdp is None:
            pdp = exponential_profile(self.num_taps)
        pdp = np.asarray(pdp, dtype=np.float64)
        if len(pdp) != self.num_taps:
            raise ParameterError("power_delay_profile length must equal num_taps")
        if np.any(pdp < 0) or abs(pdp.sum() - 1.0) > 1e-9:
            raise ParameterError("power_delay_profile entries must be >= 0 and sum to 1")
        if not (0.0 <= self.reciprocity_rho <= 1.0):
            raise ParameterError("reciprocity_rho must be in [0, 1]")
        object.__setattr__(self, "power_delay_profile", pdp)


@dataclass(frozen=True)
class ChannelRealization:
    forward_taps: np.ndarray
    reverse_taps: np.ndarray
    eve_taps: np.ndarray


@dataclass(frozen=True)
class ProbeResult:
    """CFR estimates from one bidirectional probing round (plus the listener)."""

    cfr_a: Cfr
    cfr_g: Cfr
    cfr_e: Cfr


def _cn_taps(rng: np.random.Generator, pdp: np.ndarray) -> np.ndarray:
    scale = np.sqrt(pdp / 2.0)
    return scale * (rng.standard_normal(len(pdp)) + 1j * rng.standard_normal(len(pdp)))


def sample_channel(model: ChannelModel, seed) -> ChannelRealization:
    """Draw one realization: forward/reverse jointly Gaussian with correlation rho.

    Per tap l: forward = g1, reverse = rho*g1 + sqrt(1-rho^2)*g2 with g1, g2
    i.i.d. CN(0, pdp[l]), so both directions keep the profile's per-tap power
    and correlate at exactly rho.  Eavesdropper taps are an independent draw
    with the same profile; with ``eavesdropper_independent`` off they equal
    the reverse taps (listener co-located with the far end).
    """
    rng = np.random.default_rng(seed)
    pdp = model.power_delay_profile
    g1 = _cn_taps(rng, pdp)
    g2 = _cn_taps(rng, pdp)
    ge = _cn_taps(rng, pdp)
    rho = model.reciprocity_rho
    forward = g1
    reverse = rho * g1 + np.sqrt(max(0.0, 1.0 - rho * rho)) * g2
    eve = ge if model.eavesdropper_independent else reverse.copy()
    return ChannelRealization(forward, reverse, eve)


def apply_channel(tx: IqSamples, taps: np.ndarray, snr_db, seed) -> IqSamples:
    """Convolve with the tap vector and add receiver noise at the given SNR.

    The linear convolution is truncated to the input length.  Noise is
    circularly-symmetric complex Gaussian scaled so that mean received
    signal power / noise power = 10**(snr_db/10); pass None or +inf to
    disable it.
    """
    taps = np.asarray(taps, dtype=np.complex128)
    if taps.size == 0:
        raise ParameterError("taps must be non-empty")
    y = np.convolve(tx.samples, taps)[: len(tx.samples)]
    if snr_db is not None and not np.isinf(snr_db):
        rng = np.random.default_rng(seed)
        p_rx = np.mean(np.abs(y) ** 2)
        noise_var = p_rx / 10.0 ** (snr_db / 10.0)
        y = y + np.sqrt(noise_var / 2.0) * (
            rng.standard_normal(len(y)) + 1j * rng.standard_normal(len(y))
        )
    return IqSamples(y, tx.fs)


def probe(
    params: LoRaParams,
    model: ChannelModel,
    seed,
    bin_policy: str = "all-bins",
) -> ProbeResult:
    """Run one bidirectional probing round over a shared channel realization.

    A's preamble reaches G through the forward taps, G's preamble reaches A
    through the reverse taps, and the eavesdropper overhears G's transmission
    through its own taps.  Both legitimate directions share one realization
    (block fading within a probing round); each receiver estimates the CFR
    from its received frame.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    s_real, s_g, s_a, s_e = ss.spawn(4)
    realization = sample_channel(model, s_real)
    tx = gen_preamble(params)
    rx_g = apply_channel(tx, realization.forward_taps, model.snr_db, s_g)
    rx_a = apply_channel(tx, realization.reverse_taps, model.snr_db, s_a)
    rx_e = apply_channel(tx, realization.eve_taps, model.snr_db, s_e)
    return ProbeResult(
        cfr_a=estimate_from_frame(rx_a, params, bin_policy),
        cfr_g=estimate_from_frame(rx_g, params, bin_policy),
        cfr_e=estimate_from_frame(rx_e, params, bin_policy),
    )
