"""Chirp-spread-spectrum baseband waveforms: upchirp symbols, preambles, detection.

Everything here is baseband; the carrier frequency is carried along for
bookkeeping but never mixed in. Sampling instants are t = n/fs starting at
t = 0, so sample 0 always has phase 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError, PreambleNotFoundError

DETECTION_THRESHOLD = 0.5


@dataclass(frozen=True)
class LoRaParams:
    """Modulation parameters of the chirp link.

    The symbol duration is T = 2**sf / bw and the chirp sweep rate is
    k = bw / T.  samples_per_symbol = T * fs must come out integer.
    """

    sf: int = 7
    bw: float = 250e3
    fs: float = 1e6
    preamble_len: int = 8
    fc: float = 868e6

    def __post_init__(self) -> None:
        if not (5 <= self.sf <= 12):
            raise ParameterError(f"sf must be in [5, 12], got {self.sf}")
        if self.bw <= 0 or self.fs < self.bw:
            raise ParameterError(f"need fs >= bw > 0, got bw={self.bw}, fs={self.fs}")
        if self.preamble_len < 1:
            raise ParameterError(f"preamble_len must be >= 1, got {self.preamble_len}")
        n = (2**self.sf / self.bw) * self.fs
        if abs(n - round(n)) > 1e-9:
            raise ParameterError(
                f"samples per symbol (2^sf/bw)*fs = {n} is not an integer"
            )

    @property
    def symbol_duration(self) -> float:
        return 2**self.sf / self.bw

    @property
    def sweep_rate(self) -> float:
        return self.bw / self.symbol_duration

    @property
    def samples_per_symbol(self) -> int:
        return round((2**self.sf / self.bw) * self.fs)


@dataclass(frozen=True)
class IqSamples:
    """Complex baseband signal with its sample rate."""

    samples: np.ndarray = field(repr=False)
    fs: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("samples must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ParameterError("samples contain non-finite values")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)


def gen_upchirp(params: LoRaParams) -> IqSamples:
    """One upchirp symbol: exp(j*pi*(-bw + k*t)*t) sampled at t = n/fs.

    The instantaneous frequency sweeps linearly from -bw/2 at t = 0 to
    +bw/2 at t = T; every sample has unit magnitude.
    """
    n_sym = params.samples_per_symbol
    t = np.arange(n_sym) / params.fs
    phase = np.pi * (-params.bw + params.sweep_rate * t) * t
    return IqSamples(np.exp(1j * phase), params.fs)


def gen_preamble(params: LoRaParams) -> IqSamples:
    """K identical upchirps back to back."""
    one = gen_upchirp(params).samples
    return IqSamples(np.tile(one, params.preamble_len), params.fs)


def detect_preamble(
    capture: IqSamples,
    params: LoRaParams,
    threshold: float = DETECTION_THRESHOLD,
) -> int:
    """Locate the preamble start in a capture by normalized cross-correlation.

    The full K-symbol preamble is used as the reference template: a single
    upchirp would produce K equal peaks (one per symbol boundary), making the
    start ambiguous under noise, whereas the K-symbol template peaks only at
    the true start.

    Returns the sample offset of the best peak.  Raises
    PreambleNotFoundError if the peak correlation is below ``threshold``.
    """
    template = gen_preamble(params).samples
    n = len(template)
    cap = capture.samples
    if len(cap) < n:
        raise ParameterError(
            f"capture has {len(cap)} samples, needs at least {n}"
        )
    # numerator: |<capture window, template>| at every lag
    num = np.abs(fftconvolve(cap, np.conj(template[::-1]), mode="valid"))
    # denominator: window energy * template energy
    window_energy = fftconvolve(np.abs(cap) ** 2, np.ones(n), mode="valid").real
    window_energy = np.maximum(window_energy, 0.0)
    den = np.sqrt(window_energy * np.sum(np.abs(template) ** 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(den > 0, num / den, 0.0)
    offset = int(np.argmax(corr))
    if corr[offset] < threshold:
        raise PreambleNotFoundError(
            f"best correlation {corr[offset]:.3f} below threshold {threshold}"
        )
    return offset
