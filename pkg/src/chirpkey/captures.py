"""Raw IQ capture files: interleaved little-endian float32 I/Q pairs.

This is the complex-float layout SDR file sinks write, so recorded
receptions can replace live probing byte-for-byte.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import CaptureFormatError
from .waveform import IqSamples, LoRaParams


def ingest_capture(path, params: LoRaParams) -> IqSamples:
    """Parse a capture file into complex samples at the configured rate."""
    data = np.fromfile(path, dtype=np.uint8)
    if len(data) % 8 != 0:
        raise CaptureFormatError(
            f"{os.fspath(path)}: size {len(data)} is not a multiple of 8 octets"
        )
    if len(data) == 0:
        raise CaptureFormatError(f"{os.fspath(path)}: empty capture")
    floats = data.view("<f4")
    bad = np.flatnonzero(~np.isfinite(floats))
    if bad.size:
        raise CaptureFormatError(
            f"{os.fspath(path)}: non-finite float at byte offset {int(bad[0]) * 4}"
        )
    samples = floats[0::2].astype(np.float64) + 1j * floats[1::2].astype(np.float64)
    return IqSamples(samples, params.fs)


def write_capture(path, iq: IqSamples) -> None:
    """Serialize samples as interleaved float32 pairs (the ingest inverse).

    Values are cast to float32; a round trip is bit-identical once the
    samples are already at capture depth.
    """
    as32 = iq.samples.astype(np.complex64)
    interleaved = np.empty(2 * len(as32), dtype="<f4")
    interleaved[0::2] = as32.real
    interleaved[1::2] = as32.imag
    interleaved.tofile(path)
