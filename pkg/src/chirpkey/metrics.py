"""Evaluation metrics: disagreement ratio, generation rate, run lengths."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .quantizer import BitKey


@dataclass(frozen=True)
class MetricsReport:
    skdr: float
    skgr_bits_per_probe: float
    l0: int
    l1: int
    key_bits: int
    probes: int


def skdr(key_a: BitKey, key_g: BitKey) -> float:
    """Secret key disagreement ratio: Hamming distance / length."""
    if len(key_a) == 0 or len(key_a) != len(key_g):
        raise ParameterError("keys must be non-empty and of equal length")
    return float(np.mean(key_a.bits != key_g.bits))


def skgr(key_bits: int, probes: int) -> float:
    """Secret key generation rate in bits per channel probing."""
    if probes < 1:
        raise ParameterError("probes must be >= 1")
    return key_bits / probes


def max_run_lengths(bits) -> tuple[int, int]:
    """Longest run of consecutive 0s and of consecutive 1s."""
    b = bits.bits if isinstance(bits, BitKey) else np.asarray(bits, dtype=np.uint8)
    if b.size == 0:
        raise ParameterError("bit sequence must be non-empty")
    edges = np.flatnonzero(np.diff(b)) + 1
    bounds = np.concatenate(([0], edges, [len(b)]))
    lengths = np.diff(bounds)
    values = b[bounds[:-1]]
    l0 = int(lengths[values == 0].max()) if np.any(values == 0) else 0
    l1 = int(lengths[values == 1].max()) if np.any(values == 1) else 0
    return l0, l1


def report(key_a: BitKey, key_g: BitKey, probes: int = 1) -> MetricsReport:
    """Metrics of one probing round, computed on the initial keys."""
    l0, l1 = max_run_lengths(key_g)
    return MetricsReport(
        skdr=skdr(key_a, key_g),
        skgr_bits_per_probe=skgr(len(key_g), probes),
        l0=l0,
        l1=l1,
        key_bits=len(key_g),
        probes=probes,
    )
