"""Shuffle-preprocessed adaptive dual-threshold quantization.

Both parties partition their CFR amplitude vectors into blocks of length m,
compute per-block thresholds mean +/- alpha*spread, censor values strictly
between their own thresholds through a two-message index exchange, and
quantize the surviving positions to bits.  An optional shared-seed shuffle
decorrelates adjacent amplitudes before blocking.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cfr import CfrAmplitudes
from .errors import ParameterError

ENCODINGS = ("plain", "d-gray")
SPREADS = ("std-dev", "variance")


@dataclass(frozen=True)
class QuantizerConfig:
    """Quantization knobs.

    ``spread`` picks the interpretation of the threshold width term:
    population standard deviation (default) or variance.  Values exactly
    equal to a threshold are kept and quantized by the non-strict
    comparisons; only values strictly inside the gap are censored.
    """

    alpha: float = 0.5
    block_size: int = 64
    shuffle_enabled: bool = True
    shuffle_seed: int = 0
    encoding: str = "plain"
    spread: str = "std-dev"

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ParameterError("alpha must be >= 0")
        if self.block_size < 2:
            raise ParameterError("block_size must be >= 2")
        if self.encoding not in ENCODINGS:
            raise ParameterError(f"encoding must be one of {ENCODINGS}")
        if self.spread not in SPREADS:
            raise ParameterError(f"spread must be one of {SPREADS}")


@dataclass(frozen=True)
class ThresholdPair:
    q_plus: float
    q_minus: float

    def __post_init__(self) -> None:
        if self.q_minus > self.q_plus:
            raise ParameterError("q_minus must not exceed q_plus")


@dataclass(frozen=True)
class IndexList:
    """Strictly increasing positions into the (possibly shuffled) amplitude vector."""

    indices: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ParameterError("indices must be strictly increasing")
        if idx.size and idx[0] < 0:
            raise ParameterError("indices must be non-negative")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def to_wire(self) -> str:
        """ASCII decimal, comma-separated, newline-terminated."""
        return ",".join(str(int(i)) for i in self.indices) + "\n"

    @classmethod
    def from_wire(cls, line: str) -> "IndexList":
        body = line.rstrip("\n")
        if body == "":
            return cls(np.array([], dtype=np.intp))
        return cls(np.array([int(tok) for tok in body.split(",")], dtype=np.intp))


@dataclass(frozen=True)
class BitKey:
    """Ordered bit sequence at one pipeline stage (initial/reconciled/final)."""

    bits: np.ndarray = field(repr=False)
    stage: str = "initial"

    def __post_init__(self) -> None:
        b = np.asarray(self.bits, dtype=np.uint8)
        if np.any(b > 1):
            raise ParameterError("bits must be 0 or 1")
        object.__setattr__(self, "bits", b)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(int(b)) for b in self.bits)


def shuffle(amps: CfrAmplitudes, seed: int) -> CfrAmplitudes:
    """Apply the seed-determined uniform random permutation (the shared rule)."""
    perm = np.random.default_rng(seed).permutation(len(amps.values))
    return CfrAmplitudes(amps.values[perm])


def compute_thresholds(block, alpha: float, spread: str = "std-dev") -> ThresholdPair:
    """Per-block thresholds mean(block) +/- alpha * spread(block)."""
    block = np.asarray(block, dtype=np.float64)
    if block.size == 0:
        raise ParameterError("block must be non-empty")
    if np.all(block == block[0]):
        # exactly zero spread: keep q+ == q- == c so nothing is censored
        c = float(block[0])
        return ThresholdPair(c, c)
    center = float(block.mean())
    width = float(block.std()) if spread == "std-dev" else float(block.var())
    return ThresholdPair(center + alpha * width, center - alpha * width)


def _block_slices(n: int, m: int) -> list[slice]:
    """Blocks of length m; a trailing remainder of >= 2 stands alone."""
    slices = [slice(i, min(i + m, n)) for i in range(0, n, m)]
    return slices


def block_thresholds(amps: CfrAmplitudes, config: QuantizerConfig) -> list[ThresholdPair]:
    """One ThresholdPair per block of the amplitude vector."""
    return [
        compute_thresholds(amps.values[s], config.alpha, config.spread)
        for s in _block_slices(len(amps.values), config.block_size)
    ]


def _censored_mask(amps: CfrAmplitudes, thresholds: list[ThresholdPair], m: int) -> np.ndarray:
    """True where a value falls strictly between its own block's thresholds.

    A trailing block of length 1 is censored outright (no usable spread).
    """
    v = amps.values
    mask = np.zeros(len(v), dtype=bool)
    for s, th in zip(_block_slices(len(v), m), thresholds):
        if s.stop - s.start < 2:
            mask[s] = True
            continue
        blk = v[s]
        mask[s] = (blk > th.q_minus) & (blk < th.q_plus)
    return mask


def censoring_exchange(
    amps_a: CfrAmplitudes,
    amps_g: CfrAmplitudes,
    config: QuantizerConfig,
) -> tuple[IndexList, list[ThresholdPair], list[ThresholdPair]]:
    """The two-message index-censoring exchange.

    Each party independently computes per-block thresholds and the set of
    its own positions strictly inside the gap.  The first message carries
    A's censored list to G; G unions it with its own and sends the union
    back; both retain the complement.  Returns the shared retained index
    list plus each party's per-block thresholds.
    """
    if len(amps_a.values) != len(amps_g.values):
        raise ParameterError("amplitude vectors must have equal length")
    th_a = block_thresholds(amps_a, config)
    th_g = block_thresholds(amps_g, config)
    m = config.block_size
    censored = _censored_mask(amps_a, th_a, m) | _censored_mask(amps_g, th_g, m)
    retained = IndexList(np.where(~censored)[0])
    return retained, th_a, th_g


def quantize(
    amps: CfrAmplitudes,
    retained: IndexList,
    thresholds: list[ThresholdPair],
    encoding: str = "plain",
    block_size: int = 64,
) -> BitKey:
    """Quantize the retained amplitude values against per-block thresholds.

    ``block_size`` must be the m the threshold list was computed with.  A
    value >= q_plus maps to 1 and <= q_minus maps to 0.  A retained value
    can still fall inside this party's gap (the retained set is shared but
    thresholds are not): it maps to the nearer threshold, ties to 1.  With
    d-gray encoding every 0 becomes 01 and every 1 becomes 10.
    """
    if encoding not in ENCODINGS:
        raise ParameterError(f"encoding must be one of {ENCODINGS}")
    expected = len(_block_slices(len(amps.values), block_size))
    if len(thresholds) != expected:
        raise ParameterError(
            f"{len(thresholds)} threshold pairs for {expected} blocks"
        )
    if len(retained.indices) and retained.indices[-1] >= len(amps.values):
        raise ParameterError("retained index out of bounds")
    v = amps.values[retained.indices]
    block_of = retained.indices // block_size
    qp = np.array([t.q_plus for t in thresholds])[block_of]
    qm = np.array([t.q_minus for t in thresholds])[block_of]
    gap_to_one = (qp - v) <= (v - qm)
    bits = np.where(v >= qp, 1, np.where(v <= qm, 0, gap_to_one)).astype(np.uint8)
    if encoding == "d-gray":
        bits = np.stack([bits, 1 - bits], axis=1).reshape(-1)
    return BitKey(bits, "initial")


def quantize_pipeline(
    amps_a: CfrAmplitudes,
    amps_g: CfrAmplitudes,
    config: QuantizerConfig,
) -> tuple[BitKey, BitKey]:
    """Shuffle (optional) -> censoring exchange -> per-party quantization."""
    if len(amps_a.values) != len(amps_g.values):
        raise ParameterError("amplitude vectors must have equal length")
    if config.shuffle_enabled:
        amps_a = shuffle(amps_a, config.shuffle_seed)
        amps_g = shuffle(amps_g, config.shuffle_seed)
    retained, th_a, th_g = censoring_exchange(amps_a, amps_g, config)
    key_a = quantize(amps_a, retained, th_a, config.encoding, config.block_size)
    key_g = quantize(amps_g, retained, th_g, config.encoding, config.block_size)
    return key_a, key_g
