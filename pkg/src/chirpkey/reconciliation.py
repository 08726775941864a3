"""Cascade information reconciliation over a parity-query oracle.

The correcting party never sees the reference key; it only asks for the
parity of index subsets.  Pass 1 works over blocks of k1 = ceil(0.73/QBER)
in natural order; each later pass doubles the block size under a fresh
seeded permutation.  Odd blocks are binary-searched for one error, and every
flip re-checks all previously seen blocks containing that position until no
known-odd block remains.  Parity answers are counted as leaked bits.
"""
from __future__ import annotations

import hashlib
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .quantizer import BitKey


@dataclass(frozen=True)
class CascadeConfig:
    """Protocol knobs.

    Block sizes double from k1 = ceil(0.73/QBER) but are capped at half the
    key so every pass keeps at least two blocks; with few passes an even
    clump of errors confined to one block survives undetected, so the
    default pass count is generous (late passes cost only a couple of
    parity bits each).
    """

    num_passes: int = 14
    qber_estimate: float | str = "auto"
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.num_passes < 1:
            raise ParameterError("num_passes must be >= 1")
        q = self.qber_estimate
        if isinstance(q, str):
            if q != "auto":
                raise ParameterError("qber_estimate must be a float or 'auto'")
        elif not (0.0 < q < 0.5):
            raise ParameterError("qber_estimate must lie in (0, 0.5)")


@dataclass(frozen=True)
class ReconciliationOutcome:
    corrected_key: BitKey
    parity_bits_leaked: int
    parity_messages: int
    converged: bool


@dataclass(frozen=True)
class QberSample:
    """Result of sampled QBER estimation; sampled positions are consumed."""

    estimate: float
    positions: np.ndarray = field(repr=False)


class LocalParityOracle:
    """In-process adapter answering parity queries over a visible key."""

    def __init__(self, key: BitKey | np.ndarray):
        bits = key.bits if isinstance(key, BitKey) else np.asarray(key, dtype=np.uint8)
        self._bits = bits

    def __len__(self) -> int:
        return len(self._bits)

    def parity(self, indices) -> int:
        return int(self._bits[np.asarray(indices, dtype=np.intp)].sum() & 1)

    def parities(self, index_sets: Sequence) -> list[int]:
        return [self.parity(idx) for idx in index_sets]


def initial_block_size(qber: float, key_len: int) -> int:
    """k1 = ceil(0.73/QBER), clamped to [4, key length]."""
    if not (0.0 < qber < 0.5):
        raise ParameterError("qber must lie in (0, 0.5)")
    return max(4, min(math.ceil(0.73 / qber), key_len))


def pass_block_sizes(k1: int, key_len: int, num_passes: int) -> list[int]:
    """Doubling schedule, capped at half the key length after pass 1."""
    cap = max(4, key_len // 2)
    sizes = []
    for p in range(num_passes):
        k = k1 if p == 0 else min(k1 << p, cap)
        sizes.append(min(k, key_len))
    return sizes


def binary_search_error(
    positions,
    parity_a: Callable,
    parity_g: Callable,
    block_parity_g: int | None = None,
) -> int:
    """Locate one genuinely differing position inside an odd block.

    ``positions`` is the block's index sequence (in the pass's permuted
    order); ``parity_a`` computes the local parity of an index subset and
    ``parity_g`` queries the far side.  The search halves the block, asking
    only for left-half parities (the right half's parity is inferred from
    the parent), so it spends at most ceil(log2(len)) queries.  Passing the
    already-known ``block_parity_g`` avoids re-querying the whole block.
    """
    seg = np.asarray(positions, dtype=np.intp)
    if seg.size == 0:
        raise ParameterError("block must be non-empty")
    pg = parity_g(seg) if block_parity_g is None else block_parity_g
    pa = parity_a(seg)
    while len(seg) > 1:
        half = (len(seg) + 1) // 2
        left = seg[:half]
        pg_left = parity_g(left)
        pa_left = parity_a(left)
        if pa_left != pg_left:
            seg, pa, pg = left, pa_left, pg_left
        else:
            seg, pa, pg = seg[half:], pa ^ pa_left, pg ^ pg_left
    return int(seg[0])


def _indices_digest(indices: np.ndarray) -> str:
    text = ",".join(str(int(i)) for i in indices)
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]


def cascade(
    key_a: BitKey,
    oracle_g,
    config: CascadeConfig,
    transcript: list[str] | None = None,
    on_flip: Callable[[int], None] | None = None,
) -> ReconciliationOutcome:
    """Reconcile ``key_a`` against the key behind the parity oracle.

    ``config.qber_estimate`` must be numeric here; "auto" is resolved by the
    pipeline via estimate_qber before cascading.  If ``transcript`` is a
    list, one CSV line "pass,block_id,indices_hash,parity_a,parity_g" is
    appended per parity answer; ``on_flip`` is called with every corrected
    position in order (audit hook).
    """
    if isinstance(config.qber_estimate, str):
        raise ParameterError(
            "qber_estimate is 'auto'; run estimate_qber first and pass the value"
        )
    n = len(oracle_g) if hasattr(oracle_g, "__len__") else len(key_a)
    if len(key_a) != n:
        raise ParameterError(f"key length {len(key_a)} != oracle key length {n}")
    if n == 0:
        raise ParameterError("keys must be non-empty")

    bits = key_a.bits.copy()
    k1 = initial_block_size(float(config.qber_estimate), n)
    rng = np.random.default_rng(config.rng_seed)

    leaked = 0
    messages = 0
    blocks: list[np.ndarray] = []          # positions of every seen block
    parity_g_of: list[int] = []            # far-side parity (fixed once learned)
    parity_a_of: list[int] = []            # local parity, updated on every flip
    by_position: dict[int, list[int]] = defaultdict(list)
    odd: set[int] = set()

    def log_query(pass_idx: int, block_id: int, idx: np.ndarray, pa: int, pg: int) -> None:
        if transcript is not None:
            transcript.append(
                f"{pass_idx},{block_id},{_indices_digest(idx)},{pa},{pg}"
            )

    def flip(pos: int) -> None:
        bits[pos] ^= 1
        if on_flip is not None:
            on_flip(pos)
        for bid in by_position[pos]:
            parity_a_of[bid] ^= 1
            if parity_a_of[bid] != parity_g_of[bid]:
                odd.add(bid)
            else:
                odd.discard(bid)

    def drain_odd(pass_idx: int) -> None:
        while odd:
            # smallest block first: fewest queries per correction
            bid = min(odd, key=lambda b: (len(blocks[b]), b))
            seg = blocks[bid]

            def parity_a_fn(idx):
                return int(bits[np.asarray(idx, dtype=np.intp)].sum() & 1)

            def parity_g_fn(idx):
                nonlocal leaked, messages
                pg = oracle_g.parity(idx)
                leaked += 1
                messages += 1
                log_query(pass_idx, bid, np.asarray(idx), parity_a_fn(idx), pg)
                return pg

            pos = binary_search_error(
                seg, parity_a_fn, parity_g_fn, block_parity_g=parity_g_of[bid]
            )
            flip(pos)

    sizes = pass_block_sizes(k1, n, config.num_passes)
    for pass_idx in range(config.num_passes):
        k = sizes[pass_idx]
        order = np.arange(n) if pass_idx == 0 else rng.permutation(n)
        new_blocks = [order[i : i + k] for i in range(0, n, k)]
        answers = oracle_g.parities(new_blocks)
        messages += 1
        leaked += len(answers)
        for seg, pg in zip(new_blocks, answers):
            bid = len(blocks)
            blocks.append(seg)
            parity_g_of.append(pg)
            pa = int(bits[seg].sum() & 1)
            parity_a_of.append(pa)
            for pos in seg:
                by_position[int(pos)].append(bid)
            if pa != pg:
                odd.add(bid)
            log_query(pass_idx, bid, seg, pa, pg)
        drain_odd(pass_idx)

    # final full-key parity comparison (a necessary, not sufficient, check)
    full = np.arange(n)
    pg_full = oracle_g.parity(full)
    messages += 1
    leaked += 1
    converged = int(bits.sum() & 1) == pg_full
    log_query(config.num_passes, -1, full, int(bits.sum() & 1), pg_full)

    return ReconciliationOutcome(
        corrected_key=BitKey(bits, "reconciled"),
        parity_bits_leaked=leaked,
        parity_messages=messages,
        converged=converged,
    )


def estimate_qber(
    key_a: BitKey,
    key_g: BitKey,
    sample_fraction: float,
    seed: int = 0,
) -> QberSample:
    """Estimate the disagreement rate from a disclosed random sample.

    The sampled positions become public and must be removed from both keys
    before cascading; they are returned alongside the clamped estimate.
    """
    if len(key_a) != len(key_g):
        raise ParameterError("keys must have equal length")
    if not (0.0 < sample_fraction <= 0.5):
        raise ParameterError("sample_fraction must lie in (0, 0.5]")
    n = len(key_a)
    count = max(1, math.ceil(sample_fraction * n))
    rng = np.random.default_rng(seed)
    positions = np.sort(rng.choice(n, size=count, replace=False))
    disagree = float(np.mean(key_a.bits[positions] != key_g.bits[positions]))
    return QberSample(float(np.clip(disagree, 0.01, 0.49)), positions)


def consume_positions(key: BitKey, positions: np.ndarray) -> BitKey:
    """Remove disclosed positions from a key (post-sampling hygiene)."""
    return BitKey(np.delete(key.bits, positions), key.stage)
