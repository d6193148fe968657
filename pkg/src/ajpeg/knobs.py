"""Precision-scaling and block-skipping knobs applied before the transform.

Truncation drops the B low bits of every level-shifted sample (rounding
half away from zero), shrinking the active datapath width. Block skipping
compares each block against the most recent *processed* block; if every
sample lies within a tolerance band the block's compression result is
reused and the transform is skipped entirely. Tolerance is 5*L for skip
level L in [0, 6]. Skip decisions read pixels only, never a block's own
compression result, so they are made on the pre-truncation samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ops import UNCOUNTED, IntOps

TRUNC_LEVELS = range(0, 5)
SKIP_LEVELS = range(0, 7)
EPSILON_STEP = 5

SAMPLE_MIN = -128
SAMPLE_MAX = 127


def skip_epsilon(level: int) -> int:
    if level not in SKIP_LEVELS:
        raise ValueError("skip level must be in [0, 6]")
    return EPSILON_STEP * level


def truncate_block(block, level: int, ops: IntOps = UNCOUNTED) -> np.ndarray:
    """Divide samples by 2**level, rounding half away from zero."""
    if level not in TRUNC_LEVELS:
        raise ValueError("truncation level must be in [0, 4]")
    m = np.asarray(block, dtype=np.int64)
    if level == 0:
        return m
    mag = ops.shr(ops.add(np.abs(m), 1 << (level - 1)), level)
    return np.where(m < 0, -mag, mag)


def skip_check(current, reference, epsilon: int, ops: IntOps = UNCOUNTED) -> bool:
    """True when every sample of current lies inside reference +- epsilon,
    with the band clamped to the signed sample range."""
    cur = np.asarray(current, dtype=np.int64)
    ref = np.asarray(reference, dtype=np.int64)
    ceil = np.minimum(ops.add(ref, epsilon), SAMPLE_MAX)
    floor = np.maximum(ops.sub(ref, epsilon), SAMPLE_MIN)
    return bool(np.all((cur <= ceil) & (cur >= floor)))


@dataclass
class PerforationResult:
    results: list
    skipped: np.ndarray  # bool per block


def perforate(
    blocks: np.ndarray,
    epsilon: int,
    compress: Callable,
    ops: IntOps = UNCOUNTED,
) -> PerforationResult:
    """Run compress over a block sequence, reusing results for blocks that
    match the latest processed block within epsilon.

    Block 0 is always compressed. The reference is the most recent block
    that was actually processed, not the most recent block seen.
    """
    n = len(blocks)
    if n == 0:
        return PerforationResult([], np.zeros(0, dtype=bool))
    results = []
    skipped = np.zeros(n, dtype=bool)
    ref = blocks[0]
    ref_result = compress(blocks[0])
    results.append(ref_result)
    for k in range(1, n):
        if skip_check(blocks[k], ref, epsilon, ops):
            skipped[k] = True
            results.append(ref_result)
        else:
            ref = blocks[k]
            ref_result = compress(blocks[k])
            results.append(ref_result)
    return PerforationResult(results, skipped)
