"""Fuse the probability distributions available at one word into a single
distribution, then decode an argmax label.

All combiners are pure, permutation-invariant over their input list, and
return a copy of the single input when only one distribution is present.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from .core import CombinerKind, N_CLASSES, PunctClass
from .errors import CoverageError

MAX_ENTROPY = math.log(N_CLASSES)
UNIFORM_WEIGHT_EPS = 1e-12

HAMMING_DC = 0.54
HAMMING_COS = 0.46


def _stack(dists: Sequence[np.ndarray]) -> np.ndarray:
    if len(dists) == 0:
        raise CoverageError("no distributions to combine")
    return np.asarray(dists, dtype=np.float64)


def combine_mean(dists: Sequence[np.ndarray]) -> np.ndarray:
    """Element-wise arithmetic mean."""
    rows = _stack(dists)
    if rows.shape[0] == 1:
        return rows[0].copy()
    return rows.mean(axis=0)


def entropy(dist: np.ndarray) -> float:
    """Shannon entropy in nats, with 0*log(0) taken as 0."""
    p = np.asarray(dist, dtype=np.float64)
    nz = p > 0.0
    return float(-(p[nz] * np.log(p[nz])).sum())


def _entropies(rows: np.ndarray) -> np.ndarray:
    logs = np.where(rows > 0.0, np.log(np.where(rows > 0.0, rows, 1.0)), 0.0)
    return -(rows * logs).sum(axis=1)


def combine_entropy_weighted(dists: Sequence[np.ndarray]) -> np.ndarray:
    """Weighted sum with weights proportional to (max entropy - entropy).

    Low-confidence (high-entropy) distributions are down-weighted. When every
    input is uniform all weights vanish and the mean is used instead.
    """
    rows = _stack(dists)
    if rows.shape[0] == 1:
        return rows[0].copy()
    weights = np.maximum(MAX_ENTROPY - _entropies(rows), 0.0)
    if weights.max() < UNIFORM_WEIGHT_EPS:
        return combine_mean(dists)
    combined = (weights[:, None] * rows).sum(axis=0)
    return combined / weights.sum()


def hamming_weight(position: int, window_length: int) -> float:
    """Positional weight: highest at the window center, 0.08 at the edges.

    A length-1 window has no meaningful position; it gets the DC coefficient.
    """
    if window_length == 1:
        return HAMMING_DC
    return HAMMING_DC - HAMMING_COS * math.cos(2.0 * math.pi * position / (window_length - 1))


def combine_hamming(entries: Sequence[Tuple[np.ndarray, int, int]]) -> np.ndarray:
    """Weighted sum of (distribution, within-window position, window length)
    triples, weighting each by its position's Hamming window value so copies
    with less one-sided context count less."""
    if len(entries) == 0:
        raise CoverageError("no distributions to combine")
    if len(entries) == 1:
        return np.asarray(entries[0][0], dtype=np.float64).copy()
    rows = np.asarray([e[0] for e in entries], dtype=np.float64)
    weights = np.asarray([hamming_weight(pos, wl) for _, pos, wl in entries])
    combined = (weights[:, None] * rows).sum(axis=0)
    return combined / weights.sum()


def combine_word(
    entries: Sequence[Tuple[np.ndarray, int, int]], kind: CombinerKind
) -> np.ndarray:
    """Apply the chosen combiner to one word's (dist, pos, win_len) entries."""
    if kind is CombinerKind.HAMMING:
        return combine_hamming(entries)
    dists = [e[0] for e in entries]
    if kind is CombinerKind.ENTROPY:
        return combine_entropy_weighted(dists)
    return combine_mean(dists)


def decode_label(dist: np.ndarray) -> PunctClass:
    """Argmax class; ties break to the lowest index (no punctuation first)."""
    return PunctClass(int(np.argmax(dist)))
