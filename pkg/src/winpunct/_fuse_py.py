"""Pure numpy implementation of the fused per-word fusion kernel.

Semantics must match `_kernels.pyx` exactly: same accumulation order (rows in
window-major order), same single-entry shortcut, same uniform-entropy
fallback. Keep the two in lockstep.
"""

from __future__ import annotations

import numpy as np

MODE_MEAN = 0
MODE_ENTROPY = 1
MODE_HAMMING = 2

_MAX_ENTROPY = float(np.log(4.0))
_UNIFORM_EPS = 1e-12


def fuse(starts, lengths, mask_l, mask_r, offsets, probs, n_words, mode):
    """Combine every window's unmasked rows into one distribution per word.

    `probs` is the row-stacked concatenation of all window matrices;
    `offsets[k]` is window k's first row. Returns (combined (n_words, 4),
    counts (n_words,)); words with count 0 are left as zeros for the caller
    to report.
    """
    spans = lengths - mask_l - mask_r
    total = int(spans.sum())
    out = np.zeros((n_words, 4), dtype=np.float64)
    counts = np.zeros(n_words, dtype=np.int64)
    if total == 0:
        return out, counts

    span_base = np.cumsum(spans) - spans
    within = np.arange(total, dtype=np.int64) - np.repeat(span_base, spans)
    rows = np.repeat(offsets + mask_l, spans) + within
    words = np.repeat(starts + mask_l, spans) + within
    pos = np.repeat(mask_l, spans) + within
    wlen = np.repeat(lengths, spans)

    mat = probs[rows]
    counts += np.bincount(words, minlength=n_words)

    if mode == MODE_MEAN:
        weights = np.ones(total, dtype=np.float64)
    elif mode == MODE_ENTROPY:
        logs = np.where(mat > 0.0, np.log(np.where(mat > 0.0, mat, 1.0)), 0.0)
        weights = np.maximum(_MAX_ENTROPY + (mat * logs).sum(axis=1), 0.0)
    elif mode == MODE_HAMMING:
        denom = np.maximum(wlen - 1, 1)
        weights = 0.54 - 0.46 * np.cos(2.0 * np.pi * pos / denom)
        weights[wlen == 1] = 0.54
    else:
        raise ValueError(f"unknown fuse mode {mode}")

    np.add.at(out, words, weights[:, None] * mat)
    totw = np.bincount(words, weights=weights, minlength=n_words)

    covered = counts > 0
    if mode == MODE_ENTROPY:
        maxw = np.zeros(n_words, dtype=np.float64)
        np.maximum.at(maxw, words, weights)
        plain = np.zeros((n_words, 4), dtype=np.float64)
        np.add.at(plain, words, mat)
        uniform = covered & (maxw < _UNIFORM_EPS)
        normal = covered & ~uniform
        out[normal] /= totw[normal, None]
        out[uniform] = plain[uniform] / counts[uniform, None]
    else:
        out[covered] /= totw[covered, None]

    # Single-entry words take their row verbatim (exactness for n=1 decodes).
    single = counts[words] == 1
    out[words[single]] = mat[single]
    return out, counts
