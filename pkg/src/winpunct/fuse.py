"""Kernel selection and the array-packing front end for fused decoding.

The compiled extension is preferred when importable; set WINPUNCT_PURE=1 to
force the numpy fallback (the benchmark uses this to compare both).
"""

from __future__ import annotations

import os
from typing import Optional, Sequence

import numpy as np

from . import _fuse_py
from .core import CombinerKind, WindowPrediction
from .errors import CoverageError

try:
    from . import _kernels
except ImportError:  # pragma: no cover - depends on the build environment
    _kernels = None

_MODE_OF = {
    CombinerKind.MEAN: _fuse_py.MODE_MEAN,
    CombinerKind.ENTROPY: _fuse_py.MODE_ENTROPY,
    CombinerKind.HAMMING: _fuse_py.MODE_HAMMING,
}


def compiled_available() -> bool:
    return _kernels is not None


def active_impl():
    if os.environ.get("WINPUNCT_PURE"):
        return _fuse_py
    return _kernels if _kernels is not None else _fuse_py


def fuse_predictions(
    predictions: Sequence[WindowPrediction],
    transcript_len: int,
    kind: CombinerKind,
    impl=None,
) -> np.ndarray:
    """Combine all window predictions into one (transcript_len, 4) matrix.

    Equivalent to `assemble_per_word` followed by the per-word combiner, but
    in one pass over packed arrays.
    """
    if impl is None:
        impl = active_impl()
    n = len(predictions)
    starts = np.empty(n, dtype=np.int64)
    lengths = np.empty(n, dtype=np.int64)
    mask_l = np.empty(n, dtype=np.int64)
    mask_r = np.empty(n, dtype=np.int64)
    offsets = np.empty(n, dtype=np.int64)
    row = 0
    for k, pred in enumerate(predictions):
        spec = pred.spec
        starts[k] = spec.start
        lengths[k] = spec.length
        mask_l[k] = spec.mask_left
        mask_r[k] = spec.mask_right
        offsets[k] = row
        row += spec.length
    if n:
        probs = np.ascontiguousarray(np.concatenate([p.probs for p in predictions]))
    else:
        probs = np.zeros((0, 4), dtype=np.float64)

    combined, counts = impl.fuse(
        starts, lengths, mask_l, mask_r, offsets, probs, transcript_len, _MODE_OF[kind]
    )
    if (counts == 0).any():
        missing = int(np.argmax(counts == 0))
        raise CoverageError(f"word {missing} received no unmasked prediction")
    return combined
