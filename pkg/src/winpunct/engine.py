"""End-to-end tagging decode: window plan -> provider queries -> fused labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .combiners import combine_word, decode_label
from .core import (
    DecodingConfig,
    PunctClass,
    WindowPrediction,
    WindowSpec,
    assemble_per_word,
    generate_windows,
)
from .errors import ProviderError
from .fuse import fuse_predictions
from .providers import ProbabilityProvider


@dataclass(frozen=True)
class DecodeResult:
    labels: tuple
    probs: np.ndarray
    windows: tuple

    def __len__(self) -> int:
        return len(self.labels)


def collect_predictions(
    tokens: Sequence[str],
    windows: Sequence[WindowSpec],
    provider: ProbabilityProvider,
) -> List[WindowPrediction]:
    """Query the provider once per window, validating shape and simplex."""
    from .core import as_prob_matrix

    provider.prepare(tokens)
    predictions = []
    for spec in windows:
        if provider.max_window is not None and spec.length > provider.max_window:
            raise ProviderError(
                f"window of {spec.length} exceeds provider capability "
                f"{provider.max_window}"
            )
        raw = provider.window_probs(tokens[spec.start : spec.stop], spec.start)
        try:
            probs = as_prob_matrix(raw)
        except ValueError as exc:
            raise ProviderError(f"window at start={spec.start}: {exc}") from None
        predictions.append(WindowPrediction(spec, probs))
    return predictions


def decode_tagging(
    tokens: Sequence[str],
    config: DecodingConfig,
    provider: ProbabilityProvider,
    impl=None,
) -> DecodeResult:
    """Decode one label per word by fusing all overlapping window predictions."""
    if len(tokens) == 0:
        return DecodeResult((), np.zeros((0, 4)), ())
    windows = generate_windows(len(tokens), config)
    predictions = collect_predictions(tokens, windows, provider)
    combined = fuse_predictions(predictions, len(tokens), config.combiner, impl=impl)
    labels = tuple(PunctClass(int(i)) for i in np.argmax(combined, axis=1))
    return DecodeResult(labels, combined, tuple(windows))


def decode_tagging_reference(
    tokens: Sequence[str],
    config: DecodingConfig,
    provider: ProbabilityProvider,
) -> DecodeResult:
    """Same decode through the unfused per-word path; cross-check for the
    kernel, and the ground truth in its tests."""
    if len(tokens) == 0:
        return DecodeResult((), np.zeros((0, 4)), ())
    windows = generate_windows(len(tokens), config)
    predictions = collect_predictions(tokens, windows, provider)
    per_word = assemble_per_word(predictions, len(tokens))
    combined = np.empty((len(tokens), 4), dtype=np.float64)
    labels = []
    for i, entries in enumerate(per_word):
        dist = combine_word(
            [(e.probs, e.position, e.window_length) for e in entries], config.combiner
        )
        combined[i] = dist
        labels.append(decode_label(dist))
    return DecodeResult(tuple(labels), combined, tuple(windows))


def render_punctuated(tokens: Sequence[str], labels: Sequence[PunctClass]) -> str:
    """Insert each word's predicted mark directly after it; single spaces,
    no casing changes. Stripping the marks recovers the token sequence."""
    if len(tokens) != len(labels):
        raise ValueError(f"{len(tokens)} tokens vs {len(labels)} labels")
    return " ".join(t + PunctClass(l).mark for t, l in zip(tokens, labels))


def strip_marks(text: str) -> List[str]:
    """Invert `render_punctuated`: drop trailing mark characters per token."""
    return [tok.rstrip(",.?") for tok in text.split()]
