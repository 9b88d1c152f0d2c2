"""Named preset constructors mapping prior decoding strategies and the
real-time setting onto DecodingConfig, plus the window/stride sweep grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .core import CombinerKind, DecodingConfig, compute_stride
from .errors import ConfigError

STRATEGY_NAMES = (
    "unmasked",
    "masked",
    "double-overlap",
    "overlapped-chunk",
    "realtime",
    "custom",
)


@dataclass(frozen=True)
class ResolvedStrategy:
    """A preset resolved to a concrete config plus its overlap count."""

    name: str
    config: DecodingConfig
    overlap: int = 1


def preset_double_overlap(
    window: int,
    mask_left: int,
    mask_right: int,
    combiner: CombinerKind = CombinerKind.MEAN,
) -> DecodingConfig:
    """Non-overlapping masked decoding: the stride equals the unmasked span,
    so every word gets exactly one prediction and the combiner is moot."""
    stride = compute_stride(window, mask_left, mask_right, 1)
    return DecodingConfig(window, stride, mask_left, mask_right, combiner)


def preset_overlapped_chunk(
    stride: int,
    overlap_size: int,
    min_words_cut: int,
    window: int,
    combiner: CombinerKind = CombinerKind.MEAN,
) -> DecodingConfig:
    """Chunk split-and-merge emulation: the overlap region maps onto the
    masks (cut words become the right mask, the rest the left mask) while the
    stride stays as given."""
    if min_words_cut < 0 or overlap_size < 1:
        raise ConfigError("overlap_size must be >= 1 and min_words_cut >= 0")
    if min_words_cut > overlap_size:
        raise ConfigError(
            f"min_words_cut {min_words_cut} exceeds overlap_size {overlap_size}"
        )
    if overlap_size >= window:
        raise ConfigError(f"overlap_size {overlap_size} must be < window {window}")
    return DecodingConfig(
        window=window,
        stride=stride,
        mask_left=overlap_size - min_words_cut,
        mask_right=min_words_cut,
        combiner=combiner,
    )


def preset_realtime(
    window: int, lookahead: int, combiner: CombinerKind = CombinerKind.MEAN
) -> DecodingConfig:
    """Streaming emulation: stride 1 with exactly one unmasked position per
    window, placed `lookahead` tokens before the window end."""
    if lookahead < 0:
        raise ConfigError(f"lookahead must be >= 0, got {lookahead}")
    if lookahead >= window:
        raise ConfigError(f"lookahead {lookahead} must be < window {window}")
    return DecodingConfig(
        window=window,
        stride=1,
        mask_left=window - lookahead - 1,
        mask_right=lookahead,
        combiner=combiner,
    )


def build_custom(
    window: int,
    mask_left: int,
    mask_right: int,
    overlap: int,
    combiner: CombinerKind = CombinerKind.MEAN,
) -> Tuple[DecodingConfig, int]:
    """Config for a requested overlap count; the stride comes out of
    `compute_stride`."""
    stride = compute_stride(window, mask_left, mask_right, overlap)
    return (
        DecodingConfig(window, stride, mask_left, mask_right, combiner),
        overlap,
    )


@dataclass(frozen=True)
class SweepCell:
    """One (window, stride) grid point plus the lookahead set its F1 scores
    are averaged over."""

    window: int
    stride: int
    lookaheads: tuple
    run_id: str


def sweep_grid(
    window_values: Sequence[int],
    stride_values: Sequence[int],
    lookahead_values: Sequence[int],
) -> list:
    """Cartesian product of window and stride values, each cell tagged with a
    stable identifier for the results table."""
    if not window_values or not stride_values or not lookahead_values:
        raise ConfigError("sweep requires non-empty window, stride and lookahead lists")
    cells = []
    for w in window_values:
        for s in stride_values:
            cells.append(
                SweepCell(
                    window=int(w),
                    stride=int(s),
                    lookaheads=tuple(int(l) for l in lookahead_values),
                    run_id=f"w{w}_s{s}",
                )
            )
    return cells
