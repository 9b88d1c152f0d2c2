"""Domain types and window geometry for sliding-window punctuation decoding.

All types here are immutable after construction and safe to share across
threads; the module-level functions are pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigError, CoverageError

N_CLASSES = 4
PROB_SUM_TOL = 1e-6


class PunctClass(enum.IntEnum):
    """Closed label set. The integer values define the wire order used by
    every file format and probability vector in the engine."""

    O = 0
    COMMA = 1
    PERIOD = 2
    QUESTION = 3

    @property
    def mark(self) -> str:
        return _MARKS[self]

    @classmethod
    def from_name(cls, name: str) -> "PunctClass":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown punctuation class {name!r}") from None


WIRE_ORDER = tuple(c.name for c in PunctClass)
_MARKS = {
    PunctClass.O: "",
    PunctClass.COMMA: ",",
    PunctClass.PERIOD: ".",
    PunctClass.QUESTION: "?",
}
MARK_CHARS = ",.?"


class CombinerKind(enum.Enum):
    """How to fuse the multiple distributions available at one word."""

    MEAN = "mean"
    ENTROPY = "entropy"
    HAMMING = "hamming"

    @classmethod
    def parse(cls, text: str) -> "CombinerKind":
        key = text.strip().lower().replace("_", "-")
        if key in ("entropy", "entropy-weighted"):
            return cls.ENTROPY
        for kind in cls:
            if key == kind.value:
                return kind
        raise ConfigError(f"unknown combiner {text!r}")


def as_distribution(values: Sequence[float], tol: float = PROB_SUM_TOL) -> np.ndarray:
    """Validate a 4-class probability vector and renormalize it to sum exactly 1.

    Accepts sums within `tol` of 1 (upstream exporters emit rounded decimals)
    and clips negative entries no smaller than -1e-9.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (N_CLASSES,):
        raise ValueError(f"distribution must have {N_CLASSES} entries, got shape {arr.shape}")
    if arr.min() < -1e-9:
        raise ValueError(f"distribution has negative entry {arr.min()!r}")
    arr = np.clip(arr, 0.0, None)
    total = arr.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"distribution sums to {total!r}, outside 1 +/- {tol}")
    return arr / total


def as_prob_matrix(rows: Sequence[Sequence[float]], tol: float = PROB_SUM_TOL) -> np.ndarray:
    """Row-wise `as_distribution` for a whole window, vectorized."""
    mat = np.ascontiguousarray(rows, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != N_CLASSES:
        raise ValueError(f"probability matrix must be (len, {N_CLASSES}), got {mat.shape}")
    if mat.size and mat.min() < -1e-9:
        bad = int(np.argmin(mat.min(axis=1)))
        raise ValueError(f"row {bad} has negative entry")
    mat = np.clip(mat, 0.0, None)
    sums = mat.sum(axis=1)
    off = np.abs(sums - 1.0) > tol
    if off.any():
        bad = int(np.argmax(off))
        raise ValueError(f"row {bad} sums to {sums[bad]!r}, outside 1 +/- {tol}")
    return mat / sums[:, None]


@dataclass(frozen=True)
class DecodingConfig:
    """The tuple (window, stride, mask_left, mask_right, combiner) that fully
    determines a tagging decode."""

    window: int
    stride: int
    mask_left: int = 0
    mask_right: int = 0
    combiner: CombinerKind = CombinerKind.MEAN

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.mask_left < 0 or self.mask_right < 0:
            raise ConfigError("masks must be non-negative")
        span = self.window - (self.mask_left + self.mask_right)
        if span <= 0:
            raise ConfigError(
                f"masks {self.mask_left}+{self.mask_right} leave no unmasked "
                f"position in a window of {self.window}"
            )
        if not 1 <= self.stride <= span:
            raise ConfigError(
                f"stride must be in 1..{span} (window minus masks), got {self.stride}"
            )

    @property
    def base_stride(self) -> int:
        """Stride giving exactly one prediction per interior word."""
        return self.window - (self.mask_left + self.mask_right)


def compute_stride(window: int, mask_left: int, mask_right: int, overlap: int = 1) -> int:
    """Stride that yields at least `overlap` predictions per interior word.

    The no-overlap stride is `window - (mask_left + mask_right)`; dividing it
    by `overlap` and flooring guarantees the requested number of overlapping
    windows, with more at some words when the division is inexact.
    """
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    if mask_left < 0 or mask_right < 0:
        raise ConfigError("masks must be non-negative")
    span = window - (mask_left + mask_right)
    if span <= 0:
        raise ConfigError(f"masks {mask_left}+{mask_right} cover the whole window of {window}")
    if not 1 <= overlap <= span:
        raise ConfigError(f"overlap count must be in 1..{span}, got {overlap}")
    return span // overlap


@dataclass(frozen=True)
class WindowSpec:
    """Placement and effective masks of one window over the transcript.

    Boundary windows carry waived (zeroed) masks and the final window is
    clamped to the transcript end, so effective masks can differ from the
    config's nominal ones.
    """

    start: int
    length: int
    mask_left: int
    mask_right: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.length < 1:
            raise ConfigError(f"invalid window placement start={self.start} len={self.length}")
        if self.mask_left < 0 or self.mask_right < 0:
            raise ConfigError("window masks must be non-negative")
        if self.mask_left + self.mask_right >= self.length:
            raise ConfigError(
                f"window of length {self.length} has no unmasked position "
                f"under masks {self.mask_left}/{self.mask_right}"
            )

    @property
    def stop(self) -> int:
        return self.start + self.length

    @property
    def unmasked_start(self) -> int:
        return self.start + self.mask_left

    @property
    def unmasked_stop(self) -> int:
        return self.start + self.length - self.mask_right

    def covers(self, word_index: int) -> bool:
        return self.unmasked_start <= word_index < self.unmasked_stop


@dataclass(frozen=True)
class WindowPrediction:
    """A window plus the model's per-position distributions (masked positions
    included; they are dropped during assembly)."""

    spec: WindowSpec
    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.probs.shape != (self.spec.length, N_CLASSES):
            raise ValueError(
                f"prediction matrix {self.probs.shape} does not match window "
                f"length {self.spec.length}"
            )


@dataclass(frozen=True)
class TokenStream:
    """An unsegmented transcript: word tokens with optional reference labels."""

    tokens: tuple
    labels: Optional[tuple] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.labels is not None:
            labels = tuple(PunctClass(l) for l in self.labels)
            if len(labels) != len(self.tokens):
                raise ConfigError(
                    f"{len(labels)} labels for {len(self.tokens)} tokens"
                )
            object.__setattr__(self, "labels", labels)
        for tok in self.tokens:
            if any(ch in tok for ch in MARK_CHARS):
                raise ConfigError(
                    f"token {tok!r} contains punctuation mark characters; "
                    "input must be an unpunctuated transcript"
                )

    @classmethod
    def from_text(cls, text: str) -> "TokenStream":
        return cls(tuple(text.split()))

    def __len__(self) -> int:
        return len(self.tokens)


def generate_windows(transcript_len: int, config: DecodingConfig) -> list:
    """Place masked windows so their unmasked ranges tile the whole transcript.

    Starts advance by `config.stride`. The first window's left mask and the
    last window's right mask are waived so boundary words keep at least one
    prediction; the last window is clamped (never shifted) when it would
    overrun the transcript.
    """
    if transcript_len < 1:
        raise ConfigError(f"transcript length must be >= 1, got {transcript_len}")
    windows = []
    start = 0
    while True:
        length = min(config.window, transcript_len - start)
        last = start + config.window >= transcript_len
        windows.append(
            WindowSpec(
                start=start,
                length=length,
                mask_left=0 if start == 0 else config.mask_left,
                mask_right=0 if last else config.mask_right,
            )
        )
        if last:
            break
        start += config.stride
    return windows


class WordEntry(NamedTuple):
    """One window's contribution to one word: the distribution plus where the
    word sat inside that window (the positional combiner needs both)."""

    probs: np.ndarray
    window_index: int
    position: int
    window_length: int


def assemble_per_word(
    predictions: Sequence[WindowPrediction], transcript_len: int
) -> list:
    """Collect, for every word, the distributions of all windows in which the
    word is unmasked.

    Returns a list of `transcript_len` lists of `WordEntry`. Raises
    `CoverageError` if any word ends up with no entry.
    """
    per_word: list = [[] for _ in range(transcript_len)]
    for k, pred in enumerate(predictions):
        spec = pred.spec
        if spec.start < 0 or spec.stop > transcript_len:
            raise ConfigError(
                f"window {k} spans [{spec.start}, {spec.stop}) outside the "
                f"transcript of {transcript_len} words"
            )
        for pos in range(spec.mask_left, spec.length - spec.mask_right):
            per_word[spec.start + pos].append(
                WordEntry(pred.probs[pos], k, pos, spec.length)
            )
    for i, entries in enumerate(per_word):
        if not entries:
            raise CoverageError(f"word {i} received no unmasked prediction")
    return per_word


def interior_range(
    transcript_len: int, window: int, mask_left: int, mask_right: int
) -> tuple:
    """Word-index range [lo, hi) guaranteed the full overlap count.

    Words closer than one no-overlap stride plus the mask to either transcript
    boundary may be covered by fewer windows.
    """
    span = window - (mask_left + mask_right)
    lo = span + mask_left
    hi = transcript_len - (span + mask_right)
    return lo, hi
