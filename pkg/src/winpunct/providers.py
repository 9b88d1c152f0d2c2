"""Upstream-model abstraction: anything that maps a window of tokens to
per-position probability distributions.

Includes the line-delimited logits file format for offline inference, a
deterministic rule-based provider for tests and demos, and a wrapper that
synthetically degrades predictions near window edges. Providers are read-only
after construction and safe for concurrent queries.
"""

from __future__ import annotations

import json
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .core import N_CLASSES, PunctClass, WIRE_ORDER
from .errors import FormatError, ProviderError

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def transcript_hash(tokens: Sequence[str]) -> str:
    """64-bit FNV-1a over the tokens joined with single spaces, hex-encoded."""
    h = FNV_OFFSET
    for byte in " ".join(tokens).encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


class ProbabilityProvider:
    """Per-window distribution source.

    Implementations must be deterministic: identical window content and
    placement yields identical output. `max_window`, when set, caps the
    window length the provider can serve.
    """

    max_window: Optional[int] = None
    class_order: Tuple[str, ...] = WIRE_ORDER

    def prepare(self, tokens: Sequence[str]) -> None:
        """Called once per decode with the full transcript; hook for
        integrity checks."""

    def window_probs(self, tokens: Sequence[str], start: int) -> np.ndarray:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Logits file format: one JSON header line, then one JSON record per window.


def write_logits_file(path, class_order, transcript_hash_hex, records, window_params=None):
    """Write windows as line-delimited JSON.

    `records` is an iterable of (start, tokens, probs) with probs any
    (len, 4) array-like. Floats serialize with their shortest round-trip
    representation, so write/read/write is byte-stable.
    """
    header = {
        "class_order": list(class_order),
        "transcript_hash": transcript_hash_hex,
        "window_params": window_params,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for start, tokens, probs in records:
            rec = {
                "start": int(start),
                "tokens": list(tokens),
                "probs": np.asarray(probs, dtype=np.float64).tolist(),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_logits_file(path):
    """Parse and validate a logits file.

    Returns (header dict, list of (start, tokens, probs matrix)). Rows must
    sum to 1 within the ingestion tolerance (violations report the offending
    line number) but are kept verbatim so write/read/write round-trips are
    byte-identical; the engine renormalizes at collection time.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty logits file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:1: bad header: {exc}") from None
    order = tuple(header.get("class_order") or ())
    if order != WIRE_ORDER:
        raise FormatError(
            f"{path}:1: class_order {list(order)} != required {list(WIRE_ORDER)}"
        )
    records = []
    prev_start = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            start = int(rec["start"])
            tokens = list(rec["tokens"])
            raw = rec["probs"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: bad record: {exc}") from None
        probs = np.asarray(raw, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[1] != len(WIRE_ORDER):
            raise FormatError(
                f"{path}:{lineno}: probs must be (len, {len(WIRE_ORDER)}), got {probs.shape}"
            )
        if probs.size and probs.min() < -1e-9:
            raise FormatError(f"{path}:{lineno}: negative probability entry")
        sums = probs.sum(axis=1)
        off = np.abs(sums - 1.0) > 1e-6
        if off.any():
            bad = int(np.argmax(off))
            raise FormatError(
                f"{path}:{lineno}: row {bad} sums to {sums[bad]!r}, outside 1 +/- 1e-06"
            )
        if len(tokens) != probs.shape[0]:
            raise FormatError(
                f"{path}:{lineno}: {len(tokens)} tokens but {probs.shape[0]} prob rows"
            )
        if prev_start is not None and start < prev_start:
            raise FormatError(f"{path}:{lineno}: records not sorted by start")
        prev_start = start
        records.append((start, tokens, probs))
    return header, records


class FileProvider(ProbabilityProvider):
    """Serves pre-computed distributions keyed by (start, len).

    Strict about geometry: the file must have been exported with the same
    window plan the decoder generates, and the stored transcript hash must
    match the token stream being decoded.
    """

    def __init__(self, header, records, source="<memory>"):
        self.source = source
        self.transcript_hash = header.get("transcript_hash")
        self.window_params = header.get("window_params")
        self._by_key: Dict[Tuple[int, int], np.ndarray] = {}
        for start, tokens, probs in records:
            key = (start, probs.shape[0])
            if key in self._by_key:
                raise FormatError(
                    f"{source}: duplicate window start={start} len={probs.shape[0]}"
                )
            self._by_key[key] = probs
        if self._by_key:
            self.max_window = max(length for _, length in self._by_key)

    def prepare(self, tokens: Sequence[str]) -> None:
        if self.transcript_hash:
            actual = transcript_hash(tokens)
            if actual != self.transcript_hash:
                raise ProviderError(
                    f"{self.source}: transcript hash mismatch "
                    f"(file {self.transcript_hash}, stream {actual})"
                )

    def window_probs(self, tokens: Sequence[str], start: int) -> np.ndarray:
        key = (start, len(tokens))
        try:
            return self._by_key[key]
        except KeyError:
            raise ProviderError(
                f"{self.source}: no stored window at start={start} len={len(tokens)}; "
                "re-export with the current window plan (see emit-windows)"
            ) from None


def provider_from_file(path) -> FileProvider:
    header, records = read_logits_file(path)
    return FileProvider(header, records, source=str(path))


# ---------------------------------------------------------------------------
# Deterministic fixtures.

DEFAULT_RULES = {
    "·C": PunctClass.COMMA,
    "·P": PunctClass.PERIOD,
    "·Q": PunctClass.QUESTION,
}


class RuleProvider(ProbabilityProvider):
    """Position-independent oracle: a token suffix marker fixes its class.

    Marked tokens get a one-hot distribution; unmarked tokens get the
    no-punctuation class at `confidence` with the remainder spread uniformly.
    """

    def __init__(self, rules=None, confidence: float = 1.0):
        if not 0.0 < confidence <= 1.0:
            raise ProviderError(f"confidence must be in (0, 1], got {confidence}")
        self.rules = dict(DEFAULT_RULES if rules is None else rules)
        self.confidence = confidence
        rest = (1.0 - confidence) / (N_CLASSES - 1)
        self._default = np.full(N_CLASSES, rest, dtype=np.float64)
        self._default[PunctClass.O] = confidence

    def token_probs(self, token: str) -> np.ndarray:
        for marker, cls in self.rules.items():
            if token.endswith(marker):
                row = np.zeros(N_CLASSES, dtype=np.float64)
                row[cls] = 1.0
                return row
        return self._default.copy()

    def window_probs(self, tokens: Sequence[str], start: int) -> np.ndarray:
        return np.asarray([self.token_probs(t) for t in tokens], dtype=np.float64)


def rule_provider(rules=None, confidence: float = 1.0) -> RuleProvider:
    return RuleProvider(rules, confidence)


def labels_from_rules(tokens: Sequence[str], rules=None):
    """Reference labels implied by the rule markers; pairs with RuleProvider
    when building synthetic fixtures."""
    rules = DEFAULT_RULES if rules is None else rules
    labels = []
    for token in tokens:
        for marker, cls in rules.items():
            if token.endswith(marker):
                labels.append(PunctClass(cls))
                break
        else:
            labels.append(PunctClass.O)
    return labels


def load_rules(path):
    """Parse a flat key=value rules file: marker lines map suffixes to class
    names; an optional `confidence` line sets the default-class confidence."""
    rules = {}
    confidence = 1.0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "confidence":
                try:
                    confidence = float(value)
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: bad confidence {value!r}") from None
            else:
                rules[key] = PunctClass.from_name(value)
    return (rules or None), confidence


class NoisyBoundaryProvider(ProbabilityProvider):
    """Mixes the base distribution with the uniform one near window edges.

    A position at distance d from the nearer edge of a length-L window is
    mixed at weight edge_noise * max(0, 1 - d/(L//2)); positions at least
    half a window from both edges pass through unchanged. Reproduces,
    synthetically, the confidence loss of predictions with little one-sided
    context.
    """

    def __init__(self, base: ProbabilityProvider, edge_noise: float):
        if not 0.0 <= edge_noise <= 1.0:
            raise ProviderError(f"edge_noise must be in [0, 1], got {edge_noise}")
        self.base = base
        self.edge_noise = edge_noise
        self.max_window = base.max_window

    def prepare(self, tokens: Sequence[str]) -> None:
        self.base.prepare(tokens)

    def window_probs(self, tokens: Sequence[str], start: int) -> np.ndarray:
        probs = np.array(self.base.window_probs(tokens, start), dtype=np.float64)
        if self.edge_noise == 0.0 or probs.shape[0] == 0:
            return probs
        length = probs.shape[0]
        idx = np.arange(length, dtype=np.float64)
        dist = np.minimum(idx, length - 1 - idx)
        half = max(1, length // 2)
        mix = self.edge_noise * np.maximum(0.0, 1.0 - dist / half)
        uniform = np.full(N_CLASSES, 1.0 / N_CLASSES)
        return (1.0 - mix)[:, None] * probs + mix[:, None] * uniform


def noisy_boundary_provider(base: ProbabilityProvider, edge_noise: float) -> NoisyBoundaryProvider:
    return NoisyBoundaryProvider(base, edge_noise)
