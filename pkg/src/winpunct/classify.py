"""Classification-style input construction: a sentinel token marks the
position whose punctuation is being predicted, with a bounded lookahead and
left-truncation to the window size. One instance per word."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import N_CLASSES, PunctClass, TokenStream, as_distribution
from .errors import ConfigError, FormatError, ProviderError
from .providers import DEFAULT_RULES, transcript_hash

SENTINEL = "[PUNCT]"


@dataclass(frozen=True)
class ClassificationInstance:
    """Model input for one word: the truncated context with the sentinel
    inserted right after the word, followed by at most `lookahead` tokens."""

    word_index: int
    tokens: tuple
    punct_index: int
    lookahead: int
    target: Optional[PunctClass] = None

    def __post_init__(self) -> None:
        if self.tokens.count(SENTINEL) != 1 or self.tokens[self.punct_index] != SENTINEL:
            raise ValueError("instance must contain exactly one sentinel at punct_index")


def build_instance(
    tokens: Sequence[str],
    word_index: int,
    lookahead: int,
    window: int,
    target: Optional[PunctClass] = None,
) -> ClassificationInstance:
    """Build the instance for one word.

    Takes the transcript prefix up to `word_index + lookahead` (clamped to
    the end; a live stream has not produced later tokens yet), inserts the
    sentinel after the word, then removes tokens from the left until at most
    `window` remain. The sentinel itself is never truncated away.
    """
    n = len(tokens)
    if not 0 <= word_index < n:
        raise ConfigError(f"word_index {word_index} outside transcript of {n}")
    if lookahead < 0:
        raise ConfigError(f"lookahead must be >= 0, got {lookahead}")
    if window < 2:
        raise ConfigError(f"window {window} cannot hold the sentinel plus a token")
    right_stop = min(word_index + lookahead, n - 1)
    seq = list(tokens[: right_stop + 1])
    seq.insert(word_index + 1, SENTINEL)
    if len(seq) - (word_index + 1) > window:
        raise ConfigError(
            f"window {window} too small for lookahead {lookahead} at word {word_index}"
        )
    drop = max(0, len(seq) - window)
    seq = seq[drop:]
    return ClassificationInstance(
        word_index=word_index,
        tokens=tuple(seq),
        punct_index=word_index + 1 - drop,
        lookahead=lookahead,
        target=target,
    )


def stream_instances(
    stream, lookahead: int, window: int
) -> List[ClassificationInstance]:
    """One instance per word, in order; reference labels are attached when
    the stream carries them."""
    if isinstance(stream, TokenStream):
        tokens, labels = stream.tokens, stream.labels
    else:
        tokens, labels = tuple(stream), None
    return [
        build_instance(
            tokens,
            i,
            lookahead,
            window,
            target=labels[i] if labels is not None else None,
        )
        for i in range(len(tokens))
    ]


class SentenceProvider:
    """Maps a classification instance to one distribution. Deterministic."""

    def prepare(self, tokens: Sequence[str]) -> None:
        pass

    def instance_probs(self, instance: ClassificationInstance) -> np.ndarray:
        raise NotImplementedError


class RuleSentenceProvider(SentenceProvider):
    """Fires on the sentinel's left neighbor's suffix marker; mirrors the
    window-level rule provider so both pipelines can be compared head to
    head on the same fixture."""

    def __init__(self, rules=None, confidence: float = 1.0):
        if not 0.0 < confidence <= 1.0:
            raise ProviderError(f"confidence must be in (0, 1], got {confidence}")
        self.rules = dict(DEFAULT_RULES if rules is None else rules)
        self.confidence = confidence
        rest = (1.0 - confidence) / (N_CLASSES - 1)
        self._default = np.full(N_CLASSES, rest, dtype=np.float64)
        self._default[PunctClass.O] = confidence

    def instance_probs(self, instance: ClassificationInstance) -> np.ndarray:
        if instance.punct_index == 0:
            return self._default.copy()
        word = instance.tokens[instance.punct_index - 1]
        for marker, cls in self.rules.items():
            if word.endswith(marker):
                row = np.zeros(N_CLASSES, dtype=np.float64)
                row[cls] = 1.0
                return row
        return self._default.copy()


class ClassificationFileProvider(SentenceProvider):
    """Serves stored per-instance distributions keyed by word index."""

    def __init__(self, header, rows, source="<memory>"):
        self.source = source
        self.transcript_hash = header.get("transcript_hash")
        self._by_word = dict(rows)

    def prepare(self, tokens: Sequence[str]) -> None:
        if self.transcript_hash:
            actual = transcript_hash(tokens)
            if actual != self.transcript_hash:
                raise ProviderError(
                    f"{self.source}: transcript hash mismatch "
                    f"(file {self.transcript_hash}, stream {actual})"
                )

    def instance_probs(self, instance: ClassificationInstance) -> np.ndarray:
        try:
            return self._by_word[instance.word_index]
        except KeyError:
            raise ProviderError(
                f"{self.source}: no stored distribution for word {instance.word_index}"
            ) from None


def decode_classification(
    provider: SentenceProvider,
    tokens: Sequence[str],
    lookahead: int,
    window: int,
):
    """One label per word via the instance stream; comparable head-to-head
    with a realtime tagging decode at the same window and lookahead."""
    from .engine import DecodeResult

    if len(tokens) == 0:
        return DecodeResult((), np.zeros((0, 4)), ())
    provider.prepare(tokens)
    probs = np.empty((len(tokens), 4), dtype=np.float64)
    labels = []
    for instance in stream_instances(tokens, lookahead, window):
        try:
            dist = as_distribution(provider.instance_probs(instance))
        except (ValueError, ProviderError) as exc:
            raise ProviderError(f"word {instance.word_index}: {exc}") from None
        probs[instance.word_index] = dist
        labels.append(PunctClass(int(np.argmax(dist))))
    return DecodeResult(tuple(labels), probs, ())


# ---------------------------------------------------------------------------
# Serialization for the exporter handshake.


def write_instances(path, instances: Sequence[ClassificationInstance]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            rec = {
                "word_index": inst.word_index,
                "tokens": list(inst.tokens),
                "punct_index": inst.punct_index,
            }
            if inst.target is not None:
                rec["target"] = inst.target.name
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_instances(path, lookahead: int = 0) -> List[ClassificationInstance]:
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                target = rec.get("target")
                instances.append(
                    ClassificationInstance(
                        word_index=int(rec["word_index"]),
                        tokens=tuple(rec["tokens"]),
                        punct_index=int(rec["punct_index"]),
                        lookahead=lookahead,
                        target=PunctClass.from_name(target) if target else None,
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: bad instance record: {exc}") from None
    return instances


def write_classification_records(path, transcript_hash_hex, rows, params=None) -> None:
    """Store per-instance distributions: a header line then
    {word_index, probs} records."""
    from .core import WIRE_ORDER

    header = {
        "class_order": list(WIRE_ORDER),
        "transcript_hash": transcript_hash_hex,
        "params": params,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for word_index, probs in rows:
            rec = {
                "word_index": int(word_index),
                "probs": np.asarray(probs, dtype=np.float64).tolist(),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def classification_provider_from_file(path) -> ClassificationFileProvider:
    from .core import WIRE_ORDER

    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty classification records file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:1: bad header: {exc}") from None
    order = tuple(header.get("class_order") or ())
    if order != WIRE_ORDER:
        raise FormatError(
            f"{path}:1: class_order {list(order)} != required {list(WIRE_ORDER)}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            word_index = int(rec["word_index"])
            dist = as_distribution(rec["probs"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        rows.append((word_index, dist))
    return ClassificationFileProvider(header, rows, source=str(path))
