"""Shared fixtures: deterministic providers and synthetic transcripts."""

import zlib

import numpy as np
import pytest

from winpunct import _fuse_py
from winpunct.fuse import _kernels
from winpunct.core import N_CLASSES, PunctClass
from winpunct.providers import DEFAULT_RULES, ProbabilityProvider, labels_from_rules

IMPLS = [pytest.param(_fuse_py, id="pure")]
if _kernels is not None:
    IMPLS.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=IMPLS)
def impl(request):
    return request.param


def _stable_hash(*parts) -> int:
    return zlib.crc32("|".join(str(p) for p in parts).encode("utf-8"))


class SeededMatrixProvider(ProbabilityProvider):
    """Random but deterministic distributions keyed by window placement."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def window_probs(self, tokens, start):
        rng = np.random.default_rng(_stable_hash(self.seed, start, len(tokens)))
        mat = rng.random((len(tokens), N_CLASSES)) + 1e-3
        return mat / mat.sum(axis=1, keepdims=True)


class EdgeFlipProvider(ProbabilityProvider):
    """Degrades predictions near window edges with deterministic errors.

    Interior positions predict the marker-implied class at high confidence;
    positions within `depth` of either window edge flip to a wrong class for
    a pseudo-random third of (token, placement) pairs. This reproduces the
    real failure mode of taggers at window boundaries: actual mistakes, not
    just diffuse confidence.
    """

    def __init__(self, depth=40, flip_every=3, confidence=0.9, wrong_confidence=0.6):
        self.depth = depth
        self.flip_every = flip_every
        self.confidence = confidence
        self.wrong_confidence = wrong_confidence

    def _true_class(self, token: str) -> PunctClass:
        for marker, cls in DEFAULT_RULES.items():
            if token.endswith(marker):
                return cls
        return PunctClass.O

    def window_probs(self, tokens, start):
        length = len(tokens)
        out = np.empty((length, N_CLASSES), dtype=np.float64)
        for pos, token in enumerate(tokens):
            cls = self._true_class(token)
            conf = self.confidence
            edge_dist = min(pos, length - 1 - pos)
            if edge_dist < self.depth and _stable_hash(token, start, pos) % self.flip_every == 0:
                cls = PunctClass((cls + 1 + _stable_hash(token, pos) % 3) % N_CLASSES)
                conf = self.wrong_confidence
            row = np.full(N_CLASSES, (1.0 - conf) / (N_CLASSES - 1))
            row[cls] = conf
            out[pos] = row
        return out


def make_marked_transcript(n_words: int, seed: int = 7):
    """Synthetic transcript whose suffix markers define the reference labels."""
    rng = np.random.default_rng(seed)
    markers = list(DEFAULT_RULES)
    tokens = []
    for i in range(n_words):
        token = f"w{i:05d}"
        draw = rng.random()
        if draw < 0.12:
            token += markers[int(rng.integers(len(markers)))]
        tokens.append(token)
    return tokens, labels_from_rules(tokens)
