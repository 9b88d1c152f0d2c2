import numpy as np
import pytest

from conftest import SeededMatrixProvider
from winpunct.core import CombinerKind, DecodingConfig
from winpunct.engine import decode_tagging
from winpunct.errors import ConfigError
from winpunct.providers import rule_provider
from winpunct.strategies import (
    build_custom,
    preset_double_overlap,
    preset_overlapped_chunk,
    preset_realtime,
    sweep_grid,
)


class TestDoubleOverlap:
    def test_masked_wide_window(self):
        cfg = preset_double_overlap(120, 30, 15)
        assert cfg.stride == 75
        assert (cfg.mask_left, cfg.mask_right) == (30, 15)

    def test_unmasked_stride_equals_window(self):
        cfg = preset_double_overlap(120, 0, 0)
        assert cfg.stride == 120

    def test_small_window(self):
        assert preset_double_overlap(20, 3, 6).stride == 11

    def test_invalid_masks(self):
        with pytest.raises(ConfigError):
            preset_double_overlap(10, 6, 4)


class TestOverlappedChunk:
    def test_splits_overlap_between_masks(self):
        cfg = preset_overlapped_chunk(stride=40, overlap_size=10, min_words_cut=4, window=50)
        assert (cfg.mask_left, cfg.mask_right, cfg.stride) == (6, 4, 40)

    def test_zero_cut(self):
        cfg = preset_overlapped_chunk(stride=40, overlap_size=10, min_words_cut=0, window=50)
        assert (cfg.mask_left, cfg.mask_right) == (10, 0)

    def test_full_cut(self):
        cfg = preset_overlapped_chunk(stride=40, overlap_size=10, min_words_cut=10, window=50)
        assert (cfg.mask_left, cfg.mask_right) == (0, 10)

    def test_cut_larger_than_overlap(self):
        with pytest.raises(ConfigError):
            preset_overlapped_chunk(stride=40, overlap_size=10, min_words_cut=11, window=50)


class TestRealtime:
    def test_zero_lookahead(self):
        cfg = preset_realtime(30, 0)
        assert (cfg.stride, cfg.mask_left, cfg.mask_right) == (1, 29, 0)

    def test_lookahead_four(self):
        cfg = preset_realtime(30, 4)
        assert (cfg.stride, cfg.mask_left, cfg.mask_right) == (1, 25, 4)

    def test_minimal_window(self):
        cfg = preset_realtime(2, 1)
        assert (cfg.stride, cfg.mask_left, cfg.mask_right) == (1, 0, 1)

    def test_single_unmasked_position(self):
        for lookahead in range(5):
            cfg = preset_realtime(30, lookahead)
            assert cfg.window - cfg.mask_left - cfg.mask_right == 1

    def test_lookahead_must_fit(self):
        with pytest.raises(ConfigError):
            preset_realtime(30, 30)


class TestBuildCustom:
    def test_four_way_overlap(self):
        cfg, n = build_custom(120, 30, 15, 4)
        assert (cfg.stride, n) == (18, 4)

    def test_no_overlap_unmasked(self):
        cfg, n = build_custom(120, 0, 0, 1)
        assert (cfg.stride, n) == (120, 1)

    def test_two_way_overlap(self):
        cfg, n = build_custom(120, 30, 15, 2)
        assert cfg.stride == 37

    def test_presets_always_valid(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            w = int(rng.integers(2, 200))
            ml = int(rng.integers(0, w))
            mr = int(rng.integers(0, w - ml))
            span = w - ml - mr
            cfg = preset_double_overlap(w, ml, mr)
            assert isinstance(cfg, DecodingConfig)
            n = int(rng.integers(1, span + 1))
            cfg, _ = build_custom(w, ml, mr, n)
            assert isinstance(cfg, DecodingConfig)
            lookahead = int(rng.integers(0, w))
            assert isinstance(preset_realtime(w, lookahead), DecodingConfig)


class TestEmulationEquivalence:
    @pytest.mark.parametrize("kind", list(CombinerKind))
    def test_double_overlap_equals_custom_n1(self, kind):
        provider = SeededMatrixProvider(seed=8)
        rng = np.random.default_rng(4)
        for _ in range(20):
            w = int(rng.integers(2, 40))
            ml = int(rng.integers(0, w))
            mr = int(rng.integers(0, w - ml))
            if w - ml - mr < 1:
                ml = mr = 0
            tokens = [f"t{i}" for i in range(int(rng.integers(1, 120)))]
            a = decode_tagging(
                tokens,
                preset_double_overlap(w, ml, mr, combiner=kind),
                provider,
            )
            custom_cfg, _ = build_custom(w, ml, mr, 1, combiner=kind)
            b = decode_tagging(tokens, custom_cfg, provider)
            assert a.labels == b.labels
            np.testing.assert_array_equal(a.probs, b.probs)


class TestRealtimeCausality:
    def test_label_ignores_tokens_beyond_lookahead(self):
        provider = rule_provider(confidence=0.8)
        tokens = [f"w{i}" for i in range(60)]
        tokens[20] += "·P"
        for lookahead in range(3):
            cfg = preset_realtime(12, lookahead)
            base = decode_tagging(tokens, cfg, provider).labels
            for i in (0, 10, 30):
                mutated = list(tokens)
                mutated[i + lookahead + 1] = "changed·Q"
                after = decode_tagging(mutated, cfg, provider).labels
                assert after[: i + 1] == base[: i + 1]


class TestSweepGrid:
    def test_product_size(self):
        cells = sweep_grid([15, 30, 60], [5], [0, 1, 2, 3, 4])
        assert len(cells) == 3
        assert all(cell.lookaheads == (0, 1, 2, 3, 4) for cell in cells)
        assert [cell.run_id for cell in cells] == ["w15_s5", "w30_s5", "w60_s5"]

    def test_contains_requested_cell(self):
        cells = sweep_grid([15, 30, 60], [5, 10], [0])
        assert any(cell.window == 30 and cell.stride == 5 for cell in cells)

    def test_empty_lookaheads_rejected(self):
        with pytest.raises(ConfigError):
            sweep_grid([15], [5], [])
