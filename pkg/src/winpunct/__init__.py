"""Sliding-window punctuation decoding engine.

Slides masked, overlapping windows over an unsegmented token stream, fuses
the per-word probability distributions produced by an upstream model, and
emits punctuated text. Model access is abstracted behind providers; presets
reproduce prior decoding strategies and a real-time lookahead mode.
"""

__version__ = "0.1.0"

from .combiners import (
    combine_entropy_weighted,
    combine_hamming,
    combine_mean,
    decode_label,
    hamming_weight,
)
from .core import (
    CombinerKind,
    DecodingConfig,
    PunctClass,
    TokenStream,
    WindowPrediction,
    WindowSpec,
    WIRE_ORDER,
    as_distribution,
    as_prob_matrix,
    assemble_per_word,
    compute_stride,
    generate_windows,
    interior_range,
)
from .engine import (
    DecodeResult,
    decode_tagging,
    decode_tagging_reference,
    render_punctuated,
    strip_marks,
)
from .errors import (
    ConfigError,
    CoverageError,
    EngineError,
    EvalError,
    FormatError,
    ProviderError,
)
from .evaluation import EvalReport, compare_runs, evaluate
from .fuse import compiled_available, fuse_predictions
from .providers import (
    FileProvider,
    NoisyBoundaryProvider,
    ProbabilityProvider,
    RuleProvider,
    labels_from_rules,
    noisy_boundary_provider,
    provider_from_file,
    rule_provider,
    transcript_hash,
    write_logits_file,
)
from .strategies import (
    ResolvedStrategy,
    build_custom,
    preset_double_overlap,
    preset_overlapped_chunk,
    preset_realtime,
    sweep_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
