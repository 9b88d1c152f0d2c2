"""Exception hierarchy. Every error carries a stable machine-readable category
so CLI consumers can branch on failure kind without parsing messages."""


class EngineError(Exception):
    category = "engine"


class ConfigError(EngineError):
    """Invalid decoding parameters or CLI configuration."""

    category = "config"


class CoverageError(EngineError):
    """A word received no unmasked prediction; indicates a windowing bug."""

    category = "coverage"


class ProviderError(EngineError):
    """Provider cannot serve a requested window or rejects the transcript."""

    category = "provider"


class FormatError(EngineError):
    """Malformed input file (logits, plan, labels, config)."""

    category = "format"


class EvalError(EngineError):
    """Evaluation input mismatch."""

    category = "eval"
