"""Command-line front end: decode, emit-windows, emit-instances, eval, sweep.

Every run is deterministic; a manifest written with --write-manifest is a
flat key=value config file that, fed back through --config, reproduces the
run byte for byte. Precedence: explicit flags > config file > preset
defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from . import __version__
from .classify import (
    RuleSentenceProvider,
    classification_provider_from_file,
    decode_classification,
    stream_instances,
    write_instances,
)
from .core import CombinerKind, DecodingConfig, TokenStream, generate_windows
from .engine import decode_tagging, render_punctuated
from .errors import ConfigError, EngineError
from .evaluation import evaluate, percent, read_labels, render_report, write_labels
from .providers import (
    RuleProvider,
    load_rules,
    noisy_boundary_provider,
    provider_from_file,
    transcript_hash,
)
from .strategies import (
    STRATEGY_NAMES,
    ResolvedStrategy,
    build_custom,
    preset_double_overlap,
    preset_overlapped_chunk,
    preset_realtime,
    sweep_grid,
)

_INT_KEYS = {
    "window",
    "stride",
    "mask_left",
    "mask_right",
    "overlap_n",
    "lookahead",
    "overlap_size",
    "min_words_cut",
    "length",
}
_FLOAT_KEYS = {"edge_noise"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | {
    "strategy",
    "combiner",
    "mode",
    "provider",
    "transcript",
    "output_text",
    "output_labels",
    "output",
    "format",
    "average",
    "predicted",
    "reference",
    "labels",
    "windows",
    "strides",
    "lookaheads",
}
_IGNORED_KEYS = {"command", "engine_version", "deterministic", "transcript_hash"}


def _read_config(path) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key in _IGNORED_KEYS:
                continue
            if key not in _ALL_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def _merge_config(args: argparse.Namespace) -> None:
    """Fill argparse Nones from the config file, coercing types."""
    if not getattr(args, "config", None):
        return
    values = _read_config(args.config)
    for key, raw in values.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in _INT_KEYS:
            setattr(args, key, int(raw))
        elif key in _FLOAT_KEYS:
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)


def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def _parse_int_list(text: str, flag: str) -> List[int]:
    try:
        items = [int(part) for part in str(text).split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} must be a comma-separated integer list") from None
    if not items:
        raise ConfigError(f"{flag} must not be empty")
    return items


def resolve_strategy(args: argparse.Namespace) -> ResolvedStrategy:
    name = (args.strategy or "custom").lower()
    combiner = CombinerKind.parse(args.combiner or "mean")
    if name == "unmasked":
        w = args.window if args.window is not None else 120
        return ResolvedStrategy("unmasked", preset_double_overlap(w, 0, 0, combiner), 1)
    if name == "masked":
        w = args.window if args.window is not None else 120
        ml = args.mask_left if args.mask_left is not None else 30
        mr = args.mask_right if args.mask_right is not None else 15
        s = args.stride if args.stride is not None else 70
        return ResolvedStrategy("masked", DecodingConfig(w, s, ml, mr, combiner), 1)
    if name == "double-overlap":
        w = _require(args.window, "--window")
        config = preset_double_overlap(
            w, args.mask_left or 0, args.mask_right or 0, combiner
        )
        return ResolvedStrategy(name, config, 1)
    if name == "overlapped-chunk":
        config = preset_overlapped_chunk(
            stride=_require(args.stride, "--stride"),
            overlap_size=_require(args.overlap_size, "--overlap-size"),
            min_words_cut=args.min_words_cut or 0,
            window=_require(args.window, "--window"),
            combiner=combiner,
        )
        return ResolvedStrategy(name, config, 1)
    if name == "realtime":
        w = _require(args.window, "--window")
        config = preset_realtime(w, args.lookahead or 0, combiner)
        return ResolvedStrategy(name, config, 1)
    if name == "custom":
        w = _require(args.window, "--window")
        ml = args.mask_left or 0
        mr = args.mask_right or 0
        if args.stride is not None:
            config = DecodingConfig(w, args.stride, ml, mr, combiner)
            overlap = config.base_stride // config.stride
            return ResolvedStrategy(name, config, max(1, overlap))
        config, overlap = build_custom(w, ml, mr, args.overlap_n or 1, combiner)
        return ResolvedStrategy(name, config, overlap)
    raise ConfigError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)}")


def build_window_provider(spec: Optional[str], edge_noise: float):
    spec = _require(spec, "--provider")
    kind, _, arg = spec.partition(":")
    if kind == "file":
        base = provider_from_file(_require(arg or None, "provider path"))
    elif kind == "rule":
        rules, confidence = load_rules(arg) if arg else (None, 1.0)
        base = RuleProvider(rules, confidence)
    else:
        raise ConfigError(f"unknown provider scheme {kind!r} (use file:PATH or rule:PATH)")
    if edge_noise:
        base = noisy_boundary_provider(base, edge_noise)
    return base


def build_sentence_provider(spec: Optional[str]):
    spec = _require(spec, "--provider")
    kind, _, arg = spec.partition(":")
    if kind == "file":
        return classification_provider_from_file(_require(arg or None, "provider path"))
    if kind == "rule":
        rules, confidence = load_rules(arg) if arg else (None, 1.0)
        return RuleSentenceProvider(rules, confidence)
    raise ConfigError(f"unknown provider scheme {kind!r} (use file:PATH or rule:PATH)")


def _write_manifest(path, command: str, values: Dict[str, object]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"command={command}\n")
        fh.write(f"engine_version={__version__}\n")
        fh.write("deterministic=true\n")
        for key, value in values.items():
            if value is None:
                continue
            fh.write(f"{key}={value}\n")


def _read_transcript(path) -> TokenStream:
    with open(path, "r", encoding="utf-8") as fh:
        return TokenStream.from_text(fh.read())


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_decode(args: argparse.Namespace) -> int:
    _merge_config(args)
    stream = _read_transcript(_require(args.transcript, "--transcript"))
    mode = (args.mode or "tagging").lower()
    edge_noise = args.edge_noise or 0.0
    out_text = args.output_text or f"{args.transcript}.punct.txt"
    out_labels = args.output_labels or f"{args.transcript}.labels"

    manifest: Dict[str, object] = {"mode": mode, "provider": args.provider}
    if mode == "tagging":
        strategy = resolve_strategy(args)
        provider = build_window_provider(args.provider, edge_noise)
        result = decode_tagging(stream.tokens, strategy.config, provider)
        manifest.update(
            strategy=strategy.name,
            window=strategy.config.window,
            stride=strategy.config.stride,
            mask_left=strategy.config.mask_left,
            mask_right=strategy.config.mask_right,
            overlap_n=strategy.overlap,
            combiner=strategy.config.combiner.value,
            lookahead=args.lookahead,
            overlap_size=args.overlap_size,
            min_words_cut=args.min_words_cut,
        )
    elif mode == "classification":
        window = _require(args.window, "--window")
        lookahead = args.lookahead or 0
        provider = build_sentence_provider(args.provider)
        result = decode_classification(provider, stream.tokens, lookahead, window)
        manifest.update(window=window, lookahead=lookahead)
    else:
        raise ConfigError(f"unknown mode {mode!r} (tagging or classification)")

    manifest.update(
        edge_noise=edge_noise if edge_noise else None,
        transcript=args.transcript,
        output_text=out_text,
        output_labels=out_labels,
    )
    _emit(render_punctuated(stream.tokens, result.labels) + "\n", out_text)
    write_labels(out_labels, result.labels)
    if args.write_manifest:
        _write_manifest(args.write_manifest, "decode", manifest)
    print(f"decoded {len(stream)} words -> {out_text}")
    return 0


def cmd_emit_windows(args: argparse.Namespace) -> int:
    _merge_config(args)
    if args.transcript:
        length = len(_read_transcript(args.transcript))
    else:
        length = _require(args.length, "--transcript or --length")
    strategy = resolve_strategy(args)
    lines = [
        f"{w.start}\t{w.length}\t{w.mask_left}\t{w.mask_right}"
        for w in generate_windows(length, strategy.config)
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_emit_instances(args: argparse.Namespace) -> int:
    _merge_config(args)
    stream = _read_transcript(_require(args.transcript, "--transcript"))
    if args.labels:
        stream = TokenStream(stream.tokens, tuple(read_labels(args.labels)))
    window = _require(args.window, "--window")
    lookahead = args.lookahead or 0
    instances = stream_instances(stream, lookahead, window)
    write_instances(_require(args.output, "--output"), instances)
    print(f"wrote {len(instances)} instances -> {args.output}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    _merge_config(args)
    predicted = read_labels(_require(args.predicted, "--predicted"))
    reference = read_labels(_require(args.reference, "--reference"))
    report = evaluate(predicted, reference, average=args.average or "micro")
    rendered = render_report(report, fmt=args.format or "table")
    _emit(rendered, args.output)
    if args.write_manifest:
        _write_manifest(
            args.write_manifest,
            "eval",
            {
                "predicted": args.predicted,
                "reference": args.reference,
                "format": args.format or "table",
                "average": args.average or "micro",
                "output": args.output,
            },
        )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    _merge_config(args)
    stream = _read_transcript(_require(args.transcript, "--transcript"))
    reference = read_labels(_require(args.reference, "--reference"))
    cells = sweep_grid(
        _parse_int_list(_require(args.windows, "--windows"), "--windows"),
        _parse_int_list(_require(args.strides, "--strides"), "--strides"),
        _parse_int_list(_require(args.lookaheads, "--lookaheads"), "--lookaheads"),
    )
    mode = (args.mode or "tagging").lower()
    combiner = args.combiner or "mean"
    template = _require(args.provider, "--provider")
    edge_noise = args.edge_noise or 0.0

    rows = []
    for cell in cells:
        f1s = []
        for lookahead in cell.lookaheads:
            spec = template.format(w=cell.window, s=cell.stride, l=lookahead)
            try:
                if mode == "tagging":
                    provider = build_window_provider(spec, edge_noise)
                    config = preset_realtime(
                        cell.window, lookahead, CombinerKind.parse(combiner)
                    )
                    result = decode_tagging(stream.tokens, config, provider)
                elif mode == "classification":
                    provider = build_sentence_provider(spec)
                    result = decode_classification(
                        provider, stream.tokens, lookahead, cell.window
                    )
                else:
                    raise ConfigError(f"unknown mode {mode!r}")
            except EngineError as exc:
                raise type(exc)(f"sweep {cell.run_id} l={lookahead}: {exc}") from None
            report = evaluate(result.labels, reference)
            f1s.append(report.overall.f1)
        rows.append((cell, f1s, sum(f1s) / len(f1s)))

    best = max(range(len(rows)), key=lambda i: rows[i][2])
    fmt = args.format or "table"
    if fmt == "records":
        lines = []
        for i, (cell, f1s, avg) in enumerate(rows):
            lines.append(
                json.dumps(
                    {
                        "run_id": cell.run_id,
                        "window": cell.window,
                        "stride": cell.stride,
                        "lookaheads": list(cell.lookaheads),
                        "f1": f1s,
                        "avg_f1": avg,
                        "best": i == best,
                    },
                    separators=(",", ":"),
                )
            )
        rendered = "\n".join(lines) + "\n"
    elif fmt == "table":
        lookaheads = rows[0][0].lookaheads
        header = f"{'run':<12}{'window':>8}{'stride':>8}"
        header += "".join(f"{f'f1@l{l}':>9}" for l in lookaheads)
        header += f"{'avg_f1':>9}  best"
        lines = [header]
        for i, (cell, f1s, avg) in enumerate(rows):
            line = f"{cell.run_id:<12}{cell.window:>8}{cell.stride:>8}"
            line += "".join(f"{percent(f):>9}" for f in f1s)
            line += f"{percent(avg):>9}  {'*' if i == best else ''}"
            lines.append(line.rstrip())
        rendered = "\n".join(lines) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    _emit(rendered, args.output)

    if args.write_manifest:
        _write_manifest(
            args.write_manifest,
            "sweep",
            {
                "windows": args.windows,
                "strides": args.strides,
                "lookaheads": args.lookaheads,
                "provider": template,
                "mode": mode,
                "combiner": combiner,
                "edge_noise": edge_noise if edge_noise else None,
                "transcript": args.transcript,
                "reference": args.reference,
                "format": fmt,
                "output": args.output,
            },
        )
    return 0


# ---------------------------------------------------------------------------
# Parser assembly.


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--strategy", choices=STRATEGY_NAMES)
    parser.add_argument("-w", "--window", type=int)
    parser.add_argument("--stride", type=int)
    parser.add_argument("--mask-left", type=int, dest="mask_left")
    parser.add_argument("--mask-right", type=int, dest="mask_right")
    parser.add_argument("--overlap-n", type=int, dest="overlap_n")
    parser.add_argument("--overlap-size", type=int, dest="overlap_size")
    parser.add_argument("--min-words-cut", type=int, dest="min_words_cut")
    parser.add_argument("--combiner")
    parser.add_argument("--lookahead", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="winpunct",
        description="Sliding-window punctuation decoding engine",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="punctuate a transcript")
    _add_shared(p)
    p.add_argument("--transcript")
    p.add_argument("--provider", help="file:PATH or rule:PATH")
    p.add_argument("--mode", choices=("tagging", "classification"))
    p.add_argument("--edge-noise", type=float, dest="edge_noise")
    p.add_argument("--output-text", dest="output_text")
    p.add_argument("--output-labels", dest="output_labels")
    p.add_argument("--write-manifest", dest="write_manifest")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("emit-windows", help="write the window plan for the exporter")
    _add_shared(p)
    p.add_argument("--transcript")
    p.add_argument("--length", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_emit_windows)

    p = sub.add_parser(
        "emit-instances", help="write classification instances for the exporter"
    )
    _add_shared(p)
    p.add_argument("--transcript")
    p.add_argument("--labels", help="reference label file to attach as targets")
    p.add_argument("--output")
    p.set_defaults(func=cmd_emit_instances)

    p = sub.add_parser("eval", help="score predicted labels against a reference")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--predicted")
    p.add_argument("--reference")
    p.add_argument("--format", choices=("table", "records"))
    p.add_argument("--average", choices=("micro", "macro"))
    p.add_argument("--output")
    p.add_argument("--write-manifest", dest="write_manifest")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid of decode runs with averaged F1")
    _add_shared(p)
    p.add_argument("--windows", help="comma-separated window sizes")
    p.add_argument("--strides", help="comma-separated stride values")
    p.add_argument("--lookaheads", help="comma-separated lookahead values")
    p.add_argument("--transcript")
    p.add_argument("--reference")
    p.add_argument("--provider", help="template; {w} {s} {l} expand per run")
    p.add_argument("--mode", choices=("tagging", "classification"))
    p.add_argument("--edge-noise", type=float, dest="edge_noise")
    p.add_argument("--format", choices=("table", "records"))
    p.add_argument("--output")
    p.add_argument("--write-manifest", dest="write_manifest")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
