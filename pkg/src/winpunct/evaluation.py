"""Per-class and overall precision/recall/F1 against reference labels.

The no-punctuation class is excluded from per-class rows and from the overall
micro counts; 0/0 ratios are defined as 0. Percentages render to one decimal,
half-up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Optional, Sequence, Tuple

from .core import PunctClass
from .errors import EvalError

PUNCT_CLASSES = (PunctClass.COMMA, PunctClass.PERIOD, PunctClass.QUESTION)


@dataclass(frozen=True)
class ClassScores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    per_class: Dict[PunctClass, ClassScores]
    overall: ClassScores
    average: str = "micro"


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _scores(tp: int, fp: int, fn: int) -> ClassScores:
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassScores(tp, fp, fn, precision, recall, f1)


def evaluate(
    predicted: Sequence[PunctClass],
    reference: Sequence[PunctClass],
    average: str = "micro",
) -> EvalReport:
    """Confusion counts per punctuation class plus an overall triple.

    `average="micro"` pools counts across the three punctuation classes;
    `"macro"` takes the arithmetic mean of the per-class metrics. Raw counts
    are carried either way for auditability.
    """
    if len(predicted) != len(reference):
        raise EvalError(
            f"predicted has {len(predicted)} labels, reference has {len(reference)}"
        )
    if average not in ("micro", "macro"):
        raise EvalError(f"average must be micro or macro, got {average!r}")
    tp = {c: 0 for c in PUNCT_CLASSES}
    fp = {c: 0 for c in PUNCT_CLASSES}
    fn = {c: 0 for c in PUNCT_CLASSES}
    for p, r in zip(predicted, reference):
        p = PunctClass(p)
        r = PunctClass(r)
        if p == r:
            if p != PunctClass.O:
                tp[p] += 1
        else:
            if p != PunctClass.O:
                fp[p] += 1
            if r != PunctClass.O:
                fn[r] += 1
    per_class = {c: _scores(tp[c], fp[c], fn[c]) for c in PUNCT_CLASSES}
    sum_tp = sum(tp.values())
    sum_fp = sum(fp.values())
    sum_fn = sum(fn.values())
    if average == "micro":
        overall = _scores(sum_tp, sum_fp, sum_fn)
    else:
        k = len(PUNCT_CLASSES)
        overall = ClassScores(
            tp=sum_tp,
            fp=sum_fp,
            fn=sum_fn,
            precision=sum(s.precision for s in per_class.values()) / k,
            recall=sum(s.recall for s in per_class.values()) / k,
            f1=sum(s.f1 for s in per_class.values()) / k,
        )
    return EvalReport(per_class=per_class, overall=overall, average=average)


def percent(value: float) -> str:
    """Render a [0, 1] metric as a percentage with one half-up decimal."""
    return str(Decimal(value * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def delta_points(candidate: float, baseline: float) -> float:
    """Absolute percentage-point difference, rounded to one decimal half-up."""
    d = Decimal((candidate - baseline) * 100).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )
    return float(d)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    overall_f1: float
    delta_overall: float
    delta_per_class: Dict[PunctClass, float]


def compare_runs(
    runs: Sequence[Tuple[str, EvalReport]], baseline: Optional[str] = None
) -> List[ComparisonRow]:
    """Deltas (absolute percentage points) of every run against a named
    baseline, per class and overall. The first run is the baseline when none
    is named."""
    if len(runs) < 2:
        raise EvalError("compare_runs needs at least two reports")
    names = [name for name, _ in runs]
    if baseline is None:
        baseline = names[0]
    if baseline not in names:
        raise EvalError(f"baseline {baseline!r} not among runs {names}")
    base = dict(runs)[baseline]
    rows = []
    for name, report in runs:
        rows.append(
            ComparisonRow(
                name=name,
                overall_f1=report.overall.f1,
                delta_overall=delta_points(report.overall.f1, base.overall.f1),
                delta_per_class={
                    c: delta_points(report.per_class[c].f1, base.per_class[c].f1)
                    for c in PUNCT_CLASSES
                },
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Rendering and label-file IO.


def render_report(report: EvalReport, fmt: str = "table") -> str:
    if fmt == "records":
        lines = []
        for c in PUNCT_CLASSES:
            s = report.per_class[c]
            lines.append(
                json.dumps(
                    {
                        "class": c.name,
                        "tp": s.tp,
                        "fp": s.fp,
                        "fn": s.fn,
                        "precision": s.precision,
                        "recall": s.recall,
                        "f1": s.f1,
                    },
                    separators=(",", ":"),
                )
            )
        o = report.overall
        lines.append(
            json.dumps(
                {
                    "class": "OVERALL",
                    "average": report.average,
                    "tp": o.tp,
                    "fp": o.fp,
                    "fn": o.fn,
                    "precision": o.precision,
                    "recall": o.recall,
                    "f1": o.f1,
                },
                separators=(",", ":"),
            )
        )
        return "\n".join(lines) + "\n"
    if fmt != "table":
        raise EvalError(f"unknown format {fmt!r}")
    header = f"{'class':<10}{'tp':>6}{'fp':>6}{'fn':>6}{'P%':>8}{'R%':>8}{'F1%':>8}"
    lines = [header]
    for c in PUNCT_CLASSES:
        s = report.per_class[c]
        lines.append(
            f"{c.name:<10}{s.tp:>6}{s.fp:>6}{s.fn:>6}"
            f"{percent(s.precision):>8}{percent(s.recall):>8}{percent(s.f1):>8}"
        )
    o = report.overall
    lines.append(
        f"{'OVERALL':<10}{o.tp:>6}{o.fp:>6}{o.fn:>6}"
        f"{percent(o.precision):>8}{percent(o.recall):>8}{percent(o.f1):>8}"
        f"  ({report.average})"
    )
    return "\n".join(lines) + "\n"


def read_labels(path) -> List[PunctClass]:
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            name = line.strip()
            if not name:
                continue
            try:
                labels.append(PunctClass.from_name(name))
            except Exception:
                raise EvalError(f"{path}:{lineno}: unknown label {name!r}") from None
    return labels


def write_labels(path, labels: Sequence[PunctClass]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(PunctClass(label).name + "\n")
