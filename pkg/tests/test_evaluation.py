import numpy as np
import pytest

from winpunct.core import PunctClass
from winpunct.errors import EvalError
from winpunct.evaluation import (
    ClassScores,
    EvalReport,
    compare_runs,
    delta_points,
    evaluate,
    percent,
    read_labels,
    render_report,
    write_labels,
)

O, C, P, Q = PunctClass.O, PunctClass.COMMA, PunctClass.PERIOD, PunctClass.QUESTION


class TestEvaluate:
    def test_perfect_prediction(self):
        labels = [O, C, P, Q, O, C, P, Q]
        report = evaluate(labels, labels)
        for scores in report.per_class.values():
            assert scores.f1 == 1.0
        assert report.overall.f1 == 1.0

    def test_all_o_prediction_zero_by_convention(self):
        reference = [O, C, P, O, Q]
        predicted = [O] * 5
        report = evaluate(predicted, reference)
        assert report.overall.precision == 0.0
        assert report.overall.recall == 0.0
        assert report.overall.f1 == 0.0

    def test_hand_confusion_counts(self):
        # 10 labels; Comma: tp=2, fp=1, fn=1 -> P = R = F1 = 2/3.
        reference = [C, C, C, O, O, O, O, O, P, O]
        predicted = [C, C, O, C, O, O, O, O, P, O]
        report = evaluate(predicted, reference)
        comma = report.per_class[C]
        assert (comma.tp, comma.fp, comma.fn) == (2, 1, 1)
        assert comma.precision == pytest.approx(2 / 3)
        assert comma.recall == pytest.approx(2 / 3)
        assert comma.f1 == pytest.approx(2 / 3)
        assert percent(comma.f1) == "66.7"

    def test_cross_class_confusion(self):
        # Predicting PERIOD where COMMA stands is fp for period, fn for comma.
        report = evaluate([P], [C])
        assert report.per_class[P].fp == 1
        assert report.per_class[C].fn == 1
        assert report.per_class[P].tp == 0

    def test_overall_counts_are_sums(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(1, 200))
            predicted = [PunctClass(int(x)) for x in rng.integers(0, 4, n)]
            reference = [PunctClass(int(x)) for x in rng.integers(0, 4, n)]
            report = evaluate(predicted, reference)
            assert report.overall.tp == sum(s.tp for s in report.per_class.values())
            assert report.overall.fp == sum(s.fp for s in report.per_class.values())
            assert report.overall.fn == sum(s.fn for s in report.per_class.values())

    def test_pair_permutation_invariance(self):
        rng = np.random.default_rng(2)
        predicted = [PunctClass(int(x)) for x in rng.integers(0, 4, 100)]
        reference = [PunctClass(int(x)) for x in rng.integers(0, 4, 100)]
        order = rng.permutation(100)
        shuffled = evaluate(
            [predicted[i] for i in order], [reference[i] for i in order]
        )
        assert shuffled == evaluate(predicted, reference)

    def test_swapping_args_swaps_precision_recall(self):
        rng = np.random.default_rng(3)
        predicted = [PunctClass(int(x)) for x in rng.integers(0, 4, 100)]
        reference = [PunctClass(int(x)) for x in rng.integers(0, 4, 100)]
        fwd = evaluate(predicted, reference)
        rev = evaluate(reference, predicted)
        for c in fwd.per_class:
            assert fwd.per_class[c].precision == rev.per_class[c].recall
            assert fwd.per_class[c].recall == rev.per_class[c].precision

    def test_length_mismatch(self):
        with pytest.raises(EvalError):
            evaluate([O], [O, O])

    def test_macro_averaging(self):
        reference = [C, C, P, Q, O]
        predicted = [C, O, P, Q, O]
        micro = evaluate(predicted, reference, average="micro")
        macro = evaluate(predicted, reference, average="macro")
        per = macro.per_class
        assert macro.overall.f1 == pytest.approx(
            sum(s.f1 for s in per.values()) / 3
        )
        assert micro.overall.tp == macro.overall.tp  # counts identical


def synthetic_report(overall_f1: float) -> EvalReport:
    empty = ClassScores(0, 0, 0, 0.0, 0.0, 0.0)
    return EvalReport(
        per_class={C: empty, P: empty, Q: empty},
        overall=ClassScores(0, 0, 0, 0.0, 0.0, overall_f1),
    )


class TestCompareRuns:
    def test_published_delta_masked(self):
        runs = [
            ("masked_n1", synthetic_report(0.780)),
            ("masked_n4", synthetic_report(0.784)),
        ]
        rows = compare_runs(runs, baseline="masked_n1")
        assert rows[1].delta_overall == 0.4

    def test_published_delta_unmasked(self):
        runs = [
            ("unmasked_n1", synthetic_report(0.765)),
            ("unmasked_n4", synthetic_report(0.782)),
        ]
        rows = compare_runs(runs)
        assert rows[1].delta_overall == 1.7

    def test_identical_reports_zero_delta(self):
        runs = [("a", synthetic_report(0.5)), ("b", synthetic_report(0.5))]
        rows = compare_runs(runs)
        assert all(row.delta_overall == 0.0 for row in rows)

    def test_needs_two_runs(self):
        with pytest.raises(EvalError):
            compare_runs([("only", synthetic_report(0.5))])

    def test_unknown_baseline(self):
        runs = [("a", synthetic_report(0.1)), ("b", synthetic_report(0.2))]
        with pytest.raises(EvalError):
            compare_runs(runs, baseline="c")


class TestRendering:
    def test_percent_rounds_half_up(self):
        assert percent(0.66666) == "66.7"
        assert percent(0.12345) == "12.3"
        assert percent(0.125) == "12.5"
        assert delta_points(0.784, 0.780) == 0.4

    def test_table_contains_all_rows(self):
        report = evaluate([C, P, Q, O], [C, P, Q, O])
        table = render_report(report, fmt="table")
        for name in ("COMMA", "PERIOD", "QUESTION", "OVERALL"):
            assert name in table
        assert "100.0" in table

    def test_records_format_parses_as_json(self):
        import json

        report = evaluate([C, P], [C, C])
        lines = render_report(report, fmt="records").strip().splitlines()
        rows = [json.loads(line) for line in lines]
        assert rows[-1]["class"] == "OVERALL"
        assert {"tp", "fp", "fn", "precision", "recall", "f1"} <= set(rows[0])

    def test_unknown_format(self):
        with pytest.raises(EvalError):
            render_report(evaluate([O], [O]), fmt="csv")


class TestLabelIO:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "labels.txt"
        labels = [O, C, P, Q, P]
        write_labels(path, labels)
        assert read_labels(path) == labels

    def test_bad_label_reports_line(self, tmp_path):
        path = tmp_path / "labels.txt"
        path.write_text("O\nCOMMA\nELLIPSIS\n")
        with pytest.raises(EvalError, match=":3:"):
            read_labels(path)
