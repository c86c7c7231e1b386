import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from regeval.datasets import BenchmarkItem
from regeval.scoring import (
    Verdict,
    accuracy,
    answer_distribution,
    answers_agree,
    incomplete_breakdown,
    judge,
    method_confusion,
)
from regeval.thinking import segment_response

from conftest import make_mc_item


def gsm_item(gold="1234"):
    return BenchmarkItem(
        id="g/0", task="gsm8k", subject="m", question="sum?", choices=(), gold=gold
    )


def trivia_item():
    return BenchmarkItem(
        id="t/0", task="triviaqa", subject="geo", question="Capital?",
        choices=(), gold="Paris", gold_aliases=("Paris", "City of Paris"),
    )


class TestJudge:
    def test_label_identity(self, capacitor_item):
        assert judge("B", capacitor_item).outcome == "correct"
        assert judge("A", capacitor_item).outcome == "incorrect"

    def test_parenthesized_label_matches_gold(self, capacitor_item):
        assert judge("(B)", capacitor_item).outcome == "correct"

    def test_numeric_normalizes_both_sides(self):
        assert judge("1234", gsm_item("$1,234")).outcome == "correct"
        assert judge("$1,234.", gsm_item("1234")).outcome == "correct"
        assert judge("1234.0", gsm_item()).outcome == "correct"
        assert judge("1235", gsm_item()).outcome == "incorrect"

    def test_alias_membership(self):
        assert judge("city of paris", trivia_item()).outcome == "correct"
        assert judge("The City of Paris!", trivia_item()).outcome == "correct"
        assert judge("Lyon", trivia_item()).outcome == "incorrect"

    def test_not_found_is_invalid(self, capacitor_item):
        assert judge(None, capacitor_item).outcome == "invalid"
        assert judge("", capacitor_item).outcome == "invalid"

    def test_alias_order_irrelevant(self):
        item = trivia_item()
        reordered = BenchmarkItem(
            id=item.id, task=item.task, subject=item.subject, question=item.question,
            choices=(), gold="Paris", gold_aliases=("City of Paris", "Paris"),
        )
        for answer in ("paris", "city of paris", "Lyon"):
            assert judge(answer, item).outcome == judge(answer, reordered).outcome

    def test_normalization_congruence(self, capacitor_item):
        # same normalized form implies same verdict
        for a, b in [("(B)", "B"), ("**B**", "b"), ("(A)", "A")]:
            assert judge(a, capacitor_item).outcome == judge(b, capacitor_item).outcome

    def test_method_source_recorded(self, capacitor_item):
        verdict = judge("B", capacitor_item, method_source="strict_match")
        assert verdict.method_source == "strict_match"
        assert verdict.item_id == capacitor_item.id


class TestAccuracy:
    def v(self, outcome):
        return Verdict(outcome, "m", "id")

    def test_mixed(self):
        verdicts = [self.v("correct"), self.v("incorrect"), self.v("invalid"), self.v("correct")]
        assert accuracy(verdicts) == 0.5

    def test_all_correct(self):
        assert accuracy([self.v("correct")] * 4) == 1.0

    def test_all_invalid(self):
        assert accuracy([self.v("invalid")] * 3) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            accuracy([])


class TestDistribution:
    def test_labels_na_and_other(self):
        counts = answer_distribution(["A", None, "Merton"], ("A", "B", "C", "D"))
        assert counts == {"A": 1, "B": 0, "C": 0, "D": 0, "N/A": 1, "other": 1}

    def test_parenthesized_counts_as_label(self):
        counts = answer_distribution(["(B)", "B"], ("A", "B", "C", "D"))
        assert counts["B"] == 2

    def test_all_not_found(self):
        counts = answer_distribution([None] * 5, ("A", "B"))
        assert counts == {"A": 0, "B": 0, "N/A": 5, "other": 0}

    def test_totals_equal_item_count(self):
        answers = ["A", "(C)", None, "option text", "", "D", "J"]
        counts = answer_distribution(answers, ("A", "B", "C", "D"))
        assert sum(counts.values()) == len(answers)

    @settings(max_examples=1000, deadline=None)
    @given(
        st.lists(
            st.one_of(st.none(), st.text(max_size=8)),
            max_size=40,
        ),
        st.integers(min_value=0, max_value=10),
    )
    def test_conservation_property(self, answers, n_labels):
        labels = tuple("ABCDEFGHIJ"[:n_labels])
        counts = answer_distribution(answers, labels)
        assert sum(counts.values()) == len(answers)
        assert set(counts) == set(labels) | {"N/A", "other"}


class TestConfusion:
    def build(self, spec):
        """spec: list of (rule_answer, regen_answer) against gold 'B'."""
        items = [make_mc_item(i, gold="B") for i in range(len(spec))]
        rule, regen = {}, {}
        for item, (rans, gans) in zip(items, spec):
            rule[item.id] = (rans, judge(rans, item, "rule"))
            regen[item.id] = (gans, judge(gans, item, "regen"))
        return items, rule, regen

    def test_all_both_correct(self):
        items, rule, regen = self.build([("B", "B")] * 4)
        confusion = method_confusion(rule, regen, items)
        assert confusion.both_correct == 4
        assert confusion.total == 4
        assert confusion.disagreement_ids == ()
        assert confusion.identical_answers == 4

    def test_one_item_per_cell(self):
        items, rule, regen = self.build(
            [("B", "B"), ("B", "A"), ("C", "B"), (None, "D")]
        )
        confusion = method_confusion(rule, regen, items)
        assert (
            confusion.both_correct,
            confusion.rule_only_correct,
            confusion.regen_only_correct,
            confusion.neither_correct,
        ) == (1, 1, 1, 1)
        assert confusion.total == 4

    def test_disagreements_exclude_identical_answers(self):
        items, rule, regen = self.build([("B", "B"), ("(B)", "B"), ("A", "C")])
        confusion = method_confusion(rule, regen, items)
        # "(B)" and "B" are the same answer after canonicalization
        assert confusion.identical_answers == 2
        assert confusion.disagreement_ids == (items[2].id,)
        assert set(confusion.disagreement_ids) & {items[0].id, items[1].id} == set()

    def test_item_set_mismatch_rejected(self):
        items, rule, regen = self.build([("B", "B")])
        with pytest.raises(ValueError):
            method_confusion(rule, {}, items)

    @settings(max_examples=1000, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.one_of(st.none(), st.sampled_from(["A", "B", "C", "(B)", "other"])),
                st.sampled_from(["A", "B", "C", "D"]),
            ),
            min_size=1,
            max_size=25,
        )
    )
    def test_cells_sum_to_item_count(self, spec):
        items, rule, regen = self.build(spec)
        confusion = method_confusion(rule, regen, items)
        assert confusion.total == len(items)
        agreeing = set()
        for item in items:
            if answers_agree(rule[item.id][0], regen[item.id][0], item):
                agreeing.add(item.id)
        assert set(confusion.disagreement_ids) == {i.id for i in items} - agreeing


class TestIncompleteBreakdown:
    def seg(self, complete):
        return segment_response("<think>x</think>done" if complete else "<think>x never done")

    def test_none_incomplete(self):
        responses = {"a": self.seg(True), "b": self.seg(True)}
        verdicts = {k: Verdict("correct", "m", k) for k in responses}
        stats = incomplete_breakdown(responses, verdicts)
        assert stats.fraction_incomplete == 0.0
        assert stats.outcome_percentages == {}

    def test_two_of_ten_incomplete(self):
        responses = {f"i{k}": self.seg(k >= 2) for k in range(10)}
        verdicts = {f"i{k}": Verdict("correct" if k == 0 else "invalid", "m", f"i{k}") for k in range(10)}
        stats = incomplete_breakdown(responses, verdicts)
        assert stats.fraction_incomplete == pytest.approx(0.2)
        assert stats.outcome_percentages == {
            "correct": 50.0, "incorrect": 0.0, "invalid": 50.0,
        }

    @given(st.lists(st.tuples(st.booleans(), st.sampled_from(["correct", "incorrect", "invalid"])), min_size=1, max_size=30))
    def test_percentages_sum_to_100(self, spec):
        responses = {f"i{k}": self.seg(complete) for k, (complete, _) in enumerate(spec)}
        verdicts = {f"i{k}": Verdict(outcome, "m", f"i{k}") for k, (_, outcome) in enumerate(spec)}
        stats = incomplete_breakdown(responses, verdicts)
        if stats.outcome_percentages:
            assert sum(stats.outcome_percentages.values()) == pytest.approx(100.0)
