import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from regeval.datasets import BenchmarkItem

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def capacitor_text() -> str:
    return (FIXTURES / "capacitor_response.txt").read_text()


@pytest.fixture
def capacitor_item() -> BenchmarkItem:
    return BenchmarkItem(
        id="mmlu/high_school_physics/0",
        task="mmlu",
        subject="high_school_physics",
        question=(
            "The plates of a capacitor are charged to a potential difference of 5 V. "
            "If the capacitance is 2 mF, what is the charge on the positive plate?"
        ),
        choices=(("A", "0.005 C"), ("B", "0.01 C"), ("C", "0.02 C"), ("D", "0.5 C")),
        gold="B",
    )


def make_mc_item(i: int, gold: str = "B", n_choices: int = 4, task: str = "mmlu") -> BenchmarkItem:
    labels = "ABCDEFGHIJ"[:n_choices]
    return BenchmarkItem(
        id=f"{task}/test/{i}",
        task=task,
        subject="test_subject",
        question=f"Question {i}: which option is marked correct in the key?",
        choices=tuple((lab, f"option text {lab.lower()}{i}") for lab in labels),
        gold=gold,
    )
