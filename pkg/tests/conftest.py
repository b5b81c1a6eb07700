import json
from pathlib import Path

import pytest

from chatqe.corpus import parse_corpus
from chatqe.synthetic import make_corpus

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def chat_example():
    """The 8-turn English-Portuguese worked-example conversation."""
    return parse_corpus(FIXTURES / "chat_example.jsonl")


@pytest.fixture(scope="session")
def synthetic_corpus():
    return make_corpus(n_conversations=10, seed=42)


@pytest.fixture(scope="session")
def lexical_parity_records():
    return json.loads((FIXTURES / "lexical_parity.json").read_text(encoding="utf-8"))
