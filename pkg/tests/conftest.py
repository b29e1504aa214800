import json

import pytest


def lexeme(lemma, pos, senses):
    """``senses`` maps sense id -> number of examples."""
    return {
        "lemma": lemma,
        "pos": pos,
        "senses": [
            {
                "sense_id": sid,
                "definition": f"{sid} gloss",
                "examples": [f"ctx{sid}{j} {lemma} more{j} words{sid}" for j in range(k)],
            }
            for sid, k in senses.items()
        ],
    }


@pytest.fixture
def small_inventory_doc():
    return {
        "lexemes": [
            lexeme("black", "adjective", {"anger": 3, "gloom": 2, "humour": 2, "coffee": 2}),
            lexeme("bank", "noun", {"river": 2, "money": 2, "slope": 2}),
            lexeme("run", "verb", {"move": 2, "manage": 2, "flow": 1}),
        ]
    }


@pytest.fixture
def inventory_file(tmp_path, small_inventory_doc):
    p = tmp_path / "inventory.json"
    p.write_text(json.dumps(small_inventory_doc))
    return p


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
