from __future__ import annotations

import pytest

from helpers import fig2_circuit, make_corpus


@pytest.fixture
def fig2():
    return fig2_circuit()


@pytest.fixture(scope="session")
def corpus():
    """200 seeded random circuits (<=10 ops, <=5 qubits, durations 1..10)."""
    return make_corpus()
