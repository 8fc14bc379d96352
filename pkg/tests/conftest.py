import itertools

import pytest

from rigidity.structures import Structure

ACCEPTANCE_LINES: list[str] = []


def brute_automorphisms(M: Structure) -> list[tuple[int, ...]]:
    """Oracle: every permutation of [n] mapping each 1-based tuple set onto itself."""
    rels = [set(M.tuples(i)) for i in range(len(M.vocab.arities))]
    out = []
    for g in itertools.permutations(range(M.n)):
        if all({tuple(g[a - 1] + 1 for a in t) for t in R} == R for R in rels):
            out.append(g)
    return out


@pytest.fixture
def acceptance_line():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip())
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
