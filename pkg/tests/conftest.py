"""Shared fixtures: corpus paths, bounded checker, engine factory."""
import random
import sys
from pathlib import Path

import pytest

from mvl.coevolution import Budget, CoEvolutionEngine
from mvl.parser import parse_program
from mvl.solver import BoundedChecker, BoundedDomain
from mvl.synthesis import EnumerativePlugin

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
CASES_DIR = CORPUS / "cases"
TESTS_DIR = CORPUS / "tests"
SCRIPTS_DIR = ROOT / "scripts"

# Experiment drivers double as libraries for the acceptance suite.
if str(SCRIPTS_DIR) not in sys.path:
    sys.path.insert(0, str(SCRIPTS_DIR))


def read_corpus(name: str) -> str:
    return (CORPUS / name).read_text()


def make_engine(checker, seed=0, filename="input.mvl", explain=False,
                first_solution=True, budget=None, cls=CoEvolutionEngine):
    """Engine wired to the builtin enumerative synthesizer."""
    return cls(
        checker=checker,
        plugin_factory=lambda ctx=None: EnumerativePlugin(checker.domain, ctx),
        budget=budget if budget is not None else Budget(),
        rng=random.Random(seed),
        filename=filename,
        first_solution=first_solution,
        explain=explain,
    )


class RecordingEngine(CoEvolutionEngine):
    """Engine that snapshots every admission decision so invariants can
    be re-checked independently after the run."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.admissions = []

    def _admit(self, parent, patch, trace, report, seen):
        admitted, child = super()._admit(parent, patch, trace, report, seen)
        if admitted:
            self.admissions.append({
                "parent": parent,
                "report": report,
                "trace_pid": trace.partition.pid,
                "patch": patch,
                "child": child,
            })
        return admitted, child


@pytest.fixture(scope="session")
def canonical_source():
    return read_corpus("find_first_odd.mvl")


@pytest.fixture(scope="session")
def canonical_program(canonical_source):
    return parse_program(canonical_source, source_name="find_first_odd.mvl")


@pytest.fixture(scope="session")
def repaired_source():
    return read_corpus("find_first_odd_repaired.mvl")


@pytest.fixture(scope="session")
def repaired_program(repaired_source):
    return parse_program(repaired_source,
                         source_name="find_first_odd_repaired.mvl")


@pytest.fixture()
def domain():
    return BoundedDomain(-4, 4, 3)


@pytest.fixture()
def checker(domain):
    return BoundedChecker(domain)
