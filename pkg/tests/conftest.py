"""Shared fixtures: a reusable corpus of random decompositions.

The corpus is built once per session because several test modules rely on
the same matrices (field coverage, mode agreement, annihilator invariance)
and the acceptance suite asserts a wall-clock bound on the decompose+verify
portion alone.
"""

import random
import time
from dataclasses import dataclass
from typing import List, Optional

import pytest
from hypothesis import settings

from jcdecomp import (
    Decomposition,
    IterationMode,
    Mat,
    Poly,
    PrimeField,
    Rationals,
    VerificationReport,
    jordan_chevalley,
    minimal_polynomial,
    random_matrix,
    verify,
)

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@dataclass
class CorpusRecord:
    label: str
    A: Mat
    mu: Poly
    dq: Decomposition  # quotient mode, annihilator discovered
    report: VerificationReport
    dm: Optional[Decomposition] = None  # matrix mode
    dext: Optional[Decomposition] = None  # quotient mode, annihilator mu*(X - c)


@dataclass
class Corpus:
    records: List[CorpusRecord]
    decompose_verify_seconds: float

    def by_label(self, label: str) -> List[CorpusRecord]:
        return [r for r in self.records if r.label == label]


def _build(field, label, count, max_n, rng) -> (list, float):
    records = []
    timed = 0.0
    for _ in range(count):
        n = rng.randint(1, max_n)
        A = random_matrix(field, n, rng)
        t0 = time.perf_counter()
        dq = jordan_chevalley(A)
        report = verify(A, dq)
        timed += time.perf_counter() - t0
        mu = minimal_polynomial(A)
        dm = jordan_chevalley(A, mode=IterationMode.MATRIX)
        shift = Poly.x(field) - Poly.constant(field, field.random_raw(rng))
        dext = jordan_chevalley(A, f=mu * shift)
        records.append(CorpusRecord(label, A, mu, dq, report, dm, dext))
    return records, timed


@pytest.fixture(scope="session")
def decomposition_corpus() -> Corpus:
    rng = random.Random(0xC0FFEE)
    records: List[CorpusRecord] = []
    timed = 0.0
    for field, label, count, max_n in (
        (PrimeField(2), "F2", 150, 20),
        (PrimeField(5), "F5", 150, 20),
        (Rationals(), "Q", 100, 8),
    ):
        got, secs = _build(field, label, count, max_n, rng)
        records.extend(got)
        timed += secs
    return Corpus(records=records, decompose_verify_seconds=timed)
