import functools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chirp_glottal.lf import LFParams
from chirp_glottal.signal import extract_frame
from chirp_glottal.synth import TestCondition, perturbed_gci, synthesize

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@functools.lru_cache(maxsize=None)
def synthetic_frame(Oq=0.6, alpha_m=0.7, F0=100.0, vowel="a", gci_error=0.0):
    """Frame of a synthetic vowel around the middle GCI, and the true GCI offset."""
    cond = TestCondition(LFParams(Oq, alpha_m, F0), vowel, 0.0)
    utt = synthesize(cond)
    gci = utt.true_gcis.instants[5]
    frame = extract_frame(utt.speech, perturbed_gci(gci, gci_error, cond.T0), cond.T0)
    return frame, gci - frame.anchor


@pytest.fixture
def rng():
    return np.random.default_rng(20090417)


_VERDICTS = []


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; printed in the summary."""

    def record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
