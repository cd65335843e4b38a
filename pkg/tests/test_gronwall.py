import math
from types import SimpleNamespace

import pytest

from src.analysis.gronwall import gronwall_monitor
from src.errors import TooFewRecords


def records(times, energies, dissipation=(0.0, 0.0, 0.0)):
    return [SimpleNamespace(t=t, E_eps=e, dissipation=dissipation) for t, e in zip(times, energies)]


def test_exponential_growth_gives_unit_constant():
    times = [0.0, 0.1, 0.2, 0.3]
    report = gronwall_monitor(records(times, [math.exp(t) for t in times]), slack=1e-3)
    assert report.C_hat == pytest.approx(1.0, rel=1e-3)
    assert report.envelope_violation == 0.0
    assert report.times == times[1:]


def test_dissipation_enters_the_rate():
    report = gronwall_monitor(records([0.0, 1.0, 2.0], [1.0, 1.0, 1.0], (0.5, 0.25, 0.25)))
    assert report.C_hat == pytest.approx(1.0)
    assert report.min_dissipation == 0.25


def test_decay_gives_zero_constant():
    times = [0.0, 0.5, 1.0, 1.5]
    report = gronwall_monitor(records(times, [math.exp(-t) for t in times]))
    assert report.C_hat == 0.0
    assert report.envelope_violation == 0.0


def test_needs_three_records():
    with pytest.raises(TooFewRecords):
        gronwall_monitor(records([0.0, 1.0], [1.0, 1.0]))
