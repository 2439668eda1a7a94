import json
import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents import experiments
from agents.orchestrator import ExperimentOrchestrator
from tools.beatty import BeattyParams
from tools.errors import DomainError, ParameterError
from tools.mangoldt import build_mangoldt_table
from tools.realspec import GOLDEN_RATIO, SQRT2, Rational

PARAMS = BeattyParams(alpha=SQRT2, beta=Rational(p=0))
GRID = [2 ** k for k in range(10, 16)]


def rows_of(report):
    return json.dumps([r.model_dump() for r in report.rows], sort_keys=True)


@pytest.mark.asyncio
async def test_orchestrated_th1_matches_sequential_driver():
    orchestrator = ExperimentOrchestrator(threads=4)
    report = await orchestrator.verify_th1(PARAMS, 1, 3, GRID)
    sequential = experiments.verify_th1(PARAMS, 1, 3, GRID, orchestrator.table)
    assert rows_of(report) == rows_of(sequential)
    assert report.fitted_exponent == sequential.fitted_exponent
    assert report.threads == 4


@pytest.mark.asyncio
async def test_results_do_not_depend_on_thread_count():
    one = await ExperimentOrchestrator(threads=1).verify_th2(PARAMS, 1, 2, [1000, 5000, 20_000])
    many = await ExperimentOrchestrator(threads=3).verify_th2(PARAMS, 1, 2, [20_000, 1000, 5000])
    assert rows_of(one) == rows_of(many)


@pytest.mark.asyncio
async def test_table_is_shared_and_grown():
    orchestrator = ExperimentOrchestrator(threads=2)
    small = orchestrator.ensure_table(1000)
    assert orchestrator.ensure_table(500) is small
    assert orchestrator.ensure_table(5000).limit == 5000

    orchestrator = ExperimentOrchestrator(threads=2, table=build_mangoldt_table(10_000))
    report = await orchestrator.lemma24_scan(PARAMS, 0, 1, 10_000, 3)
    assert orchestrator.table.limit == 10_000
    assert [r.N for r in report.rows] == [1, 2, 3]


@pytest.mark.asyncio
async def test_decay_scan_and_summary():
    orchestrator = ExperimentOrchestrator(threads=2)
    params = BeattyParams(alpha=GOLDEN_RATIO, beta=Rational(p=0))
    report = await orchestrator.decay_scan(params, [100, 1000, 10_000])
    summary = orchestrator.get_summary_statistics(report)
    assert summary["experiment"] == "decay-scan"
    assert summary["total_rows"] == 3
    assert summary["fitted_exponent"] == report.fitted_exponent
    assert summary["worst_N"] == 100


@pytest.mark.asyncio
async def test_orchestrator_validates_before_work():
    orchestrator = ExperimentOrchestrator(threads=2)
    with pytest.raises(DomainError):
        await orchestrator.verify_th1(BeattyParams(alpha=SQRT2, beta=Rational(p=1, q=2)), 1, 3, GRID)
    with pytest.raises(ParameterError):
        await orchestrator.verify_th1(PARAMS, 3, 6, GRID)
    assert orchestrator.table is None


@pytest.mark.asyncio
async def test_empty_or_nonpositive_grid_is_a_parameter_error():
    orchestrator = ExperimentOrchestrator(threads=2)
    with pytest.raises(ParameterError):
        await orchestrator.verify_th1(PARAMS, 1, 3, [])
    with pytest.raises(ParameterError):
        await orchestrator.verify_th2(PARAMS, 1, 2, [])
    with pytest.raises(ParameterError):
        await orchestrator.verify_th2(PARAMS, 1, 2, [0, 100])
    with pytest.raises(ParameterError):
        await orchestrator.decay_scan(PARAMS, [])
    with pytest.raises(ParameterError):
        await orchestrator.lemma24_scan(PARAMS, 0, 1, 1000, 0)
    assert orchestrator.table is None


def test_summary_of_empty_report():
    from agents.report import ExperimentReport

    summary = ExperimentOrchestrator(threads=1).get_summary_statistics(ExperimentReport(experiment="x"))
    assert summary["total_rows"] == 0
    assert summary["max_error_ratio"] is None
