import asyncio
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

from agents import experiments
from agents.report import ExperimentReport, ReportRow
from config.settings import settings
from tools.beatty import BeattyParams
from tools.errors import ParameterError
from tools.mangoldt import MangoldtTable, build_mangoldt_table

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _grid(grid: Sequence[int]) -> List[int]:
    points = sorted(set(int(N) for N in grid))
    if not points or points[0] < 1:
        raise ParameterError("grid points must be positive integers")
    return points


class ExperimentOrchestrator:
    def __init__(self, threads: Optional[int] = None, table: Optional[MangoldtTable] = None):
        self.threads = threads or settings.THREADS
        # One sieve per run, shared read-only by every grid point.
        self.table = table

    def ensure_table(self, limit: int) -> MangoldtTable:
        """Build (or grow) the shared sieve so that it covers ``limit``."""
        if self.table is None or self.table.limit < limit:
            self.table = build_mangoldt_table(max(limit, 2))
        return self.table

    async def _map_grid(self, fn: Callable[[int], T], grid: Sequence[int]) -> List[T]:
        """Run fn on every grid point in worker threads; results come back in grid order."""
        semaphore = asyncio.Semaphore(self.threads)

        async def one(point: int) -> T:
            async with semaphore:
                logger.debug("grid point %d", point)
                return await asyncio.to_thread(fn, point)

        return list(await asyncio.gather(*(one(p) for p in grid)))

    async def verify_th1(self, params: BeattyParams, c: int, d: int, grid: Sequence[int],
                         eps: Optional[float] = None) -> ExperimentReport:
        eps = settings.EPSILON if eps is None else eps
        params.integer_beta()
        experiments._check_residue(c, d)
        grid = _grid(grid)
        table = self.ensure_table(grid[-1])
        estimate = experiments.type_of(params)
        logger.info("Running verify-th1 over %d grid points with %d workers...", len(grid), self.threads)
        rows = await self._map_grid(
            lambda N: experiments.th1_point(table, params, c, d, N, estimate.tau_hat, eps), grid)
        return self._stamp(experiments.assemble_th1(params, c, d, rows, estimate, eps))

    async def verify_th2(self, params: BeattyParams, c: int, d: int, grid: Sequence[int],
                         eps: Optional[float] = None) -> ExperimentReport:
        eps = settings.EPSILON if eps is None else eps
        experiments._check_residue(c, d, coprime=False)
        grid = _grid(grid)
        top = (params.alpha * grid[-1] + params.beta).floor()
        table = self.ensure_table(d * top + c)
        estimate = experiments.type_of(params)
        logger.info("Running verify-th2 over %d grid points with %d workers...", len(grid), self.threads)
        rows = await self._map_grid(lambda N: experiments.th2_point(table, params, c, d, N), grid)
        return self._stamp(experiments.assemble_th2(params, c, d, rows, estimate, eps))

    async def lemma24_scan(self, params: BeattyParams, c: int, d: int, x: int, k_max: int) -> ExperimentReport:
        experiments._check_residue(c, d, coprime=False)
        if k_max < 1:
            raise ParameterError("k_max must be at least 1")
        table = self.ensure_table(x)
        estimate = experiments.type_of(params)
        rows = await self._map_grid(
            lambda k: experiments.lemma24_point(table, params, c, d, x, k, estimate.tau_hat),
            range(1, k_max + 1))
        return self._stamp(experiments.assemble_lemma24(params, c, d, x, k_max, rows, estimate))

    async def decay_scan(self, params: BeattyParams, grid: Sequence[int]) -> ExperimentReport:
        estimate = experiments.type_of(params)
        grid = _grid(grid)
        rows = await self._map_grid(lambda M: experiments.decay_point(params, M, estimate.tau_hat), grid)
        return self._stamp(experiments.assemble_decay(params, rows, estimate))

    def _stamp(self, report: ExperimentReport) -> ExperimentReport:
        report.threads = self.threads
        return report

    def get_summary_statistics(self, report: ExperimentReport) -> Dict[str, Any]:
        rows: List[ReportRow] = report.rows
        if not rows:
            return {
                "experiment": report.experiment,
                "total_rows": 0,
                "max_abs_error": 0.0,
                "max_error_ratio": None,
                "fitted_exponent": report.fitted_exponent,
                "theorem_exponent": report.theorem_exponent,
                "warnings": len(report.warnings),
            }

        ratios = [abs(r.error) / r.reference_bound for r in rows if r.reference_bound]
        worst = max(rows, key=lambda r: abs(r.error))
        return {
            "experiment": report.experiment,
            "total_rows": len(rows),
            "max_abs_error": round(abs(worst.error), 6),
            "worst_N": worst.N,
            "max_error_ratio": round(max(ratios), 6) if ratios else None,
            "fitted_exponent": report.fitted_exponent,
            "theorem_exponent": report.theorem_exponent,
            "warnings": len(report.warnings),
        }
