"""Experiment reports and their JSON / CSV serialisation."""
import json
import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field, model_validator

from config.settings import settings

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["N", "lhs", "main_term", "error", "ref_bound"]


class ReportRow(BaseModel):
    N: int = Field(..., description="Grid point (N, M or k depending on the experiment)")
    lhs: float = Field(..., description="Measured quantity")
    main_term: float = Field(0.0, description="Predicted main term")
    error: float = Field(0.0, description="lhs − main_term")
    reference_bound: Optional[float] = Field(None, description="Reference curve at N")
    extra: Dict[str, Any] = Field(default_factory=dict, description="Experiment-specific columns")

    @classmethod
    def measured(cls, N: int, lhs: float, main_term: float = 0.0,
                 reference_bound: Optional[float] = None, **extra) -> "ReportRow":
        return cls(N=N, lhs=lhs, main_term=main_term, error=lhs - main_term,
                   reference_bound=reference_bound, extra=extra)


class ExperimentReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    experiment: str = Field(..., description="Experiment id, e.g. verify-th1")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="alpha, beta, c, d as text")
    tau: Optional[float] = Field(None, description="Irrationality type used for exponents")
    tau_exact: Optional[bool] = Field(None, description="Whether tau is known exactly")
    rows: List[ReportRow] = Field(default_factory=list)
    fitted_exponent: Optional[float] = None
    fit_residual: Optional[float] = None
    dropped_rows: int = 0
    theorem_exponent: Optional[float] = None
    comparison_exponent: Optional[float] = None
    warnings: List[str] = Field(default_factory=list)
    extras: Dict[str, Any] = Field(default_factory=dict)
    run_config: Dict[str, Any] = Field(default_factory=dict)
    threads: int = Field(default_factory=lambda: settings.THREADS)
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    toolkit_version: str = Field(default_factory=lambda: settings.TOOLKIT_VERSION)

    @model_validator(mode="after")
    def _sorted(self):
        self.rows.sort(key=lambda r: r.N)
        return self

    def warn(self, message: str) -> None:
        logger.warning("%s: %s", self.experiment, message)
        self.warnings.append(message)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            [[r.N, r.lhs, r.main_term, r.error, r.reference_bound] for r in self.rows],
            columns=CSV_COLUMNS,
        )
        return frame

    def deterministic_dict(self) -> Dict[str, Any]:
        """The report without its timestamp."""
        data = self.model_dump(mode="json")
        data.pop("created_at", None)
        return data


def write_json(report: ExperimentReport, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w") as f:
        json.dump(report.model_dump(mode="json"), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Wrote %s report to %s", report.experiment, path)
    return path


def write_csv(report: ExperimentReport, path: str) -> str:
    _ensure_parent(path)
    report.to_frame().to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %s rows to %s", len(report.rows), path)
    return path


def write_report(report: ExperimentReport, path: Optional[str] = None, fmt: str = "json") -> str:
    path = path or default_path(report, fmt)
    if fmt == "csv":
        return write_csv(report, path)
    return write_json(report, path)


def load_report(path: str) -> ExperimentReport:
    with open(path) as f:
        return ExperimentReport.model_validate(json.load(f))


def default_path(report: ExperimentReport, fmt: str = "json") -> str:
    return os.path.join(settings.OUTPUT_DIR, f"{report.experiment}.{fmt}")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
