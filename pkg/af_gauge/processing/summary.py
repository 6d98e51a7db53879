"""
Summary table of scanned cases: degrees of freedom and discontinuity positions.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import pandas as pd
from tabulate import tabulate

from ..algebra.lift import LiftedBasis, dof_counts
from ..exceptions import UndefinedRatioError
from .discontinuities import Discontinuities
from .scan import ScanResult

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["case", "n_ndof", "n_idof", "r_dof", "lambda_first", "lambda_second"]


@dataclass
class CaseScan:
    """A named case: its basis, its scan and the detected discontinuities."""

    name: str
    lifted: LiftedBasis
    scan: Optional[ScanResult] = None
    discontinuities: Optional[Discontinuities] = None


@dataclass
class SummaryTable:
    rows: List[dict]
    warnings: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=SUMMARY_COLUMNS)

    def to_records(self) -> List[dict]:
        """JSON-friendly rows; missing values become None."""
        records = []
        for row in self.rows:
            records.append({
                key: (None if isinstance(value, float) and math.isnan(value) else value)
                for key, value in row.items()
            })
        return records

    def render(self) -> str:
        return tabulate(self.to_frame(), headers="keys", tablefmt="github", showindex=False, floatfmt=".3f")


def summarize(cases: List[CaseScan]) -> SummaryTable:
    """
    One row per case (case, n_ndof, n_idof, r_dof, lambda_first, lambda_second),
    sorted by r_dof.

    lambda_first is the first discontinuity strictly between the null (0) and
    basis (1) configurations, lambda_second the first one beyond 1. A missing
    value leaves a blank cell and a warning.
    """
    rows, warnings = [], []
    for case in cases:
        try:
            n_idof, n_ndof, r_dof = dof_counts(case.lifted)
        except UndefinedRatioError:
            n_idof, n_ndof, r_dof = 0, sum(b.n_complement for b in case.lifted.blocks), float("nan")
            warnings.append(f"{case.name}: no inherited directions, r_dof undefined")
        first = second = None
        if case.discontinuities is not None:
            first = case.discontinuities.first_in(0.0, 1.0)
            second = case.discontinuities.first_in(1.0, math.inf)
        if first is None:
            warnings.append(f"{case.name}: no discontinuity found in (0, 1)")
        if second is None:
            warnings.append(f"{case.name}: no discontinuity found beyond 1")
        rows.append({
            "case": case.name,
            "n_ndof": n_ndof,
            "n_idof": n_idof,
            "r_dof": r_dof if math.isnan(r_dof) else round(r_dof, 3),
            "lambda_first": float("nan") if first is None else round(first, 3),
            "lambda_second": float("nan") if second is None else round(second, 3),
        })
    rows.sort(key=lambda row: (math.isnan(row["r_dof"]), 0.0 if math.isnan(row["r_dof"]) else row["r_dof"], row["case"]))
    for warning in warnings:
        logger.warning(warning)
    return SummaryTable(rows=rows, warnings=warnings)
