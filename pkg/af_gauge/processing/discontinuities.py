"""
Discontinuity detection along scanned paths.

Consecutive rows whose signature (sorted masses and V_min) jumps by more
than the threshold in sup-norm are candidates. A candidate must also stand
out from the local trend: kinks from level crossings of sorted masses and
steep smooth branches change the first difference gradually, a branch
switch does not. Candidates are refined by bisection with re-minimization
and kept only if the jump survives at the final resolution.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .scan import ScanResult, ScanRow, evaluate_point

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.05
DEFAULT_RESOLUTION = 1e-3
# point indices used for bisection re-minimization start here
REFINE_INDEX_BASE = 1_000_000


@dataclass
class Bracket:
    """A refined interval containing one discontinuity."""

    left: float
    right: float
    jump: float
    widened: bool = False

    @property
    def location(self) -> float:
        return 0.5 * (self.left + self.right)


@dataclass
class Discontinuities:
    """Refined discontinuity locations of one scan, plus diagnostics."""

    locations: List[float]
    brackets: List[Bracket] = field(default_factory=list)
    candidates: List[int] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.locations)

    def __len__(self) -> int:
        return len(self.locations)

    def first_in(self, lo: float, hi: float) -> Optional[float]:
        inside = [t for t in self.locations if lo < t < hi]
        return min(inside) if inside else None


def _jump(a: ScanRow, b: ScanRow) -> float:
    sa, sb = a.signature(), b.signature()
    return float(np.max(np.abs(sa - sb)))


def candidate_intervals(result: ScanResult, threshold: float = DEFAULT_THRESHOLD) -> List[int]:
    """Indices k such that the step from row k to row k+1 looks discontinuous."""
    rows = result.rows
    if len(rows) < 2:
        return []
    signatures = np.array([row.signature() for row in rows])
    steps = np.diff(signatures, axis=0)
    raw = np.max(np.abs(steps), axis=1)
    candidates = []
    for k in range(len(steps)):
        if raw[k] <= threshold:
            continue
        deviations = []
        if k > 0:
            deviations.append(np.max(np.abs(steps[k] - steps[k - 1])))
        if k + 1 < len(steps):
            deviations.append(np.max(np.abs(steps[k] - steps[k + 1])))
        if not deviations or min(deviations) > 0.5 * threshold:
            candidates.append(k)
    return candidates


def _refine(result: ScanResult, k: int, threshold: float, resolution: float) -> Bracket:
    lifted, opts, path = result.lifted, result.options, result.path
    rank = lifted.spec.source.rank
    left, right = result.rows[k], result.rows[k + 1]
    widened = not (left.converged and right.converged)
    step = 0
    while right.parameter - left.parameter > resolution:
        middle_t = 0.5 * (left.parameter + right.parameter)
        middle = evaluate_point(
            lifted, middle_t, path.at(middle_t, rank), opts,
            point_index=REFINE_INDEX_BASE + 64 * k + step,
            warm_start=left.vector, extra_starts=[right.vector],
        )
        widened = widened or not middle.converged
        if _jump(middle, left) <= _jump(middle, right):
            left = middle
        else:
            right = middle
        step += 1
        logger.debug(f"Bisection {k}.{step}: [{left.parameter:.6f}, {right.parameter:.6f}]")
    return Bracket(left.parameter, right.parameter, _jump(left, right), widened)


def detect_discontinuities(
    result: ScanResult,
    threshold: float = DEFAULT_THRESHOLD,
    resolution: float = DEFAULT_RESOLUTION,
    refine: bool = True,
) -> Discontinuities:
    """
    Locate discontinuities of the sorted mass vector or V_min along a scan.

    Args:
        result: scan to inspect (its path, basis and options drive re-minimization)
        threshold: sup-norm jump size that counts as discontinuous
        resolution: path-parameter width of the final brackets
        refine: bisect candidates (otherwise interval midpoints are returned)

    Returns:
        Discontinuities with ascending locations; unconverged rows inside a
        bracket produce a widened-bracket warning.
    """
    candidates = candidate_intervals(result, threshold)
    report = Discontinuities(locations=[], candidates=candidates)
    if not result.path.continuous:
        if candidates:
            report.warnings.append("grid scans are not refined; candidates reported as interval midpoints")
        refine = False

    for k in candidates:
        left, right = result.rows[k], result.rows[k + 1]
        if not refine:
            report.brackets.append(Bracket(left.parameter, right.parameter, _jump(left, right)))
            continue
        bracket = _refine(result, k, threshold, resolution)
        if bracket.widened:
            report.warnings.append(
                f"widened bracket [{bracket.left:.6f}, {bracket.right:.6f}]: unconverged rows inside"
            )
        if bracket.jump > 0.5 * threshold:
            report.brackets.append(bracket)
        else:
            logger.info(f"Candidate between t={left.parameter:.4f} and t={right.parameter:.4f} is continuous")

    report.locations = sorted(bracket.location for bracket in report.brackets)
    for warning in report.warnings:
        logger.warning(warning)
    logger.info(f"Detected {len(report.locations)} discontinuities: {[round(t, 4) for t in report.locations]}")
    return report
