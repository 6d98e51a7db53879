"""
Processing layer: minimization, path scans and their analysis.

Main Components:
- minimizer: multistart L-BFGS-B minimization at fixed lambda
- scan: lambda paths, scan rows and CSV frames
- discontinuities: jump detection with bisection refinement
- summary: the per-case dof and discontinuity table
- checks: the invariant suite behind `af-gauge check`
- pipeline: subcommand orchestration (import it directly; it depends on config)
"""

from .checks import CheckResult, InvariantChecker, create_checker
from .discontinuities import Discontinuities, detect_discontinuities
from .minimizer import MinimizerOptions, MinResult, minimize_at
from .scan import PathSpec, ScanResult, scan_path
from .summary import SummaryTable, summarize

__all__ = [
    'MinimizerOptions',
    'MinResult',
    'minimize_at',
    'PathSpec',
    'ScanResult',
    'scan_path',
    'Discontinuities',
    'detect_discontinuities',
    'SummaryTable',
    'summarize',
    'CheckResult',
    'InvariantChecker',
    'create_checker',
]
