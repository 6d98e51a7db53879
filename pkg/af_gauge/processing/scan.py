"""
lambda-path scans of the constrained Higgs minimum and its mass spectrum.

A scan walks a path in lambda-space with warm-start continuation (the
previous minimizer initializes the next point) plus seeded restarts, and
records V_min with the labelled mass spectrum at every point.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..algebra.lift import LiftedBasis
from ..algebra.matalg import SlBasis
from ..exceptions import InvalidArgumentError
from ..gauge.action import source_mass_reference, source_potential
from ..gauge.masses import MassSpectrum, spectrum_at
from .minimizer import MinimizerOptions, minimize_at

logger = logging.getLogger(__name__)

PATH_KINDS = ("diagonal", "anti-diagonal", "grid", "segment")


@dataclass(frozen=True)
class PathSpec:
    """
    A path in lambda-space.

    diagonal: lambda = (t, ..., t) for t from start[0] to end[0].
    anti-diagonal: lambda = (t, c - t) for t from start[0] to end[0].
    segment: lambda = start + t (end - start), t in [0, 1].
    grid: product grid between start and end with `samples` points per axis,
        row-major; t is the normalized flat index.
    """

    kind: str
    start: Tuple[float, ...]
    end: Tuple[float, ...]
    samples: int
    c: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in PATH_KINDS:
            raise InvalidArgumentError(f"Unknown path kind {self.kind!r}; expected one of {PATH_KINDS}")
        if self.samples < 2:
            raise InvalidArgumentError(f"A path needs at least 2 samples, got {self.samples}")
        if not np.all(np.isfinite(self.start)) or not np.all(np.isfinite(self.end)):
            raise InvalidArgumentError("Path endpoints must be finite")
        if self.kind == "anti-diagonal" and (self.c is None or not np.isfinite(self.c)):
            raise InvalidArgumentError("An anti-diagonal path needs a finite constant c")

    def _count(self, rank: int) -> int:
        return self.samples ** rank if self.kind == "grid" else self.samples

    def at(self, t: float, rank: int) -> np.ndarray:
        """lambda vector at path parameter t (not defined for grids)."""
        if self.kind == "diagonal":
            return np.full(rank, float(t))
        if self.kind == "anti-diagonal":
            if rank != 2:
                raise InvalidArgumentError("Anti-diagonal paths need exactly two source summands")
            return np.array([t, self.c - t], dtype=float)
        if self.kind == "segment":
            start, end = self._vectors(rank)
            return start + t * (end - start)
        raise InvalidArgumentError("Grid paths have no continuous parameter")

    def _vectors(self, rank: int) -> Tuple[np.ndarray, np.ndarray]:
        start = np.asarray(self.start, dtype=float)
        end = np.asarray(self.end, dtype=float)
        if start.shape != (rank,) or end.shape != (rank,):
            raise InvalidArgumentError(f"{self.kind} endpoints must have {rank} entries")
        return start, end

    def points(self, rank: int) -> List[Tuple[float, np.ndarray]]:
        """(path parameter, lambda vector) pairs in path order."""
        if self.kind in ("diagonal", "anti-diagonal"):
            ts = np.linspace(self.start[0], self.end[0], self.samples)
            return [(float(t), self.at(t, rank)) for t in ts]
        if self.kind == "segment":
            return [(float(t), self.at(t, rank)) for t in np.linspace(0.0, 1.0, self.samples)]
        start, end = self._vectors(rank)
        axes = [np.linspace(a, b, self.samples) for a, b in zip(start, end)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, rank)
        count = mesh.shape[0]
        return [(k / (count - 1), mesh[k]) for k in range(count)]

    @property
    def continuous(self) -> bool:
        return self.kind != "grid"

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "start": list(self.start), "end": list(self.end), "samples": self.samples}
        if self.c is not None:
            data["c"] = self.c
        if self.name:
            data["name"] = self.name
        return data


def diagonal_path(start: float = -1.0, end: float = 3.0, samples: int = 161) -> PathSpec:
    return PathSpec("diagonal", (start,), (end,), samples, name="diagonal")


def anti_diagonal_path(c: float = 0.5, start: float = 0.0, end: float = 0.5, samples: int = 41) -> PathSpec:
    return PathSpec("anti-diagonal", (start,), (end,), samples, c=c, name=f"anti-diagonal c={c:g}")


def square_lines(samples: int = 41) -> List[PathSpec]:
    """The seven lines of the unit lambda-square: four edges, both diagonals, lambda_1 + lambda_2 = 0.5."""
    corners = {"00": (0.0, 0.0), "10": (1.0, 0.0), "11": (1.0, 1.0), "01": (0.0, 1.0)}
    lines = [("edge-bottom", "00", "10"), ("edge-right", "10", "11"), ("edge-top", "11", "01"),
             ("edge-left", "01", "00"), ("diagonal", "00", "11"), ("cross-diagonal", "10", "01")]
    paths = [PathSpec("segment", corners[a], corners[b], samples, name=name) for name, a, b in lines]
    paths.append(anti_diagonal_path(0.5, 0.0, 0.5, samples))
    return paths


@dataclass
class ScanRow:
    """One scanned lambda point."""

    parameter: float
    lambdas: Tuple[float, ...]
    v_min: float
    converged: bool
    grad_norm: float
    spectrum: MassSpectrum
    vector: np.ndarray

    def signature(self) -> np.ndarray:
        """Sorted masses followed by V_min, the vector compared between rows."""
        return np.concatenate([self.spectrum.sorted_masses, [self.v_min]])


@dataclass
class ScanResult:
    """Rows of a path scan plus what is needed to re-minimize inside it."""

    rows: List[ScanRow]
    path: PathSpec
    lifted: LiftedBasis
    options: MinimizerOptions
    metadata: Dict = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def parameters(self) -> np.ndarray:
        return np.array([row.parameter for row in self.rows])

    @property
    def v_min(self) -> np.ndarray:
        return np.array([row.v_min for row in self.rows])

    @property
    def all_converged(self) -> bool:
        return all(row.converged for row in self.rows)

    def mass_table(self) -> np.ndarray:
        """rows x gauge directions matrix of masses, each row sorted descending."""
        return np.array([row.spectrum.sorted_masses for row in self.rows])

    def to_frame(self) -> pd.DataFrame:
        """
        CSV schema: path_param, lambda_1..lambda_r, V_min, converged, then
        mass_k, label_k pairs with masses sorted descending.
        """
        records = []
        for row in self.rows:
            record = {"path_param": row.parameter}
            for i, lam in enumerate(row.lambdas, start=1):
                record[f"lambda_{i}"] = lam
            record["V_min"] = row.v_min
            record["converged"] = bool(row.converged)
            order = np.argsort(-row.spectrum.masses, kind="stable")
            for k, idx in enumerate(order, start=1):
                record[f"mass_{k}"] = float(row.spectrum.masses[idx])
                record[f"label_{k}"] = row.spectrum.labels[idx]
            records.append(record)
        return pd.DataFrame.from_records(records)


def evaluate_point(
    lifted: LiftedBasis,
    parameter: float,
    lambdas: Sequence[float],
    opts: MinimizerOptions,
    point_index: int,
    warm_start: Optional[np.ndarray] = None,
    extra_starts: Sequence[np.ndarray] = (),
) -> ScanRow:
    """Minimize at one point and attach its labelled spectrum."""
    result = minimize_at(lifted, lambdas, opts, warm_start=warm_start,
                         point_index=point_index, extra_starts=extra_starts)
    return ScanRow(
        parameter=float(parameter),
        lambdas=result.lambdas,
        v_min=result.v_min,
        converged=result.converged,
        grad_norm=result.grad_norm,
        spectrum=spectrum_at(lifted, result.minimizer),
        vector=result.vector,
    )


def scan_path(lifted: LiftedBasis, path: PathSpec, opts: MinimizerOptions = MinimizerOptions()) -> ScanResult:
    """
    Sequential sweep with warm-start continuation and seeded restarts.

    Returns:
        ScanResult with rows in path order; unconverged points are listed
        in result.warnings
    """
    rank = lifted.spec.source.rank
    points = path.points(rank)
    logger.info(f"Scanning {path.name or path.kind} path: {len(points)} points, {opts.restarts} starts each")

    rows: List[ScanRow] = []
    warnings: List[str] = []
    previous: Optional[np.ndarray] = None
    for index, (parameter, lambdas) in enumerate(points):
        row = evaluate_point(lifted, parameter, lambdas, opts, index, warm_start=previous)
        rows.append(row)
        previous = row.vector if path.continuous else None
        if not row.converged:
            warnings.append(f"point {index} (t={parameter:.6g}) did not converge: |grad| = {row.grad_norm:.2e}")
        logger.info(f"[{index + 1}/{len(points)}] t={parameter:.4f} V_min={row.v_min:.6e} "
                    f"clusters={row.spectrum.degeneracies}")

    return ScanResult(
        rows=rows,
        path=path,
        lifted=lifted,
        options=opts,
        metadata={"path": path.to_dict(), "optimizer": opts.to_dict(), "embedding": lifted.spec.to_dict()},
        warnings=warnings,
    )


def fit_cluster_slope(result: ScanResult, label: str, interval: Tuple[float, float]) -> float:
    """
    Slope of the mean mass of `label` directions against the path parameter.

    Raises:
        InvalidArgumentError: if fewer than two rows in the interval carry the label
    """
    ts, ms = [], []
    lo, hi = interval
    for row in result.rows:
        if lo <= row.parameter <= hi:
            masses = row.spectrum.masses_for(label)
            if masses.size:
                ts.append(row.parameter)
                ms.append(float(np.mean(masses)))
    if len(ts) < 2:
        raise InvalidArgumentError(f"Not enough rows labelled {label!r} in {interval}")
    slope, _ = np.polyfit(ts, ms, 1)
    return float(slope)


def spectrum_symmetry_residual(result: ScanResult, center: float, tol: float = 1e-9) -> float:
    """max over mirrored row pairs (t, 2*center - t) of the sorted-mass difference."""
    parameters = result.parameters
    table = result.mass_table()
    worst = 0.0
    for k, t in enumerate(parameters):
        mirror = np.nonzero(np.abs(parameters - (2 * center - t)) <= tol)[0]
        if mirror.size:
            worst = max(worst, float(np.max(np.abs(table[k] - table[mirror[0]]))))
    return worst


def reference_scan(source_bases: Sequence[SlBasis], path: PathSpec) -> pd.DataFrame:
    """Source-only curve: V(lambda) and masses at B^i = lambda_i E^i, no minimization."""
    records = []
    for parameter, lambdas in path.points(len(source_bases)):
        record = {"path_param": parameter, "V": source_potential(source_bases, lambdas)}
        for i, masses in enumerate(source_mass_reference(source_bases, lambdas), start=1):
            record[f"mass_{i}"] = float(masses[0])
        records.append(record)
    return pd.DataFrame.from_records(records)
