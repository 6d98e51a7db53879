"""
Run orchestration for the af-gauge subcommands.

ScanPipeline turns a validated RunConfig into output files: the lifted
basis dump, path scans with their discontinuities and summary row, mass
spectra at chosen lambda points, K0 pushforward tables and the invariant
check report. Every output carries the echoed config so a run can be
reproduced from its own metadata.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from tabulate import tabulate

from ..algebra.afcore import k0_pushforward
from ..algebra.lift import LiftedBasis, basis_dump, build_lifted_basis, class_counts, gauge_labels
from ..config.run_config import RunConfig
from ..gauge.masses import MassSpectrum, spectrum_at
from .checks import create_checker
from .discontinuities import detect_discontinuities
from .minimizer import minimize_at
from .scan import ScanResult, scan_path
from .summary import CaseScan, summarize

CSV_FLOAT_FORMAT = "%.12g"

# exit codes
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNCONVERGED = 3


@dataclass
class PipelineResult:
    """Result of one subcommand run."""

    success: bool
    command: str
    outputs: List[Path] = field(default_factory=list)
    report: str = ""
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    partial: bool = False

    @property
    def exit_code(self) -> int:
        if self.success:
            return EXIT_OK
        return EXIT_UNCONVERGED if self.partial and not self.errors else EXIT_FAILED


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", text).strip("-").lower() or "path"


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _spectrum_record(spectrum: MassSpectrum) -> dict:
    return {
        "masses": [float(m) for m in spectrum.masses],
        "labels": list(spectrum.labels),
        "clusters": [
            {
                "mass": cluster.mass,
                "degeneracy": cluster.degeneracy,
                "label": cluster.dominant_label,
                "composition": cluster.composition,
            }
            for cluster in spectrum.clusters
        ],
    }


class ScanPipeline:
    """
    Executes the subcommands for one RunConfig.

    Outputs are written below config.output_dir (or the explicit
    output_dir override); the directory is created on first use.
    """

    def __init__(self, config: RunConfig, output_dir: Optional[Path] = None):
        """
        Initialize the pipeline.

        Args:
            config: validated run configuration
            output_dir: directory overriding config.output_dir
        """
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)
        self.logger = logging.getLogger(__name__)
        self._lifted: Optional[LiftedBasis] = None

    @property
    def lifted(self) -> LiftedBasis:
        if self._lifted is None:
            self.logger.info(f"Building lifted basis for {self.config.name}: {self.config.embedding().to_dict()}")
            self._lifted = build_lifted_basis(self.config.embedding())
        return self._lifted

    def _metadata(self) -> dict:
        return {"config": self.config.echo(), "embedding": self.config.embedding().to_dict()}

    def _prepare_output(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir

    def run(self, command: str) -> PipelineResult:
        """Dispatch a subcommand by name."""
        handlers = {
            "basis": self.run_basis,
            "scan": self.run_scan,
            "masses": self.run_masses,
            "k0": self.run_k0,
            "check": self.run_check,
        }
        if command not in handlers:
            return PipelineResult(success=False, command=command, errors=[f"Unknown command: {command}"])
        return handlers[command]()

    def run_basis(self) -> PipelineResult:
        """Dump the lifted basis with labels, family tags and dof counts to basis.json."""
        out = self._prepare_output()
        dump = basis_dump(self.lifted)
        dump["metadata"] = self._metadata()
        path = _write_json(out / "basis.json", dump)

        rows = []
        for block in self.lifted.blocks:
            for family, count in block.family_counts().items():
                rows.append([block.j + 1, block.m, family, count])
        n_idof, n_ndof = dump["n_idof"], dump["n_ndof"]
        lines = [
            tabulate(rows, headers=["block", "m", "family", "count"], tablefmt="github"),
            "",
            f"n_idof = {n_idof}, n_ndof = {n_ndof}, r_dof = {dump['r_dof']:.3f}" if n_idof
            else f"n_idof = 0, n_ndof = {n_ndof}, r_dof undefined",
        ]
        if dump["class_counts"] is not None:
            lines.append(tabulate(sorted(dump["class_counts"].items()), headers=["class", "count"], tablefmt="github"))
        self.logger.info(f"Wrote {path}")
        return PipelineResult(success=True, command="basis", outputs=[path], report="\n".join(lines))

    def _csv_name(self, index: int, count: int, name: str) -> str:
        return "scan.csv" if count == 1 else f"scan_{index + 1}_{_slug(name)}.csv"

    def run_scan(self) -> PipelineResult:
        """
        Scan every configured path, detect discontinuities and summarize.

        Writes one CSV per path (scan.csv for a single path) and summary.json.
        Unconverged points keep the outputs but mark them partial.
        """
        out = self._prepare_output()
        opts = self.config.minimizer_options()
        specs = self.config.path_specs()
        outputs, warnings, records = [], [], []
        summary_scan: Optional[ScanResult] = None
        summary_discontinuities = None

        for index, path_spec in enumerate(specs):
            self.logger.info(f"Path {index + 1}/{len(specs)}: {path_spec.name or path_spec.kind}")
            result = scan_path(self.lifted, path_spec, opts)
            found = detect_discontinuities(
                result,
                threshold=self.config.discontinuity_threshold,
                resolution=self.config.resolution,
            )
            csv_path = out / self._csv_name(index, len(specs), path_spec.name or path_spec.kind)
            result.to_frame().to_csv(csv_path, index=False, float_format=CSV_FLOAT_FORMAT)
            outputs.append(csv_path)

            path_warnings = result.warnings + found.warnings
            warnings.extend(f"{path_spec.name or path_spec.kind}: {w}" for w in path_warnings)
            records.append({
                "path": path_spec.to_dict(),
                "csv": csv_path.name,
                "all_converged": result.all_converged,
                "discontinuities": [round(t, 6) for t in found.locations],
                "brackets": [
                    {"left": b.left, "right": b.right, "jump": b.jump, "widened": b.widened}
                    for b in found.brackets
                ],
                "warnings": path_warnings,
            })
            if summary_scan is None and path_spec.continuous:
                summary_scan, summary_discontinuities = result, found

        table = summarize([CaseScan(self.config.name, self.lifted, summary_scan, summary_discontinuities)])
        warnings.extend(table.warnings)
        partial = not all(record["all_converged"] for record in records)

        payload = self._metadata()
        payload.update({
            "paths": records,
            "summary": table.to_records(),
            "partial": partial,
            "warnings": warnings,
        })
        outputs.append(_write_json(out / "summary.json", payload))
        for path in outputs:
            self.logger.info(f"Wrote {path}")
        return PipelineResult(
            success=not partial,
            command="scan",
            outputs=outputs,
            report=table.render(),
            warnings=warnings,
            partial=partial,
        )

    def _mass_points(self) -> List[List[float]]:
        rank = self.config.embedding().source.rank
        return self.config.masses.points or [[1.0] * rank]

    def run_masses(self) -> PipelineResult:
        """Minimize at each configured lambda point and report its labelled spectrum."""
        out = self._prepare_output()
        opts = self.config.minimizer_options()
        labels = gauge_labels(self.lifted)
        points, warnings, lines = [], [], []

        for index, lambdas in enumerate(self._mass_points()):
            result = minimize_at(self.lifted, lambdas, opts, point_index=index)
            spectrum = spectrum_at(self.lifted, result.minimizer)
            if not result.converged:
                warnings.append(f"lambda={lambdas} did not converge: |grad| = {result.grad_norm:.2e}")
            record = {
                "lambdas": list(result.lambdas),
                "v_min": result.v_min,
                "converged": result.converged,
                "grad_norm": result.grad_norm,
            }
            record.update(_spectrum_record(spectrum))
            points.append(record)

            rows = [[c.mass, c.degeneracy, c.dominant_label] for c in spectrum.clusters]
            lines.append(f"lambda = {list(result.lambdas)}  V_min = {result.v_min:.6e}")
            lines.append(tabulate(rows, headers=["mass", "degeneracy", "class"], tablefmt="github", floatfmt=".6f"))
            lines.append("")

        partial = bool(warnings)
        payload = self._metadata()
        payload.update({
            "gauge_labels": labels,
            "class_counts": class_counts(labels),
            "points": points,
            "partial": partial,
            "warnings": warnings,
        })
        path = _write_json(out / "masses.json", payload)
        self.logger.info(f"Wrote {path}")
        return PipelineResult(
            success=not partial,
            command="masses",
            outputs=[path],
            report="\n".join(lines).rstrip(),
            warnings=warnings,
            partial=partial,
        )

    def k0_tables(self) -> Dict[str, list]:
        """Multiplicity table (images of unit vectors) and the configured vectors' images."""
        spec = self.config.embedding()
        units = []
        for i in range(spec.source.rank):
            unit = [0] * spec.source.rank
            unit[i] = 1
            units.append({"vector": unit, "image": list(k0_pushforward(spec, unit))})
        vectors = [{"vector": list(v), "image": list(k0_pushforward(spec, v))} for v in self.config.k0.vectors]
        return {"units": units, "vectors": vectors}

    def run_k0(self) -> PipelineResult:
        """Print and store K0 pushforwards beta = alpha v."""
        out = self._prepare_output()
        tables = self.k0_tables()
        lines = [tabulate(
            [[str(tuple(e["vector"])), str(tuple(e["image"]))] for e in tables["units"]],
            headers=["e_i", "alpha e_i"], tablefmt="github",
        )]
        if tables["vectors"]:
            lines.append("")
            lines.append(tabulate(
                [[str(tuple(e["vector"])), str(tuple(e["image"]))] for e in tables["vectors"]],
                headers=["v", "alpha v"], tablefmt="github",
            ))
        payload = self._metadata()
        payload.update(tables)
        path = _write_json(out / "k0.json", payload)
        self.logger.info(f"Wrote {path}")
        return PipelineResult(success=True, command="k0", outputs=[path], report="\n".join(lines))

    def run_check(self) -> PipelineResult:
        """Run the invariant suite; any ERROR or CRITICAL failure fails the command."""
        out = self._prepare_output()
        checker = create_checker(seed=self.config.seed)
        result = checker.run_all()
        payload = {"metadata": self._metadata()}
        payload.update(result.to_dict())
        path = _write_json(out / "check.json", payload)

        lines = [f"{'✅' if result.success else '❌'} {result.total_checks} checks, "
                 f"{result.failure_count} failures, {result.warning_count} warnings"]
        lines.extend(f"   • {failure}" for failure in result.failures + result.warnings)
        return PipelineResult(
            success=result.success,
            command="check",
            outputs=[path],
            report="\n".join(lines),
            warnings=[str(w) for w in result.warnings],
            errors=[str(f) for f in result.failures],
        )


def create_pipeline(config: RunConfig, output_dir: Optional[Path] = None) -> ScanPipeline:
    """
    Create a pipeline for a validated configuration.

    Args:
        config: RunConfig from parse_config or preset_config
        output_dir: optional override of config.output_dir

    Returns:
        Configured ScanPipeline instance
    """
    return ScanPipeline(config=config, output_dir=output_dir)
