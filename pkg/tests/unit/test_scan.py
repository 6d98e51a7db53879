"""Unit tests for lambda paths and scans."""

import numpy as np
import pytest

from af_gauge.exceptions import InvalidArgumentError
from af_gauge.processing.minimizer import MinimizerOptions
from af_gauge.processing.scan import (
    PathSpec,
    anti_diagonal_path,
    diagonal_path,
    fit_cluster_slope,
    reference_scan,
    scan_path,
    spectrum_symmetry_residual,
    square_lines,
)

ONE_START = MinimizerOptions(restarts=1)


class TestPathSpec:
    """Test path construction and sampling."""

    def test_diagonal(self):
        points = diagonal_path(-1.0, 3.0, 5).points(2)
        assert [t for t, _ in points] == [-1.0, 0.0, 1.0, 2.0, 3.0]
        assert np.array_equal(points[2][1], [1.0, 1.0])

    def test_anti_diagonal(self):
        path = anti_diagonal_path(0.5, 0.0, 0.5, 3)
        points = path.points(2)
        assert np.allclose(points[1][1], [0.25, 0.25])
        assert np.allclose(points[0][1], [0.0, 0.5])
        with pytest.raises(InvalidArgumentError):
            path.at(0.1, 1)

    def test_segment(self):
        path = PathSpec("segment", (1.0, 0.0), (0.0, 1.0), 3)
        assert np.allclose(path.at(0.5, 2), [0.5, 0.5])
        with pytest.raises(InvalidArgumentError):
            path.points(3)

    def test_grid(self):
        path = PathSpec("grid", (0.0, 0.0), (1.0, 2.0), 3)
        points = path.points(2)
        assert len(points) == 9
        assert points[0][0] == 0.0 and points[-1][0] == 1.0
        assert np.allclose(points[5][1], [1.0 / 2, 2.0])
        assert not path.continuous
        with pytest.raises(InvalidArgumentError):
            path.at(0.5, 2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "spiral", "start": (0.0,), "end": (1.0,), "samples": 3},
            {"kind": "diagonal", "start": (0.0,), "end": (1.0,), "samples": 1},
            {"kind": "diagonal", "start": (float("nan"),), "end": (1.0,), "samples": 3},
            {"kind": "anti-diagonal", "start": (0.0,), "end": (1.0,), "samples": 3},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            PathSpec(**kwargs)

    def test_square_lines(self):
        lines = square_lines(11)
        assert len(lines) == 7
        assert [p.kind for p in lines].count("segment") == 6
        assert lines[-1].kind == "anti-diagonal" and lines[-1].c == 0.5
        assert len({p.name for p in lines}) == 7

    def test_to_dict(self):
        assert "c" not in diagonal_path().to_dict()
        assert anti_diagonal_path(0.5).to_dict()["c"] == 0.5


class TestScanPath:
    """Test scans on the identity embedding, where nothing is minimized."""

    @pytest.fixture(scope="class")
    def identity_scan(self, m2_identity):
        return scan_path(m2_identity, diagonal_path(-1.0, 1.0, 9), ONE_START)

    def test_rows(self, identity_scan):
        assert len(identity_scan.rows) == 9
        assert identity_scan.all_converged
        expected = 6.0 * (identity_scan.parameters ** 2 - identity_scan.parameters) ** 2
        assert np.allclose(identity_scan.v_min, expected)

    def test_frame_schema(self, identity_scan):
        frame = identity_scan.to_frame()
        assert list(frame.columns[:4]) == ["path_param", "lambda_1", "V_min", "converged"]
        assert [c for c in frame.columns if c.startswith("mass_")] == [f"mass_{k}" for k in range(1, 5)]
        assert frame["label_4"].tolist() == ["trace"] * 9
        assert frame["mass_1"].iloc[0] == pytest.approx(2.0)

    def test_slope(self, identity_scan):
        assert fit_cluster_slope(identity_scan, "a1", (0.2, 1.0)) == pytest.approx(2.0)
        assert fit_cluster_slope(identity_scan, "a1", (-1.0, -0.2)) == pytest.approx(-2.0)
        with pytest.raises(InvalidArgumentError):
            fit_cluster_slope(identity_scan, "c1", (0.0, 1.0))

    def test_mass_symmetry(self, identity_scan):
        assert spectrum_symmetry_residual(identity_scan, 0.0) < 1e-9
        assert spectrum_symmetry_residual(identity_scan, 0.25) > 0.1

    def test_metadata(self, identity_scan):
        assert identity_scan.metadata["path"]["kind"] == "diagonal"
        assert identity_scan.metadata["optimizer"]["restarts"] == 1
        assert identity_scan.warnings == []


class TestReferenceScan:
    """Test the un-embedded source curves."""

    def test_sl2_curve(self, sl2):
        frame = reference_scan([sl2], diagonal_path(0.0, 1.0, 3))
        assert np.allclose(frame["V"], [0.0, 0.375, 0.0])
        assert np.allclose(frame["mass_1"], [0.0, 1.0, 2.0])

    def test_two_summands(self, sl2):
        frame = reference_scan([sl2, sl2], anti_diagonal_path(1.0, 0.0, 1.0, 3))
        assert list(frame.columns) == ["path_param", "V", "mass_1", "mass_2"]
        assert np.allclose(frame["mass_1"], frame["mass_2"][::-1].to_numpy())
