"""Full diagonal scans of the four embedding cases (slow; run with -m slow)."""

import numpy as np
import pytest

from af_gauge.algebra.afcore import case_embedding
from af_gauge.algebra.lift import build_lifted_basis
from af_gauge.processing.discontinuities import detect_discontinuities
from af_gauge.processing.minimizer import MinimizerOptions
from af_gauge.processing.scan import anti_diagonal_path, diagonal_path, fit_cluster_slope, scan_path, spectrum_symmetry_residual

# first discontinuity in (0, 1) and first beyond 1
EXPECTED = {
    "case1": (0.563, 2.376),
    "case2": (0.542, 2.456),
    "case3": (0.734, 2.263),
    "case4": (0.475, 2.526),
}
OPTIONS = MinimizerOptions(restarts=8, seed=0)


def _diagonal_scan(name):
    lifted = build_lifted_basis(case_embedding(name))
    result = scan_path(lifted, diagonal_path(-1.0, 3.0, 161), OPTIONS)
    return result, detect_discontinuities(result)


@pytest.mark.slow
@pytest.mark.integration
class TestDiagonalScans:
    """Reproduce the discontinuity positions of the diagonal scans."""

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_discontinuities(self, name):
        result, found = _diagonal_scan(name)
        first, second = EXPECTED[name]
        assert result.all_converged, result.warnings
        assert found.first_in(0.0, 1.0) == pytest.approx(first, abs=0.02)
        assert found.first_in(1.0, np.inf) == pytest.approx(second, abs=0.05)

    def test_case1_slopes_below_the_first_jump(self):
        result, found = _diagonal_scan("case1")
        upper = found.first_in(0.0, 1.0) - 0.05
        assert fit_cluster_slope(result, "a1", (0.05, upper)) == pytest.approx(2.0, rel=0.02)
        assert fit_cluster_slope(result, "c1", (0.05, upper)) == pytest.approx(np.sqrt(1.5), rel=0.02)


@pytest.mark.slow
@pytest.mark.integration
class TestAntiDiagonalScan:
    """Swapping the two M2 summands of case2 mirrors lambda_1 + lambda_2 = 0.5 about 0.25."""

    @pytest.fixture(scope="class")
    def half_line(self):
        lifted = build_lifted_basis(case_embedding("case2"))
        path = anti_diagonal_path(0.5, 0.0, 0.5, 41)
        result = scan_path(lifted, path, OPTIONS)
        return path, result, detect_discontinuities(result)

    def test_spectra_are_mirror_symmetric(self, half_line):
        _, result, _ = half_line
        assert result.all_converged, result.warnings
        assert spectrum_symmetry_residual(result, 0.25) < 1e-2

    def test_endpoints_swap_the_summands(self, half_line):
        path, result, _ = half_line
        assert np.allclose(path.at(0.0, 2), [0.0, 0.5])
        assert np.allclose(path.at(0.5, 2), [0.5, 0.0])
        assert result.rows[0].v_min == pytest.approx(result.rows[-1].v_min, rel=1e-3, abs=1e-8)

    def test_discontinuities_are_mirror_symmetric(self, half_line):
        path, _, found = half_line
        step = (path.end[0] - path.start[0]) / (path.samples - 1)
        for t in found.locations:
            assert min(abs(s - (0.5 - t)) for s in found.locations) <= step + 1e-3
