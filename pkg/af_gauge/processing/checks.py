"""
Invariant checks behind the `check` subcommand.

Each rule is a small numeric experiment returning a list of CheckFailure
records; the checker groups rules by category, runs them all and reports
counts per severity. A rule that raises is recorded as a CRITICAL failure
instead of aborting the run.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional

import numpy as np

from ..algebra.afcore import (
    SCAN_CASES,
    block_trace,
    case_embedding,
    compose_embeddings,
    k0_pushforward,
    validate_embedding,
)
from ..algebra.forms import (
    Form,
    conjugate_form,
    connection_from_fields,
    curvature_form,
    gauge_transform_form,
    hodge_star,
    integral,
    koszul_d,
    random_form,
    scalar_product,
    wedge,
)
from ..algebra.lift import (
    block_orthogonality_residual,
    build_lifted_basis,
    class_counts,
    copy_weighted_product,
    dof_counts,
    gauge_labels,
    inherited_structure_residual,
    lift_form,
    phi_compatibility_residual,
)
from ..algebra.matalg import commutator_residual, gellmann_basis, jacobi_residual
from ..gauge.action import (
    gauge_transform_fields,
    inherited_action_terms,
    random_unitary,
    source_mass_reference,
    transform_source_fields,
)
from ..gauge.fields import random_configuration, source_fields
from ..gauge.masses import mass_form
from ..gauge.potential import gradient_relative_error, higgs_potential, potential_density

logger = logging.getLogger(__name__)

# (n_idof, n_ndof) and direction class counts of the four scan cases
EXPECTED_DOF = {
    "case1": (3, 5),
    "case2": (6, 9),
    "case3": (6, 18),
    "case4": (11, 13),
}
EXPECTED_CLASSES = {
    "case1": {"a1": 3, "c1": 4, "e": 1},
    "case2": {"a1": 3, "a2": 3, "b": 8, "d": 1},
    "case3": {"a1": 3, "a2": 3, "b": 8, "c1": 4, "c2": 4, "d": 1, "e": 1},
    "case4": {"a1": 3, "a2": 8, "b": 12, "d": 1},
}

ALGEBRA_TOL = 1e-10
GRADIENT_TOL = 1e-6
PRODUCT_TOL = 1e-9

# trials of the randomized gradient, gauge and K0 rules
GRADIENT_CONFIGS = 50
GAUGE_UNITARIES = 20
K0_CHAINS = 100


class CheckSeverity(Enum):
    """Check failure severity levels."""
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


@dataclass
class CheckFailure:
    """Single failed check with the measured quantity."""

    check: str
    message: str
    severity: CheckSeverity
    value: Optional[float] = None
    rule: Optional[str] = None

    def __str__(self) -> str:
        return f"[{self.severity.value.upper()}] {self.check}: {self.message}"


@dataclass
class CheckResult:
    """Result of an invariant check run."""

    success: bool
    total_checks: int
    failures: List[CheckFailure]
    warnings: List[CheckFailure]
    summary: Dict[str, int]

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    @property
    def warning_count(self) -> int:
        return len(self.warnings)

    @property
    def is_valid(self) -> bool:
        """No errors (warnings allowed)."""
        return self.failure_count == 0

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "total_checks": self.total_checks,
            "summary": self.summary,
            "failures": [str(f) for f in self.failures],
            "warnings": [str(w) for w in self.warnings],
        }


def _exceeds(check: str, value: float, tol: float, what: str) -> List[CheckFailure]:
    if math.isfinite(value) and value <= tol:
        return []
    return [CheckFailure(
        check=check,
        message=f"{what} = {value:.3e} exceeds {tol:.0e}",
        severity=CheckSeverity.ERROR,
        value=float(value),
    )]


class InvariantChecker:
    """Runs the algebraic and numerical invariants of the package on small cases."""

    def __init__(
        self,
        seed: int = 0,
        samples: int = 3,
        strict_mode: bool = False,
        gradient_configs: int = GRADIENT_CONFIGS,
        gauge_unitaries: int = GAUGE_UNITARIES,
        k0_chains: int = K0_CHAINS,
    ):
        """
        Initialize the checker.

        Args:
            seed: seed of the random forms, fields and gauge elements
            samples: random trials per randomized forms rule
            strict_mode: treat warnings as failures
            gradient_configs: random configurations per case in the gradient rule
            gauge_unitaries: random source unitaries per case in the gauge rule
            k0_chains: random three-step embedding chains in the K0 rule
        """
        self.seed = seed
        self.samples = samples
        self.strict_mode = strict_mode
        self.gradient_configs = gradient_configs
        self.gauge_unitaries = gauge_unitaries
        self.k0_chains = k0_chains
        self.logger = logging.getLogger(__name__)
        self._lifted = {}

        self.rules: Dict[str, List[Callable[[], List[CheckFailure]]]] = {
            "algebra": [
                self._check_structure_constants,
                self._check_sl2_constants,
            ],
            "forms": [
                self._check_d_squared,
                self._check_leibniz,
                self._check_summand_decomposition,
                self._check_orthogonal_decomposition,
                self._check_curvature_covariance,
                self._check_action_as_scalar_product,
                self._check_lifted_form_norm,
            ],
            "counting": [
                self._check_dof_counts,
                self._check_class_counts,
                self._check_lifted_structure,
            ],
            "masses": [
                self._check_source_masses,
            ],
            "gradient": [
                self._check_gradient,
            ],
            "gauge": [
                self._check_gauge_invariance,
            ],
            "action": [
                self._check_inherited_action,
            ],
            "k0": [
                self._check_k0_functoriality,
            ],
        }

    def _rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, stream]))

    def _case(self, name: str):
        if name not in self._lifted:
            self._lifted[name] = build_lifted_basis(case_embedding(name))
        return self._lifted[name]

    def run_all(self, categories: Optional[List[str]] = None) -> CheckResult:
        """
        Run every rule (or those of the given categories).

        Returns:
            CheckResult; success means no ERROR or CRITICAL failure
            (and no warning in strict mode)
        """
        failures: List[CheckFailure] = []
        warnings: List[CheckFailure] = []
        total = 0

        selected = categories or list(self.rules)
        for category in selected:
            if category not in self.rules:
                failures.append(CheckFailure(
                    check="categories",
                    message=f"Unknown check category: {category}",
                    severity=CheckSeverity.CRITICAL,
                ))
                continue
            for rule in self.rules[category]:
                total += 1
                self.logger.info(f"Running {category}/{rule.__name__.lstrip('_')}")
                try:
                    found = rule()
                except Exception as e:
                    self.logger.error(f"Check rule {rule.__name__} failed: {e}")
                    found = [CheckFailure(
                        check=category,
                        message=f"Internal check error: {str(e)}",
                        severity=CheckSeverity.CRITICAL,
                        rule=rule.__name__,
                    )]
                for failure in found:
                    failure.rule = failure.rule or rule.__name__
                    if failure.severity in (CheckSeverity.ERROR, CheckSeverity.CRITICAL):
                        failures.append(failure)
                    else:
                        warnings.append(failure)

        summary = {}
        for severity in CheckSeverity:
            count = sum(1 for f in failures + warnings if f.severity == severity)
            if count > 0:
                summary[severity.value] = count

        success = not failures and (not self.strict_mode or not warnings)
        self.logger.info(f"Ran {total} checks: {len(failures)} failures, {len(warnings)} warnings")
        return CheckResult(
            success=success,
            total_checks=total,
            failures=failures,
            warnings=warnings,
            summary=summary,
        )

    # Algebra

    def _check_structure_constants(self) -> List[CheckFailure]:
        failures = []
        for n in range(2, 6):
            basis = gellmann_basis(n)
            failures += _exceeds(f"sl({n})", jacobi_residual(basis.structconst), ALGEBRA_TOL, "Jacobi residual")
            failures += _exceeds(f"sl({n})", commutator_residual(basis), ALGEBRA_TOL, "commutator residual")
            gram_defect = float(np.max(np.abs(basis.gram + np.eye(basis.dim))))
            failures += _exceeds(f"sl({n})", gram_defect, 1e-12, "|g + 1|")
        return failures

    def _check_sl2_constants(self) -> List[CheckFailure]:
        constants = gellmann_basis(2).structconst
        epsilon = np.zeros((3, 3, 3))
        for a, b, c, sign in [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)]:
            epsilon[a, b, c] = sign
        defect = float(np.max(np.abs(constants + math.sqrt(2.0) * epsilon)))
        return _exceeds("sl(2)", defect, 1e-12, "|C + sqrt(2) eps|")

    # Forms

    def _check_d_squared(self) -> List[CheckFailure]:
        rng = self._rng(1)
        failures = []
        for n in (2, 3):
            bases = [gellmann_basis(n)]
            for degree in range(0, 3):
                for _ in range(self.samples):
                    omega = random_form(bases, degree, rng, density=0.3 if n == 3 else 1.0)
                    failures += _exceeds(f"sl({n}) degree {degree}", koszul_d(koszul_d(omega)).max_abs(), 1e-9, "|d d omega|")
        return failures

    def _check_leibniz(self) -> List[CheckFailure]:
        rng = self._rng(2)
        bases = [gellmann_basis(2), gellmann_basis(2)]
        failures = []
        for p in range(0, 3):
            for q in range(0, 2):
                omega, eta = random_form(bases, p, rng), random_form(bases, q, rng)
                lhs = koszul_d(wedge(omega, eta))
                rhs = wedge(koszul_d(omega), eta) + wedge(omega, koszul_d(eta)) * ((-1) ** p)
                failures += _exceeds(f"degrees ({p}, {q})", (lhs - rhs).max_abs(), 1e-9, "Leibniz residual")
        return failures

    def _check_summand_decomposition(self) -> List[CheckFailure]:
        """d on M_2 + M_2 acts summand by summand."""
        rng = self._rng(3)
        single = [gellmann_basis(2)]
        omega = random_form(single * 2, 1, rng)
        joint = koszul_d(omega)
        failures = []
        for i in range(2):
            alone = koszul_d(Form.from_components(single, [dict(omega.components[i])]))
            keys = set(alone.components[0]) | set(joint.components[i])
            defect = max(
                (float(np.max(np.abs(joint.component(i, k) - alone.component(0, k)))) for k in keys),
                default=0.0,
            )
            failures += _exceeds(f"summand {i}", defect, 1e-12, "decomposition residual")
        return failures

    def _check_orthogonal_decomposition(self) -> List[CheckFailure]:
        """On M_2 + M_2 the integral of omega ^ star omega' is the sum of the summand integrals."""
        rng = self._rng(10)
        bases = [gellmann_basis(2)] * 2
        failures = []
        for degree in range(4):
            for _ in range(self.samples):
                omega, other = random_form(bases, degree, rng), random_form(bases, degree, rng)
                joint = integral(wedge(omega, hodge_star(other)))
                split = sum(integral(wedge(omega.summand(i), hodge_star(other.summand(i)))) for i in range(2))
                scale = max(1.0, abs(joint))
                failures += _exceeds(f"degree {degree}", abs(joint - split) / scale, PRODUCT_TOL, "split residual")
                failures += _exceeds(
                    f"degree {degree}", abs(joint - scalar_product(omega, other)) / scale, PRODUCT_TOL,
                    "closed-form residual",
                )
        return failures

    def _check_lifted_form_norm(self) -> List[CheckFailure]:
        """(eta, eta) = sum_i alpha_i (omega_i, omega_i) for eta = lift_form(omega)."""
        rng = self._rng(11)
        embeddings = {
            "case1": self._case("case1"),
            "case2": self._case("case2"),
            "double-copy": build_lifted_basis(validate_embedding((2,), (5,), ((2,),))),
        }
        failures = []
        for name, lifted in embeddings.items():
            for degree in (1, 2):
                for _ in range(self.samples):
                    omega = random_form(lifted.source_bases, degree, rng)
                    expected = copy_weighted_product(lifted, omega)
                    eta = lift_form(lifted, omega)
                    defect = abs(scalar_product(eta, eta) - expected) / max(1.0, abs(expected))
                    failures += _exceeds(f"{name} degree {degree}", defect, PRODUCT_TOL, "lifted norm residual")

        # M_2 -> M_3 again, through the materialized Hodge dual on both sides
        case1 = self._case("case1")
        for degree in (1, 2):
            omega = random_form(case1.source_bases, degree, rng)
            eta = lift_form(case1, omega)
            source = integral(wedge(omega, hodge_star(omega)))
            target = integral(wedge(eta, hodge_star(eta)))
            failures += _exceeds(
                f"case1 degree {degree}", abs(target - source) / max(1.0, abs(source)), PRODUCT_TOL,
                "|int eta ^ star eta - int omega ^ star omega|",
            )
        return failures

    def _check_curvature_covariance(self) -> List[CheckFailure]:
        rng = self._rng(4)
        bases = [gellmann_basis(2)]
        failures = []
        for _ in range(self.samples):
            omega = connection_from_fields(bases, [random_anti_hermitian(2, 3, rng)])
            u = [random_unitary(2, rng)]
            moved = curvature_form(gauge_transform_form(omega, u, connection=True))
            expected = conjugate_form(curvature_form(omega), u)
            failures += _exceeds("curvature", (moved - expected).max_abs(), 1e-9, "covariance residual")
        return failures

    def _check_action_as_scalar_product(self) -> List[CheckFailure]:
        """V equals minus the curvature norm (Omega, Omega) on sl(2)."""
        basis = gellmann_basis(2)
        rng = self._rng(5)
        failures = []
        for _ in range(self.samples):
            stack = random_anti_hermitian(2, 3, rng)
            value = potential_density(stack, basis.structconst)
            omega = curvature_form(connection_from_fields([basis], [stack]))
            norm = scalar_product(omega, omega).real
            failures += _exceeds("action", abs(value + norm), 1e-9 * max(1.0, value), "|V + (Omega, Omega)|")
        return failures

    # Counting

    def _check_dof_counts(self) -> List[CheckFailure]:
        failures = []
        for name, (n_idof, n_ndof) in EXPECTED_DOF.items():
            got = dof_counts(self._case(name))
            if got[:2] != (n_idof, n_ndof):
                failures.append(CheckFailure(
                    check=name,
                    message=f"dof counts {got[:2]} differ from {(n_idof, n_ndof)}",
                    severity=CheckSeverity.ERROR,
                ))
        return failures

    def _check_class_counts(self) -> List[CheckFailure]:
        failures = []
        for name, expected in EXPECTED_CLASSES.items():
            counts = class_counts(gauge_labels(self._case(name)))
            if counts != expected:
                failures.append(CheckFailure(
                    check=name,
                    message=f"direction classes {counts} differ from {expected}",
                    severity=CheckSeverity.ERROR,
                ))
        return failures

    def _check_lifted_structure(self) -> List[CheckFailure]:
        failures = []
        for name in SCAN_CASES:
            lifted = self._case(name)
            failures += _exceeds(name, inherited_structure_residual(lifted), ALGEBRA_TOL, "inherited C residual")
            failures += _exceeds(name, block_orthogonality_residual(lifted), 1e-12, "|g(J^phi, J^c)|")
            block = lifted.blocks[0]
            failures += _exceeds(name, float(np.max(np.abs(block.basis.gram + np.eye(block.basis.dim)))), 1e-10, "|g + 1|")
        return failures

    # Masses

    def _check_source_masses(self) -> List[CheckFailure]:
        failures = []
        for n in range(2, 6):
            masses = source_mass_reference([gellmann_basis(n)], [1.0])[0]
            expected = np.concatenate([np.full(n * n - 1, math.sqrt(2.0 * n)), [0.0]])
            failures += _exceeds(f"sl({n})", float(np.max(np.abs(masses - expected))), 1e-8, "mass deviation")
        return failures

    # Gradient

    def _check_gradient(self) -> List[CheckFailure]:
        rng = self._rng(6)
        failures = []
        for name in SCAN_CASES:
            lifted = self._case(name)
            worst = 0.0
            for _ in range(self.gradient_configs):
                config = random_configuration(lifted, rng, scale=0.5)
                worst = max(worst, gradient_relative_error(lifted, config))
            failures += _exceeds(name, worst, GRADIENT_TOL, "gradient relative error")
        return failures

    # Gauge

    def _check_gauge_invariance(self) -> List[CheckFailure]:
        rng = self._rng(7)
        failures = []
        for name in SCAN_CASES:
            lifted = self._case(name)
            worst_v, worst_m, worst_c = 0.0, 0.0, 0.0
            for _ in range(self.gauge_unitaries):
                config = random_configuration(lifted, rng, scale=0.5)
                u = [random_unitary(n, rng) for n in lifted.spec.source.dims]
                moved = gauge_transform_fields(lifted, config, u)
                v0, v1 = higgs_potential(lifted, config), higgs_potential(lifted, moved)
                worst_v = max(worst_v, abs(v0 - v1) / max(1.0, abs(v0)))

                # squared masses; square roots near the massless directions amplify rounding
                m0 = np.linalg.eigvalsh(mass_form(lifted, config))
                m1 = np.linalg.eigvalsh(mass_form(lifted, moved))
                worst_m = max(worst_m, float(np.max(np.abs(m0 - m1))) / max(1.0, float(np.max(np.abs(m0)))))

                sources = transform_source_fields(source_fields(lifted, config.lambdas), u)
                worst_c = max(worst_c, phi_compatibility_residual(lifted, moved.blocks, sources))
            failures += _exceeds(name, worst_v, 1e-9, "|V(B) - V(B^u)|")
            failures += _exceeds(name, worst_m, 1e-9, "squared mass spectrum change")
            failures += _exceeds(name, worst_c, 1e-10, "compatibility residual")
        return failures

    # Action

    def _check_inherited_action(self) -> List[CheckFailure]:
        rng = self._rng(8)
        failures = []
        embeddings = {name: case_embedding(name) for name in SCAN_CASES}
        embeddings["double-copy"] = validate_embedding((2,), (5,), ((2,),))
        embeddings["two-blocks"] = validate_embedding((2, 2), (4, 6), ((1, 1), (2, 1)))
        for name, spec in embeddings.items():
            lifted = build_lifted_basis(spec)
            fields = [random_anti_hermitian(n, n * n - 1, rng) for n in spec.source.dims]
            terms = inherited_action_terms(lifted, fields)
            failures += _exceeds(name, terms.copy_residual(spec.mult), 1e-9, "copy residual")
            defect = np.nanmax(np.abs(terms.weights - np.asarray(spec.mult, dtype=float)))
            failures += _exceeds(name, float(defect), 1e-9, "weight deviation")
        return failures

    # K0

    def _check_k0_functoriality(self) -> List[CheckFailure]:
        rng = self._rng(9)
        failures = []
        for trial in range(self.k0_chains):
            dims = tuple(int(n) for n in rng.integers(1, 4, size=2))
            mult1 = rng.integers(0, 3, size=(2, 2))
            mid = tuple(int(x) for x in mult1 @ np.array(dims) + rng.integers(1, 3, size=2))
            mult2 = rng.integers(0, 3, size=(1, 2))
            top = (int((mult2 @ np.array(mid))[0] + rng.integers(1, 3)),)
            first = validate_embedding(dims, mid, mult1)
            second = validate_embedding(mid, top, mult2)
            composed = compose_embeddings(first, second)
            v = rng.integers(0, 5, size=2)
            chained = k0_pushforward(second, k0_pushforward(first, v))
            if k0_pushforward(composed, v) != chained:
                failures.append(CheckFailure(
                    check=f"trial {trial}",
                    message=f"K0 of the composite {k0_pushforward(composed, v)} differs from {chained}",
                    severity=CheckSeverity.ERROR,
                ))
            a = [rng.normal(size=(n, n)) for n in dims]
            lhs = np.array(block_trace(composed, a))
            rhs = second.mult_matrix @ np.array(block_trace(first, a))
            failures += _exceeds(f"trial {trial}", float(np.max(np.abs(lhs - rhs))), 1e-9, "trace pushforward residual")
        return failures


def random_anti_hermitian(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of count random traceless anti-Hermitian n x n matrices."""
    z = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    x = 0.5 * (z - np.conj(np.transpose(z, (0, 2, 1))))
    trace = np.einsum("kii->k", x) / n
    return x - trace[:, None, None] * np.eye(n)[None]


def create_checker(
    seed: int = 0,
    samples: int = 3,
    strict_mode: bool = False,
    gradient_configs: int = GRADIENT_CONFIGS,
    gauge_unitaries: int = GAUGE_UNITARIES,
    k0_chains: int = K0_CHAINS,
) -> InvariantChecker:
    """
    Create a configured invariant checker.

    Args:
        seed: seed of all randomized rules
        samples: random trials per randomized forms rule
        strict_mode: whether warnings fail the run
        gradient_configs: random configurations per case in the gradient rule
        gauge_unitaries: random source unitaries per case in the gauge rule
        k0_chains: random embedding chains in the K0 rule

    Returns:
        Configured InvariantChecker instance
    """
    return InvariantChecker(
        seed=seed,
        samples=samples,
        strict_mode=strict_mode,
        gradient_configs=gradient_configs,
        gauge_unitaries=gauge_unitaries,
        k0_chains=k0_chains,
    )
