"""
Constrained minimization of the Higgs potential over the non-inherited fields.

Each lambda point is minimized from a warm start (the previous minimizer
along a path, zero otherwise), any extra supplied starts, and seeded random
starts drawn uniformly from [-init_scale, init_scale]. Random streams are
derived from (seed, point index, restart index), so results do not depend
on scheduling when restarts run on a thread pool.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..algebra.lift import LiftedBasis
from ..exceptions import InvalidArgumentError
from ..gauge.fields import FieldConfiguration, configuration_from_vector, free_size
from ..gauge.potential import get_model

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class MinimizerOptions:
    """Optimizer settings shared by every point of a scan."""

    restarts: int = 8
    max_iter: int = 2000
    gtol: float = 1e-9
    ftol: float = 1e-15
    converge_tol: float = 1e-6
    init_scale: float = 1.5
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidArgumentError(f"restarts must be >= 1, got {self.restarts}")
        if self.threads < 1:
            raise InvalidArgumentError(f"threads must be >= 1, got {self.threads}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LocalRun:
    """Outcome of one local L-BFGS-B run."""

    start_index: int
    value: float
    vector: np.ndarray
    grad_norm: float
    iterations: int
    converged: bool
    message: str


@dataclass
class MinResult:
    """Best local minimum found at one lambda point."""

    lambdas: tuple
    v_min: float
    minimizer: FieldConfiguration
    restarts_used: int
    converged: bool
    grad_norm: float
    start_index: int
    runs: Optional[List[LocalRun]] = None

    @property
    def vector(self) -> np.ndarray:
        return self.minimizer.to_vector()


def start_vector(size: int, opts: MinimizerOptions, point_index: int, restart_index: int) -> np.ndarray:
    """Seeded random start for (point, restart)."""
    stream = np.random.default_rng(np.random.SeedSequence([opts.seed, point_index, restart_index]))
    return stream.uniform(-opts.init_scale, opts.init_scale, size=size)


def _local_minimize(model, lambdas: np.ndarray, x0: np.ndarray, opts: MinimizerOptions, index: int) -> LocalRun:
    if x0.size == 0:
        return LocalRun(index, model.value(x0, lambdas), x0, 0.0, 0, True, "no free coefficients")
    outcome = minimize(
        model.value_and_gradient,
        x0,
        args=(lambdas,),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": opts.max_iter, "gtol": opts.gtol, "ftol": opts.ftol},
    )
    value, gradient = model.value_and_gradient(outcome.x, lambdas)
    grad_norm = float(np.max(np.abs(gradient)))
    return LocalRun(
        start_index=index,
        value=float(value),
        vector=np.asarray(outcome.x),
        grad_norm=grad_norm,
        iterations=int(outcome.nit),
        converged=grad_norm <= opts.converge_tol,
        message=str(outcome.message),
    )


def minimize_at(
    lifted: LiftedBasis,
    lambdas: Sequence[float],
    opts: MinimizerOptions = MinimizerOptions(),
    warm_start: Optional[np.ndarray] = None,
    point_index: int = 0,
    extra_starts: Sequence[np.ndarray] = (),
    keep_runs: bool = False,
) -> MinResult:
    """
    Minimize the potential over the free fields at fixed lambdas.

    Args:
        lifted: adapted basis of the embedding
        lambdas: inherited scale per source summand
        opts: optimizer settings (restarts includes the warm start)
        warm_start: first start (zero vector when omitted)
        point_index: index feeding the random streams of this point
        extra_starts: further deterministic starts tried after the warm start
        keep_runs: attach every local run to the result

    Returns:
        MinResult for the lowest local minimum; earlier starts win ties.
        Non-convergence is reported through the converged flag.
    """
    model = get_model(lifted)
    lambdas = np.asarray(lambdas, dtype=float)
    size = free_size(lifted)
    first = np.zeros(size) if warm_start is None else np.asarray(warm_start, dtype=float)
    starts = [first] + [np.asarray(x, dtype=float) for x in extra_starts]
    starts += [start_vector(size, opts, point_index, k) for k in range(1, opts.restarts)]

    def run(item):
        index, x0 = item
        return _local_minimize(model, lambdas, x0.copy(), opts, index)

    if opts.threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            runs = list(pool.map(run, enumerate(starts)))
    else:
        runs = [run(item) for item in enumerate(starts)]

    best = runs[0]
    for candidate in runs[1:]:
        if candidate.value < best.value - TIE_TOL * max(1.0, abs(best.value)):
            best = candidate
    for local in runs:
        logger.debug(
            f"lambda={lambdas.tolist()} start {local.start_index}: V={local.value:.3e} "
            f"|g|={local.grad_norm:.1e} iters={local.iterations}"
        )
    if not best.converged:
        logger.warning(
            f"No converged minimum at lambda={lambdas.tolist()}: best |grad| = {best.grad_norm:.2e}"
        )

    return MinResult(
        lambdas=tuple(float(x) for x in lambdas),
        v_min=max(best.value, 0.0),
        minimizer=configuration_from_vector(lifted, lambdas, best.vector),
        restarts_used=len(starts),
        converged=best.converged,
        grad_norm=best.grad_norm,
        start_index=best.start_index,
        runs=runs if keep_runs else None,
    )
