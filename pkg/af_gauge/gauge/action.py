"""
Action bookkeeping across the embedding and gauge transformations of fields.

The target action restricted to inherited directions splits into one term
per source summand, each a multiple alpha_ji of the source action. Gauge
transformations act on target fields through v = hat_phi(u).
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..algebra.afcore import hat_phi, phi_block_inject
from ..algebra.lift import LiftedBasis
from ..algebra.matalg import SlBasis
from ..exceptions import IncompatibleConfigurationError, InvalidGaugeElementError
from .fields import BlockFields, Fields, block_fields
from .masses import block_mass_matrix
from .potential import commutator_residuals, potential_density

logger = logging.getLogger(__name__)


@dataclass
class InheritedActionTerms:
    """Source actions S_i, inherited-sector actions per (j, i) and their ratios."""

    source_actions: np.ndarray
    sector_actions: np.ndarray
    weights: np.ndarray
    mixed_sector: np.ndarray

    def expected_weights(self, mult: Sequence[Sequence[int]]) -> np.ndarray:
        return np.asarray(mult, dtype=float)

    def copy_residual(self, mult: Sequence[Sequence[int]]) -> float:
        """max_j |sum_i sector_ji - sum_i alpha_ji S_i|."""
        expected = np.asarray(mult, dtype=float) @ self.source_actions
        return float(np.max(np.abs(self.sector_actions.sum(axis=1) + self.mixed_sector - expected)))


def _check_source_fields(lifted: LiftedBasis, source_fields: Sequence[np.ndarray]) -> List[np.ndarray]:
    if len(source_fields) != len(lifted.source_bases):
        raise IncompatibleConfigurationError(
            f"Got fields for {len(source_fields)} source summands, expected {len(lifted.source_bases)}"
        )
    checked = []
    for i, (basis, stack) in enumerate(zip(lifted.source_bases, source_fields)):
        stack = np.asarray(stack, dtype=complex)
        if stack.shape != basis.generators.shape:
            raise IncompatibleConfigurationError(
                f"Source fields {i} have shape {stack.shape}, expected {basis.generators.shape}"
            )
        checked.append(stack)
    return checked


def inherited_fields(lifted: LiftedBasis, source_fields: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Per target block, the inherited stack B_(i,l,a) = phi_i^{j,l}(B^i_a)."""
    spec = lifted.spec
    fields = _check_source_fields(lifted, source_fields)
    stacks = []
    for block in lifted.blocks:
        stack = np.zeros((block.n_inherited, block.m, block.m), dtype=complex)
        for k, (i, ell, alpha) in enumerate(block.inherited):
            stack[k] = phi_block_inject(spec, i, block.j, ell, fields[i][alpha])
        stacks.append(stack)
    return stacks


def inherited_action_terms(lifted: LiftedBasis, source_fields: Sequence[np.ndarray]) -> InheritedActionTerms:
    """
    Compare the target action on J^phi indices with the source actions.

    The sector of summand i collects the pairs (beta_1, beta_2) of inherited
    indices both coming from summand i; mixed pairs are reported separately
    and vanish for phi-compatible fields. Weights are sector_ji / S_i (NaN
    when S_i = 0) and equal alpha_ji.

    Raises:
        IncompatibleConfigurationError: if the source fields do not match the source bases
    """
    fields = _check_source_fields(lifted, source_fields)
    source_actions = np.array([
        potential_density(stack, basis.structconst) for basis, stack in zip(lifted.source_bases, fields)
    ])

    n_blocks, n_summands = len(lifted.blocks), len(lifted.source_bases)
    sectors = np.zeros((n_blocks, n_summands))
    mixed = np.zeros(n_blocks)
    for block, inherited in zip(lifted.blocks, inherited_fields(lifted, fields)):
        if block.n_inherited == 0:
            continue
        full = np.zeros(block.generators.shape, dtype=complex)
        full[: block.n_inherited] = inherited
        residuals = commutator_residuals(full, block.basis.structconst)[: block.n_inherited, : block.n_inherited]
        norms = np.sum(np.abs(residuals) ** 2, axis=(2, 3))
        owners = np.array([i for i, _, _ in block.inherited])
        for i in range(n_summands):
            rows = owners == i
            sectors[block.j, i] = 0.5 * float(np.sum(norms[np.ix_(rows, rows)]))
        same = owners[:, None] == owners[None, :]
        mixed[block.j] = 0.5 * float(np.sum(norms[~same]))

    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(source_actions[None, :] > 0, sectors / source_actions[None, :], np.nan)
    logger.debug(f"Inherited action weights: {weights.tolist()}")
    return InheritedActionTerms(
        source_actions=source_actions,
        sector_actions=sectors,
        weights=weights,
        mixed_sector=mixed,
    )


def gauge_transform_fields(lifted: LiftedBasis, config: Fields, u: Sequence[np.ndarray]) -> BlockFields:
    """
    B_beta -> v^{-1} B_beta v on every block, with v = hat_phi(u).

    Raises:
        InvalidGaugeElementError: if u is not unitary
    """
    for i, block in enumerate(u):
        block = np.asarray(block)
        if float(np.max(np.abs(block.conj().T @ block - np.eye(block.shape[0])))) > 1e-10:
            raise InvalidGaugeElementError(f"Gauge block {i} is not unitary")
    v = hat_phi(lifted.spec, u)
    stacks = block_fields(lifted, config).blocks
    return BlockFields(blocks=tuple(
        np.einsum("ij,bjk,kl->bil", vj.conj().T, stack, vj) for vj, stack in zip(v, stacks)
    ))


def transform_source_fields(source_fields: Sequence[np.ndarray], u: Sequence[np.ndarray]) -> List[np.ndarray]:
    """B^i_a -> u_i^{-1} B^i_a u_i."""
    return [np.einsum("ij,bjk,kl->bil", ub.conj().T, stack, ub) for ub, stack in zip(u, source_fields)]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def source_potential(bases: Sequence[SlBasis], lambdas: Sequence[float]) -> float:
    """Potential of the un-embedded source with B^i = lambda_i E^i."""
    return float(sum(
        potential_density(lam * np.asarray(basis.generators), basis.structconst)
        for lam, basis in zip(lambdas, bases)
    ))


def source_mass_reference(bases: Sequence[SlBasis], lambdas: Sequence[float]) -> List[np.ndarray]:
    """
    Sorted (descending) masses of every source summand at B^i = lambda_i E^i.

    These are |lambda_i| sqrt(2 n_i) on sl(n_i) plus a massless trace direction.
    """
    result = []
    for lam, basis in zip(lambdas, bases):
        frame = np.concatenate([basis.generators, 1j * np.eye(basis.n)[None] / np.sqrt(basis.n)])
        values = np.linalg.eigvalsh(block_mass_matrix(lam * np.asarray(basis.generators), frame))
        result.append(np.sqrt(np.clip(values, 0.0, None))[::-1])
    return result
