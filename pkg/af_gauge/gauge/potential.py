"""
Curvature components, Higgs potential and its analytic gradient.

For B-fields on a block with structure constants C:
    R_ab = [B_a, B_b] - C^c_ab B_c,  Theta_ab = -R_ab,
    V = 1/2 sum_ab ||R_ab||_F^2.
Varying B_c gives dV = sum_c Re <G_c, dB_c>_F with
    G_c = 2 sum_b [R_cb, B_b^dagger] - sum_ab C^c_ab R_ab,
so the gradient along a frame matrix F_k is Re tr(G_c^dagger F_k).
"""

import logging
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from ..algebra.lift import LiftedBasis
from .fields import Fields, block_fields, configuration_from_vector, free_size

logger = logging.getLogger(__name__)


def commutator_residuals(fields: np.ndarray, structconst: np.ndarray) -> np.ndarray:
    """R[a, b] = [B_a, B_b] - C^c_ab B_c for a (N, m, m) field stack."""
    products = np.einsum("aij,bjk->abik", fields, fields)
    return products - products.transpose(1, 0, 2, 3) - np.einsum("abc,cij->abij", structconst, fields)


def potential_density(fields: np.ndarray, structconst: np.ndarray) -> float:
    """1/2 sum_ab ||R_ab||_F^2 for one block."""
    if fields.shape[0] == 0:
        return 0.0
    residuals = commutator_residuals(fields, structconst)
    return 0.5 * float(np.sum(np.abs(residuals) ** 2))


def potential_field_gradient(fields: np.ndarray, structconst: np.ndarray) -> Tuple[float, np.ndarray]:
    """Value and matrix gradient G_c (same shape as the fields) for one block."""
    if fields.shape[0] == 0:
        return 0.0, np.zeros_like(fields)
    residuals = commutator_residuals(fields, structconst)
    value = 0.5 * float(np.sum(np.abs(residuals) ** 2))
    adjoint = fields.conj().transpose(0, 2, 1)
    commutators = np.einsum("cbij,bjk->cik", residuals, adjoint) - np.einsum("bij,cbjk->cik", adjoint, residuals)
    gradient = 2.0 * commutators - np.einsum("abc,abij->cij", structconst, residuals)
    return value, gradient


def curvature_components(lifted: LiftedBasis, config: Fields) -> List[np.ndarray]:
    """
    Theta^j_ab = -([B_a, B_b] - C^c_ab B_c) for every target block.

    Returns:
        One (N_j, N_j, m_j, m_j) array per block
    """
    stacks = block_fields(lifted, config).blocks
    return [
        -commutator_residuals(stack, block.basis.structconst)
        for block, stack in zip(lifted.blocks, stacks)
    ]


def higgs_potential(lifted: LiftedBasis, config: Fields) -> float:
    """V = sum_j 1/2 sum_ab ||Theta^j_ab||_F^2 >= 0, zero exactly on representations."""
    stacks = block_fields(lifted, config).blocks
    return float(sum(potential_density(stack, block.basis.structconst) for block, stack in zip(lifted.blocks, stacks)))


class HiggsModel:
    """
    Potential and gradient as functions of the flat free-coefficient vector.

    Caches per-block frames and index ranges so that the optimizer loop only
    does the quartic contraction.
    """

    def __init__(self, lifted: LiftedBasis):
        self.lifted = lifted
        self.size = free_size(lifted)
        self._blocks = []
        offset = 0
        for block in lifted.blocks:
            count = block.n_complement * block.m * block.m
            owners = np.array([i for i, _, _ in block.inherited], dtype=int)
            self._blocks.append((block, slice(offset, offset + count), owners))
            offset += count

    def _stack(self, block, owners: np.ndarray, lambdas: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
        inherited = lambdas[owners][:, None, None] * block.generators[: block.n_inherited]
        free = coefficients.reshape(block.n_complement, block.m * block.m)
        new = np.einsum("bk,kij->bij", free, block.u_frame)
        return np.concatenate([inherited, new], axis=0)

    def value(self, vector: np.ndarray, lambdas: Sequence[float]) -> float:
        lambdas = np.asarray(lambdas, dtype=float)
        total = 0.0
        for block, window, owners in self._blocks:
            stack = self._stack(block, owners, lambdas, vector[window])
            total += potential_density(stack, block.basis.structconst)
        return total

    def value_and_gradient(self, vector: np.ndarray, lambdas: Sequence[float]) -> Tuple[float, np.ndarray]:
        """V and dV/dx over the free coefficients; lambdas are parameters."""
        lambdas = np.asarray(lambdas, dtype=float)
        vector = np.asarray(vector, dtype=float)
        total = 0.0
        gradient = np.zeros(self.size)
        for block, window, owners in self._blocks:
            stack = self._stack(block, owners, lambdas, vector[window])
            value, field_gradient = potential_field_gradient(stack, block.basis.structconst)
            total += value
            free_gradient = field_gradient[block.n_inherited:]
            gradient[window] = np.einsum("cij,kij->ck", free_gradient.conj(), block.u_frame).real.ravel()
        return total, gradient


@lru_cache(maxsize=32)
def get_model(lifted: LiftedBasis) -> HiggsModel:
    return HiggsModel(lifted)


def higgs_gradient(lifted: LiftedBasis, config) -> np.ndarray:
    """Exact gradient of the potential with respect to every free coefficient."""
    _, gradient = get_model(lifted).value_and_gradient(config.to_vector(), config.lambdas)
    return gradient


def finite_difference_gradient(lifted: LiftedBasis, config, step: float = 1e-5) -> np.ndarray:
    """Central differences of the potential, for checking higgs_gradient."""
    model = get_model(lifted)
    vector = config.to_vector()
    gradient = np.zeros_like(vector)
    for k in range(vector.size):
        shifted = vector.copy()
        shifted[k] += step
        upper = model.value(shifted, config.lambdas)
        shifted[k] -= 2 * step
        lower = model.value(shifted, config.lambdas)
        gradient[k] = (upper - lower) / (2 * step)
    return gradient


def gradient_relative_error(lifted: LiftedBasis, config, step: float = 1e-5) -> float:
    """max_k |analytic - numeric| / max(1, max|numeric|)."""
    analytic = higgs_gradient(lifted, config)
    numeric = finite_difference_gradient(lifted, config, step)
    scale = max(1.0, float(np.max(np.abs(numeric)))) if numeric.size else 1.0
    return float(np.max(np.abs(analytic - numeric))) / scale if numeric.size else 0.0


def vector_potential(lifted: LiftedBasis, lambdas: Sequence[float], vector: np.ndarray) -> float:
    """Convenience: potential of a flat coefficient vector."""
    return higgs_potential(lifted, configuration_from_vector(lifted, lambdas, vector))
