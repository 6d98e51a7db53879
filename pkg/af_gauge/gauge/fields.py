"""
Gauge-field configurations on the target algebra.

Inherited fields are never free variables: B_(i,l,a) = lambda_i E_(i,l,a).
Every complement direction beta in J^c_j carries a real coefficient vector
of length m_j^2 over the u(m_j) frame (lifted sl generators plus i*1/sqrt(m_j)).
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..algebra.lift import LiftedBasis
from ..exceptions import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class FieldConfiguration:
    """Inherited scalars lambda_i plus free coefficients per target block."""

    lambdas: Tuple[float, ...]
    free: Tuple[np.ndarray, ...]

    @property
    def n_free(self) -> int:
        return int(sum(block.size for block in self.free))

    def to_vector(self) -> np.ndarray:
        """Free coefficients flattened block by block."""
        if not self.free:
            return np.zeros(0)
        return np.concatenate([block.ravel() for block in self.free])


@dataclass(frozen=True, eq=False)
class BlockFields:
    """Full field stacks B^j of shape (m_j^2 - 1, m_j, m_j), one per target block."""

    blocks: Tuple[np.ndarray, ...]


Fields = Union[FieldConfiguration, BlockFields]


def free_shapes(lifted: LiftedBasis) -> List[Tuple[int, int]]:
    return [(block.n_complement, block.m * block.m) for block in lifted.blocks]


def free_size(lifted: LiftedBasis) -> int:
    return sum(rows * cols for rows, cols in free_shapes(lifted))


def _check_lambdas(lifted: LiftedBasis, lambdas: Sequence[float]) -> Tuple[float, ...]:
    values = tuple(float(x) for x in np.atleast_1d(lambdas))
    if len(values) != lifted.spec.source.rank:
        raise DimensionMismatchError(f"Expected {lifted.spec.source.rank} lambdas, got {len(values)}")
    return values


def configuration_from_vector(lifted: LiftedBasis, lambdas: Sequence[float], vector: np.ndarray) -> FieldConfiguration:
    """Split a flat coefficient vector into per-block (|J^c_j|, m_j^2) arrays."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (free_size(lifted),):
        raise DimensionMismatchError(f"Expected {free_size(lifted)} free coefficients, got {vector.shape}")
    blocks = []
    offset = 0
    for rows, cols in free_shapes(lifted):
        blocks.append(vector[offset:offset + rows * cols].reshape(rows, cols).copy())
        offset += rows * cols
    return FieldConfiguration(lambdas=_check_lambdas(lifted, lambdas), free=tuple(blocks))


def null_configuration(lifted: LiftedBasis, lambdas: Sequence[float] = None) -> FieldConfiguration:
    """All free fields zero (with lambda = 0 unless given)."""
    lambdas = [0.0] * lifted.spec.source.rank if lambdas is None else lambdas
    return configuration_from_vector(lifted, lambdas, np.zeros(free_size(lifted)))


def basis_configuration(lifted: LiftedBasis) -> FieldConfiguration:
    """lambda = 1 and B_beta = E_beta on every complement direction."""
    blocks = []
    for block in lifted.blocks:
        coefficients = np.zeros((block.n_complement, block.m * block.m))
        for row in range(block.n_complement):
            coefficients[row, block.n_inherited + row] = 1.0
        blocks.append(coefficients)
    return FieldConfiguration(lambdas=(1.0,) * lifted.spec.source.rank, free=tuple(blocks))


def random_configuration(
    lifted: LiftedBasis, rng: np.random.Generator, scale: float = 1.0, lambdas: Sequence[float] = None
) -> FieldConfiguration:
    if lambdas is None:
        lambdas = rng.uniform(-scale, scale, size=lifted.spec.source.rank)
    vector = rng.uniform(-scale, scale, size=free_size(lifted))
    return configuration_from_vector(lifted, lambdas, vector)


def block_fields(lifted: LiftedBasis, fields: Fields) -> BlockFields:
    """Materialize the full B^j stacks of a configuration."""
    if isinstance(fields, BlockFields):
        if len(fields.blocks) != len(lifted.blocks):
            raise DimensionMismatchError(f"Expected {len(lifted.blocks)} field blocks, got {len(fields.blocks)}")
        for block, stack in zip(lifted.blocks, fields.blocks):
            if stack.shape != block.generators.shape:
                raise DimensionMismatchError(
                    f"Block {block.j} fields have shape {stack.shape}, expected {block.generators.shape}"
                )
        return fields
    lambdas = _check_lambdas(lifted, fields.lambdas)
    stacks = []
    for block, free in zip(lifted.blocks, fields.free):
        if free.shape != (block.n_complement, block.m * block.m):
            raise DimensionMismatchError(
                f"Block {block.j} free coefficients have shape {free.shape}, "
                f"expected ({block.n_complement}, {block.m * block.m})"
            )
        scales = np.array([lambdas[i] for i, _, _ in block.inherited])
        inherited = scales[:, None, None] * block.generators[: block.n_inherited]
        new = np.einsum("bk,kij->bij", free, block.u_frame)
        stacks.append(np.concatenate([inherited, new], axis=0))
    return BlockFields(blocks=tuple(stacks))


def source_fields(lifted: LiftedBasis, lambdas: Sequence[float]) -> List[np.ndarray]:
    """lambda_i E^i on every source summand, the fields the inherited ones are copied from."""
    lambdas = _check_lambdas(lifted, lambdas)
    return [lam * np.asarray(basis.generators) for lam, basis in zip(lambdas, lifted.source_bases)]
