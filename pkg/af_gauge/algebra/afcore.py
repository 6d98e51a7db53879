"""
Sums of matrix algebras and their embeddings.

An embedding phi: M_{n_1} + ... + M_{n_r} -> M_{m_1} + ... + M_{m_s} is
described by its multiplicity matrix alpha_{ji}. Target block j is
block-diag(a_1 (x) 1_{alpha_j1}, ..., a_r (x) 1_{alpha_jr}, 0_{n_0}), the
zero pad last. This module provides the block maps phi_i^{j,l}, the
unitized lift hat_phi (identity in the pad), composition and the K0
pushforward of dimension vectors.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    InfeasibleEmbeddingError,
    InvalidArgumentError,
    InvalidGaugeElementError,
    InvalidSlotError,
)

logger = logging.getLogger(__name__)

BlockElement = List[np.ndarray]


@dataclass(frozen=True)
class AlgebraProfile:
    """Block sizes (n_1, ..., n_r) of a finite sum of matrix algebras."""

    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise InvalidArgumentError("An algebra profile needs at least one summand")
        if any(n < 1 for n in dims):
            raise InvalidArgumentError(f"Block sizes must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        """Sum of n_i (the integral of the volume form)."""
        return sum(self.dims)

    def identity(self) -> BlockElement:
        return [np.eye(n, dtype=complex) for n in self.dims]

    def zeros(self) -> BlockElement:
        return [np.zeros((n, n), dtype=complex) for n in self.dims]


def profile(*dims: int) -> AlgebraProfile:
    """Shorthand: profile(2, 3) is M_2 + M_3."""
    return AlgebraProfile(tuple(dims))


@dataclass(frozen=True)
class EmbeddingSpec:
    """Normalized embedding: multiplicity matrix plus zero-pad sizes."""

    source: AlgebraProfile
    target: AlgebraProfile
    mult: Tuple[Tuple[int, ...], ...]
    pad: Tuple[int, ...]

    @property
    def mult_matrix(self) -> np.ndarray:
        return np.array(self.mult, dtype=np.int64).reshape(self.target.rank, self.source.rank)

    @property
    def is_unital(self) -> bool:
        return all(p == 0 for p in self.pad)

    def block_offsets(self, j: int) -> List[List[int]]:
        """Row offsets of every copy slot in target block j: offsets[i][l]."""
        offsets: List[List[int]] = []
        cursor = 0
        for i, n_i in enumerate(self.source.dims):
            slots = []
            for _ in range(self.mult[j][i]):
                slots.append(cursor)
                cursor += n_i
            offsets.append(slots)
        return offsets

    def envelope_range(self, j: int, i: int) -> Tuple[int, int]:
        """[start, stop) rows of the enveloping block of summand i inside block j."""
        start = sum(self.mult[j][k] * self.source.dims[k] for k in range(i))
        return start, start + self.mult[j][i] * self.source.dims[i]

    def pad_range(self, j: int) -> Tuple[int, int]:
        m_j = self.target.dims[j]
        return m_j - self.pad[j], m_j

    def to_dict(self) -> dict:
        return {
            "source": list(self.source.dims),
            "target": list(self.target.dims),
            "mult": [list(row) for row in self.mult],
            "pad": list(self.pad),
        }


def validate_embedding(source, target, mult) -> EmbeddingSpec:
    """
    Validate a multiplicity matrix and compute the zero pads.

    Args:
        source: AlgebraProfile (or sequence of block sizes) of the source
        target: AlgebraProfile (or sequence of block sizes) of the target
        mult: s x r matrix of non-negative integers alpha_ji

    Returns:
        Normalized EmbeddingSpec with pad n_0(j) = m_j - sum_i alpha_ji n_i

    Raises:
        InfeasibleEmbeddingError: if some sum_i alpha_ji n_i exceeds m_j
    """
    source = source if isinstance(source, AlgebraProfile) else AlgebraProfile(tuple(source))
    target = target if isinstance(target, AlgebraProfile) else AlgebraProfile(tuple(target))
    matrix = np.asarray(mult)
    if matrix.ndim != 2 or matrix.shape != (target.rank, source.rank):
        raise DimensionMismatchError(
            f"Multiplicity matrix must be {target.rank}x{source.rank}, got shape {matrix.shape}"
        )
    if not np.all(np.equal(np.mod(matrix, 1), 0)) or np.any(matrix < 0):
        raise InvalidArgumentError(f"Multiplicities must be non-negative integers, got {matrix.tolist()}")
    matrix = matrix.astype(np.int64)

    used = matrix @ np.array(source.dims, dtype=np.int64)
    pad = []
    for j, (m_j, u_j) in enumerate(zip(target.dims, used)):
        if u_j > m_j:
            raise InfeasibleEmbeddingError(
                f"Target block {j} has size {m_j} but the multiplicities require {int(u_j)}"
            )
        pad.append(int(m_j - u_j))

    return EmbeddingSpec(
        source=source,
        target=target,
        mult=tuple(tuple(int(a) for a in row) for row in matrix),
        pad=tuple(pad),
    )


def _check_block_element(algebra: AlgebraProfile, a: Sequence[np.ndarray], what: str) -> BlockElement:
    if len(a) != algebra.rank:
        raise DimensionMismatchError(f"{what} has {len(a)} blocks, expected {algebra.rank}")
    blocks = [np.asarray(block) for block in a]
    for i, (block, n_i) in enumerate(zip(blocks, algebra.dims)):
        if block.shape != (n_i, n_i):
            raise DimensionMismatchError(f"{what} block {i} has shape {block.shape}, expected ({n_i}, {n_i})")
    return blocks


def phi_block_inject(spec: EmbeddingSpec, i: int, j: int, ell: int, a_i: np.ndarray) -> np.ndarray:
    """
    Insert a_i at copy slot ell (0-based) of summand i inside target block j.

    Raises:
        InvalidSlotError: if ell is out of range or alpha_ji = 0
    """
    if not (0 <= j < spec.target.rank and 0 <= i < spec.source.rank):
        raise InvalidSlotError(f"No summand pair (i={i}, j={j}) in this embedding")
    if not 0 <= ell < spec.mult[j][i]:
        raise InvalidSlotError(f"Copy slot {ell} out of range for alpha_{j}{i} = {spec.mult[j][i]}")
    n_i = spec.source.dims[i]
    a_i = np.asarray(a_i)
    if a_i.shape != (n_i, n_i):
        raise DimensionMismatchError(f"Expected a {n_i}x{n_i} matrix, got shape {a_i.shape}")
    start = spec.block_offsets(j)[i][ell]
    out = np.zeros((spec.target.dims[j], spec.target.dims[j]), dtype=np.result_type(a_i, complex))
    out[start:start + n_i, start:start + n_i] = a_i
    return out


def _block_diagonal(spec: EmbeddingSpec, a: BlockElement, j: int, pad_value: float) -> np.ndarray:
    m_j = spec.target.dims[j]
    out = np.zeros((m_j, m_j), dtype=complex)
    for i, slots in enumerate(spec.block_offsets(j)):
        n_i = spec.source.dims[i]
        for start in slots:
            out[start:start + n_i, start:start + n_i] = a[i]
    lo, hi = spec.pad_range(j)
    out[lo:hi, lo:hi] = pad_value * np.eye(hi - lo)
    return out


def phi_apply(spec: EmbeddingSpec, a: Sequence[np.ndarray]) -> BlockElement:
    """Apply phi blockwise; the pad of every target block is zero."""
    blocks = _check_block_element(spec.source, a, "Source element")
    return [_block_diagonal(spec, blocks, j, 0.0) for j in range(spec.target.rank)]


def hat_phi(spec: EmbeddingSpec, u: Sequence[np.ndarray]) -> BlockElement:
    """
    Unitized lift of phi: like phi_apply but with the identity in the pad.

    Raises:
        InvalidGaugeElementError: if some block of u is singular
    """
    blocks = _check_block_element(spec.source, u, "Gauge element")
    for i, block in enumerate(blocks):
        if np.linalg.matrix_rank(block) < block.shape[0]:
            raise InvalidGaugeElementError(f"Block {i} of the gauge element is singular")
    return [_block_diagonal(spec, blocks, j, 1.0) for j in range(spec.target.rank)]


def identity_embedding(algebra: AlgebraProfile) -> EmbeddingSpec:
    return validate_embedding(algebra, algebra, np.eye(algebra.rank, dtype=np.int64))


def compose_embeddings(first: EmbeddingSpec, second: EmbeddingSpec) -> EmbeddingSpec:
    """
    Compose phi_second after phi_first; multiplicities multiply as second.mult @ first.mult.

    Raises:
        DimensionMismatchError: if first.target differs from second.source
    """
    if first.target != second.source:
        raise DimensionMismatchError(
            f"Cannot compose: first target {first.target.dims} != second source {second.source.dims}"
        )
    mult = second.mult_matrix @ first.mult_matrix
    return validate_embedding(first.source, second.target, mult)


def k0_pushforward(spec: EmbeddingSpec, v: Sequence[int]) -> Tuple[int, ...]:
    """
    Push a dimension vector forward: beta_j = sum_i alpha_ji v_i.

    Raises:
        DimensionMismatchError: if len(v) differs from the source rank
    """
    vector = np.asarray(v, dtype=np.int64)
    if vector.shape != (spec.source.rank,):
        raise DimensionMismatchError(f"Dimension vector must have length {spec.source.rank}, got {len(v)}")
    if np.any(vector < 0):
        raise InvalidArgumentError(f"Dimension vector entries must be non-negative, got {list(v)}")
    return tuple(int(b) for b in spec.mult_matrix @ vector)


def block_trace(spec: EmbeddingSpec, a: Sequence[np.ndarray]) -> List[complex]:
    """sum_i alpha_ji tr(a_i) per target block, equal to tr(phi^j(a))."""
    blocks = _check_block_element(spec.source, a, "Source element")
    traces = np.array([np.trace(block) for block in blocks])
    return [complex(value) for value in spec.mult_matrix @ traces]


# The four single-block scan cases: (source dims, target dims, multiplicities).
SCAN_CASES = {
    "case1": ((2,), (3,), ((1,),)),
    "case2": ((2, 2), (4,), ((1, 1),)),
    "case3": ((2, 2), (5,), ((1, 1),)),
    "case4": ((2, 3), (5,), ((1, 1),)),
}


def case_embedding(name: str) -> EmbeddingSpec:
    """EmbeddingSpec of a named scan case (case1 .. case4)."""
    if name not in SCAN_CASES:
        raise InvalidArgumentError(f"Unknown case {name!r}; expected one of {sorted(SCAN_CASES)}")
    source, target, mult = SCAN_CASES[name]
    return validate_embedding(source, target, mult)
