"""
Matrix algebra primitives and sl(n) bases.

Builds orthonormal anti-Hermitian generator families of sl(n) together with
their trace metric g_ab = tr(E_a E_b) and real structure constants
[E_a, E_b] = C^c_ab E_c. Structure constants are stored with the upper index
last: ``structconst[a, b, c] == C^c_ab``.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DegenerateMetricError, InvalidArgumentError

logger = logging.getLogger(__name__)

ANTI_HERMITIAN_TOL = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array)
    array.setflags(write=False)
    return array


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return [a, b] = ab - ba (broadcasts over leading axes)."""
    return a @ b - b @ a


def is_anti_hermitian(matrix: np.ndarray, tol: float = ANTI_HERMITIAN_TOL) -> bool:
    """Check max|M + M^dagger| <= tol * ||M||."""
    scale = max(np.linalg.norm(matrix), 1.0)
    return float(np.max(np.abs(matrix + matrix.conj().T))) <= tol * scale


def frobenius_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Frobenius inner product tr(X^dagger Y)."""
    return complex(np.vdot(x, y))


def offdiagonal_pair(n: int, p: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Anti-Hermitian pair supported on positions (p, q) and (q, p).

    Returns the symmetric member i(e_pq + e_qp)/sqrt(2) first and the
    antisymmetric member (e_pq - e_qp)/sqrt(2) second.
    """
    if not 0 <= p < q < n:
        raise InvalidArgumentError(f"Need 0 <= p < q < n, got p={p}, q={q}, n={n}")
    sym = np.zeros((n, n), dtype=complex)
    sym[p, q] = sym[q, p] = 1j / np.sqrt(2.0)
    anti = np.zeros((n, n), dtype=complex)
    anti[p, q] = 1.0 / np.sqrt(2.0)
    anti[q, p] = -1.0 / np.sqrt(2.0)
    return sym, anti


def diagonal_generator(n: int, k: int) -> np.ndarray:
    """i * diag(1, ..., 1, -k, 0, ..., 0) / sqrt(k(k+1)) with k leading ones."""
    if not 1 <= k < n:
        raise InvalidArgumentError(f"Diagonal index k must satisfy 1 <= k < n, got k={k}, n={n}")
    diag = np.zeros(n)
    diag[:k] = 1.0
    diag[k] = -float(k)
    return np.diag(1j * diag / np.sqrt(k * (k + 1)))


@dataclass(frozen=True, eq=False)
class SlBasis:
    """Ordered anti-Hermitian generator family of sl(n) with metric data."""

    n: int
    generators: np.ndarray
    gram: np.ndarray
    structconst: np.ndarray

    @property
    def dim(self) -> int:
        """Number of generators (n^2 - 1 for a complete basis)."""
        return int(self.generators.shape[0])

    @property
    def gram_inverse(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((0, 0))
        return np.linalg.inv(self.gram)

    @property
    def sqrt_abs_det(self) -> float:
        """sqrt|det g|, the volume factor of integrals and Hodge duals."""
        if self.dim == 0:
            return 1.0
        return float(np.sqrt(abs(np.linalg.det(self.gram))))

    @property
    def is_orthonormal(self) -> bool:
        return bool(np.allclose(self.gram, -np.eye(self.dim), atol=1e-10))

    def expand(self, matrix: np.ndarray) -> np.ndarray:
        """Coefficients x with matrix = sum_a x_a E_a (matrix assumed in the span)."""
        projections = np.einsum("aij,ji->a", self.generators, matrix)
        return projections @ self.gram_inverse


def gram_metric(basis) -> np.ndarray:
    """
    Return the trace metric (tr(E_a E_b))_ab.

    Args:
        basis: an SlBasis or a (N, n, n) stack of generators

    Returns:
        Real symmetric N x N matrix
    """
    generators = basis.generators if isinstance(basis, SlBasis) else np.asarray(basis)
    gram = np.einsum("aij,bji->ab", generators, generators)
    imag = float(np.max(np.abs(gram.imag))) if gram.size else 0.0
    if imag > 1e-10:
        logger.warning(f"Trace metric has imaginary part {imag:.3e}; generators are not anti-Hermitian")
    return gram.real


def structure_constants(basis, gram: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Expand every commutator [E_a, E_b] on the basis through the Gram inverse.

    Args:
        basis: an SlBasis or a (N, n, n) stack of generators
        gram: precomputed trace metric (computed when omitted)

    Returns:
        Real tensor C with C[a, b, c] = C^c_ab

    Raises:
        DegenerateMetricError: if the Gram matrix is singular
    """
    generators = basis.generators if isinstance(basis, SlBasis) else np.asarray(basis)
    if generators.shape[0] == 0:
        return np.zeros((0, 0, 0))
    if gram is None:
        gram = gram_metric(generators)
    n_gen = gram.shape[0]
    if n_gen and np.linalg.matrix_rank(gram, tol=1e-10) < n_gen:
        raise DegenerateMetricError(f"Gram matrix of {n_gen} generators is singular")

    products = np.einsum("aij,bjk->abik", generators, generators)
    commutators = products - products.transpose(1, 0, 2, 3)
    # tr([E_a, E_b] E_d) = C^c_ab g_cd
    projections = np.einsum("abij,dji->abd", commutators, generators)
    constants = projections @ np.linalg.inv(gram).T
    return np.ascontiguousarray(constants.real)


def basis_from_generators(generators: Sequence[np.ndarray]) -> SlBasis:
    """Wrap a generator stack into an SlBasis, computing metric and constants."""
    stack = np.asarray(generators, dtype=complex)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise InvalidArgumentError(f"Expected a (N, n, n) generator stack, got shape {stack.shape}")
    gram = gram_metric(stack)
    constants = structure_constants(stack, gram)
    return SlBasis(
        n=int(stack.shape[1]),
        generators=_frozen(stack),
        gram=_frozen(gram),
        structconst=_frozen(constants),
    )


def sl_generators(n: int) -> List[np.ndarray]:
    """Generators of sl(n): off-diagonal pairs in (p, q) order, then the diagonal family."""
    generators: List[np.ndarray] = []
    for p in range(n):
        for q in range(p + 1, n):
            generators.extend(offdiagonal_pair(n, p, q))
    for k in range(1, n):
        generators.append(diagonal_generator(n, k))
    return generators


def gellmann_basis(n: int) -> SlBasis:
    """
    Build the normalized anti-Hermitian Gell-Mann basis of sl(n).

    Each off-diagonal pair lists i(e_pq + e_qp)/sqrt(2) before
    (e_pq - e_qp)/sqrt(2); with this order sl(2) has C^c_ab = -sqrt(2) eps_abc.
    The diagonal family comes last.

    Args:
        n: matrix size, n >= 2

    Returns:
        SlBasis with n^2 - 1 generators and gram == -identity

    Raises:
        InvalidArgumentError: if n < 2
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"sl(n) basis requires an integer n >= 2, got {n!r}")
    basis = basis_from_generators(sl_generators(int(n)))
    logger.debug(f"Built sl({n}) basis with {basis.dim} generators")
    return basis


def trivial_basis(n: int = 1) -> SlBasis:
    """Empty generator family, used for summands of size 1 (sl(1) = 0)."""
    return SlBasis(
        n=n,
        generators=_frozen(np.zeros((0, n, n), dtype=complex)),
        gram=_frozen(np.zeros((0, 0))),
        structconst=_frozen(np.zeros((0, 0, 0))),
    )


def source_basis(n: int) -> SlBasis:
    """gellmann_basis(n) for n >= 2, the empty family for n = 1."""
    return trivial_basis(1) if n == 1 else gellmann_basis(n)


def lowered_structure_constants(basis: SlBasis) -> np.ndarray:
    """C_abc = g_cd C^d_ab, completely antisymmetric for a trace metric."""
    return np.einsum("abd,dc->abc", basis.structconst, basis.gram)


def commutator_residual(basis: SlBasis) -> float:
    """max over (a, b) of ||[E_a, E_b] - C^c_ab E_c||."""
    gens = basis.generators
    products = np.einsum("aij,bjk->abik", gens, gens)
    commutators = products - products.transpose(1, 0, 2, 3)
    rebuilt = np.einsum("abc,cij->abij", basis.structconst, gens)
    return float(np.max(np.abs(commutators - rebuilt))) if gens.size else 0.0


def jacobi_residual(structconst: np.ndarray) -> float:
    """Max violation of the Jacobi identity written on structure constants."""
    c = np.asarray(structconst)
    # sum_d C^d_ab C^e_dc + cyclic(a, b, c)
    term = np.einsum("abd,dce->abce", c, c)
    total = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(total))) if total.size else 0.0
