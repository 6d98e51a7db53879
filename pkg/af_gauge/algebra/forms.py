"""
Derivation-based differential calculus on sums of matrix algebras.

A Form stores, for every summand M_{n_i}, a sparse map from strictly
increasing multi-indices I = (a_1 < ... < a_p) to matrix coefficients, so
that omega = sum_I omega_I theta^I. Forms on different summands never mix:
every operation acts blockwise.

Components follow the determinant convention: (theta^1 ^ theta^2)(d_1, d_2) = 1,
so a form evaluated on sorted derivation indices returns the stored component.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from immutabledict import immutabledict

from ..exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidGaugeElementError,
    UnsupportedDimensionError,
)
from .matalg import SlBasis

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

# Largest derivation-space dimension for which the Hodge dual is materialized (sl2, sl3).
MAX_HODGE_DIM = 8

UNITARY_TOL = 1e-10


def permutation_sign(sequence: Sequence[int]) -> int:
    """Sign of the permutation sorting a sequence of distinct integers."""
    items = list(sequence)
    inversions = sum(1 for a, b in combinations(range(len(items)), 2) if items[a] > items[b])
    return -1 if inversions % 2 else 1


def _freeze(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=complex)
    out.setflags(write=False)
    return out


def _accumulate(target: Dict[MultiIndex, np.ndarray], key: MultiIndex, value: np.ndarray) -> None:
    if key in target:
        target[key] = target[key] + value
    else:
        target[key] = np.array(value, dtype=complex)


@dataclass(frozen=True)
class Form:
    """Block-decomposed form with matrix-valued components."""

    bases: Tuple[SlBasis, ...]
    components: Tuple[immutabledict, ...]

    @classmethod
    def from_components(cls, bases: Sequence[SlBasis], components: Sequence[Dict]) -> "Form":
        """
        Build a form from per-summand {multi-index: matrix} maps.

        Unsorted multi-indices are sorted with the permutation sign applied;
        repeated indices contribute nothing.
        """
        bases = tuple(bases)
        if len(components) != len(bases):
            raise DimensionMismatchError(f"Got {len(components)} component maps for {len(bases)} summands")
        frozen = []
        for basis, comps in zip(bases, components):
            block: Dict[MultiIndex, np.ndarray] = {}
            for key, value in comps.items():
                key = tuple(int(k) for k in key)
                if len(set(key)) < len(key):
                    continue
                if any(not 0 <= k < basis.dim for k in key):
                    raise InvalidArgumentError(f"Multi-index {key} outside 0..{basis.dim - 1}")
                matrix = np.asarray(value, dtype=complex)
                if matrix.shape != (basis.n, basis.n):
                    raise DimensionMismatchError(
                        f"Component {key} has shape {matrix.shape}, expected ({basis.n}, {basis.n})"
                    )
                _accumulate(block, tuple(sorted(key)), permutation_sign(key) * matrix)
            frozen.append(immutabledict({k: _freeze(v) for k, v in sorted(block.items()) if np.any(v)}))
        return cls(bases=bases, components=tuple(frozen))

    @classmethod
    def zero(cls, bases: Sequence[SlBasis]) -> "Form":
        return cls.from_components(bases, [{} for _ in bases])

    @property
    def rank(self) -> int:
        return len(self.bases)

    def degrees(self, i: int) -> List[int]:
        """Degrees carrying nonzero components on summand i."""
        return sorted({len(key) for key in self.components[i]})

    def homogeneous_degree(self, i: int) -> Optional[int]:
        """The single degree of summand i, None if zero, error if mixed."""
        degrees = self.degrees(i)
        if len(degrees) > 1:
            raise InvalidArgumentError(f"Summand {i} mixes degrees {degrees}")
        return degrees[0] if degrees else None

    def summand(self, i: int) -> "Form":
        """The restriction omega_i as a form on M_{n_i} alone."""
        return Form(bases=(self.bases[i],), components=(self.components[i],))

    def component(self, i: int, key: MultiIndex) -> np.ndarray:
        n = self.bases[i].n
        return self.components[i].get(tuple(key), np.zeros((n, n), dtype=complex))

    def _combine(self, other: "Form", factor: complex) -> "Form":
        _check_compatible(self, other)
        merged = []
        for mine, theirs in zip(self.components, other.components):
            block = {k: np.array(v) for k, v in mine.items()}
            for key, value in theirs.items():
                _accumulate(block, key, factor * value)
            merged.append(block)
        return Form.from_components(self.bases, merged)

    def __add__(self, other: "Form") -> "Form":
        return self._combine(other, 1.0)

    def __sub__(self, other: "Form") -> "Form":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> "Form":
        return Form.from_components(
            self.bases, [{k: scalar * v for k, v in comps.items()} for comps in self.components]
        )

    __rmul__ = __mul__

    def __neg__(self) -> "Form":
        return self * -1.0

    def max_abs(self) -> float:
        """Largest absolute entry over all components (0 for the zero form)."""
        values = [float(np.max(np.abs(v))) for comps in self.components for v in comps.values()]
        return max(values, default=0.0)


def _check_compatible(a: Form, b: Form) -> None:
    if len(a.bases) != len(b.bases) or any(x is not y and x.n != y.n for x, y in zip(a.bases, b.bases)):
        raise DimensionMismatchError("Forms live on different algebra profiles")


def zero_form(bases: Sequence[SlBasis], a: Sequence[np.ndarray]) -> Form:
    """Degree-0 form with value a_i on summand i."""
    return Form.from_components(bases, [{(): block} for block in a])


def unit_form(bases: Sequence[SlBasis]) -> Form:
    return zero_form(bases, [np.eye(b.n) for b in bases])


def basis_one_form(bases: Sequence[SlBasis], i: int, alpha: int, coefficient: Optional[np.ndarray] = None) -> Form:
    """theta^alpha on summand i, with matrix coefficient (identity by default)."""
    comps: List[Dict] = [{} for _ in bases]
    value = np.eye(bases[i].n) if coefficient is None else coefficient
    comps[i][(alpha,)] = value
    return Form.from_components(bases, comps)


def volume_form(bases: Sequence[SlBasis], coefficients: Optional[Sequence[np.ndarray]] = None) -> Form:
    """a * omega_vol with omega_vol = sqrt|g| theta^1 ^ ... ^ theta^N on every summand."""
    comps = []
    for i, basis in enumerate(bases):
        value = np.eye(basis.n) if coefficients is None else np.asarray(coefficients[i])
        comps.append({tuple(range(basis.dim)): basis.sqrt_abs_det * value})
    return Form.from_components(bases, comps)


def evaluate(omega: Form, derivations: Sequence[Tuple[int, int]]) -> List[np.ndarray]:
    """
    Evaluate omega on derivations given as (summand, generator index) pairs.

    Returns a block element. Derivations spread over several summands give zero.
    """
    zeros = [np.zeros((b.n, b.n), dtype=complex) for b in omega.bases]
    if not derivations:
        return [omega.component(i, ()) for i in range(omega.rank)]
    summands = {i for i, _ in derivations}
    if len(summands) != 1:
        return zeros
    (i,) = summands
    indices = [alpha for _, alpha in derivations]
    if len(set(indices)) < len(indices):
        return zeros
    zeros[i] = permutation_sign(indices) * omega.component(i, tuple(sorted(indices)))
    return zeros


def wedge(omega: Form, eta: Form) -> Form:
    """Graded product, computed blockwise: (omega ^ eta)_i = omega_i ^ eta_i."""
    _check_compatible(omega, eta)
    result = []
    for left, right in zip(omega.components, eta.components):
        block: Dict[MultiIndex, np.ndarray] = {}
        for key_a, a in left.items():
            for key_b, b in right.items():
                if set(key_a) & set(key_b):
                    continue
                joined = key_a + key_b
                _accumulate(block, tuple(sorted(joined)), permutation_sign(joined) * (a @ b))
        result.append(block)
    return Form.from_components(omega.bases, result)


def _insert_position(key: MultiIndex, alpha: int) -> Tuple[MultiIndex, int]:
    merged = tuple(sorted(key + (alpha,)))
    return merged, merged.index(alpha)


def koszul_d(omega: Form) -> Form:
    """
    Koszul differential on every summand.

    On sorted K = (k_0 < ... < k_p):
        (d omega)_K = sum_t (-1)^t [E_{k_t}, omega(K without k_t)]
                    + sum_{s<t} (-1)^(s+t) C^c_{k_s k_t} omega(d_c, K without k_s, k_t)
    """
    result = []
    for basis, comps in zip(omega.bases, omega.components):
        gens = basis.generators
        dim = basis.dim
        constants = basis.structconst
        # (a, b, value) with a < b for every nonzero C^c_ab, grouped by c
        pairs_by_c: Dict[int, List[Tuple[int, int, float]]] = defaultdict(list)
        for a, b, c in zip(*np.nonzero(np.abs(constants) > 1e-14)):
            if a < b:
                pairs_by_c[int(c)].append((int(a), int(b), float(constants[a, b, c])))

        block: Dict[MultiIndex, np.ndarray] = {}
        for key, value in comps.items():
            members = set(key)
            for alpha in range(dim):
                if alpha in members:
                    continue
                merged, t = _insert_position(key, alpha)
                _accumulate(block, merged, (-1) ** t * (gens[alpha] @ value - value @ gens[alpha]))
            for pos, gamma in enumerate(key):
                rest = key[:pos] + key[pos + 1:]
                rest_set = set(rest)
                sign = (-1) ** pos
                for a, b, c_val in pairs_by_c.get(gamma, ()):
                    if a in rest_set or b in rest_set:
                        continue
                    merged = tuple(sorted(rest + (a, b)))
                    s, t = merged.index(a), merged.index(b)
                    _accumulate(block, merged, ((-1) ** (s + t) * sign * c_val) * value)
        result.append(block)
    return Form.from_components(omega.bases, result)


def _complement(key: MultiIndex, dim: int) -> MultiIndex:
    members = set(key)
    return tuple(a for a in range(dim) if a not in members)


def hodge_star(omega: Form) -> Form:
    """
    Hodge dual, degree p -> N - p per summand.

    star theta^A = sqrt|g| sum_B det(g^{-1}[A, B]) eps(B, B^c) theta^{B^c}

    Raises:
        UnsupportedDimensionError: for derivation spaces larger than MAX_HODGE_DIM;
            use scalar_product there.
    """
    result = []
    for basis, comps in zip(omega.bases, omega.components):
        dim = basis.dim
        if comps and dim > MAX_HODGE_DIM:
            raise UnsupportedDimensionError(
                f"Hodge dual is only materialized up to dimension {MAX_HODGE_DIM}, got {dim}; "
                "use scalar_product for action computations"
            )
        ginv = basis.gram_inverse
        volume = basis.sqrt_abs_det
        block: Dict[MultiIndex, np.ndarray] = {}
        for key, value in comps.items():
            for other in combinations(range(dim), len(key)):
                minor = np.linalg.det(ginv[np.ix_(key, other)]) if key else 1.0
                if abs(minor) < 1e-14:
                    continue
                rest = _complement(other, dim)
                sign = permutation_sign(other + rest)
                _accumulate(block, rest, (volume * minor * sign) * value)
        result.append(block)
    return Form.from_components(omega.bases, result)


def integral(omega: Form) -> complex:
    """Noncommutative integral: sum_i tr(top component_i) / sqrt|g_i|."""
    total = 0j
    for basis, comps in zip(omega.bases, omega.components):
        top = comps.get(tuple(range(basis.dim)))
        if top is not None:
            total += complex(np.trace(top)) / basis.sqrt_abs_det
    return total


def scalar_product(omega: Form, omega_prime: Form) -> complex:
    """
    (omega, omega') = integral of omega ^ star omega', evaluated in closed form.

    Per summand: sum_{A,B} tr(omega_A omega'_B) det(g^{-1}[B, A]); never builds
    the Hodge dual, so it works for every algebra size. The sqrt|g| factor of
    the closed form is left out: the integral divides it back out of the top
    component, so the product is the same for any metric.

    Raises:
        InvalidArgumentError: if degrees differ or a summand is inhomogeneous
    """
    _check_compatible(omega, omega_prime)
    total = 0j
    for i, basis in enumerate(omega.bases):
        p, q = omega.homogeneous_degree(i), omega_prime.homogeneous_degree(i)
        if p is None or q is None:
            continue
        if p != q:
            raise InvalidArgumentError(f"Degree mismatch on summand {i}: {p} vs {q}")
        ginv = basis.gram_inverse
        diagonal = np.allclose(ginv, np.diag(np.diag(ginv)), atol=1e-14)
        left, right = omega.components[i], omega_prime.components[i]
        for key_a, a in left.items():
            if diagonal:
                b = right.get(key_a)
                if b is not None:
                    minor = float(np.prod(np.diag(ginv)[list(key_a)])) if key_a else 1.0
                    total += minor * complex(np.trace(a @ b))
                continue
            for key_b, b in right.items():
                minor = np.linalg.det(ginv[np.ix_(key_b, key_a)]) if key_a else 1.0
                total += minor * complex(np.trace(a @ b))
    return total


def _check_unitary(bases: Sequence[SlBasis], u: Sequence[np.ndarray]) -> List[np.ndarray]:
    if len(u) != len(bases):
        raise DimensionMismatchError(f"Gauge element has {len(u)} blocks, expected {len(bases)}")
    blocks = []
    for i, (basis, block) in enumerate(zip(bases, u)):
        block = np.asarray(block, dtype=complex)
        if block.shape != (basis.n, basis.n):
            raise DimensionMismatchError(f"Gauge block {i} has shape {block.shape}")
        defect = float(np.max(np.abs(block.conj().T @ block - np.eye(basis.n))))
        if defect > UNITARY_TOL:
            raise InvalidGaugeElementError(f"Gauge block {i} is not unitary (defect {defect:.2e})")
        blocks.append(block)
    return blocks


def conjugate_form(omega: Form, u: Sequence[np.ndarray]) -> Form:
    """Componentwise u^{-1} omega_I u, the transformation law of curvatures."""
    blocks = _check_unitary(omega.bases, u)
    return Form.from_components(
        omega.bases,
        [{k: ub.conj().T @ v @ ub for k, v in comps.items()} for ub, comps in zip(blocks, omega.components)],
    )


def adjoint_matrix(basis: SlBasis, u: np.ndarray) -> np.ndarray:
    """U with u^{-1} E_a u = U[a, b] E_b."""
    inv = np.linalg.inv(u)
    conjugated = np.einsum("ij,ajk,kl->ail", inv, basis.generators, u)
    projections = np.einsum("aij,bji->ab", conjugated, basis.generators)
    return (projections @ basis.gram_inverse).real


def gauge_transform_form(omega: Form, u: Sequence[np.ndarray], connection: bool = False) -> Form:
    """
    Gauge transformation by a unitary block element u.

    With connection=True, omega is a connection 1-form and the result is
    omega^u = u^{-1} omega u - u^{-1} du, where (du)_a = [E_a, u].
    Otherwise omega is transported by the inner automorphism a -> u a u^{-1}:
    (Psi omega)_A = sum_B det(U[A, B]) u omega_B u^{-1}.

    Raises:
        InvalidGaugeElementError: if some block of u is not unitary
    """
    blocks = _check_unitary(omega.bases, u)
    result = []
    for i, (basis, ub, comps) in enumerate(zip(omega.bases, blocks, omega.components)):
        inv = ub.conj().T
        block: Dict[MultiIndex, np.ndarray] = {}
        if connection:
            if any(len(key) != 1 for key in comps):
                raise InvalidArgumentError(f"Connection on summand {i} must be a 1-form")
            for alpha in range(basis.dim):
                du = basis.generators[alpha] @ ub - ub @ basis.generators[alpha]
                value = -inv @ du
                if (alpha,) in comps:
                    value = value + inv @ comps[(alpha,)] @ ub
                block[(alpha,)] = value
        else:
            adjoint = adjoint_matrix(basis, ub)
            for key_b, value in comps.items():
                moved = ub @ value @ inv
                for key_a in combinations(range(basis.dim), len(key_b)):
                    minor = np.linalg.det(adjoint[np.ix_(key_a, key_b)]) if key_b else 1.0
                    if abs(minor) > 1e-15:
                        _accumulate(block, key_a, minor * moved)
        result.append(block)
    return Form.from_components(omega.bases, result)


def curvature_form(omega: Form) -> Form:
    """Curvature 2-form Omega = d omega - omega ^ omega of a connection 1-form."""
    return koszul_d(omega) - wedge(omega, omega)


def connection_from_fields(bases: Sequence[SlBasis], fields: Sequence[np.ndarray]) -> Form:
    """
    Connection 1-form omega_a = E_a - B_a for B-fields given per summand as (N_i, n_i, n_i).

    B = 0 is the canonical flat connection; its curvature components are
    -([B_a, B_b] - C^c_ab B_c).
    """
    comps = []
    for basis, block_fields in zip(bases, fields):
        block_fields = np.asarray(block_fields)
        if block_fields.shape != basis.generators.shape:
            raise DimensionMismatchError(
                f"Fields of shape {block_fields.shape} do not match basis shape {basis.generators.shape}"
            )
        comps.append({(a,): basis.generators[a] - block_fields[a] for a in range(basis.dim)})
    return Form.from_components(bases, comps)


def random_form(bases: Sequence[SlBasis], degree: int, rng: np.random.Generator, density: float = 1.0) -> Form:
    """Random homogeneous form; density < 1 keeps only a fraction of multi-indices."""
    comps = []
    for basis in bases:
        block = {}
        for key in combinations(range(basis.dim), degree):
            if density < 1.0 and rng.random() > density:
                continue
            shape = (basis.n, basis.n)
            block[key] = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        comps.append(block)
    return Form.from_components(bases, comps)


def multi_indices(dim: int, degree: int) -> Iterable[MultiIndex]:
    return combinations(range(dim), degree)
