"""
phi-adapted bases of the target algebras.

For every target block M_{m_j} the basis of sl(m_j) is split into the
inherited generators E_(i,l,a) = phi_i^{j,l}(E^i_a), indexed by J^phi_j,
and a complement J^c_j built from five families of matrices:

1. pad-block: traceless generators of the zero pad M_{n_0};
2. off-envelope: off-diagonal pairs linking two different enveloping blocks
   (the pad counts as an enveloping block);
3. intra-envelope-offdiag: off-diagonal pairs inside one enveloping block
   but between two copies;
4. copy-difference: i(E_i^l - E_i^{l+1}) for consecutive copies;
5. cross-envelope-diagonal: i(n_k E_i^1 - n_i E_k^1) for consecutive present
   summands, then the pad term i(n_i E_0 - n_0 E_i^1).

The complement is orthonormalized with modified Gram-Schmidt for the real
Frobenius product; the inherited block is orthonormal by construction and
trace-orthogonal to every complement family.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    NumericalFailureError,
    PreconditionError,
    UndefinedRatioError,
    UnsupportedError,
)
from .afcore import EmbeddingSpec, phi_block_inject
from .forms import Form, scalar_product
from .matalg import SlBasis, basis_from_generators, offdiagonal_pair, sl_generators, source_basis

logger = logging.getLogger(__name__)

FAMILY_PAD = "pad-block"
FAMILY_OFF_ENVELOPE = "off-envelope"
FAMILY_INTRA_ENVELOPE = "intra-envelope-offdiag"
FAMILY_COPY_DIFFERENCE = "copy-difference"
FAMILY_CROSS_DIAGONAL = "cross-envelope-diagonal"

FAMILIES = (
    FAMILY_PAD,
    FAMILY_OFF_ENVELOPE,
    FAMILY_INTRA_ENVELOPE,
    FAMILY_COPY_DIFFERENCE,
    FAMILY_CROSS_DIAGONAL,
)

TRACE_LABEL = "trace"
SUPPORT_TOL = 1e-12

Triple = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class LiftedBlock:
    """Adapted basis of one target block sl(m_j): J^phi first, then J^c."""

    j: int
    basis: SlBasis
    inherited: Tuple[Triple, ...]
    families: Tuple[str, ...]

    @property
    def m(self) -> int:
        return self.basis.n

    @property
    def n_inherited(self) -> int:
        return len(self.inherited)

    @property
    def n_complement(self) -> int:
        return len(self.families)

    @property
    def generators(self) -> np.ndarray:
        return self.basis.generators

    @cached_property
    def index(self) -> Dict[Triple, int]:
        """Position of each inherited triple (i, l, a) in the ordered basis."""
        return {triple: k for k, triple in enumerate(self.inherited)}

    @cached_property
    def u_frame(self) -> np.ndarray:
        """Frobenius-orthonormal basis of u(m): the sl generators plus i*1/sqrt(m)."""
        trace_direction = 1j * np.eye(self.m)[None] / np.sqrt(self.m)
        frame = np.concatenate([self.generators, trace_direction], axis=0)
        frame.setflags(write=False)
        return frame

    def family_counts(self) -> Dict[str, int]:
        counts = Counter(self.families)
        return {family: counts.get(family, 0) for family in FAMILIES}


@dataclass(frozen=True, eq=False)
class LiftedBasis:
    """Adapted bases of every target block of an embedding."""

    spec: EmbeddingSpec
    source_bases: Tuple[SlBasis, ...]
    blocks: Tuple[LiftedBlock, ...]

    def block_basis(self, j: int) -> SlBasis:
        return self.blocks[j].basis

    @property
    def target_bases(self) -> Tuple[SlBasis, ...]:
        return tuple(block.basis for block in self.blocks)


def default_source_bases(spec: EmbeddingSpec) -> List[SlBasis]:
    return [source_basis(n) for n in spec.source.dims]


def _check_source_bases(spec: EmbeddingSpec, source_bases: Sequence[SlBasis]) -> None:
    if len(source_bases) != spec.source.rank:
        raise DimensionMismatchError(f"Got {len(source_bases)} source bases for {spec.source.rank} summands")
    for i, (basis, n_i) in enumerate(zip(source_bases, spec.source.dims)):
        if basis.n != n_i or basis.dim != n_i * n_i - 1:
            raise PreconditionError(f"Source basis {i} is not a basis of sl({n_i})")
        if basis.dim and not basis.is_orthonormal:
            raise PreconditionError(f"Source basis {i} is not orthonormal (gram != -identity)")


def _position_owner(spec: EmbeddingSpec, j: int) -> Tuple[List[int], List[Tuple[int, int]]]:
    """Per row: owning summand (-1 for the pad) and (summand, copy) slot."""
    m_j = spec.target.dims[j]
    owner = [-1] * m_j
    slot = [(-1, 0)] * m_j
    for i, slots in enumerate(spec.block_offsets(j)):
        n_i = spec.source.dims[i]
        for ell, start in enumerate(slots):
            for row in range(start, start + n_i):
                owner[row] = i
                slot[row] = (i, ell)
    return owner, slot


def _copy_identity(spec: EmbeddingSpec, j: int, i: int, ell: int) -> np.ndarray:
    return phi_block_inject(spec, i, j, ell, np.eye(spec.source.dims[i]))


def _complement_families(spec: EmbeddingSpec, j: int) -> List[Tuple[str, np.ndarray]]:
    m_j = spec.target.dims[j]
    n0 = spec.pad[j]
    lo, hi = spec.pad_range(j)
    owner, slot = _position_owner(spec, j)
    members: List[Tuple[str, np.ndarray]] = []

    if n0 >= 2:
        for generator in sl_generators(n0):
            embedded = np.zeros((m_j, m_j), dtype=complex)
            embedded[lo:hi, lo:hi] = generator
            members.append((FAMILY_PAD, embedded))

    for p in range(m_j):
        for q in range(p + 1, m_j):
            if owner[p] != owner[q]:
                family = FAMILY_OFF_ENVELOPE
            elif owner[p] >= 0 and slot[p] != slot[q]:
                family = FAMILY_INTRA_ENVELOPE
            else:
                continue
            members.extend((family, matrix) for matrix in offdiagonal_pair(m_j, p, q))
    # stable partition keeps (p, q) order inside each family
    members.sort(key=lambda item: FAMILIES.index(item[0]))

    for i, alpha in enumerate(spec.mult[j]):
        for ell in range(alpha - 1):
            difference = _copy_identity(spec, j, i, ell) - _copy_identity(spec, j, i, ell + 1)
            members.append((FAMILY_COPY_DIFFERENCE, 1j * difference))

    present = [i for i, alpha in enumerate(spec.mult[j]) if alpha > 0]
    dims = spec.source.dims
    for a, b in zip(present, present[1:]):
        cross = dims[b] * _copy_identity(spec, j, a, 0) - dims[a] * _copy_identity(spec, j, b, 0)
        members.append((FAMILY_CROSS_DIAGONAL, 1j * cross))
    if n0 > 0 and present:
        first = present[0]
        pad_identity = np.zeros((m_j, m_j), dtype=complex)
        pad_identity[lo:hi, lo:hi] = np.eye(n0)
        cross = dims[first] * pad_identity - n0 * _copy_identity(spec, j, first, 0)
        members.append((FAMILY_CROSS_DIAGONAL, 1j * cross))
    return members


def gram_schmidt(matrices: Sequence[np.ndarray], tol: float = 1e-12) -> List[np.ndarray]:
    """
    Modified Gram-Schmidt for the real Frobenius product Re tr(X^dagger Y),
    with one reorthogonalization pass when a vector loses most of its norm.

    Raises:
        NumericalFailureError: if a member is dependent on its predecessors
    """
    result: List[np.ndarray] = []
    for k, matrix in enumerate(matrices):
        vector = np.array(matrix, dtype=complex)
        initial = np.linalg.norm(vector)
        for _ in range(2):
            for done in result:
                vector = vector - np.vdot(done, vector).real * done
            if np.linalg.norm(vector) >= 0.7 * initial:
                break
        norm = np.linalg.norm(vector)
        if norm < tol * max(initial, 1.0):
            raise NumericalFailureError(f"Member {k} is linearly dependent on the previous ones")
        result.append(vector / norm)
    return result


def _build_block(spec: EmbeddingSpec, j: int, source_bases: Sequence[SlBasis]) -> LiftedBlock:
    inherited: List[Triple] = []
    generators: List[np.ndarray] = []
    for i, basis in enumerate(source_bases):
        for ell in range(spec.mult[j][i]):
            for alpha in range(basis.dim):
                inherited.append((i, ell, alpha))
                generators.append(phi_block_inject(spec, i, j, ell, basis.generators[alpha]))

    members = _complement_families(spec, j)
    complement = gram_schmidt([matrix for _, matrix in members])
    generators.extend(complement)

    m_j = spec.target.dims[j]
    stack = np.array(generators, dtype=complex).reshape(len(generators), m_j, m_j)
    if stack.shape[0] != m_j * m_j - 1:
        raise NumericalFailureError(f"Block {j}: built {stack.shape[0]} generators, expected {m_j * m_j - 1}")
    basis = basis_from_generators(stack)
    return LiftedBlock(
        j=j,
        basis=basis,
        inherited=tuple(inherited),
        families=tuple(family for family, _ in members),
    )


def build_lifted_basis(spec: EmbeddingSpec, source_bases: Optional[Sequence[SlBasis]] = None) -> LiftedBasis:
    """
    Build the phi-adapted basis of every target block.

    Args:
        spec: normalized embedding
        source_bases: orthonormal bases of the source summands (Gell-Mann by default)

    Returns:
        LiftedBasis with J^phi ordered lexicographically in (i, l, a), then the
        complement in family order

    Raises:
        PreconditionError: if a source basis is not orthonormal
    """
    source_bases = list(source_bases) if source_bases is not None else default_source_bases(spec)
    _check_source_bases(spec, source_bases)
    blocks = tuple(_build_block(spec, j, source_bases) for j in range(spec.target.rank))
    for block in blocks:
        logger.debug(
            f"Block {block.j}: |J^phi| = {block.n_inherited}, |J^c| = {block.n_complement} "
            f"({block.family_counts()})"
        )
    return LiftedBasis(spec=spec, source_bases=tuple(source_bases), blocks=blocks)


def _support(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return np.nonzero(np.abs(matrix) > SUPPORT_TOL)


def classify_directions(basis: LiftedBasis, spec: Optional[EmbeddingSpec] = None) -> List[str]:
    """
    Label every basis index of a single-block target with its direction class.

    a{i}: inherited from summand i. Inside the envelope (the top-left
    m - n_0 block): d for diagonal support, b otherwise. Reaching outside
    it: e for diagonal support and for pad-internal generators, c{i} for
    off-diagonal generators linking enveloping block i with the pad.
    Summands are numbered from 1 in labels.

    Raises:
        UnsupportedError: for targets with more than one block
    """
    spec = spec or basis.spec
    if spec.target.rank != 1:
        raise UnsupportedError("Direction classes are defined for single-block targets only")
    block = basis.blocks[0]
    envelope = block.m - spec.pad[0]
    owner, _ = _position_owner(spec, 0)

    labels = [f"a{i + 1}" for i, _, _ in block.inherited]
    for matrix in block.generators[block.n_inherited:]:
        rows, cols = _support(matrix)
        diagonal = bool(np.all(rows == cols))
        inside = bool(np.all(rows < envelope) and np.all(cols < envelope))
        if inside:
            labels.append("d" if diagonal else "b")
            continue
        if diagonal:
            labels.append("e")
            continue
        touched = sorted({owner[k] for k in np.concatenate([rows, cols]) if owner[k] >= 0})
        if not touched:
            labels.append("e")
        elif len(touched) == 1:
            labels.append(f"c{touched[0] + 1}")
        else:
            raise NumericalFailureError(
                f"Generator links the pad with several enveloping blocks {touched}; "
                "Gram-Schmidt mixed families unexpectedly"
            )
    return labels


def gauge_labels(basis: LiftedBasis) -> List[str]:
    """Labels of the u(m_j) gauge directions, block by block: classes then 'trace'."""
    if basis.spec.target.rank == 1:
        return classify_directions(basis) + [TRACE_LABEL]
    labels: List[str] = []
    for block in basis.blocks:
        labels.extend(f"a{i + 1}" for i, _, _ in block.inherited)
        labels.extend("new" for _ in block.families)
        labels.append(TRACE_LABEL)
    return labels


def class_counts(labels: Sequence[str]) -> Dict[str, int]:
    """Cardinality of each direction class, the trace direction excluded."""
    counts = Counter(label for label in labels if label != TRACE_LABEL)
    return dict(sorted(counts.items()))


def dof_counts(basis: LiftedBasis) -> Tuple[int, int, float]:
    """
    Inherited and new degrees of freedom and their ratio.

    Returns:
        (n_idof, n_ndof, r_dof) with r_dof = n_ndof / n_idof

    Raises:
        UndefinedRatioError: if there are no inherited directions
    """
    n_idof = sum(block.n_inherited for block in basis.blocks)
    n_ndof = sum(block.n_complement for block in basis.blocks)
    if n_idof == 0:
        raise UndefinedRatioError("No inherited directions: r_dof = n_ndof / 0 is undefined")
    return n_idof, n_ndof, n_ndof / n_idof


def lift_form(basis: LiftedBasis, omega: Form) -> Form:
    """
    phi-compatible target form of a source form.

    Inherited components are the injected source components, every
    component touching J^c vanishes. Degree-0 parts map through phi.
    """
    spec = basis.spec
    if len(omega.bases) != spec.source.rank:
        raise DimensionMismatchError("Form does not live on the source algebra of this embedding")
    target = []
    for block in basis.blocks:
        comps: Dict[Tuple[int, ...], np.ndarray] = {}
        for i, source_comps in enumerate(omega.components):
            for ell in range(spec.mult[block.j][i]):
                for key, value in source_comps.items():
                    lifted_key = tuple(block.index[(i, ell, alpha)] for alpha in key)
                    injected = phi_block_inject(spec, i, block.j, ell, value)
                    comps[lifted_key] = comps[lifted_key] + injected if lifted_key in comps else injected
        target.append(comps)
    return Form.from_components(basis.target_bases, target)


def copy_weighted_product(basis: LiftedBasis, omega: Form, omega_prime: Optional[Form] = None) -> complex:
    """
    sum_i alpha_i (omega_i, omega'_i), alpha_i = sum_j alpha_ji copies of summand i.

    For eta = lift_form(basis, omega) this is the value of (eta, eta) on the target.
    """
    omega_prime = omega if omega_prime is None else omega_prime
    copies = np.sum(np.asarray(basis.spec.mult, dtype=int), axis=0)
    return sum(
        (int(copies[i]) * scalar_product(omega.summand(i), omega_prime.summand(i)) for i in range(omega.rank)),
        0j,
    )


def phi_compatibility_residual(
    basis: LiftedBasis,
    target_fields: Sequence[np.ndarray],
    source_fields: Sequence[np.ndarray],
) -> float:
    """
    max |B^j_(i,l,a) - phi_i^{j,l}(B^i_a)| over all inherited indices.

    Args:
        target_fields: per target block, a (m_j^2 - 1, m_j, m_j) field stack
        source_fields: per source summand, a (n_i^2 - 1, n_i, n_i) field stack
    """
    spec = basis.spec
    worst = 0.0
    for block, fields in zip(basis.blocks, target_fields):
        for k, (i, ell, alpha) in enumerate(block.inherited):
            expected = phi_block_inject(spec, i, block.j, ell, source_fields[i][alpha])
            worst = max(worst, float(np.max(np.abs(fields[k] - expected))))
    return worst


def form_compatibility_residual(basis: LiftedBasis, eta: Form, omega: Form) -> float:
    """Largest deviation of eta from lift_form(omega) on components built from J^phi indices only."""
    expected = lift_form(basis, omega)
    worst = 0.0
    for block, comps, reference in zip(basis.blocks, eta.components, expected.components):
        inherited = set(range(block.n_inherited))
        keys = {k for k in comps if set(k) <= inherited} | set(reference)
        for key in keys:
            difference = np.asarray(eta.component(block.j, key)) - np.asarray(expected.component(block.j, key))
            worst = max(worst, float(np.max(np.abs(difference))))
    return worst


def inherited_structure_residual(basis: LiftedBasis) -> float:
    """
    Check C(m_j) on inherited triples against the source constants.

    Equal (i, l): C^{(i,l,c)}_{(i,l,a)(i,l,b)} = C(n_i)^c_ab and no component
    outside that copy; mixed (i, l): all constants vanish.
    """
    worst = 0.0
    for block in basis.blocks:
        constants = block.basis.structconst
        for x, (i1, l1, a) in enumerate(block.inherited):
            for y, (i2, l2, b) in enumerate(block.inherited):
                expected = np.zeros(block.basis.dim)
                if (i1, l1) == (i2, l2):
                    source = basis.source_bases[i1].structconst[a, b]
                    for c, value in enumerate(source):
                        expected[block.index[(i1, l1, c)]] = value
                worst = max(worst, float(np.max(np.abs(constants[x, y] - expected))))
    return worst


def block_orthogonality_residual(basis: LiftedBasis) -> float:
    """Largest |g(E_beta, E_beta')| with beta in J^phi and beta' in J^c."""
    worst = 0.0
    for block in basis.blocks:
        cross = block.basis.gram[: block.n_inherited, block.n_inherited:]
        if cross.size:
            worst = max(worst, float(np.max(np.abs(cross))))
    return worst


def basis_dump(basis: LiftedBasis) -> dict:
    """JSON-serializable description: labels, family tags, dof counts, generators."""
    labels = classify_directions(basis) if basis.spec.target.rank == 1 else None
    blocks = []
    for block in basis.blocks:
        entries = []
        for k, matrix in enumerate(block.generators):
            if k < block.n_inherited:
                i, ell, alpha = block.inherited[k]
                entry = {"index": k, "kind": "inherited", "triple": [i + 1, ell + 1, alpha + 1]}
            else:
                entry = {"index": k, "kind": "complement", "family": block.families[k - block.n_inherited]}
            if labels is not None:
                entry["label"] = labels[k]
            entry["real"] = np.round(matrix.real, 12).tolist()
            entry["imag"] = np.round(matrix.imag, 12).tolist()
            entries.append(entry)
        blocks.append({
            "block": block.j + 1,
            "m": block.m,
            "n_inherited": block.n_inherited,
            "n_complement": block.n_complement,
            "family_counts": block.family_counts(),
            "generators": entries,
        })
    n_idof, n_ndof = (sum(b.n_inherited for b in basis.blocks), sum(b.n_complement for b in basis.blocks))
    return {
        "embedding": basis.spec.to_dict(),
        "n_idof": n_idof,
        "n_ndof": n_ndof,
        "r_dof": n_ndof / n_idof if n_idof else None,
        "class_counts": class_counts(labels) if labels is not None else None,
        "blocks": blocks,
    }
