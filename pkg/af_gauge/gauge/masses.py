"""
Gauge-boson mass quadratic form and labelled spectrum.

Gauge directions G_gamma run over the Frobenius-orthonormal frame of every
u(m_j). The mass form couples them through the B-fields,
    M2[g, h] = sum_beta <[G_g, B_beta], [G_h, B_beta]>_F,
which is positive semidefinite and block diagonal over target blocks.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from ..algebra.lift import TRACE_LABEL, LiftedBasis, gauge_labels
from ..exceptions import DimensionMismatchError, NumericalFailureError
from .fields import Fields, block_fields

logger = logging.getLogger(__name__)

CLUSTER_RTOL = 1e-3
ZERO_ATOL = 1e-9
PSD_TOL = 1e-9


def block_mass_matrix(fields: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """sum_beta <[G_g, B_beta], [G_h, B_beta]>_F for one block."""
    if fields.shape[0] == 0:
        return np.zeros((directions.shape[0], directions.shape[0]))
    left = np.einsum("gij,bjk->gbik", directions, fields)
    right = np.einsum("bij,gjk->gbik", fields, directions)
    commutators = left - right
    flat = commutators.reshape(directions.shape[0], -1)
    matrix = (flat.conj() @ flat.T).real
    return 0.5 * (matrix + matrix.T)


def mass_form(lifted: LiftedBasis, config: Fields) -> np.ndarray:
    """Block-diagonal mass form over all gauge directions (sum_j m_j^2 of them)."""
    stacks = block_fields(lifted, config).blocks
    return linalg.block_diag(*[
        block_mass_matrix(stack, block.u_frame) for block, stack in zip(lifted.blocks, stacks)
    ])


@dataclass
class MassCluster:
    """Eigenvalues equal within the clustering tolerance."""

    mass: float
    degeneracy: int
    members: List[int]
    composition: Dict[str, int] = field(default_factory=dict)

    @property
    def dominant_label(self) -> str:
        return max(sorted(self.composition), key=lambda label: self.composition[label])


@dataclass
class MassSpectrum:
    """Eigenvalues (mass^2), masses and labels sorted by descending mass, trace directions last."""

    eigenvalues: np.ndarray
    masses: np.ndarray
    labels: List[str]
    clusters: List[MassCluster]
    weights: Optional[np.ndarray] = None

    @property
    def degeneracies(self) -> List[int]:
        return [cluster.degeneracy for cluster in self.clusters]

    @property
    def sorted_masses(self) -> np.ndarray:
        return np.sort(self.masses)[::-1]

    def clusters_for(self, label: str) -> List[MassCluster]:
        """Clusters whose members are mostly labelled `label`."""
        return [cluster for cluster in self.clusters if cluster.dominant_label == label]

    def masses_for(self, label: str) -> np.ndarray:
        return np.array([m for m, lab in zip(self.masses, self.labels) if lab == label])

    def pairs(self) -> List[str]:
        """'mass:label' strings in the stored order."""
        return [f"{mass:.9f}:{label}" for mass, label in zip(self.masses, self.labels)]


def cluster_eigenvalues(values: Sequence[float], rtol: float = CLUSTER_RTOL, atol: float = ZERO_ATOL) -> List[List[int]]:
    """
    Group indices of values sorted in descending order into degenerate runs.

    Neighbours belong together when |x - y| <= rtol * max(|x|, |y|) or both
    are within atol of zero.
    """
    groups: List[List[int]] = []
    for k, value in enumerate(values):
        if groups:
            previous = values[groups[-1][-1]]
            close = abs(value - previous) <= rtol * max(abs(value), abs(previous))
            both_zero = abs(value) <= atol and abs(previous) <= atol
            if close or both_zero:
                groups[-1].append(k)
                continue
        groups.append([k])
    return groups


def mass_spectrum(
    form: np.ndarray,
    labels: Sequence[str],
    rtol: float = CLUSTER_RTOL,
) -> MassSpectrum:
    """
    Diagonalize a mass form and label its eigenvectors.

    Trace rows and columns (label 'trace') are split off first: they
    are exactly massless and are appended as zero eigenvalues outside the
    clusters. Each remaining eigenvector takes the class with the largest
    squared projection weight; clusters record the labels of their members.

    Raises:
        NumericalFailureError: if the form is not symmetric PSD within tolerance
    """
    form = np.asarray(form, dtype=float)
    labels = list(labels)
    if form.shape != (len(labels), len(labels)):
        raise DimensionMismatchError(f"Mass form {form.shape} does not match {len(labels)} labels")
    scale = max(1.0, float(np.max(np.abs(form)))) if form.size else 1.0
    if form.size and float(np.max(np.abs(form - form.T))) > PSD_TOL * scale:
        raise NumericalFailureError("Mass form is not symmetric")

    trace_idx = [k for k, label in enumerate(labels) if label == TRACE_LABEL]
    keep = [k for k, label in enumerate(labels) if label != TRACE_LABEL]
    if trace_idx and form.size:
        leak = float(np.max(np.abs(form[np.ix_(trace_idx, range(len(labels)))])))
        if leak > PSD_TOL * scale:
            logger.warning(f"Trace directions couple with magnitude {leak:.2e}")

    block = form[np.ix_(keep, keep)]
    if block.size:
        values, vectors = linalg.eigh(block)
    else:
        values, vectors = np.zeros(0), np.zeros((0, 0))
    if values.size and values[0] < -PSD_TOL * scale:
        raise NumericalFailureError(f"Mass form has a negative eigenvalue {values[0]:.3e}")
    order = np.argsort(-values, kind="stable")
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]

    classes = sorted(set(labels[k] for k in keep))
    kept_labels = np.array([labels[k] for k in keep])
    weights = np.zeros((len(classes), values.size))
    for c, name in enumerate(classes):
        rows = kept_labels == name
        weights[c] = np.sum(np.abs(vectors[rows]) ** 2, axis=0)
    assigned = [classes[int(np.argmax(weights[:, k]))] for k in range(values.size)]

    clusters = []
    for group in cluster_eigenvalues(values, rtol):
        composition = Counter(assigned[k] for k in group)
        clusters.append(MassCluster(
            mass=float(np.sqrt(np.mean(values[group]))),
            degeneracy=len(group),
            members=list(group),
            composition=dict(sorted(composition.items())),
        ))

    eigenvalues = np.concatenate([values, np.zeros(len(trace_idx))])
    return MassSpectrum(
        eigenvalues=eigenvalues,
        masses=np.sqrt(eigenvalues),
        labels=assigned + [TRACE_LABEL] * len(trace_idx),
        clusters=clusters,
        weights=weights,
    )


def spectrum_at(lifted: LiftedBasis, config: Fields, rtol: float = CLUSTER_RTOL) -> MassSpectrum:
    """mass_form followed by mass_spectrum with the lifted gauge labels."""
    return mass_spectrum(mass_form(lifted, config), gauge_labels(lifted), rtol)
