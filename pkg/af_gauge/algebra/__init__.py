"""
Algebraic layer: sl(n) bases, algebra embeddings, forms and lifted bases.

Main Components:
- matalg: anti-Hermitian sl(n) generators, metric and structure constants
- afcore: algebra profiles, embeddings, hat_phi and the K0 pushforward
- forms: the graded algebra of forms with Koszul differential and Hodge dual
- lift: adapted target bases split into inherited and complement directions
"""

from .afcore import (
    AlgebraProfile,
    EmbeddingSpec,
    compose_embeddings,
    hat_phi,
    k0_pushforward,
    phi_apply,
    phi_block_inject,
    validate_embedding,
)
from .forms import Form, hodge_star, integral, koszul_d, scalar_product, wedge
from .lift import LiftedBasis, build_lifted_basis, classify_directions, dof_counts
from .matalg import SlBasis, gellmann_basis, gram_metric, structure_constants

__all__ = [
    'AlgebraProfile',
    'EmbeddingSpec',
    'validate_embedding',
    'phi_block_inject',
    'phi_apply',
    'hat_phi',
    'compose_embeddings',
    'k0_pushforward',
    'Form',
    'wedge',
    'koszul_d',
    'hodge_star',
    'integral',
    'scalar_product',
    'LiftedBasis',
    'build_lifted_basis',
    'classify_directions',
    'dof_counts',
    'SlBasis',
    'gellmann_basis',
    'gram_metric',
    'structure_constants',
]
