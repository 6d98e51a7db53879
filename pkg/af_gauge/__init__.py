"""
af-gauge - gauge fields on embeddings of finite sums of matrix algebras.

This package provides the derivation-based differential calculus on
M_{n_1} + ... + M_{n_r}, the adapted bases of a block-diagonal embedding,
the constrained Higgs potential with its mass spectrum, and lambda-path
scans that locate discontinuities of the constrained minimum.
"""

__version__ = "0.1.0"

# Package metadata
__all__ = [
    "__version__",
]
