"""Exact and modular computations for quantum affine o(N): vector representation, R-matrix,
exchange scalars, Clifford-type Fock modules and spinor L-operators."""

__version__ = "0.1.0"
