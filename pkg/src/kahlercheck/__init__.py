"""Residual-gated verification of weighted tensor-calculus identities on
compact model geometries (flat/perturbed tori, the round projective line)."""

__version__ = "0.1.0"
