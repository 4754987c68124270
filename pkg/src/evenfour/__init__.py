"""Exact algebra for even 4-manifolds: abelian group functors, spin covers,
even unimodular forms, signature inequalities and bounds on the invariant r."""

__version__ = "0.1.0"
