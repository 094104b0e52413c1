"""Lattice counts for unitary orbital integrals over unramified quadratic
extensions of p-adic fields, with checks of the identities relating them."""

__version__ = "0.1.0"
