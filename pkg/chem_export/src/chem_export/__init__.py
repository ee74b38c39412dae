"""Minimal STO-3G quantum-chemistry pipeline: integrals, RHF, determinant
FCI, and Jordan-Wigner export of qubit-Hamiltonian fixture files."""

__version__ = "0.1.0"
