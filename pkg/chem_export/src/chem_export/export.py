"""End-to-end fixture export: geometry -> SCF -> (active space) -> JW ->
schema-valid Hamiltonian JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import ANGSTROM_TO_BOHR, atomic_number, build_basis
from .fci import fci_ground_state
from .integrals import integral_tables
from .jw import ORDERING_TAG, jordan_wigner_hamiltonian, spin_orbital_integrals
from .scf import mo_integrals, restricted_hartree_fock

FORMAT_VERSION = 1

FCI_QUBIT_CAP = 16  # determinant CI kept to desk scale


@dataclass(frozen=True)
class MoleculeRequest:
    molecule: str
    bond_length_angstrom: float
    atoms: tuple[tuple[str, tuple[float, float, float]], ...]  # coords in Angstrom
    n_electrons: int | None = None  # default: neutral molecule, full space
    n_spatial_orbitals: int | None = None
    basis: str = "sto-3g"
    ordering: str = ORDERING_TAG


def geometry(molecule: str, bond_length: float) -> MoleculeRequest:
    """Geometries for the built-in systems; bond_length in Angstrom."""
    d = bond_length
    if molecule == "H2":
        atoms = (("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, d)))
    elif molecule == "H4":
        # square ring, side = bond length
        atoms = (
            ("H", (0.0, 0.0, 0.0)),
            ("H", (d, 0.0, 0.0)),
            ("H", (d, d, 0.0)),
            ("H", (0.0, d, 0.0)),
        )
    elif molecule == "LiH":
        atoms = (("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, d)))
    elif molecule == "BeH2":
        atoms = (("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, d)), ("H", (0.0, 0.0, -d)))
    elif molecule == "N2":
        atoms = (("N", (0.0, 0.0, 0.0)), ("N", (0.0, 0.0, d)))
    else:
        raise ValueError(f"no built-in geometry for {molecule!r}")
    return MoleculeRequest(molecule, d, atoms)


@dataclass
class ExportResult:
    document: dict
    hf_energy: float
    fci_energy: float | None
    n_qubits: int


def _active_space(h_mo, eri_mo, mo_energies, n_electrons_total, n_active_el, n_active_orb):
    """Freeze the lowest doubly occupied orbitals and truncate high virtuals."""
    n_frozen = (n_electrons_total - n_active_el) // 2
    active = list(range(n_frozen, n_frozen + n_active_orb))
    core = list(range(n_frozen))
    core_energy = 0.0
    for i in core:
        core_energy += 2.0 * h_mo[i, i]
        for j in core:
            core_energy += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    h_eff = h_mo[np.ix_(active, active)].copy()
    for a_idx, a in enumerate(active):
        for b_idx, b in enumerate(active):
            for i in core:
                h_eff[a_idx, b_idx] += 2.0 * eri_mo[a, b, i, i] - eri_mo[a, i, i, b]
    eri_eff = eri_mo[np.ix_(active, active, active, active)].copy()
    return h_eff, eri_eff, core_energy, mo_energies[active]


def export_hamiltonian(req: MoleculeRequest) -> ExportResult:
    atoms_bohr = [
        (sym, tuple(c * ANGSTROM_TO_BOHR for c in xyz)) for sym, xyz in req.atoms
    ]
    charges = [(atomic_number(sym), xyz) for sym, xyz in atoms_bohr]
    n_electrons_total = sum(z for z, _ in charges)
    if n_electrons_total % 2:
        raise ValueError("only closed-shell neutral molecules are supported")

    shells = build_basis(atoms_bohr)
    s, t, v, eri = integral_tables(shells, charges)
    e_nuc = 0.0
    for i in range(len(charges)):
        for j in range(i + 1, len(charges)):
            zi, ri = charges[i]
            zj, rj = charges[j]
            e_nuc += zi * zj / math.dist(ri, rj)

    scf = restricted_hartree_fock(s, t, v, eri, n_electrons_total, e_nuc)
    h_mo, eri_mo = mo_integrals(t + v, eri, scf.mo_coefficients)

    n_active_el = req.n_electrons if req.n_electrons is not None else n_electrons_total
    n_active_orb = (
        req.n_spatial_orbitals if req.n_spatial_orbitals is not None else h_mo.shape[0]
    )
    if (n_electrons_total - n_active_el) % 2:
        raise ValueError("active space must freeze whole orbital pairs")
    h_act, eri_act, core_energy, _ = _active_space(
        h_mo, eri_mo, scf.mo_energies, n_electrons_total, n_active_el, n_active_orb
    )
    constant = e_nuc + core_energy

    n_qubits = 2 * h_act.shape[0]
    fci_energy = None
    if n_qubits <= FCI_QUBIT_CAP:
        fci_energy, hf_det_energy = fci_ground_state(h_act, eri_act, n_active_el, constant)
        if abs(hf_det_energy - scf.energy) > 1e-8:
            raise RuntimeError(
                f"HF determinant energy {hf_det_energy} disagrees with SCF {scf.energy}"
            )

    h_so, eri_so = spin_orbital_integrals(h_act, eri_act)
    terms = jordan_wigner_hamiltonian(h_so, eri_so, constant)

    def mask_to_sparse(x: int, z: int) -> str:
        if x == 0 and z == 0:
            return "I"
        out = []
        for q in range(n_qubits):
            xq, zq = (x >> q) & 1, (z >> q) & 1
            if xq or zq:
                out.append(f"{'IXZY'[xq + 2 * zq]}{q + 1}")
        return "".join(out)

    document = {
        "format_version": FORMAT_VERSION,
        "n_qubits": n_qubits,
        "molecule": req.molecule,
        "bond_length_angstrom": req.bond_length_angstrom,
        "n_electrons": n_active_el,
        "ordering": req.ordering,
        "hf_energy": scf.energy,
        "fci_energy": fci_energy,
        "terms": [
            {"coeff": c, "pauli": mask_to_sparse(x, z)}
            for c, x, z in sorted(terms, key=lambda tt: (tt[1] | tt[2], tt[2], tt[1]))
        ],
    }
    return ExportResult(document, scf.energy, fci_energy, n_qubits)


def write_fixture(req: MoleculeRequest, out_path: str | Path) -> ExportResult:
    result = export_hamiltonian(req)
    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result.document, indent=1) + "\n")
    return result
