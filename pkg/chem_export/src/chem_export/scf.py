"""Closed-shell restricted Hartree-Fock with DIIS and deterministic output
conventions (sign-fixed molecular orbitals, energy-ordered)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SCFError(RuntimeError):
    pass


@dataclass
class SCFResult:
    energy: float  # total (electronic + nuclear) energy, Hartree
    nuclear_repulsion: float
    mo_energies: np.ndarray
    mo_coefficients: np.ndarray  # columns are MOs over the AO basis
    n_occupied: int  # doubly occupied spatial orbitals
    n_iterations: int


def _fock(h_core, eri, density):
    j = np.einsum("pqrs,rs->pq", eri, density)
    k = np.einsum("prqs,rs->pq", eri, density)
    return h_core + j - 0.5 * k


def _sign_fix(c: np.ndarray) -> np.ndarray:
    out = c.copy()
    for col in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, col])))
        if out[idx, col] < 0:
            out[:, col] = -out[:, col]
    return out


def restricted_hartree_fock(
    s: np.ndarray,
    t: np.ndarray,
    v: np.ndarray,
    eri: np.ndarray,
    n_electrons: int,
    nuclear_repulsion: float,
    *,
    max_iterations: int = 200,
    convergence: float = 1e-10,
    diis_depth: int = 8,
    level_shift: float = 0.0,
) -> SCFResult:
    if n_electrons % 2:
        raise SCFError("restricted HF needs an even electron count")
    n_occ = n_electrons // 2
    h_core = t + v

    s_vals, s_vecs = np.linalg.eigh(s)
    if np.min(s_vals) < 1e-10:
        raise SCFError("overlap matrix is numerically singular")
    x = s_vecs @ np.diag(s_vals**-0.5) @ s_vecs.T

    def solve(f):
        fp = x.T @ f @ x
        e, cp = np.linalg.eigh(fp)
        return e, x @ cp

    e_mo, c = solve(h_core)
    density = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T

    energy = 0.0
    fock_history: list[np.ndarray] = []
    error_history: list[np.ndarray] = []
    for iteration in range(1, max_iterations + 1):
        f = _fock(h_core, eri, density)
        # DIIS error in the orthonormal frame
        err = x.T @ (f @ density @ s - s @ density @ f) @ x
        fock_history.append(f)
        error_history.append(err)
        if len(fock_history) > diis_depth:
            fock_history.pop(0)
            error_history.pop(0)
        if len(fock_history) > 1:
            m = len(fock_history)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = np.einsum("pq,pq->", error_history[i], error_history[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, fock_history))
            except np.linalg.LinAlgError:
                pass
        f_eff = f
        if level_shift:
            f_eff = f + level_shift * (s - 0.5 * s @ density @ s)
        e_mo, c = solve(f_eff)
        density_new = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        f_plain = _fock(h_core, eri, density_new)
        energy_new = 0.5 * np.einsum("pq,pq->", density_new, h_core + f_plain)
        delta_d = np.max(np.abs(density_new - density))
        delta_e = abs(energy_new - energy)
        density, energy = density_new, energy_new
        if delta_e < convergence and delta_d < np.sqrt(convergence):
            # recanonicalize with the unshifted Fock operator
            e_mo, c = solve(f_plain)
            c = _sign_fix(c)
            return SCFResult(
                energy=energy + nuclear_repulsion,
                nuclear_repulsion=nuclear_repulsion,
                mo_energies=e_mo,
                mo_coefficients=c,
                n_occupied=n_occ,
                n_iterations=iteration,
            )
    raise SCFError(f"SCF failed to converge in {max_iterations} iterations")


def mo_integrals(h_core, eri, c):
    """Transform core Hamiltonian and (pq|rs) to the MO basis."""
    h_mo = c.T @ h_core @ c
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return h_mo, eri_mo
