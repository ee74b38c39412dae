"""Determinant-space full CI with Slater-Condon rules.

Serves as the reference-energy source for fixture files; deliberately
independent of the Jordan-Wigner qubit route so the two can cross-check.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _occ_list(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if (mask >> i) & 1]


def _phase_single(mask: int, i: int, a: int) -> int:
    """Sign of a_i^dagger ... for moving an electron i -> a within one spin."""
    lo, hi = (i, a) if i < a else (a, i)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1 if between.bit_count() % 2 else 1


def _single_excitations(mask: int, n: int):
    occ = _occ_list(mask, n)
    for i in occ:
        for a in range(n):
            if (mask >> a) & 1:
                continue
            yield i, a, mask ^ (1 << i) ^ (1 << a), _phase_single(mask, i, a)


def fci_ground_state(
    h_mo: np.ndarray, eri_mo: np.ndarray, n_electrons: int, core_energy: float
) -> tuple[float, float]:
    """(ground energy, HF determinant energy), both including core_energy."""
    n = h_mo.shape[0]
    n_alpha = n_beta = n_electrons // 2
    dets_a = [sum(1 << i for i in c) for c in combinations(range(n), n_alpha)]
    dets_b = [sum(1 << i for i in c) for c in combinations(range(n), n_beta)]
    index = {(a, b): k for k, (a, b) in enumerate(
        (a, b) for a in dets_a for b in dets_b
    )}
    dim = len(index)
    mat = np.zeros((dim, dim))

    def diagonal(a_mask: int, b_mask: int) -> float:
        occ_a, occ_b = _occ_list(a_mask, n), _occ_list(b_mask, n)
        e = sum(h_mo[i, i] for i in occ_a) + sum(h_mo[i, i] for i in occ_b)
        for occ in (occ_a, occ_b):
            for i in occ:
                for j in occ:
                    e += 0.5 * (eri_mo[i, i, j, j] - eri_mo[i, j, j, i])
        for i in occ_a:
            for j in occ_b:
                e += eri_mo[i, i, j, j]
        return e

    def single_element(i, a, phase, same_mask_after, other_occ, same_occ_after):
        val = h_mo[i, a]
        for j in same_occ_after:
            if j == a:
                continue
            val += eri_mo[i, a, j, j] - eri_mo[i, j, j, a]
        for j in other_occ:
            val += eri_mo[i, a, j, j]
        return phase * val

    def same_spin_doubles(mask: int):
        """(i<j occ) -> (a<b vir) with the sequential-singles phase."""
        occ = _occ_list(mask, n)
        vir = [p for p in range(n) if not (mask >> p) & 1]
        for ii, i in enumerate(occ):
            for j in occ[ii + 1 :]:
                for ai, a in enumerate(vir):
                    for b in vir[ai + 1 :]:
                        mid = mask ^ (1 << i) ^ (1 << a)
                        ph = _phase_single(mask, i, a) * _phase_single(mid, j, b)
                        new = mid ^ (1 << j) ^ (1 << b)
                        yield i, j, a, b, new, ph

    for (a_mask, b_mask), row in index.items():
        mat[row, row] += diagonal(a_mask, b_mask)
        occ_a, occ_b = _occ_list(a_mask, n), _occ_list(b_mask, n)

        for i, a, new_a, ph in _single_excitations(a_mask, n):
            col = index[(new_a, b_mask)]
            if col >= row:
                occ_after = _occ_list(new_a, n)
                mat[row, col] += single_element(i, a, ph, new_a, occ_b, occ_after)
        for i, a, new_b, ph in _single_excitations(b_mask, n):
            col = index[(a_mask, new_b)]
            if col >= row:
                occ_after = _occ_list(new_b, n)
                mat[row, col] += single_element(i, a, ph, new_b, occ_a, occ_after)

        for i, j, a, b, new_a, ph in same_spin_doubles(a_mask):
            col = index[(new_a, b_mask)]
            if col >= row:
                mat[row, col] += ph * (eri_mo[i, a, j, b] - eri_mo[i, b, j, a])
        for i, j, a, b, new_b, ph in same_spin_doubles(b_mask):
            col = index[(a_mask, new_b)]
            if col >= row:
                mat[row, col] += ph * (eri_mo[i, a, j, b] - eri_mo[i, b, j, a])

        for i, a, new_a, ph_a in _single_excitations(a_mask, n):
            for j, b, new_b, ph_b in _single_excitations(b_mask, n):
                col = index[(new_a, new_b)]
                if col >= row:
                    mat[row, col] += ph_a * ph_b * eri_mo[i, a, j, b]

    mat = np.triu(mat) + np.triu(mat, 1).T
    vals = np.linalg.eigvalsh(mat)
    hf_mask = (1 << (n_electrons // 2)) - 1
    e_hf = diagonal(hf_mask, hf_mask)
    return float(vals[0]) + core_energy, float(e_hf) + core_energy
