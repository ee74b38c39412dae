"""Jordan-Wigner mapping of second-quantized Hamiltonians to Pauli terms.

Qubit ordering: spin orbital 2m is the alpha component of spatial orbital m
and 2m+1 the beta component (qubit index = spin-orbital index, 0-based),
with spatial orbitals sorted occupied-first by MO energy.  Pauli words are
returned as (x_mask, z_mask) with coefficients for the Hermitian
letters-operator i^{|x&z|} X^x Z^z.
"""

from __future__ import annotations

import numpy as np

ORDERING_TAG = "interleaved-spin-occupied-first"

PauliWord = tuple[int, int]  # (x_mask, z_mask) for X^x Z^z


def _mul_into(acc: dict[PauliWord, complex], w1: PauliWord, c1: complex, w2: PauliWord, c2: complex):
    x1, z1 = w1
    x2, z2 = w2
    sign = -1.0 if (z1 & x2).bit_count() % 2 else 1.0
    key = (x1 ^ x2, z1 ^ z2)
    acc[key] = acc.get(key, 0.0) + sign * c1 * c2


def _product(a: dict[PauliWord, complex], b: dict[PauliWord, complex]) -> dict[PauliWord, complex]:
    out: dict[PauliWord, complex] = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            _mul_into(out, w1, c1, w2, c2)
    return out


def _lower(p: int) -> dict[PauliWord, complex]:
    """a_p = Z_{<p} X_p (I - Z_p)/2."""
    zs = (1 << p) - 1
    return {
        (1 << p, zs): 0.5,
        (1 << p, zs | (1 << p)): -0.5,
    }


def _raise(p: int) -> dict[PauliWord, complex]:
    """a_p^dagger = Z_{<p} X_p (I + Z_p)/2."""
    zs = (1 << p) - 1
    return {
        (1 << p, zs): 0.5,
        (1 << p, zs | (1 << p)): 0.5,
    }


def jordan_wigner_hamiltonian(
    h_so: np.ndarray, eri_so_chemist: np.ndarray, constant: float, threshold: float = 1e-12
) -> list[tuple[float, int, int]]:
    """Map sum h_PQ a+_P a_Q + 1/2 sum (PQ|RS) a+_P a+_R a_S a_Q + constant
    to [(coeff, x_mask, z_mask)] with Hermitian-letters real coefficients."""
    n = h_so.shape[0]
    acc: dict[PauliWord, complex] = {(0, 0): complex(constant)}

    raises = [_raise(p) for p in range(n)]
    lowers = [_lower(p) for p in range(n)]

    for p in range(n):
        for q in range(n):
            c = h_so[p, q]
            if abs(c) < threshold:
                continue
            for w, v in _product(raises[p], lowers[q]).items():
                acc[w] = acc.get(w, 0.0) + c * v

    for p in range(n):
        for r in range(n):
            left = _product(raises[p], raises[r])
            if not left:
                continue
            for s in range(n):
                for q in range(n):
                    c = 0.5 * eri_so_chemist[p, q, r, s]
                    if abs(c) < threshold:
                        continue
                    for w, v in _product(left, _product(lowers[s], lowers[q])).items():
                        acc[w] = acc.get(w, 0.0) + c * v

    terms: list[tuple[float, int, int]] = []
    for (x, z), c in acc.items():
        folded = c * (-1j) ** ((x & z).bit_count() % 4)
        if abs(folded.imag) > 1e-9:
            raise RuntimeError(f"non-Hermitian JW output at word {(x, z)}: {c}")
        val = folded.real
        if abs(val) >= threshold:
            terms.append((float(val), x, z))
    return terms


def spin_orbital_integrals(h_mo: np.ndarray, eri_mo: np.ndarray):
    """Expand spatial MO integrals into interleaved spin orbitals."""
    n = h_mo.shape[0]
    m = 2 * n
    h_so = np.zeros((m, m))
    eri_so = np.zeros((m, m, m, m))
    for p in range(n):
        for q in range(n):
            for sp in range(2):
                h_so[2 * p + sp, 2 * q + sp] = h_mo[p, q]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    v = eri_mo[p, q, r, s]
                    if abs(v) < 1e-14:
                        continue
                    for sp in range(2):
                        for sq in range(2):
                            eri_so[2 * p + sp, 2 * q + sp, 2 * r + sq, 2 * s + sq] = v
    return h_so, eri_so
