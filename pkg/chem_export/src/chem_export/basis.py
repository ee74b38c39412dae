"""STO-3G basis: universal three-Gaussian expansions of Slater orbitals,
scaled per element by the Hehre-Stewart-Pople zeta exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

# Universal STO-3G expansion (exponents for zeta = 1).
_EXP_1S = np.array([2.227660584, 0.405771156, 0.109818])
_COEF_1S = np.array([0.154328967, 0.535328142, 0.444634542])

_EXP_2SP = np.array([0.994203, 0.231031, 0.0751386])
_COEF_2S = np.array([-0.099967230, 0.399512826, 0.700115469])
_COEF_2P = np.array([0.155916275, 0.607683719, 0.391957393])

# (Z, zeta_1s, zeta_2sp); first-row values from the original STO-3G fits.
_ELEMENTS = {
    "H": (1, 1.24, None),
    "He": (2, 1.69, None),
    "Li": (3, 2.69, 0.80),
    "Be": (4, 3.68, 1.15),
    "B": (5, 4.68, 1.50),
    "C": (6, 5.67, 1.72),
    "N": (7, 6.67, 1.95),
    "O": (8, 7.66, 2.25),
    "F": (9, 8.65, 2.55),
}


@dataclass(frozen=True)
class Shell:
    """Contracted Cartesian Gaussian: sum_i c_i (x-X)^lx (y-Y)^ly (z-Z)^lz
    exp(-a_i r^2), with normalized primitives."""

    center: tuple[float, float, float]  # Bohr
    angular: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # including primitive norms


def _primitive_norm(a: float, angular: tuple[int, int, int]) -> float:
    lx, ly, lz = angular
    l = lx + ly + lz
    from math import pi, sqrt

    def dfact(n):
        out = 1
        while n > 1:
            out *= n
            n -= 2
        return out

    num = (2 * a / pi) ** 0.75 * (4 * a) ** (l / 2.0)
    den = sqrt(dfact(2 * lx - 1) * dfact(2 * ly - 1) * dfact(2 * lz - 1))
    return num / den


def _make_shell(center, angular, exps, coefs) -> Shell:
    norms = np.array([_primitive_norm(a, angular) for a in exps])
    weighted = coefs * norms
    # renormalize the contracted function exactly
    from math import pi

    def dfact(n):
        out = 1
        while n > 1:
            out *= n
            n -= 2
        return out

    self_overlap = 0.0
    lx, ly, lz = angular
    for ci, ai in zip(weighted, exps):
        for cj, aj in zip(weighted, exps):
            p = ai + aj
            val = (pi / p) ** 1.5
            for l in (lx, ly, lz):
                val *= dfact(2 * l - 1) / (2.0 * p) ** l
            self_overlap += ci * cj * val
    weighted = weighted / np.sqrt(self_overlap)
    return Shell(tuple(center), tuple(angular), np.asarray(exps, float), weighted)


def atomic_number(symbol: str) -> int:
    if symbol not in _ELEMENTS:
        raise ValueError(f"element {symbol!r} not in the STO-3G table")
    return _ELEMENTS[symbol][0]


def shells_for_atom(symbol: str, center_bohr) -> list[Shell]:
    if symbol not in _ELEMENTS:
        raise ValueError(f"element {symbol!r} not in the STO-3G table")
    _, z1, z2 = _ELEMENTS[symbol]
    shells = [_make_shell(center_bohr, (0, 0, 0), _EXP_1S * z1**2, _COEF_1S.copy())]
    if z2 is not None:
        sp_exps = _EXP_2SP * z2**2
        shells.append(_make_shell(center_bohr, (0, 0, 0), sp_exps, _COEF_2S.copy()))
        for axis in range(3):
            ang = tuple(1 if i == axis else 0 for i in range(3))
            shells.append(_make_shell(center_bohr, ang, sp_exps, _COEF_2P.copy()))
    return shells


def build_basis(atoms: list[tuple[str, tuple[float, float, float]]]) -> list[Shell]:
    """atoms: (symbol, xyz in Bohr)."""
    shells: list[Shell] = []
    for sym, xyz in atoms:
        shells.extend(shells_for_atom(sym, xyz))
    return shells
