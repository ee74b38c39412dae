"""Qubit Hamiltonians: file codec, energy evaluation, closed-form theta
optimization for one-parameter generalized states, and a small-n exact
ground-state oracle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import DimensionError, ResourceLimitError, SchemaError
from .pauli import PauliString, format_pauli, parse_pauli
from .tableau import StabilizerTableau, expectation

ORDERING_TAG = "interleaved-spin-occupied-first"

FORMAT_VERSION = 1

BRUTE_FORCE_QUBIT_CAP = 12


@dataclass(frozen=True)
class MoleculeMeta:
    molecule: str
    bond_length_angstrom: float
    n_electrons: int
    n_qubits: int
    ordering: str
    hf_energy: float | None = None
    fci_energy: float | None = None


@dataclass(frozen=True)
class QubitHamiltonian:
    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]  # coefficients in Hartree, Paulis sign +1
    meta: MoleculeMeta

    @property
    def n_terms(self) -> int:
        return len(self.terms)


def _normalize_terms(
    raw: list[tuple[float, PauliString]], n: int
) -> tuple[tuple[float, PauliString], ...]:
    acc: dict[tuple[int, int], float] = {}
    order: list[tuple[int, int]] = []
    for coeff, p in raw:
        if p.n_qubits != n:
            raise SchemaError(f"term {format_pauli(p)} does not act on {n} qubits")
        if not p.is_hermitian:
            raise SchemaError(f"non-Hermitian term {p!r}")
        c = coeff * p.sign
        key = (p.x_bits, p.z_bits)
        if key not in acc:
            acc[key] = 0.0
            order.append(key)
        acc[key] += c
    out = []
    for key in order:
        c = acc[key]
        if c == 0.0:
            continue
        x, z = key
        out.append((c, PauliString(n, x, z, (x & z).bit_count() % 4)))
    return tuple(out)


def hamiltonian_from_terms(
    terms: list[tuple[float, PauliString]], meta: MoleculeMeta
) -> QubitHamiltonian:
    return QubitHamiltonian(meta.n_qubits, _normalize_terms(terms, meta.n_qubits), meta)


def load_hamiltonian(path: str | Path) -> QubitHamiltonian:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return hamiltonian_from_dict(doc, source=str(path))


def hamiltonian_from_dict(doc: dict, *, source: str = "<dict>") -> QubitHamiltonian:
    def need(key, types):
        if key not in doc:
            raise SchemaError(f"{source}: missing field {key!r}")
        v = doc[key]
        if not isinstance(v, types):
            raise SchemaError(f"{source}: field {key!r} has wrong type")
        return v

    if need("format_version", int) != FORMAT_VERSION:
        raise SchemaError(f"{source}: unsupported format_version {doc['format_version']}")
    n = need("n_qubits", int)
    if n < 1:
        raise SchemaError(f"{source}: n_qubits must be positive")
    molecule = need("molecule", str)
    bond = float(need("bond_length_angstrom", (int, float)))
    n_el = need("n_electrons", int)
    if n_el % 2 != 0:
        raise SchemaError(f"{source}: open-shell systems unsupported (n_electrons={n_el})")
    ordering = need("ordering", str)
    hf = doc.get("hf_energy")
    fci = doc.get("fci_energy")
    for name, v in (("hf_energy", hf), ("fci_energy", fci)):
        if v is not None and not isinstance(v, (int, float)):
            raise SchemaError(f"{source}: {name} must be a number or null")
    raw_terms = need("terms", list)
    terms: list[tuple[float, PauliString]] = []
    for i, t in enumerate(raw_terms):
        if not isinstance(t, dict) or "coeff" not in t or "pauli" not in t:
            raise SchemaError(f"{source}: term {i} must be {{coeff, pauli}}")
        coeff = t["coeff"]
        if not isinstance(coeff, (int, float)) or not math.isfinite(coeff):
            raise SchemaError(f"{source}: term {i} coefficient not finite")
        text = t["pauli"]
        if not isinstance(text, str):
            raise SchemaError(f"{source}: term {i} pauli must be a string")
        if text.strip().startswith(("+", "-")):
            raise SchemaError(
                f"{source}: term {i} carries an explicit sign ({text!r}); sign lives in coeff"
            )
        try:
            p = parse_pauli(text, n, allow_sign=False)
        except ValueError as exc:
            raise SchemaError(f"{source}: term {i}: {exc}") from exc
        terms.append((float(coeff), p))
    meta = MoleculeMeta(
        molecule=molecule,
        bond_length_angstrom=bond,
        n_electrons=n_el,
        n_qubits=n,
        ordering=ordering,
        hf_energy=None if hf is None else float(hf),
        fci_energy=None if fci is None else float(fci),
    )
    return QubitHamiltonian(n, _normalize_terms(terms, n), meta)


def hamiltonian_to_dict(h: QubitHamiltonian) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "n_qubits": h.n_qubits,
        "molecule": h.meta.molecule,
        "bond_length_angstrom": h.meta.bond_length_angstrom,
        "n_electrons": h.meta.n_electrons,
        "ordering": h.meta.ordering,
        "hf_energy": h.meta.hf_energy,
        "fci_energy": h.meta.fci_energy,
        "terms": [
            {"coeff": c, "pauli": "I" if p.is_identity else format_pauli(p.unsigned())}
            for c, p in h.terms
        ],
    }


def save_hamiltonian(h: QubitHamiltonian, path: str | Path) -> None:
    Path(path).write_text(json.dumps(hamiltonian_to_dict(h), indent=1) + "\n")


# ---------------------------------------------------------------------------
# Energies
# ---------------------------------------------------------------------------


def energy_stabilizer(h: QubitHamiltonian, state: StabilizerTableau) -> float:
    if state.n_qubits != h.n_qubits:
        raise DimensionError("state and Hamiltonian qubit counts differ")
    total = 0.0
    for coeff, p in h.terms:
        v = expectation(state, p)
        if v:
            total += coeff * v
    return total


def hf_state_for(h: QubitHamiltonian) -> StabilizerTableau:
    """Reference determinant under the occupied-first ordering convention."""
    from .tableau import basis_state

    bits = (1 << h.meta.n_electrons) - 1
    return basis_state(bits, h.n_qubits)


@dataclass(frozen=True)
class GeneralizedState:
    """cos(theta/2)|base> + (-1)^l sin(theta/2) E|base>."""

    base: StabilizerTableau
    excitation: PauliString
    l: int
    theta: float

    def amplitudes(self) -> tuple[float, float]:
        return math.cos(self.theta / 2.0), math.sin(self.theta / 2.0)


def _branch_coefficients(
    h: QubitHamiltonian, base: StabilizerTableau, e: PauliString
) -> tuple[float, float, float]:
    """A = <H>, B = <E H E>, C = sum over commuting terms of h_i <P_i E>."""
    a = b = c = 0.0
    for coeff, p in h.terms:
        v = expectation(base, p)
        sigma = 1 if p.commutes_with(e) else -1
        if v:
            a += coeff * v
            b += coeff * sigma * v
        if sigma == 1:
            w = expectation(base, p * e)
            if w:
                c += coeff * w
    return a, b, c


def energy_generalized(h: QubitHamiltonian, g: GeneralizedState) -> float:
    if expectation(g.base, g.excitation) != 0:
        raise SchemaError("generalized state base must have <E> = 0")
    a, b, c = _branch_coefficients(h, g.base, g.excitation)
    half = g.theta / 2.0
    return (
        a * math.cos(half) ** 2
        + b * math.sin(half) ** 2
        + (-1) ** (g.l % 2) * c * math.sin(g.theta)
    )


def optimal_theta(
    h: QubitHamiltonian,
    base: StabilizerTableau,
    e: PauliString,
    l: int,
) -> tuple[float, float]:
    """Exact minimizer of E(theta) = (A+B)/2 + u cos(theta) + v sin(theta)."""
    if expectation(base, e) != 0:
        raise SchemaError("optimal_theta requires <E> = 0 on the base state")
    a, b, c = _branch_coefficients(h, base, e)
    u = (a - b) / 2.0
    v = (-1) ** (l % 2) * c
    mean = (a + b) / 2.0
    r = math.hypot(u, v)
    theta = math.atan2(-v, -u)
    if theta <= -math.pi:
        theta = math.pi
    return theta, mean - r


# ---------------------------------------------------------------------------
# Exact ground-state oracle
# ---------------------------------------------------------------------------


def hamiltonian_matrix(h: QubitHamiltonian, *, qubit_cap: int = BRUTE_FORCE_QUBIT_CAP):
    """Sparse matrix of the Hamiltonian (basis bit q = qubit q)."""
    n = h.n_qubits
    if n > qubit_cap:
        raise ResourceLimitError(f"dense oracle capped at {qubit_cap} qubits, got {n}")
    dim = 1 << n
    cols = np.arange(dim, dtype=np.uint64)
    complex_needed = any(p.i_exp % 2 for _, p in h.terms)
    dtype = np.complex128 if complex_needed else np.float64
    mat = scipy.sparse.csr_matrix((dim, dim), dtype=dtype)
    for coeff, p in h.terms:
        rows = cols ^ np.uint64(p.x_bits)
        par = (np.bitwise_count(cols & np.uint64(p.z_bits)) & 1).astype(np.int8)
        phase = (1j ** p.i_exp) if p.i_exp % 2 else float((-1.0) ** (p.i_exp // 2))
        vals = (coeff * phase * np.where(par, -1.0, 1.0)).astype(dtype)
        mat += scipy.sparse.csr_matrix(
            (vals, (rows.astype(np.int64), cols.astype(np.int64))),
            shape=(dim, dim),
        )
    return mat


def brute_force_ground(
    h: QubitHamiltonian, *, qubit_cap: int = BRUTE_FORCE_QUBIT_CAP
) -> tuple[float, float]:
    """Lowest eigenvalue and residual ||Hv - Ev|| of the dense Hermitian sum."""
    mat = hamiltonian_matrix(h, qubit_cap=qubit_cap)
    dim = mat.shape[0]
    if dim <= 256:
        dense = mat.toarray()
        vals, vecs = np.linalg.eigh(dense)
        e0 = float(vals[0])
        v0 = vecs[:, 0]
    else:
        vals, vecs = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", tol=0)
        e0 = float(vals[0])
        v0 = vecs[:, 0]
    residual = float(np.linalg.norm(mat @ v0 - e0 * v0))
    if residual > 1e-8:
        dense = mat.toarray()
        vals, vecs = np.linalg.eigh(dense)
        e0 = float(vals[0])
        v0 = vecs[:, 0]
        residual = float(np.linalg.norm(mat @ v0 - e0 * v0))
    return e0, residual
