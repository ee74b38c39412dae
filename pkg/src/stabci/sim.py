"""Preparation and syndrome-extraction circuits plus Monte-Carlo noise
trajectories with post-selection.

Circuits act on a data register (qubits 0..n_data-1) and measured ancillas
(indices >= n_data).  Pauli payloads inside ops always live on the data
register; ancillas are touched only through H/X/RY/CNOT/measure ops, which
keeps circuit composition a pure index shift.

Two engines execute trajectories: a tableau engine with exact sign tracking
(Clifford-only circuits) and a dense statevector engine holding the data
register plus one work ancilla (ancilla lifetimes never overlap since each
is measured before the next is introduced).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import StabilizerCode
from .errors import ResourceLimitError, StabciError
from .hamiltonian import GeneralizedState
from .pauli import PauliString, single, x_string
from .tableau import (
    StabilizerTableau,
    amplitudes,
    basis_state,
    expectation,
    overlap_squared,
    project_excitation,
)
from .tableau import _conj_gate  # gate-level conjugation rules

DENSE_QUBIT_CAP = 16


@dataclass(frozen=True)
class Circuit:
    n_data: int
    n_ancilla: int
    ops: tuple[tuple, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for op in self.ops:
            if op[0] == "MEASURE":
                key = op[2]
                if key in seen:
                    raise StabciError(f"duplicate measurement key {key!r}")
                seen.add(key)
            elif op[0] == "CCPAULI" and op[1] not in seen:
                raise StabciError(
                    f"classically controlled op references unknown key {op[1]!r}"
                )

    @property
    def has_rotation(self) -> bool:
        return any(op[0] == "RY" for op in self.ops)


@dataclass(frozen=True)
class NoiseModel:
    p_depol: float
    p_bitflip: float | None = None  # default: half the depolarizing probability

    def bitflip(self) -> float:
        return self.p_depol / 2.0 if self.p_bitflip is None else self.p_bitflip

    def validate(self) -> "NoiseModel":
        for p in (self.p_depol, self.bitflip()):
            if not 0.0 <= p <= 1.0:
                raise StabciError(f"probability {p} outside [0, 1]")
        return self


@dataclass(frozen=True)
class SimReport:
    n_traj: int
    n_kept: int
    discard_rate: float
    mean_overlap: float
    stderr: float
    seed: int


# ---------------------------------------------------------------------------
# Circuit builders
# ---------------------------------------------------------------------------


def build_prep_circuit(
    trace: tuple[tuple[PauliString, int], ...],
    hf_bits: int,
    n_data: int,
    theta: float | None = None,
) -> Circuit:
    """Hadamard-test preparation: X gates for the reference occupation, one
    ancilla per excitation with a classically controlled sign correction.

    With `theta`, the final excitation becomes the generalized one: an RY on
    its ancilla replaces the correction, and the measurement carries the
    expected outcome used for post-selection.
    """
    ops: list[tuple] = []
    if hf_bits:
        ops.append(("PAULI", x_string(n_data, hf_bits)))
    state = basis_state(hf_bits, n_data)
    for idx, (e, l) in enumerate(trace):
        if e.n_qubits != n_data or e.z_bits or e.x_bits == 0:
            raise StabciError("prep excitations must be nonidentity data X-strings")
        is_generalized = theta is not None and idx == len(trace) - 1
        a = n_data + idx
        key = f"prep{idx}"
        ops.append(("H", a))
        for q in e.support():
            ops.append(("CNOT", a, q))
        if is_generalized:
            angle = theta - math.pi / 2 if l else math.pi / 2 - theta
            ops.append(("RY", a, angle))
        ops.append(("H", a))
        if l:
            ops.append(("X", a))
        if is_generalized:
            ops.append(("MEASURE", a, key, 0))
        else:
            correction = None
            for g in state.generators:
                if not g.commutes_with(e):
                    correction = g
                    break
            if correction is None:
                raise StabciError("excitation has no anticommuting stabilizer")
            ops.append(("MEASURE", a, key, None))
            ops.append(("CCPAULI", key, correction))
        state = project_excitation(state, e, l)
    return Circuit(n_data, len(trace), tuple(ops))


def build_syndrome_circuit(code: StabilizerCode) -> Circuit:
    """One ancilla per generator: H, controlled generator factors, H, a
    bit-flip channel site, and a measurement with the sign-derived outcome."""
    n = code.n_qubits
    ops: list[tuple] = []
    for idx, g in enumerate(code.generators):
        a = n + idx
        key = f"syn{idx}"
        expected = 0 if g.sign == 1 else 1
        ops.append(("H", a))
        for q in g.support():
            ops.append(("CPAULI", a, single(n, q, g.letter(q))))
        ops.append(("BITFLIP", a))
        ops.append(("H", a))
        ops.append(("MEASURE", a, key, expected))
    return Circuit(n, len(code.generators), tuple(ops))


def _shift_ancillas(op: tuple, n_data: int, offset: int) -> tuple:
    def shift(q: int) -> int:
        return q + offset if q >= n_data else q

    kind = op[0]
    if kind in ("H", "X", "DEPOL", "BITFLIP"):
        return (kind, shift(op[1]))
    if kind == "RY":
        return (kind, shift(op[1]), op[2])
    if kind == "CNOT":
        return (kind, shift(op[1]), shift(op[2]))
    if kind == "MEASURE":
        return (kind, shift(op[1]), op[2], op[3])
    if kind == "CPAULI":
        return (kind, shift(op[1]), op[2])
    return op  # PAULI, CCPAULI act on data only


def compose_noisy(
    prep: Circuit,
    syndrome: Circuit | None,
    inject: PauliString | None = None,
) -> Circuit:
    """prep -> depolarizing sites (or a deterministic injected error) on every
    data qubit -> syndrome extraction with bit-flip sites."""
    n_data = prep.n_data
    ops = list(prep.ops)
    if inject is not None:
        if inject.n_qubits != n_data:
            raise StabciError("injected error must act on the data register")
        ops.append(("PAULI", inject))
    else:
        ops.extend(("DEPOL", q) for q in range(n_data))
    n_anc = prep.n_ancilla
    if syndrome is not None:
        if syndrome.n_data != n_data:
            raise StabciError("syndrome circuit data width mismatch")
        ops.extend(_shift_ancillas(op, n_data, prep.n_ancilla) for op in syndrome.ops)
        n_anc += syndrome.n_ancilla
    return Circuit(n_data, n_anc, tuple(ops))


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


class _Discarded(Exception):
    pass


def _extend(p: PauliString, n_total: int) -> PauliString:
    return PauliString(n_total, p.x_bits, p.z_bits, p.i_exp)


class CliffordEngine:
    """Generator-tableau execution with exact signs."""

    def __init__(self, n_total: int):
        self.n = n_total
        self.gens: list[PauliString] = [
            single(n_total, q, "Z") for q in range(n_total)
        ]
        self.records: dict[str, int] = {}

    def _apply_gate(self, gate: tuple) -> None:
        self.gens = [_conj_gate(g, gate) for g in self.gens]

    def _apply_pauli(self, p: PauliString) -> None:
        self._apply_gate(("PAULI", p))

    def _tableau(self) -> StabilizerTableau:
        return StabilizerTableau(self.n, tuple(self.gens))

    def measure(self, q: int, rng) -> int:
        pivot = None
        for i, g in enumerate(self.gens):
            if (g.x_bits >> q) & 1:
                pivot = i
                break
        if pivot is None:
            val = expectation(self._tableau(), single(self.n, q, "Z"))
            return 0 if val == 1 else 1
        outcome = int(rng.integers(0, 2))
        gp = self.gens[pivot]
        zq = single(self.n, q, "Z", sign=-1 if outcome else 1)
        new = []
        for i, g in enumerate(self.gens):
            if i == pivot:
                new.append(zq)
            elif (g.x_bits >> q) & 1:
                new.append(g * gp)
            else:
                new.append(g)
        self.gens = new
        return outcome

    def run(self, circuit: Circuit, noise: NoiseModel, rng) -> None:
        n_data = circuit.n_data
        for op in circuit.ops:
            kind = op[0]
            if kind == "H":
                self._apply_gate(("H", op[1]))
            elif kind == "X":
                self._apply_pauli(single(self.n, op[1], "X"))
            elif kind == "CNOT":
                self._apply_gate(("CNOT", op[1], op[2]))
            elif kind == "PAULI":
                self._apply_pauli(_extend(op[1], self.n))
            elif kind == "CPAULI":
                self._apply_cpauli(op[1], _extend(op[2], self.n))
            elif kind == "DEPOL":
                if rng.random() < noise.p_depol:
                    letter = "XYZ"[rng.integers(0, 3)]
                    self._apply_pauli(single(self.n, op[1], letter))
            elif kind == "BITFLIP":
                if rng.random() < noise.bitflip():
                    self._apply_pauli(single(self.n, op[1], "X"))
            elif kind == "MEASURE":
                _, q, key, expected = op
                outcome = self.measure(q, rng)
                self.records[key] = outcome
                if expected is not None and outcome != expected:
                    raise _Discarded
            elif kind == "CCPAULI":
                _, key, p = op
                if self.records[key] == 1:
                    self._apply_pauli(_extend(p, self.n))
            elif kind == "RY":
                raise StabciError("RY is not a Clifford operation")
            else:
                raise StabciError(f"unknown op {kind!r}")

    def _apply_cpauli(self, control: int, p: PauliString) -> None:
        zc = single(self.n, control, "Z")
        out = []
        for g in self.gens:
            a = (g.x_bits >> control) & 1
            t = (
                (g.x_bits & p.z_bits).bit_count() + (g.z_bits & p.x_bits).bit_count()
            ) % 2
            r = g
            if a:
                r = r * p
            if t:
                r = r * zc
            if a and t:
                r = r.negated()
            out.append(r)
        self.gens = out

    def data_state(self, n_data: int) -> StabilizerTableau:
        """Reduce away the (measured, disentangled) ancilla register."""
        n = self.n
        # column order: ancilla X, ancilla Z, then data columns
        anc = range(n_data, n)

        def colkey(g: PauliString) -> int:
            bits = 0
            pos = 0
            for q in anc:
                bits |= ((g.x_bits >> q) & 1) << pos
                pos += 1
            for q in anc:
                bits |= ((g.z_bits >> q) & 1) << pos
                pos += 1
            bits |= (g.x_bits & ((1 << n_data) - 1)) << pos
            bits |= (g.z_bits & ((1 << n_data) - 1)) << (pos + n_data)
            return bits

        rows = [(colkey(g), g) for g in self.gens]
        reduced: list[tuple[int, int, PauliString]] = []
        for bits, g in rows:
            for piv, rb, rg in reduced:
                if (bits >> piv) & 1:
                    bits ^= rb
                    g = g * rg
            if bits == 0:
                raise StabciError("dependent generators in trajectory state")
            piv = (bits & -bits).bit_length() - 1
            out = []
            for p2, b2, g2 in reduced:
                if (b2 >> piv) & 1:
                    b2 ^= bits
                    g2 = g2 * g
                out.append((p2, b2, g2))
            reduced = out + [(piv, bits, g)]
        n_anc_cols = 2 * (n - n_data)
        data_gens = []
        mask = (1 << n_data) - 1
        for piv, bits, g in reduced:
            if piv >= n_anc_cols:
                if (g.x_bits | g.z_bits) & ~mask:
                    raise StabciError("ancilla register is entangled at readout")
                data_gens.append(PauliString(n_data, g.x_bits, g.z_bits, g.i_exp))
        if len(data_gens) != n_data:
            raise StabciError("data-register extraction failed")
        return StabilizerTableau(n_data, tuple(data_gens))


class DenseEngine:
    """Statevector over the data register plus one work ancilla; ancillas are
    simulated sequentially (measured and reset before the next appears)."""

    def __init__(self, n_data: int):
        if n_data + 1 > DENSE_QUBIT_CAP:
            raise ResourceLimitError(
                f"dense path supports n_data + 1 <= {DENSE_QUBIT_CAP} qubits"
            )
        self.n_data = n_data
        self.n = n_data + 1
        self.work = n_data
        self.dim = 1 << self.n
        self.psi = np.zeros(self.dim, dtype=complex)
        self.psi[0] = 1.0
        self.active: int | None = None
        self.records: dict[str, int] = {}
        self._idx = np.arange(self.dim)

    def _map_q(self, q: int) -> int:
        if q < self.n_data:
            return q
        if self.active is None:
            self.active = q
        elif self.active != q:
            raise StabciError("overlapping ancilla lifetimes in dense path")
        return self.work

    def _one_qubit(self, q: int, mat: np.ndarray) -> None:
        mask = 1 << q
        i0 = self._idx[(self._idx & mask) == 0]
        i1 = i0 | mask
        a, b = self.psi[i0].copy(), self.psi[i1].copy()
        self.psi[i0] = mat[0, 0] * a + mat[0, 1] * b
        self.psi[i1] = mat[1, 0] * a + mat[1, 1] * b

    def _apply_pauli(self, p: PauliString, controlled_on: int | None = None) -> None:
        idx = self._idx
        if controlled_on is not None:
            idx = idx[(idx & (1 << controlled_on)) != 0]
        zpar = np.bitwise_count(idx.astype(np.uint64) & np.uint64(p.z_bits)).astype(int) & 1
        phase = (1j ** p.i_exp) * np.where(zpar, -1.0, 1.0)
        new = self.psi.copy()
        new[idx ^ p.x_bits] = phase * self.psi[idx]
        self.psi = new

    def measure(self, q: int, rng) -> int:
        mask = 1 << q
        sel = (self._idx & mask) != 0
        p1 = float(np.sum(np.abs(self.psi[sel]) ** 2))
        outcome = 1 if rng.random() < p1 else 0
        keep = sel if outcome else ~sel
        self.psi = np.where(keep, self.psi, 0.0)
        norm = np.linalg.norm(self.psi)
        if norm < 1e-12:
            raise StabciError("measurement collapsed onto a null branch")
        self.psi /= norm
        return outcome

    def run(self, circuit: Circuit, noise: NoiseModel, rng) -> None:
        h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        for op in circuit.ops:
            kind = op[0]
            if kind == "H":
                self._one_qubit(self._map_q(op[1]), h)
            elif kind == "X":
                self._one_qubit(self._map_q(op[1]), x)
            elif kind == "RY":
                t = op[2]
                ry = np.array(
                    [
                        [math.cos(t / 2), -math.sin(t / 2)],
                        [math.sin(t / 2), math.cos(t / 2)],
                    ],
                    dtype=complex,
                )
                self._one_qubit(self._map_q(op[1]), ry)
            elif kind == "CNOT":
                c = self._map_q(op[1])
                t = self._map_q(op[2])
                cmask, tmask = 1 << c, 1 << t
                idx = self._idx[(self._idx & cmask) != 0]
                new = self.psi.copy()
                new[idx ^ tmask] = self.psi[idx]
                self.psi = new
            elif kind == "PAULI":
                self._apply_pauli(op[1])
            elif kind == "CPAULI":
                self._apply_pauli(op[2], controlled_on=self._map_q(op[1]))
            elif kind == "DEPOL":
                if rng.random() < noise.p_depol:
                    letter = "XYZ"[rng.integers(0, 3)]
                    self._apply_pauli(single(self.n_data, op[1], letter))
            elif kind == "BITFLIP":
                if rng.random() < noise.bitflip():
                    self._one_qubit(self._map_q(op[1]), x)
            elif kind == "MEASURE":
                _, q, key, expected = op
                wq = self._map_q(q)
                outcome = self.measure(wq, rng)
                self.records[key] = outcome
                if outcome == 1:  # reset the work qubit to |0>
                    self._one_qubit(wq, x)
                self.active = None
                if expected is not None and outcome != expected:
                    raise _Discarded
            elif kind == "CCPAULI":
                _, key, p = op
                if self.records[key] == 1:
                    self._apply_pauli(p)
            else:
                raise StabciError(f"unknown op {kind!r}")

    def data_vector(self) -> np.ndarray:
        sel = (self._idx & (1 << self.work)) == 0
        vec = self.psi[sel]
        norm = np.linalg.norm(vec)
        if norm < 1 - 1e-9:
            raise StabciError("work ancilla not returned to |0> before readout")
        return vec / norm


# ---------------------------------------------------------------------------
# Ideal-state descriptions and overlaps
# ---------------------------------------------------------------------------


def dense_vector(ideal, n_data: int) -> np.ndarray:
    if isinstance(ideal, np.ndarray):
        return ideal / np.linalg.norm(ideal)
    if isinstance(ideal, StabilizerTableau):
        vec = np.zeros(1 << n_data, dtype=complex)
        for key, amp in amplitudes(ideal).items():
            idx = sum(1 << q for q, c in enumerate(key) if c == "1")
            vec[idx] = amp
        return vec
    if isinstance(ideal, GeneralizedState):
        base = dense_vector(ideal.base, n_data)
        e = ideal.excitation
        moved = np.zeros_like(base)
        idx = np.arange(len(base))
        zpar = np.bitwise_count(idx.astype(np.uint64) & np.uint64(e.z_bits)).astype(int) & 1
        phase = (1j ** e.i_exp) * np.where(zpar, -1.0, 1.0)
        moved[idx ^ e.x_bits] = phase * base[idx]
        x, y = ideal.amplitudes()
        return x * base + (-1) ** (ideal.l % 2) * y * moved
    raise StabciError(f"unsupported ideal-state description {type(ideal)!r}")


def _clifford_overlap(final: StabilizerTableau, ideal: StabilizerTableau) -> float:
    vals = [expectation(final, g) for g in ideal.canonical_generators()]
    if all(v == 1 for v in vals):
        return 1.0
    if any(v == -1 for v in vals):
        return 0.0
    return overlap_squared(ideal, final)


# ---------------------------------------------------------------------------
# Trajectory driver
# ---------------------------------------------------------------------------


def run_trajectories(
    prep: Circuit,
    syndrome: Circuit | None,
    noise: NoiseModel,
    ideal,
    n_traj: int,
    seed: int,
    *,
    engine: str = "auto",
) -> SimReport:
    """Monte-Carlo noisy preparation with syndrome post-selection.

    Per-trajectory randomness comes from `default_rng([seed, index])`, so
    reports are reproducible and independent of evaluation chunking, and
    protected/unprotected runs with the same seed share error patterns.
    """
    noise.validate()
    circuit = compose_noisy(prep, syndrome)
    if engine == "auto":
        engine = "dense" if circuit.has_rotation else "clifford"
    n_total = circuit.n_data + circuit.n_ancilla

    ideal_tab = ideal if isinstance(ideal, StabilizerTableau) else None
    ideal_vec = None
    if engine == "dense":
        ideal_vec = dense_vector(ideal, circuit.n_data)
    elif ideal_tab is None:
        raise StabciError("clifford engine needs a stabilizer ideal state")

    overlaps = []
    n_kept = 0
    for t in range(n_traj):
        rng = np.random.default_rng([seed, t])
        try:
            if engine == "clifford":
                eng = CliffordEngine(n_total)
                eng.run(circuit, noise, rng)
                final = eng.data_state(circuit.n_data)
                overlaps.append(_clifford_overlap(final, ideal_tab))
            else:
                eng = DenseEngine(circuit.n_data)
                eng.run(circuit, noise, rng)
                vec = eng.data_vector()
                overlaps.append(float(abs(np.vdot(ideal_vec, vec)) ** 2))
            n_kept += 1
        except _Discarded:
            continue
    mean = float(np.mean(overlaps)) if overlaps else 0.0
    if len(overlaps) > 1:
        stderr = float(np.std(overlaps, ddof=1) / math.sqrt(len(overlaps)))
    else:
        stderr = 0.0
    return SimReport(
        n_traj=n_traj,
        n_kept=n_kept,
        discard_rate=1.0 - n_kept / n_traj if n_traj else 0.0,
        mean_overlap=mean,
        stderr=stderr,
        seed=seed,
    )


def run_deterministic(
    prep: Circuit,
    syndrome: Circuit | None,
    error: PauliString | None,
    ideal: StabilizerTableau,
    *,
    seed: int = 7,
) -> tuple[bool, float, dict[str, int]]:
    """Single noiseless trajectory with an optional injected data error;
    returns (kept, overlap, measurement records)."""
    circuit = compose_noisy(prep, syndrome, inject=error if error is not None else None)
    if error is None:
        # drop the depolarizing sites entirely
        ops = tuple(op for op in circuit.ops if op[0] != "DEPOL")
        circuit = Circuit(circuit.n_data, circuit.n_ancilla, ops)
    noise = NoiseModel(0.0, 0.0)
    rng = np.random.default_rng(seed)
    eng = CliffordEngine(circuit.n_data + circuit.n_ancilla)
    try:
        eng.run(circuit, noise, rng)
    except _Discarded:
        return False, 0.0, dict(eng.records)
    final = eng.data_state(circuit.n_data)
    return True, _clifford_overlap(final, ideal), dict(eng.records)
