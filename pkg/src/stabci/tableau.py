"""Pure stabilizer states as generator tableaus.

A state is held as n independent, mutually commuting Hermitian Pauli
generators with exact sign tracking.  All operations are value-semantic:
they return new tableaus and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import (
    DimensionError,
    ExcitationNotUnbiasedError,
    NotHermitianError,
    ResourceLimitError,
    StabciError,
)
from .pauli import PauliString, identity, single, x_string, z_string

Gate = tuple  # ("H", q) | ("S", q) | ("CNOT", c, t) | ("PAULI", PauliString)


# ---------------------------------------------------------------------------
# Clifford circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list; the circuit unitary is the gates applied in order."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        for g in self.gates:
            kind = g[0]
            if kind in ("H", "S"):
                if not 0 <= g[1] < self.n_qubits:
                    raise DimensionError(f"{kind} qubit {g[1]} out of range")
            elif kind == "CNOT":
                c, t = g[1], g[2]
                if not (0 <= c < self.n_qubits and 0 <= t < self.n_qubits):
                    raise DimensionError(f"CNOT ({c},{t}) out of range")
                if c == t:
                    raise DimensionError("CNOT control equals target")
            elif kind == "PAULI":
                if g[1].n_qubits != self.n_qubits:
                    raise DimensionError("Pauli gate qubit count mismatch")
            else:
                raise StabciError(f"unknown gate {kind!r}")

    def then(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if self.n_qubits != other.n_qubits:
            raise DimensionError("circuit composition across qubit counts")
        return CliffordCircuit(self.n_qubits, self.gates + other.gates)

    def inverse(self) -> "CliffordCircuit":
        inv: list[Gate] = []
        for g in reversed(self.gates):
            if g[0] == "S":
                inv.extend([g, g, g])  # S^-1 = S^3
            else:
                inv.append(g)  # H, CNOT, Hermitian Pauli are self-inverse
        return CliffordCircuit(self.n_qubits, tuple(inv))

    def is_single_qubit_only(self) -> bool:
        return all(g[0] in ("H", "S") for g in self.gates)


def _conj_gate(p: PauliString, gate: Gate) -> PauliString:
    """Map P to U P U^dagger for a single gate with exact phase tracking."""
    n, x, z, k = p.n_qubits, p.x_bits, p.z_bits, p.i_exp
    kind = gate[0]
    if kind == "H":
        q = gate[1]
        bx, bz = (x >> q) & 1, (z >> q) & 1
        if bx and bz:
            k += 2
        if bx != bz:
            x ^= 1 << q
            z ^= 1 << q
        return PauliString(n, x, z, k)
    if kind == "S":
        q = gate[1]
        if (x >> q) & 1:
            k += 1
            z ^= 1 << q
        return PauliString(n, x, z, k)
    if kind == "CNOT":
        # X_c -> X_c X_t, Z_t -> Z_c Z_t; in the i^k X^x Z^z convention the
        # reordering never swaps a same-qubit X past a Z, so k is unchanged.
        c, t = gate[1], gate[2]
        if (x >> c) & 1:
            x ^= 1 << t
        if (z >> t) & 1:
            z ^= 1 << c
        return PauliString(n, x, z, k)
    if kind == "PAULI":
        q: PauliString = gate[1]
        if not p.commutes_with(q):
            k += 2
        return PauliString(n, x, z, k)
    raise StabciError(f"unknown gate {kind!r}")


def conjugate_pauli(circuit: CliffordCircuit, p: PauliString) -> PauliString:
    """Return C P C^dagger for the circuit unitary C."""
    if circuit.n_qubits != p.n_qubits:
        raise DimensionError("circuit and Pauli qubit counts differ")
    for g in circuit.gates:
        p = _conj_gate(p, g)
    return p


# ---------------------------------------------------------------------------
# Tableaus
# ---------------------------------------------------------------------------


def _combined(p: PauliString) -> int:
    """2n-bit row vector: X block in low bits, Z block above (columns by qubit)."""
    return p.x_bits | (p.z_bits << p.n_qubits)


@dataclass(frozen=True)
class StabilizerTableau:
    n_qubits: int
    generators: tuple[PauliString, ...]

    def validate(self) -> "StabilizerTableau":
        if len(self.generators) != self.n_qubits:
            raise StabciError("tableau needs exactly n generators")
        for g in self.generators:
            if g.n_qubits != self.n_qubits:
                raise DimensionError("generator qubit count mismatch")
            if not g.is_hermitian:
                raise NotHermitianError(f"generator {g!r} is not Hermitian")
            g.sign  # must be well defined
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1 :]:
                if not g.commutes_with(h):
                    raise StabciError("generators do not commute")
        rows = [_combined(g) for g in self.generators]
        if _gf2_rank(rows) != self.n_qubits:
            raise StabciError("generators are not independent")
        return self

    @cached_property
    def _echelon(self) -> tuple[tuple[int, int, PauliString], ...]:
        """Reduced row echelon over GF(2) with exact accumulated products.

        Rows are (pivot_bit, combined_bits, pauli) sorted by pivot; pivots are
        the lowest set bit with the X block ordered before the Z block.
        """
        rows: list[tuple[int, PauliString]] = [(_combined(g), g) for g in self.generators]
        reduced: list[tuple[int, int, PauliString]] = []
        for bits, pauli in rows:
            for piv, rbits, rp in reduced:
                if (bits >> piv) & 1:
                    bits ^= rbits
                    pauli = pauli * rp
            if bits == 0:
                raise StabciError("dependent generator set")
            piv = (bits & -bits).bit_length() - 1
            reduced.append((piv, bits, pauli))
            # keep earlier rows fully reduced
            out = []
            for p2, b2, g2 in reduced[:-1]:
                if (b2 >> piv) & 1:
                    b2 ^= bits
                    g2 = g2 * pauli
                out.append((p2, b2, g2))
            reduced = out + [reduced[-1]]
        reduced.sort(key=lambda r: r[0])
        return tuple(reduced)

    def canonical_form(self) -> tuple[tuple[int, int], ...]:
        """Deterministic key: ((combined_bits, i_exp), ...) of the reduced echelon."""
        return tuple((bits, g.i_exp) for _, bits, g in self._echelon)

    def canonical_generators(self) -> tuple[PauliString, ...]:
        return tuple(g for _, _, g in self._echelon)

    def same_state(self, other: "StabilizerTableau") -> bool:
        return self.canonical_form() == other.canonical_form()


def tableau(generators: list[PauliString] | tuple[PauliString, ...]) -> StabilizerTableau:
    gens = tuple(generators)
    return StabilizerTableau(gens[0].n_qubits, gens).validate()


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
            rank += 1
    return rank


def basis_state(bits: int | str, n_qubits: int | None = None) -> StabilizerTableau:
    """Computational basis state; bits may be an int mask or a '1100' string
    with qubit 1 leftmost."""
    if isinstance(bits, str):
        n = len(bits)
        mask = 0
        for i, c in enumerate(bits):
            if c == "1":
                mask |= 1 << i
            elif c != "0":
                raise StabciError(f"bad bit {c!r}")
        bits = mask
    else:
        if n_qubits is None:
            raise StabciError("integer bits need an explicit n_qubits")
        n = n_qubits
    gens = [single(n, q, "Z", sign=-1 if (bits >> q) & 1 else 1) for q in range(n)]
    return StabilizerTableau(n, tuple(gens))


def bits_to_string(bits: int, n: int) -> str:
    return "".join("1" if (bits >> q) & 1 else "0" for q in range(n))


def apply_clifford(state: StabilizerTableau, circuit: CliffordCircuit) -> StabilizerTableau:
    if circuit.n_qubits != state.n_qubits:
        raise DimensionError("circuit and state qubit counts differ")
    return StabilizerTableau(
        state.n_qubits, tuple(conjugate_pauli(circuit, g) for g in state.generators)
    )


def expectation(state: StabilizerTableau, p: PauliString) -> int:
    """<P> for a Hermitian Pauli: 0, +1 or -1, exactly."""
    if p.n_qubits != state.n_qubits:
        raise DimensionError("observable qubit count mismatch")
    if not p.is_hermitian:
        raise NotHermitianError(f"{p!r} is not Hermitian")
    for g in state.generators:
        if not g.commutes_with(p):
            return 0
    acc = identity(state.n_qubits)
    v = _combined(p)
    for piv, bits, pauli in state._echelon:
        if (v >> piv) & 1:
            v ^= bits
            acc = acc * pauli
    if v != 0:
        raise StabciError("commuting Pauli outside the stabilizer span (invalid tableau)")
    d = (p.i_exp - acc.i_exp) % 4
    if d == 0:
        return 1
    if d == 2:
        return -1
    raise StabciError("phase mismatch is not real (invalid tableau)")


def project_excitation(state: StabilizerTableau, e: PauliString, l: int) -> StabilizerTableau:
    """Tableau of (I + (-1)^l E)|psi>/sqrt(2) via the measurement-update rule."""
    if l not in (0, 1):
        raise StabciError(f"l must be 0 or 1, got {l}")
    if not e.is_hermitian:
        raise NotHermitianError("excitation operator must be Hermitian")
    if e.n_qubits != state.n_qubits:
        raise DimensionError("excitation qubit count mismatch")
    pivot = None
    for i, g in enumerate(state.generators):
        if not g.commutes_with(e):
            pivot = i
            break
    if pivot is None:
        raise ExcitationNotUnbiasedError(
            f"<E> = {expectation(state, e)} != 0; the superposition is not a stabilizer state"
        )
    gp = state.generators[pivot]
    new_gens = []
    for i, g in enumerate(state.generators):
        if i == pivot:
            new_gens.append(e if l == 0 else e.negated())
        elif g.commutes_with(e):
            new_gens.append(g)
        else:
            new_gens.append(g * gp)
    return StabilizerTableau(state.n_qubits, tuple(new_gens))


@dataclass(frozen=True)
class BasisImage:
    """i^m |b> for a bit mask b."""

    n_qubits: int
    bits: int
    i_exp: int


def pauli_on_zero(p: PauliString) -> BasisImage:
    """P|0...0> as a basis image (Z factors act trivially on |0>)."""
    return BasisImage(p.n_qubits, p.x_bits, p.i_exp % 4)


def sum_stabilizers(
    c_i: CliffordCircuit, e: PauliString, l: int
) -> tuple[list[PauliString], CliffordCircuit]:
    """Generators of (I + (-1)^l E)|psi_i>/sqrt(2) built from the basis-frame
    decomposition, plus the circuit mapping the new state to |0...0>.

    ``c_i`` must map the current state |psi_i> to |0...0>.
    """
    if not e.is_hermitian:
        raise NotHermitianError("excitation operator must be Hermitian")
    n = e.n_qubits
    e_prime = conjugate_pauli(c_i, e)
    img = pauli_on_zero(e_prime)
    if img.bits == 0:
        raise ExcitationNotUnbiasedError("E maps the state to itself up to phase")
    support = [q for q in range(n) if (img.bits >> q) & 1]
    t_full = (2 * l + img.i_exp) % 4
    t = t_full % 2

    frame_gens: list[PauliString] = []
    for q in range(n):
        if not (img.bits >> q) & 1:
            frame_gens.append(single(n, q, "Z"))
    if t == 0:
        head = x_string(n, img.bits)
        if t_full == 2:
            head = head.negated()
    else:
        ybits = img.bits
        k = len(support) % 4  # each Y contributes i
        if t_full == 3:
            k += 2
        head = PauliString(n, ybits, ybits, k)
    frame_gens.append(head)
    for a, b in zip(support, support[1:]):
        frame_gens.append(z_string(n, (1 << a) | (1 << b)))

    inv = c_i.inverse()
    gens = [conjugate_pauli(inv, g) for g in frame_gens]

    q1 = support[0]
    ghz_gates: list[Gate] = [("CNOT", q1, q) for q in support[1:]]
    ghz_gates.extend([("S", q1)] * ((-t_full) % 4))
    ghz_gates.append(("H", q1))
    c_next = c_i.then(CliffordCircuit(n, tuple(ghz_gates)))
    return gens, c_next


def circuit_to_zero(bits: int, n: int) -> CliffordCircuit:
    """Circuit mapping |bits> to |0...0> (X on each set bit)."""
    if bits == 0:
        return CliffordCircuit(n, ())
    return CliffordCircuit(n, (("PAULI", x_string(n, bits)),))


# ---------------------------------------------------------------------------
# Graph-state standard form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphForm:
    """Standard form: generator v is sign[v] * X_v Z_{N(v)}."""

    n_qubits: int
    adjacency: tuple[int, ...]  # row bit masks, symmetric, zero diagonal
    local_clifford: CliffordCircuit  # maps the input state to the graph state
    signs: tuple[int, ...]

    def generator(self, v: int) -> PauliString:
        n = self.n_qubits
        return PauliString(
            n, 1 << v, self.adjacency[v], 0 if self.signs[v] == 1 else 2
        )

    def generators(self) -> tuple[PauliString, ...]:
        return tuple(self.generator(v) for v in range(self.n_qubits))


def _x_echelon(rows: list[PauliString]) -> tuple[list[PauliString], list[int]]:
    """Full reduced echelon on the X block only; returns rows + pivot columns."""
    rows = list(rows)
    pivots: list[int] = []
    r = 0
    n = rows[0].n_qubits
    for col in range(n):
        piv = None
        for i in range(r, len(rows)):
            if (rows[i].x_bits >> col) & 1:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and (rows[i].x_bits >> col) & 1:
                rows[i] = rows[i] * rows[r]
        pivots.append(col)
        r += 1
    return rows, pivots


def to_standard_form(state: StabilizerTableau) -> GraphForm:
    """Reduce to +-X_v Z_{N(v)} form with a single-qubit Clifford record."""
    n = state.n_qubits
    gens = list(state.generators)
    gates: list[Gate] = []

    # Phase A: make the X block invertible, adding H on a free column of a
    # pure-Z row whenever the rank is deficient.
    while True:
        gens, pivots = _x_echelon(gens)
        if len(pivots) == n:
            break
        pure_z = next(g for g in gens if g.x_bits == 0)
        pivot_mask = 0
        for c in pivots:
            pivot_mask |= 1 << c
        free = pure_z.z_bits & ~pivot_mask
        if free == 0:
            raise StabciError("graph reduction failed: no free column (invalid tableau)")
        q = (free & -free).bit_length() - 1
        gate: Gate = ("H", q)
        gens = [_conj_gate(g, gate) for g in gens]
        gates.append(gate)

    # Phase B: X block to identity (rows already in reduced echelon with
    # pivots on every column, so row i has X exactly on qubit i).
    order = sorted(range(n), key=lambda i: (gens[i].x_bits & -gens[i].x_bits))
    gens = [gens[i] for i in order]

    # Phase C: clear Y diagonals with S.
    for v in range(n):
        if (gens[v].z_bits >> v) & 1:
            gate = ("S", v)
            gens = [_conj_gate(g, gate) for g in gens]
            gates.append(gate)

    adjacency = []
    signs = []
    for v, g in enumerate(gens):
        if g.x_bits != 1 << v or (g.z_bits >> v) & 1:
            raise StabciError("graph reduction failed to reach standard form")
        adjacency.append(g.z_bits)
        signs.append(g.sign)
    for v in range(n):
        for w in range(v + 1, n):
            if ((adjacency[v] >> w) & 1) != ((adjacency[w] >> v) & 1):
                raise StabciError("graph adjacency is not symmetric (invalid tableau)")
    return GraphForm(
        n, tuple(adjacency), CliffordCircuit(n, tuple(gates)), tuple(signs)
    )


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------


def amplitudes(
    state: StabilizerTableau,
    *,
    max_qubits: int = 36,
    max_support: int = 1 << 20,
) -> dict[str, float | complex]:
    """Exact amplitudes over the affine support, keyed by bit strings.

    The global phase is fixed so the lexicographically smallest supported
    bit string has a positive real amplitude.
    """
    n = state.n_qubits
    if n > max_qubits:
        raise ResourceLimitError(f"amplitudes limited to {max_qubits} qubits, got {n}")

    x_rows: list[PauliString] = []
    z_rows: list[PauliString] = []
    for _, _, g in state._echelon:
        (x_rows if g.x_bits else z_rows).append(g)
    r = len(x_rows)
    if 1 << r > max_support:
        raise ResourceLimitError(f"support 2^{r} exceeds cap {max_support}")

    # Base point b0: solve the Z-only sign constraints parity(z & b) = (1-sign)/2.
    b0 = _solve_z_constraints(z_rows, n)

    # Closure over the X-row span with exact i^m phases:
    # g|psi> = |psi| with g = i^k X^x Z^z forces amp(b^x) = i^k (-1)^{z.b} amp(b).
    amp_exp: dict[int, int] = {b0: 0}
    changed = True
    while changed and len(amp_exp) < (1 << r):
        changed = False
        for g in x_rows:
            for b, m in list(amp_exp.items()):
                b2 = b ^ g.x_bits
                if b2 not in amp_exp:
                    m2 = (m + g.i_exp + 2 * ((g.z_bits & b).bit_count() % 2)) % 4
                    amp_exp[b2] = m2
                    changed = True
    if len(amp_exp) != 1 << r:
        raise StabciError("support enumeration incomplete (invalid tableau)")

    gauge = min(amp_exp, key=lambda b: bits_to_string(b, n))
    shift = amp_exp[gauge]
    mag = 2 ** (-r / 2)
    out: dict[str, float | complex] = {}
    all_real = True
    vals: dict[str, complex] = {}
    for b, m in amp_exp.items():
        mm = (m - shift) % 4
        val = (1j ** mm) * mag
        if mm % 2 == 1:
            all_real = False
        vals[bits_to_string(b, n)] = val
    for k, v in vals.items():
        out[k] = v.real if all_real else v
    return out


def _solve_z_constraints(z_rows: list[PauliString], n: int) -> int:
    rows = [(g.z_bits, 0 if g.sign == 1 else 1) for g in z_rows]
    sol = 0
    used: list[tuple[int, int, int]] = []  # pivot, mask, rhs
    for mask, rhs in rows:
        for piv, m2, r2 in used:
            if (mask >> piv) & 1:
                mask ^= m2
                rhs ^= r2
        if mask == 0:
            if rhs:
                raise StabciError("inconsistent Z constraints")
            continue
        piv = (mask & -mask).bit_length() - 1
        used.append((piv, mask, rhs))
    for piv, mask, rhs in reversed(used):
        cur = (mask & sol).bit_count() % 2
        if cur != rhs:
            sol ^= 1 << piv
    return sol


def overlap_squared(a: StabilizerTableau, b: StabilizerTableau) -> float:
    """|<a|b>|^2 for stabilizer states (exact, via generator expectations with
    an amplitude fallback for the mixed 0/+-1 case)."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("overlap across qubit counts")
    vals = [expectation(b, g) for g in a.canonical_generators()]
    if any(v == -1 for v in vals):
        # a group element with expectation -1 exists among the generators
        return 0.0
    if all(v == 1 for v in vals):
        return 1.0
    amp_a = amplitudes(a)
    amp_b = amplitudes(b)
    inner = 0j
    for key, va in amp_a.items():
        vb = amp_b.get(key)
        if vb is not None:
            inner += complex(va).conjugate() * complex(vb)
    return abs(inner) ** 2
