"""Distance-2 error-detection codes derived from stabilizer states.

Pipeline: graph-state standard form -> weight-1 error characterization
table -> word-operator search -> equivalent [[n,1]] stabilizer code,
reported in the original qubit frame.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DimensionError, StabciError, WordOperatorError
from .pauli import PauliString, format_pauli, parse_pauli, single, z_string
from .tableau import (
    CliffordCircuit,
    GraphForm,
    StabilizerTableau,
    conjugate_pauli,
    expectation,
    to_standard_form,
)


@dataclass(frozen=True)
class ErrorTable:
    """Equivalent Z-string (bit mask) for each weight-1 error in the
    standard frame: X_q ~ Z_{N(q)}, Y_q ~ Z_q Z_{N(q)}, Z_q ~ Z_q."""

    n_qubits: int
    x_class: tuple[int, ...]
    y_class: tuple[int, ...]
    z_class: tuple[int, ...]

    def entries(self) -> set[int]:
        return set(self.x_class) | set(self.y_class) | set(self.z_class)


def build_error_table(graph: GraphForm) -> ErrorTable:
    n = graph.n_qubits
    x_rows = tuple(graph.adjacency[q] for q in range(n))
    y_rows = tuple(graph.adjacency[q] ^ (1 << q) for q in range(n))
    z_rows = tuple(1 << q for q in range(n))
    return ErrorTable(n, x_rows, y_rows, z_rows)


def _iter_word_candidates(table: ErrorTable, weight_cap: int):
    """Nonidentity Z-strings absent from the table, ordered by weight, then
    uniform index parity before mixed, then lexicographic support."""
    n = table.n_qubits
    present = table.entries()
    for weight in range(1, weight_cap + 1):
        buckets: list[list[int]] = [[], []]
        for combo in itertools.combinations(range(n), weight):
            mask = 0
            for q in combo:
                mask |= 1 << q
            if mask in present:
                continue
            uniform = len({q % 2 for q in combo}) == 1
            buckets[0 if uniform else 1].append(mask)
        for bucket in buckets:
            yield from bucket


def find_word_operator(
    table: ErrorTable,
    *,
    weight_cap: int | None = None,
    accept=None,
) -> PauliString:
    """First admissible word operator; `accept` may reject candidates whose
    assembled code fails distance verification."""
    cap = weight_cap if weight_cap is not None else table.n_qubits
    tried = 0
    for mask in _iter_word_candidates(table, cap):
        tried += 1
        w = z_string(table.n_qubits, mask)
        if accept is None or accept(w):
            return w
    raise WordOperatorError(
        f"no word operator found up to weight {cap} "
        f"({tried} table-absent candidates rejected)"
    )


@dataclass(frozen=True)
class StabilizerCode:
    n_qubits: int
    generators: tuple[PauliString, ...]  # n-1 signed generators
    logical_x: PauliString
    logical_z: PauliString
    frame: str  # "original" | "standard"

    def validate(self) -> "StabilizerCode":
        if len(self.generators) != self.n_qubits - 1:
            raise StabciError("[[n,1]] code needs n-1 generators")
        for i, g in enumerate(self.generators):
            if not g.is_hermitian:
                raise StabciError("non-Hermitian code generator")
            for h in self.generators[i + 1 :]:
                if not g.commutes_with(h):
                    raise StabciError("code generators do not commute")
            if not self.logical_x.commutes_with(g) or not self.logical_z.commutes_with(g):
                raise StabciError("logical operator fails to commute with the group")
        if self.logical_x.commutes_with(self.logical_z):
            raise StabciError("logical pair must anticommute")
        rows = [g.x_bits | (g.z_bits << self.n_qubits) for g in self.generators]
        if _rank(rows) != self.n_qubits - 1:
            raise StabciError("code generators are dependent")
        return self


def _rank(rows):
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    return len(basis)


@dataclass(frozen=True)
class CwsSpec:
    """Standard-frame description: graph stabilizers plus word operators
    {I, w}; w is a nonidentity Z-string outside the error table."""

    graph: GraphForm
    word_operator: PauliString


@dataclass(frozen=True)
class CodeBuild:
    code: StabilizerCode  # original frame
    code_standard: StabilizerCode
    cws: CwsSpec
    table: ErrorTable


def _assemble_standard(graph: GraphForm, w: PauliString) -> StabilizerCode:
    n = graph.n_qubits
    gens = list(graph.generators())
    support = w.z_bits
    s_idx = None
    for v in range(n):
        if (support >> v) & 1:
            s_idx = v
            break
    if s_idx is None:
        raise StabciError("word operator is the identity")
    s = gens[s_idx]
    out = []
    for v in range(n):
        if v == s_idx:
            continue
        g = gens[v]
        if (support >> v) & 1:
            g = g * s
        out.append(g)
    return StabilizerCode(n, tuple(out), w, s, "standard").validate()


def _conjugate_code(code: StabilizerCode, circuit: CliffordCircuit, frame: str) -> StabilizerCode:
    return StabilizerCode(
        code.n_qubits,
        tuple(conjugate_pauli(circuit, g) for g in code.generators),
        conjugate_pauli(circuit, code.logical_x),
        conjugate_pauli(circuit, code.logical_z),
        frame,
    )


def build_code_detailed(
    state: StabilizerTableau, *, weight_cap: int | None = None
) -> CodeBuild:
    if state.n_qubits <= 3:
        raise StabciError("word operators exist only for n > 3")
    graph = to_standard_form(state)
    table = build_error_table(graph)

    def accept(w: PauliString) -> bool:
        code_std = _assemble_standard(graph, w)
        return verify_distance(code_std).passed

    w = find_word_operator(table, weight_cap=weight_cap, accept=accept)
    code_std = _assemble_standard(graph, w)
    inverse = graph.local_clifford.inverse()
    code = _conjugate_code(code_std, inverse, "original").validate()
    build = CodeBuild(code, code_std, CwsSpec(graph, w), table)
    if not codespace_contains(code, state):
        raise StabciError("constructed code does not contain the input state")
    return build


def build_code(state: StabilizerTableau, *, weight_cap: int | None = None) -> StabilizerCode:
    return build_code_detailed(state, weight_cap=weight_cap).code


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorVerdict:
    qubit: int  # 0-based
    kind: str  # "X" | "Y" | "Z"
    classification: str  # "detected" | "stabilizer" | "logical"


@dataclass(frozen=True)
class DistanceReport:
    n_qubits: int
    verdicts: tuple[ErrorVerdict, ...]
    passed: bool

    def undetectable(self) -> tuple[ErrorVerdict, ...]:
        return tuple(v for v in self.verdicts if v.classification == "logical")


def _in_group(code: StabilizerCode, p: PauliString) -> bool:
    """Membership of +-p in the generator group (bit-space reduction)."""
    rows = [g.x_bits | (g.z_bits << code.n_qubits) for g in code.generators]
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    v = p.x_bits | (p.z_bits << code.n_qubits)
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


def canonical_group(paulis: tuple[PauliString, ...] | list[PauliString]):
    """Sign-tracking reduced echelon form of an arbitrary commuting
    generator list: deterministic key for group equality."""
    reduced: list[tuple[int, int, PauliString]] = []
    for g in paulis:
        n = g.n_qubits
        bits = g.x_bits | (g.z_bits << n)
        pauli = g
        for piv, rbits, rp in reduced:
            if (bits >> piv) & 1:
                bits ^= rbits
                pauli = pauli * rp
        if bits == 0:
            if pauli.i_exp % 4 != 0:
                raise StabciError("generator set contains -identity")
            continue
        piv = (bits & -bits).bit_length() - 1
        out = []
        for p2, b2, g2 in reduced:
            if (b2 >> piv) & 1:
                b2 ^= bits
                g2 = g2 * pauli
            out.append((p2, b2, g2))
        reduced = out + [(piv, bits, pauli)]
    reduced.sort(key=lambda r: r[0])
    return tuple((bits, g.i_exp) for _, bits, g in reduced)


def verify_distance(code: StabilizerCode) -> DistanceReport:
    """Classify all 3n weight-1 Paulis; passes iff none is a logical."""
    verdicts = []
    ok = True
    for q in range(code.n_qubits):
        for kind in "XYZ":
            err = single(code.n_qubits, q, kind)
            if any(not g.commutes_with(err) for g in code.generators):
                verdicts.append(ErrorVerdict(q, kind, "detected"))
            elif _in_group(code, err):
                verdicts.append(ErrorVerdict(q, kind, "stabilizer"))
            else:
                verdicts.append(ErrorVerdict(q, kind, "logical"))
                ok = False
    return DistanceReport(code.n_qubits, tuple(verdicts), ok)


def codespace_contains(code: StabilizerCode, state: StabilizerTableau) -> bool:
    if code.n_qubits != state.n_qubits:
        raise DimensionError("code and state qubit counts differ")
    return all(expectation(state, g) == 1 for g in code.generators)


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------


def code_to_dict(build: CodeBuild) -> dict:
    code = build.code
    report = verify_distance(code)
    return {
        "n": code.n_qubits,
        "frame": code.frame,
        "stabilizers": [format_pauli(g) for g in code.generators],
        "logical_x": format_pauli(code.logical_x),
        "logical_z": format_pauli(code.logical_z),
        "word_operator": format_pauli(build.cws.word_operator),
        "distance_report": {
            "passed": report.passed,
            "undetectable": [
                f"{v.kind}{v.qubit + 1}" for v in report.undetectable()
            ],
            "n_detected": sum(1 for v in report.verdicts if v.classification == "detected"),
            "n_stabilizer": sum(
                1 for v in report.verdicts if v.classification == "stabilizer"
            ),
        },
    }


def code_from_dict(doc: dict) -> StabilizerCode:
    n = doc["n"]
    gens = tuple(parse_pauli(s, n) for s in doc["stabilizers"])
    return StabilizerCode(
        n,
        gens,
        parse_pauli(doc["logical_x"], n),
        parse_pauli(doc["logical_z"], n),
        doc.get("frame", "original"),
    ).validate()


def save_code(build: CodeBuild, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code_to_dict(build), indent=1) + "\n")
