"""Stabilizer-CI searches: exhaustive excitation-set enumeration, the
adaptive beam variant, and one-parameter generalized refinement.

Candidate states all have the form prod_i (I + (-1)^{l_i} E_i)/sqrt(2) |HF>
with pairwise-disjoint X-type generators E_i, which admits a closed-form
Pauli expectation; the search evaluates candidates through that fast path
and rebuilds only the winners through the tableau projection rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ExcitationNotUnbiasedError, StabciError
from .hamiltonian import (
    GeneralizedState,
    QubitHamiltonian,
    energy_stabilizer,
    optimal_theta,
)
from .pauli import PauliString, format_pauli, x_string
from .tableau import StabilizerTableau, basis_state, project_excitation


@dataclass(frozen=True)
class SinglePair:
    """One occupied -> unoccupied move within a spin sector (0-based qubits)."""

    occ_qubit: int
    vir_qubit: int
    spin: int  # 0 = alpha (even qubits), 1 = beta (odd qubits)

    def qubit_mask(self) -> int:
        return (1 << self.occ_qubit) | (1 << self.vir_qubit)


@dataclass(frozen=True)
class ExcitationSet:
    n_qubits: int
    generators: tuple[PauliString, ...]
    signs: tuple[int, ...]
    blocks: tuple[tuple[SinglePair, ...], ...] = ()

    def key(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (g.x_bits, l) for g, l in zip(self.generators, self.signs)
        )


@dataclass(frozen=True)
class SearchConfig:
    beam_width: int = 1
    accept_tol: float = 1e-10
    max_partition_blocks: int | None = None
    jobs: int = 1  # parallelism hint; evaluation is deterministic regardless


@dataclass(frozen=True)
class SearchStats:
    n_enumerated: int
    n_skipped: int
    n_distinct: int | None


@dataclass(frozen=True)
class SearchResult:
    state: StabilizerTableau
    energy: float
    excitations: ExcitationSet
    trace: tuple[tuple[PauliString, int], ...]
    reference_energy: float
    stats: SearchStats


def replay_trace(
    reference: StabilizerTableau, trace: tuple[tuple[PauliString, int], ...]
) -> StabilizerTableau:
    state = reference
    for e, l in trace:
        state = project_excitation(state, e, l)
    return state


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _spin_pairs(n_occ: int, n_vir: int, spin: int) -> list[SinglePair]:
    occ_sp = n_occ // 2
    tot_sp = (n_occ + n_vir) // 2
    return [
        SinglePair(2 * o + spin, 2 * u + spin, spin)
        for o in range(occ_sp)
        for u in range(occ_sp, tot_sp)
    ]


def _rook_selections(n_occ_sp: int, vir_range: tuple[int, int], size: int, spin: int):
    """Disjoint pair selections within one spin matrix (no shared row/column)."""
    if size == 0:
        yield ()
        return
    rows = range(n_occ_sp)
    cols = range(*vir_range)
    for occ_combo in itertools.combinations(rows, size):
        for vir_combo in itertools.combinations(cols, size):
            for perm in itertools.permutations(vir_combo):
                yield tuple(
                    SinglePair(2 * o + spin, 2 * u + spin, spin)
                    for o, u in zip(occ_combo, perm)
                )


def _set_partitions(items: tuple, max_blocks: int | None):
    """All set partitions in restricted-growth-string order."""
    n = len(items)
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, n_blocks: int):
        if i == n:
            blocks: list[list] = [[] for _ in range(n_blocks)]
            for idx, b in enumerate(rgs):
                blocks[b].append(items[idx])
            yield tuple(tuple(b) for b in blocks)
            return
        for b in range(n_blocks + 1):
            if b == n_blocks and max_blocks is not None and n_blocks + 1 > max_blocks:
                continue
            rgs[i] = b
            yield from rec(i + 1, max(n_blocks, b + 1))

    yield from rec(0, 0)


def enumerate_excitation_sets(
    n_occ: int,
    n_vir: int,
    *,
    max_partition_blocks: int | None = None,
) -> "itertools.chain[ExcitationSet]":
    """Stream of valid excitation-generator sets in deterministic order.

    For each total pair count k = 1..n_occ: every disjoint pair selection
    with the per-spin rook constraint, every set partition of the selection
    into generators, every sign assignment over the generators.
    """
    if n_occ % 2 or n_vir % 2:
        raise StabciError("open-shell systems are unsupported (odd orbital counts)")
    n_qubits = n_occ + n_vir
    occ_sp = n_occ // 2
    tot_sp = n_qubits // 2
    vir_range = (occ_sp, tot_sp)

    def gen():
        max_per_spin = min(occ_sp, tot_sp - occ_sp)
        for k in range(1, n_occ + 1):
            for k_alpha in range(max(0, k - max_per_spin), min(k, max_per_spin) + 1):
                k_beta = k - k_alpha
                if k_beta > max_per_spin:
                    continue
                for sel_a in _rook_selections(occ_sp, vir_range, k_alpha, 0):
                    for sel_b in _rook_selections(occ_sp, vir_range, k_beta, 1):
                        pairs = sel_a + sel_b
                        for blocks in _set_partitions(pairs, max_partition_blocks):
                            ordered = tuple(
                                sorted(blocks, key=lambda blk: min(p.occ_qubit for p in blk))
                            )
                            gens = []
                            for blk in ordered:
                                mask = 0
                                for p in blk:
                                    mask |= p.qubit_mask()
                                gens.append(x_string(n_qubits, mask))
                            for signs in itertools.product((0, 1), repeat=len(ordered)):
                                yield ExcitationSet(
                                    n_qubits, tuple(gens), signs, ordered
                                )

    return gen()


# ---------------------------------------------------------------------------
# Fast candidate evaluation
# ---------------------------------------------------------------------------


class CandidateEvaluator:
    """Closed-form <H> for states |psi> = prod (I + (-1)^l E)/sqrt(2) |b0>
    with pairwise-disjoint X-type generators.

    A Pauli term i^k X^x Z^z contributes iff x decomposes over the generator
    masks and every generator has even Z overlap; the value is then
    coeff * (-1)^{k/2} * (-1)^{l.w} * (-1)^{|z & b0|}.
    """

    def __init__(self, h: QubitHamiltonian, ref_bits: int):
        self.n_qubits = h.n_qubits
        self.ref_bits = ref_bits
        n_terms = len(h.terms)
        self.xs = np.zeros(n_terms, dtype=np.uint64)
        self.zs = np.zeros(n_terms, dtype=np.uint64)
        vals = np.zeros(n_terms, dtype=np.float64)
        self.k_even = np.zeros(n_terms, dtype=bool)
        for i, (coeff, p) in enumerate(h.terms):
            self.xs[i] = p.x_bits
            self.zs[i] = p.z_bits
            self.k_even[i] = p.i_exp % 2 == 0
            phase = (-1.0) ** ((p.i_exp // 2) % 2) if p.i_exp % 2 == 0 else 0.0
            base = (-1.0) ** ((p.z_bits & ref_bits).bit_count() % 2)
            vals[i] = coeff * phase * base
        self.base_vals = vals

    def energy(self, masks: tuple[int, ...], signs: tuple[int, ...]) -> float:
        valid = self.k_even.copy()
        flip = np.zeros(len(self.xs), dtype=bool)
        union = np.uint64(0)
        for mask, l in zip(masks, signs):
            m = np.uint64(mask)
            union |= m
            ov = self.xs & m
            full = ov == m
            valid &= full | (ov == np.uint64(0))
            if l:
                flip ^= full
            valid &= (np.bitwise_count(self.zs & m) & np.uint64(1)) == 0
        valid &= (self.xs & ~union) == 0
        contrib = np.where(valid, np.where(flip, -self.base_vals, self.base_vals), 0.0)
        return float(np.sum(contrib))


# ---------------------------------------------------------------------------
# Searches
# ---------------------------------------------------------------------------


def _check_reference(h: QubitHamiltonian, reference: StabilizerTableau) -> int:
    from .hamiltonian import ORDERING_TAG

    if h.meta.ordering != ORDERING_TAG:
        raise StabciError(
            f"search requires the {ORDERING_TAG!r} qubit ordering, "
            f"got {h.meta.ordering!r}"
        )
    bits = 0
    for q, g in enumerate(reference.generators):
        if g.z_bits != 1 << q or g.x_bits:
            raise StabciError("reference must be a computational basis state")
        if g.sign == -1:
            bits |= 1 << q
    expected = (1 << h.meta.n_electrons) - 1
    if bits != expected:
        raise StabciError(
            "reference occupation does not match the Hamiltonian metadata "
            f"(got {bits:#x}, expected {expected:#x})"
        )
    return bits


def _result_from_sets(
    h: QubitHamiltonian,
    reference: StabilizerTableau,
    candidates: list[ExcitationSet],
    ref_energy: float,
    stats: SearchStats,
) -> SearchResult:
    """Replay tied candidates and break ties by canonical tableau form.

    A candidate whose replay hits a biased excitation is skipped and
    counted, never fatal."""
    best = None
    n_skipped = stats.n_skipped
    for exc in candidates:
        trace = tuple(zip(exc.generators, exc.signs))
        try:
            state = replay_trace(reference, trace)
        except ExcitationNotUnbiasedError:
            n_skipped += 1
            continue
        key = state.canonical_form()
        if best is None or key < best[0]:
            best = (key, state, exc, trace)
    stats = SearchStats(stats.n_enumerated, n_skipped, stats.n_distinct)
    if best is None:
        empty = ExcitationSet(h.n_qubits, (), ())
        return SearchResult(
            reference, ref_energy, empty, (), ref_energy, stats
        )
    _, state, exc, trace = best
    return SearchResult(
        state, energy_stabilizer(h, state), exc, trace, ref_energy, stats
    )


def full_sci(
    h: QubitHamiltonian,
    reference: StabilizerTableau,
    config: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Exhaustive search over valid excitation sets; lowest energy wins,
    ties broken by lexicographically smallest canonical tableau."""
    ref_bits = _check_reference(h, reference)
    n_occ = h.meta.n_electrons
    n_vir = h.n_qubits - n_occ
    ev = CandidateEvaluator(h, ref_bits)

    best_e = ev.energy((), ())
    best_sets: list[ExcitationSet] = [ExcitationSet(h.n_qubits, (), ())]
    improved = False
    n_enumerated = 0
    n_skipped = 0
    seen: set[frozenset] = set()
    for exc in enumerate_excitation_sets(
        n_occ, n_vir, max_partition_blocks=config.max_partition_blocks
    ):
        n_enumerated += 1
        key = exc.key()
        if key in seen:
            continue
        seen.add(key)
        e = ev.energy(tuple(g.x_bits for g in exc.generators), exc.signs)
        if e < best_e:
            best_e = e
            best_sets = [exc]
            improved = True
        elif e == best_e and improved:
            # exact ties below the reference collect for the canonical tie-break;
            # the reference itself wins ties at its own energy
            best_sets.append(exc)
    stats = SearchStats(n_enumerated, n_skipped, len(seen) + 1)
    ref_energy = energy_stabilizer(h, reference)
    return _result_from_sets(h, reference, best_sets, ref_energy, stats)


def _available_doubles(
    remaining_occ: set[int], remaining_vir: set[int]
) -> list[tuple[SinglePair, SinglePair]]:
    """All valid double-excitation generators over the remaining spin orbitals."""
    singles = []
    for o in sorted(remaining_occ):
        for u in sorted(remaining_vir):
            if o % 2 == u % 2:
                singles.append(SinglePair(o, u, o % 2))
    doubles = []
    for i, p1 in enumerate(singles):
        for p2 in singles[i + 1 :]:
            if p1.qubit_mask() & p2.qubit_mask():
                continue
            doubles.append((p1, p2))
    return doubles


@dataclass(frozen=True)
class _BeamEntry:
    energy: float
    masks: tuple[int, ...]
    signs: tuple[int, ...]
    remaining_occ: frozenset[int]
    remaining_vir: frozenset[int]

    def key(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.masks, self.signs))


def adaptive_sci(
    h: QubitHamiltonian,
    reference: StabilizerTableau,
    config: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Iterative double-excitation search with greedy orbital retirement,
    merged one-level candidates, and a fixed-width beam."""
    ref_bits = _check_reference(h, reference)
    n_occ = h.meta.n_electrons
    ev = CandidateEvaluator(h, ref_bits)
    ref_energy_fast = ev.energy((), ())

    start = _BeamEntry(
        ref_energy_fast,
        (),
        (),
        frozenset(range(n_occ)),
        frozenset(range(n_occ, h.n_qubits)),
    )
    beam = [start]
    best = start
    n_enumerated = 0
    while True:
        candidates: dict[frozenset, _BeamEntry] = {}
        for entry in beam:
            doubles = _available_doubles(set(entry.remaining_occ), set(entry.remaining_vir))
            for p1, p2 in doubles:
                dmask = p1.qubit_mask() | p2.qubit_mask()
                rem_occ = entry.remaining_occ - {p1.occ_qubit, p2.occ_qubit}
                rem_vir = entry.remaining_vir - {p1.vir_qubit, p2.vir_qubit}
                variants = [(entry.masks + (dmask,), None)]
                if entry.masks:
                    merged = entry.masks[:-1] + (entry.masks[-1] | dmask,)
                    variants.append((merged, None))
                for masks, _ in variants:
                    for l in (0, 1):
                        signs = entry.signs[: len(masks) - 1] + (l,)
                        n_enumerated += 1
                        e = ev.energy(masks, signs)
                        if e < entry.energy - config.accept_tol:
                            cand = _BeamEntry(e, masks, signs, rem_occ, rem_vir)
                            key = cand.key()
                            prev = candidates.get(key)
                            if prev is None or e < prev.energy:
                                candidates[key] = cand
        if not candidates:
            break
        ranked = sorted(
            candidates.values(), key=lambda c: (c.energy, sorted(c.key()))
        )
        beam = ranked[: max(1, config.beam_width)]
        if beam[0].energy < best.energy:
            best = beam[0]
        if not any(entry.remaining_occ for entry in beam):
            break

    stats = SearchStats(n_enumerated, 0, None)
    n = h.n_qubits
    gens = tuple(x_string(n, m) for m in best.masks)
    exc = ExcitationSet(n, gens, best.signs)
    trace = tuple(zip(gens, best.signs))
    state = replay_trace(reference, trace)
    ref_energy = energy_stabilizer(h, reference)
    return SearchResult(state, energy_stabilizer(h, state), exc, trace, ref_energy, stats)


# ---------------------------------------------------------------------------
# Generalized refinement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefineResult:
    generalized: GeneralizedState | None
    energy: float
    refined: bool
    base_result: SearchResult


def generalized_refine(h: QubitHamiltonian, result: SearchResult) -> RefineResult:
    """Free the amplitude of the final excitation.

    With a nonempty trace this optimizes theta for the last applied
    excitation.  When the search returned the bare reference, the best
    single-generator excitation family is scanned instead (theta = 0
    recovers the reference, so the energy can only improve).
    """
    if result.trace:
        base = replay_trace(
            _reference_of(h, result), result.trace[:-1]
        )
        e_last, l_last = result.trace[-1]
        theta, energy = optimal_theta(h, base, e_last, l_last)
        g = GeneralizedState(base, e_last, l_last, theta)
        return RefineResult(g, energy, True, result)

    reference = result.state
    n_occ = h.meta.n_electrons
    n_vir = h.n_qubits - n_occ
    best: tuple[float, str, GeneralizedState] | None = None
    for exc in enumerate_excitation_sets(n_occ, n_vir, max_partition_blocks=1):
        e = exc.generators[0]
        theta, energy = optimal_theta(h, reference, e, 0)
        key = format_pauli(e)
        if best is None or (energy, key) < (best[0], best[1]):
            best = (energy, key, GeneralizedState(reference, e, 0, theta))
    if best is None:
        return RefineResult(None, result.energy, False, result)
    return RefineResult(best[2], best[0], True, result)


def _reference_of(h: QubitHamiltonian, result: SearchResult) -> StabilizerTableau:
    bits = (1 << h.meta.n_electrons) - 1
    return basis_state(bits, h.n_qubits)
