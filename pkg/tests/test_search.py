import itertools
from pathlib import Path

import numpy as np
import pytest

from stabci.errors import StabciError
from stabci.hamiltonian import (
    MoleculeMeta,
    ORDERING_TAG,
    brute_force_ground,
    energy_stabilizer,
    hamiltonian_from_terms,
    hf_state_for,
    load_hamiltonian,
)
from stabci.pauli import PauliString, format_pauli, parse_pauli
from stabci.search import (
    CandidateEvaluator,
    SearchConfig,
    adaptive_sci,
    enumerate_excitation_sets,
    full_sci,
    generalized_refine,
    replay_trace,
)
from stabci.tableau import amplitudes, basis_state

FIXTURES = Path(__file__).parent.parent / "fixtures"


def fixture(name):
    return load_hamiltonian(FIXTURES / name)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def brute_force_sets(n_occ, n_vir):
    """Independent enumerator: filter raw pair subsets by the validity rules,
    then partition and sign them. Returns the set of candidate keys."""
    occ_sp, tot_sp = n_occ // 2, (n_occ + n_vir) // 2
    pairs = [
        (2 * o + s, 2 * u + s)
        for s in (0, 1)
        for o in range(occ_sp)
        for u in range(occ_sp, tot_sp)
    ]
    n = n_occ + n_vir
    keys = set()
    for k in range(1, n_occ + 1):
        for combo in itertools.combinations(pairs, k):
            used = set()
            ok = True
            for o, u in combo:
                if o in used or u in used:
                    ok = False
                    break
                used.add(o)
                used.add(u)
            if not ok:
                continue
            for partition in _partitions_oracle(list(combo)):
                masks = []
                for block in partition:
                    m = 0
                    for o, u in block:
                        m |= (1 << o) | (1 << u)
                    masks.append(m)
                for signs in itertools.product((0, 1), repeat=len(masks)):
                    keys.add(frozenset(zip(masks, signs)))
    return keys


def _partitions_oracle(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions_oracle(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


class TestEnumeration:
    def test_h2_counts(self):
        sets = list(enumerate_excitation_sets(2, 2))
        assert len(sets) == 10
        forms = {
            tuple(format_pauli(g) for g in s.generators): s.signs for s in sets
        }
        assert ("X1X2X3X4",) in forms  # the merged double appears

    def test_keys_match_brute_force(self):
        for n_occ, n_vir in [(2, 2), (2, 4), (4, 4)]:
            mine = {s.key() for s in enumerate_excitation_sets(n_occ, n_vir)}
            assert mine == brute_force_sets(n_occ, n_vir)

    def test_empty_for_zero_particles(self):
        assert list(enumerate_excitation_sets(0, 4)) == []

    def test_odd_counts_rejected(self):
        with pytest.raises(StabciError):
            list(enumerate_excitation_sets(3, 3))

    def test_pairs_disjoint_and_spin_conserving(self):
        for s in enumerate_excitation_sets(4, 4):
            seen = set()
            for block in s.blocks:
                for p in block:
                    assert p.occ_qubit % 2 == p.vir_qubit % 2 == p.spin
                    assert p.occ_qubit not in seen and p.vir_qubit not in seen
                    seen.add(p.occ_qubit)
                    seen.add(p.vir_qubit)
            assert len(seen) <= 2 * 4  # pair count capped by electron count

    def test_partition_block_cap(self):
        capped = list(enumerate_excitation_sets(4, 4, max_partition_blocks=1))
        assert all(len(s.generators) == 1 for s in capped)


class TestEvaluator:
    def test_matches_tableau_energy_on_random_candidates(self):
        h = fixture("h4_3.00.json")
        ev = CandidateEvaluator(h, 0b00001111)
        ref = hf_state_for(h)
        rng = np.random.default_rng(9)
        sets = list(enumerate_excitation_sets(4, 4))
        for idx in rng.choice(len(sets), size=40, replace=False):
            s = sets[idx]
            fast = ev.energy(tuple(g.x_bits for g in s.generators), s.signs)
            state = replay_trace(ref, tuple(zip(s.generators, s.signs)))
            assert fast == pytest.approx(energy_stabilizer(h, state), abs=1e-11)

    def test_empty_candidate_is_reference_energy(self):
        h = fixture("h2_3.00.json")
        ev = CandidateEvaluator(h, 0b0011)
        assert ev.energy((), ()) == pytest.approx(
            energy_stabilizer(h, hf_state_for(h)), abs=1e-12
        )


# ---------------------------------------------------------------------------
# Full SCI
# ---------------------------------------------------------------------------


class TestFullSci:
    def test_h2_stretched_golden_state(self):
        h = fixture("h2_3.00.json")
        r = full_sci(h, hf_state_for(h))
        assert amplitudes(r.state) == {
            "0011": pytest.approx(2**-0.5),
            "1100": pytest.approx(-(2**-0.5)),
        }
        assert [format_pauli(e) for e, _ in r.trace] == ["X1X2X3X4"]
        assert r.trace[0][1] == 1

    def test_h2_equilibrium_returns_hf(self):
        h = fixture("h2_0.75.json")
        r = full_sci(h, hf_state_for(h))
        assert r.trace == ()
        assert r.state.same_state(hf_state_for(h))
        assert r.energy == pytest.approx(r.reference_energy)

    def test_h4_golden_state(self):
        h = fixture("h4_3.00.json")
        r = full_sci(h, hf_state_for(h))
        assert amplitudes(r.state) == {
            "00001111": pytest.approx(0.5),
            "00111100": pytest.approx(-0.5),
            "11000011": pytest.approx(-0.5),
            "11110000": pytest.approx(0.5),
        }
        assert r.energy < r.reference_energy - 0.4

    def test_energy_equals_energy_stabilizer(self):
        h = fixture("h2_2.00.json")
        r = full_sci(h, hf_state_for(h))
        assert r.energy == energy_stabilizer(h, r.state)

    def test_replay_reproduces_state(self):
        h = fixture("h4_3.00.json")
        r = full_sci(h, hf_state_for(h))
        assert replay_trace(hf_state_for(h), r.trace).same_state(r.state)

    def test_support_preserves_particle_numbers(self):
        h = fixture("h4_3.00.json")
        r = full_sci(h, hf_state_for(h))
        for key in amplitudes(r.state):
            total = key.count("1")
            alpha = key[0::2].count("1")
            assert total == 4 and alpha == 2

    def test_random_candidates_preserve_per_spin_weights(self):
        # symmetry property of conditions 1-2: every candidate is supported
        # on bit strings with the reference per-spin occupation
        rng = np.random.default_rng(5)
        reference = basis_state("11110000")
        sets = list(enumerate_excitation_sets(4, 4))
        for idx in rng.choice(len(sets), size=60, replace=False):
            s = sets[idx]
            state = replay_trace(reference, tuple(zip(s.generators, s.signs)))
            for key in amplitudes(state):
                assert key.count("1") == 4
                assert key[0::2].count("1") == 2
                assert key[1::2].count("1") == 2

    def test_empty_hamiltonian_returns_reference(self):
        meta = MoleculeMeta("empty", 0.0, 2, 4, ORDERING_TAG)
        h = hamiltonian_from_terms([], meta)
        r = full_sci(h, hf_state_for(h))
        assert r.trace == () and r.energy == 0.0

    def test_candidate_count_and_dedup(self):
        h = fixture("h4_3.00.json")
        r = full_sci(h, hf_state_for(h))
        assert r.stats.n_enumerated == 864
        assert r.stats.n_distinct <= r.stats.n_enumerated + 1


# ---------------------------------------------------------------------------
# Adaptive SCI
# ---------------------------------------------------------------------------


class TestAdaptiveSci:
    @pytest.mark.parametrize(
        "name", ["h2_3.00.json", "h2_0.75.json", "h4_3.00.json", "lih_3.00.json"]
    )
    def test_matches_full_sci_on_fixtures(self, name):
        h = fixture(name)
        ref = hf_state_for(h)
        r_full = full_sci(h, ref)
        r_adapt = adaptive_sci(h, ref)
        assert r_full.energy <= r_adapt.energy + 1e-9
        assert r_adapt.energy <= r_full.reference_energy + 1e-9
        # on these fixtures the greedy path reaches the optimum exactly
        assert r_adapt.energy == pytest.approx(r_full.energy, abs=1e-9)
        assert r_adapt.state.same_state(r_full.state)

    def test_beam_width_explores_more(self):
        h = fixture("h4_3.00.json")
        ref = hf_state_for(h)
        narrow = adaptive_sci(h, ref, SearchConfig(beam_width=1))
        wide = adaptive_sci(h, ref, SearchConfig(beam_width=4))
        assert wide.energy <= narrow.energy + 1e-12

    def test_returns_reference_when_nothing_improves(self):
        meta = MoleculeMeta("flat", 0.0, 2, 4, ORDERING_TAG)
        h = hamiltonian_from_terms([(1.0, parse_pauli("Z1", 4))], meta)
        r = adaptive_sci(h, hf_state_for(h))
        assert r.trace == ()
        assert r.state.same_state(hf_state_for(h))

    def test_synthetic_36_qubit_terminates(self):
        rng = np.random.default_rng(42)
        n = 36
        terms = []
        for q in range(n):
            terms.append((float(rng.normal(0, 0.5)), PauliString(n, 0, 1 << q, 0)))
        for _ in range(300):
            a, b = rng.choice(n, size=2, replace=False)
            z = (1 << int(a)) | (1 << int(b))
            terms.append((float(rng.normal(0, 0.2)), PauliString(n, 0, z, 0)))
        xmask = int(sum(1 << q for q in range(12, 20)))
        terms.append((0.05, PauliString(n, xmask, 0, 0)))
        meta = MoleculeMeta("synthetic36", 0.0, 12, n, ORDERING_TAG)
        h = hamiltonian_from_terms(terms, meta)
        r = adaptive_sci(h, hf_state_for(h))
        r.state.validate()
        assert r.energy <= r.reference_energy + 1e-9
        assert replay_trace(hf_state_for(h), r.trace).same_state(r.state)


# ---------------------------------------------------------------------------
# Generalized refinement
# ---------------------------------------------------------------------------


class TestGeneralizedRefine:
    def test_h2_all_bond_lengths_within_one_mhartree(self):
        for name in sorted(FIXTURES.glob("h2_*.json")):
            h = load_hamiltonian(name)
            r = full_sci(h, hf_state_for(h))
            ref = generalized_refine(h, r)
            e_fci, _ = brute_force_ground(h)
            assert abs(ref.energy - e_fci) < 1e-3, name

    def test_energy_never_above_stabilizer(self):
        for name in ["h2_1.00.json", "h2_3.00.json", "h4_3.00.json", "lih_3.00.json"]:
            h = fixture(name)
            r = full_sci(h, hf_state_for(h))
            ref = generalized_refine(h, r)
            assert ref.energy <= r.energy + 1e-12

    def test_theta_grid_oracle(self):
        import math

        from stabci.hamiltonian import GeneralizedState, energy_generalized

        h = fixture("h4_3.00.json")
        r = full_sci(h, hf_state_for(h))
        ref = generalized_refine(h, r)
        g = ref.generalized
        grid = np.linspace(-math.pi, math.pi, 4001)
        vals = [
            energy_generalized(h, GeneralizedState(g.base, g.excitation, g.l, t))
            for t in grid
        ]
        assert ref.energy <= min(vals) + 1e-9

    def test_unbiased_recovered_when_optimal(self):
        # A=B by symmetry: the pure-coupling situation pins theta at +-pi/2
        import math

        meta = MoleculeMeta("toy", 0.0, 2, 4, ORDERING_TAG)
        h = hamiltonian_from_terms([(-1.0, parse_pauli("X1X2X3X4", 4))], meta)
        r = full_sci(h, hf_state_for(h))
        assert abs(r.trace[0][1]) in (0, 1)
        ref = generalized_refine(h, r)
        assert abs(abs(ref.generalized.theta) - math.pi / 2) < 1e-12
