import json
import math

import numpy as np
import pytest

from stabci.errors import ResourceLimitError, SchemaError
from stabci.hamiltonian import (
    GeneralizedState,
    MoleculeMeta,
    ORDERING_TAG,
    brute_force_ground,
    energy_generalized,
    energy_stabilizer,
    hamiltonian_from_dict,
    hamiltonian_from_terms,
    hamiltonian_to_dict,
    hf_state_for,
    load_hamiltonian,
    optimal_theta,
    save_hamiltonian,
)
from stabci.pauli import parse_pauli
from stabci.tableau import basis_state, expectation, project_excitation

from oracles import expectation_dense, pauli_matrix, state_vector_from_generators


def meta(n_qubits, n_electrons=2, molecule="synthetic"):
    return MoleculeMeta(molecule, 1.0, n_electrons, n_qubits, ORDERING_TAG)


def synthetic(n, seed=0, n_terms=25, with_x=True):
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        x = int(rng.integers(0, 1 << n)) if with_x else 0
        z = int(rng.integers(0, 1 << n))
        from stabci.pauli import PauliString

        p = PauliString(n, x, z, (x & z).bit_count() % 4)
        terms.append((float(rng.normal()), p))
    return hamiltonian_from_terms(terms, meta(n))


class TestCodec:
    def doc(self, **over):
        base = {
            "format_version": 1,
            "n_qubits": 4,
            "molecule": "H2",
            "bond_length_angstrom": 3.0,
            "n_electrons": 2,
            "ordering": ORDERING_TAG,
            "hf_energy": -0.9,
            "fci_energy": None,
            "terms": [
                {"coeff": 0.5, "pauli": "Z1"},
                {"coeff": 0.25, "pauli": "X1X2X3X4"},
                {"coeff": 1.5, "pauli": "I"},
            ],
        }
        base.update(over)
        return base

    def test_roundtrip(self, tmp_path):
        h = hamiltonian_from_dict(self.doc())
        path = tmp_path / "h.json"
        save_hamiltonian(h, path)
        h2 = load_hamiltonian(path)
        assert hamiltonian_to_dict(h) == hamiltonian_to_dict(h2)

    def test_duplicate_terms_merge(self):
        doc = self.doc(
            terms=[{"coeff": 0.5, "pauli": "Z1"}, {"coeff": 0.25, "pauli": "Z1"}]
        )
        h = hamiltonian_from_dict(doc)
        assert h.n_terms == 1
        assert h.terms[0][0] == pytest.approx(0.75)

    def test_zero_terms_dropped(self):
        doc = self.doc(
            terms=[{"coeff": 0.5, "pauli": "Z1"}, {"coeff": -0.5, "pauli": "Z1"}]
        )
        assert hamiltonian_from_dict(doc).n_terms == 0

    def test_explicit_sign_rejected(self):
        with pytest.raises(SchemaError, match="sign"):
            hamiltonian_from_dict(self.doc(terms=[{"coeff": 1.0, "pauli": "-Z1"}]))

    @pytest.mark.parametrize(
        "over",
        [
            {"format_version": 2},
            {"n_electrons": 3},
            {"n_qubits": 0},
            {"terms": [{"coeff": float("nan"), "pauli": "Z1"}]},
            {"terms": [{"coeff": 1.0, "pauli": "Z9"}]},
            {"terms": [{"coeff": 1.0}]},
            {"ordering": 7},
        ],
    )
    def test_schema_violations(self, over):
        with pytest.raises(SchemaError):
            hamiltonian_from_dict(self.doc(**over))

    def test_missing_field(self):
        doc = self.doc()
        del doc["molecule"]
        with pytest.raises(SchemaError, match="molecule"):
            hamiltonian_from_dict(doc)


class TestEnergyStabilizer:
    def test_hand_sums(self):
        h = hamiltonian_from_dict(
            {
                "format_version": 1,
                "n_qubits": 2,
                "molecule": "toy",
                "bond_length_angstrom": 0.0,
                "n_electrons": 2,
                "ordering": ORDERING_TAG,
                "terms": [
                    {"coeff": 0.5, "pauli": "Z1"},
                    {"coeff": 0.5, "pauli": "Z1Z2"},
                ],
            }
        )
        assert energy_stabilizer(h, basis_state("11")) == pytest.approx(0.0)
        assert energy_stabilizer(h, basis_state("10")) == pytest.approx(-1.0)

    def test_empty_hamiltonian(self):
        h = hamiltonian_from_terms([], meta(3))
        assert energy_stabilizer(h, basis_state("101")) == 0.0

    def test_dimension_mismatch(self):
        from stabci.errors import DimensionError

        h = synthetic(4, seed=3)
        with pytest.raises(DimensionError):
            energy_stabilizer(h, basis_state("11"))

    def test_matches_dense(self):
        h = synthetic(4, seed=3)
        st = project_excitation(basis_state("1100"), parse_pauli("X1X2X3X4", 4), 1)
        vec = state_vector_from_generators(list(st.generators))
        want = sum(
            c * expectation_dense(vec, p).real for c, p in h.terms
        )
        assert energy_stabilizer(h, st) == pytest.approx(want, abs=1e-12)

    def test_linear_in_coefficients(self):
        h1, h2 = synthetic(3, seed=1, n_terms=10), synthetic(3, seed=2, n_terms=10)
        st = basis_state("110")
        combo = hamiltonian_from_terms(
            [(2.0 * c, p) for c, p in h1.terms] + [(-0.5 * c, p) for c, p in h2.terms],
            meta(3),
        )
        assert energy_stabilizer(combo, st) == pytest.approx(
            2.0 * energy_stabilizer(h1, st) - 0.5 * energy_stabilizer(h2, st)
        )


class TestGeneralized:
    def setup_method(self):
        self.h = synthetic(4, seed=11, n_terms=30)
        self.base = basis_state("1100")
        self.e = parse_pauli("X1X2X3X4", 4)

    def test_theta_zero_is_base_energy(self):
        g = GeneralizedState(self.base, self.e, 0, 0.0)
        assert energy_generalized(self.h, g) == pytest.approx(
            energy_stabilizer(self.h, self.base)
        )

    def test_theta_pi_is_flipped_branch(self):
        g = GeneralizedState(self.base, self.e, 0, math.pi)
        flipped = basis_state("0011")
        assert energy_generalized(self.h, g) == pytest.approx(
            energy_stabilizer(self.h, flipped), abs=1e-12
        )

    def test_theta_half_pi_matches_projection(self):
        for l in (0, 1):
            g = GeneralizedState(self.base, self.e, l, math.pi / 2)
            proj = project_excitation(self.base, self.e, l)
            assert energy_generalized(self.h, g) == pytest.approx(
                energy_stabilizer(self.h, proj), abs=1e-12
            )

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(8)
        vec_base = state_vector_from_generators(list(self.base.generators))
        for _ in range(10):
            theta = float(rng.uniform(-math.pi, math.pi))
            l = int(rng.integers(0, 2))
            g = GeneralizedState(self.base, self.e, l, theta)
            x, y = math.cos(theta / 2), math.sin(theta / 2)
            vec = x * vec_base + (-1) ** l * y * (pauli_matrix(self.e) @ vec_base)
            want = sum(c * expectation_dense(vec, p).real for c, p in self.h.terms)
            assert energy_generalized(self.h, g) == pytest.approx(want, abs=1e-10)

    def test_optimal_theta_against_grid(self):
        for l in (0, 1):
            theta_star, e_star = optimal_theta(self.h, self.base, self.e, l)
            grid = np.linspace(-math.pi, math.pi, 20001)
            vals = [
                energy_generalized(self.h, GeneralizedState(self.base, self.e, l, t))
                for t in grid
            ]
            assert e_star <= min(vals) + 1e-9
            assert energy_generalized(
                self.h, GeneralizedState(self.base, self.e, l, theta_star)
            ) == pytest.approx(e_star, abs=1e-12)
            assert -math.pi < theta_star <= math.pi

    def test_optimal_theta_below_random_thetas(self):
        rng = np.random.default_rng(4)
        _, e_star = optimal_theta(self.h, self.base, self.e, 0)
        for _ in range(100):
            t = float(rng.uniform(-math.pi, math.pi))
            assert e_star <= energy_generalized(
                self.h, GeneralizedState(self.base, self.e, 0, t)
            ) + 1e-12

    def test_closed_form_edges(self):
        # C = 0: diagonal Hamiltonian commuting with E gives pure cosine form
        h = hamiltonian_from_terms(
            [(1.0, parse_pauli("Z1Z2", 4)), (0.25, parse_pauli("Z1Z3", 4))], meta(4)
        )
        theta_star, e_star = optimal_theta(h, self.base, self.e, 0)
        a = energy_stabilizer(h, self.base)
        b = energy_stabilizer(h, basis_state("0011"))
        if a < b:
            assert theta_star == pytest.approx(0.0)
            assert e_star == pytest.approx(a)


class TestBruteForce:
    def test_single_z(self):
        h = hamiltonian_from_terms([(1.0, parse_pauli("Z1", 1))], meta(1))
        e, res = brute_force_ground(h)
        assert e == pytest.approx(-1.0)
        assert res <= 1e-8

    def test_matches_dense_eigh(self):
        h = synthetic(5, seed=21, n_terms=40)
        e, res = brute_force_ground(h)
        mats = sum(c * pauli_matrix(p) for c, p in h.terms)
        want = float(np.linalg.eigvalsh(mats)[0])
        assert e == pytest.approx(want, abs=1e-8)
        assert res <= 1e-8

    def test_eigsh_path(self):
        h = synthetic(9, seed=5, n_terms=30)
        e, res = brute_force_ground(h)
        assert res <= 1e-8
        st = basis_state(0, 9)
        assert e <= energy_stabilizer(h, st) + 1e-9

    def test_qubit_cap(self):
        h = synthetic(13, seed=1, n_terms=3)
        with pytest.raises(ResourceLimitError):
            brute_force_ground(h)


def test_hf_state_for():
    h = synthetic(6, seed=2)
    h = hamiltonian_from_terms(list(h.terms), meta(6, n_electrons=4))
    st = hf_state_for(h)
    signs = [g.sign for g in st.generators]
    assert signs == [-1, -1, -1, -1, 1, 1]
