import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabci.errors import DimensionError, NotHermitianError, PauliParseError
from stabci.pauli import (
    PauliString,
    format_pauli,
    from_letters,
    identity,
    parse_pauli,
    single,
)

from oracles import pauli_matrix


def rand_pauli(rng, n, hermitian=True):
    mask = (1 << n) - 1
    x = int.from_bytes(rng.bytes(9), "little") & mask
    z = int.from_bytes(rng.bytes(9), "little") & mask
    k = (x & z).bit_count() % 4 if hermitian else int(rng.integers(0, 4))
    if hermitian and rng.integers(0, 2):
        k = (k + 2) % 4
    return PauliString(n, x, z, k)


class TestCodec:
    def test_sparse_signed_form(self):
        p = parse_pauli("-Z1Z3", 4)
        assert (p.x_bits, p.z_bits, p.i_exp) == (0, 0b0101, 2)
        assert format_pauli(p) == "-Z1Z3"

    def test_identity_dense(self):
        p = parse_pauli("IIII")
        assert p == identity(4)
        assert format_pauli(p) == "I"

    def test_single_y_convention(self):
        p = parse_pauli("Y1", 1)
        assert (p.x_bits, p.z_bits, p.i_exp) == (1, 1, 1)
        assert p.sign == 1

    def test_dense_matches_sparse(self):
        assert parse_pauli("IZXY") == parse_pauli("Z2X3Y4", 4)

    @pytest.mark.parametrize(
        "text",
        ["", "-", "Q1", "Z0", "Z5", "Z1Z1", "Z1 Z2x", "I3", "ZX1", "1Z"],
    )
    def test_malformed(self, text):
        with pytest.raises(PauliParseError):
            parse_pauli(text, 4)

    def test_dense_length_checked(self):
        with pytest.raises(PauliParseError):
            parse_pauli("XX", 3)

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_roundtrip(self, data):
        n = data.draw(st.integers(1, 64))
        x = data.draw(st.integers(0, (1 << n) - 1))
        z = data.draw(st.integers(0, (1 << n) - 1))
        sign_flip = data.draw(st.booleans())
        k = ((x & z).bit_count() + (2 if sign_flip else 0)) % 4
        p = PauliString(n, x, z, k)
        assert parse_pauli(format_pauli(p), n) == p

    def test_roundtrip_bulk(self):
        rng = np.random.default_rng(64)
        for _ in range(10_000):
            n = int(rng.integers(1, 65))
            p = rand_pauli(rng, n)
            assert parse_pauli(format_pauli(p), n) == p


class TestMultiply:
    def test_xz_is_minus_iy(self):
        x1, z1, y1 = single(1, 0, "X"), single(1, 0, "Z"), single(1, 0, "Y")
        prod = x1 * z1
        assert (prod.x_bits, prod.z_bits) == (y1.x_bits, y1.z_bits)
        assert (prod.i_exp - y1.i_exp) % 4 == 3  # XZ = -i Y
        np.testing.assert_allclose(
            pauli_matrix(prod), -1j * pauli_matrix(y1), atol=1e-12
        )

    def test_hermitian_squares_to_plus_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = rand_pauli(rng, 6)
            sq = p * p
            assert sq.is_identity and sq.i_exp == 0

    def test_negative_pair_product(self):
        a = parse_pauli("-Z1Z3", 4)
        b = parse_pauli("-Z2Z4", 4)
        assert format_pauli(a * b) == "Z1Z2Z3Z4"

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            identity(2) * identity(3)

    def test_matrix_oracle_random_triples(self):
        rng = np.random.default_rng(99)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            p, q, r = (rand_pauli(rng, n, hermitian=False) for _ in range(3))
            np.testing.assert_allclose(
                pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q), atol=1e-12
            )
            assert (p * q) * r == p * (q * r)


class TestCommutes:
    def test_examples(self):
        assert parse_pauli("X1X2", 2).commutes_with(parse_pauli("Z1Z2", 2))
        assert not parse_pauli("X1", 1).commutes_with(parse_pauli("Z1", 1))
        assert parse_pauli("Z3Z4", 4).commutes_with(parse_pauli("X1X2X3X4", 4))

    @given(st.data())
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_reflexive(self, data):
        n = data.draw(st.integers(1, 16))
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        p, q = rand_pauli(rng, n), rand_pauli(rng, n)
        assert p.commutes_with(q) == q.commutes_with(p)
        assert p.commutes_with(p)

    def test_hermitian_closed_under_commuting_product(self):
        rng = np.random.default_rng(3)
        done = 0
        while done < 40:
            p, q = rand_pauli(rng, 5), rand_pauli(rng, 5)
            if p.commutes_with(q):
                assert (p * q).is_hermitian
                done += 1


class TestHermitian:
    def test_sign(self):
        assert parse_pauli("-Z1Z3", 4).sign == -1
        assert parse_pauli("Y1Y2", 2).sign == 1

    def test_non_hermitian_has_no_sign(self):
        p = PauliString(2, 0b01, 0b10, 1)
        assert not p.is_hermitian
        with pytest.raises(NotHermitianError):
            p.sign

    def test_unsigned(self):
        p = parse_pauli("-Y1X2", 2)
        assert p.unsigned().sign == 1
        assert p.unsigned().negated() == p


def test_from_letters_matches_parse():
    assert from_letters({0: "X", 3: "Y"}, 5) == parse_pauli("X1Y4", 5)
