"""Signed Pauli strings on n qubits in symplectic GF(2) form.

An operator is stored as ``i**i_exp * X^x * Z^z`` where ``x`` and ``z`` are
bit masks packed into Python ints (bit q = qubit q, 0-based internally) and
``i_exp`` is an exponent of the imaginary unit, mod 4.  Y is the Hermitian
combination ``i*X*Z`` (x=1, z=1, i_exp=1).

The text interface is 1-based to match the usual chemistry listings: dense
form ``"IZXY..."`` (leftmost letter = qubit 1) or sparse signed form
``"-Z1Z3"``.  Positive operators are written without a sign prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DimensionError, NotHermitianError, PauliParseError

_SPARSE_TOKEN = re.compile(r"([IXYZ])(\d+)")


@dataclass(frozen=True, slots=True)
class PauliString:
    """Immutable signed Pauli operator; safe to share between workers."""

    n_qubits: int
    x_bits: int
    z_bits: int
    i_exp: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise DimensionError(f"n_qubits must be positive, got {self.n_qubits}")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise DimensionError("bit mask exceeds n_qubits")
        object.__setattr__(self, "i_exp", self.i_exp % 4)

    # -- algebra ---------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise DimensionError(
                f"cannot multiply {self.n_qubits}-qubit and {other.n_qubits}-qubit Paulis"
            )
        k = (self.i_exp + other.i_exp + 2 * (other.x_bits & self.z_bits).bit_count()) % 4
        return PauliString(
            self.n_qubits,
            self.x_bits ^ other.x_bits,
            self.z_bits ^ other.z_bits,
            k,
        )

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise DimensionError("commutation between different qubit counts")
        t = (self.x_bits & other.z_bits).bit_count() + (other.x_bits & self.z_bits).bit_count()
        return t % 2 == 0

    def negated(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, self.i_exp + 2)

    # -- predicates ------------------------------------------------------

    @property
    def is_hermitian(self) -> bool:
        return (self.i_exp - (self.x_bits & self.z_bits).bit_count()) % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian string."""
        d = (self.i_exp - (self.x_bits & self.z_bits).bit_count()) % 4
        if d == 0:
            return 1
        if d == 2:
            return -1
        raise NotHermitianError(f"{self!r} has no real sign")

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def support(self) -> tuple[int, ...]:
        """0-based qubit indices the operator acts on."""
        bits = self.x_bits | self.z_bits
        return tuple(q for q in range(self.n_qubits) if (bits >> q) & 1)

    def unsigned(self) -> "PauliString":
        """Same letters with an overall +1 sign (Hermitian phase convention)."""
        return PauliString(
            self.n_qubits, self.x_bits, self.z_bits, (self.x_bits & self.z_bits).bit_count()
        )

    def letter(self, q: int) -> str:
        x = (self.x_bits >> q) & 1
        z = (self.z_bits >> q) & 1
        return "IXZY"[x + 2 * z]

    def __str__(self) -> str:
        return format_pauli(self)


# -- constructors ---------------------------------------------------------


def identity(n_qubits: int) -> PauliString:
    return PauliString(n_qubits, 0, 0, 0)


def single(n_qubits: int, q: int, letter: str, sign: int = 1) -> PauliString:
    """One-letter Pauli on 0-based qubit q."""
    if not 0 <= q < n_qubits:
        raise DimensionError(f"qubit {q} out of range for n={n_qubits}")
    x, z, k = {"I": (0, 0, 0), "X": (1, 0, 0), "Z": (0, 1, 0), "Y": (1, 1, 1)}[letter]
    if sign == -1:
        k += 2
    return PauliString(n_qubits, x << q if x else 0, z << q if z else 0, k)


def from_letters(letters: dict[int, str], n_qubits: int, sign: int = 1) -> PauliString:
    """Build from a {0-based qubit: letter} map."""
    x = z = 0
    k = 0 if sign == 1 else 2
    for q, c in letters.items():
        if not 0 <= q < n_qubits:
            raise DimensionError(f"qubit {q} out of range for n={n_qubits}")
        if c == "X":
            x |= 1 << q
        elif c == "Z":
            z |= 1 << q
        elif c == "Y":
            x |= 1 << q
            z |= 1 << q
            k += 1
        elif c != "I":
            raise PauliParseError(f"unknown Pauli letter {c!r}")
    return PauliString(n_qubits, x, z, k % 4)


def x_string(n_qubits: int, qubit_mask: int) -> PauliString:
    return PauliString(n_qubits, qubit_mask, 0, 0)


def z_string(n_qubits: int, qubit_mask: int, sign: int = 1) -> PauliString:
    return PauliString(n_qubits, 0, qubit_mask, 0 if sign == 1 else 2)


# -- text codec -----------------------------------------------------------


def parse_pauli(text: str, n_qubits: int | None = None, *, allow_sign: bool = True) -> PauliString:
    """Parse dense ("IZXY...") or sparse signed ("-Z1Z3") form, 1-based indices."""
    raw = text.strip()
    if not raw:
        raise PauliParseError("empty Pauli string")
    sign = 1
    body = raw
    if body[0] in "+-":
        if not allow_sign:
            raise PauliParseError(f"explicit sign not allowed here: {text!r}")
        sign = -1 if body[0] == "-" else 1
        body = body[1:].strip()
    if not body:
        raise PauliParseError(f"no Pauli body in {text!r}")

    if body == "I":
        if n_qubits is None:
            raise PauliParseError("identity 'I' needs an explicit qubit count")
        return identity(n_qubits) if sign == 1 else identity(n_qubits).negated()

    if any(c.isdigit() for c in body):
        consumed = _SPARSE_TOKEN.findall(body)
        if "".join(f"{c}{i}" for c, i in consumed) != body:
            raise PauliParseError(f"malformed sparse Pauli {text!r}")
        if n_qubits is None:
            raise PauliParseError(f"sparse form {text!r} needs an explicit qubit count")
        letters: dict[int, str] = {}
        for c, idx_text in consumed:
            idx = int(idx_text)
            if not 1 <= idx <= n_qubits:
                raise PauliParseError(f"qubit index {idx} out of range 1..{n_qubits} in {text!r}")
            if idx - 1 in letters:
                raise PauliParseError(f"duplicate qubit index {idx} in {text!r}")
            if c == "I":
                raise PauliParseError(f"'I{idx}' token is not allowed in sparse form {text!r}")
            letters[idx - 1] = c
        return from_letters(letters, n_qubits, sign)

    if not set(body) <= set("IXYZ"):
        bad = next(c for c in body if c not in "IXYZ")
        raise PauliParseError(f"unknown letter {bad!r} in {text!r}")
    if n_qubits is not None and len(body) != n_qubits:
        raise PauliParseError(f"dense form {text!r} has {len(body)} letters, expected {n_qubits}")
    n = len(body)
    return from_letters({q: c for q, c in enumerate(body)}, n, sign)


def format_pauli(p: PauliString, *, explicit_plus: bool = False) -> str:
    """Sparse signed form, factors ordered by qubit index; identity is 'I'."""
    s = p.sign  # raises for non-Hermitian
    prefix = "-" if s == -1 else ("+" if explicit_plus else "")
    if p.is_identity:
        return prefix + "I"
    body = "".join(f"{p.letter(q)}{q + 1}" for q in p.support())
    return prefix + body


def format_dense(p: PauliString) -> str:
    """Dense form with sign prefix only when negative."""
    s = p.sign
    body = "".join(p.letter(q) for q in range(p.n_qubits))
    return ("-" if s == -1 else "") + body
