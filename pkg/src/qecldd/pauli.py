"""Phase-tracked Pauli algebra in the symplectic (x, z) representation.

Qubit 1 is the leftmost character of a Pauli string and the most significant
bit of the packed ``x``/``z`` integers, so ``XIIX`` has ``x == 0b1001``.

A :class:`PauliOperator` stands for ``i**phase_exp * P`` where ``P`` is the
Hermitian tensor product of its letters.  A ``Y`` letter means ``i * X @ Z`` on
its qubit; that factor of ``i`` is handled inside :func:`multiply` and never
shows up in ``phase_exp``.  So ``+Y`` has ``phase_exp == 0`` and ``-iY`` has
``phase_exp == 3``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

import numpy as np

MAX_QUBITS = 16

# letter index is x | (z << 1)
_LETTERS = "IXZY"
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "-": 2, "-i": 3}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(r"^(?P<prefix>[+-]?i?)(?P<body>.*)$")


class PauliError(ValueError):
    """Malformed Pauli input or incompatible operands."""


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise PauliError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


def _letters(n: int, x: int, z: int) -> str:
    out = []
    for q in range(n):
        bit = n - 1 - q
        out.append(_LETTERS[((x >> bit) & 1) | (((z >> bit) & 1) << 1)])
    return "".join(out)


@dataclass(frozen=True, slots=True)
class PauliClass:
    """A Pauli operator modulo the global phases {+1, -1, +i, -i}."""

    n: int
    x: int
    z: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise PauliError(f"x/z bits out of range for n={self.n}")

    @classmethod
    def identity(cls, n: int) -> PauliClass:
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliClass:
        """``letter`` on ``qubit`` (1-based), identity elsewhere."""
        if not 1 <= qubit <= n:
            raise PauliError(f"qubit {qubit} outside [1, {n}]")
        bx, bz = _BITS[letter]
        shift = n - qubit
        return cls(n, bx << shift, bz << shift)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letter(self, qubit: int) -> str:
        """Pauli letter acting on ``qubit`` (1-based)."""
        bit = self.n - qubit
        return _LETTERS[((self.x >> bit) & 1) | (((self.z >> bit) & 1) << 1)]

    def support(self) -> list[int]:
        return [q for q in range(1, self.n + 1) if self.letter(q) != "I"]

    def operator(self, phase_exp: int = 0) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, phase_exp % 4)

    def __mul__(self, other: PauliClass) -> PauliClass:
        if not isinstance(other, PauliClass):
            return NotImplemented
        if other.n != self.n:
            raise PauliError(f"size mismatch: {self.n} vs {other.n}")
        return PauliClass(self.n, self.x ^ other.x, self.z ^ other.z)

    def __str__(self) -> str:
        return _letters(self.n, self.x, self.z)

    def __repr__(self) -> str:
        return f"PauliClass({self})"


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """An element ``i**phase_exp * P`` of the n-qubit Pauli group."""

    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        _check_n(self.n)
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise PauliError(f"x/z bits out of range for n={self.n}")
        if not 0 <= self.phase_exp < 4:
            object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n, 0, 0, 0)

    @property
    def cls(self) -> PauliClass:
        return PauliClass(self.n, self.x, self.z)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian:
            raise PauliError(f"{self} is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    def letter(self, qubit: int) -> str:
        return self.cls.letter(qubit)

    def with_phase(self, phase_exp: int) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, phase_exp % 4)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return self.with_phase(self.phase_exp + 2)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + _letters(self.n, self.x, self.z)

    def __repr__(self) -> str:
        return f"PauliOperator({self})"


PauliLike = Union[PauliOperator, PauliClass]


def parse_pauli(text: str) -> PauliOperator:
    """Parse ``[+|-|+i|-i]{I,X,Y,Z}^n`` into a :class:`PauliOperator`."""
    if not isinstance(text, str):
        raise PauliError(f"expected a string, got {type(text).__name__}")
    text = text.strip()
    if not text:
        raise PauliError("empty Pauli string")
    m = _PAULI_RE.match(text)
    assert m is not None
    prefix, body = m.group("prefix"), m.group("body")
    if prefix == "i":
        # bare 'i' with no sign is not part of the canonical grammar
        raise PauliError(f"malformed phase prefix in {text!r}")
    if not body:
        raise PauliError(f"no Pauli letters in {text!r}")
    if body[0] in "+-":
        raise PauliError(f"malformed phase prefix in {text!r}")
    bad = sorted({c for c in body if c not in _BITS})
    if bad:
        raise PauliError(f"illegal character(s) {''.join(bad)!r} in {text!r}")
    n = len(body)
    if n > MAX_QUBITS:
        raise PauliError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    x = z = 0
    for c in body:
        bx, bz = _BITS[c]
        x = (x << 1) | bx
        z = (z << 1) | bz
    return PauliOperator(n, x, z, _PREFIX_PHASE[prefix])


def parse_class(text: str) -> PauliClass:
    return parse_pauli(text).cls


def as_class(p: PauliLike | str) -> PauliClass:
    if isinstance(p, PauliClass):
        return p
    if isinstance(p, PauliOperator):
        return p.cls
    return parse_pauli(p).cls


def as_operator(p: PauliLike | str) -> PauliOperator:
    if isinstance(p, PauliOperator):
        return p
    if isinstance(p, PauliClass):
        return p.operator()
    return parse_pauli(p)


def format_pauli(p: PauliLike) -> str:
    return str(p)


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact product ``a @ b`` including the phase."""
    if a.n != b.n:
        raise PauliError(f"size mismatch: {a.n} vs {b.n}")
    x = a.x ^ b.x
    z = a.z ^ b.z
    # Y letters carry an implicit i each; Z^a X^b reorder costs (-1)^(z_a . x_b)
    phase = (
        a.phase_exp
        + b.phase_exp
        + (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (x & z).bit_count()
    )
    return PauliOperator(a.n, x, z, phase % 4)


def symplectic_product(a: PauliLike, b: PauliLike) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    if a.n != b.n:
        raise PauliError(f"size mismatch: {a.n} vs {b.n}")
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() & 1


def commutes(a: PauliLike, b: PauliLike) -> bool:
    return symplectic_product(a, b) == 0


def weight(p: PauliLike) -> int:
    return (p.x | p.z).bit_count()


def enumerate_classes(n: int) -> Iterator[PauliClass]:
    """All 4**n classes, ordered lexicographically by ``(x, z)``."""
    _check_n(n)
    size = 1 << n
    for x in range(size):
        for z in range(size):
            yield PauliClass(n, x, z)


@dataclass(frozen=True)
class GeneratedGroup:
    """Projective Pauli group generated by ``generators``."""

    n: int
    generators: tuple[PauliClass, ...]
    elements: frozenset[PauliClass]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def rank(self) -> int:
        return self.order.bit_length() - 1

    def __contains__(self, p: object) -> bool:
        if isinstance(p, PauliOperator):
            p = p.cls
        return p in self.elements

    def __iter__(self) -> Iterator[PauliClass]:
        return iter(sorted(self.elements, key=lambda c: (c.x, c.z)))

    def __len__(self) -> int:
        return len(self.elements)


def generate_group(
    generators: Iterable[PauliLike | str], cap: int | None = None, n: int | None = None
) -> GeneratedGroup:
    """Projective closure of ``generators`` together with the identity.

    ``n`` is only needed when ``generators`` is empty.  Raises
    :class:`PauliError` if the closure would exceed ``cap`` elements.
    """
    gens = tuple(as_class(g) for g in generators)
    sizes = {g.n for g in gens}
    if len(sizes) > 1:
        raise PauliError(f"generators of mixed sizes {sorted(sizes)}")
    if gens:
        n = gens[0].n
    elif n is None:
        n = 1
    elements = {PauliClass.identity(n)}
    for g in gens:
        if g in elements:
            continue
        # the projective Pauli group is abelian: adding g doubles the set
        if cap is not None and 2 * len(elements) > cap:
            raise PauliError(f"group closure exceeds cap={cap}")
        elements |= {e * g for e in elements}
    return GeneratedGroup(n, gens, frozenset(elements))


def independent(generators: Iterable[PauliLike]) -> bool:
    gens = [as_class(g) for g in generators]
    if not gens:
        return True
    return generate_group(gens).order == 1 << len(gens)


_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def to_matrix(p: PauliLike) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix, qubit 1 as the most significant factor."""
    cls = p.cls if isinstance(p, PauliOperator) else p
    out = np.array([[1.0 + 0j]])
    for q in range(1, cls.n + 1):
        out = np.kron(out, _MATS[cls.letter(q)])
    phase = p.phase_exp if isinstance(p, PauliOperator) else 0
    return (1j**phase) * out
