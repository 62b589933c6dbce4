"""Stabilizer codes with explicit canonical logical operators.

Errors are sorted into three parts relative to a code: members of the
stabilizer group, undetectable logical errors (commute with every stabilizer
but are not stabilizers), and detectable errors (anticommute with at least one
stabilizer generator).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from itertools import product
from os import PathLike
from typing import Any, Mapping, Sequence

from .pauli import (
    GeneratedGroup,
    PauliClass,
    PauliLike,
    PauliOperator,
    as_class,
    as_operator,
    commutes,
    enumerate_classes,
    generate_group,
    symplectic_product,
)

EXHAUSTIVE_LIMIT = 8

Syndrome = tuple[int, ...]


class CodeError(ValueError):
    """Invalid code definition, or a request the code cannot satisfy."""


class ErrorClass(enum.Enum):
    STABILIZER = "stabilizer"
    LOGICAL = "logical"
    DETECTABLE = "detectable"


def _signed_subset_products(gens: Sequence[PauliOperator]):
    """Yield ``(mask, product)`` over all subsets, walking a Gray code."""
    n = gens[0].n
    prod = PauliOperator.identity(n)
    yield 0, prod
    mask = 0
    for step in range(1, 1 << len(gens)):
        bit = (step & -step).bit_length() - 1
        mask ^= 1 << bit
        # multiplying on the right by an already-present commuting generator
        # removes it, since every generator squares to +I
        prod = prod * gens[bit]
        yield mask, prod


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, k]] stabilizer code; validated on construction."""

    n: int
    k: int
    stabilizers: tuple[PauliOperator, ...]
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]
    name: str = ""

    def __post_init__(self) -> None:
        for field in ("stabilizers", "logical_x", "logical_z"):
            object.__setattr__(self, field, tuple(as_operator(p) for p in getattr(self, field)))
        self._validate()

    def _validate(self) -> None:
        n, k = self.n, self.k
        if not 1 <= n <= 16:
            raise CodeError(f"n must be in [1, 16], got {n}")
        if not 0 <= k <= n:
            raise CodeError(f"k must be in [0, n], got k={k}, n={n}")
        if len(self.stabilizers) != n - k:
            raise CodeError(f"expected {n - k} stabilizer generators, got {len(self.stabilizers)}")
        if len(self.logical_x) != k or len(self.logical_z) != k:
            raise CodeError(
                f"expected {k} logical X and {k} logical Z operators, "
                f"got {len(self.logical_x)} and {len(self.logical_z)}"
            )
        for p in (*self.stabilizers, *self.logical_x, *self.logical_z):
            if p.n != n:
                raise CodeError(f"{p} acts on {p.n} qubits, code has n={n}")
            if not p.is_hermitian:
                raise CodeError(f"{p} is not Hermitian (phase must be +1 or -1)")
        for i, a in enumerate(self.stabilizers):
            for b in self.stabilizers[i + 1 :]:
                if not commutes(a, b):
                    raise CodeError(f"stabilizer generators {a} and {b} anticommute")
        if self.stabilizers:
            for mask, prod in _signed_subset_products(self.stabilizers):
                if mask and prod.x == 0 and prod.z == 0:
                    if prod.phase_exp != 0:
                        raise CodeError("stabilizer group contains -I")
                    raise CodeError("stabilizer generators are not independent")
        for lx in (*self.logical_x, *self.logical_z):
            for s in self.stabilizers:
                if not commutes(lx, s):
                    raise CodeError(f"logical operator {lx} anticommutes with stabilizer {s}")
        for i in range(k):
            for j in range(k):
                if commutes(self.logical_x[i], self.logical_z[j]) != (i != j):
                    raise CodeError(
                        f"logical X{i + 1}={self.logical_x[i]} and Z{j + 1}={self.logical_z[j]} "
                        "violate the canonical commutation pattern"
                    )
                if i < j and not commutes(self.logical_x[i], self.logical_x[j]):
                    raise CodeError(f"logical X{i + 1} and X{j + 1} anticommute")
                if i < j and not commutes(self.logical_z[i], self.logical_z[j]):
                    raise CodeError(f"logical Z{i + 1} and Z{j + 1} anticommute")

    @property
    def label(self) -> str:
        return self.name or f"[[{self.n},{self.k}]]"

    @cached_property
    def stabilizer_group(self) -> GeneratedGroup:
        return generate_group(self.stabilizers, n=self.n)

    @cached_property
    def logical_generators(self) -> tuple[PauliClass, ...]:
        """Logical X's then logical Z's, as projective classes."""
        return tuple(p.cls for p in (*self.logical_x, *self.logical_z))

    def syndrome(self, p: PauliLike | str) -> Syndrome:
        p = as_class(p)
        if p.n != self.n:
            raise CodeError(f"size mismatch: error on {p.n} qubits, code has n={self.n}")
        return tuple(symplectic_product(p, s) for s in self.stabilizers)

    def in_stabilizer_group(self, p: PauliLike | str) -> bool:
        return as_class(p) in self.stabilizer_group

    def classify(self, p: PauliLike | str) -> ErrorClass:
        p = as_class(p)
        if any(self.syndrome(p)):
            return ErrorClass.DETECTABLE
        if p in self.stabilizer_group:
            return ErrorClass.STABILIZER
        return ErrorClass.LOGICAL

    def with_logicals(
        self, logical_x: Sequence[PauliLike | str], logical_z: Sequence[PauliLike | str], name: str = ""
    ) -> StabilizerCode:
        return StabilizerCode(
            self.n, self.k, self.stabilizers, tuple(logical_x), tuple(logical_z), name or self.name
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "stabilizers": [str(p) for p in self.stabilizers],
            "logical_x": [str(p) for p in self.logical_x],
            "logical_z": [str(p) for p in self.logical_z],
        }


def load_code(definition: Mapping[str, Any]) -> StabilizerCode:
    """Build and validate a code from a record with Pauli strings."""
    try:
        n = int(definition["n"])
        k = int(definition["k"])
        stabs = definition.get("stabilizers", [])
        lx = definition.get("logical_x", [])
        lz = definition.get("logical_z", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeError(f"bad code record: {exc}") from exc
    try:
        return StabilizerCode(n, k, tuple(stabs), tuple(lx), tuple(lz), str(definition.get("name", "")))
    except CodeError:
        raise
    except ValueError as exc:
        raise CodeError(str(exc)) from exc


def read_code(path: str | PathLike[str]) -> StabilizerCode:
    """Load a code-definition JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CodeError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise CodeError(str(exc)) from exc
    if not isinstance(record, dict):
        raise CodeError(f"{path}: expected a JSON object")
    return load_code(record)


def builtin_422() -> StabilizerCode:
    """The [[4,2,2]] code with logicals XIIX, IIXX / IIZZ, ZIIZ."""
    text = resources.files("qecldd").joinpath("data/code_422.json").read_text(encoding="utf-8")
    return load_code(json.loads(text))


def trivial_code(n: int, k: int) -> StabilizerCode:
    """Data on qubits 1..k, stabilizers Z_{k+1}, ..., Z_n."""
    if not 0 <= k <= n:
        raise CodeError(f"need 0 <= k <= n, got n={n}, k={k}")
    stabs = [PauliClass.single(n, q, "Z").operator() for q in range(k + 1, n + 1)]
    lx = [PauliClass.single(n, q, "X").operator() for q in range(1, k + 1)]
    lz = [PauliClass.single(n, q, "Z").operator() for q in range(1, k + 1)]
    return StabilizerCode(n, k, tuple(stabs), tuple(lx), tuple(lz), f"trivial[[{n},{k}]]")


def classify_error(code: StabilizerCode, p: PauliLike | str) -> ErrorClass:
    return code.classify(p)


def syndrome(code: StabilizerCode, p: PauliLike | str) -> Syndrome:
    return code.syndrome(p)


def all_syndromes(code: StabilizerCode) -> list[Syndrome]:
    return list(product((0, 1), repeat=code.n - code.k))


@dataclass(frozen=True)
class PartitionCensus:
    stabilizer: int
    logical: int
    detectable: int

    @property
    def total(self) -> int:
        return self.stabilizer + self.logical + self.detectable

    @classmethod
    def expected(cls, n: int, k: int) -> PartitionCensus:
        """Closed-form sizes of the three parts for an [[n, k]] code."""
        return cls(2 ** (n - k), 2 ** (n - k) * (4**k - 1), 2 ** (n + k) * (2 ** (n - k) - 1))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.stabilizer, self.logical, self.detectable)


def _check_exhaustive(code: StabilizerCode) -> None:
    if code.n > EXHAUSTIVE_LIMIT:
        raise CodeError(f"exhaustive sweep limited to n <= {EXHAUSTIVE_LIMIT}, code has n={code.n}")


def partition_census(code: StabilizerCode) -> PartitionCensus:
    _check_exhaustive(code)
    counts = {c: 0 for c in ErrorClass}
    for p in enumerate_classes(code.n):
        counts[code.classify(p)] += 1
    return PartitionCensus(counts[ErrorClass.STABILIZER], counts[ErrorClass.LOGICAL], counts[ErrorClass.DETECTABLE])


def logical_classes(code: StabilizerCode) -> list[PauliClass]:
    """Every class in SL minus S, in enumeration order."""
    _check_exhaustive(code)
    return [p for p in enumerate_classes(code.n) if code.classify(p) is ErrorClass.LOGICAL]


def compute_distance(code: StabilizerCode) -> int:
    """Minimum weight of an undetectable logical error (brute force)."""
    if code.k == 0:
        raise CodeError("distance is undefined for k = 0 (no logical operators)")
    return min(p.weight for p in logical_classes(code))
