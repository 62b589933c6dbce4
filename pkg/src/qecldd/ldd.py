"""Logical dynamical decoupling: groups, the decoupling test and QEC-LDD checks.

A static Pauli term ``E`` averaged over a Pauli group ``G`` either survives
unchanged (``E`` commutes with all of ``G``) or averages to zero (``E``
anticommutes with some element).  The hybrid scheme pulses the code's logical
operators so every logical error averages out; whatever survives must then be
fixable by the syndrome-keyed recovery table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .clifford import RecoveryTable, derive_recovery_table, recovery_anticommutation_ok, synthesize_unencoder
from .pauli import (
    GeneratedGroup,
    PauliClass,
    PauliError,
    PauliLike,
    as_class,
    commutes,
    enumerate_classes,
    generate_group,
    symplectic_product,
)
from .sequences import (  # noqa: F401  (re-exported)
    NAMED_SEQUENCES,
    PulseLayer,
    PulseSequence,
    gray_sequence,
    named_sequence,
    phased_sequence,
)
from .stabcode import EXHAUSTIVE_LIMIT, CodeError, ErrorClass, StabilizerCode

Z_FREE_422 = ("XXII", "IIYY", "IYIY", "XIXI")
GROUP_VARIANTS = ("canonical", "z_free")


@dataclass(frozen=True)
class DecouplingGroup:
    generators: tuple[PauliClass, ...]
    group: GeneratedGroup

    @classmethod
    def from_generators(cls, generators: Iterable[PauliLike | str], n: int | None = None) -> DecouplingGroup:
        gens = tuple(as_class(g) for g in generators)
        return cls(gens, generate_group(gens, n=n))

    @property
    def n(self) -> int:
        return self.group.n

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def contains_z(self) -> bool:
        """True if some element carries a Z letter on some qubit."""
        return any(p.z & ~p.x for p in self.group.elements)

    def __contains__(self, p: object) -> bool:
        return p in self.group


def _is_422(code: StabilizerCode) -> bool:
    return code.n == 4 and code.k == 2 and set(code.stabilizer_group.elements) == set(
        generate_group(["XXXX", "ZZZZ"]).elements
    )


def ldd_group(code: StabilizerCode, variant: str = "canonical") -> DecouplingGroup:
    """The LDD group of ``code``: its logical operators, or the Z-free [[4,2,2]] set."""
    v = variant.replace("-", "_").lower()
    if v == "canonical":
        return DecouplingGroup.from_generators(code.logical_generators, n=code.n)
    if v == "z_free":
        if not _is_422(code):
            raise CodeError(f"the z-free group is only defined for the [[4,2,2]] code, not {code.label}")
        return DecouplingGroup.from_generators(Z_FREE_422)
    raise ValueError(f"unknown group variant {variant!r}; expected one of {GROUP_VARIANTS}")


def is_decoupled(p: PauliLike | str, g: DecouplingGroup) -> bool:
    """True iff ``p`` anticommutes with at least one generator."""
    p = as_class(p)
    if p.n != g.n:
        raise PauliError(f"size mismatch: {p.n} vs group on {g.n} qubits")
    return any(symplectic_product(p, h) for h in g.generators)


@dataclass(frozen=True)
class DecoupledCensus:
    decoupled: int
    undecoupled: int
    undecoupled_in_s: int
    undecoupled_detectable: int
    undecoupled_logical: int
    decoupled_logical: int
    decoupled_detectable: int

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def decoupled_census(g: DecouplingGroup, code: StabilizerCode) -> DecoupledCensus:
    if code.n > EXHAUSTIVE_LIMIT:
        raise CodeError(f"exhaustive sweep limited to n <= {EXHAUSTIVE_LIMIT}, code has n={code.n}")
    if g.n != code.n:
        raise PauliError(f"size mismatch: group on {g.n} qubits, code has n={code.n}")
    tally = {(d, c): 0 for d in (True, False) for c in ErrorClass}
    for p in enumerate_classes(code.n):
        tally[(is_decoupled(p, g), code.classify(p))] += 1
    S, L, D = ErrorClass.STABILIZER, ErrorClass.LOGICAL, ErrorClass.DETECTABLE
    return DecoupledCensus(
        decoupled=sum(tally[(True, c)] for c in ErrorClass),
        undecoupled=sum(tally[(False, c)] for c in ErrorClass),
        undecoupled_in_s=tally[(False, S)],
        undecoupled_detectable=tally[(False, D)],
        undecoupled_logical=tally[(False, L)],
        decoupled_logical=tally[(True, L)],
        decoupled_detectable=tally[(True, D)],
    )


def code_for_group(code: StabilizerCode, g: DecouplingGroup) -> StabilizerCode:
    """Same stabilizers, with canonical logicals taken from the group.

    Symplectic Gram-Schmidt over the group generators; fails unless they span
    a full set of logical operators.
    """
    pool = [h for h in g.generators]
    for h in pool:
        if not all(commutes(h, s) for s in code.stabilizers):
            raise CodeError(f"group generator {h} is not a logical operator of {code.label}")
    lx, lz = [], []
    while pool:
        a = pool.pop(0)
        if a.is_identity:
            continue
        partner = next((i for i, b in enumerate(pool) if symplectic_product(a, b)), None)
        if partner is None:
            if a in code.stabilizer_group:
                continue
            raise CodeError(f"group generator {a} has no anticommuting partner")
        b = pool.pop(partner)
        rest = []
        for c in pool:
            if symplectic_product(c, b):
                c = c * a
            if symplectic_product(c, a):
                c = c * b
            rest.append(c)
        pool = rest
        lx.append(a.operator())
        lz.append(b.operator())
    if len(lx) != code.k:
        raise CodeError(f"group supplies {len(lx)} logical pairs, code has k={code.k}")
    return code.with_logicals(lx, lz, name=code.name)


def recovery_for_group(code: StabilizerCode, g: DecouplingGroup) -> RecoveryTable:
    """Recovery table whose entries commute with every element of ``g``."""
    frame = code_for_group(code, g)
    return derive_recovery_table(frame, synthesize_unencoder(frame))


@dataclass(frozen=True)
class TheoremReport:
    decoupled: int
    undecoupled: int
    logical_all_decoupled: bool
    undecoupled_all_correctable: bool
    converse_holds: bool
    uncorrectable_single_qubit: int
    single_qubit_bound: int
    undecoupled_single_qubit: tuple[PauliClass, ...] = ()
    witnesses: dict[str, list[PauliClass]] = field(default_factory=dict)

    @property
    def bound_ok(self) -> bool:
        return self.uncorrectable_single_qubit >= self.single_qubit_bound

    @property
    def passed(self) -> bool:
        return self.logical_all_decoupled and self.undecoupled_all_correctable and self.converse_holds and self.bound_ok

    def to_record(self) -> dict:
        return {
            "passed": self.passed,
            "decoupled": self.decoupled,
            "undecoupled": self.undecoupled,
            "logical_all_decoupled": self.logical_all_decoupled,
            "undecoupled_all_correctable": self.undecoupled_all_correctable,
            "converse_holds": self.converse_holds,
            "uncorrectable_single_qubit": self.uncorrectable_single_qubit,
            "single_qubit_bound": self.single_qubit_bound,
            "undecoupled_single_qubit": [str(p) for p in self.undecoupled_single_qubit],
            "witnesses": {k: [str(p) for p in v] for k, v in self.witnesses.items()},
        }


WITNESS_LIMIT = 8


def verify_qec_ldd(code: StabilizerCode, g: DecouplingGroup, table: RecoveryTable) -> TheoremReport:
    """Exhaustive check of the hybrid-scheme guarantees over all 4**n classes."""
    if code.n > EXHAUSTIVE_LIMIT:
        raise CodeError(f"exhaustive sweep limited to n <= {EXHAUSTIVE_LIMIT}, code has n={code.n}")
    if g.n != code.n or table.n != code.n or len(table) != 1 << (code.n - code.k):
        raise CodeError("group, recovery table and code disagree on size")
    if not recovery_anticommutation_ok(code, table):
        raise CodeError("recovery table does not match the code's syndromes")
    stab = code.stabilizer_group
    rec = {s: r.cls for s, r in table.entries.items()}
    wit: dict[str, list[PauliClass]] = {"logical_undecoupled": [], "undecoupled_uncorrected": [], "decoupled_corrected": []}
    n_dec = n_undec = single_dec = 0
    single_undec = []
    for p in enumerate_classes(code.n):
        dec = is_decoupled(p, g)
        kind = code.classify(p)
        if dec:
            n_dec += 1
            if kind is ErrorClass.DETECTABLE and rec[code.syndrome(p)] * p in stab:
                wit["decoupled_corrected"].append(p)
        else:
            n_undec += 1
            if kind is ErrorClass.LOGICAL:
                wit["logical_undecoupled"].append(p)
                wit["undecoupled_uncorrected"].append(p)
            elif kind is ErrorClass.DETECTABLE and rec[code.syndrome(p)] * p not in stab:
                wit["undecoupled_uncorrected"].append(p)
        if p.weight == 1:
            if dec:
                single_dec += 1
            else:
                single_undec.append(p)
    return TheoremReport(
        decoupled=n_dec,
        undecoupled=n_undec,
        logical_all_decoupled=not wit["logical_undecoupled"],
        undecoupled_all_correctable=not wit["undecoupled_uncorrected"],
        converse_holds=not wit["decoupled_corrected"],
        uncorrectable_single_qubit=single_dec,
        single_qubit_bound=3 * code.k,
        undecoupled_single_qubit=tuple(sorted(single_undec, key=lambda c: (c.support(), str(c)))),
        witnesses={k: v[:WITNESS_LIMIT] for k, v in wit.items() if v},
    )


def group_average(g: DecouplingGroup, terms: Sequence[tuple[complex, PauliLike | str]]) -> list[tuple[complex, PauliClass]]:
    """First-order average of ``sum c_i P_i`` over ``g``: keep the undecoupled terms."""
    out = []
    for c, p in terms:
        p = as_class(p)
        if not is_decoupled(p, g):
            out.append((c, p))
    return out


def toggled_signs(seq: PulseSequence, p: PauliLike | str) -> list[int]:
    """Sign of ``p`` in the toggling frame of each free-evolution interval."""
    p = as_class(p)
    if p.n != seq.n:
        raise PauliError(f"size mismatch: {p.n} vs sequence on {seq.n} qubits")
    return [-1 if symplectic_product(p, f) else 1 for f in seq.frames()]


def first_order_cancelled(seq: PulseSequence, p: PauliLike | str) -> bool:
    return sum(toggled_signs(seq, p)) == 0


def pulse_budget(method: str, n: int, k: int) -> int:
    """Pulses per cycle: full Pauli DD, stabilizer-logical DD, or logical DD."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    method = method.lower()
    if method == "pauli":
        return 2 ** (2 * n)
    if method == "sldd":
        return 2 ** (n + k)
    if method == "ldd":
        return 2 ** (2 * k)
    raise ValueError(f"unknown method {method!r}; expected pauli, sldd or ldd")
