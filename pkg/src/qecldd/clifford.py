"""Clifford circuits acting on Paulis by conjugation.

A circuit is an ordered gate list; ``conjugate(p, c)`` pushes ``p`` through the
gates in application order, i.e. returns ``U p U^dagger`` for the circuit
unitary ``U = g_m ... g_1``.  Every supported gate is a Hermitian involution,
so the inverse circuit is the reversed gate list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliClass, PauliError, PauliLike, PauliOperator, as_operator, commutes
from .stabcode import CodeError, StabilizerCode, Syndrome, all_syndromes

GATE_ARITY = {"H": 1, "HY": 1, "X": 1, "Z": 1, "CNOT": 2, "SWAP": 2}

_SQ2 = 1 / np.sqrt(2)
_GATE_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "HY": np.array([[0, 1 - 1j], [1 + 1j, 0]], dtype=complex) * _SQ2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class CliffordGate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {GATE_ARITY[self.kind]} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind} needs distinct qubits, got {qubits}")
        if min(qubits) < 1:
            raise ValueError(f"qubit indices are 1-based, got {qubits}")

    def matrix(self) -> np.ndarray:
        """2x2 matrix of a single-qubit gate."""
        return _GATE_MATRICES[self.kind]

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


def H(q: int) -> CliffordGate:
    return CliffordGate("H", (q,))


def HY(q: int) -> CliffordGate:
    return CliffordGate("HY", (q,))


def X(q: int) -> CliffordGate:
    return CliffordGate("X", (q,))


def Z(q: int) -> CliffordGate:
    return CliffordGate("Z", (q,))


def CNOT(control: int, target: int) -> CliffordGate:
    return CliffordGate("CNOT", (control, target))


def SWAP(a: int, b: int) -> CliffordGate:
    return CliffordGate("SWAP", (a, b))


def parse_gate(line: str) -> CliffordGate:
    parts = line.split()
    if not parts:
        raise ValueError("empty gate line")
    try:
        return CliffordGate(parts[0].upper(), tuple(int(t) for t in parts[1:]))
    except ValueError as exc:
        raise ValueError(f"bad gate line {line!r}: {exc}") from exc


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: tuple[CliffordGate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) > self.n:
                raise ValueError(f"gate {g} touches a qubit outside [1, {self.n}]")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def then(self, other: CliffordCircuit | Iterable[CliffordGate]) -> CliffordCircuit:
        extra = other.gates if isinstance(other, CliffordCircuit) else tuple(other)
        return CliffordCircuit(self.n, self.gates + tuple(extra))

    def to_text(self) -> str:
        lines = [f"# qubits: {self.n}"] + [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> CliffordCircuit:
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("qubits:"):
                    n = int(body.split(":", 1)[1])
                continue
            gates.append(parse_gate(line))
        if n is None:
            n = max((max(g.qubits) for g in gates), default=1)
        return cls(n, tuple(gates))

    def unitary(self) -> np.ndarray:
        """Dense ``2**n`` unitary ``g_m ... g_1``."""
        dim = 1 << self.n
        u = np.eye(dim, dtype=complex)
        for g in self.gates:
            u = gate_unitary(g, self.n) @ u
        return u


def gate_unitary(g: CliffordGate, n: int) -> np.ndarray:
    """Dense ``2**n`` matrix of a gate, qubit 1 most significant."""
    dim = 1 << n
    if g.kind in _GATE_MATRICES:
        (q,) = g.qubits
        return np.kron(np.kron(np.eye(1 << (q - 1)), g.matrix()), np.eye(1 << (n - q)))
    u = np.zeros((dim, dim), dtype=complex)
    a, b = g.qubits
    sa, sb = n - a, n - b
    for i in range(dim):
        if g.kind == "CNOT":
            j = i ^ (1 << sb) if (i >> sa) & 1 else i
        else:
            ba, bb = (i >> sa) & 1, (i >> sb) & 1
            j = i & ~((1 << sa) | (1 << sb)) | (bb << sa) | (ba << sb)
        u[j, i] = 1
    return u


def conjugate_gate(p: PauliOperator, g: CliffordGate) -> PauliOperator:
    """``g p g`` for a single (self-inverse) gate, phase exact."""
    n = p.n
    if max(g.qubits) > n:
        raise PauliError(f"gate {g} outside a {n}-qubit operator")
    x, z, phase = p.x, p.z, p.phase_exp
    if g.kind == "CNOT" or g.kind == "SWAP":
        a, b = (n - q for q in g.qubits)
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        if g.kind == "CNOT":
            # control a, target b: X_a -> X_a X_b, Z_b -> Z_a Z_b
            if xa and zb and not (xb ^ za):
                phase += 2
            x ^= xa << b
            z ^= zb << a
        else:
            x = x & ~((1 << a) | (1 << b)) | (xb << a) | (xa << b)
            z = z & ~((1 << a) | (1 << b)) | (zb << a) | (za << b)
        return PauliOperator(n, x, z, phase % 4)
    s = n - g.qubits[0]
    xq, zq = (x >> s) & 1, (z >> s) & 1
    if g.kind == "X":
        phase += 2 * zq
    elif g.kind == "Z":
        phase += 2 * xq
    elif g.kind == "H":
        # X <-> Z, Y -> -Y
        phase += 2 * (xq & zq)
        x = x & ~(1 << s) | (zq << s)
        z = z & ~(1 << s) | (xq << s)
    elif g.kind == "HY":
        # X <-> Y, Z -> -Z
        phase += 2 * ((1 - xq) & zq)
        z ^= xq << s
    return PauliOperator(n, x, z, phase % 4)


def conjugate(p: PauliLike | str, c: CliffordCircuit) -> PauliOperator:
    """Push ``p`` through ``c`` gate by gate: ``U p U^dagger``."""
    p = as_operator(p)
    if p.n != c.n:
        raise PauliError(f"size mismatch: operator on {p.n} qubits, circuit on {c.n}")
    for g in c.gates:
        p = conjugate_gate(p, g)
    return p


def invert_circuit(c: CliffordCircuit) -> CliffordCircuit:
    return CliffordCircuit(c.n, tuple(reversed(c.gates)))


def _target_frame(code: StabilizerCode) -> list[tuple[str, PauliOperator, PauliOperator]]:
    """(label, code operator, trivial-code image) in the synthesis order."""
    n, k = code.n, code.k
    rows = []
    for j in range(k):
        rows.append((f"logical_x[{j + 1}]", code.logical_x[j], PauliClass.single(n, j + 1, "X").operator()))
        rows.append((f"logical_z[{j + 1}]", code.logical_z[j], PauliClass.single(n, j + 1, "Z").operator()))
    for j, s in enumerate(code.stabilizers):
        rows.append((f"stabilizer[{j + 1}]", s, PauliClass.single(n, k + j + 1, "Z").operator()))
    return rows


class _Synth:
    def __init__(self, code: StabilizerCode):
        self.n = code.n
        self.k = code.k
        self.ops = [row[1] for row in _target_frame(code)]
        self.gates: list[CliffordGate] = []

    def apply(self, g: CliffordGate) -> None:
        self.gates.append(g)
        self.ops = [conjugate_gate(p, g) for p in self.ops]

    def make_x_only(self, i: int, start: int) -> None:
        p = self.ops[i]
        for q in range(start, self.n + 1):
            letter = p.letter(q)
            if letter == "Z":
                self.apply(H(q))
            elif letter == "Y":
                self.apply(HY(q))

    def make_z_only(self, i: int, start: int) -> None:
        p = self.ops[i]
        for q in range(start, self.n + 1):
            letter = p.letter(q)
            if letter == "X":
                self.apply(H(q))
            elif letter == "Y":
                self.apply(HY(q))
                self.apply(H(q))

    def pivot(self, i: int, q: int, letter: str) -> None:
        """SWAP the lowest later qubit carrying ``letter`` into position ``q``."""
        p = self.ops[i]
        if p.letter(q) == letter:
            return
        for r in range(q + 1, self.n + 1):
            if p.letter(r) == letter:
                self.apply(SWAP(q, r))
                return
        raise CodeError(f"operator {p} has no support on qubits >= {q}")


def synthesize_unencoder(code: StabilizerCode) -> CliffordCircuit:
    """Clifford circuit sending the code to the trivial code.

    Conjugating ``(X1bar, Z1bar, ..., Xkbar, Zkbar, S1, ..., S_{n-k})`` by the
    result gives ``(+X_1, +Z_1, ..., +X_k, +Z_k, +Z_{k+1}, ..., +Z_n)``.
    """
    s = _Synth(code)
    n, k = code.n, code.k
    for j in range(k):
        q = j + 1
        xi, zi = 2 * j, 2 * j + 1
        s.make_x_only(xi, q)
        s.pivot(xi, q, "X")
        if s.ops[xi].sign < 0:
            s.apply(Z(q))
        for r in range(q + 1, n + 1):
            if s.ops[xi].letter(r) == "X":
                s.apply(CNOT(q, r))
        # logical Z now anticommutes with X_q, so it carries Z or Y on q
        if s.ops[zi].letter(q) == "Y":
            # fixes X_q, sends Y_q -> -Z_q
            for g in (H(q), HY(q), H(q), Z(q)):
                s.apply(g)
        s.make_z_only(zi, q + 1)
        if s.ops[zi].sign < 0:
            s.apply(X(q))
        for r in range(q + 1, n + 1):
            if s.ops[zi].letter(r) == "Z":
                s.apply(CNOT(r, q))
    _reduce_stabilizers(s, 0)
    circuit = CliffordCircuit(n, tuple(s.gates))
    return circuit


def _reduce_stabilizers(s: _Synth, level: int) -> None:
    n, k = s.n, s.k
    if level >= n - k:
        return
    q = k + level + 1
    i = 2 * k + level
    s.make_z_only(i, q)
    s.pivot(i, q, "Z")
    if s.ops[i].sign < 0:
        s.apply(X(q))
    for r in range(q + 1, n + 1):
        if s.ops[i].letter(r) == "Z":
            s.apply(CNOT(r, q))
    _reduce_stabilizers(s, level + 1)
    for m in range(i + 1, 2 * k + (n - k)):
        if s.ops[m].letter(q) == "Z":
            s.apply(CNOT(q, k + (m - 2 * k) + 1))
    for m in range(i + 1, 2 * k + (n - k)):
        if s.ops[m].sign < 0:
            s.apply(X(k + (m - 2 * k) + 1))


@dataclass(frozen=True)
class UnencoderReport:
    checks: tuple[tuple[str, PauliOperator, PauliOperator], ...]  # label, expected, got

    @property
    def failures(self) -> list[tuple[str, PauliOperator, PauliOperator]]:
        return [c for c in self.checks if c[1] != c[2]]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> tuple[str, PauliOperator, PauliOperator] | None:
        fails = self.failures
        return fails[0] if fails else None


def verify_unencoder(code: StabilizerCode, circuit: CliffordCircuit) -> UnencoderReport:
    if circuit.n != code.n:
        raise CodeError(f"circuit on {circuit.n} qubits, code has n={code.n}")
    checks = tuple((label, target, conjugate(op, circuit)) for label, op, target in _target_frame(code))
    return UnencoderReport(checks)


@dataclass(frozen=True)
class RecoveryTable:
    """Syndrome -> recovery Pauli, syndrome bits in stabilizer-generator order."""

    n: int
    entries: dict[Syndrome, PauliOperator]

    def __getitem__(self, s: Sequence[int]) -> PauliOperator:
        return self.entries[tuple(s)]

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items())

    @classmethod
    def from_strings(cls, n: int, entries: dict[Sequence[int], str]) -> RecoveryTable:
        return cls(n, {tuple(s): as_operator(p) for s, p in entries.items()})


def derive_recovery_table(code: StabilizerCode, unencoder: CliffordCircuit) -> RecoveryTable:
    """Pull the trivial-frame bit flips ``prod_j X_{k+j}^{s_j}`` back to the code."""
    report = verify_unencoder(code, unencoder)
    if not report.ok:
        label, expected, got = report.first_failure
        raise CodeError(f"unencoder fails at {label}: expected {expected}, got {got}")
    back = invert_circuit(unencoder)
    n, k = code.n, code.k
    entries = {}
    for s in all_syndromes(code):
        x = 0
        for j, bit in enumerate(s):
            if bit:
                x |= 1 << (n - (k + j + 1))
        entries[s] = conjugate(PauliOperator(n, x, 0), back)
    return RecoveryTable(n, entries)


def recovery_anticommutation_ok(code: StabilizerCode, table: RecoveryTable) -> bool:
    """Each R_s anticommutes exactly with the generators flagged in s."""
    for s, r in table.entries.items():
        if tuple(0 if commutes(r, g) else 1 for g in code.stabilizers) != s:
            return False
    return True


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> CliffordCircuit:
    """Uniformly drawn gate kinds and qubits; for tests and benchmarks."""
    kinds = ["H", "HY", "X", "Z"] + (["CNOT", "SWAP"] if n > 1 else [])
    gates = []
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        qubits = rng.choice(np.arange(1, n + 1), size=GATE_ARITY[kind], replace=False)
        gates.append(CliffordGate(kind, tuple(int(q) for q in qubits)))
    return CliffordCircuit(n, tuple(gates))


def transform_code(code: StabilizerCode, c: CliffordCircuit, name: str = "") -> StabilizerCode:
    """The image code ``U C`` with every generator and logical conjugated."""
    return StabilizerCode(
        code.n,
        code.k,
        tuple(conjugate(s, c) for s in code.stabilizers),
        tuple(conjugate(p, c) for p in code.logical_x),
        tuple(conjugate(p, c) for p in code.logical_z),
        name or code.name,
    )
