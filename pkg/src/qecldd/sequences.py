"""Pulse layers, pulse sequences and their text format.

A sequence cycle is ``f_tau, layer_1, f_tau, layer_2, ..., f_tau, layer_L``:
every layer is preceded by one free-evolution interval of length ``tau``.

Layer tokens, one per qubit: ``.`` idle, ``X``/``Y``/``Z`` a positive pi
rotation, lowercase a negative one.  Sequences built from explicit phase lists
use whitespace-separated tokens and ``P<degrees>`` / ``p<degrees>`` for an
in-plane rotation axis.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .pauli import PauliClass, PauliError, PauliLike, as_class, independent

DEFAULT_TAU = 0.625  # microseconds
MAX_GRAY_GENERATORS = 8


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class Pulse:
    """A pi rotation.  ``axis`` is X, Y, Z, or P (in-plane at angle ``phi``)."""

    axis: str
    sign: int = 1
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.axis not in ("X", "Y", "Z", "P"):
            raise SequenceError(f"unknown pulse axis {self.axis!r}")
        if self.sign not in (1, -1):
            raise SequenceError(f"pulse sign must be +1 or -1, got {self.sign}")

    @property
    def letter(self) -> str:
        """Pauli letter of the ideal pulse (up to phase)."""
        if self.axis != "P":
            return self.axis
        quarter = self.phi / (math.pi / 2)
        if abs(quarter - round(quarter)) > 1e-12:
            raise PauliError(f"pulse at phase {math.degrees(self.phi):g} deg is not a Pauli")
        return "X" if round(quarter) % 2 == 0 else "Y"

    def token(self) -> str:
        if self.axis == "P":
            t = f"P{math.degrees(self.phi):g}"
        else:
            t = self.axis
        return t if self.sign > 0 else t.lower()


_TOKEN_RE = re.compile(r"[Pp][-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?|\S")


def _parse_token(tok: str) -> Pulse | None:
    if tok == ".":
        return None
    if tok in ("X", "Y", "Z"):
        return Pulse(tok, 1)
    if tok in ("x", "y", "z"):
        return Pulse(tok.upper(), -1)
    if tok[:1] in ("P", "p") and len(tok) > 1:
        try:
            deg = float(tok[1:])
        except ValueError:
            raise SequenceError(f"bad phased-pulse token {tok!r}") from None
        return Pulse("P", 1 if tok[0] == "P" else -1, math.radians(deg))
    raise SequenceError(f"bad pulse token {tok!r}")


@dataclass(frozen=True)
class PulseLayer:
    """Simultaneous pulses, one slot per qubit (None = idle)."""

    pulses: tuple[Pulse | None, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise SequenceError("empty pulse layer")

    @property
    def n(self) -> int:
        return len(self.pulses)

    @classmethod
    def parse(cls, text: str) -> PulseLayer:
        toks = _TOKEN_RE.findall(text)
        return cls(tuple(_parse_token(t) for t in toks))

    @classmethod
    def from_pauli(cls, p: PauliLike | str) -> PulseLayer:
        p = as_class(p)
        return cls(tuple(None if (l := p.letter(q)) == "I" else Pulse(l) for q in range(1, p.n + 1)))

    @property
    def cls(self) -> PauliClass:
        return as_class("".join("I" if pl is None else pl.letter for pl in self.pulses))

    @property
    def has_z(self) -> bool:
        return any(pl is not None and pl.axis == "Z" for pl in self.pulses)

    def to_text(self) -> str:
        toks = ["." if pl is None else pl.token() for pl in self.pulses]
        return " ".join(toks) if any(len(t) > 1 for t in toks) else "".join(toks)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class PulseSequence:
    name: str
    layers: tuple[PulseLayer, ...]
    tau: float = DEFAULT_TAU

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise SequenceError("a sequence needs at least one layer")
        if len({l.n for l in self.layers}) != 1:
            raise SequenceError("layers act on different numbers of qubits")
        if not self.tau > 0:
            raise SequenceError(f"tau must be positive, got {self.tau}")

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def cycle_time(self) -> float:
        return len(self.layers) * self.tau

    def __len__(self) -> int:
        return len(self.layers)

    def classes(self) -> list[PauliClass]:
        return [l.cls for l in self.layers]

    def frames(self) -> list[PauliClass]:
        """Cumulative pulse product in force during each interval."""
        cur = PauliClass.identity(self.n)
        out = []
        for l in self.layers:
            out.append(cur)
            cur = cur * l.cls
        return out

    def closes(self) -> bool:
        cur = PauliClass.identity(self.n)
        for c in self.classes():
            cur = cur * c
        return cur.is_identity

    @property
    def contains_z(self) -> bool:
        return any(l.has_z for l in self.layers)

    def row(self, qubit: int) -> list[str]:
        """Per-layer tokens on one qubit."""
        return ["." if (p := l.pulses[qubit - 1]) is None else p.token() for l in self.layers]

    def with_tau(self, tau: float) -> PulseSequence:
        return PulseSequence(self.name, self.layers, tau)

    def to_text(self) -> str:
        head = [f"# name: {self.name}", f"# n: {self.n}", f"# tau: {self.tau!r}"]
        return "\n".join(head + [l.to_text() for l in self.layers]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> PulseSequence:
        meta: dict[str, str] = {}
        layers = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, val = line[1:].partition(":")
                if sep:
                    meta[key.strip().lower()] = val.strip()
                continue
            try:
                layers.append(PulseLayer.parse(line))
            except SequenceError as exc:
                raise SequenceError(f"line {lineno}: {exc}") from None
        try:
            tau = float(meta.get("tau", DEFAULT_TAU))
        except ValueError:
            raise SequenceError(f"bad tau {meta['tau']!r}") from None
        seq = cls(meta.get("name", "custom"), tuple(layers), tau)
        if "n" in meta and int(meta["n"]) != seq.n:
            raise SequenceError(f"header says n={meta['n']} but layers have {seq.n} qubits")
        return seq


def gray_sequence(generators: Sequence[PauliLike | str], tau: float = DEFAULT_TAU, name: str = "gray") -> PulseSequence:
    """Walk the group generated by ``generators`` along a reflected Gray code.

    With ``m`` generators the frames are ``g_j = prod_i h_i^{a_j[i]}``,
    ``a_j = j ^ (j >> 1)``; layer ``j`` is ``g_j g_{j+1}`` (index mod ``2**m``),
    which is the generator whose bit flips.  Bit 0 is the first generator.
    """
    gens = [as_class(g) for g in generators]
    if not gens:
        raise SequenceError("need at least one generator")
    if len(gens) > MAX_GRAY_GENERATORS:
        raise SequenceError(f"at most {MAX_GRAY_GENERATORS} generators, got {len(gens)}")
    if len({g.n for g in gens}) != 1:
        raise SequenceError("generators act on different numbers of qubits")
    if not independent(gens):
        raise SequenceError("generators are not independent")
    m = len(gens)
    size = 1 << m
    layers = []
    for j in range(size):
        a, b = j ^ (j >> 1), ((j + 1) % size) ^ (((j + 1) % size) >> 1)
        bit = (a ^ b).bit_length() - 1
        layers.append(PulseLayer.from_pauli(gens[bit]))
    return PulseSequence(name, tuple(layers), tau)


# Layer tables on the chain 1-2-3-4.  Logical variants pulse qubits 1,3 and
# 2,4 alternately so chain neighbours never fire together.
_NAMED = {
    "XY4": ["X", "Y", "X", "Y"],
    "UR4": ["X", "x", "x", "X"],
    "LXX": ["X.X.", ".X.X", "X.X.", ".X.X"],
    "LXY4": ["X.X.", ".Y.Y", "X.X.", ".Y.Y"],
    "RLXX": ["X.X.", ".X.X", "x.x.", ".x.x", "x.x.", ".x.x", "X.X.", ".X.X"],
    "RLXY4": ["X.X.", ".Y.Y", "x.x.", ".y.y", "x.x.", ".y.y", "X.X.", ".Y.Y"],
    "SXY4": ["X.X.", ".X.X", "Y.Y.", ".Y.Y", "X.X.", ".X.X", "Y.Y.", ".Y.Y"],
}

NAMED_SEQUENCES = tuple(_NAMED)


def named_sequence(name: str, tau: float = DEFAULT_TAU) -> PulseSequence:
    key = name.upper()
    if key not in _NAMED:
        raise SequenceError(f"unknown sequence {name!r}; known: {', '.join(NAMED_SEQUENCES)}")
    return PulseSequence(key, tuple(PulseLayer.parse(t) for t in _NAMED[key]), tau)


def phased_sequence(
    phases_deg: Iterable[float], n: int = 1, qubits: Iterable[int] | None = None, tau: float = DEFAULT_TAU, name: str = "phased"
) -> PulseSequence:
    """One in-plane pi pulse per layer, at the given phase, on ``qubits`` (default all)."""
    targets = set(range(1, n + 1) if qubits is None else qubits)
    if not targets or min(targets) < 1 or max(targets) > n:
        raise SequenceError(f"target qubits {sorted(targets)} outside [1, {n}]")
    layers = []
    for deg in phases_deg:
        pulse = Pulse("P", 1, math.radians(float(deg)))
        layers.append(PulseLayer(tuple(pulse if q in targets else None for q in range(1, n + 1))))
    return PulseSequence(name, tuple(layers), tau)


def read_sequence(path: str) -> PulseSequence:
    with open(path, encoding="utf-8") as fh:
        return PulseSequence.from_text(fh.read())


def resolve_sequence(spec: str | None, tau: float | None = None) -> PulseSequence | None:
    """Named sequence, sequence file path, or None for free evolution."""
    if spec is None or spec.strip().lower() in ("", "none", "nodd", "free"):
        return None
    if spec.upper() in _NAMED:
        seq = named_sequence(spec)
    else:
        try:
            seq = read_sequence(spec)
        except OSError as exc:
            raise SequenceError(f"{spec!r} is neither a known sequence nor a readable file ({exc.strerror})") from None
    return seq if tau is None else seq.with_tau(tau)
