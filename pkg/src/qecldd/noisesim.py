"""Monte Carlo statevector simulation of the logical Bell-state experiment.

Each shot: draw quasi-static detunings, start from the encoded Bell state,
evolve under static ZZ couplings plus the detunings (with optional DD pulse
layers), unencode into the target Bell frame, and sample one bitstring.

Shots are simulated in fixed-size chunks with elementwise numpy operations, and
every shot owns its RNG stream keyed by ``(seed, delay index, shot index)``,
so histograms do not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .clifford import CNOT, SWAP, CliffordCircuit, CliffordGate, H, X, Z, gate_unitary, invert_circuit
from .sequences import Pulse, PulseLayer, PulseSequence

log = logging.getLogger(__name__)

N_QUBITS = 4
CHUNK = 256
BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")
_ALIASES = {"Φ+": "Phi+", "Φ-": "Phi-", "Ψ+": "Psi+", "Ψ-": "Psi-", "Φ−": "Phi-", "Ψ−": "Psi-"}


def bell_label(label: str) -> str:
    key = _ALIASES.get(label.strip(), label.strip())
    for b in BELL_LABELS:
        if key.lower() == b.lower():
            return b
    raise ValueError(f"unknown Bell label {label!r}; expected one of {', '.join(BELL_LABELS)}")


@dataclass(frozen=True)
class NoiseModel:
    """Classical diagonal noise: static ZZ couplings and Z detunings (rad/us).

    ``detuning_std`` sets the Gaussian quasi-static detuning redrawn per shot,
    ``static_detuning`` a fixed offset, ``over_rotation`` the fractional pi
    pulse error.
    """

    zz: Mapping[tuple[int, int], float] = field(default_factory=dict)
    detuning_std: tuple[float, ...] = (0.0,) * N_QUBITS
    static_detuning: tuple[float, ...] = (0.0,) * N_QUBITS
    over_rotation: float = 0.0
    n: int = N_QUBITS
    label: str = "custom"

    def __post_init__(self) -> None:
        zz = {}
        for pair, rate in dict(self.zz).items():
            a, b = sorted(int(q) for q in pair)
            if not (1 <= a < b <= self.n):
                raise ValueError(f"coupling {pair} outside qubits 1..{self.n} or not a pair")
            if rate < 0:
                raise ValueError(f"coupling rate for {pair} must be non-negative")
            zz[(a, b)] = zz.get((a, b), 0.0) + float(rate)
        object.__setattr__(self, "zz", zz)
        for name in ("detuning_std", "static_detuning"):
            val = getattr(self, name)
            if np.isscalar(val):
                val = (float(val),) * self.n
            val = tuple(float(v) for v in val)
            if len(val) != self.n:
                raise ValueError(f"{name} needs {self.n} entries, got {len(val)}")
            object.__setattr__(self, name, val)
        if any(s < 0 for s in self.detuning_std):
            raise ValueError("detuning_std must be non-negative")

    @classmethod
    def preset(cls, name: str, **overrides) -> NoiseModel:
        key = name.replace("-", "_").lower()
        if key not in PRESETS:
            raise ValueError(f"unknown noise preset {name!r}; known: {', '.join(PRESETS)}")
        kwargs = dict(PRESETS[key])
        kwargs.update(overrides)
        return cls(label=key, **kwargs)

    @property
    def is_noiseless(self) -> bool:
        return (
            not any(self.zz.values())
            and not any(self.detuning_std)
            and not any(self.static_detuning)
            and self.over_rotation == 0
        )


_CHAIN = {(1, 2): 1.0, (2, 3): 1.0, (3, 4): 1.0}
PRESETS = {
    # tens of kHz of nearest-neighbour ZZ
    "kyiv_like": {"zz": {p: 0.05 for p in _CHAIN}, "detuning_std": 0.02},
    # a few kHz at most
    "marrakesh_like": {"zz": {p: 0.005 for p in _CHAIN}, "detuning_std": 0.02},
    "noiseless": {},
}


def bell_encoder(chi: str) -> CliffordCircuit:
    """Circuit taking |0000> to the encoded logical Bell state ``chi``."""
    chi = bell_label(chi)
    gates: list[CliffordGate] = [H(2), H(3)]
    if chi.endswith("-"):
        gates += [Z(2), Z(3)]
    gates += [CNOT(2, 1), CNOT(3, 4)]
    if chi.startswith("Psi"):
        gates += [X(1), X(4)]
    # SWAP(2,3) acts as the logical CNOT that entangles the two physical Bell pairs
    gates.append(SWAP(2, 3))
    return CliffordCircuit(N_QUBITS, tuple(gates))


def encode_bell(chi: str) -> CliffordCircuit:
    return bell_encoder(chi)


def bell_state(chi: str) -> np.ndarray:
    psi = np.zeros(1 << N_QUBITS, dtype=complex)
    psi[0] = 1
    return bell_encoder(chi).unitary() @ psi


# ---------------------------------------------------------------- kernels


def _apply_1q(states: np.ndarray, q: int, m: np.ndarray, n: int) -> np.ndarray:
    """Apply a 2x2 ``m`` (or a stack of them, shape (shots, 2, 2)) to qubit ``q``."""
    shots = states.shape[0]
    v = states.reshape(shots, 1 << (q - 1), 2, 1 << (n - q))
    a0, a1 = v[:, :, 0, :], v[:, :, 1, :]
    if m.ndim == 2:
        m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    else:
        m00, m01, m10, m11 = (m[:, i, j][:, None, None] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
    out = np.empty_like(v)
    out[:, :, 0, :] = m00 * a0 + m01 * a1
    out[:, :, 1, :] = m10 * a0 + m11 * a1
    return out.reshape(shots, -1)


def _apply_gate(states: np.ndarray, g: CliffordGate, n: int) -> np.ndarray:
    if g.kind in ("CNOT", "SWAP"):
        perm = np.argmax(np.abs(gate_unitary(g, n)), axis=1)
        return states[:, perm]
    return _apply_1q(states, g.qubits[0], g.matrix(), n)


def apply_circuit(states: np.ndarray, c: CliffordCircuit) -> np.ndarray:
    states = np.atleast_2d(states)
    for g in c.gates:
        states = _apply_gate(states, g, c.n)
    return states


def z_signs(n: int) -> np.ndarray:
    """``z[j, b]`` = eigenvalue of Z on qubit j+1 for basis index b."""
    b = np.arange(1 << n)
    return np.array([1 - 2 * ((b >> (n - q)) & 1) for q in range(1, n + 1)], dtype=float)


def diagonal_energy(noise: NoiseModel, detunings: np.ndarray | None = None) -> np.ndarray:
    """Diagonal of the noise Hamiltonian, shape (shots, 2**n) or (2**n,)."""
    zs = z_signs(noise.n)
    e = np.zeros(1 << noise.n)
    for (a, b), xi in noise.zz.items():
        e = e + xi * zs[a - 1] * zs[b - 1]
    for j, d in enumerate(noise.static_detuning):
        e = e + d * zs[j]
    if detunings is None:
        return e
    e = np.broadcast_to(e, (detunings.shape[0], e.size)).copy()
    for j in range(noise.n):
        e += detunings[:, j : j + 1] * zs[j][None, :]
    return e


def evolve_free(states: np.ndarray, energy: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` for diagonal ``H`` given by ``energy``."""
    if t < 0:
        raise ValueError(f"evolution time must be non-negative, got {t}")
    if t == 0:
        return states
    return states * np.exp(-1j * t * energy)


def rotation(pulse: Pulse, eps: float = 0.0) -> np.ndarray:
    """``exp(-i theta sigma / 2)`` with ``theta = sign * pi * (1 + eps)``."""
    theta = pulse.sign * math.pi * (1 + eps)
    if pulse.axis == "X":
        nx, ny, nz = 1.0, 0.0, 0.0
    elif pulse.axis == "Y":
        nx, ny, nz = 0.0, 1.0, 0.0
    elif pulse.axis == "Z":
        nx, ny, nz = 0.0, 0.0, 1.0
    else:
        nx, ny, nz = math.cos(pulse.phi), math.sin(pulse.phi), 0.0
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c - 1j * s * nz, -1j * s * (nx - 1j * ny)], [-1j * s * (nx + 1j * ny), c + 1j * s * nz]])


def apply_pulse_layer(states: np.ndarray, layer: PulseLayer, eps: float = 0.0) -> np.ndarray:
    single = states.ndim == 1
    states = np.atleast_2d(states)
    n = layer.n
    if states.shape[1] != 1 << n:
        raise ValueError(f"layer on {n} qubits, state dimension {states.shape[1]}")
    for q, p in enumerate(layer.pulses, 1):
        if p is not None:
            states = _apply_1q(states, q, rotation(p, eps), n)
    return states[0] if single else states


# ---------------------------------------------------------------- experiment


@dataclass(frozen=True)
class ExperimentSpec:
    chi: str = "Phi+"
    chi_prime: str = "Phi-"
    delays: tuple[float, ...] = (0.0,)
    sequence: PulseSequence | None = None
    shots: int = 1000
    seed: int = 0
    code: str = "422"
    qubit_chain: tuple[int, ...] = (1, 2, 3, 4)

    def __post_init__(self) -> None:
        object.__setattr__(self, "chi", bell_label(self.chi))
        object.__setattr__(self, "chi_prime", bell_label(self.chi_prime))
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))
        if self.code not in ("422", "[[4,2,2]]"):
            raise ValueError(f"only the [[4,2,2]] code is supported by the simulator, got {self.code!r}")
        if int(self.shots) <= 0:
            raise ValueError(f"shots must be positive, got {self.shots}")
        if not self.delays:
            raise ValueError("need at least one delay")
        if any(d < 0 or not math.isfinite(d) for d in self.delays):
            raise ValueError("delays must be finite and non-negative")
        if self.sequence is not None and self.sequence.n != N_QUBITS:
            raise ValueError(f"sequence acts on {self.sequence.n} qubits, experiment uses {N_QUBITS}")
        if sorted(self.qubit_chain) != list(range(1, N_QUBITS + 1)):
            raise ValueError(f"qubit_chain must be a permutation of 1..{N_QUBITS}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def cycles_for(delay: float, seq: PulseSequence | None) -> tuple[int, float]:
    """Whole cycles fitting in ``delay`` and the resulting effective delay."""
    if seq is None:
        return 0, delay
    cycles = int(math.floor(delay / seq.cycle_time + 1e-9))
    return cycles, cycles * seq.cycle_time


@dataclass
class DelayResult:
    delay_requested: float
    delay_effective: float
    cycles: int
    counts: dict[str, int]

    @property
    def shots(self) -> int:
        return sum(self.counts.values())


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    noise: NoiseModel
    delays: list[DelayResult]

    def histogram_rows(self) -> list[tuple[float, str, int]]:
        rows = []
        for d in self.delays:
            for b in sorted(d.counts):
                rows.append((d.delay_effective, b, d.counts[b]))
        return rows


def bitstrings(n: int = N_QUBITS) -> list[str]:
    return [format(i, f"0{n}b") for i in range(1 << n)]


def evolve_delay(
    states: np.ndarray, energy: np.ndarray, seq: PulseSequence | None, delay: float, eps: float = 0.0
) -> np.ndarray:
    cycles, eff = cycles_for(delay, seq)
    if seq is None:
        return evolve_free(states, energy, eff)
    for _ in range(cycles):
        for layer in seq.layers:
            states = evolve_free(states, energy, seq.tau)
            states = apply_pulse_layer(states, layer, eps)
    return states


def final_states(
    spec: ExperimentSpec, noise: NoiseModel, delay: float, detunings: np.ndarray | None = None
) -> np.ndarray:
    """Post-unencoding statevectors, one row per detuning draw."""
    shots = 1 if detunings is None else detunings.shape[0]
    psi0 = bell_state(spec.chi)
    states = np.repeat(psi0[None, :], shots, axis=0)
    energy = diagonal_energy(noise, detunings)
    states = evolve_delay(states, energy, spec.sequence, delay, noise.over_rotation)
    return apply_circuit(states, invert_circuit(bell_encoder(spec.chi_prime)))


def _run_chunk(spec: ExperimentSpec, noise: NoiseModel, delay_idx: int, start: int, stop: int) -> np.ndarray:
    count = stop - start
    det = np.empty((count, noise.n))
    u = np.empty(count)
    std = np.array(noise.detuning_std)
    for i, shot in enumerate(range(start, stop)):
        rng = np.random.default_rng([int(spec.seed), delay_idx, shot])
        det[i] = rng.normal(0.0, 1.0, size=noise.n) * std
        u[i] = rng.random()
    states = final_states(spec, noise, spec.delays[delay_idx], det)
    probs = np.abs(states) ** 2
    cdf = np.cumsum(probs, axis=1)
    idx = (cdf < (u * cdf[:, -1])[:, None]).sum(axis=1)
    idx = np.minimum(idx, probs.shape[1] - 1)
    return np.bincount(idx, minlength=probs.shape[1])


def run_experiment(spec: ExperimentSpec, noise: NoiseModel, workers: int = 1) -> ExperimentResult:
    """Simulate every delay; bit-identical for any ``workers``."""
    if noise.n != N_QUBITS:
        raise ValueError(f"noise model on {noise.n} qubits, experiment uses {N_QUBITS}")
    jobs = []
    for di in range(len(spec.delays)):
        for start in range(0, spec.shots, CHUNK):
            jobs.append((di, start, min(start + CHUNK, spec.shots)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(lambda j: _run_chunk(spec, noise, *j), jobs))
    else:
        partial = [_run_chunk(spec, noise, *j) for j in jobs]
    totals = [np.zeros(1 << N_QUBITS, dtype=np.int64) for _ in spec.delays]
    for (di, _, _), counts in zip(jobs, partial):
        totals[di] += counts
    labels = bitstrings()
    out = []
    for di, delay in enumerate(spec.delays):
        cycles, eff = cycles_for(delay, spec.sequence)
        if abs(eff - delay) > 1e-9:
            log.info("delay %.6g us rounded down to %d whole cycles = %.6g us", delay, cycles, eff)
        counts = {labels[i]: int(c) for i, c in enumerate(totals[di]) if c}
        out.append(DelayResult(delay, eff, cycles, counts))
    return ExperimentResult(spec, noise, out)
