"""Bitstring interpretation, postselection, fidelity estimates and bootstrap."""

from __future__ import annotations

import csv
import enum
import math
from collections import defaultdict
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .clifford import invert_circuit
from .noisesim import N_QUBITS, ExperimentResult, apply_circuit, bell_encoder, bell_label, bell_state, bitstrings
from .pauli import PauliClass, PauliOperator, to_matrix
from .stabcode import builtin_422

Counts = Mapping[str, int]

SUMMARY_COLUMNS = (
    "delay_us",
    "fidelity_raw",
    "fidelity_postselected",
    "discard_rate",
    "logical_x",
    "logical_y",
    "logical_z",
    "bootstrap_std",
)
HISTOGRAM_COLUMNS = ("delay_us", "bitstring", "count")
CENSUS_STRINGS = ("0000", "0110", "0100", "0010")


class OutcomeClass(enum.Enum):
    FIDELITY = "Fidelity"
    LOGICAL_X = "LogicalX"
    LOGICAL_Y = "LogicalY"
    LOGICAL_Z = "LogicalZ"
    PHYSICAL_DETECTED = "PhysicalDetected"


def _logical_ops() -> dict[OutcomeClass, PauliOperator]:
    code = builtin_422()
    lx, lz = code.logical_x[0], code.logical_z[0]
    return {
        OutcomeClass.FIDELITY: PauliOperator.identity(N_QUBITS),
        OutcomeClass.LOGICAL_X: lx,
        OutcomeClass.LOGICAL_Y: (lx * lz).with_phase((lx * lz).phase_exp + 1),
        OutcomeClass.LOGICAL_Z: lz,
    }


def _unencoded(chi_prime: str, psi: np.ndarray) -> np.ndarray:
    return apply_circuit(psi, invert_circuit(bell_encoder(chi_prime)))[0]


def _basis_string(state: np.ndarray) -> str:
    k = int(np.argmax(np.abs(state)))
    if abs(abs(state[k]) - 1) > 1e-9:
        raise AssertionError("unencoded state is not a computational basis state")
    return format(k, f"0{N_QUBITS}b")


@lru_cache(maxsize=None)
def outcome_table(chi: str, chi_prime: str) -> dict[str, OutcomeClass]:
    """The four logical-basis strings and the logical error each one reports."""
    chi, chi_prime = bell_label(chi), bell_label(chi_prime)
    psi = bell_state(chi)
    table = {}
    for cls, op in _logical_ops().items():
        table[_basis_string(_unencoded(chi_prime, to_matrix(op) @ psi))] = cls
    return table


def logical_strings(chi: str = "Phi+", chi_prime: str = "Phi-") -> frozenset[str]:
    return frozenset(outcome_table(chi, chi_prime))


def classify_bitstring(b: str, chi: str, chi_prime: str) -> OutcomeClass:
    if len(b) != N_QUBITS or set(b) - {"0", "1"}:
        raise ValueError(f"expected a {N_QUBITS}-bit string, got {b!r}")
    return outcome_table(chi, chi_prime).get(b, OutcomeClass.PHYSICAL_DETECTED)


@lru_cache(maxsize=None)
def physical_attribution(chi: str, chi_prime: str, letters: str = "XYZ") -> dict[str, tuple[str, ...]]:
    """Bitstring -> single-qubit errors (e.g. ``Z2``) that produce it just before unencoding."""
    psi = bell_state(chi)
    out: dict[str, list[str]] = defaultdict(list)
    for letter in letters:
        for q in range(1, N_QUBITS + 1):
            err = PauliClass.single(N_QUBITS, q, letter)
            out[_basis_string(_unencoded(chi_prime, to_matrix(err) @ psi))].append(f"{letter}{q}")
    return {b: tuple(v) for b, v in sorted(out.items())}


def postselect(counts: Counts, chi: str = "Phi+", chi_prime: str = "Phi-") -> tuple[dict[str, int], float]:
    """Keep the logical-basis strings; also return the discarded fraction."""
    keep = logical_strings(chi, chi_prime)
    total = sum(counts.values())
    kept = {b: c for b, c in counts.items() if b in keep}
    if total == 0:
        raise ValueError("empty histogram")
    return kept, 1.0 - sum(kept.values()) / total


def class_frequencies(counts: Counts, chi: str, chi_prime: str) -> dict[OutcomeClass, float]:
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empty histogram")
    freq = {c: 0.0 for c in OutcomeClass}
    for b, c in counts.items():
        freq[classify_bitstring(b, chi, chi_prime)] += c / total
    return freq


def _fidelity_string(chi: str, chi_prime: str) -> str:
    return next(b for b, c in outcome_table(chi, chi_prime).items() if c is OutcomeClass.FIDELITY)


def estimate_fidelity(counts: Counts, chi: str, chi_prime: str, postselected: bool = False) -> tuple[float, float]:
    """Fidelity-string fraction and its binomial standard error."""
    if postselected:
        counts, _ = postselect(counts, chi, chi_prime)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no shots left to estimate fidelity from")
    p = counts.get(_fidelity_string(chi, chi_prime), 0) / total
    return p, math.sqrt(p * (1 - p) / total)


def bootstrap(values: Sequence[float], resamples: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Sample mean and the standard deviation of bootstrap-resampled means."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("bootstrap needs at least one value")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if np.all(vals == vals[0]):
        return float(vals[0]), 0.0
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, vals.size, size=(resamples, vals.size))
    means = vals[idx].mean(axis=1)
    return float(vals.mean()), float(means.std())


def histogram_bootstrap_std(counts: Counts, chi: str, chi_prime: str, resamples: int = 200, seed: int = 0) -> float:
    """Bootstrap std of the raw fidelity, resampling shots from the histogram."""
    labels = bitstrings()
    n = np.array([counts.get(b, 0) for b in labels])
    total = int(n.sum())
    if total == 0:
        raise ValueError("empty histogram")
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(total, n / total, size=resamples)
    fid = draws[:, labels.index(_fidelity_string(chi, chi_prime))] / total
    return float(fid.std())


def summary_rows(result: ExperimentResult, resamples: int = 200) -> list[dict[str, float]]:
    spec = result.spec
    rows = []
    for di, d in enumerate(result.delays):
        chi, chp = spec.chi, spec.chi_prime
        raw, _ = estimate_fidelity(d.counts, chi, chp)
        kept, discard = postselect(d.counts, chi, chp)
        post = estimate_fidelity(kept, chi, chp)[0] if kept else float("nan")
        freq = class_frequencies(d.counts, chi, chp)
        rows.append(
            {
                "delay_us": d.delay_effective,
                "fidelity_raw": raw,
                "fidelity_postselected": post,
                "discard_rate": discard,
                "logical_x": freq[OutcomeClass.LOGICAL_X],
                "logical_y": freq[OutcomeClass.LOGICAL_Y],
                "logical_z": freq[OutcomeClass.LOGICAL_Z],
                "bootstrap_std": histogram_bootstrap_std(d.counts, chi, chp, resamples, seed=[spec.seed, di]),
            }
        )
    return rows


def error_census(result: ExperimentResult, strings: Iterable[str] = CENSUS_STRINGS) -> list[dict[str, float]]:
    """Relative frequency of selected bitstrings at each delay."""
    strings = tuple(strings)
    out = []
    for d in result.delays:
        total = d.shots
        row = {"delay_us": d.delay_effective}
        row.update({b: d.counts.get(b, 0) / total for b in strings})
        out.append(row)
    return out


def _fmt(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else format(x, ".10g")


def write_histogram_csv(path, result: ExperimentResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTOGRAM_COLUMNS)
        for delay, b, c in result.histogram_rows():
            w.writerow([_fmt(delay), b, c])


def write_summary_csv(path, rows: Sequence[Mapping[str, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in SUMMARY_COLUMNS])


def read_summary_csv(path) -> list[dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(SUMMARY_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        rows = []
        for lineno, r in enumerate(reader, 2):
            try:
                rows.append({c: float(r[c]) for c in SUMMARY_COLUMNS})
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return rows


def aggregate_summaries(
    tables: Sequence[Sequence[Mapping[str, float]]], column: str = "fidelity_raw", resamples: int = 1000, seed: int = 0
) -> list[dict[str, float]]:
    """Per-delay bootstrap over independent runs (one value per run)."""
    if not tables:
        raise ValueError("no summary tables given")
    if column not in SUMMARY_COLUMNS or column == "delay_us":
        raise ValueError(f"cannot aggregate column {column!r}")
    by_delay: dict[float, list[float]] = defaultdict(list)
    for rows in tables:
        for r in rows:
            by_delay[r["delay_us"]].append(r[column])
    out = []
    for delay in sorted(by_delay):
        vals = [v for v in by_delay[delay] if not math.isnan(v)]
        if not vals:
            out.append({"delay_us": delay, "runs": 0, "mean": float("nan"), "std": float("nan")})
            continue
        mean, std = bootstrap(vals, resamples, seed)
        out.append({"delay_us": delay, "runs": len(vals), "mean": mean, "std": std})
    return out
