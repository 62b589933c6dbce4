"""Command-line interface: ``qecldd <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .analysis import aggregate_summaries, read_summary_csv, summary_rows, write_histogram_csv, write_summary_csv
from .clifford import CliffordCircuit, derive_recovery_table, synthesize_unencoder, verify_unencoder
from .ldd import (
    DecouplingGroup,
    decoupled_census,
    is_decoupled,
    ldd_group,
    recovery_for_group,
    verify_qec_ldd,
)
from .noisesim import ExperimentSpec, NoiseModel, run_experiment
from .pauli import PauliError, parse_pauli
from .sequences import SequenceError, gray_sequence, resolve_sequence
from .stabcode import CodeError, StabilizerCode, builtin_422, partition_census, read_code, trivial_code

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("qecldd")


class InputError(Exception):
    pass


def load_code_arg(text: str) -> StabilizerCode:
    """``422``, ``trivial:N,K`` or a code-definition JSON path."""
    t = text.strip()
    if t in ("422", "[[4,2,2]]", "builtin"):
        return builtin_422()
    if t.lower().startswith("trivial:"):
        try:
            n, k = (int(v) for v in t.split(":", 1)[1].split(","))
        except ValueError:
            raise InputError(f"bad trivial code {text!r}; expected trivial:N,K") from None
        return trivial_code(n, k)
    return read_code(t)


def load_group_arg(text: str, code: StabilizerCode) -> DecouplingGroup:
    t = text.strip()
    if t.lower().startswith("generators="):
        gens = [g for g in t.split("=", 1)[1].split(",") if g]
        if not gens:
            raise InputError("generators= needs at least one Pauli")
        g = DecouplingGroup.from_generators(gens)
        if g.n != code.n:
            raise InputError(f"generators act on {g.n} qubits, code has n={code.n}")
        return g
    return ldd_group(code, t)


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_classify(args) -> int:
    code = load_code_arg(args.code)
    group = load_group_arg(args.group, code) if args.group else None
    out = []
    for text in args.paulis:
        p = parse_pauli(text)
        if p.n != code.n:
            raise InputError(f"{text} acts on {p.n} qubits, code has n={code.n}")
        rec = {"pauli": str(p.cls), "class": code.classify(p).value, "syndrome": "".join(map(str, code.syndrome(p)))}
        if group is not None:
            rec["decoupled"] = is_decoupled(p, group)
        out.append(rec)
    if args.json:
        _emit(out)
    else:
        for r in out:
            extra = f"  decoupled={r['decoupled']}" if "decoupled" in r else ""
            print(f"{r['pauli']}  {r['class']:<10}  syndrome={r['syndrome']}{extra}")
    return EXIT_OK


def cmd_census(args) -> int:
    code = load_code_arg(args.code)
    group = load_group_arg(args.group, code)
    part = partition_census(code)
    dec = decoupled_census(group, code)
    record = {
        "code": code.label,
        "partition": {"stabilizer": part.stabilizer, "logical": part.logical, "detectable": part.detectable},
        "stabilizer_logical_union": part.stabilizer + part.logical,
        "decoupling": dec.as_dict(),
    }
    if args.json:
        _emit(record)
        return EXIT_OK
    print(f"code {code.label}: {4 ** code.n} Pauli classes")
    print(f"  stabilizer      {part.stabilizer:6d}")
    print(f"  logical         {part.logical:6d}")
    print(f"  detectable      {part.detectable:6d}")
    print(f"  S union L       {part.stabilizer + part.logical:6d}")
    print(f"group {args.group}: order {group.order}")
    print(f"  undecoupled     {dec.undecoupled:6d}  (in S {dec.undecoupled_in_s}, detectable {dec.undecoupled_detectable}, logical {dec.undecoupled_logical})")
    print(f"  decoupled       {dec.decoupled:6d}  (logical {dec.decoupled_logical}, detectable {dec.decoupled_detectable})")
    return EXIT_OK


def _recovery(code: StabilizerCode, group: DecouplingGroup):
    try:
        return recovery_for_group(code, group)
    except CodeError as exc:
        # the group is not a full logical set; fall back to the code's own frame
        log.info("using the code's own unencoder for recovery (%s)", exc)
        return derive_recovery_table(code, synthesize_unencoder(code))


def cmd_verify_theorem(args) -> int:
    code = load_code_arg(args.code)
    group = load_group_arg(args.group, code)
    report = verify_qec_ldd(code, group, _recovery(code, group))
    rec = report.to_record()
    rec["code"] = code.label
    rec["group"] = args.group
    _emit(rec)
    if not report.passed:
        for kind, ps in report.witnesses.items():
            print(f"witness {kind}: {' '.join(str(p) for p in ps)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_synth(args) -> int:
    code = load_code_arg(args.code)
    circuit = synthesize_unencoder(code)
    report = verify_unencoder(code, circuit)
    text = circuit.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    status = "pass" if report.ok else "FAIL"
    print(f"# verification: {status} ({len(circuit)} gates)", file=sys.stderr)
    for label, want, got in report.checks:
        print(f"#   {label}: {got} (want {want})", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_recovery(args) -> int:
    code = load_code_arg(args.code)
    if args.circuit:
        circuit = CliffordCircuit.from_text(Path(args.circuit).read_text(encoding="utf-8"), n=code.n)
        report = verify_unencoder(code, circuit)
        if not report.ok:
            label, want, got = report.first_failure
            print(f"unencoder fails at {label}: expected {want}, got {got}", file=sys.stderr)
            return EXIT_FAIL
        table = derive_recovery_table(code, circuit)
    elif args.group:
        table = _recovery(code, load_group_arg(args.group, code))
    else:
        table = derive_recovery_table(code, synthesize_unencoder(code))
    out = {"".join(map(str, s)): str(r) for s, r in table.items()}
    if args.json:
        _emit(out)
    else:
        for s, r in out.items():
            print(f"{s}  {r}")
    return EXIT_OK


def cmd_sequence(args) -> int:
    if args.gray:
        seq = gray_sequence(args.gray.split(","), tau=args.tau or 0.625)
    else:
        seq = resolve_sequence(args.sequence, args.tau)
        if seq is None:
            raise InputError("no sequence given")
    text = seq.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- simulate

_SPEC_KEYS = {"code", "chi", "chi_prime", "sequence", "tau", "delays", "shots", "seed", "noise", "qubit_chain"}
_NOISE_KEYS = {"preset", "zz", "detuning_std", "static_detuning", "over_rotation"}


def _line_of(text: str, key: str) -> int | None:
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


def _spec_error(path: str, text: str, key: str, msg: str) -> InputError:
    line = _line_of(text, key)
    where = f"{path}:{line}" if line else path
    return InputError(f"{where}: {key}: {msg}")


def _parse_delays(value: Any) -> tuple[float, ...]:
    if isinstance(value, dict):
        start, stop, step = float(value.get("start", 0.0)), float(value["stop"]), float(value["step"])
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(float(v) for v in value)


def parse_noise(record: dict | str | None) -> NoiseModel:
    if record is None:
        return NoiseModel()
    if isinstance(record, str):
        return NoiseModel.preset(record)
    unknown = set(record) - _NOISE_KEYS
    if unknown:
        raise ValueError(f"unknown key(s) {', '.join(sorted(unknown))}")
    kwargs: dict[str, Any] = {}
    if "zz" in record:
        kwargs["zz"] = {(int(a), int(b)): float(r) for a, b, r in record["zz"]}
    for key in ("detuning_std", "static_detuning"):
        if key in record:
            v = record[key]
            kwargs[key] = float(v) if isinstance(v, (int, float)) else tuple(float(x) for x in v)
    if "over_rotation" in record:
        kwargs["over_rotation"] = float(record["over_rotation"])
    if "preset" in record:
        return NoiseModel.preset(record["preset"], **kwargs)
    return NoiseModel(**kwargs)


def load_experiment(path: str, overrides: dict[str, Any] | None = None) -> tuple[ExperimentSpec, NoiseModel]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(record, dict):
        raise InputError(f"{path}: expected a JSON object")
    unknown = set(record) - _SPEC_KEYS
    if unknown:
        k = sorted(unknown)[0]
        raise _spec_error(path, text, k, "unknown field")
    for k, v in (overrides or {}).items():
        if v is not None:
            record[k] = v
    try:
        noise = parse_noise(record.get("noise"))
    except (ValueError, TypeError, KeyError) as exc:
        raise _spec_error(path, text, "noise", str(exc)) from None
    seq_spec = record.get("sequence")
    seq = None
    if seq_spec:
        candidate = Path(path).parent / seq_spec
        if candidate.is_file():
            seq_spec = str(candidate)
        try:
            seq = resolve_sequence(seq_spec, record.get("tau"))
        except (SequenceError, ValueError) as exc:
            raise _spec_error(path, text, "sequence", str(exc)) from None
    fields: dict[str, Any] = {"sequence": seq}
    try:
        fields["delays"] = _parse_delays(record.get("delays", [0.0]))
    except (ValueError, TypeError, KeyError) as exc:
        raise _spec_error(path, text, "delays", f"bad value ({exc})") from None
    for key, conv in (("chi", str), ("chi_prime", str), ("shots", int), ("seed", int), ("code", str)):
        if key in record:
            try:
                fields[key] = conv(record[key])
            except (TypeError, ValueError):
                raise _spec_error(path, text, key, f"bad value {record[key]!r}") from None
    if "qubit_chain" in record:
        fields["qubit_chain"] = tuple(int(q) for q in record["qubit_chain"])
    try:
        spec = ExperimentSpec(**fields)
    except ValueError as exc:
        msg = str(exc)
        key = next((k for k in ("chi_prime", "chi", "shots", "delays", "seed", "sequence", "code", "qubit_chain") if k.split("_")[0] in msg.lower()), "chi")
        raise _spec_error(path, text, key, msg) from None
    return spec, noise


def cmd_simulate(args) -> int:
    spec, noise = load_experiment(args.spec, {"seed": args.seed, "shots": args.shots})
    if args.sequence:
        spec = ExperimentSpec(**{**spec.__dict__, "sequence": resolve_sequence(args.sequence)})
    result = run_experiment(spec, noise, workers=args.workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_histogram_csv(out / "histogram.csv", result)
    rows = summary_rows(result)
    write_summary_csv(out / "summary.csv", rows)
    for d in result.delays:
        if abs(d.delay_effective - d.delay_requested) > 1e-9:
            print(
                f"delay {d.delay_requested:g} us -> {d.delay_effective:g} us ({d.cycles} whole cycles)",
                file=sys.stderr,
            )
    print(f"wrote {out / 'histogram.csv'} and {out / 'summary.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    tables = []
    for path in args.summaries:
        try:
            tables.append(read_summary_csv(path))
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
    rows = aggregate_summaries(tables, column=args.column, resamples=args.resamples, seed=args.seed)
    lines = ["delay_us,runs,mean,std"]
    for r in rows:
        lines.append(f"{r['delay_us']:.10g},{r['runs']},{r['mean']:.10g},{r['std']:.10g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qecldd", description="Error detection with logical dynamical decoupling.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def code_opt(sp):
        sp.add_argument("--code", default="422", help="'422', 'trivial:N,K' or a code JSON file (default 422)")

    sp = sub.add_parser("classify", help="classify Pauli errors against a code")
    code_opt(sp)
    sp.add_argument("paulis", nargs="+")
    sp.add_argument("--group", help="also report decoupling by this group")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("census", help="partition and decoupling censuses")
    code_opt(sp)
    sp.add_argument("--group", default="canonical", help="canonical, z-free or generators=P1,P2,...")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("verify-theorem", help="exhaustive QEC-LDD check")
    code_opt(sp)
    sp.add_argument("--group", default="canonical")
    sp.set_defaults(func=cmd_verify_theorem)

    sp = sub.add_parser("synth-unencoder", help="synthesize and verify an unencoding circuit")
    code_opt(sp)
    sp.add_argument("--out", help="write the circuit here instead of stdout")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("recovery-table", help="syndrome -> recovery Pauli")
    code_opt(sp)
    sp.add_argument("--group", help="derive the table in this group's logical frame")
    sp.add_argument("--circuit", help="use this unencoder file instead of synthesizing one")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_recovery)

    sp = sub.add_parser("sequence", help="emit a pulse sequence file")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--sequence", help="named sequence or sequence file")
    g.add_argument("--gray", help="comma-separated group generators")
    sp.add_argument("--tau", type=float, help="pulse spacing in us")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("simulate", help="run a Bell-state experiment spec")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--sequence", help="override the experiment file's sequence")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--out-dir", default="results")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("report", help="bootstrap summary CSVs across runs")
    sp.add_argument("summaries", nargs="+")
    sp.add_argument("--column", default="fidelity_raw")
    sp.add_argument("--resamples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, CodeError, PauliError, SequenceError, ValueError, OSError) as exc:
        print(f"qecldd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
