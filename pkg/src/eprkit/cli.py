"""Command-line front end.

Subcommands: ``verify`` (invariant checks with a residual table), ``analyze``
(full analysis report), ``sample`` (reproducible shot sampling), and
``demo-pauli`` (emit the two-qubit Pauli scenario for given amplitudes).
Exit codes are a stable contract: 0 success, 1 usage (including unreadable
paths), 2 file parse error, 3 invariant violation, 4 impossible-outcome
request. No environment variables are consulted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .errors import (
    DegenerateSpectrumError,
    ImpossibleOutcomeError,
    ScenarioFormatError,
    ScenarioInvariantError,
)
from .lab import Scenario, build_pauli_scenario, compare_empirical, run_epr_analysis, sample_chain
from .linalg import extract_c
from .states import verify_theorem1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_IMPOSSIBLE = 4

MAX_SEED = 2**64 - 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; the contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="epr", description="EPR analysis for finite-level composite systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="check a scenario file's invariants")
    p_verify.add_argument("path")

    p_analyze = sub.add_parser("analyze", help="run the full analysis and emit a JSON report")
    p_analyze.add_argument("path")
    p_analyze.add_argument("--out", default=None, help="write the report here instead of stdout")

    p_sample = sub.add_parser("sample", help="sample measurement chains and emit a JSON report")
    p_sample.add_argument("path")
    p_sample.add_argument("--shots", required=True)
    p_sample.add_argument("--seed", default="0")
    p_sample.add_argument("--out", default=None)

    p_demo = sub.add_parser("demo-pauli", help="emit the two-qubit Pauli scenario for given amplitudes")
    p_demo.add_argument(
        "--amplitudes",
        required=True,
        help="8 comma-separated floats: re,im for each of the four product-basis amplitudes",
    )
    p_demo.add_argument("--label", default="pauli-pair")
    p_demo.add_argument("--out", default=None)

    return parser


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_scenario(path: str) -> Scenario:
    return io.scenario_from_json(_read_text(path))


def _parse_positive_int(text: str, name: str, maximum: int | None = None) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise _UsageError(f"{name} must be an integer, got {text!r}") from exc
    if value < 1 or (maximum is not None and value > maximum):
        raise _UsageError(f"{name} out of range: {value}")
    return value


def _cmd_verify(args) -> int:
    sc = _load_scenario(args.path)
    residual_ab = float(np.abs(extract_c(sc.obs_a.matrix, sc.obs_b.matrix, sc.alpha) - sc.obs_c.matrix).max())
    t1 = verify_theorem1(sc.obs_a, sc.obs_b, sc.alpha)
    herm = {
        name: float(np.abs(obs.matrix - obs.matrix.conj().T).max())
        for name, obs in (("matrix_a", sc.obs_a), ("matrix_b", sc.obs_b), ("matrix_c", sc.obs_c))
    }
    lines = [
        f"scenario: {sc.label} (factor_dim={sc.factor_dim}, alpha={sc.alpha:g})",
        f"  input state norm:                {sc.initial_state.norm_scale:.15g}",
    ]
    for name, residual in herm.items():
        lines.append(f"  hermiticity residual {name}:  {residual:.3e}")
    lines.append(f"  commutation residual [A,B]/(i*alpha) - C:  {residual_ab:.3e}")
    lines.append(f"  trace residual of C:             {t1.trace_residual:.3e}")
    lines.append(f"  max |<a|C|a>| in A eigenbasis:   {t1.max_diag_residual:.3e}")
    lines.append("all invariants satisfied")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    sc = _load_scenario(args.path)
    report = run_epr_analysis(sc)
    payload = io.run_report_payload(sc, io.analysis_to_payload(report), None, __version__)
    _write_output(io.emit_json(payload), args.out)
    return EXIT_OK


def _cmd_sample(args) -> int:
    shots = _parse_positive_int(args.shots, "--shots")
    try:
        seed = int(args.seed)
    except ValueError as exc:
        raise _UsageError(f"--seed must be an integer, got {args.seed!r}") from exc
    if not 0 <= seed <= MAX_SEED:
        raise _UsageError(f"--seed must fit in 64 bits, got {seed}")
    sc = _load_scenario(args.path)
    report = run_epr_analysis(sc)
    record = sample_chain(sc, shots, seed)
    comparison = compare_empirical(record, sc)
    payload = io.run_report_payload(
        sc,
        io.analysis_to_payload(report),
        io.sampling_to_payload(record, comparison),
        __version__,
    )
    _write_output(io.emit_json(payload), args.out)
    return EXIT_OK


def _cmd_demo_pauli(args) -> int:
    parts = args.amplitudes.split(",")
    if len(parts) != 8:
        raise _UsageError(f"--amplitudes needs 8 comma-separated floats, got {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise _UsageError(f"--amplitudes must be numeric: {exc}") from exc
    amplitudes = [complex(values[i], values[i + 1]) for i in range(0, 8, 2)]
    try:
        sc = build_pauli_scenario(amplitudes, label=args.label)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    _write_output(io.scenario_to_json(sc), args.out)
    return EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "analyze": _cmd_analyze,
    "sample": _cmd_sample,
    "demo-pauli": _cmd_demo_pauli,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"epr: error: {exc}\n")
        return EXIT_USAGE
    except ScenarioFormatError as exc:
        sys.stderr.write(f"epr: parse error: {exc}\n")
        return EXIT_PARSE
    except (ScenarioInvariantError, DegenerateSpectrumError) as exc:
        sys.stderr.write(f"epr: invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except ImpossibleOutcomeError as exc:
        sys.stderr.write(f"epr: impossible outcome: {exc}\n")
        return EXIT_IMPOSSIBLE


if __name__ == "__main__":
    raise SystemExit(main())
