"""Command-line front end.

Subcommands: ``build`` (write the three-qubit gate for a coherency q),
``sweep`` (entropy / coherent-information table over q values), ``apply``
(measure a supplied qubit state and write the joint output with its
marginals), and ``verify`` (run the seeded self-check suites).

Exit codes: 0 ok, 1 verification failure, 2 bad arguments, 3 I/O error,
4 internal check failure.  The environment variable ``ENTMEAS_TOL``
overrides the default check tolerance for exploratory runs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .linalg import TOL_EIG, DensityMatrix, maximally_mixed, partial_trace
from .superop import EntanglementMatrix, entangling_measurement, is_completely_positive
from .extops import apply_ext
from .dilation import combined_unitary, initial_apparatus_state, realize_extended, verify_dilation
from .infomeasures import InfoReport, coherent_information_measurement
from .serialize import dump_json, gate_to_json, load_json, matrix_from_json, matrix_to_json
from .verify import run_all

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_ARGS = 2
EXIT_IO_ERROR = 3
EXIT_INTERNAL = 4

# Hard gate on the per-record dilation deviation; a sweep that trips this
# indicates a construction bug and aborts with EXIT_INTERNAL.
DILATION_GATE = 1e-8

STATE_PRESETS = ("plus", "zero", "one", "mixed")

CSV_HEADER = "q_re,q_im,s_red_bits,s_d_bits,s_ab_bits,i_c_bits,cp_ok,dilation_max_dev"


def parse_q(text: str) -> complex:
    """Parse a coherency parameter written as ``re`` or ``re+imi``."""
    cleaned = text.strip().replace(" ", "").replace("i", "j").replace("I", "j")
    try:
        value = complex(cleaned)
    except ValueError as exc:
        raise ValueError(f"cannot parse coherency parameter {text!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"coherency parameter {text!r} is not finite")
    return value


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class SweepConfig:
    q_values: tuple[complex, ...]
    input_state: str
    output_path: str
    format: str

    def validate(self) -> None:
        if not self.q_values:
            raise ValueError("at least one q value is required")
        for q in self.q_values:
            if abs(q) > 1.0 + TOL_EIG:
                raise ValueError(f"|q| must not exceed 1, got {abs(q):.6g}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.format!r}")


@dataclass(frozen=True)
class RunRecord:
    q: complex
    report: InfoReport
    cp_ok: bool
    dilation_max_dev: float

    def csv_row(self) -> str:
        return ",".join(
            [
                _fmt(self.q.real),
                _fmt(self.q.imag),
                _fmt(self.report.s_red),
                _fmt(self.report.s_d),
                _fmt(self.report.s_ab),
                _fmt(self.report.i_c_formula),
                "true" if self.cp_ok else "false",
                _fmt(self.dilation_max_dev),
            ]
        )

    def to_json_dict(self) -> dict:
        return {
            "q_re": self.q.real,
            "q_im": self.q.imag,
            "s_red_bits": self.report.s_red,
            "s_d_bits": self.report.s_d,
            "s_ab_bits": self.report.s_ab,
            "i_c_bits": self.report.i_c_formula,
            "cp_ok": self.cp_ok,
            "dilation_max_dev": self.dilation_max_dev,
        }


class StateFileError(Exception):
    """The state file is unreadable or not valid matrix JSON."""


def _read_state_file(path: str) -> DensityMatrix:
    """Parse a matrix-JSON file into a validated density matrix.

    Raises StateFileError for I/O or format problems and ValueError when
    the parsed matrix is not a density matrix.
    """
    try:
        matrix = matrix_from_json(load_json(path))
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    return DensityMatrix(matrix)


def _load_state(source: str) -> DensityMatrix:
    """Resolve a named preset or a matrix-JSON file into a qubit state."""
    if source == "plus":
        return DensityMatrix.from_ket(np.ones(2) / math.sqrt(2))
    if source == "zero":
        return DensityMatrix.from_ket([1.0, 0.0])
    if source == "one":
        return DensityMatrix.from_ket([0.0, 1.0])
    if source == "mixed":
        return maximally_mixed(2)
    return _read_state_file(source)


def _check_tol() -> float:
    raw = os.environ.get("ENTMEAS_TOL")
    if raw is None:
        return TOL_EIG
    return float(raw)


def cmd_build(q: complex, out: str) -> int:
    if abs(q) > 1.0 + TOL_EIG:
        print(f"error: |q| must not exceed 1, got {abs(q):.6g}", file=sys.stderr)
        return EXIT_BAD_ARGS
    gate = combined_unitary(EntanglementMatrix.from_coherence(q))
    try:
        dump_json(gate_to_json(gate), out)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    return EXIT_OK


def cmd_sweep(config: SweepConfig, tol: float) -> int:
    try:
        config.validate()
        rho_a = _load_state(config.input_state)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS

    records = []
    for q in config.q_values:
        r = EntanglementMatrix.from_coherence(q)
        dilation = verify_dilation(r, tol=tol)
        record = RunRecord(
            q=q,
            report=coherent_information_measurement(rho_a, r),
            cp_ok=is_completely_positive(entangling_measurement(r)),
            dilation_max_dev=dilation.max_dev,
        )
        if record.dilation_max_dev >= DILATION_GATE:
            print(
                f"error: dilation deviation {record.dilation_max_dev:.3g} at q={q} "
                f"exceeds the {DILATION_GATE:.0e} gate",
                file=sys.stderr,
            )
            return EXIT_INTERNAL
        records.append(record)

    try:
        if config.format == "csv":
            lines = [CSV_HEADER] + [rec.csv_row() for rec in records]
            with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write("\n".join(lines) + "\n")
        else:
            dump_json([rec.to_json_dict() for rec in records], config.output_path)
    except OSError as exc:
        print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    return EXIT_OK


def cmd_apply(state_file: str, q: complex, out: str) -> int:
    if abs(q) > 1.0 + TOL_EIG:
        print(f"error: |q| must not exceed 1, got {abs(q):.6g}", file=sys.stderr)
        return EXIT_BAD_ARGS
    try:
        rho_a = _read_state_file(state_file)
        if rho_a.dim != 2:
            raise ValueError(f"expected a qubit state, got dimension {rho_a.dim}")
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    except ValueError as exc:
        print(f"error: invalid density matrix: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS

    gate = combined_unitary(EntanglementMatrix.from_coherence(q))
    extension = realize_extended(gate, initial_apparatus_state(2, 2))
    out_state = apply_ext(extension, rho_a)
    payload = {
        "q": [q.real, q.imag],
        "rho_abd": matrix_to_json(out_state.matrix),
        "rho_a": matrix_to_json(partial_trace(out_state, [0]).matrix),
        "rho_b": matrix_to_json(partial_trace(out_state, [1]).matrix),
        "rho_d": matrix_to_json(partial_trace(out_state, [2]).matrix),
    }
    try:
        dump_json(payload, out)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    return EXIT_OK


def cmd_verify(seed: int, trials: int, corrupt_r: bool = False) -> int:
    if trials < 1:
        print("error: trials must be at least 1", file=sys.stderr)
        return EXIT_BAD_ARGS
    summary = run_all(seed=seed, trials=trials, corrupt_r=corrupt_r)
    print(json.dumps(summary.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK if summary.all_passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entmeas",
        description="Entangling-measurement gates, sweeps, and self checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="write the three-qubit gate for a coherency q")
    p_build.add_argument("--q", required=True, help='coherency, e.g. "0.5" or "0.3+0.4i"')
    p_build.add_argument("--out", required=True, help="output path for the gate JSON")

    p_sweep = sub.add_parser("sweep", help="tabulate entropies over a set of q values")
    p_sweep.add_argument(
        "--q", action="append", default=[], help="coherency value; repeat for several"
    )
    p_sweep.add_argument("--q-start", type=float, help="start of a real-q grid")
    p_sweep.add_argument("--q-stop", type=float, help="end of a real-q grid")
    p_sweep.add_argument("--q-steps", type=int, help="number of grid points (>= 1)")
    p_sweep.add_argument(
        "--state",
        default="plus",
        help=f"input state: one of {', '.join(STATE_PRESETS)} or a matrix-JSON path",
    )
    p_sweep.add_argument("--out", required=True, help="output path")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    p_apply = sub.add_parser("apply", help="measure a qubit state given as matrix JSON")
    p_apply.add_argument("--state", required=True, help="path to the input density matrix")
    p_apply.add_argument("--q", required=True, help="coherency parameter")
    p_apply.add_argument("--out", required=True, help="output path")

    p_verify = sub.add_parser("verify", help="run the seeded self-check suites")
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument(
        "--corrupt-r",
        action="store_true",
        help="debug: feed a non-PSD coherence matrix into the CP check",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_ARGS if exc.code not in (0, None) else EXIT_OK

    try:
        tol = _check_tol()
    except ValueError:
        print("error: ENTMEAS_TOL is not a valid number", file=sys.stderr)
        return EXIT_BAD_ARGS

    if args.command == "build":
        try:
            q = parse_q(args.q)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_ARGS
        return cmd_build(q, args.out)

    if args.command == "sweep":
        try:
            q_values = [parse_q(text) for text in args.q]
            if args.q_steps is not None or args.q_start is not None or args.q_stop is not None:
                if args.q_steps is None or args.q_start is None or args.q_stop is None:
                    raise ValueError("--q-start, --q-stop and --q-steps must be given together")
                if args.q_steps < 1:
                    raise ValueError("--q-steps must be at least 1")
                q_values.extend(
                    complex(x) for x in np.linspace(args.q_start, args.q_stop, args.q_steps)
                )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_ARGS
        config = SweepConfig(
            q_values=tuple(q_values),
            input_state=args.state,
            output_path=args.out,
            format=args.format,
        )
        return cmd_sweep(config, tol)

    if args.command == "apply":
        try:
            q = parse_q(args.q)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_ARGS
        return cmd_apply(args.state, q, args.out)

    if args.command == "verify":
        return cmd_verify(args.seed, args.trials, corrupt_r=args.corrupt_r)

    print(f"error: unknown command {args.command!r}", file=sys.stderr)
    return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
