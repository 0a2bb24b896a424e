"""``flatext`` command line.

Exit codes: 0 the property holds, 1 well-formed input but the property
fails, 2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field

from . import io
from .atoms import (
    DegenerateCombination,
    ExtractionConfig,
    NotPositive,
    SingularWeightSystem,
    check_positive,
    extract_atoms,
    verify_measure,
)
from .extension import (
    CommutationUnverified,
    InconsistentExtension,
    InvalidBasis,
    MissingRule,
    NotConnected,
    NotFlat,
    NotInSpan,
    build_multiplication_system,
    build_rewriting_family,
    check_commutation,
    extend_sequence,
)
from .moments import (
    InconsistentInput,
    MissingMoment,
    ZeroFormDetected,
    admissible_bases,
    check_flat,
    format_poly,
)
from .monomials import (
    MonomialSet,
    format_monomial,
    is_connected_to_one,
    is_division_closed,
    parse_monomial,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunReport:
    command: str
    input: str
    result: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    timing: float = 0.0
    exit_code: int = EXIT_OK
    fmt: str = "text"

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "input": self.input,
            "result": self.result,
            "warnings": self.warnings,
            "timing": round(self.timing, 6),
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return io.dump(self.to_dict())

    def to_text(self) -> str:
        lines = [f"{self.command} {self.input}"]
        for key, value in self.result.items():
            lines.append(f"  {key}: {_text_value(value)}")
        if self.warnings:
            lines.append(f"  warnings: {_text_value(self.warnings)}")
        lines.append(f"  exit_code: {self.exit_code}")
        lines.append(f"  timing: {self.timing:.3f}s")
        return "\n".join(lines) + "\n"


def _text_value(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_text_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text_value(v)}" for k, v in value.items()) + "}"
    if isinstance(value, bool):
        return "true" if value else "false"
    return "null" if value is None else str(value)


def _names(monomials) -> list[str]:
    return [format_monomial(m) for m in monomials]


def _basis_override(text: str | None, n: int) -> MonomialSet | None:
    if not text:
        return None
    try:
        return MonomialSet(n, (parse_monomial(t, n) for t in text.split(",")))
    except ValueError as exc:
        raise io.InputError(f"--basis: {exc}") from None


# ----------------------------------------------------------------------------
# commands


def cmd_check(args, report: RunReport) -> int:
    y, warnings = io.load_moments(args.input)
    report.warnings += warnings
    conn = is_connected_to_one(y.C)
    try:
        fr = check_flat(y)
    except ZeroFormDetected as exc:
        report.result["error"] = f"ZeroFormDetected: {exc}"
        return EXIT_FAIL
    report.result.update(
        connected=fr.connected,
        unreachable=_names(conn.unreachable),
        rank_C=fr.rank_C,
        rank_Cplus=fr.rank_Cplus,
        flat=fr.flat,
        basis=_names(fr.basis),
        kernel_dim=len(fr.kernel_Cplus),
        kernel=[format_poly(p) for p in fr.kernel_Cplus],
        zero_form=fr.zero_form,
    )
    return EXIT_OK if fr.flat and fr.connected else EXIT_FAIL


def cmd_basis(args, report: RunReport) -> int:
    y, warnings = io.load_moments(args.input)
    report.warnings += warnings
    try:
        fr = check_flat(y)
    except ZeroFormDetected as exc:
        report.result["error"] = f"ZeroFormDetected: {exc}"
        return EXIT_FAIL
    B = _basis_override(args.basis, y.n) or fr.basis
    report.result.update(
        flat=fr.flat,
        rank=fr.rank_Cplus,
        basis=_names(B),
        basis_connected=bool(is_connected_to_one(B)),
        division_closed=is_division_closed(B),
    )
    try:
        report.result["admissible"] = [_names(b) for b in admissible_bases(y, limit=10_000)]
    except ValueError:
        report.warnings.append("too many subsets of C to list every admissible basis")
    if not fr.flat:
        return EXIT_FAIL
    try:
        F = build_rewriting_family(y, B)
    except InvalidBasis as exc:
        report.result["error"] = f"InvalidBasis: {exc}"
        return EXIT_FAIL
    report.result["rules"] = {
        format_monomial(m): format_poly(dict(zip(B, c))) for m, c in sorted(F.rules.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    }
    if args.output:
        io.write_text(args.output, io.dump(io.family_to_dict(F)))
        report.result["output"] = args.output
    return EXIT_OK


def cmd_extend(args, report: RunReport) -> int:
    y, warnings = io.load_moments(args.input)
    report.warnings += warnings
    degree = args.degree if args.degree is not None else y.support.max_degree()
    try:
        ext = extend_sequence(y, degree, force=args.force, basis=_basis_override(args.basis, y.n))
    except (NotFlat, NotConnected, InconsistentExtension, InvalidBasis, NotInSpan, ZeroFormDetected) as exc:
        report.result["error"] = f"{type(exc).__name__}: {exc}"
        return EXIT_FAIL
    report.warnings += ext.warnings
    data = io.extension_to_dict(ext)
    report.result.update(
        degree=degree,
        rank=ext.rank,
        basis=_names(ext.basis),
        connected=ext.connected,
        certified=ext.certified,
        status=(
            "unique flat extension"
            if ext.certified
            else f"extension found and verified through degree {degree}"
        ),
    )
    if args.output:
        io.write_text(args.output, io.dump(data))
        report.result["output"] = args.output
    else:
        report.result["moments"] = {
            format_monomial(tuple(e["alpha"])): e["value"] for e in data["moments"]
        }
    return EXIT_OK


def cmd_atoms(args, report: RunReport) -> int:
    y, warnings = io.load_moments(args.input)
    report.warnings += warnings
    if not args.unsafe and not check_positive(y):
        report.result["error"] = "NotPositive: moment matrix on C+ is not positive semidefinite"
        return EXIT_FAIL
    try:
        ext = extend_sequence(
            y, y.support.max_degree(), force=args.force, basis=_basis_override(args.basis, y.n), rank_check=False
        )
        cfg = ExtractionConfig(tol_residual=args.tol, seed=args.seed)
        mu = extract_atoms(ext.form, cfg, unsafe=args.unsafe)
    except (NotFlat, NotConnected, InconsistentExtension, InvalidBasis, NotInSpan, ZeroFormDetected,
            NotPositive, CommutationUnverified, DegenerateCombination, SingularWeightSystem) as exc:
        report.result["error"] = f"{type(exc).__name__}: {exc}"
        return EXIT_FAIL
    report.warnings += mu.warnings
    report.result.update(
        rank=len(ext.basis),
        atoms=[
            {"point": [float(x.real) for x in p], "weight": float(w.real)}
            for p, w in zip(mu.points, mu.weights)
        ],
        residual=mu.residual,
        complex_atoms=mu.complex_atoms,
    )
    if args.output:
        io.write_text(args.output, io.measure_to_json(mu))
        report.result["output"] = args.output
    return EXIT_OK if mu.residual <= args.tol else EXIT_FAIL


def cmd_verify(args, report: RunReport) -> int:
    if not args.measure:
        raise io.InputError("verify needs --measure FILE")
    y, warnings = io.load_moments(args.input)
    report.warnings += warnings
    mu = io.load_measure(args.measure)
    if mu.n != y.n:
        raise io.InputError("measure and moment file disagree on n")
    mr = verify_measure(mu, y, args.tol)
    report.result.update(
        max_deviation=mr.max_deviation,
        worst=format_monomial(mr.worst) if mr.worst is not None else None,
        tol=args.tol,
        passed=mr.passed,
    )
    return EXIT_OK if mr.passed else EXIT_FAIL


def cmd_prebasis_commute(args, report: RunReport) -> int:
    F = io.load_family(args.input)
    if not is_connected_to_one(F.basis):
        report.warnings.append("B is not connected to 1; commutation does not certify a border basis")
    try:
        S = build_multiplication_system(F)
    except MissingRule as exc:
        raise io.InputError(str(exc)) from None
    result = check_commutation(S)
    report.result.update(
        basis=_names(F.basis),
        commuting=result.commute,
        witness=list(result.witness) if result.witness else None,
    )
    if result.difference is not None:
        report.result["difference"] = result.difference.to_json()
    report.result["operators"] = [op.to_json() for op in S.operators]
    return EXIT_OK if result.commute else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "basis": cmd_basis,
    "extend": cmd_extend,
    "atoms": cmd_atoms,
    "verify": cmd_verify,
    "prebasis-commute": cmd_prebasis_commute,
}


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatext",
        description="Flat extensions of truncated moment sequences on sparse monomial sets.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("input", help="moment file (prebasis file for prebasis-commute)")
    parser.add_argument("--degree", type=_nonnegative_int, help="extension degree (extend)")
    parser.add_argument("--tol", type=_positive_float, default=1e-8, help="residual tolerance (atoms, verify)")
    parser.add_argument("--seed", type=int, default=0, help="seed of the random operator combination")
    parser.add_argument("--force", action="store_true", help="attempt index sets not connected to 1")
    parser.add_argument("--unsafe", action="store_true", help="extract atoms without the PSD check")
    parser.add_argument("--basis", help="comma separated basis override, e.g. 'x1,x1*x2'")
    parser.add_argument("--measure", help="measure file (verify)")
    parser.add_argument("--output", help="write the produced file here")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def run(argv=None) -> tuple[RunReport, int]:
    args = build_parser().parse_args(argv)
    report = RunReport(args.command, args.input, fmt=args.format)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, report)
    except MissingMoment as exc:
        report.result["error"] = f"MissingMoment: {exc}"
        report.result["missing"] = [list(m) for m in exc.missing]
        code = EXIT_INPUT
    except (io.InputError, InconsistentInput) as exc:
        report.result["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_INPUT
    report.timing = time.perf_counter() - start
    report.exit_code = code
    return report, code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s: %(message)s")
    report, code = run(argv)
    sys.stdout.write(report.to_json() if report.fmt == "json" else report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
