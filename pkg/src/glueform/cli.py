"""Command line front end.

    glueform check <file>
    glueform cohomology <file> [--bound D] [--degree k]...
    glueform delta <file> --mu <formfile> --nu <formfile>
    glueform sample <file> --samples N --seed S

Exit codes: 0 success, 1 a verification or domain-level failure, 2 bad
input (unreadable file, syntax or schema error).
"""

from __future__ import annotations

import argparse
import sys

from .diffeology import SpacePresentation, falsify_by_sampling
from .errors import GlueformError, ParseError, UsageError
from .exterior import format_form, parse_form
from .mv import CAVEAT, GlueRejected, cohomology_report, delta, exactness_audit, glue
from .presentation import PresentationFile, load_presentation

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULT_BOUND = 4
DEFAULT_SAMPLES = 100


class _InputError(Exception):
    pass


def _load(path) -> tuple[PresentationFile, SpacePresentation]:
    try:
        pf = load_presentation(path)
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror}") from None
    except ParseError as e:
        raise _InputError(f"{path}: {e}") from None
    try:
        return pf, pf.to_space()
    except UsageError as e:
        raise _InputError(f"{path}: {e}") from None


def _check_lines(space, samples=DEFAULT_SAMPLES, seed=0):
    lines = []
    ok = True
    for r in space.checks():
        lines.append("  " + r.line())
        ok = ok and r.passed
    report = falsify_by_sampling(space, samples, seed)
    if report.passed:
        lines.append(f"  [PASS] sampling: no violation in {report.evaluations} evaluations "
                     f"({samples} samples per identity, seed {seed}); falsification only")
    else:
        ok = False
        for v in report.violations:
            lines.append(f"  [FAIL] sampling: {v.line()}")
    return ok, lines


def cmd_check(path, samples=DEFAULT_SAMPLES, seed=0) -> tuple[int, str]:
    try:
        _, space = _load(path)
    except _InputError as e:
        return EXIT_INPUT, f"error: {e}\n"
    ok, lines = _check_lines(space, samples, seed)
    out = [f"check {path}", f"witness regimes: {space.regimes}",
           "charts: " + (", ".join(c.name for c in space.charts) or "none") + " (completeness asserted)"]
    out += lines
    out.append(f"result: {'PASS' if ok else 'FAIL'}")
    return (EXIT_OK if ok else EXIT_FAIL), "\n".join(out) + "\n"


def cmd_cohomology(path, bound=None, degrees=None) -> tuple[int, str]:
    try:
        pf, space = _load(path)
    except _InputError as e:
        return EXIT_INPUT, f"error: {e}\n"
    ok, lines = _check_lines(space)
    if not ok:
        return EXIT_FAIL, "\n".join([f"cohomology {path}", "presentation fails check:"] + lines) + "\n"
    compute = pf.compute
    if bound is None:
        bound = compute.bound if compute and compute.bound is not None else DEFAULT_BOUND
    if not degrees:
        degrees = list(compute.degrees) if compute and compute.degrees else [0, 1, 2]
    degrees = sorted(set(degrees))

    report = cohomology_report(space, degrees, bound)
    tag = f"D={bound}; {space.regimes}"
    out = [f"cohomology {path}",
           f"witness regimes: {space.regimes}",
           "charts: " + (", ".join(report.charts) or "none (disjoint images)") + " (completeness asserted)",
           f"truncation bound: D = {bound} (coefficient degree <= D; exact forms from degree <= D+1)",
           "",
           f"{'k':>3} {'dim Omega^k':>12} {'closed':>7} {'exact':>6} {'H^k':>4}"]
    for e in report.entries:
        out.append(f"{e.degree:>3} {e.dim_omega:>12} {e.closed:>7} {e.exact:>6} {e.h:>4}")
    out.append("")
    for e in report.entries:
        out.append(f"H^{e.degree} = {e.h}  [{tag}]")
    out.append("")
    for k, values in report.stability:
        lo = bound - len(values) + 1
        if len(values) >= 3 and len(set(values)) == 1:
            out.append(f"stability: H^{k} = {values[-1]} for D in {lo}..{bound} (three consecutive bounds agree)")
        else:
            seq = ", ".join(f"D={lo + i}: {v}" for i, v in enumerate(values))
            out.append(f"stability: H^{k} not established ({seq})")
    out.append("")
    audit_ok = True
    for k in degrees:
        audit = exactness_audit(space, k, bound)
        audit_ok = audit_ok and audit.passed
        for step in audit.steps:
            out.append(f"audit k={k} D={bound} {step.line()}")
    out.append("")
    out.append(f"caveat: {CAVEAT}")
    return (EXIT_OK if audit_ok else EXIT_FAIL), "\n".join(out) + "\n"


def _read_form(path, context):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse_form(text, context)
    except ParseError as e:
        raise _InputError(f"{path}: {e}") from None


def cmd_delta(path, mu_path, nu_path) -> tuple[int, str]:
    try:
        _, space = _load(path)
        mu = _read_form(mu_path, space.alpha.domain)
        nu = _read_form(nu_path, space.beta.domain)
    except _InputError as e:
        return EXIT_INPUT, f"error: {e}\n"
    ok, lines = _check_lines(space)
    if not ok:
        return EXIT_FAIL, "\n".join([f"delta {path}", "presentation fails check:"] + lines) + "\n"
    out = [f"delta {path}",
           f"mu ({space.alpha.name}, degree {mu.degree}) = {format_form(mu)}",
           f"nu ({space.beta.name}, degree {nu.degree}) = {format_form(nu)}"]
    try:
        values = delta(space, mu, nu)
    except UsageError as e:
        out.append(f"error: {e}")
        return EXIT_FAIL, "\n".join(out) + "\n"
    if not values:
        out.append("delta: no pullback charts (disjoint images)")
    for name, value in values:
        out.append(f"delta on chart {name} = {format_form(value)}")
    try:
        glue(space, mu, nu)
    except GlueRejected as e:
        out.append(f"GLUE: rejected ({e})")
        return EXIT_FAIL, "\n".join(out) + "\n"
    out.append("GLUE: accepted")
    return EXIT_OK, "\n".join(out) + "\n"


def cmd_sample(path, samples, seed) -> tuple[int, str]:
    try:
        _, space = _load(path)
    except _InputError as e:
        return EXIT_INPUT, f"error: {e}\n"
    try:
        report = falsify_by_sampling(space, samples, seed)
    except UsageError as e:
        return EXIT_INPUT, f"error: {e}\n"
    out = [f"sample {path}", f"samples per identity: {samples}, seed: {seed}, evaluations: {report.evaluations}"]
    for v in report.violations:
        out.append(f"  [FAIL] {v.line()}")
    if report.passed:
        out.append("result: no violation found (sampling falsifies, it never certifies)")
        return EXIT_OK, "\n".join(out) + "\n"
    out.append(f"result: {len(report.violations)} violation(s)")
    return EXIT_FAIL, "\n".join(out) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glueform", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="verify plots, witnesses and pullback charts")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cohomology", help="truncated De Rham cohomology of the presented space")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=None, help="coefficient degree bound D")
    p.add_argument("--degree", type=int, action="append", default=None, help="form degree k (repeatable)")

    p = sub.add_parser("delta", help="evaluate the difference morphism and try to glue")
    p.add_argument("file")
    p.add_argument("--mu", required=True, help="form file on the first plot's domain")
    p.add_argument("--nu", required=True, help="form file on the second plot's domain")

    p = sub.add_parser("sample", help="randomized falsification of the presentation")
    p.add_argument("file")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    return parser


def run(argv=None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    if getattr(args, "bound", None) is not None and args.bound < 0:
        return EXIT_INPUT, "error: --bound must be non-negative\n"
    if args.command == "check":
        if args.samples <= 0:
            return EXIT_INPUT, "error: --samples must be positive\n"
        return cmd_check(args.file, args.samples, args.seed)
    if args.command == "cohomology":
        if args.degree and min(args.degree) < 0:
            return EXIT_INPUT, "error: --degree must be non-negative\n"
        return cmd_cohomology(args.file, args.bound, args.degree)
    if args.command == "delta":
        return cmd_delta(args.file, args.mu, args.nu)
    if args.samples <= 0:
        return EXIT_INPUT, "error: --samples must be positive\n"
    return cmd_sample(args.file, args.samples, args.seed)


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except GlueformError as e:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {e}\n")
        return EXIT_FAIL
    stream = sys.stdout if code != EXIT_INPUT else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
