"""Command-line interface.

Exit codes: 0 ok, 2 usage or parse error, 3 semantic error (e.g. unbound
variable), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import checks
from .dbar import SeparationError, WitnessError, estimate_dbar, separate
from .formula import ParseError, Var, mk_alpha, mk_beta, mk_gamma, mk_P, mk_separator, parse, to_text
from .profile import CertificateError
from .subspace import Tolerance, subspace_to_json
from .valuation import Environment, UnboundVariableError, evaluate

EXIT_OK, EXIT_USAGE, EXIT_SEMANTIC, EXIT_VERIFY = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 10000
    rank_threshold: float = 1e-9
    guard_band: float = 1e-6
    output: str = "text"

    @property
    def tol(self) -> Tolerance:
        return Tolerance(self.rank_threshold, self.guard_band)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_formula(arg: str):
    text = Path(arg[1:]).read_text() if arg.startswith("@") else arg
    try:
        return parse(text)
    except ParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_USAGE) from exc


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _subspace_text(s) -> list[str]:
    rows = []
    for row in s.basis:
        rows.append("  [" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) + "]")
    return rows


def cmd_eval(args, cfg: RunConfig):
    f = _read_formula(args.formula)
    try:
        env = Environment.from_json(json.loads(Path(args.environment).read_text()), cfg.tol)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"bad environment file: {exc}", EXIT_USAGE) from exc
    try:
        val = evaluate(f, env, cfg.tol)
    except UnboundVariableError as exc:
        raise CliError(str(exc), EXIT_SEMANTIC) from exc
    data = {"formula": to_text(f), "ambient": env.ambient, "dim": val.dim, "subspace": subspace_to_json(val)}
    text = [f"dim {val.dim} in C^{env.ambient}", "basis:", *_subspace_text(val)]
    return data, "\n".join(text)


def cmd_construct(args, cfg: RunConfig):
    kind, params = args.kind, args.params
    arity = {"P": 2, "alpha": 2, "gamma": 1, "beta": 1, "separator": 2}
    if len(params) != arity[kind]:
        raise CliError(f"{kind} takes {arity[kind]} parameter(s), got {len(params)}", EXIT_USAGE)
    try:
        if kind in ("P", "alpha"):
            for p in params:
                Var(p)
            f = (mk_P if kind == "P" else mk_alpha)(*params)
            return {"kind": kind, "formula": to_text(f)}, to_text(f)
        ints = [int(p) for p in params]
        if kind == "gamma":
            f = mk_gamma(ints[0])
            return {"kind": kind, "formula": to_text(f)}, to_text(f)
        if kind == "beta":
            f = mk_beta(ints[0])
            return {"kind": kind, "formula": to_text(f)}, to_text(f)
        phi, cert = mk_separator(*ints)
    except ValueError as exc:
        raise CliError(f"bad parameters: {exc}", EXIT_USAGE) from exc
    cert_json = cert.to_json()
    data = {"kind": kind, "formula": to_text(phi), "certificate": cert_json}
    return data, to_text(phi) + "\n" + json.dumps(cert_json, indent=2)


def cmd_dbar(args, cfg: RunConfig):
    f = _read_formula(args.formula)
    est = estimate_dbar(f, args.n, cfg.trials, args.dims, cfg.seed, cfg.tol)
    data = {"formula": to_text(f), **est.to_json(), "witness": est.witness.to_json()}
    text = (f"max dim found {est.max_dim} in C^{args.n} over {cfg.trials} trials "
            f"(seed {cfg.seed}, {est.strategy} dims, {est.rejected} redrawn, {est.skipped} skipped)")
    return data, text


def cmd_separate(args, cfg: RunConfig):
    if not 1 <= args.m < args.n:
        raise CliError(f"need 1 <= m < n, got {args.m}, {args.n}", EXIT_USAGE)
    try:
        rep = separate(args.m, args.n, cfg.trials, cfg.seed, cfg.tol)
    except (SeparationError, WitnessError, CertificateError) as exc:
        raise CliError(f"separation failed: {exc}", EXIT_VERIFY) from exc
    stages = " -> ".join([f"({args.m},{args.n})"] + [f"{s.name}({s.pair[0]},{s.pair[1]})" for s in rep.certificate.stages])
    text = "\n".join([
        f"phi separates QL(C^{args.m}) from QL(C^{args.n})",
        f"stages: {stages}",
        f"witness in C^{args.n}: dim {rep.witness.achieved}",
        f"zero-test in C^{args.m}: max dim {rep.zero_test.max_dim} over {rep.zero_test.trials} trials (seed {cfg.seed})",
        f"formula: {to_text(rep.formula)}",
    ])
    return rep.to_json(), text


def cmd_verify(args, cfg: RunConfig):
    results = checks.run_suite(args.suite, cfg.trials, cfg.seed, cfg.tol)
    failed = [r for r in results if not r.passed]
    data = {"suite": args.suite, "passed": not failed, "results": [r.to_json() for r in results],
            "failures": [r.to_json() for r in failed]}
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<18} {r.name:<{width}}  {r.trials:>6} trials"
             + (f"  {r.detail}" if r.detail else "") for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return data, "\n".join(lines), (EXIT_VERIFY if failed else EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive, default=10000)
    common.add_argument("--rank-threshold", type=float, default=1e-9)
    common.add_argument("--guard-band", type=float, default=1e-6)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--out", type=Path, help="write output to this file")

    p = argparse.ArgumentParser(prog="qlogic", description="Propositional quantum logic over C^n.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a formula on an environment file")
    e.add_argument("formula", help="formula text, or @path")
    e.add_argument("environment", help="environment JSON file")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("construct", parents=[common], help="print a named formula")
    c.add_argument("kind", choices=["P", "alpha", "gamma", "beta", "separator"])
    c.add_argument("params", nargs="*")
    c.set_defaults(func=cmd_construct)

    d = sub.add_parser("dbar", parents=[common], help="random lower bound on the maximal dimension")
    d.add_argument("formula", help="formula text, or @path")
    d.add_argument("n", type=_positive)
    d.add_argument("--dims", default="auto", choices=["auto", "exhaustive", "uniform"])
    d.set_defaults(func=cmd_dbar)

    s = sub.add_parser("separate", parents=[common], help="separate QL(C^m) from QL(C^n)")
    s.add_argument("m", type=int)
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_separate)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", choices=[*checks.SUITES, "all"])
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.seed, args.trials, args.rank_threshold, args.guard_band, "json" if args.json else "text")
        cfg.tol
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = args.func(args, cfg)
    except CliError as exc:
        if cfg.output == "json":
            print(json.dumps({"error": str(exc), "exit_code": exc.code}), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.code
    data, text = out[0], out[1]
    code = out[2] if len(out) > 2 else EXIT_OK
    rendered = json.dumps(data, indent=2) if cfg.output == "json" else text
    if args.out:
        args.out.write_text(rendered + "\n")
    else:
        print(rendered)
    if code != EXIT_OK and cfg.output == "text":
        print("verification failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
