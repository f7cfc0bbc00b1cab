"""Command line front end.

    ncdiffop relations  --builtin su2q
    ncdiffop curvature  --builtin su2q --params mu_p=1,mu_m=1 [--check-flat]
    ncdiffop verify     --builtin classical-plane --suite action [--json]

Exit codes: 0 success, 1 usage, 2 invalid calculus, 3 missing capability,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import calcfile
from .calculus import CalculusSpec, CapabilityError, SpecError, module_curvature, omega1_module, trivial_module
from .diffops import da_relations, relation_words
from .library import (
    BUILTINS,
    builtin,
    curvature_under,
    search_case_d,
    su2q_curvature_coefficients,
    su2q_flat_cases,
)
from .scalar import ScalarError, Scalar, parse_scalar, render, substitute
from .suites import SUITES
from .tensors import Index, format_diffop

EXIT_OK, EXIT_USAGE, EXIT_SPEC, EXIT_CAPABILITY, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _load(args) -> CalculusSpec:
    if args.builtin and args.file:
        raise UsageError("give either --builtin or --file, not both")
    if args.file:
        return calcfile.load(args.file)
    name = args.builtin or "su2q"
    if name not in BUILTINS:
        raise UsageError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    return builtin(name)


def _parse_params(text: str | None, spec: CalculusSpec) -> dict[str, Scalar]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"--params expects name=value pairs, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in spec.parameters:
            raise UsageError(f"{k!r} is not a parameter of this calculus")
        try:
            out[k] = parse_scalar(v, spec.parameters)
        except ScalarError as exc:
            raise UsageError(f"--params {k}: {exc}") from None
    return out


def _word(spec: CalculusSpec, idx: Index, sep: str) -> str:
    return sep.join(spec.vec_names[i] for i in idx) if idx else "1"


def format_words(spec: CalculusSpec, words: dict[Index, Scalar]) -> str:
    parts = []
    for idx, c in sorted(words.items(), key=lambda kc: (-len(kc[0]), kc[0])):
        coeff = render(c)
        w = _word(spec, idx, "•")
        if coeff == "1":
            parts.append(w)
        elif coeff == "-1":
            parts.append(f"-{w}")
        else:
            parts.append(f"({coeff})*{w}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


# ---------------------------------------------------------------------------
# commands


def cmd_relations(args) -> int:
    spec = _load(args)
    rels = da_relations(spec)
    words = relation_words(spec)
    names = list(spec.vec_names)
    if args.json:
        doc = {
            "calculus": spec.name,
            "relations": [
                {
                    "omega2": spec.omega2_names[k],
                    "words": [[list(w), render(c)] for w, c in sorted(words[k].items())],
                    "terms": [[len(i), list(i), render(c)] for i, c in sorted(r.items(), key=lambda t: (len(t[0]), t[0]))],
                }
                for k, r in enumerate(rels)
            ],
        }
        print(json.dumps(doc, indent=2, ensure_ascii=False))
        return EXIT_OK
    print(f"relations of the differential operator algebra for {spec.name or 'calculus'}:")
    for k, r in enumerate(rels):
        print(f"  R({spec.omega2_names[k]}) = {format_words(spec, words[k])} = 0")
        print(f"      expanded: {format_diffop(r, names)}")
    return EXIT_OK


def _module(spec: CalculusSpec, kind: str):
    if kind in ("algebra", "basis"):
        return trivial_module(spec)
    return omega1_module(spec)


def _render_curvature(spec: CalculusSpec, coeffs: dict, E_names: Sequence[str]) -> list[str]:
    lines = []
    by_a: dict[int, list] = {}
    for (a, k, b), c in sorted(coeffs.items()):
        by_a.setdefault(a, []).append(f"({render(c)}) {spec.omega2_names[k]}⊗{E_names[b]}")
    for a in range(len(E_names)):
        body = " + ".join(by_a.get(a, [])) or "0"
        lines.append(f"  R({E_names[a]}) = {body}")
    return lines


def cmd_curvature(args) -> int:
    spec = _load(args)
    if args.check_flat:
        return _check_flat(args, spec)
    bindings = _parse_params(args.params, spec)
    E = _module(spec, args.module)
    E_names = list(spec.omega1_names) if E.name == "omega1" else ["1"]
    coeffs = {}
    for a in range(E.rank):
        for (k, b), c in module_curvature(spec, E, E.basis(a)).items():
            v = substitute(c, bindings) if bindings else c
            if v:
                coeffs[(a, k, b)] = v
    if args.json:
        doc = {
            "calculus": spec.name,
            "module": E.name,
            "params": {k: render(v) for k, v in sorted(bindings.items())},
            "flat": not coeffs,
            "coefficients": [[a, k, b, render(c)] for (a, k, b), c in sorted(coeffs.items())],
        }
        print(json.dumps(doc, indent=2, ensure_ascii=False))
        return EXIT_OK
    print(f"curvature of {E.name} on {spec.name or 'calculus'}" + (f" at {args.params}" if bindings else ""))
    for line in _render_curvature(spec, coeffs, E_names):
        print(line)
    print("flat" if not coeffs else f"not flat: {len(coeffs)} nonzero coefficient(s)")
    return EXIT_OK


def _check_flat(args, spec: CalculusSpec) -> int:
    if spec.name != "su2q":
        raise UsageError("--check-flat applies to the su2q calculus")
    coeffs = su2q_curvature_coefficients(spec)
    results = []
    for case in su2q_flat_cases():
        res = curvature_under(case.bindings, coeffs)
        results.append((case, res))
    search = search_case_d()
    if args.json:
        doc = {
            "cases": [
                {
                    "case": c.label,
                    "bindings": {k: render(v) for k, v in sorted(c.bindings.items())},
                    "flat": not res,
                    "residual": [[a, k, b, render(x)] for (a, k, b), x in sorted(res.items())],
                    "note": c.note,
                }
                for c, res in results
            ],
            "corrected_d": None
            if search.corrected is None
            else {k: render(v) for k, v in sorted(search.corrected.items())},
        }
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        for c, res in results:
            verdict = "flat" if not res else "NOT flat"
            bind = ", ".join(f"{k}={render(v)}" for k, v in sorted(c.bindings.items()))
            print(f"case ({c.label}): {verdict}   [{bind}]")
            for line in _render_curvature(spec, res, list(spec.omega1_names)) if res else []:
                print("   " + line)
            if c.note:
                print(f"   note: {c.note}")
        if search.corrected is not None:
            bind = ", ".join(f"{k}={render(v)}" for k, v in sorted(search.corrected.items()))
            print(f"case (d) corrected by search: flat   [{bind}]")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _load(args)
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    res = SUITES[args.suite](spec)
    if args.json:
        print(json.dumps(res.to_dict(), indent=2, ensure_ascii=False))
    else:
        for c in res.checks:
            tail = f"  ({c.detail})" if c.detail and not c.ok else ""
            print(f"{'PASS' if c.ok else 'FAIL'}  {c.label}{tail}")
        print(f"suite {res.suite} on {res.spec}: {'ok' if res.ok else 'FAILED'}")
    return EXIT_OK if res.ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncdiffop", description="Noncommutative differential operators from structure constants.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--builtin", metavar="NAME", help=f"one of {', '.join(sorted(BUILTINS))}")
        sp.add_argument("--file", metavar="PATH", help="calculus file (JSON)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("relations", help="relations of the differential operator algebra")
    common(sp)
    sp.set_defaults(func=cmd_relations)

    sp = sub.add_parser("curvature", help="curvature of a module connection")
    common(sp)
    sp.add_argument("--module", choices=("algebra", "basis", "omega1"), default="omega1")
    sp.add_argument("--params", metavar="k=v,...", help="parameter bindings")
    sp.add_argument("--check-flat", action="store_true", help="verdicts for the su2q zero-curvature cases")
    sp.set_defaults(func=cmd_curvature)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp)
    sp.add_argument("--suite", required=True, metavar="NAME", help=", ".join(SUITES))
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"missing capability: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (SpecError, ScalarError, OSError) as exc:
        print(f"invalid calculus: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
