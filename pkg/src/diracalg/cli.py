"""Command line: validate, dirac, cohomology, verify.

Exit codes: 0 all checks pass, 1 a check failed, 2 unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, fixtures
from .documents import DocumentError, parse_document
from .exactlin import Field, FieldExtensionRequired, format_scalar
from .liealg import PairError
from .suites import SUITES, Check, run_suites

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_CAP = 3


class InputError(Exception):
    pass


def load(source: str) -> tuple[dict, str]:
    """Read a document from a path, or a shipped fixture via ``fixture:NAME``."""
    if source.startswith("fixture:"):
        name = source.split(":", 1)[1]
        if name not in fixtures.BUILDERS:
            raise InputError(f"unknown fixture {name!r}; known: {', '.join(sorted(fixtures.BUILDERS))}")
        return fixtures.load_shipped(name), source
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read {source}: {err.strerror}") from None
    try:
        return json.loads(text), source
    except json.JSONDecodeError as err:
        raise InputError(f"{source}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None


def _settings(args, parsed) -> tuple[int, str]:
    doc_settings = parsed.settings if parsed is not None else {}
    cap = args.cap if args.cap is not None else int(doc_settings.get("cap", DEFAULT_CAP))
    field = args.field or doc_settings.get("field", "auto")
    if cap < 1:
        raise InputError("--cap must be at least 1")
    return cap, field


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> tuple[dict, int]:
    doc, src = load(args.file)
    parsed = parse_document(doc)
    p = parsed.pair
    rec = Check("validate", "pass", {
        "dim_g": str(p.g.dim), "dim_r": str(p.dim_r), "dim_p": str(p.dim_p),
        "p_basis": ", ".join(p.p_labels), "symmetric": str(p.is_symmetric()).lower(),
        "modules": ", ".join(sorted(parsed.modules)) or "none",
    })
    return _report("validate", src, {}, [rec]), EXIT_OK


def cmd_dirac(args) -> tuple[dict, int]:
    from .dirac import DiracAlgebra

    doc, src = load(args.file)
    parsed = parse_document(doc)
    cap, _ = _settings(args, parsed)
    p = parsed.pair
    alg = DiracAlgebra(p, max(cap, 1))
    results = {
        "D_p": str(alg.D),
        "gamma_p": str(alg.gamma_p),
        "alpha": {p.r_labels[m]: str(alg.alpha({m: 1})) for m in range(p.dim_r)},
        "xi": {p.r_labels[m]: str(alg.xi_gen(m)) for m in range(p.dim_r)},
    }
    rec = Check("dirac.D_invariant", "pass" if alg.is_r_invariant(alg.D) else "fail", {})
    return _report("dirac", src, {"cap": str(cap)}, [rec], results), EXIT_OK if rec.passed else EXIT_FAIL


def cmd_cohomology(args) -> tuple[dict, int]:
    from .dirac import DiracAlgebra
    from .specrep import (
        DiracMatrix, NoCentralCharacter, dirac_cohomology, spinor_module, verify_central_character,
    )

    doc, src = load(args.file)
    parsed = parse_document(doc)
    _, field = _settings(args, parsed)
    p = parsed.pair
    names = sorted(parsed.modules)
    if args.module:
        missing = [m for m in args.module if m not in parsed.modules]
        if missing:
            raise InputError(f"unknown module(s) {missing}; available: {names}")
        names = sorted(args.module)
    if not names:
        raise InputError("document has no modules")
    if args.z != "casimir":
        raise InputError("only --z casimir is supported")
    S = spinor_module(p, field)
    om = DiracAlgebra(p, 2).casimir()
    records, results = [], {"spinor_dim": str(S.dim), "field": S.field.name, "modules": {}}
    for name in names:
        D = DiracMatrix(p, parsed.modules[name], S)
        H = dirac_cohomology(D)
        entry = {"dim_V": str(parsed.modules[name].dim), "dim_H": str(H.dim)}
        if H.weights is not None:
            entry["weights"] = ["(" + ", ".join(format_scalar(x) for x in w) + ")" for w in H.weights]
        entry["r_action"] = {p.r_labels[m]: [[format_scalar(x) for x in row] for row in M.to_dense()]
                             for m, M in enumerate(H.r_action)}
        try:
            rep = verify_central_character(D, om)
            entry["chi"] = format_scalar(rep.chi)
            entry["eta_R"] = str(rep.eta)
            records.append(Check(f"central_character.{name}", "pass" if rep.holds else "fail",
                                 {"chi": format_scalar(rep.chi), "dim_H": str(H.dim)}))
        except NoCentralCharacter as err:
            entry["chi"] = "none"
            records.append(Check(f"central_character.{name}", "skipped", {"reason": str(err)}))
        records.append(Check(f"dirac_commutes_xi.{name}", "pass" if D.commutes_with_xi() else "fail", {}))
        results["modules"][name] = entry
    status = EXIT_OK if all(r.passed for r in records) else EXIT_FAIL
    return _report("cohomology", src, {"field": S.field.name, "z": args.z}, records, results), status


def cmd_verify(args) -> tuple[dict, int]:
    doc, src = load(args.file)
    parsed = parse_document(doc)
    cap, field = _settings(args, parsed)
    records = run_suites(parsed.pair, parsed.modules, args.suite, cap, field)
    status = EXIT_OK if all(r.passed for r in records) else EXIT_FAIL
    return _report("verify", src, {"cap": str(cap), "field": str(field), "suite": args.suite}, records), status


def _report(command, src, settings, records, results=None) -> dict:
    records = sorted(records, key=lambda r: r.name)
    rep = {
        "command": command,
        "input": src,
        "settings": {k: settings[k] for k in sorted(settings)},
        "status": "pass" if all(r.passed for r in records) else "fail",
        "records": [r.as_dict() for r in records],
    }
    if results is not None:
        rep["results"] = results
    return rep


# ---------------------------------------------------------------------------
# output


def render_text(rep: dict) -> str:
    lines = [f"{rep['command']} {rep['input']}: {rep['status'].upper()}"]
    for k, v in rep.get("settings", {}).items():
        lines.append(f"  {k} = {v}")
    for r in rep["records"]:
        lines.append(f"[{r['status'].upper():7}] {r['name']}")
        for k, v in r["witness"].items():
            lines.append(f"            {k}: {v}")
    if "results" in rep:
        lines.extend(_text_results(rep["results"], "  "))
    if "timing" in rep:
        lines.append(f"  elapsed: {rep['timing']} s")
    if "error" in rep:
        lines.append(f"  error: {rep['error']}")
    return "\n".join(lines) + "\n"


def _text_results(obj, indent):
    out = []
    for k, v in obj.items():
        if isinstance(v, dict):
            out.append(f"{indent}{k}:")
            out.extend(_text_results(v, indent + "  "))
        elif isinstance(v, list):
            out.append(f"{indent}{k}: {json.dumps(v, ensure_ascii=False)}")
        else:
            out.append(f"{indent}{k}: {v}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="pair document (JSON path) or fixture:NAME")
    common.add_argument("--cap", type=int, default=None, help="filtration cap N")
    common.add_argument("--field", default=None, help="Q, Qi, Q(sqrtD) or auto (spinor normalisation)")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall-clock time (breaks byte-identical output)")

    ap = argparse.ArgumentParser(prog="diracalg", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"diracalg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a pair document")
    sub.add_parser("dirac", parents=[common], help="print the cubic Dirac element, alpha and xi")
    c = sub.add_parser("cohomology", parents=[common], help="Dirac cohomology of the document's modules")
    c.add_argument("--module", action="append", help="module name (repeatable; default all)")
    c.add_argument("--z", default="casimir", help="central element (casimir)")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return ap


COMMANDS = {"validate": cmd_validate, "dirac": cmd_dirac, "cohomology": cmd_cohomology, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](args)
    except PairError as err:
        # the document parses but does not describe a quadratic pair
        rec = Check("validate", "fail", {"error": type(err).__name__, "message": str(err)})
        rep, code = _report(args.command, args.file, {}, [rec]), EXIT_FAIL
    except (InputError, DocumentError, FieldExtensionRequired, ValueError) as err:
        kind = type(err).__name__
        hint = ""
        if isinstance(err, FieldExtensionRequired):
            hint = f"; rerun with --field {Field(err.d).name} or --field auto"
        rep = {"command": args.command, "input": args.file, "status": "error",
               "error": f"{kind}: {err}{hint}", "records": []}
        code = EXIT_INPUT
    if args.timing:
        rep["timing"] = f"{time.perf_counter() - start:.3f}"
    text = json.dumps(rep, indent=2, ensure_ascii=False) + "\n" if args.format == "json" else render_text(rep)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
