"""Command-line front end.

Exit codes: 0 pass, 1 negative decision or invalid input, 2 parse or
resolution error, 3 budget or cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path as FsPath

from .construct import certify_constructible, replay_certificate
from .dsl import (
    Document,
    dualize_document,
    load,
    parse_document,
    serialize_document,
    serialize_sketch,
)
from .errors import BudgetExceeded, ParseError, PreconditionError, ResolutionError
from .fincat import extract_category, is_iso, is_mono, validate_category
from .kernel import strip_convergence, validate_sketch
from .models import Structure, default_budget, validate_structure
from .sequents import (
    DEFAULT_CAP,
    MODES,
    STRICT,
    decide,
    is_unconditional_finite_kind,
    validate_sequent,
)

SCHEMA_VERSION = "1.0"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class Outcome(Exception):
    """Carries a finished verdict out of a command body."""

    def __init__(self, verdict: str, details: dict, code: int):
        super().__init__(verdict)
        self.verdict = verdict
        self.details = details
        self.code = code


# ---- report -------------------------------------------------------------


def _deterministic(args) -> bool:
    return bool(getattr(args, "deterministic", False)) or os.environ.get("SKETCHKIT_DETERMINISTIC") == "1"


def make_report(command: str, inputs, verdict: str, details: dict, elapsed_ms: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": [str(i) for i in inputs],
        "verdict": verdict,
        "details": details,
        "elapsed_ms": elapsed_ms,
    }


def report_schema() -> dict:
    text = resources.files("sketchkit").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)


def _structure_json(F: Structure | None):
    if F is None:
        return None
    return {"sketch": F.sketch.name, "category": F.category.name,
            "objects": dict(F.objects), "arrows": dict(F.arrows)}


def _say(text: str) -> None:
    print(text, file=sys.stderr)


# ---- commands -----------------------------------------------------------


def _budget(args) -> int:
    return args.budget if getattr(args, "budget", None) is not None else default_budget()


def cmd_check(args, doc: Document) -> tuple[str, dict, int]:
    violations = []
    for decl in doc:
        v = decl.value
        if decl.kind == "category":
            rep = validate_category(v)
        elif decl.kind == "sketch":
            rep = validate_sketch(v)
        elif decl.kind == "sequent":
            rep = validate_sequent(v)
        else:
            rep = validate_structure(v)
        violations += [{"location": x.location, "message": x.message} for x in rep]
    for x in violations:
        _say(f"violation: {x['location']}: {x['message']}")
    _say(f"checked {len(doc)} declarations, {len(violations)} violations")
    details = {"declarations": len(doc), "violations": violations}
    return ("pass", details, EXIT_PASS) if not violations else ("fail", details, EXIT_FAIL)


def _sequent_input(args, doc: Document):
    s = doc.sequent(args.sequent)
    rep = validate_sequent(s)
    if not rep.ok:
        raise Outcome("fail", {"violations": [{"location": x.location, "message": x.message} for x in rep]},
                      EXIT_FAIL)
    return s


def cmd_verify(args, doc: Document):
    s = _sequent_input(args, doc)
    if args.structure:
        F = doc.structure(args.structure)
        c = F.category
    elif args.category:
        c = doc.category(args.category)
        if s.x.vertices:
            raise ResolutionError(f"sequent {s.name} is not of empty type; pass --structure")
        F = Structure(s.x, c, (), ())
    else:
        raise ResolutionError("verify needs --structure or --category")
    rep = validate_structure(F)
    if not rep.ok:
        raise Outcome("fail", {"violations": [{"location": x.location, "message": x.message} for x in rep]},
                      EXIT_FAIL)
    d = decide(s, F, c, args.mode, args.cap, _budget(args))
    details = {
        "sequent": s.name,
        "structure": args.structure or None,
        "category": c.name,
        "mode": d.mode,
        "holds": d.holds,
        "delegated": d.delegated,
        "note": d.note,
        "witnesses": [{"G": _structure_json(g), "H": _structure_json(h)} for g, h in d.witnesses],
        "counterexample": _structure_json(d.counterexample),
    }
    _say(f"{s.name} for {args.structure or c.name} ({d.mode}): {'holds' if d.holds else 'fails'}")
    if d.counterexample is not None:
        _say(f"counterexample: {details['counterexample']['objects']} {details['counterexample']['arrows']}")
    return ("pass", details, EXIT_PASS) if d.holds else ("fail", details, EXIT_FAIL)


def _construct_budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("SKETCHKIT_BUDGET")
    return int(env) if env else 100_000


def cmd_constructible(args, doc: Document):
    s = _sequent_input(args, doc)
    cert = certify_constructible(s.a, s.b, _construct_budget(args))
    details = {"sequent": s.name, "certificate": cert.to_json()}
    if cert.ok:
        details["replay"] = replay_certificate(cert, s.a, s.b)
        _say(f"{s.name}: beta is constructible in {len(cert.steps)} steps")
        for st in cert.steps:
            _say(f"  {st.procedure}: {', '.join(st.items)}")
        return "pass", details, EXIT_PASS
    _say(f"{s.name}: no construction found; missing: {', '.join(cert.missing)}")
    return "fail", details, EXIT_FAIL


def cmd_unconditional(args, doc: Document):
    s = _sequent_input(args, doc)
    ok = is_unconditional_finite_kind(s)
    ex = extract_category(s.a)
    details = {"sequent": s.name, "unconditional": ok,
               "category_extracted": ex.ok, "reason": ex.reason}
    _say(f"{s.name}: alpha is {'' if ok else 'not '}unconditional of finite kind")
    return ("pass", details, EXIT_PASS) if ok else ("fail", details, EXIT_FAIL)


def _emit_text(text: str, out: str | None, as_json: bool, details: dict) -> None:
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
        details["output"] = out
    else:
        details["output"] = None
        if as_json:
            details["text"] = text
        else:
            sys.stdout.write(text)


def cmd_dualize(args, doc: Document):
    dual = dualize_document(doc)
    details = {"declarations": len(dual)}
    _emit_text(serialize_document(dual), args.out, args.json, details)
    return "pass", details, EXIT_PASS


def cmd_strip(args, doc: Document):
    z = doc.sketch(args.sketch)
    text = serialize_sketch(strip_convergence(z)) + "\n"
    details = {"sketch": z.name, "removed": len(z.convergences)}
    _emit_text(text, args.out, args.json, details)
    return "pass", details, EXIT_PASS


# ---- golden corpus ------------------------------------------------------


def corpus_dir():
    return resources.files("sketchkit").joinpath("corpus")


def corpus_path() -> str:
    return str(corpus_dir().joinpath("golden.sk"))


def _sweep(doc: Document, member: dict) -> tuple[bool, list[str]]:
    oracle = {"iso": is_iso, "mono": is_mono}[member["oracle"]]
    s = doc.sequent(member["sequent"])
    mismatches = []
    for c in doc.categories.values():
        for a in c.arrows:
            F = Structure.from_mapping(s.x, c, {"A": a.source, "B": a.target, "f": a.name})
            got = decide(s, F, c, STRICT).holds
            if got != oracle(c, a.name):
                mismatches.append(f"{c.name}:{a.name}")
    return not mismatches, mismatches


def run_member(doc: Document, text: str, member: dict) -> tuple[bool, str]:
    kind = member["kind"]
    if kind == "check":
        bad = 0
        for decl in doc:
            v = decl.value
            rep = {"category": validate_category, "sketch": validate_sketch,
                   "sequent": validate_sequent, "structure": validate_structure}[decl.kind](v)
            bad += len(rep)
        return bad == 0, f"{bad} violations"
    if kind == "roundtrip":
        ok = parse_document(serialize_document(doc)) == doc and parse_document(text) == doc
        return ok, "identity" if ok else "differs"
    if kind == "verify":
        s = doc.sequent(member["sequent"])
        if "structure" in member:
            F = doc.structure(member["structure"])
        else:
            F = Structure(s.x, doc.category(member["category"]), (), ())
        d = decide(s, F, F.category, member.get("mode", STRICT))
        return d.holds, "holds" if d.holds else "fails"
    if kind == "constructible":
        s = doc.sequent(member["sequent"])
        cert = certify_constructible(s.a, s.b)
        if cert.ok and not replay_certificate(cert, s.a, s.b):
            return (not member["expect"]), "certificate does not replay"
        return cert.ok, f"{len(cert.steps)} steps" if cert.ok else "refused"
    if kind == "unconditional":
        ok = is_unconditional_finite_kind(doc.sequent(member["sequent"]))
        return ok, str(ok).lower()
    if kind == "sweep":
        ok, mism = _sweep(doc, member)
        return ok, "all agree" if ok else "mismatch: " + ", ".join(mism)
    raise ValueError(f"unknown member kind {kind!r}")


def run_corpus(expectations: str | None = None, document: str | None = None) -> tuple[str, dict]:
    exp_path = FsPath(expectations) if expectations else FsPath(str(corpus_dir().joinpath("golden.json")))
    manifest = json.loads(exp_path.read_text("utf-8"))
    doc_path = FsPath(document) if document else exp_path.parent / manifest.get("document", "golden.sk")
    text = doc_path.read_text("utf-8")
    doc = parse_document(text)
    members = []
    for m in manifest["members"]:
        got, info = run_member(doc, text, m)
        members.append({"id": m["id"], "expect": m["expect"], "got": got,
                        "ok": got == m["expect"], "info": info})
    failed = [m["id"] for m in members if not m["ok"]]
    details = {"members": members, "passed": len(members) - len(failed), "failed": failed,
               "document": str(doc_path), "expectations": str(exp_path)}
    return ("pass" if not failed else "fail"), details


def cmd_corpus(args):
    if args.action == "path":
        print(corpus_path())
        return "pass", {"path": corpus_path()}, EXIT_PASS
    verdict, details = run_corpus(args.expectations, args.document)
    width = max(len(m["id"]) for m in details["members"])
    for m in details["members"]:
        _say(f"{m['id']:<{width}}  {'ok  ' if m['ok'] else 'FAIL'}  expect={str(m['expect']).lower():<5}  {m['info']}")
    _say(f"{details['passed']}/{len(details['members'])} members match")
    return verdict, details, EXIT_PASS if verdict == "pass" else EXIT_FAIL


# ---- argument parsing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    common.add_argument("--deterministic", action="store_true", help="report elapsed_ms as 0")

    p = argparse.ArgumentParser(prog="sketchkit", description="Exactness sketches over finite categories.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="validate every declaration")
    c.add_argument("file")

    v = sub.add_parser("verify", parents=[common], help="decide existence of a verification")
    v.add_argument("file")
    v.add_argument("--sequent", required=True)
    v.add_argument("--structure")
    v.add_argument("--category", help="for sequents of empty type")
    v.add_argument("--mode", choices=MODES, default=STRICT)
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.add_argument("--budget", type=int)

    k = sub.add_parser("constructible", parents=[common], help="certify constructibility of beta")
    k.add_argument("file")
    k.add_argument("--sequent", required=True)
    k.add_argument("--budget", type=int)

    u = sub.add_parser("unconditional", parents=[common], help="is alpha unconditional of finite kind")
    u.add_argument("file")
    u.add_argument("--sequent", required=True)

    d = sub.add_parser("dualize", parents=[common], help="dualize a whole document")
    d.add_argument("file")
    d.add_argument("--out")

    s = sub.add_parser("strip", parents=[common], help="drop convergence conditions of a sketch")
    s.add_argument("file")
    s.add_argument("--sketch", required=True)
    s.add_argument("--out")

    g = sub.add_parser("corpus", parents=[common], help="bundled golden corpus")
    g.add_argument("action", choices=("run", "path"))
    g.add_argument("--expectations")
    g.add_argument("--document")
    return p


COMMANDS = {
    "check": cmd_check,
    "verify": cmd_verify,
    "constructible": cmd_constructible,
    "unconditional": cmd_unconditional,
    "dualize": cmd_dualize,
    "strip": cmd_strip,
}


def run(argv=None) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the report."""
    args = build_parser().parse_args(argv)
    inputs = [args.file] if hasattr(args, "file") else []
    t0 = time.perf_counter()
    try:
        if args.command == "corpus":
            verdict, details, code = cmd_corpus(args)
        else:
            doc = load(args.file)
            verdict, details, code = COMMANDS[args.command](args, doc)
    except Outcome as o:
        verdict, details, code = o.verdict, o.details, o.code
    except ParseError as e:
        _say(f"parse error: {e}")
        verdict, code = "error", EXIT_INPUT
        details = {"error": "parse", "message": e.message, "line": e.line, "column": e.column,
                   "expected": list(e.expected)}
    except ResolutionError as e:
        for m in e.messages:
            _say(f"resolution error: {m}")
        verdict, code = "error", EXIT_INPUT
        details = {"error": "resolution", "messages": e.messages}
    except BudgetExceeded as e:
        _say(f"budget exceeded: {e}")
        verdict, code = "error", EXIT_BUDGET
        details = {"error": "budget", "message": str(e), "budget": e.budget}
    except (PreconditionError, OSError) as e:
        _say(f"error: {e}")
        semantic = isinstance(e, PreconditionError)
        verdict, code = ("fail", EXIT_FAIL) if semantic else ("error", EXIT_INPUT)
        details = {"error": "input", "message": str(e)}
        if semantic:
            details["violations"] = [{"location": "input", "message": str(e)}]
    elapsed = 0 if _deterministic(args) else int((time.perf_counter() - t0) * 1000)
    report = make_report(args.command, inputs, verdict, details, elapsed)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code, report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
