"""Command-line front end.

    imsetlab imsets enumerate -n 3
    imsetlab toric graver -n 4 --classify --budget-secs 600
    imsetlab cone faces -n 4 --f-vector
    imsetlab ideal dimdeg --states 2,2,2 --stmt "1 _||_ 23 | e"
    imsetlab verify relations appendix_verbatim -n 4
    imsetlab report table1 --format json

Exit codes: 0 ok, 1 domain error, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import signal
import sys
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from imsetlab import ci_ideal, cone_faces, toric_bases
from imsetlab.ci_model import DomainError, enumerate_elementary, enumerate_structural
from imsetlab.exact_poly import BudgetExceeded, dim_degree, ideal_equal
from imsetlab.imset_core import build_matrix, decompose, verify_relation
from imsetlab.relation_lang import ParseError, parse_relation_text, parse_statement, render, statement_to_json

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_BUDGET = 600.0

SHIPPED = ("appendix_verbatim", "appendix_corrected", "body_verbatim", "body_corrected")


class UsageError(Exception):
    pass


def shipped_file(name: str) -> Path:
    """Path of a relation file bundled with the package."""
    return Path(str(resources.files("imsetlab") / "data" / f"{name}.rel"))


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and path in SHIPPED:
        return shipped_file(path)
    return p


# ---------------------------------------------------------------------------
# relation file verification

@dataclass
class LineVerdict:
    line: int
    text: str
    valid: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"line": self.line, "relation": self.text,
                "verdict": "VALID" if self.valid else "INVALID", "notes": self.notes}


@dataclass
class VerifySummary:
    path: str
    verdicts: list[LineVerdict]

    @property
    def invalid_lines(self) -> list[int]:
        return [v.line for v in self.verdicts if not v.valid]

    @property
    def counts(self) -> tuple[int, int]:
        bad = len(self.invalid_lines)
        return len(self.verdicts) - bad, bad

    def to_json(self) -> dict:
        ok, bad = self.counts
        return {"file": self.path, "valid": ok, "invalid": bad, "total": ok + bad,
                "lines": [v.to_json() for v in self.verdicts]}

    def lines(self) -> list[str]:
        out = []
        for v in self.verdicts:
            out.append(f"line {v.line}: {'VALID' if v.valid else 'INVALID'}  {v.text}")
            out.extend(f"    {note}" for note in v.notes)
        ok, bad = self.counts
        out.append(f"summary: {ok} VALID, {bad} INVALID, {ok + bad} total")
        return out


def verify_text(text: str, n: int | None = None, path: str = "<text>") -> VerifySummary:
    """Verdict per relation line.

    Unparseable lines and exact repeats of an earlier line are INVALID.
    Each relation is checked over ``max(n, largest index it uses)``.
    """
    raw = text.splitlines()
    parsed = parse_relation_text(text)
    verdicts = [LineVerdict(ln, raw[ln - 1].strip(), False, [f"parse error: {msg}"]) for ln, msg in parsed.errors]
    first_seen: dict[str, int] = {}
    for ln, rel in parsed.relations:
        key = render(rel)
        ground = max(n or 0, rel.n)
        rep = verify_relation(rel, ground)
        notes = list(rep.notes)
        if not rep.valid:
            notes += [f"side {k} imset: {render(u)}" for k, u in enumerate(rep.side_imsets, start=1)]
        valid = rep.valid
        if key in first_seen:
            valid = False
            notes.append(f"repeats line {first_seen[key]}")
        else:
            first_seen[key] = ln
        verdicts.append(LineVerdict(ln, key, valid, notes))
    verdicts.sort(key=lambda v: v.line)
    return VerifySummary(path, verdicts)


def verify_file(path: str | Path, n: int | None = None) -> VerifySummary:
    p = _resolve(str(path))
    return verify_text(p.read_text(encoding="utf-8"), n, str(path))


# ---------------------------------------------------------------------------
# budget

@contextlib.contextmanager
def wall_clock(budget: float | None):
    """Raise BudgetExceeded in the main thread once ``budget`` seconds pass."""
    usable = (budget and budget > 0 and hasattr(signal, "setitimer")
              and threading.current_thread() is threading.main_thread())
    if not usable:
        yield
        return

    def fire(signum, frame):
        raise BudgetExceeded(f"wall-clock budget of {budget:g} s exceeded")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, budget)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# ---------------------------------------------------------------------------
# output

class Output:
    def __init__(self, fmt: str, out: str | None):
        self.fmt = fmt
        self.out = out
        self.chunks: list[str] = []

    def text(self, s: str) -> None:
        self.chunks.append(s if s.endswith("\n") else s + "\n")

    def lines(self, lines: Sequence[str]) -> None:
        for line in lines:
            self.text(line)

    def json(self, obj) -> None:
        self.text(json.dumps(obj, indent=2, sort_keys=False))

    def flush(self) -> None:
        data = "".join(self.chunks)
        if self.out:
            Path(self.out).write_text(data, encoding="utf-8")
        else:
            sys.stdout.write(data)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _require_n(args, lo: int = 2, hi: int = 9) -> int:
    if args.n is None:
        raise UsageError("this command needs -n")
    if not lo <= args.n <= hi:
        raise DomainError(f"n must lie in {lo}..{hi}, got {args.n}")
    return args.n


def _statements(texts: Sequence[str] | None) -> list:
    return [parse_statement(t) for t in texts or []]


def _states(args) -> ci_ideal.StateVector:
    if not args.states:
        raise UsageError("this command needs --states, e.g. --states 2,2,2")
    return ci_ideal.StateVector.parse(args.states)


def _check_format(args, allowed: Sequence[str]) -> None:
    if args.format not in allowed:
        raise UsageError(f"--format {args.format} is not available here; choose from {', '.join(allowed)}")


# ---------------------------------------------------------------------------
# commands

def cmd_imsets(args, out: Output) -> None:
    if args.action == "enumerate":
        n = _require_n(args)
        _check_format(args, ("text", "json"))
        if args.structural:
            rows = enumerate_structural(n)
            if args.format == "json":
                out.json([{"statement": statement_to_json(s), "type": t} for s, t in rows])
            else:
                out.lines(f"{render(s)}\t{t}" for s, t in rows)
        else:
            stmts = enumerate_elementary(n)
            if args.format == "json":
                out.json([statement_to_json(s) for s in stmts])
            else:
                out.lines(render(s) for s in stmts)
    elif args.action == "matrix":
        n = _require_n(args)
        _check_format(args, ("text", "json", "csv"))
        A = build_matrix(n)
        if args.format == "json":
            out.text(A.to_json())
        else:
            out.text(A.to_csv())
    elif args.action == "rank":
        n = _require_n(args)
        A = build_matrix(n)
        r = A.rank()
        if args.format == "json":
            out.json({"n": n, "sigma": len(A.statements), "rank": r})
        else:
            out.text(f"n={n} sigma={len(A.statements)} rank={r}")
    elif args.action == "decompose":
        n = _require_n(args)
        if not args.stmt:
            raise UsageError("decompose needs --stmt")
        target = parse_statement(args.stmt[0])
        found = decompose(target, n, args.max_terms)
        if args.format == "json":
            out.json([[statement_to_json(s) for s in d.parts] for d in found])
        else:
            out.lines("[" + " + ".join(render(s) for s in d.parts) + "]" for d in found)
            out.text(f"{len(found)} decompositions of {render(target)} with at most {args.max_terms} terms")


def _binomial_rows(bs, A, classify: bool):
    if not classify:
        return [b.to_json(A) for b in bs], None
    cls = toric_bases.classify(bs, A)
    rows = []
    for c in cls:
        row = c.binomial.to_json(A)
        row.update(c.to_json())
        rows.append(row)
    return rows, cls


def cmd_toric(args, out: Output) -> None:
    n = _require_n(args, 2, 5)
    _check_format(args, ("text", "json"))
    A = build_matrix(n)
    progress = _progress if args.progress else None
    if args.action == "kernel":
        basis = toric_bases.kernel_basis(A)
        if args.format == "json":
            out.json({"n": n, "basis": [list(v) for v in basis]})
        else:
            out.lines(" ".join(map(str, v)) for v in basis)
        return
    try:
        if args.action == "markov":
            bs = toric_bases.markov_basis(A, method=args.method, budget=args.budget_secs, progress=progress)
        else:
            bs = toric_bases.graver_basis(A, budget=args.budget_secs, progress=progress)
    except toric_bases.PartialResult as exc:
        if args.format == "json":
            out.json({"n": n, "partial": True, "reason": str(exc),
                      "binomials": [b.to_json(A) for b in exc.partial]})
        else:
            out.text(f"PARTIAL RESULT: {exc}")
            out.lines(b.to_text(A) for b in exc.partial)
        out.flush()
        raise
    rows, cls = _binomial_rows(bs, A, args.classify)
    summary = {"count": len(bs), "degrees": toric_bases.degree_profile(bs)}
    if cls is not None:
        summary["multilinear"] = sum(c.is_multilinear for c in cls)
        summary["homogeneous"] = sum(c.is_homogeneous for c in cls)
        summary["orbits"] = toric_bases.orbit_profile(bs, A)
    if args.format == "json":
        out.json({"n": n, "kind": args.action, "summary": summary, "binomials": rows})
    else:
        for row in rows:
            extra = ""
            if cls is not None:
                extra = (f"\tdeg={row['degree']} homogeneous={row['homogeneous']} "
                         f"multilinear={row['multilinear']} orbit={row['orbit']}")
            out.text(row["text"] + extra)
        out.text(f"# {args.action} basis n={n}: " + json.dumps(summary))


def cmd_cone(args, out: Output) -> None:
    n = _require_n(args, 2, 4)
    cone = cone_faces.Cone(n)
    if args.action == "facets":
        _check_format(args, ("text", "json"))
        fs = cone.facets
        if args.format == "json":
            out.json([{"normal": list(f.normal), "statements": [statement_to_json(s) for s in
                                                                  cone_faces.face_to_model(f.incident_rays, cone)]}
                      for f in fs])
        else:
            for f in fs:
                out.text(" ".join(map(str, f.normal)) + "\t" +
                         ", ".join(render(s) for s in cone_faces.face_to_model(f.incident_rays, cone)))
            out.text(f"# {len(fs)} facets")
    elif args.action == "faces":
        _check_format(args, ("text", "json", "dot"))
        lat = cone_faces.face_lattice(cone)
        if args.format == "dot":
            out.text(lat.to_dot())
        elif args.format == "json":
            if args.f_vector:
                out.json({"n": n, "f_vector": lat.f_vector, "total": lat.total})
            else:
                out.text(lat.to_json())
        elif args.f_vector:
            out.text("f-vector: " + " ".join(map(str, lat.f_vector)))
            out.text(f"total: {lat.total}")
        else:
            for d, faces in lat.faces.items():
                for f in faces:
                    out.text(f"dim {d}: " + ", ".join(render(s) for s in cone_faces.face_to_model(f, cone)))
            out.text(f"total: {lat.total}")
    elif args.action == "is-face":
        _check_format(args, ("text", "json"))
        stmts = _statements(args.stmt)
        ans = cone.is_face(stmts)
        if args.format == "json":
            out.json({"statements": [statement_to_json(s) for s in stmts], "is_face": ans})
        else:
            out.text("face" if ans else "not a face")


def cmd_ideal(args, out: Output) -> None:
    _check_format(args, ("text", "json"))
    states = _states(args)
    ring = ci_ideal.prob_ring(states)

    def build(texts, what="--stmt"):
        stmts = _statements(texts)
        if not stmts:
            raise UsageError(f"this command needs at least one {what}")
        return ci_ideal.statements_ideal(stmts, states, ring)

    if args.action == "build":
        I = build(args.stmt)
        gens = [str(g) for g in I.gens]
        if args.format == "json":
            out.json({"states": list(states.r), "ring": list(ring.names), "generators": gens})
        else:
            out.lines(gens)
    elif args.action == "dimdeg":
        dd = dim_degree(build(args.stmt), budget=args.budget_secs)
        if args.format == "json":
            out.json({"states": list(states.r), "dim": dd.krull_dim, "degree": dd.degree})
        else:
            out.text(f"dim={dd.krull_dim} degree={dd.degree}")
    elif args.action == "gb":
        I = build(args.stmt)
        order_ring = ring.with_order(args.order)
        gb = I.groebner(order_ring, args.budget_secs)
        gens = [str(g) for g in gb]
        if args.format == "json":
            out.json({"order": args.order, "basis": gens})
        else:
            out.lines(gens)
    elif args.action == "contains":
        inner, outer = build(args.inner, "--inner"), build(args.outer, "--outer")
        rep = ci_ideal.containment_report(inner, outer)
        if args.format == "json":
            out.json({"inner_in_outer": rep.inner_subset, "outer_in_inner": rep.outer_subset,
                      "per_generator": rep.inner_in_outer})
        else:
            out.text(f"inner in outer: {rep.inner_subset}")
            out.text(f"outer in inner: {rep.outer_subset}")
    elif args.action == "equal":
        a, b = build(args.inner, "--inner"), build(args.outer, "--outer")
        eq = ideal_equal(a, b)
        out.json({"equal": eq}) if args.format == "json" else out.text(f"equal: {eq}")


def cmd_verify(args, out: Output) -> None:
    _check_format(args, ("text", "json"))
    if args.action != "relations":
        raise UsageError("unknown verify action")
    summary = verify_file(args.path, args.n)
    if args.format == "json":
        out.json(summary.to_json())
    else:
        out.lines(summary.lines())


def cmd_report(args, out: Output) -> None:
    _check_format(args, ("text", "json"))
    if args.which in ("table1", "table2", "table3"):
        progress = _progress if args.progress else None
        rep = ci_ideal.table_report(args.which, budget=args.cell_budget, progress=progress)
        if args.format == "json":
            out.json(rep.to_json())
        else:
            out.lines(rep.lines())
    elif args.which == "partners":
        rows = []
        states = _states(args) if args.states else ci_ideal.binary(4)
        for target, (a, b) in ci_ideal.PARTNER_RELATIONS.items():
            r = ci_ideal.side_isomorphism(a, b, states)
            rows.append({
                "relation": target,
                "permutation": list(r.permutation.images) if r.permutation else None,
                "image_equal": r.image_equal,
                "left": [r.left.krull_dim, r.left.degree] if r.left else None,
                "right": [r.right.krull_dim, r.right.degree] if r.right else None,
            })
        if args.format == "json":
            out.json(rows)
        else:
            for row in rows:
                out.text(f"{row['relation']}: permutation={row['permutation']} "
                         f"image_equal={row['image_equal']} left={row['left']} right={row['right']}")


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, help="number of random variables")
    common.add_argument("--states", help="comma-separated state counts, e.g. 2,2,2")
    common.add_argument("--format", default="text", choices=("text", "json", "csv", "dot"))
    common.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET)
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--progress", action="store_true", help="stream progress to stderr")

    p = argparse.ArgumentParser(prog="imsetlab", description="Imsets, toric bases, cones and CI ideals.")
    sub = p.add_subparsers(dest="command", required=True)

    im = sub.add_parser("imsets", help="elementary and structural statements")
    im_sub = im.add_subparsers(dest="action", required=True)
    e = im_sub.add_parser("enumerate", parents=[common])
    e.add_argument("--structural", action="store_true", help="list the non-elementary structural statements")
    im_sub.add_parser("matrix", parents=[common])
    im_sub.add_parser("rank", parents=[common])
    d = im_sub.add_parser("decompose", parents=[common])
    d.add_argument("--stmt", action="append")
    d.add_argument("--max-terms", type=int, default=4)

    tr = sub.add_parser("toric", help="kernel, Markov and Graver bases")
    tr_sub = tr.add_subparsers(dest="action", required=True)
    tr_sub.add_parser("kernel", parents=[common])
    m = tr_sub.add_parser("markov", parents=[common])
    m.add_argument("--method", default="binomial", choices=("binomial", "grevlex", "elimination"))
    m.add_argument("--classify", action="store_true")
    g = tr_sub.add_parser("graver", parents=[common])
    g.add_argument("--classify", action="store_true")

    co = sub.add_parser("cone", help="facets and face lattice of the elementary imset cone")
    co_sub = co.add_subparsers(dest="action", required=True)
    co_sub.add_parser("facets", parents=[common])
    f = co_sub.add_parser("faces", parents=[common])
    f.add_argument("--f-vector", action="store_true")
    isf = co_sub.add_parser("is-face", parents=[common])
    isf.add_argument("--stmt", action="append")

    idl = sub.add_parser("ideal", help="CI ideals in the probability ring")
    idl_sub = idl.add_subparsers(dest="action", required=True)
    for name in ("build", "dimdeg", "gb"):
        q = idl_sub.add_parser(name, parents=[common])
        q.add_argument("--stmt", action="append")
        if name == "gb":
            q.add_argument("--order", default="grevlex", choices=("grevlex", "lex"))
    for name in ("contains", "equal"):
        q = idl_sub.add_parser(name, parents=[common])
        q.add_argument("--inner", action="append")
        q.add_argument("--outer", action="append")

    ve = sub.add_parser("verify", help="check relation files")
    ve_sub = ve.add_subparsers(dest="action", required=True)
    vr = ve_sub.add_parser("relations", parents=[common])
    vr.add_argument("path", help="a .rel file, or one of: " + ", ".join(SHIPPED))

    rp = sub.add_parser("report", help="table reproductions and isomorphism checks")
    rp.add_argument("which", choices=("table1", "table2", "table3", "partners"))
    for a in common._actions:
        if a.dest != "help":
            rp._add_action(a)
    rp.add_argument("--cell-budget", type=float, default=None, help="seconds per table cell")
    return p


HANDLERS = {"imsets": cmd_imsets, "toric": cmd_toric, "cone": cmd_cone,
            "ideal": cmd_ideal, "verify": cmd_verify, "report": cmd_report}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    out = Output(args.format, args.out)
    try:
        with wall_clock(args.budget_secs):
            HANDLERS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out.flush()
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
