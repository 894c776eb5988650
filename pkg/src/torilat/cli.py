"""Command-line front end.

Every command prints one JSON document (keys sorted, ``"schema": "torilat/1"``)
or, with ``--format text``, a short human-readable summary.  Exit codes:
0 on success, 1 when a requested certificate or fixture fails to verify,
2 on invalid input or a request outside the supported range.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .classifier import classify, cross_check
from .cohomology import bar_cohomology, flabby_class_h1, obstruction_report, sha_omega2, tate
from .errors import OutOfScope, TorilatError, VerificationError
from .groups import (
    CATALOG_NAMES,
    FiniteGroup,
    Subgroup,
    all_subgroups,
    catalog_group,
    conjugate,
    group_from_json,
    parse_subgroup_list,
    subgroup_label,
)
from .lattice import FinAb, GLattice, restrict
from .multinorm import (
    MultinormData,
    ReductionTrace,
    absorb_unit_weights,
    build_I,
    build_J,
    multiset_from_json,
    quotient_descend,
    reduce_multiplicities,
    reduce_to_reduced,
    restrict_multinorm,
    strongly_reduce,
)
from .resolutions import ComplexVerificationError, fixture

SCHEMA = "torilat/1"

GRAMMAR = """\
group:     a catalog name (C8, D4, C4xC2, C3xD4, E(2,3), Q8, ...),
           inline JSON such as '{"type":"product","factors":["C3","D4"]}',
           or @path to a file holding either form.
subgroups: bracketed generator lists, e.g. "[t],[st]" or "<s>,<s*t>,<t>".
           A word is a product of named generators with optional integer
           exponents (s^2t, s^-1), or #k for the raw element index k.
           "<>" or "<1>" is the trivial subgroup.  Repeating a member
           raises its multiplicity.  Inline JSON lists of
           {"subgroup": [...], "weights": [...]} and @path are accepted.
weights:   comma separated positive integers, one per listed member.
caps:      TORILAT_CAPS="h2=32,subgroups=128" raises or lowers size caps.
"""


class UsageError(TorilatError):
    pass


# ---------------------------------------------------------------------------
# argument decoding


def _read_arg(text: str) -> str:
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc}") from exc
    return text


def parse_group(text: str) -> FiniteGroup:
    raw = _read_arg(text)
    if raw.startswith("{"):
        try:
            spec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid group JSON: {exc}") from exc
        return group_from_json(spec)
    return catalog_group(raw)


def parse_subgroups(G: FiniteGroup, text: str) -> list[Subgroup]:
    raw = _read_arg(text)
    return parse_subgroup_list(G, raw)


def parse_data(G: FiniteGroup, text: str, weights: str | None = None) -> MultinormData:
    raw = _read_arg(text)
    if raw.startswith("[{"):
        if weights:
            raise UsageError("weights are part of the JSON multiset; drop --weights")
        try:
            return multiset_from_json(G, json.loads(raw))
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid multiset JSON: {exc}") from exc
    members = parse_subgroup_list(G, raw)
    if weights is None:
        return MultinormData.unit(members)
    try:
        ws = [int(x) for x in weights.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"weights must be integers: {weights!r}") from exc
    if len(ws) != len(members):
        raise UsageError(f"{len(ws)} weights given for {len(members)} members")
    if any(w < 1 for w in ws):
        raise UsageError("weights must be positive")
    return MultinormData(tuple((H, (w,)) for H, w in zip(members, ws)))


def parse_one_subgroup(G: FiniteGroup, text: str) -> Subgroup:
    found = parse_subgroups(G, text)
    if len(found) != 1:
        raise UsageError(f"expected exactly one subgroup, got {len(found)}")
    return found[0]


# ---------------------------------------------------------------------------
# rendering


def finab_json(A: FinAb) -> dict:
    out = A.to_json()
    out["text"] = str(A)
    return out


def _group_json(G: FiniteGroup) -> dict:
    return {"label": G.label, "order": G.order, "generators": sorted(G.names)}


def _envelope(command: str, payload: dict) -> dict:
    out = {"schema": SCHEMA, "command": command, "version": __version__}
    out.update(payload)
    return out


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), ensure_ascii=False)


def _text_lines(doc: dict) -> list[str]:
    """A flat rendering: one ``key: value`` line per scalar leaf."""
    lines: list[str] = []

    def walk(prefix: str, node) -> None:
        if isinstance(node, dict):
            for k in sorted(node):
                walk(f"{prefix}.{k}" if prefix else k, node[k])
        elif isinstance(node, list) and node and any(isinstance(x, (dict, list)) for x in node):
            for i, x in enumerate(node):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {node if not isinstance(node, list) else ', '.join(map(str, node))}")

    walk("", doc)
    return lines


def _check_trace(trace: ReductionTrace | None) -> dict:
    """Verify every step and, for single-group traces, replay the chain."""
    if trace is None:
        return {"verified": True, "steps": 0}
    trace.verify()
    out = {"verified": True, "steps": len(trace.steps)}
    if all(s.codomain_group == trace.group for s in trace.steps):
        cert = trace.replay()
        cert.verify_dual()
        out["replayed"] = True
        out["left_summands"] = [subgroup_label(trace.group, H) for H in cert.left]
        out["right_summands"] = [subgroup_label(trace.group, H) for H in cert.right]
    else:
        out["replayed"] = False
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(args) -> dict:
    rows = []
    for name in CATALOG_NAMES:
        G = catalog_group(name)
        if args.max_order is not None and G.order > args.max_order:
            continue
        rows.append({"name": name, "order": G.order, "generators": sorted(G.names)})
    return {"groups": rows}


def cmd_classify(args) -> dict:
    G = parse_group(args.group)
    data = parse_data(G, args.subgroups)
    verdict = classify(G, data)
    out = {"group": _group_json(G), "verdict": verdict.to_json(with_trace=args.with_trace)}
    if args.replay:
        out["replay"] = [_check_trace(verdict.trace)] + [_check_trace(t) for t in verdict.extra_traces]
    if args.cross_check:
        out["cross_check"] = cross_check(G, data).to_json()
    return out


def _lattice_for(G: FiniteGroup, data: MultinormData, which: str) -> GLattice:
    return build_J(G, data) if which == "J" else build_I(G, data)


def cmd_cohomology(args) -> dict:
    G = parse_group(args.group)
    data = parse_data(G, args.multiset, args.weights)
    out: dict = {"group": _group_json(G), "multiset": data.describe(G), "op": args.op, "lattice": args.lattice}
    if args.op == "report":
        rep = obstruction_report(G, data)
        out["report"] = rep.to_json()
        return out
    M = _lattice_for(G, data, args.lattice)
    if args.op == "sha2":
        out["result"] = finab_json(sha_omega2(G, M))
        return out
    if args.op == "flabby-h1":
        out["result"] = finab_json(flabby_class_h1(M))
        return out
    degree = {"h-1": -1, "h0": 0, "h1": 1, "h2": 2}[args.op]
    H = parse_one_subgroup(G, args.subgroup) if args.subgroup else None
    if H is not None:
        out["subgroup"] = subgroup_label(G, H)
    if args.route == "bar":
        if degree not in (1, 2):
            raise UsageError("the bar route covers degrees 1 and 2")
        N = M if H is None else restrict(M, H)
        tate(N.group, N, degree)  # size cap check
        out["result"] = finab_json(bar_cohomology(N, degree))
    else:
        out["result"] = finab_json(tate(G, M, degree, H))
    out["route"] = args.route
    return out


_REDUCERS = {
    "reduced": reduce_to_reduced,
    "multiplicities": reduce_multiplicities,
    "strongly": None,
    "absorb": absorb_unit_weights,
}


def cmd_reduce(args) -> dict:
    G = parse_group(args.group)
    data = parse_data(G, args.multiset, args.weights)
    if args.op == "strongly":
        red, trace = reduce_to_reduced(G, data)
        end, tr2 = strongly_reduce(G, red)
        trace.extend(tr2)
    else:
        end, trace = _REDUCERS[args.op](G, data)
    out = {
        "group": _group_json(G),
        "source": data.describe(G),
        "target": end.describe(G),
        "target_data": end.to_json(G),
        "steps": [s.rule for s in trace.steps],
    }
    if args.with_trace:
        out["trace"] = trace.to_json()
    if args.replay:
        out["replay"] = _check_trace(trace)
    return out


def cmd_restrict(args) -> dict:
    G = parse_group(args.group)
    data = parse_data(G, args.multiset, args.weights)
    P = parse_one_subgroup(G, args.to)
    PG, pdata, trace = restrict_multinorm(G, data, None, P)
    out = {
        "group": _group_json(G),
        "subgroup": subgroup_label(G, P),
        "restricted_group": _group_json(PG),
        "target": pdata.describe(PG),
        "target_data": pdata.to_json(PG),
    }
    if args.with_trace:
        out["trace"] = trace.to_json()
    if args.replay:
        out["replay"] = _check_trace(trace)
    return out


def cmd_quotient(args) -> dict:
    G = parse_group(args.group)
    data = parse_data(G, args.multiset, args.weights)
    N = parse_one_subgroup(G, args.by)
    Q, qdata, trace = quotient_descend(G, data, None, N)
    out = {
        "group": _group_json(G),
        "normal_subgroup": subgroup_label(G, N),
        "quotient_group": _group_json(Q),
        "target": qdata.describe(Q),
        "target_data": qdata.to_json(Q),
    }
    if args.with_trace:
        out["trace"] = trace.to_json()
    if args.replay:
        out["replay"] = _check_trace(trace)
    return out


class FixtureFailed(Exception):
    def __init__(self, doc: dict):
        super().__init__("fixture failed")
        self.doc = doc


def cmd_verify_resolution(args) -> dict:
    try:
        cx = fixture(args.fixture)
    except ComplexVerificationError as exc:
        doc = {
            "fixture": args.fixture,
            "ok": False,
            "claims": [c.to_json() for c in exc.claims],
        }
        raise FixtureFailed(doc) from exc
    out = {"fixture": args.fixture, "complex": cx.to_json(), "ok": cx.ok}
    rebased = []
    for seed in range(args.rebase):
        rb = cx.rebased(seed)
        rebased.append({"seed": seed, "ok": rb.ok})
    if rebased:
        out["rebased"] = rebased
        out["ok"] = cx.ok and all(r["ok"] for r in rebased)
    if not out["ok"]:
        raise FixtureFailed(out)
    return out


# -- sweep ----------------------------------------------------------------


def _canonical(G: FiniteGroup, members: Sequence[Subgroup]) -> tuple:
    best = None
    for g in range(G.order):
        key = tuple(sorted(conjugate(G, H, g).key() for H in members))
        if best is None or key < best:
            best = key
    return best


def reduced_sets(G: FiniteGroup, max_members: int) -> list[tuple[Subgroup, ...]]:
    """Reduced sets (no member inside another) up to simultaneous conjugation."""
    subs = all_subgroups(G)
    out: list[tuple[Subgroup, ...]] = []
    seen: set = set()

    def extend(start: int, current: list[Subgroup]) -> None:
        if current:
            key = _canonical(G, current)
            if key not in seen:
                seen.add(key)
                out.append(tuple(current))
        if len(current) == max_members:
            return
        for i in range(start, len(subs)):
            H = subs[i]
            if any(H.issubset(K) or K.issubset(H) for K in current):
                continue
            current.append(H)
            extend(i + 1, current)
            current.pop()

    extend(0, [])
    return out


def _sweep_case(job: tuple[str, tuple[tuple[int, ...], ...]]) -> str:
    name, members = job
    G = catalog_group(name)
    HH = [Subgroup(m) for m in members]
    row: dict = {"group": name, "members": [subgroup_label(G, H) for H in HH]}
    try:
        v = classify(G, HH)
        row["status"] = v.status
        row["rationale"] = v.rationale
        if v.failing:
            row["failing_condition"] = v.failing
    except OutOfScope as exc:
        row["status"] = "OutOfScope"
        row["reason"] = str(exc)
    return _dump(dict(row, schema=SCHEMA))


def sweep_jobs(max_order: int, max_members: int, names: Iterable[str] | None = None) -> list[tuple]:
    jobs = []
    for name in names or CATALOG_NAMES:
        G = catalog_group(name)
        if G.order > max_order:
            continue
        for members in reduced_sets(G, max_members):
            jobs.append((name, tuple(H.elements for H in members)))
    return jobs


def run_sweep(args, stream) -> int:
    names = args.groups.split(",") if args.groups else None
    jobs = sweep_jobs(args.max_order, args.max_members, names)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            lines = pool.map(_sweep_case, jobs, chunksize=8)
            for line in lines:
                stream.write(line + "\n")
    else:
        for job in jobs:
            stream.write(_sweep_case(job) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="torilat",
        description="Character lattices of multinorm one tori: classification, cohomology, reductions.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"torilat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_weights=True, key="--multiset"):
        sp.add_argument("--group", required=True, help="group spec (see grammar below)")
        sp.add_argument(key, required=True, dest="subgroups" if key == "--subgroups" else "multiset", help="subgroup list")
        if with_weights:
            sp.add_argument("--weights", help="one positive weight per listed member")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    def sp(name, help_text):
        return sub.add_parser(name, help=help_text, epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)

    c = sp("catalog", "list catalog groups")
    c.add_argument("--max-order", type=int)
    c.add_argument("--format", choices=("json", "text"), default="json")

    c = sp("classify", "decide quasi-permutation / not quasi-invertible")
    common(c, with_weights=False, key="--subgroups")
    c.add_argument("--with-trace", action="store_true", help="include reduction steps with matrices")
    c.add_argument("--replay", action="store_true", help="re-verify every certificate (exit 1 on failure)")
    c.add_argument("--cross-check", action="store_true", help="compare against the Sha obstruction report")

    c = sp("cohomology", "Tate cohomology, Sha^2_omega, obstruction reports")
    common(c)
    c.add_argument("--op", required=True, choices=("h-1", "h0", "h1", "h2", "sha2", "flabby-h1", "report"))
    c.add_argument("--lattice", choices=("J", "I"), default="J")
    c.add_argument("--subgroup", help="compute over this subgroup (degrees -1..2)")
    c.add_argument("--route", choices=("crossed", "bar"), default="crossed", help="H^1/H^2 algorithm")

    c = sp("reduce", "apply reduction rules with certificates")
    common(c)
    c.add_argument("--op", choices=("reduced", "multiplicities", "strongly", "absorb"), default="reduced")
    c.add_argument("--with-trace", action="store_true")
    c.add_argument("--replay", action="store_true")

    c = sp("restrict", "Mackey restriction to a subgroup")
    common(c)
    c.add_argument("--to", required=True, help="the subgroup, e.g. \"<s>\"")
    c.add_argument("--with-trace", action="store_true")
    c.add_argument("--replay", action="store_true")

    c = sp("quotient", "descend along a normal subgroup inside every member")
    common(c)
    c.add_argument("--by", required=True, help="the normal subgroup")
    c.add_argument("--with-trace", action="store_true")
    c.add_argument("--replay", action="store_true")

    c = sp("verify-resolution", "build and check an explicit complex")
    c.add_argument("fixture", help="dihedral:m, nlqp:m:nu, v4, apt1 or apt2")
    c.add_argument("--rebase", type=int, default=0, help="also check N random re-basings")
    c.add_argument("--format", choices=("json", "text"), default="json")

    c = sp("sweep", "classify every reduced set over catalog groups (JSON lines)")
    c.add_argument("--max-order", type=int, default=8)
    c.add_argument("--max-members", type=int, default=3)
    c.add_argument("--groups", help="comma separated catalog names (default: whole catalog)")
    c.add_argument("--jobs", type=int, default=1)
    return p


_COMMANDS = {
    "catalog": cmd_catalog,
    "classify": cmd_classify,
    "cohomology": cmd_cohomology,
    "reduce": cmd_reduce,
    "restrict": cmd_restrict,
    "quotient": cmd_quotient,
    "verify-resolution": cmd_verify_resolution,
}


def _emit(doc: dict, fmt: str, stream) -> None:
    if fmt == "text":
        stream.write("\n".join(_text_lines(doc)) + "\n")
    else:
        stream.write(_dump(doc) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    fmt = getattr(args, "format", "json")
    try:
        if args.command == "sweep":
            return run_sweep(args, stdout)
        payload = _COMMANDS[args.command](args)
    except FixtureFailed as exc:
        stderr.write(f"torilat: fixture {args.fixture} failed verification\n")
        _emit(_envelope(args.command, exc.doc), fmt, stdout)
        return 1
    except VerificationError as exc:
        stderr.write(f"torilat: verification failed: {exc}\n")
        _emit(_envelope(args.command, {"error": "verification", "message": str(exc)}), fmt, stdout)
        return 1
    except (TorilatError, ValueError, KeyError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"unknown key {exc}"
        stderr.write(f"torilat: error: {msg}\n")
        _emit(_envelope(args.command, {"error": type(exc).__name__, "message": msg}), fmt, stdout)
        return 2
    _emit(_envelope(args.command, payload), fmt, stdout)
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
