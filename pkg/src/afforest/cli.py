"""Command-line interface: ``afforest <command> FILE [options]``.

Exit codes: 0 success, 1 domain error (invalid structure or game, cap
exceeded, ...), 2 usage error or unreadable input file.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import reports
from .documents import load_situation
from .errors import AFForestError
from .forests import DEFAULT_ENUMERATION_CAP, count_maximal_forests, enumerate_maximal_forests, is_saturated
from .measures import af_exact, efficiency_check, is_situation_dummy
from .montecarlo import EstimationPlan, af_estimate, probably_dummy
from .sensitivity import ArcEdit, sensitivity_report

PROG = "afforest"


class UsageError(Exception):
    pass


def _common(parent: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parent.add_argument("--format", choices=["table", "json", "csv"], default=d("table"))
    parent.add_argument("--output", metavar="PATH", default=d(None), help="write the result here instead of stdout")
    parent.add_argument("--workers", type=int, default=d(None),
                        help="worker threads (default: AFFOREST_THREADS, 0 = all CPUs)")


def _method_options(p: argparse.ArgumentParser):
    m = p.add_mutually_exclusive_group()
    m.add_argument("--exact", dest="method", action="store_const", const="exact")
    m.add_argument("--mc", dest="method", action="store_const", const="mc", help="Monte Carlo estimate")
    m.add_argument("--auto", dest="method", action="store_const", const="auto",
                   help="exact when there are at most 10 * samples forests, otherwise Monte Carlo")
    p.set_defaults(method="exact")
    p.add_argument("--samples", type=int, default=10_000, metavar="K")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--epsilon", type=float, default=None, metavar="E",
                   help="target confidence half-width; sizes the run from a pilot sample")
    p.add_argument("--alpha", type=float, default=0.05, metavar="A")
    p.add_argument("--pilot", type=int, default=200, metavar="K", help="pilot sample size for --epsilon")
    _cap_option(p)


def _cap_option(p: argparse.ArgumentParser):
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                   help="largest number of forests to enumerate (0 = no cap)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Average Forest measure for organisational situations.")
    _common(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file", metavar="FILE")
        return p

    add("validate", "check that a situation document is well formed")
    add("info", "summarise the structure")
    p = add("forests", "count or list maximal spanning forests")
    what = p.add_mutually_exclusive_group()
    what.add_argument("--list", action="store_true")
    what.add_argument("--count", action="store_true")
    p.add_argument("--dot", action="store_true", help="list forests as Graphviz DOT")
    _cap_option(p)
    _method_options(add("af", "Average Forest measure of every node"))
    _method_options(add("productivity", "expected total worth of a random maximal forest"))
    p = add("dummy", "test whether nodes are dummies of the situation")
    p.add_argument("--node", metavar="L")
    _method_options(p)
    p = add("check-game", "test superadditivity and convexity")
    p.add_argument("--superadditive", action="store_true")
    p.add_argument("--convex", action="store_true")
    p = add("sensitivity", "effect of deleting or adding one arc")
    edit = p.add_mutually_exclusive_group(required=True)
    edit.add_argument("--delete", nargs=2, metavar=("I", "J"))
    edit.add_argument("--add", nargs=2, metavar=("I", "J"))
    _method_options(p)
    return parser


def _cap(args):
    return None if args.cap == 0 else args.cap


def _plan(args) -> EstimationPlan:
    if args.epsilon is not None:
        return EstimationPlan("target_precision", seed=args.seed, epsilon=args.epsilon,
                              alpha=args.alpha, pilot_k=args.pilot)
    return EstimationPlan("fixed_k", k=args.samples, seed=args.seed, alpha=args.alpha)


def _use_mc(sit, args) -> bool:
    if args.method == "auto":
        return count_maximal_forests(sit.structure) > 10 * args.samples
    return args.method == "mc"


def _af(sit, args):
    if _use_mc(sit, args):
        return af_estimate(sit, _plan(args), args.workers)
    cap = None if args.method == "auto" else _cap(args)
    return af_exact(sit, cap, args.workers)


def _emit(args, table: str, obj, csv_text: str | None = None) -> str:
    if args.format == "json":
        return reports.to_json(obj)
    if args.format == "csv":
        if csv_text is None:
            raise UsageError(f"{args.command} has no CSV output; use --format table or json")
        return csv_text
    return table


def cmd_validate(sit, args) -> str:
    g = sit.structure
    obj = {"valid": True, "nodes": g.n, "arcs": len(g.arcs), "game": sit.game.kind, "warnings": sit.warnings}
    csv_text = reports._rows_to_csv(["valid", "nodes", "arcs", "game"], [["true", g.n, len(g.arcs), sit.game.kind]])
    return _emit(args, f"valid: {g.n} nodes, {len(g.arcs)} arcs, {sit.game.kind} game\n", obj, csv_text)


def cmd_info(sit, args) -> str:
    g = sit.structure
    qsc = g.is_quasi_strongly_connected()
    count = count_maximal_forests(g)
    comps = [g.labels_of(c) for c in g.weak_components()]
    obj = {
        "nodes": g.n,
        "arcs": len(g.arcs),
        "sources": g.labels_of(g.sources()),
        "components": comps,
        "quasi_strongly_connected": qsc.result,
        "root": None if qsc.root is None else g.labels[qsc.root],
        "forest_count": reports._count(count)[0],
        "forest_count_saturated": is_saturated(count),
        "game": sit.game.kind,
    }
    rows = [
        ["nodes", g.n],
        ["arcs", len(g.arcs)],
        ["sources", " ".join(obj["sources"])],
        ["components", " | ".join(" ".join(c) for c in comps)],
        ["quasi_strongly_connected", "yes" if qsc.result else "no"],
        ["forest_count", ("> " if obj["forest_count_saturated"] else "") + str(obj["forest_count"])],
        ["game", sit.game.kind],
    ]
    return _emit(args, reports.render_table(["property", "value"], rows), obj,
                 reports._rows_to_csv(["property", "value"], rows))


def cmd_forests(sit, args) -> str:
    g = sit.structure
    if args.count or not (args.list or args.dot):
        count = count_maximal_forests(g)
        obj = {"forest_count": reports._count(count)[0], "forest_count_saturated": is_saturated(count)}
        return _emit(args, f"{count}\n", obj, reports._rows_to_csv(["forest_count"], [[count]]))
    forests = list(enumerate_maximal_forests(g, _cap(args)))
    if args.dot:
        return "\n".join(f.to_dot() for f in forests) + "\n"
    obj = [f.to_json()["parents"] for f in forests]
    lines = [" ".join(f"{p}->{c}" for c, p in sorted(par.items(), key=lambda kv: g.index(kv[0]))) for par in obj]
    csv_rows = [[k, c, p] for k, par in enumerate(obj) for c, p in par.items()]
    return _emit(args, "\n".join(lines) + "\n", obj, reports._rows_to_csv(["forest", "node", "parent"], csv_rows))


def cmd_af(sit, args) -> str:
    rep = _af(sit, args)
    return _emit(args, reports.af_report_to_table(rep), reports.af_report_to_dict(rep), reports.af_report_to_csv(rep))


def cmd_productivity(sit, args) -> str:
    rep = _af(sit, args)
    eff = efficiency_check(sit, rep)
    obj = {
        "productivity": reports.number(eff.productivity),
        "components_worth": reports.number(eff.components_worth),
        "gap": reports.number(eff.gap),
        "quasi_strongly_connected": eff.qsc,
        "method": rep.method,
    }
    if eff.note:
        obj["note"] = eff.note
    rows = [[k, reports.fmt(v) if isinstance(v, float) else v] for k, v in
            [("productivity", eff.productivity), ("components_worth", eff.components_worth),
             ("gap", eff.gap), ("quasi_strongly_connected", "yes" if eff.qsc else "no"),
             ("method", rep.method)]]
    table = reports.render_table(["quantity", "value"], rows) + (f"note: {eff.note}\n" if eff.note else "")
    return _emit(args, table, obj, reports._rows_to_csv(["quantity", "value"], rows))


def cmd_dummy(sit, args) -> str:
    g = sit.structure
    nodes = [g.index(args.node)] if args.node is not None else range(g.n)
    results = []
    mc = _use_mc(sit, args)
    for i in nodes:
        if mc:
            res = probably_dummy(sit, i, _plan(args))
            entry = {"node": g.labels[i], "verdict": res.verdict}
            if res.witness is not None:
                entry["witness"] = res.witness.to_json()["parents"]
                entry["witness_index"] = res.witness_index
        else:
            cap = None if args.method == "auto" else _cap(args)
            entry = {"node": g.labels[i], "verdict": "dummy" if is_situation_dummy(sit, i, cap) else "not_dummy"}
        results.append(entry)
    rows = [[e["node"], e["verdict"]] for e in results]
    return _emit(args, reports.render_table(["node", "verdict"], rows), results,
                 reports._rows_to_csv(["node", "verdict"], rows))


def cmd_check_game(sit, args) -> str:
    g = sit.structure
    props = [p for p, on in (("superadditive", args.superadditive), ("convex", args.convex)) if on]
    props = props or ["superadditive", "convex"]
    out = []
    for prop in props:
        cert = sit.certificate(prop)
        entry = {"property": prop, "verdict": cert.verdict}
        if cert.counterexample is not None:
            entry["counterexample"] = [g.labels_of(m) for m in cert.counterexample]
        if cert.node is not None:
            entry["node"] = g.labels[cert.node]
        out.append(entry)
    rows = []
    for e in out:
        witness = " ; ".join("{" + ",".join(s) + "}" for s in e.get("counterexample", []))
        rows.append([e["property"], e["verdict"], witness])
    return _emit(args, reports.render_table(["property", "verdict", "counterexample"], rows), out,
                 reports._rows_to_csv(["property", "verdict", "counterexample"], rows))


def cmd_sensitivity(sit, args) -> str:
    if args.delete:
        edit = ArcEdit("delete", tuple(args.delete))
    else:
        edit = ArcEdit("add", tuple(args.add))
    if _use_mc(sit, args):
        rep = sensitivity_report(sit, edit, "monte_carlo", plan=_plan(args), workers=args.workers)
    else:
        cap = None if args.method == "auto" else _cap(args)
        rep = sensitivity_report(sit, edit, "exact", cap=cap, workers=args.workers)
    return _emit(args, reports.sensitivity_to_table(rep), reports.sensitivity_to_dict(rep),
                 reports.sensitivity_to_csv(rep))


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "forests": cmd_forests,
    "af": cmd_af,
    "productivity": cmd_productivity,
    "dummy": cmd_dummy,
    "check-game": cmd_check_game,
    "sensitivity": cmd_sensitivity,
}


def _error(kind: str, exc: BaseException):
    print(f"{PROG}: error [{kind}]: {exc}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(f"{PROG}: warning: %(message)s"))
    lib_log = logging.getLogger("afforest")
    lib_log.handlers[:] = [handler]
    lib_log.propagate = False
    if args.workers is not None and args.workers < 0:
        _error("UsageError", "--workers must be >= 0")
        return 2
    try:
        sit = load_situation(args.file)
        text = COMMANDS[args.command](sit, args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _error("FileNotFound" if isinstance(exc, FileNotFoundError) else "FileError",
               f"cannot read {args.file!r}: {exc.strerror}")
        return 2
    except UsageError as exc:
        _error("UsageError", exc)
        return 2
    except AFForestError as exc:
        _error(type(exc).__name__, exc)
        return 1
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            _error("FileError", f"cannot write {args.output!r}: {exc.strerror}")
            return 2
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
