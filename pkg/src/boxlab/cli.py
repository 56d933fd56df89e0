"""Command-line front end: ``boxlab <command> ...``.

Every command prints a report of ``key: value`` lines (see
:func:`parse_report`).  Exit codes: 0 success, 64 usage error, 65 malformed
input data, 70 internal error.  ``ramsey`` and ``clique`` additionally use
1 for a proved negative answer and 2 when the budget ran out.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import io as bio
from .builder import FortressBuildFailed, build_fortress, check_goal
from .constants import DEFAULT_MAX_BITS, compute_constants
from .construct import AuditSpec, audit_density, build_hypergraph, random_colouring
from .errors import BoxlabError, FormatError, StructuralError
from .hypercore import CliqueVerdict, find_clique
from .palette import STANDARD_NAMES, Palette, min_codegree, standard_palette
from .ramsey import SearchBudget, Verdict, lower_bound_report, search_palette_colouring, validate_colouring
from .reduced import (
    check_box_dense,
    find_reduced_clique,
    fortress_to_clique,
    is_reduced_clique,
    verify_fortress,
)
from .systems import KMTree, extract_subsystem, q_set

__all__ = ["main", "parse_report", "EQ_RESULTS"]

EX_OK, EX_USAGE, EX_DATAERR, EX_SOFTWARE = 0, 64, 65, 70

# (k, palette) rows of the small-clique lower-bound table
EQ_RESULTS = ((5, "cyclic3", False), (6, "two_colour_nonmono", False), (11, "exactly_two_of_three", True))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class Report:
    """Ordered ``key: value`` lines."""

    def __init__(self, deterministic: bool = False):
        self.lines: list[tuple[str, str]] = []
        self.deterministic = deterministic

    def add(self, key: str, value) -> None:
        self.lines.append((key, _show(value)))

    def timing(self, key: str, seconds: float) -> None:
        if not self.deterministic:
            self.add(key, f"{seconds:.3f}s")

    def render(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.lines)


def _show(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int) and value.bit_length() > 256:
        return f"~2^{value.bit_length() - 1} ({value.bit_length()} bits)"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _ratio(x) -> str:
    return "-" if x is None else f"{float(x):.4f}"


def parse_report(text: str) -> dict:
    """Parse a report back into a dict; repeated keys collect into lists."""
    out: dict = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(": ")
        if not sep:
            raise ValueError(f"not a report line: {line!r}")
        if key in out:
            if not isinstance(out[key], list):
                out[key] = [out[key]]
            out[key].append(value)
        else:
            out[key] = value
    return out


# argument helpers


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _read(path: str) -> str:
    try:
        return bio.read_text(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except IsADirectoryError:
        raise UsageError(f"is a directory: {path}") from None


def _palette(spec: str) -> tuple[Palette, str]:
    """A standard palette name or a palette file."""
    key = spec.strip().lower().replace("-", "_")
    if key in STANDARD_NAMES or key.startswith("nonmono("):
        return standard_palette(spec), spec
    if not Path(spec).exists():
        raise UsageError(f"{spec!r} is neither a palette name ({', '.join(STANDARD_NAMES)}) nor a file")
    return bio.parse_palette(_read(spec), source=spec), spec


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _default_seed() -> int:
    env = os.environ.get("BOXLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"BOXLAB_SEED must be an integer, got {env!r}") from None


# commands


def cmd_palette(args, rep: Report) -> int:
    P, name = _palette(args.palette)
    rep.add("palette", name)
    rep.add("colours", P.colours)
    if args.action == "min-codegree":
        rep.lines.clear()
        print(min_codegree(P))
        return EX_OK
    rep.add("patterns", " ".join("".join(map(str, p)) for p in P) or "-")
    rep.add("min_codegree", min_codegree(P))
    rep.add("automorphisms", len(P.automorphisms()))
    return EX_OK


def cmd_construct(args, rep: Report) -> int:
    P, name = _palette(args.palette)
    seed = args.seed
    t0 = time.perf_counter()
    phi = random_colouring(args.n, P.colours, seed)
    H = build_hypergraph(phi, P)
    rep.add("command", "construct")
    rep.add("palette", name)
    rep.add("n", args.n)
    rep.add("seed", seed)
    rep.add("edges", H.num_edges)
    rep.add("min_codegree", min_codegree(P))
    rep.timing("time", time.perf_counter() - t0)
    _write(args.out, bio.format_hypergraph(H))
    _write(args.colouring_out, bio.format_colouring(phi))
    return EX_OK


def cmd_audit(args, rep: Report) -> int:
    H = bio.parse_hypergraph(_read(args.hypergraph), source=args.hypergraph)
    phi = bio.parse_colouring(_read(args.colouring), source=args.colouring)
    P, name = _palette(args.palette)
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    spec = AuditSpec(
        families=families,
        eta=float(args.eta),
        random_trials=args.random_trials,
        product_trials=args.product_trials,
        seed=args.seed,
    )
    t0 = time.perf_counter()
    report = audit_density(H, phi, P, spec)
    rep.add("command", "audit")
    rep.add("palette", name)
    rep.add("n", H.n)
    rep.add("seed", args.seed)
    rep.add("eta", args.eta)
    rep.add("d", report.d)
    for row in report.rows:
        rep.add("row", f"{row.family} {row.label} e={row.report.e} total={row.report.total} "
                       f"ratio={_ratio(row.ratio)} margin={float(row.margin):.1f} holds={'yes' if row.holds else 'no'}")
    for note in report.notes:
        rep.add("note", note)
    for fam in families:
        fm = report.family_min(fam)
        rep.add(f"min_ratio[{fam}]", "-" if fm is None else f"{float(fm):.4f}")
    rep.add("min_ratio", "-" if report.min_ratio is None else f"{float(report.min_ratio):.4f}")
    if report.worst is not None:
        rep.add("worst", f"{report.worst.family} {report.worst.label}")
    rep.add("all_hold", report.all_hold)
    rep.timing("time", time.perf_counter() - t0)
    return EX_OK


def _budget(args) -> SearchBudget:
    return SearchBudget(args.node_limit, args.time_limit, not args.no_symmetry)


def cmd_ramsey(args, rep: Report) -> int:
    P, name = _palette(args.palette)
    out = search_palette_colouring(P, args.k, _budget(args))
    rep.add("command", "ramsey")
    rep.add("palette", name)
    rep.add("k", args.k)
    rep.add("verdict", out.verdict.value)
    rep.add("nodes", out.nodes_explored)
    rep.timing("time", out.elapsed)
    if out.witness is not None:
        rep.add("witness_valid", not validate_colouring(out.witness, P))
        _write(args.witness_out, bio.format_colouring(out.witness))
    if out.verdict is Verdict.INFEASIBLE:
        rep.add("lower_bound", f"pi(K{args.k}) >= {min_codegree(P)}")
    return {Verdict.FEASIBLE: 0, Verdict.INFEASIBLE: 1, Verdict.UNKNOWN: 2}[out.verdict]


def cmd_clique(args, rep: Report) -> int:
    H = bio.parse_hypergraph(_read(args.hypergraph), source=args.hypergraph)
    res = find_clique(H, args.k, args.node_limit)
    rep.add("command", "clique")
    rep.add("n", H.n)
    rep.add("k", args.k)
    rep.add("verdict", res.verdict.value)
    rep.add("nodes", res.nodes)
    rep.timing("time", res.elapsed)
    if res.witness is not None:
        rep.add("witness", " ".join(map(str, res.witness)))
    return {CliqueVerdict.FOUND: 0, CliqueVerdict.NONE: 1, CliqueVerdict.UNKNOWN: 2}[res.verdict]


def _leaf_arg(tree: KMTree, labels: list[str]) -> tuple:
    if labels in ([], ["-"]):
        return ()
    by_text = {}
    for node in tree.nodes():
        by_text[tuple(str(x) for x in node)] = node
    node = by_text.get(tuple(labels))
    if node is None:
        raise UsageError(f"{' '.join(labels)} is not a node of the tree")
    return node


def cmd_systems(args, rep: Report) -> int:
    T = bio.parse_tree(_read(args.tree), source=args.tree)
    rep.add("command", f"systems {args.action}")
    rep.add("height", T.height)
    rep.add("arity", T.arity)
    if args.action == "q-set":
        c = _leaf_arg(T, args.node)
        Q = q_set(T, c)
        rep.add("node", " ".join(map(str, c)) or "-")
        rep.add("size", len(Q))
        for d in Q:
            rep.add("q", " ".join(map(str, d)) or "-")
        return EX_OK
    X = bio.parse_leaves(_read(args.subset), source=args.subset, tree=T)
    m, sub = extract_subsystem(T, X, args.eps, best_effort=args.best_effort)
    rep.add("subset", len(set(X)))
    rep.add("eps", args.eps)
    rep.add("m", m)
    rep.add("leaves", len(sub.leaves))
    _write(args.out, bio.format_tree(sub))
    return EX_OK


def cmd_reduced(args, rep: Report) -> int:
    if args.action == "constants":
        return cmd_constants(args, rep)
    A = bio.parse_reduced(_read(args.reduced), source=args.reduced)
    rep.add("command", f"reduced {args.action}")
    rep.add("indices", len(A.indices))
    if args.action == "check-dense":
        res = check_box_dense(A, args.d, args.delta)
        rep.add("d", res.d)
        rep.add("delta", res.delta)
        rep.add("checked", res.checked)
        for i, j, k, bad in res.violations:
            rep.add("violation", f"{i} {j} {k} bad_pairs={bad}")
        if res.note:
            rep.add("note", res.note)
        rep.add("passed", res.passed)
        return EX_OK if res.passed else 1
    if args.action == "clique":
        res = find_reduced_clique(A, args.t, args.node_limit)
        rep.add("t", args.t)
        rep.add("verdict", res.verdict.value)
        rep.add("nodes", res.nodes)
        rep.timing("time", res.elapsed)
        if res.witness is not None:
            w = res.witness
            rep.add("witness", " ".join(map(str, w.indices)))
            for i, j in ((i, j) for n, i in enumerate(w.indices) for j in w.indices[n + 1:]):
                rep.add("vertex", f"{i} {j} {w.vertex(i, j)}")
        return {CliqueVerdict.FOUND: 0, CliqueVerdict.NONE: 1, CliqueVerdict.UNKNOWN: 2}[res.verdict]
    if args.action == "verify-fortress":
        F = bio.parse_fortress(_read(args.fortress), source=args.fortress)
        unknown = [t for t in F.index.values() if t not in set(A.indices)]
        if unknown:
            raise FormatError(f"fortress leaf {unknown[0]!r} is not an index of the reduced hypergraph", source=args.fortress)
        bad = verify_fortress(A, F)
        rep.add("height", F.tree.height)
        rep.add("arity", F.tree.arity)
        for a, b, c, d in bad:
            rep.add("violation", " ".join(bio.leaf_token(x) or "-" for x in (a, b, c, d)))
        rep.add("passed", not bad)
        if not bad and F.tree.arity == 2:
            rep.add("clique_order", len(F.tree.leaves))
            rep.add("clique_valid", is_reduced_clique(A, fortress_to_clique(F)))
        return EX_OK if not bad else 1
    # build-fortress
    T = bio.parse_tree(_read(args.tree), source=args.tree)
    index = {leaf: bio.leaf_token(leaf) for leaf in T.leaves}
    missing = [t for t in index.values() if t not in set(A.indices)]
    if missing:
        raise FormatError(f"tree leaf {missing[0]!r} is not an index of the reduced hypergraph", source=args.tree)
    sets, sels = ([], [])
    if args.selections:
        sets, sels = bio.parse_selections(_read(args.selections), source=args.selections)
    k = T.height
    rep.add("r", args.r)
    rep.add("k", k)
    rep.add("m", args.m)
    rep.add("eps", args.eps)
    rep.add("seed", args.seed)
    t0 = time.perf_counter()
    try:
        res = build_fortress(A, T, sets, sels, r=args.r, k=k, m=args.m, eps=args.eps,
                             seed=args.seed, retries=args.retries, index=index)
    except FortressBuildFailed as exc:
        rep.add("outcome", "failure")
        rep.add("stage", exc.stage)
        rep.add("detail", exc.detail)
        rep.timing("time", time.perf_counter() - t0)
        return 1
    bad = verify_fortress(A, res.fortress)
    rep.add("outcome", "success")
    rep.add("leaves", len(res.tree.leaves))
    rep.add("fortress_vertices", len(res.fortress.vertices))
    rep.add("verified", not bad)
    rep.add("goal_violations", len(check_goal(A, res.fortress, res.Y, sels)))
    for j, Yj in enumerate(res.Y, start=1):
        rep.add(f"Y{j}", len(Yj))
    for line in res.log:
        rep.add("step", line)
    rep.timing("time", time.perf_counter() - t0)
    _write(args.out, bio.format_fortress(res.fortress))
    return EX_OK


def cmd_constants(args, rep: Report) -> int:
    t = compute_constants(args.r, args.eps, args.k, args.m, args.max_bits)
    rep.add("command", "constants")
    rep.add("r", t.r)
    rep.add("eps", t.eps)
    rep.add("k", t.k)
    rep.add("m", t.m)
    rep.add("astronomical", t.astronomical)
    if t.note:
        rep.add("note", t.note)
    for h, Mh in enumerate(t.M_seq):
        rep.add(f"M_{h}", "-" if Mh is None else Mh)
    for h, N in enumerate(t.eta_exponents):
        rep.add(f"eta_{h}", f"(eps/2)^{_show(N)}")
    if not t.astronomical:
        rep.add("M", t.M)
        rep.add("eta", f"(eps/2)^{_show(t.eta_exponent)}")
        rep.add("log2_eta", "-" if t.log2_eta is None else t.log2_eta)
        rep.add("log2_delta", "-" if t.log2_delta is None else t.log2_delta)
    return EX_OK


def cmd_reproduce(args, rep: Report) -> int:
    rep.add("command", "reproduce eq-results")
    budget = SearchBudget(args.node_limit, args.time_limit, True)
    status = EX_OK
    for k, name, slow in EQ_RESULTS:
        P = standard_palette(name)
        if slow and args.skip_slow:
            rep.add("bound", f"K{k} palette={name} d={min_codegree(P)} skipped (slow)")
            continue
        lb = lower_bound_report(P, k, budget)
        if lb.bound is not None:
            line = f"K{k} >= {lb.bound} palette={name} verdict={lb.outcome.verdict.value} nodes={lb.outcome.nodes_explored}"
        else:
            line = f"K{k} inconclusive palette={name} verdict={lb.outcome.verdict.value}"
            status = 2
        rep.add("bound", line)
        rep.timing(f"time[K{k}]", lb.outcome.elapsed)
    return status


# parser


def _common(p: argparse.ArgumentParser, seed: bool = False) -> None:
    p.add_argument("--deterministic", action="store_true", help="omit timings so reports are byte-identical")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="accepted for compatibility; searches run sequentially")
    if seed:
        p.add_argument("--seed", type=int, default=None, help="random seed (default: $BOXLAB_SEED or 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boxlab", description="Box-density laboratory for 3-uniform hypergraphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("palette", help="palette densities")
    p.add_argument("action", choices=("min-codegree", "show"))
    p.add_argument("palette", help="standard name or palette file")
    _common(p)
    p.set_defaults(func=cmd_palette)

    p = sub.add_parser("construct", help="random colouring and induced hypergraph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--palette", required=True)
    p.add_argument("--out")
    p.add_argument("--colouring-out", "--coloring-out", dest="colouring_out")
    _common(p, seed=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("audit", help="empirical box-density audit")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--colouring", "--coloring", dest="colouring", required=True)
    p.add_argument("--palette", required=True)
    p.add_argument("--eta", type=float, default=0.02)
    p.add_argument("--families", default="colour,random,product")
    p.add_argument("--random-trials", type=int, default=2)
    p.add_argument("--product-trials", type=int, default=4)
    _common(p, seed=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("ramsey", help="exact palette colouring search")
    p.add_argument("--palette", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--node-limit", type=int, default=10**9)
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--witness-out")
    _common(p)
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("clique", help="clique search in a hypergraph")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--node-limit", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_clique)

    p = sub.add_parser("systems", help="trees and subsystems")
    p.add_argument("action", choices=("q-set", "extract"))
    p.add_argument("--tree", required=True)
    p.add_argument("--node", nargs="*", default=[], help="labels of the node c for q-set")
    p.add_argument("--subset", help="leaf file for extract")
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--best-effort", action="store_true")
    p.add_argument("--out")
    _common(p)
    p.set_defaults(func=cmd_systems)

    p = sub.add_parser("reduced", help="reduced hypergraphs and fortresses")
    p.add_argument("action", choices=("check-dense", "clique", "verify-fortress", "build-fortress", "constants"))
    p.add_argument("--reduced")
    p.add_argument("--d", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--delta", type=_fraction, default=Fraction(0))
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--fortress")
    p.add_argument("--tree")
    p.add_argument("--selections")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--retries", type=int, default=64)
    p.add_argument("--max-bits", type=int, default=DEFAULT_MAX_BITS)
    p.add_argument("--out")
    _common(p, seed=True)
    p.set_defaults(func=cmd_reduced)

    p = sub.add_parser("constants", help="constants of the fortress induction")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--eps", type=_fraction, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-bits", type=int, default=DEFAULT_MAX_BITS)
    _common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("reproduce", help="reproduce result tables")
    p.add_argument("table", choices=("eq-results",))
    p.add_argument("--skip-slow", action="store_true", help="leave out the K11 search")
    p.add_argument("--node-limit", type=int, default=10**9)
    p.add_argument("--time-limit", type=float, default=600.0)
    _common(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


_REQUIRED = {
    ("systems", "extract"): ("subset",),
    ("reduced", "check-dense"): ("reduced",),
    ("reduced", "clique"): ("reduced",),
    ("reduced", "verify-fortress"): ("reduced", "fortress"),
    ("reduced", "build-fortress"): ("reduced", "tree"),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for opt in _REQUIRED.get((args.command, getattr(args, "action", None)), ()):
            if getattr(args, opt) is None:
                raise UsageError(f"boxlab {args.command} {args.action}: --{opt} is required")
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        rep = Report(args.deterministic)
        code = args.func(args, rep)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("boxlab") else f"boxlab: {msg}", file=sys.stderr)
        return EX_USAGE
    except (FormatError, StructuralError) as exc:
        print(f"boxlab: bad input: {exc}", file=sys.stderr)
        return EX_DATAERR
    except (BoxlabError, ValueError) as exc:
        print(f"boxlab: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"boxlab: {exc}", file=sys.stderr)
        return EX_USAGE
    except Exception as exc:  # pragma: no cover - last resort
        print(f"boxlab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_SOFTWARE
    sys.stdout.write(rep.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
