"""Command-line harness: ``gen``, ``run``, ``compare`` and ``certify``.

Exit codes: 0 success, 1 operational error (bad input, mode mismatch,
failed certification), 2 a strategy returned a wrong distance under
``run --check``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .certify import run_suite
from .errors import BidiError, SpecInvalid
from .graph import MultiGraph, read_edge_list, read_provenance, true_distance, write_edge_list
from .instances import (
    ErdosRenyi,
    GridWithWeights,
    InstanceSpec,
    LowerBoundSpec,
    RandomMulti,
    gen_lower_bound_G1,
    gen_random,
    gen_zero_weight_G0,
    tailored_searcher_G1,
)
from .oracle import dump_trace, parse_policy
from .search import STRATEGIES, UNSOUND_STRATEGIES, RunReport

EXIT_OK, EXIT_ERROR, EXIT_WRONG = 0, 1, 2
CLI_STRATEGIES = sorted(STRATEGIES) + ["tailored-g1"]
COMPARE_COLUMNS = [
    "strategy", "distance", "correct", "neighbor_queries", "degree_queries", "explored",
    "fwd_neighbor", "bwd_neighbor", "termination",
]


class _Parser(argparse.ArgumentParser):
    # usage errors are operational errors; exit code 2 is reserved for wrong answers
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _int_range(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in text.split(","))


# -- gen -------------------------------------------------------------------------

def _gen(args) -> int:
    weights = None if args.unweighted else [args.weights[0], args.weights[1]]
    wr = tuple(weights) if weights is not None else None
    k = None
    fam = args.family
    if fam == "g1":
        lb = LowerBoundSpec(args.delta, args.depth, args.i, args.nu)
        G, (s, t), k = gen_lower_bound_G1(lb)
        params = {"delta": args.delta, "depth": args.depth, "i": args.i, "nu": args.nu}
    elif fam == "g0":
        G, (s, t) = gen_zero_weight_G0(args.depth, args.i)
        params = {"depth": args.depth, "i": args.i}
    elif fam == "er":
        G, (s, t) = gen_random(ErdosRenyi(args.n, args.p), wr, args.seed, directed=args.directed)
        params = {"n": args.n, "p": args.p, "directed": args.directed, "weights": weights}
    elif fam == "grid":
        G, (s, t) = gen_random(GridWithWeights(args.rows, args.cols), wr, args.seed)
        params = {"rows": args.rows, "cols": args.cols, "weights": weights}
    else:
        G, (s, t) = gen_random(RandomMulti(args.n, args.m), wr, args.seed, directed=args.directed)
        params = {"n": args.n, "m": args.m, "directed": args.directed, "weights": weights}
    spec = InstanceSpec(fam, params, args.seed if fam in ("er", "grid", "multi") else None)
    prov = {**spec.as_dict(), "s": s, "t": t}
    if k is not None:
        prov["k"] = k
    text = write_edge_list(G, prov)
    summary = f"n={G.n} m={G.m} s={s} t={t}" + (f" k={k}" if k is not None else "")
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


# -- run / compare ---------------------------------------------------------------

def _load(path: str) -> tuple[MultiGraph, dict | None]:
    text = Path(path).read_text()
    return read_edge_list(text), read_provenance(text)


def _execute(name: str, G: MultiGraph, prov: dict | None, s: int, t: int, args, *, trace: bool) -> RunReport:
    policy = parse_policy(args.ordering, args.seed, args.anchor if args.anchor is not None else s)
    if name == "tailored-g1":
        k = args.k if args.k is not None else (prov or {}).get("k")
        if k is None:
            raise SpecInvalid("tailored-g1 needs --k or a g1 provenance header")
        return tailored_searcher_G1(G, s, t, int(k), policy)
    if name not in STRATEGIES:
        raise SpecInvalid(f"unknown strategy {name!r}; choose from {CLI_STRATEGIES}")
    return STRATEGIES[name](G, policy, s, t, trace=trace)


def _run(args) -> int:
    G, prov = _load(args.graph)
    rep = _execute(args.strategy, G, prov, args.s, args.t, args, trace=bool(args.trace))
    out = rep.to_dict()
    if not args.timing:
        out.pop("wall_time", None)
    out["unsound"] = args.strategy in UNSOUND_STRATEGIES
    code = EXIT_OK
    if args.check:
        right = true_distance(G, args.s, args.t)
        out["true_distance"] = None if right == float("inf") else right
        out["correct"] = rep.distance == right
        if not out["correct"]:
            code = EXIT_WRONG
    if args.trace:
        if rep.ledger.trace is None:
            raise SpecInvalid(f"strategy {args.strategy} does not record query traces")
        Path(args.trace).write_text(dump_trace(rep.ledger.trace))
    print(json.dumps(out, sort_keys=True))
    return code


def _compare(args) -> int:
    names = [x for x in args.strategies.split(",") if x]
    if len(names) < 2:
        raise _UsageError("compare needs at least two strategies")
    G, prov = _load(args.graph)
    right = true_distance(G, args.s, args.t)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_COLUMNS + (["wall_time"] if args.timing else []))
    for name in names:
        rep = _execute(name, G, prov, args.s, args.t, args, trace=False)
        row = [
            name,
            "" if not rep.reachable else repr(rep.distance),
            rep.distance == right,
            rep.ledger.neighbor_queries,
            rep.ledger.degree_queries,
            len(rep.ledger.explored),
            rep.per_direction["fwd"].neighbor_queries,
            rep.per_direction["bwd"].neighbor_queries,
            rep.termination.value,
        ]
        if args.timing:
            row.append(f"{rep.wall_time:.6f}")
        writer.writerow(row)
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


# -- certify ---------------------------------------------------------------------

def _certify(args) -> int:
    kwargs: dict = {"seed": args.seed}
    suite = args.suite
    if suite == "delta-gap":
        kwargs.update(depth=args.depth or 3, deltas=_int_range(args.deltas), samples=args.samples)
    elif suite == "zero-weight":
        kwargs.update(depth=args.depth or 10, trials=args.trials or 20)
    elif args.trials is not None:
        kwargs["trials"] = args.trials
    report = run_suite(suite, **kwargs)
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK if report.passed else EXIT_ERROR


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bidisearch", description="Metered bidirectional shortest-path harness.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=["g1", "g0", "er", "grid", "multi"])
    g.add_argument("--delta", type=int, default=3)
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--i", type=int, default=1, help="hidden edge / leaf index (1-based)")
    g.add_argument("--nu", type=float, default=1.0)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--m", type=int, default=20)
    g.add_argument("--rows", type=int, default=3)
    g.add_argument("--cols", type=int, default=3)
    g.add_argument("--directed", action="store_true")
    g.add_argument("--weights", type=float, nargs=2, default=[0.0, 10.0], metavar=("LO", "HI"))
    g.add_argument("--unweighted", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", "-o")
    g.set_defaults(func=_gen)

    def common(q):
        q.add_argument("graph")
        q.add_argument("s", type=int)
        q.add_argument("t", type=int)
        q.add_argument("--ordering", default="stored",
                       help="stored | shuffle | higher-label-last | split-reverse")
        q.add_argument("--seed", type=int, default=0, help="seed for the shuffled ordering")
        q.add_argument("--anchor", type=int, help="anchor vertex for higher-label-last (default s)")
        q.add_argument("--k", type=int, help="degree class for tailored-g1")
        q.add_argument("--timing", action="store_true", help="include wall time (breaks reproducible output)")

    r = sub.add_parser("run", help="run one strategy and print its report as JSON")
    common(r)
    r.add_argument("--strategy", default="bidi-equal-pohl", choices=CLI_STRATEGIES)
    r.add_argument("--trace", metavar="PATH", help="write the query trace as JSON lines")
    r.add_argument("--check", action="store_true", help="compare against the true distance")
    r.set_defaults(func=_run)

    c = sub.add_parser("compare", help="run several strategies and print a CSV table")
    common(c)
    c.add_argument("--strategies", required=True, help="comma-separated strategy names")
    c.set_defaults(func=_compare)

    z = sub.add_parser("certify", help="run a certification suite and print its report as JSON")
    z.add_argument("suite", choices=["perturb-weighted", "perturb-unweighted", "delta-gap", "zero-weight",
                                     "equal-work", "stop-soundness", "trace-replay"])
    z.add_argument("--trials", type=int)
    z.add_argument("--seed", type=int, default=0)
    z.add_argument("--depth", type=int)
    z.add_argument("--deltas", default="2..8")
    z.add_argument("--samples", type=int, default=20)
    z.set_defaults(func=_certify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except (BidiError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
