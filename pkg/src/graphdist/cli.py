"""Command-line front end: ``graphdist route|verify|bench``.

Exit codes: 0 success, 1 usage error, 2 infeasible request, 3 verification
failure, 4 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from graphdist import protocols as P
from graphdist import stabilizer as st
from graphdist import steiner as stn
from graphdist import topologies as topo
from graphdist.network import (
    MalformedNetwork,
    NetworkError,
    Schedule,
    ScheduleError,
    VerificationError,
    load_network,
    verify_schedule,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_json(path: str | None, what: str):
    if path is None:
        raise UsageError(f"--{what} is required")
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {path!r} is not valid JSON: {exc}") from exc


def _load(args):
    try:
        net = load_network(_read_json(args.network, "network"), persistent_pairs=args.persistent_pairs)
    except MalformedNetwork as exc:
        raise UsageError(str(exc)) from exc
    return net


def _request(args):
    try:
        return P.request_from_dict(_read_json(args.request, "request"), strategy=args.strategy)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad request: {exc}") from exc


def _compile(args, net, req):
    return P.compile_request(
        net,
        req,
        steiner=args.steiner,
        pack=args.pack_steps,
        outcome=None if args.sample else 1,
        seed=args.seed,
    )


def cost_table(report: P.CostReport) -> str:
    """Text table with the EPR / T columns next to their bounds."""
    rows = [("", "EPR", "T"), ("cost", report.bell_pairs, report.time_steps)]
    rows.append(("bound", report.bound_bell, report.bound_steps))
    widths = [max(len(str(r[i])) for r in rows) for i in range(3)]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in rows]
    for info in report.rounds:
        lines.append(
            f"round {info['round']}: step {info['step']}, leader {info['leader']}, "
            f"{len(info['terminals'])} terminals, {info['bell_pairs']} pairs"
        )
    return "\n".join(lines)


def step_dots(net, sched: Schedule) -> list[str]:
    """One DOT graph per step: the network with that step's channels highlighted."""
    out = []
    for i, step in enumerate(sched.steps, 1):
        used = [a.channel for a in step if a.op == "bell"]
        out.append(net.graph.to_dot(name=f"step{i}", highlight=used))
    return out


def cmd_route(args) -> int:
    net = _load(args)
    req = _request(args)
    sched, report = _compile(args, net, req)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "schedule.json").write_text(sched.to_json(indent=1) + "\n")
    (out / "cost.json").write_text(report.to_json(indent=1) + "\n")
    if args.dot:
        for i, dot in enumerate(step_dots(net, sched), 1):
            (out / f"step{i:03d}.dot").write_text(dot)
    print(cost_table(report))
    if args.verify:
        verify_schedule(net, sched, seed=args.seed)
        print("verify: PASS")
    return EXIT_OK


def cmd_verify(args) -> int:
    net = _load(args)
    if args.schedule:
        try:
            sched = Schedule.from_dict(_read_json(args.schedule, "schedule"))
        except ScheduleError as exc:
            print(f"verify: FAIL ({exc})")
            return EXIT_VERIFY
    else:
        sched, _ = _compile(args, net, _request(args))
    try:
        res = verify_schedule(net, sched, seed=args.seed)
    except st.OracleBudgetExceeded as exc:
        print(f"verify: REFUSED ({exc})", file=sys.stderr)
        return EXIT_BUDGET
    except (VerificationError, ScheduleError, st.OracleError) as exc:
        print(f"verify: FAIL ({exc})")
        return EXIT_VERIFY
    print(f"verify: PASS ({len(sched.expected)} output qubits, peak {res.peak_qubits} live)")
    return EXIT_OK


BENCH_COLUMNS = [
    "family",
    "n",
    "request",
    "strategy",
    "terminals",
    "bell_pairs",
    "time_steps",
    "bound_bell",
    "bound_steps",
    "within_bounds",
    "steiner_approx",
    "steiner_exact",
    "pathological_pairs",
    "factor2_bound",
    "factor2_ok",
]


def _parse_sizes(text: str) -> list[int]:
    sizes = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            sizes.extend(range(int(lo), int(hi) + 1))
        elif part:
            sizes.append(int(part))
    return sizes


def bench_rows(families, sizes, seed: int = 0, steiner: str = "approx", pack: bool = False):
    """Cost rows for GHZ-on-all-nodes and complete-graph requests per family and size."""
    rows = []
    for fam in families:
        for n in sizes:
            if n < 2:
                continue
            if fam == "pathological":
                rows.extend(_pathological_rows(n, steiner, pack))
                continue
            g = topo.family(fam, n, seed=seed)
            net = topo.network_from_graph(g)
            terms = sorted(g.vertices)
            inst = stn.SteinerInstance(g, terms)
            approx = stn.steiner_approx(inst).cost
            try:
                exact = stn.steiner_exact(inst).cost
            except stn.BudgetExceeded:
                exact = ""
            _, rep = P.distribute_ghz(net, P.GhzRequest(tuple(terms)), steiner=steiner)
            rows.append(_row(fam, n, "ghz", "", terms, rep, approx, exact))
            target = topo.complete(n)
            _, rep = P.distribute_graph(net, P.GraphRequest(target, "decorated"), steiner=steiner, pack=pack)
            rows.append(_row(fam, n, "complete", "decorated", terms, rep, approx, exact))
    return rows


def _row(fam, n, request, strategy, terms, rep, approx="", exact="", patho="", bound2=""):
    return {
        "family": fam,
        "n": n,
        "request": request,
        "strategy": strategy,
        "terminals": len(terms),
        "bell_pairs": rep.bell_pairs,
        "time_steps": rep.time_steps,
        "bound_bell": rep.bound_bell,
        "bound_steps": rep.bound_steps,
        "within_bounds": int(rep.within_bounds),
        "steiner_approx": approx,
        "steiner_exact": exact,
        "pathological_pairs": patho,
        "factor2_bound": bound2,
        "factor2_ok": "" if bound2 == "" else int(rep.bell_pairs <= bound2),
    }


def _pathological_rows(n: int, steiner: str, pack: bool) -> list[dict]:
    net = topo.network_from_graph(topo.line(n))
    target = topo.pathological_target(n)
    half = n // 2
    rows = []
    for strategy in P.STRATEGIES:
        _, rep = P.distribute_graph(net, P.GraphRequest(target, strategy), steiner=steiner, pack=pack)
        rows.append(
            _row(
                "pathological",
                n,
                "matching",
                strategy,
                sorted(target.vertices),
                rep,
                patho=topo.pathological_pairs(n),
                bound2=2 * half * half,
            )
        )
    return rows


def cmd_bench(args) -> int:
    families = list(topo.FAMILIES[:5]) + ["pathological"]
    sizes = list(range(4, 13))
    seed = args.seed
    if args.config:
        cfg = _read_json(args.config, "config")
        families = cfg.get("families", families)
        sizes = cfg.get("sizes", sizes)
        seed = cfg.get("seed", seed)
    if args.families:
        families = args.families.split(",")
    if args.sizes:
        sizes = _parse_sizes(args.sizes)
    for fam in families:
        if fam != "pathological" and fam not in topo.FAMILIES:
            raise UsageError(f"unknown family {fam!r}")
    rows = bench_rows(families, sizes, seed=seed, steiner=args.steiner, pack=args.pack_steps)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, request=True):
        p.add_argument("--network", help="network JSON file")
        if request:
            p.add_argument("--request", help="request JSON file")
        p.add_argument("--strategy", choices=P.STRATEGIES, help="override the request's strategy")
        p.add_argument("--steiner", choices=("approx", "exact"), default="approx")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--persistent-pairs", action="store_true", help="unused pairs survive their step")
        p.add_argument("--pack-steps", action="store_true", help="merge rounds with disjoint channels")
        p.add_argument("--sample", action="store_true", help="sample outcomes instead of forcing +1")

    route = sub.add_parser("route", help="compile a request into a schedule")
    common(route)
    route.add_argument("--out-dir", default=".")
    route.add_argument("--dot", action="store_true", help="write one DOT file per step")
    route.add_argument("--verify", action="store_true", help="also check the result with the oracle")
    route.set_defaults(func=cmd_route)

    verify = sub.add_parser("verify", help="check a schedule's final state with the oracle")
    common(verify)
    verify.add_argument("--schedule", help="schedule JSON (otherwise compiled from --request)")
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="cost table over topology families")
    bench.add_argument("--config", help="JSON with families, sizes, seed")
    bench.add_argument("--families", help="comma list, e.g. line,ring,grid,random,tree,pathological")
    bench.add_argument("--sizes", help="e.g. 4-12 or 4,8,16")
    bench.add_argument("--steiner", choices=("approx", "exact"), default="approx")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--pack-steps", action="store_true")
    bench.add_argument("--out", help="CSV path (default stdout)")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
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
    except (P.InfeasibleRequest, stn.NoTree) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except st.OracleBudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (VerificationError, st.OracleError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (NetworkError, stn.SteinerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
