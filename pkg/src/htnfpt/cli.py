"""Command-line front end.

Exit codes: 0 for a yes verdict or a successful command, 1 for a no
verdict, 2 for any error including exhausted budgets.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from htnfpt import fileformat
from htnfpt.errors import BudgetExceeded, HtnError
from htnfpt.generators import ColoredGraph, Profile, ShuffleInput, gen_clique, gen_random, gen_shuffle_state, gen_shuffle_verification
from htnfpt.hierarchy import measure_hierarchy, solve_compound
from htnfpt.ordergraph import gpow, vertex_cover_mask
from htnfpt.solvers.common import SolverConfig
from htnfpt.stategraph import augmented_graph, build_state_graph, strong_classes, to_dot
from htnfpt.verdict import Verdict

ENV_PREFIX = "HTNFPT_"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise HtnError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="search-node budget per solver")
    p.add_argument("--gpow-threshold", type=int, default=argparse.SUPPRESS)
    p.add_argument("--vcn-threshold", type=int, default=argparse.SUPPRESS)
    p.add_argument("--state-cap", type=int, default=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="log internal programs to stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="htnfpt", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="decide the query of an instance file")
    p.add_argument("path")
    p = sub.add_parser("oracle", parents=[common], help="decide by exhaustive search")
    p.add_argument("path")
    p = sub.add_parser("measures", parents=[common], help="structural measures of an instance file")
    p.add_argument("path")
    p = sub.add_parser("export-stg", parents=[common], help="state transition graph as DOT")
    p.add_argument("path")
    p.add_argument("--augmented", metavar="ORDER", help="comma-separated ordered cover tasks; emit the class-labelled graph")

    p = sub.add_parser("scaling", parents=[common], help="time the chain-prefix programs, write CSV and PNG")
    p.add_argument("--out", default="scaling-report")
    p.add_argument("--sizes", default="20,40,80,160")
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--repeats", type=int, default=3)

    gen = sub.add_parser("generate", parents=[common], help="emit a generated instance file")
    gsub = gen.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("shuffle", parents=[common])
    g.add_argument("--u", required=True)
    g.add_argument("--parts", required=True, help="comma-separated words")
    g = gsub.add_parser("shuffle-state", parents=[common])
    g.add_argument("--u", required=True)
    g.add_argument("--parts", required=True)
    g.add_argument("--variant", choices=("reach", "exists"), default="reach")
    g = gsub.add_parser("clique", parents=[common])
    g.add_argument("--colors", required=True, help="v1=1,v2=2,...")
    g.add_argument("--edges", default="", help="v1-v2,v2-v3,...")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--variant", choices=("cnum", "cs", "cd"), default="cnum")
    g.add_argument("--query", choices=("exists", "executable", "reach"), default="exists")
    g = gsub.add_parser("random", parents=[common])
    g.add_argument("--tasks", type=int, default=6)
    g.add_argument("--props", type=int, default=3)
    g.add_argument("--actions", type=int, default=4)
    g.add_argument("--shape", choices=("antichain", "chains", "star_forest", "random_dag"), default="random_dag")
    g.add_argument("--width", type=int, default=2)
    g.add_argument("--centers", type=int, default=2)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--query", choices=("verify", "exists", "executable", "reach"), default="exists")
    g.add_argument("--compounds", type=int, default=0)
    return parser


def _config(args) -> SolverConfig:
    return SolverConfig(
        budget=getattr(args, "budget", None) or _env_int("BUDGET", 10**7),
        gpow_threshold=getattr(args, "gpow_threshold", None) or _env_int("GPOW_THRESHOLD", 4),
        vcn_threshold=getattr(args, "vcn_threshold", None) or _env_int("VCN_THRESHOLD", 8),
        state_cap=getattr(args, "state_cap", None) or _env_int("STATE_CAP", 4096),
    )


def _use_json(args) -> bool:
    return bool(getattr(args, "json", False)) or os.environ.get(ENV_PREFIX + "JSON", "") not in ("", "0")


def _seed(args) -> int:
    s = getattr(args, "seed", None)
    return _env_int("SEED", 0) if s is None else s


def _emit(args, payload: dict, text: list[str]) -> None:
    if _use_json(args):
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        print("\n".join(text))


def _report_verdict(args, v: Verdict) -> int:
    stats = {k: val for k, val in v.stats.items() if k != "network"}
    payload = {
        "answer": "yes" if v.answer else "no",
        "witness": list(v.witness) if v.witness is not None else None,
        "route": v.route,
        "reason": v.reason,
        "stats": stats,
        "decomposition": [list(c) for c in v.decomposition] if v.decomposition else None,
    }
    text = [f"answer: {payload['answer']}", f"route: {v.route}"]
    if v.witness is not None:
        text.append("witness: " + " ".join(v.witness))
    if v.decomposition:
        text.append("decomposition: " + " ".join(f"{t}#{k}" for t, k in v.decomposition))
    if v.reason:
        text.append(f"reason: {v.reason}")
    text += [f"{k}: {val}" for k, val in sorted(stats.items())]
    _emit(args, payload, text)
    return 0 if v.answer else 1


def cmd_solve(args) -> int:
    inst = fileformat.load(args.path)
    return _report_verdict(args, solve_compound(inst, _config(args)))


def cmd_oracle(args) -> int:
    from htnfpt.oracle import oracle_compound

    inst = fileformat.load(args.path)
    return _report_verdict(args, oracle_compound(inst, enum_cap=_config(args).enum_cap))


def cmd_measures(args) -> int:
    inst = fileformat.load(args.path)
    cfg = _config(args)
    tn, d = inst.network, inst.domain
    h = measure_hierarchy(tn, d)
    try:
        k = build_state_graph(d, inst.s0, cfg.state_cap).k
    except HtnError:
        k = None
    row = {
        "tasks": len(tn.tasks),
        "primitive": tn.is_primitive(d),
        "gpow": gpow(tn),
        "vcn": bin(vertex_cover_mask(tn, cfg.budget)).count("1"),
        "k": k if k is not None else f">{cfg.state_cap}",
        "c_num": h.c_num,
        "c_size": h.c_size,
        "c_depth": "inf" if not h.finite else h.c_depth,
        "c_choices": h.c_choices,
    }
    _emit(args, row, [f"{key}: {val}" for key, val in row.items()])
    return 0


def cmd_export(args) -> int:
    inst = fileformat.load(args.path)
    cfg = _config(args)
    g = build_state_graph(inst.domain, inst.s0, cfg.state_cap)
    if args.augmented is None:
        sys.stdout.write(to_dot(g, inst.domain))
        return 0
    order = [t for t in args.augmented.split(",") if t]
    for t in order:
        if t not in inst.network.index:
            raise HtnError(f"unknown task {t!r} in --augmented")
    classes = strong_classes(inst.network, g, order)
    sys.stdout.write(to_dot(augmented_graph(g, classes), inst.domain, "augmented"))
    for cid, c in enumerate(classes):
        sys.stdout.write(f"// e{cid} interval {list(c.interval)} members {' '.join(c.members)}\n")
    return 0


def cmd_scaling(args) -> int:
    from htnfpt.report import loglog_slope, scaling_report

    sizes = tuple(int(x) for x in args.sizes.split(","))
    rows, csv_path, png_path = scaling_report(
        args.out, sizes=sizes, width=args.width, seed=_seed(args), repeats=args.repeats, cfg=_config(args)
    )
    with open(csv_path, encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    for solver in sorted({r.solver for r in rows}):
        print(f"# {solver} log-log slope {loglog_slope(rows, solver):.3f}")
    print(f"# wrote {csv_path} and {png_path}")
    return 0


def cmd_generate(args) -> int:
    if args.kind == "shuffle":
        inst = gen_shuffle_verification(ShuffleInput(args.u, _split(args.parts)))
    elif args.kind == "shuffle-state":
        inst = gen_shuffle_state(ShuffleInput(args.u, _split(args.parts)), args.variant)
    elif args.kind == "clique":
        colors = {}
        for item in _split(args.colors):
            v, _, c = item.partition("=")
            colors[v] = int(c)
        edges = [tuple(e.split("-", 1)) for e in _split(args.edges)]
        inst = gen_clique(ColoredGraph(colors, edges, args.k), args.variant, args.query)
    else:
        prof = Profile(
            num_tasks=args.tasks, num_props=args.props, num_actions=args.actions, shape=args.shape,
            width=args.width, centers=args.centers, density=args.density, query=args.query,
            num_compounds=args.compounds,
        )
        inst = gen_random(_seed(args), prof)
    sys.stdout.write(fileformat.dumps(inst))
    return 0


def _split(text: str) -> list[str]:
    return [x for x in text.split(",") if x]


COMMANDS = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "measures": cmd_measures,
    "export-stg": cmd_export,
    "scaling": cmd_scaling,
    "generate": cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.DEBUG, format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (HtnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
