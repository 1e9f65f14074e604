"""Command line front end.

Every command reads a JSON space (``{"kind":"metric",...}``) or graph
(``{"kind":"graph",...}``), prints one JSON report on stdout with sorted
keys and exits with

  0  success
  2  invalid input or violated precondition (error JSON on stderr)
  3  a search or cycle cap was hit (partial report with "incomplete": true)

Schemas
  metric    {"kind":"metric","points":["a","b"],"d":[["0","1"],["1","0"]]}
            entries are integers, decimals or "p/q" strings
  graph     {"kind":"graph","vertices":["a","b"],"edges":[["a","b"]]}
  molecule  {"coeffs":{"a":"1","b":"-1"}}
  sigma     {"sigma":[[["a","b"],["c","d"]],...]}  one orientation per edge is enough

Caps can also be set through FREEISO_CAPS, e.g.
FREEISO_CAPS="max_cycles=100000,cap_search=2000000".  Explicit flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import warnings

from . import constructions as cons
from .errors import CapExceeded, FreeIsoError, InputFormatError
from .extgraph import classify_edge_set, classify_prague, ext_graph
from .graphkit import (
    DEFAULT_MAX_CYCLES,
    articulation_points,
    biconnected_blocks,
    connectivity_report,
    simple_cycles,
)
from .io import (
    dumps,
    graph_from_json,
    graph_to_json,
    jsonable,
    label_out,
    load_file,
    metric_to_json,
    molecule_from_json,
    molecule_to_json,
    sigma_from_json,
    space_from_json,
)
from .isogroup import (
    DEFAULT_SEARCH_CAP,
    MODE_SASB,
    MODE_SASBSC,
    apply_sigma,
    check_conditions,
    decide_rigidity,
    enumerate_sigma,
    graph_liso,
    l1_decomposition_check,
)
from .metric import DEFAULT_TOL, format_number
from .transport import lipschitz_dual_norm, transport_norm
from .whitney import is_vertex_star_complement, reconstruct_vertex_map

CAP_KEYS = ("max_cycles", "cap_search", "closure_cap")


class ReportIncomplete(Exception):
    def __init__(self, report: dict, error: CapExceeded):
        super().__init__(str(error))
        self.report = report
        self.error = error


def env_caps(environ=os.environ) -> dict:
    raw = environ.get("FREEISO_CAPS", "").strip()
    out = {}
    if not raw:
        return out
    for item in raw.split(","):
        key, _, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if key not in CAP_KEYS:
            raise InputFormatError(f"unknown cap {key!r} in FREEISO_CAPS", allowed=list(CAP_KEYS))
        try:
            out[key] = int(val)
        except ValueError:
            raise InputFormatError(f"cap {key!r} needs an integer, got {val!r}") from None
    return out


def settings(args) -> dict:
    caps = env_caps()
    for key, default in (("max_cycles", DEFAULT_MAX_CYCLES), ("cap_search", DEFAULT_SEARCH_CAP),
                         ("closure_cap", 10**6)):
        val = getattr(args, key, None)
        if val is None:
            val = caps.get(key, default)
        setattr(args, key, val)
    return {
        "arithmetic": "exact" if args.tol is None else "float",
        "tol": None if args.tol is None else repr(args.tol),
        "max_cycles": args.max_cycles,
        "max_cycle_len": args.max_cycle_len,
        "cap_search": args.cap_search,
        "closure_cap": args.closure_cap,
        "exhaustive_bases": args.exhaustive_bases,
        "seed": args.seed,
    }


def _read_space(args):
    data = load_file(args.input)
    M, G = space_from_json(data, args.tol)
    echo = {"file": os.path.basename(args.input), "kind": data.get("kind", "metric"), "points": len(M)}
    if G is not None:
        echo["edges"] = len(G.undirected())
    return M, G, echo


def _read_graph(args):
    data = load_file(args.input)
    if data.get("kind") != "graph":
        raise InputFormatError("this command needs a graph input", kind=data.get("kind"))
    G = graph_from_json(data)
    return G, {"file": os.path.basename(args.input), "kind": "graph", "points": len(G.vertices),
               "edges": len(G.undirected())}


def _edge_list(es):
    return [[label_out(a), label_out(b)] for a, b in es]


# --------------------------------------------------------------------------
# commands


def cmd_validate(args):
    M, G, echo = _read_space(args)
    out = {"input": echo, "valid": True, "space": metric_to_json(M)}
    if G is not None:
        out["graph"] = graph_to_json(G)
    return out


def cmd_extgraph(args):
    M, _, echo = _read_space(args)
    return {"input": echo, "extgraph": ext_graph(M).to_json()}


def cmd_prague(args):
    M, _, echo = _read_space(args)
    if args.edges:
        verdict = classify_edge_set(M, _edges_arg(args.edges, both=True))
    else:
        verdict = classify_prague(M)
    return {"input": echo, "prague": verdict.to_json()}


def _edges_arg(path, both=False):
    data = load_file(path)
    if "edges" not in data:
        raise InputFormatError("edge-set JSON needs 'edges'")
    out = []
    for e in data["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InputFormatError(f"edge {e!r} is not a pair")
        out.append(tuple(e))
        if both:
            out.append((e[1], e[0]))
    return out


def cmd_norm(args):
    M, _, echo = _read_space(args)
    if not args.molecule:
        raise InputFormatError("norm needs --molecule FILE")
    x = molecule_from_json(load_file(args.molecule), args.tol, M.points)
    res = transport_norm(M, x)
    dual, f = lipschitz_dual_norm(M, x)
    return {
        "input": echo,
        "molecule": molecule_to_json(x),
        "norm": format_number(res.value),
        "dual_value": format_number(dual),
        "agree": M.eq(res.value, dual),
        "witness": {str(label_out(p)): format_number(v) for p, v in res.witness.values.items()},
        "plan": [[label_out(a), label_out(b), format_number(v)] for (a, b), v in sorted(res.plan.items(), key=repr)],
    }


def _target_graph(M, G):
    return G if G is not None else ext_graph(M).graph()


def cmd_cycles(args):
    M, G, echo = _read_space(args)
    H = _target_graph(M, G)
    try:
        cycles = simple_cycles(H, min_len=args.min_cycle_len, max_len=args.max_cycle_len,
                               max_count=args.max_cycles)
    except CapExceeded as exc:
        partial = exc.partial or []
        raise ReportIncomplete({"input": echo, "count": len(partial),
                                "cycles": [_edge_list(c) for c in partial]}, exc)
    return {"input": echo, "count": len(cycles), "cycles": [_edge_list(c) for c in cycles]}


def cmd_connectivity(args):
    M, G, echo = _read_space(args)
    H = _target_graph(M, G)
    rep = connectivity_report(H)
    return {"input": echo, "connectivity": jsonable(rep)}


def cmd_components(args):
    M, G, echo = _read_space(args)
    H = _target_graph(M, G)
    blocks = biconnected_blocks(H)
    return {
        "input": echo,
        "edge_components": [_edge_list(b) for b in blocks],
        "articulation_points": [label_out(v) for v in articulation_points(H)],
    }


def cmd_whitney(args):
    M, G, echo = _read_space(args)
    H = _target_graph(M, G)
    out = {"input": echo}
    if args.sigma:
        sigma = sigma_from_json(load_file(args.sigma))
        f = reconstruct_vertex_map(H, sigma, max_count=args.max_cycles)
        out["vertex_map"] = [[label_out(v), label_out(f[v])] for v in H.vertices]
    if args.edges:
        E_prime = _edges_arg(args.edges)
        out["star_complement"] = is_vertex_star_complement(
            H, E_prime, exhaustive=args.exhaustive_bases, seed=args.seed,
            require_2_connected_star=args.two_connected_star,
        )
    if len(out) == 1:
        raise InputFormatError("whitney needs --sigma FILE and/or --edges FILE")
    return out


def cmd_sigma(args):
    M, _, echo = _read_space(args)
    G = ext_graph(M).graph()
    mode = {"SaSb": MODE_SASB, "SaSbSc": MODE_SASBSC, None: None}[args.mode]
    out = {"input": echo}
    if args.check:
        sigma = sigma_from_json(load_file(args.check))
        rep = check_conditions(sigma, M, mode=mode or MODE_SASBSC, max_cycles=args.max_cycles,
                               exhaustive_paths=args.exhaustive_paths)
        out["conditions"] = jsonable(rep.to_json())
        if args.apply:
            x = molecule_from_json(load_file(args.apply), args.tol, M.points)
            out["image"] = molecule_to_json(apply_sigma(sigma, x, M))
        return out
    try:
        sigmas = enumerate_sigma(M, mode, node_cap=args.cap_search, max_cycles=args.max_cycles)
    except CapExceeded as exc:
        partial = exc.partial or []
        raise ReportIncomplete({**out, "count": len(partial),
                                "sigmas": [s.to_json(G)["sigma"] for s in partial]}, exc)
    out["count"] = len(sigmas)
    out["sigmas"] = [jsonable(s.to_json(G)["sigma"]) for s in sigmas]
    return out


def cmd_rigidity(args):
    M, _, echo = _read_space(args)
    v = decide_rigidity(M, enumerate_all=args.enumerate, node_cap=args.cap_search,
                        max_cycles=args.max_cycles)
    G = ext_graph(M).graph()
    return {"input": echo, **jsonable(v.to_json(G))}


def cmd_isogroup(args):
    M, G, echo = _read_space(args)
    out = {"input": echo}
    if G is None:
        # general spaces: enumerate and close
        H = ext_graph(M).graph()
        sigmas = enumerate_sigma(M, node_cap=args.cap_search, max_cycles=args.max_cycles)
        out.update({"order": str(len(sigmas)), "structure": None, "generators": None})
    else:
        H = G
        desc = graph_liso(G, max_cycles=args.max_cycles, closure_cap=args.closure_cap,
                          node_cap=args.cap_search)
        out.update(jsonable(desc.to_json(G)))
    if not args.skip_rigidity:
        try:
            v = decide_rigidity(M, node_cap=args.cap_search, max_cycles=args.max_cycles)
            out["rigid"] = v.rigid
            out["witness"] = None if v.counterexample is None else jsonable(v.counterexample.to_json(H)["sigma"])
        except CapExceeded:
            out["rigid"] = None
            out["witness"] = None
    return out


def cmd_l1check(args):
    G, echo = _read_graph(args)
    ok, records = l1_decomposition_check(G, samples=args.samples, seed=args.seed, detail=True)
    return {"input": echo, "holds": ok, "samples": args.samples,
            "failures": [jsonable(r) for r in records if not r["equal"]]}


def _read_metric_arg(path, tol):
    M, _ = space_from_json(load_file(path), tol)
    return M


def cmd_construct(args):
    recipe = cons.ConstructionRecipe(args.kind)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cons.ConstructionWarning)
        if args.kind == "lpsum":
            M, N = _read_metric_arg(args.first, None), _read_metric_arg(args.second, None)
            recipe.parameters = {"p": args.p}
            S = cons.lp_sum(M, N, args.p, recipe)
            return {**metric_to_json(S), "recipe": recipe.to_json()}
        if args.kind == "union-bounded":
            M, N = _read_metric_arg(args.first, None), _read_metric_arg(args.second, None)
            return {**metric_to_json(cons.union_bounded(M, N)), "recipe": recipe.to_json()}
        if args.kind == "union-basepoint":
            M, N = _read_metric_arg(args.first, None), _read_metric_arg(args.second, None)
            bm = _match_label(M, args.base_m)
            bn = _match_label(N, args.base_n)
            recipe.parameters = {"p": args.p, "base_m": args.base_m, "base_n": args.base_n}
            S = cons.union_basepoint(M, N, bm, bn, args.p, recipe)
            return {**metric_to_json(S), "recipe": recipe.to_json()}
        # three-cliques
        sizes = args.sizes
        mult = args.multiplicities
        if len(sizes) != 3 or len(mult) != 6:
            raise InputFormatError("three-cliques needs --sizes i1 i2 i3 and --multiplicities e01 e02 e10 e12 e20 e21")
        e = [[0, mult[0], mult[1]], [mult[2], 0, mult[3]], [mult[4], mult[5], 0]]
        recipe.parameters = {"sizes": sizes, "multiplicities": e}
        P = cons.three_clique_graph(sizes[0], sizes[1], sizes[2], e)
        return {**graph_to_json(P.graph), "recipe": recipe.to_json()}


def _match_label(M, raw):
    for p in M.points:
        if str(label_out(p)) == raw:
            return p
    return raw


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    arith = common.add_mutually_exclusive_group()
    arith.add_argument("--exact", dest="tol", action="store_const", const=None,
                       help="exact rational arithmetic (default)")
    arith.add_argument("--tol", type=float, default=None,
                       help=f"float arithmetic with this relative tolerance (e.g. {DEFAULT_TOL})")
    common.add_argument("--max-cycles", type=int, default=None, help="cap on enumerated simple cycles")
    common.add_argument("--max-cycle-len", type=int, default=None, help="longest cycle listed by 'cycles'")
    common.add_argument("--cap-search", type=int, default=None, help="node cap for sigma searches")
    common.add_argument("--closure-cap", type=int, default=None, help="largest group closed explicitly")
    common.add_argument("--exhaustive-bases", action="store_true",
                        help="enumerate every basis in the vertex-star test")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    ap = argparse.ArgumentParser(prog="freeiso", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, graph_only=False):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("input", help="graph JSON" if graph_only else "metric or graph JSON")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate, "validate a space and echo it in canonical form")
    add("extgraph", cmd_extgraph, "edges whose molecules are preserved extreme points")
    p = add("prague", cmd_prague, "Prague / weak Prague classification")
    p.add_argument("--edges", help="classify this edge set instead of the extreme graph")
    p = add("norm", cmd_norm, "exact free-space norm of a molecule")
    p.add_argument("--molecule", required=False)
    p = add("cycles", cmd_cycles, "simple directed cycles of the graph (or extreme graph)")
    p.add_argument("--min-cycle-len", type=int, default=3)
    add("connectivity", cmd_connectivity, "connectivity report with a minimum vertex cut")
    add("components", cmd_components, "edge components (blocks) and articulation points")
    p = add("whitney", cmd_whitney, "vertex map from an edge bijection; vertex-star test")
    p.add_argument("--sigma", help="edge bijection JSON")
    p.add_argument("--edges", help="edge-set JSON for the vertex-star test")
    p.add_argument("--two-connected-star", action="store_true")
    p = add("sigma", cmd_sigma, "enumerate or check isometry-inducing edge bijections")
    p.add_argument("--mode", choices=["SaSb", "SaSbSc"], default=None)
    p.add_argument("--check", help="check this sigma instead of enumerating")
    p.add_argument("--apply", help="with --check: molecule to map")
    p.add_argument("--exhaustive-paths", action="store_true")
    p = add("rigidity", cmd_rigidity, "decide Lipschitz-free rigidity")
    p.add_argument("--enumerate", action="store_true", help="enumerate even when 3-connected")
    p = add("isogroup", cmd_isogroup, "linear isometry group of the free space")
    p.add_argument("--skip-rigidity", action="store_true")
    p = add("l1check", cmd_l1check, "norm additivity across edge components", graph_only=True)
    p.add_argument("--samples", type=int, default=100)

    c = sub.add_parser("construct", parents=[common], help="build spaces and graphs")
    c.add_argument("kind", choices=["lpsum", "union-bounded", "union-basepoint", "three-cliques"])
    c.add_argument("first", nargs="?")
    c.add_argument("second", nargs="?")
    c.add_argument("--p", default="2")
    c.add_argument("--base-m")
    c.add_argument("--base-n")
    c.add_argument("--sizes", type=int, nargs="*", default=[])
    c.add_argument("--multiplicities", type=int, nargs="*", default=[])
    c.set_defaults(fn=cmd_construct)
    return ap


def run(argv=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    started = time.perf_counter()
    try:
        used = settings(args)
        if args.command == "construct" and args.kind != "three-cliques" and not (args.first and args.second):
            raise InputFormatError(f"construct {args.kind} needs two space files")
        report = args.fn(args)
        code = 0
    except ReportIncomplete as exc:
        report = {**exc.report, "incomplete": True, "error": exc.error.to_json()}
        code = 3
        print(dumps(exc.error.to_json()), file=stderr)
    except CapExceeded as exc:
        report = {"incomplete": True, "error": exc.to_json()}
        code = 3
        print(dumps(exc.to_json()), file=stderr)
    except FreeIsoError as exc:
        print(dumps(exc.to_json()), file=stderr)
        return 2
    report = jsonable({**report, "settings": used})
    if args.timing:
        report["seconds"] = round(time.perf_counter() - started, 6)
    print(dumps(report), file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
