"""JSON reading and writing for spaces, graphs, molecules and edge bijections.

Numbers travel as strings ("3", "1/2", "0.25") so reports never pick up
float drift.  Labels are JSON strings or integers.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import InputFormatError
from .graphkit import DirectedSymGraph
from .metric import FiniteMetricSpace, Molecule, format_number, to_number, validate_metric
from .whitney import SignedEdgeBijection


def _label(x):
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise InputFormatError(f"labels must be strings or integers, got {x!r}")


def label_out(x):
    """JSON form of a label; tuple labels from product spaces become 'x|y'."""
    if isinstance(x, tuple):
        return "|".join(str(label_out(v)) for v in x)
    return x


def loads(text: str, source: str = "<input>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"malformed JSON in {source}: {exc.msg}", source=source, line=exc.lineno, column=exc.colno
        ) from None
    if not isinstance(data, dict):
        raise InputFormatError(f"{source}: top level must be a JSON object", source=source)
    return data


def load_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}", source=path) from None
    return loads(text, path)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, Fraction):
        return format_number(o)
    if isinstance(o, float):
        return repr(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o, key=repr)
    if isinstance(o, tuple):
        return list(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def jsonable(obj):
    """Recursively turn Fractions into strings and tuples into lists."""
    if isinstance(obj, Fraction):
        return format_number(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(label_out(k)) if isinstance(k, tuple) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


# --------------------------------------------------------------------------
# spaces and graphs


def metric_from_json(data: dict, tol: float | None = None) -> FiniteMetricSpace:
    if data.get("kind", "metric") != "metric":
        raise InputFormatError(f"expected kind 'metric', got {data.get('kind')!r}")
    if "points" not in data or "d" not in data:
        raise InputFormatError("metric JSON needs 'points' and 'd'")
    labels = [_label(p) for p in data["points"]]
    power = data.get("power")
    try:
        if power is not None:
            from .constructions import space_from_powers

            p = to_number(power["p"])
            pw = [[to_number(v) for v in row] for row in power["d_pow"]]
            return space_from_powers(labels, pw, p)
        return validate_metric(data["d"], labels, tol=tol)
    except (ValueError, ZeroDivisionError, TypeError, KeyError) as exc:
        raise InputFormatError(f"bad number in metric JSON: {exc}") from None


def metric_to_json(M: FiniteMetricSpace) -> dict:
    out = {
        "kind": "metric",
        "points": [label_out(p) for p in M.points],
        "d": [[format_number(v) for v in row] for row in M.d],
    }
    if M.power is not None:
        p, pw = M.power
        out["power"] = {"p": format_number(p), "d_pow": [[format_number(v) for v in row] for row in pw]}
    return out


def graph_from_json(data: dict) -> DirectedSymGraph:
    if data.get("kind", "graph") != "graph":
        raise InputFormatError(f"expected kind 'graph', got {data.get('kind')!r}")
    if "edges" not in data:
        raise InputFormatError("graph JSON needs 'edges'")
    pairs = []
    for e in data["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InputFormatError(f"edge {e!r} is not a pair")
        a, b = _label(e[0]), _label(e[1])
        if a == b:
            raise InputFormatError(f"loop at {a!r}")
        pairs.append((a, b))
    verts = data.get("vertices")
    if verts is None:
        seen = []
        for a, b in pairs:
            for v in (a, b):
                if v not in seen:
                    seen.append(v)
        verts = seen
    verts = [_label(v) for v in verts]
    try:
        return DirectedSymGraph.from_undirected(verts, pairs)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from None


def graph_to_json(G: DirectedSymGraph) -> dict:
    return {
        "kind": "graph",
        "vertices": [label_out(v) for v in G.vertices],
        "edges": [[label_out(a), label_out(b)] for a, b in G.undirected()],
    }


def space_from_json(data: dict, tol: float | None = None):
    """(metric space, graph or None): graphs are turned into their path metric."""
    from .graphkit import graph_metric

    kind = data.get("kind")
    if kind == "graph":
        G = graph_from_json(data)
        return graph_metric(G), G
    if kind in (None, "metric"):
        return metric_from_json(data, tol), None
    raise InputFormatError(f"unknown kind {kind!r}; expected 'metric' or 'graph'")


# --------------------------------------------------------------------------
# molecules and sigma


def molecule_from_json(data: dict, tol: float | None = None, labels=None) -> Molecule:
    """Read a molecule; with ``labels`` the string keys are matched to the space's labels."""
    if "coeffs" not in data or not isinstance(data["coeffs"], dict):
        raise InputFormatError("molecule JSON needs an object 'coeffs'")
    lookup = {str(label_out(p)): p for p in labels} if labels is not None else None
    try:
        coeffs = {(lookup.get(k, k) if lookup else _key(k)): to_number(v, tol) for k, v in data["coeffs"].items()}
    except (ValueError, ZeroDivisionError) as exc:
        raise InputFormatError(f"bad coefficient: {exc}") from None
    return Molecule(coeffs)


def _key(k: str):
    # JSON object keys are strings; integer-looking keys address integer labels
    try:
        return int(k) if str(int(k)) == k else k
    except ValueError:
        return k


def molecule_to_json(x: Molecule) -> dict:
    return {"coeffs": {str(label_out(k)): format_number(v) for k, v in sorted(x.coeffs.items(), key=lambda kv: repr(kv[0]))}}


def sigma_from_json(data: dict) -> SignedEdgeBijection:
    if "sigma" not in data:
        raise InputFormatError("sigma JSON needs 'sigma'")
    pairs = []
    for item in data["sigma"]:
        try:
            (a, b), (c, d) = item
        except (TypeError, ValueError):
            raise InputFormatError(f"sigma entry {item!r} is not [[a,b],[c,d]]") from None
        pairs.append(((_label(a), _label(b)), (_label(c), _label(d))))
    return SignedEdgeBijection.from_pairs(pairs)
