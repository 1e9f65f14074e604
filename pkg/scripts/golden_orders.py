"""Print isometry group orders for the graphs in data/, computed two ways."""

import argparse
import time
from pathlib import Path

from freeiso.graphkit import graph_metric
from freeiso.io import graph_from_json, load_file
from freeiso.isogroup import enumerate_sigma, graph_liso

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("files", nargs="*", help="graph JSON files (default: every graph in data/)")
    ap.add_argument("--no-enumerate", action="store_true", help="skip the cross-check by direct enumeration")
    args = ap.parse_args()

    files = [Path(f) for f in args.files] or sorted(DATA.glob("*.json"))
    print(f"{'graph':<12}{'order':>10}{'enumerated':>12}{'seconds':>10}  structure")
    for path in files:
        data = load_file(path)
        if data.get("kind") != "graph":
            continue
        G = graph_from_json(data)
        start = time.perf_counter()
        desc = graph_liso(G)
        enum = "-" if args.no_enumerate else str(len(enumerate_sigma(graph_metric(G))))
        took = time.perf_counter() - start
        print(f"{path.stem:<12}{desc.order:>10}{enum:>12}{took:>10.2f}  {desc.structure.render()}")


if __name__ == "__main__":
    main()
