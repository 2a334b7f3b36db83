"""``fraccover`` command line interface."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from . import covers, fhw, hypergraph, support_reduction
from .rational import format_rational, parse_rational

COMMANDS = ("analyze", "cover", "vcover", "dual", "reduce", "fhw")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    c: int | None = None
    d: int | None = None
    k: Fraction | None = None
    q: int | None = None
    cap: int | None = None
    output: str = "text"
    vertices: list[str] | None = None
    edges: list[str] | None = None
    weights: str | None = None
    trace: str | None = None
    dual: bool = False
    reduce_first: bool = False
    brute: bool = False
    deepen: bool = False
    max_c: int = 4

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name, lo in (("c", 1), ("d", 0), ("q", 1), ("cap", 0), ("max_c", 1)):
            val = getattr(self, name)
            if val is not None and val < lo:
                raise UsageError(f"--{name.replace('_', '-')} must be >= {lo}")
        if self.k is not None and self.k < 0:
            raise UsageError("--k must be non-negative")
        if self.output not in ("json", "text"):
            raise UsageError("--format must be json or text")


def _split(s: str | None) -> list[str] | None:
    return None if s is None else [t.strip() for t in s.split(",") if t.strip()]


# ------------------------------------------------------------------ commands


def _analyze(h: hypergraph.Hypergraph, cfg: RunConfig) -> tuple[int, dict]:
    red, cmap = hypergraph.reduce(h)
    merged = {v: r for v, r in cmap.items() if v != r}
    report = {
        "vertices": len(h.vertices),
        "edges": len(h.edges),
        "rank": h.rank,
        "reduced": not merged,
        "reduced_vertices": len(red.vertices),
        "merged": merged,
        "profiles": [
            {"c": p.c, "d": p.d, "witness": list(p.witness)}
            for p in hypergraph.intersection_profiles(red, cfg.max_c)
        ],
    }
    if cfg.c is not None and cfg.d is not None:
        ok, wit = hypergraph.is_cd(red, cfg.c, cfg.d)
        report["is_cd"] = {"c": cfg.c, "d": cfg.d, "holds": ok, "witness": list(wit or ())}
    return EXIT_OK, report


def _cover(h, cfg):
    w, gamma = covers.edge_cover_number(h, cfg.vertices)
    report = {"vertices": h.sort_vertices(cfg.vertices or h.vertices)}
    report.update(gamma.to_json())
    report["weight"] = format_rational(w)
    return EXIT_OK, report


def _vcover(h, cfg):
    w, beta = covers.vertex_cover_number(h, cfg.edges)
    report = {"edges": h.sort_edges(cfg.edges or h.edges)}
    report.update(beta.to_json())
    report["weight"] = format_rational(w)
    return EXIT_OK, report


def _dual(h, cfg):
    if cfg.reduce_first:
        h, _ = hypergraph.reduce(h)
    m = hypergraph.dualize(h)
    return EXIT_OK, {
        "hypergraph": hypergraph.format_hypergraph(m.dual),
        "edge_of_vertex": m.edge_of_vertex,
    }


def _reduce(h, cfg):
    if cfg.c is None:
        raise UsageError("reduce needs --c")
    if cfg.dual:
        if cfg.weights:
            with open(cfg.weights, encoding="utf-8") as fh:
                source = covers.VertexWeightFunction.from_json(h, json.load(fh))
        else:
            _, source = covers.vertex_cover_number(h, cfg.edges)
        k = cfg.k if cfg.k is not None else Fraction(ceil(source.weight))
        nu, trace = support_reduction.reduce_vertex_support(h, source, cfg.c, k, cfg.cap)
    else:
        if cfg.weights:
            with open(cfg.weights, encoding="utf-8") as fh:
                source = covers.EdgeWeightFunction.from_json(h, json.load(fh))
        else:
            _, source = covers.edge_cover_number(h, cfg.vertices)
        k = cfg.k if cfg.k is not None else Fraction(ceil(source.weight))
        nu, trace = support_reduction.reduce_support(h, source, cfg.c, k, cfg.cap)
    final = trace.final_pair
    report = {
        "mode": "vertex" if cfg.dual else "edge",
        "c": cfg.c,
        "k": format_rational(k),
        "input": source.to_json(),
        "result": nu.to_json(),
        "coverage_superset": source.covered() <= nu.covered(),
        "weight_within_k": nu.weight <= k,
        "final_n": final.size,
        "support_within_final_n": len(nu.support) <= final.size,
        "transformations": trace.transformations,
        "trace_valid": support_reduction.validate_trace(trace),
    }
    if cfg.trace:
        dump = json.dumps(trace.to_json(), indent=1)
        if cfg.trace == "-":
            report["trace"] = trace.to_json()
        else:
            with open(cfg.trace, "w", encoding="utf-8") as fh:
                fh.write(dump + "\n")
    return EXIT_OK, report


def _fhw(h, cfg):
    if cfg.k is None:
        raise UsageError("fhw needs --k")
    if cfg.q is None and not cfg.deepen:
        raise UsageError("fhw needs --q or --deepen")
    m = len(h.edges)
    if cfg.deepen:
        levels, q = [], 1
        while q < m:
            levels.append(q)
            q *= 2
        levels.append(m)
    else:
        levels = [cfg.q]
    report: dict = {"k": format_rational(cfg.k), "levels": []}
    td = None
    for q in levels:
        td = fhw.fhw_leq_k(h, cfg.k, q)
        report["levels"].append({"q": q, "found": td is not None})
        if td is not None:
            break
    report["found"] = td is not None
    if td is not None:
        report["q"] = report["levels"][-1]["q"]
        report["decomposition"] = td.to_json(h)
    else:
        report["message"] = "no TD within budget"
    if cfg.brute:
        bt = fhw.fhw_bruteforce(h, cfg.k)
        report["brute"] = {"found": bt is not None}
        if bt is not None:
            report["brute"]["decomposition"] = bt.to_json(h)
    return (EXIT_OK if td is not None else EXIT_NEGATIVE), report


_DISPATCH = {
    "analyze": _analyze,
    "cover": _cover,
    "vcover": _vcover,
    "dual": _dual,
    "reduce": _reduce,
    "fhw": _fhw,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command. Returns (exit status, report)."""
    h = hypergraph.load(cfg.input)
    return _DISPATCH[cfg.command](h, cfg)


# -------------------------------------------------------------------- output


def _text(command: str, report: dict) -> str:
    if command == "dual":
        return report["hypergraph"].rstrip("\n")
    lines = []
    for key, val in report.items():
        if key == "decomposition":
            lines.append(f"width: {val.get('width', '?')}")
            for node in val["nodes"]:
                lines.append(
                    f"  node {node['id']} (parent {node['parent']}): "
                    f"{{{', '.join(node['bag'])}}}  width {node.get('bag_width', '?')}"
                )
        elif isinstance(val, (dict, list)):
            lines.append(f"{key}: {json.dumps(val)}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fraccover",
        description="Fractional edge/vertex covers, support reduction and fhw checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="hypergraph file (NAME(v1,...,vk). per line)")
        p.add_argument("--format", dest="output", choices=("json", "text"), default="text")

    p = sub.add_parser("analyze", help="reduction and multi-intersection profile")
    common(p)
    p.add_argument("--max-c", type=int, default=4)
    p.add_argument("--c", type=int)
    p.add_argument("--d", type=int)

    p = sub.add_parser("cover", help="fractional edge cover number")
    common(p)
    p.add_argument("--vertices", help="comma-separated vertex subset (default: all)")

    p = sub.add_parser("vcover", help="fractional vertex cover number")
    common(p)
    p.add_argument("--edges", help="comma-separated edge subset (default: all)")

    p = sub.add_parser("dual", help="emit the dual hypergraph")
    common(p)
    p.add_argument("--reduce", dest="reduce_first", action="store_true",
                   help="merge same-type vertices first")

    p = sub.add_parser("reduce", help="support reduction of a cover")
    common(p)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--k", help="weight budget as p/q (default: ceil(weight))")
    p.add_argument("--vertices", help="vertices to cover optimally (default: all)")
    p.add_argument("--edges", help="with --dual: edges to cover (default: all)")
    p.add_argument("--weights", help="JSON weight function to reduce instead")
    p.add_argument("--dual", action="store_true", help="reduce a vertex cover via the dual")
    p.add_argument("--trace", help="write the trace JSON to this path ('-' embeds it)")
    p.add_argument("--cap", type=int, help="iteration cap (env FRACCOVER_CAP)")

    p = sub.add_parser("fhw", help="check fhw <= k via q-limited candidate bags")
    common(p)
    p.add_argument("--k", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--deepen", action="store_true", help="q = 1, 2, 4, ... up to |E|")
    p.add_argument("--brute", action="store_true", help="cross-check by brute force")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    raw = vars(ns).copy()
    k = raw.pop("k", None)
    try:
        k = None if k is None else parse_rational(k)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--k: {exc}") from None
    cfg = RunConfig(
        command=raw.pop("command"),
        input=raw.pop("input"),
        k=k,
        vertices=_split(raw.pop("vertices", None)),
        edges=_split(raw.pop("edges", None)),
        **{key: val for key, val in raw.items() if val is not None},
    )
    return cfg


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        status, report = run(cfg)
    except hypergraph.ParseError as exc:
        print(f"fraccover: parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except support_reduction.IterationCapExceeded as exc:
        print(f"fraccover: {exc}", file=sys.stderr)
        print(json.dumps(exc.trace.to_json()[-5:]), file=sys.stderr)
        return EXIT_ERROR
    except UsageError as exc:
        print(f"fraccover: parameter error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"fraccover: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.output == "json":
        print(json.dumps(report, indent=2))
    else:
        print(_text(cfg.command, report))
    return status


if __name__ == "__main__":
    sys.exit(main())
