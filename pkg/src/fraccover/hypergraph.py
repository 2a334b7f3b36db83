"""Hypergraph representation, file parsing, reduction, dualization and
multi-intersection profiling."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class HypergraphError(ValueError):
    pass


class ParseError(HypergraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NotReducedError(HypergraphError):
    pass


def _ordered_members(members: Iterable[str]) -> list[str]:
    # plain sets have no stable iteration order across runs
    if isinstance(members, (set, frozenset)):
        return sorted(members)
    seen: dict[str, None] = {}
    for v in members:
        seen.setdefault(v, None)
    return list(seen)


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable hypergraph with named edges.

    ``edges`` maps edge names to vertex sets, in insertion order; ``vertices``
    lists vertices in order of first occurrence. Both orders drive every
    enumeration in the package.
    """

    edges: Mapping[str, frozenset[str]]
    vertices: tuple[str, ...]
    _member_order: Mapping[str, tuple[str, ...]] = field(repr=False)

    @classmethod
    def from_edges(
        cls,
        edges: Mapping[str, Iterable[str]] | Iterable[tuple[str, Iterable[str]]],
        vertex_order: Sequence[str] | None = None,
    ) -> "Hypergraph":
        items = edges.items() if isinstance(edges, Mapping) else edges
        edge_map: dict[str, frozenset[str]] = {}
        order: dict[str, tuple[str, ...]] = {}
        vertices: dict[str, None] = {}
        for name, members in items:
            if name in edge_map:
                raise HypergraphError(f"duplicate edge name {name!r}")
            ms = _ordered_members(members)
            if not ms:
                raise HypergraphError(f"edge {name!r} is empty")
            edge_map[name] = frozenset(ms)
            order[name] = tuple(ms)
            for v in ms:
                vertices.setdefault(v, None)
        if vertex_order is not None:
            if set(vertex_order) != set(vertices) or len(vertex_order) != len(vertices):
                raise HypergraphError("vertex_order must list exactly the edge vertices")
            vertices = dict.fromkeys(vertex_order)
        return cls(edge_map, tuple(vertices), order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            list(self.edges.items()) == list(other.edges.items())
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash((tuple(self.edges.items()), self.vertices))

    def __repr__(self) -> str:
        return f"Hypergraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(self.edges)

    def members(self, edge: str) -> tuple[str, ...]:
        """Vertices of ``edge`` in their original listing order."""
        return self._member_order[edge]

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def incidence(self) -> dict[str, tuple[str, ...]]:
        """Map each vertex to the names of its incident edges (edge order)."""
        inc: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e, vs in self.edges.items():
            for v in vs:
                inc[v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def edge_masks(self) -> dict[str, int]:
        idx = self.vertex_index
        return {e: sum(1 << idx[v] for v in vs) for e, vs in self.edges.items()}

    def mask(self, vertices: Iterable[str]) -> int:
        idx = self.vertex_index
        return sum(1 << idx[v] for v in set(vertices))

    def unmask(self, mask: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    @property
    def rank(self) -> int:
        return max((len(vs) for vs in self.edges.values()), default=0)

    def sort_vertices(self, vs: Iterable[str]) -> list[str]:
        idx = self.vertex_index
        return sorted(vs, key=idx.__getitem__)

    def sort_edges(self, es: Iterable[str]) -> list[str]:
        idx = self.edge_index
        return sorted(es, key=idx.__getitem__)

    def union(self, edges: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for e in edges:
            out |= self.edges[e]
        return frozenset(out)

    def intersection(self, edges: Iterable[str]) -> frozenset[str]:
        it = iter(edges)
        try:
            out = set(self.edges[next(it)])
        except StopIteration:
            return frozenset(self.vertices)
        for e in it:
            out &= self.edges[e]
        return frozenset(out)

    def is_reduced(self) -> bool:
        types = [frozenset(self.incidence[v]) for v in self.vertices]
        return len(set(types)) == len(types)


# ---------------------------------------------------------------- file format

_COMMENT = re.compile(r"[%#].*")
_NAME = r"[A-Za-z0-9_]+"
_EDGE = re.compile(rf"\s*({_NAME})\s*\(([^()]*)\)\s*([.,])")
_NAME_RE = re.compile(rf"{_NAME}\Z")


def parse(text: str) -> Hypergraph:
    """Parse ``NAME(v1,...,vk).`` lines (``,`` also accepted as terminator).

    ``%`` and ``#`` start comments; blank lines are ignored.
    """
    body = "\n".join(_COMMENT.sub("", line) for line in text.splitlines())
    edges: list[tuple[str, list[str]]] = []
    seen: set[str] = set()
    pos = 0
    while True:
        while pos < len(body) and body[pos].isspace():
            pos += 1
        if pos >= len(body):
            break
        lineno = body.count("\n", 0, pos) + 1
        m = _EDGE.match(body, pos)
        if m is None:
            snippet = body[pos:].split("\n", 1)[0][:40]
            raise ParseError(f"expected NAME(v1,...). near {snippet!r}", lineno)
        name, inner, _ = m.groups()
        if name in seen:
            raise ParseError(f"duplicate edge name {name!r}", lineno)
        members = [t.strip() for t in inner.split(",")] if inner.strip() else []
        if not members:
            raise ParseError(f"edge {name!r} is empty", lineno)
        for v in members:
            if not _NAME_RE.match(v):
                raise ParseError(f"bad vertex name {v!r} in edge {name!r}", lineno)
        seen.add(name)
        edges.append((name, members))
        pos = m.end()
    if not edges:
        raise ParseError("no edges", 1)
    return Hypergraph.from_edges(edges)


def load(path: str) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def format_hypergraph(h: Hypergraph) -> str:
    return "".join(f"{e}({','.join(h.members(e))}).\n" for e in h.edges)


# ---------------------------------------------------------- reduction & duals


def reduce(h: Hypergraph) -> tuple[Hypergraph, dict[str, str]]:
    """Merge vertices with identical incident-edge sets.

    Returns the reduced hypergraph and a map from every original vertex to its
    retained representative (the first vertex of its type).
    """
    rep_of_type: dict[frozenset[str], str] = {}
    class_map: dict[str, str] = {}
    for v in h.vertices:
        t = frozenset(h.incidence[v])
        class_map[v] = rep_of_type.setdefault(t, v)
    if len(rep_of_type) == len(h.vertices):
        return h, class_map
    kept = set(rep_of_type.values())
    edges = [(e, [v for v in h.members(e) if v in kept]) for e in h.edges]
    return Hypergraph.from_edges(edges), class_map


@dataclass(frozen=True)
class DualMapping:
    dual: Hypergraph
    edge_of_vertex: dict[str, str]
    vertex_of_edge: dict[str, str]
    original: Hypergraph


def dual_edge_name(v: str) -> str:
    return f"d_{v}"


def dualize(h: Hypergraph) -> DualMapping:
    """Dual hypergraph: vertices are the edges of ``h`` and each vertex ``v``
    becomes the edge ``d_v`` holding the edges incident to ``v``."""
    if not h.is_reduced():
        types: dict[frozenset[str], str] = {}
        for v in h.vertices:
            t = frozenset(h.incidence[v])
            if t in types:
                raise NotReducedError(
                    f"vertices {types[t]!r} and {v!r} have the same incident edges"
                )
            types[t] = v
    edge_of_vertex = {v: dual_edge_name(v) for v in h.vertices}
    pairs = [(edge_of_vertex[v], list(h.incidence[v])) for v in h.vertices]
    dual = Hypergraph.from_edges(pairs, vertex_order=h.edge_names)
    return DualMapping(dual, edge_of_vertex, {e: e for e in h.edges}, h)


# ------------------------------------------------------- intersection profile


@dataclass(frozen=True)
class IntersectionProfile:
    c: int
    d: int
    witness: tuple[str, ...]


def multi_intersection(h: Hypergraph, c: int) -> IntersectionProfile:
    """Largest intersection of ``c`` distinct edges, with a witness.

    Depth-first over edge subsets in edge order; branches whose running
    intersection is empty, or already no larger than the best found, are cut.
    """
    names = h.edge_names
    m = len(names)
    if not 1 <= c <= m:
        raise HypergraphError(f"c must lie in [1, {m}], got {c}")
    masks = [h.edge_masks[e] for e in names]
    best_d = -1
    best: tuple[int, ...] = ()
    stack: list[int] = []

    def rec(start: int, acc: int) -> None:
        nonlocal best_d, best
        if len(stack) == c:
            size = acc.bit_count()
            if size > best_d:
                best_d, best = size, tuple(stack)
            return
        for i in range(start, m - (c - len(stack)) + 1):
            nxt = masks[i] if not stack else acc & masks[i]
            if best_d >= 0 and nxt.bit_count() <= best_d:
                continue
            stack.append(i)
            rec(i + 1, nxt)
            stack.pop()

    rec(0, 0)
    return IntersectionProfile(c, best_d, tuple(names[i] for i in best))


def is_cd(h: Hypergraph, c: int, d: int) -> tuple[bool, tuple[str, ...] | None]:
    """Whether every ``c`` distinct edges share at most ``d`` vertices.

    On failure the second item is a violating ``c``-subset of edge names.
    """
    if d < 0:
        raise HypergraphError("d must be non-negative")
    prof = multi_intersection(h, c)
    if prof.d <= d:
        return True, None
    return False, prof.witness


def intersection_profiles(h: Hypergraph, max_c: int = 4) -> list[IntersectionProfile]:
    return [multi_intersection(h, c) for c in range(1, min(max_c, len(h.edges)) + 1)]

