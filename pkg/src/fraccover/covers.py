"""Edge and vertex weight functions, fractional cover numbers and the
transfer of weights between a hypergraph and its dual."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Mapping

from .hypergraph import DualMapping, Hypergraph
from .rational import format_rational, parse_rational
from .ratlp import UnaryLP, solve

ZERO = Fraction(0)


class WeightError(ValueError):
    pass


def _normalise(keys: Iterable[str], weights: Mapping[str, Fraction | int | str], kind: str):
    order = list(keys)
    known = set(order)
    unknown = set(weights) - known
    if unknown:
        raise WeightError(f"unknown {kind}s {sorted(unknown)}")
    out: dict[str, Fraction] = {}
    for k in order:
        if k in weights:
            w = parse_rational(weights[k]) if isinstance(weights[k], str) else Fraction(weights[k])
            if not 0 <= w <= 1:
                raise WeightError(f"weight of {kind} {k!r} is {w}, outside [0,1]")
            if w:
                out[k] = w
    return out


@dataclass(frozen=True)
class EdgeWeightFunction:
    """Weights on the edges of ``host``; missing edges weigh 0."""

    host: Hypergraph
    weights: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _normalise(self.host.edges, self.weights, "edge"))

    def __getitem__(self, edge: str) -> Fraction:
        return self.weights.get(edge, ZERO)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.weights)

    @property
    def weight(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    def total(self, edges: Iterable[str]) -> Fraction:
        return sum((self[e] for e in edges), ZERO)

    def incident_weight(self, v: str) -> Fraction:
        return self.total(self.host.incidence[v])

    def heavy(self, threshold: Fraction) -> frozenset[str]:
        load = dict.fromkeys(self.host.vertices, ZERO)
        for e, w in self.weights.items():
            for v in self.host.edges[e]:
                load[v] += w
        return frozenset(v for v, t in load.items() if t >= threshold)

    def covered(self) -> frozenset[str]:
        return self._covered

    @cached_property
    def _covered(self) -> frozenset[str]:
        return self.heavy(Fraction(1))

    def to_json(self) -> dict:
        return {
            "weights": {e: format_rational(w) for e, w in self.weights.items()},
            "weight": format_rational(self.weight),
            "support_size": len(self.weights),
        }

    @classmethod
    def from_json(cls, host: Hypergraph, data: Mapping) -> "EdgeWeightFunction":
        return cls(host, dict(data["weights"]))


@dataclass(frozen=True)
class VertexWeightFunction:
    """Weights on the vertices of ``host``; missing vertices weigh 0."""

    host: Hypergraph
    weights: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "weights", _normalise(self.host.vertices, self.weights, "vertex")
        )

    def __getitem__(self, v: str) -> Fraction:
        return self.weights.get(v, ZERO)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.weights)

    @property
    def weight(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    def covered(self) -> frozenset[str]:
        return frozenset(
            e for e, vs in self.host.edges.items()
            if sum((self[v] for v in vs), ZERO) >= 1
        )

    def to_json(self) -> dict:
        return {
            "weights": {v: format_rational(w) for v, w in self.weights.items()},
            "weight": format_rational(self.weight),
            "support_size": len(self.weights),
        }

    @classmethod
    def from_json(cls, host: Hypergraph, data: Mapping) -> "VertexWeightFunction":
        return cls(host, dict(data["weights"]))


def covered_vertices(gamma: EdgeWeightFunction) -> frozenset[str]:
    return gamma.covered()


def covered_edges(beta: VertexWeightFunction) -> frozenset[str]:
    return beta.covered()


def _check_known(names, known, kind: str) -> None:
    if names is None:
        return
    missing = set(names) - set(known)
    if missing:
        raise WeightError(f"unknown {kind} {sorted(missing)}")


def edge_cover_number(
    h: Hypergraph,
    X: Iterable[str] | None = None,
    edges: Iterable[str] | None = None,
) -> tuple[Fraction, EdgeWeightFunction]:
    """Minimum-weight fractional edge cover of ``X`` (default: all vertices).

    ``edges`` restricts the cover to a subset of the edges; a vertex of ``X``
    touched by none of them makes the restricted problem infeasible and raises
    :class:`WeightError`.
    """
    X = None if X is None else set(X)
    edges = None if edges is None else set(edges)
    _check_known(X, h.vertex_index, "vertices")
    _check_known(edges, h.edge_index, "edges")
    targets = list(h.vertices) if X is None else h.sort_vertices(X)
    allowed = list(h.edges) if edges is None else h.sort_edges(edges)
    allowed_set = set(allowed)
    cons = []
    for v in targets:
        inc = [e for e in h.incidence[v] if e in allowed_set]
        if not inc:
            raise WeightError(f"vertex {v!r} lies in none of the allowed edges")
        cons.append((v, inc))
    sol = solve(UnaryLP.build(allowed, cons))
    return sol.optimum, EdgeWeightFunction(h, sol.primal)


def vertex_cover_number(
    h: Hypergraph, edges: Iterable[str] | None = None
) -> tuple[Fraction, VertexWeightFunction]:
    """Minimum-weight fractional vertex cover of ``edges`` (default: all)."""
    edges = None if edges is None else set(edges)
    _check_known(edges, h.edge_index, "edges")
    targets = list(h.edges) if edges is None else h.sort_edges(edges)
    cons = [(e, h.members(e)) for e in targets]
    sol = solve(UnaryLP.build(h.vertices, cons))
    return sol.optimum, VertexWeightFunction(h, sol.primal)


# ------------------------------------------------------------ dual transfers
# beta(v) on the original corresponds to gamma(d_v) on the dual; gamma(e) on
# the original corresponds to beta(e) on the dual's vertex e.


def _check_host(fn, host: Hypergraph) -> None:
    if fn.host is not host and fn.host != host:
        raise WeightError("weight function does not live on the expected hypergraph")


def vertex_to_dual_edge(m: DualMapping, beta: VertexWeightFunction) -> EdgeWeightFunction:
    _check_host(beta, m.original)
    return EdgeWeightFunction(m.dual, {m.edge_of_vertex[v]: x for v, x in beta.weights.items()})


def dual_edge_to_vertex(m: DualMapping, gamma: EdgeWeightFunction) -> VertexWeightFunction:
    _check_host(gamma, m.dual)
    back = {f: v for v, f in m.edge_of_vertex.items()}
    return VertexWeightFunction(m.original, {back[f]: x for f, x in gamma.weights.items()})


def edge_to_dual_vertex(m: DualMapping, gamma: EdgeWeightFunction) -> VertexWeightFunction:
    _check_host(gamma, m.original)
    return VertexWeightFunction(m.dual, {m.vertex_of_edge[e]: x for e, x in gamma.weights.items()})


def dual_vertex_to_edge(m: DualMapping, beta: VertexWeightFunction) -> EdgeWeightFunction:
    _check_host(beta, m.dual)
    back = {w: e for e, w in m.vertex_of_edge.items()}
    return EdgeWeightFunction(m.original, {back[w]: x for w, x in beta.weights.items()})


# ----------------------------------------------------------- heavy vertices


def heavy_vertices(gamma: EdgeWeightFunction, eps: Fraction | int) -> frozenset[str]:
    """Vertices whose incident weight is at least ``eps``."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise WeightError(f"eps must lie in (0,1], got {eps}")
    return gamma.heavy(eps)


def heavy_vertex_bound(c: int, d: int, k: Fraction | int, eps: Fraction | int) -> Fraction:
    """``d * (2k/eps)**c``: the cap on heavy vertices when every edge weighs
    at most ``eps/(2c)``."""
    k, eps = Fraction(k), Fraction(eps)
    if c < 1 or d < 0 or k <= 0 or not 0 < eps <= 1:
        raise WeightError(f"bad parameters c={c} d={d} k={k} eps={eps}")
    return d * (2 * k / eps) ** c
