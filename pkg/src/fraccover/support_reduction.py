"""Support reduction for fractional edge covers.

Given an edge weight function ``gamma`` of weight at most ``k`` this builds
``nu`` with weight at most ``k`` that covers at least the vertices ``gamma``
covers, while keeping ``|support(nu)|`` small. The state of the search is a
well-formed pair ``(S, U)``: a family of blocks (sets of at most ``c`` edges)
together with a set ``U`` of exceptional covered vertices, such that every
covered vertex outside ``U`` lies in the common intersection of some block.

Starting from the initial pair, the pair is repeatedly folded (a full block
of ``c`` edges is retired and its covered core moved into ``U``) or extended
(the block with the largest weight deficit is split into blocks with one more
heavy edge each) until the small covering LP of the pair has optimum at most
``k``. Its optimal solution is the reduced cover.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .covers import (
    EdgeWeightFunction,
    VertexWeightFunction,
    dual_edge_to_vertex,
    vertex_to_dual_edge,
)
from .hypergraph import Hypergraph, dualize
from .rational import format_rational
from .ratlp import LPSolution, UnaryLP, solve

ZERO = Fraction(0)
DEFAULT_CAP = 10**6


class SupportReductionError(RuntimeError):
    pass


class IterationCapExceeded(SupportReductionError):
    def __init__(self, trace: "TransformationTrace"):
        super().__init__(f"iteration cap exceeded after {trace.transformations} transformations")
        self.trace = trace


def default_cap() -> int:
    raw = os.environ.get("FRACCOVER_CAP")
    return int(raw) if raw else DEFAULT_CAP


@dataclass(frozen=True)
class WellFormedPair:
    blocks: tuple[frozenset[str], ...]
    U: frozenset[str]
    gamma: EdgeWeightFunction
    c: int

    @property
    def host(self) -> Hypergraph:
        return self.gamma.host

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks) + 2 ** len(self.U)

    def core(self, block: Iterable[str]) -> frozenset[str]:
        return self.host.intersection(block)

    def block_edges(self) -> frozenset[str]:
        return frozenset().union(*self.blocks) if self.blocks else frozenset()

    def accounted(self) -> frozenset[str]:
        """``U`` together with every block core."""
        out = set(self.U)
        for b in self.blocks:
            out |= self.core(b)
        return frozenset(out)

    def violations(self) -> list[str]:
        covered = self.gamma.covered()
        out = []
        if not self.U <= covered:
            out.append(f"U not covered by gamma: {sorted(self.U - covered)}")
        for b in self.blocks:
            if not 1 <= len(b) <= self.c:
                out.append(f"block {sorted(b)} has size {len(b)} outside [1,{self.c}]")
        missing = covered - self.accounted()
        if missing:
            out.append(f"covered vertices outside U and all block cores: {sorted(missing)}")
        return out

    def is_well_formed(self) -> bool:
        return not self.violations()

    def describe(self) -> dict:
        h = self.host
        return {
            "blocks": [h.sort_edges(b) for b in self.blocks],
            "U": h.sort_vertices(self.U),
            "n": self.size,
        }


@dataclass(frozen=True)
class BareBonesPair:
    A: tuple[int, ...]
    b: int

    @property
    def n(self) -> int:
        return 2**self.b + sum(self.A)


def bbp_project(p: WellFormedPair) -> BareBonesPair:
    return BareBonesPair(tuple(sorted(len(b) for b in p.blocks)), len(p.U))


@dataclass(frozen=True)
class WorkingPartition:
    classes: dict[frozenset[str], tuple[str, ...]]
    representatives: dict[frozenset[str], str]


@dataclass(frozen=True)
class ExtensionChoice:
    block: frozenset[str]
    epsilon: Fraction
    extending_set: tuple[str, ...]
    light: frozenset[str]


# --------------------------------------------------------------- operations


def compress_to_target(
    h: Hypergraph, gamma: EdgeWeightFunction, B: Iterable[str]
) -> EdgeWeightFunction:
    """Collapse ``gamma`` onto one edge per distinct trace ``e & B``.

    Each nonempty trace class gives its total weight (capped at 1) to its first
    edge; every other edge gets 0.
    """
    B = frozenset(B)
    if not B <= gamma.covered():
        raise SupportReductionError(
            f"target not covered by gamma: {sorted(B - gamma.covered())}"
        )
    totals: dict[frozenset[str], Fraction] = {}
    rep: dict[frozenset[str], str] = {}
    for e, vs in h.edges.items():
        trace = vs & B
        if trace:
            rep.setdefault(trace, e)
            totals[trace] = totals.get(trace, ZERO) + gamma[e]
    return EdgeWeightFunction(h, {rep[t]: min(s, Fraction(1)) for t, s in totals.items()})


def initial_pair(
    h: Hypergraph, gamma: EdgeWeightFunction, c: int, k: Fraction | int | None = None
) -> WellFormedPair:
    if c < 1:
        raise SupportReductionError("c must be positive")
    if k is not None and gamma.weight > k:
        raise SupportReductionError(f"weight(gamma) = {gamma.weight} exceeds k = {k}")
    threshold = Fraction(1, 2 * c)
    heavy = [e for e in h.edges if gamma[e] >= threshold]
    U = gamma.covered() - h.union(heavy)
    return WellFormedPair(tuple(frozenset([e]) for e in heavy), U, gamma, c)


def _checked(p: WellFormedPair, what: str) -> WellFormedPair:
    bad = p.violations()
    if bad:
        raise SupportReductionError(f"{what} produced an ill-formed pair: {'; '.join(bad)}")
    return p


def fold(p: WellFormedPair, block: Iterable[str]) -> WellFormedPair:
    block = frozenset(block)
    if block not in p.blocks:
        raise SupportReductionError(f"block {sorted(block)} is not in the pair")
    if len(block) != p.c:
        raise SupportReductionError(f"only blocks of size c={p.c} can be folded")
    blocks = tuple(b for b in p.blocks if b != block)
    U = p.U | (p.core(block) & p.gamma.covered())
    return _checked(WellFormedPair(blocks, U, p.gamma, p.c), "fold")


def working_partition(p: WellFormedPair) -> WorkingPartition:
    """Group edges outside the blocks by their (nonempty) trace on ``U``."""
    used = p.block_edges()
    classes: dict[frozenset[str], list[str]] = {}
    for e, vs in p.host.edges.items():
        if e in used:
            continue
        trace = vs & p.U
        if trace:
            classes.setdefault(trace, []).append(e)
    return WorkingPartition(
        {t: tuple(es) for t, es in classes.items()},
        {t: es[0] for t, es in classes.items()},
    )


def build_lp(p: WellFormedPair) -> UnaryLP:
    h = p.host
    chosen = set(p.block_edges()) | set(working_partition(p).representatives.values())
    variables = h.sort_edges(chosen)
    cons: list[tuple[str, list[str]]] = []
    for i, b in enumerate(p.blocks):
        cons.append((f"S{i}", h.sort_edges(b)))
    for u in sorted(p.U, key=lambda v: h.vertex_index.get(v, len(h.vertices))):
        E_u = [e for e in h.incidence.get(u, ()) if e in chosen]
        if not E_u:
            raise SupportReductionError(f"vertex {u!r} of U has no edge in the pair LP")
        cons.append((f"u:{u}", E_u))
    return UnaryLP.build(variables, cons)


def _deficit_slack(p: WellFormedPair) -> Fraction:
    # weight needed to raise every under-weight block to 1
    return sum((1 - p.gamma.total(b) for b in p.blocks if p.gamma.total(b) < 1), ZERO)


def _solve_pair(p: WellFormedPair) -> tuple[UnaryLP, LPSolution]:
    lp = build_lp(p)
    sol = solve(lp)
    bound = p.gamma.weight + _deficit_slack(p)
    if sol.optimum > bound:
        raise SupportReductionError(
            f"pair LP optimum {sol.optimum} exceeds the weight-shift bound {bound}"
        )
    return lp, sol


def certify_perfect(
    p: WellFormedPair, k: Fraction | int
) -> EdgeWeightFunction | None:
    """Cover of ``U`` and all block cores with weight <= k and support at
    most ``n(S, U)``, or None when the pair LP optimum exceeds ``k``."""
    nu, _ = _certify(p, Fraction(k))
    return nu


def _certify(p: WellFormedPair, k: Fraction) -> tuple[EdgeWeightFunction | None, Fraction]:
    _, sol = _solve_pair(p)
    if sol.optimum > k:
        return None, sol.optimum
    nu = EdgeWeightFunction(p.host, sol.primal)
    if not p.accounted() <= nu.covered() or len(nu.support) > p.size:
        raise SupportReductionError("LP solution fails to certify the pair")
    return nu, sol.optimum


def choose_extension(p: WellFormedPair, k: Fraction | int | None = None) -> ExtensionChoice:
    """Pick the block with the largest deficit ``1 - gamma(block)``.

    ``epsilon`` is that deficit; the extending set holds every other edge of
    weight at least ``epsilon/(2c)`` and the light vertices are the covered
    core vertices that none of those edges reach.
    """
    if not p.blocks:
        raise SupportReductionError("cannot extend a pair without blocks")
    if any(len(b) >= p.c for b in p.blocks):
        raise SupportReductionError("extension needs every block below size c")
    best: frozenset[str] | None = None
    eps = ZERO
    for b in p.blocks:
        deficit = 1 - p.gamma.total(b)
        if deficit > eps:
            best, eps = b, deficit
    if best is None:
        raise SupportReductionError("no block has positive deficit")
    threshold = eps / (2 * p.c)
    ext = tuple(e for e in p.host.edges if e not in best and p.gamma[e] >= threshold)
    light = (p.core(best) & p.gamma.covered()) - p.host.union(ext)
    return ExtensionChoice(best, eps, ext, light)


def extend(p: WellFormedPair, ch: ExtensionChoice) -> WellFormedPair:
    if ch.block not in p.blocks:
        raise SupportReductionError("extended block is not in the pair")
    blocks: list[frozenset[str]] = []
    for b in p.blocks:
        if b == ch.block:
            blocks.extend(b | {e} for e in ch.extending_set)
        else:
            blocks.append(b)
    blocks = list(dict.fromkeys(blocks))
    return _checked(WellFormedPair(tuple(blocks), p.U | ch.light, p.gamma, p.c), "extend")


# --------------------------------------------------------------------- trace


@dataclass
class TraceStep:
    kind: str  # "certify" | "fold" | "extend"
    bbp: BareBonesPair
    pair: WellFormedPair | None = field(default=None, repr=False)
    perfect: bool | None = None
    optimum: Fraction | None = None
    epsilon: Fraction | None = None
    extending_set_size: int | None = None
    light_count: int | None = None
    new_blocks: int | None = None

    @property
    def n(self) -> int:
        return self.bbp.n

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "n": self.n, "A": list(self.bbp.A), "b": self.bbp.b}
        if self.kind == "extend":
            out["epsilon"] = format_rational(self.epsilon)
            out["extending_set_size"] = self.extending_set_size
            out["light_count"] = self.light_count
        if self.kind == "certify":
            out["perfect"] = self.perfect
            out["optimum"] = format_rational(self.optimum)
        return out


@dataclass
class TransformationTrace:
    c: int
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def transformations(self) -> int:
        return sum(1 for s in self.steps if s.kind != "certify")

    @property
    def final_pair(self) -> WellFormedPair | None:
        for s in reversed(self.steps):
            if s.pair is not None:
                return s.pair
        return None

    @property
    def max_n(self) -> int:
        return max((s.n for s in self.steps), default=0)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]


def validate_trace(t: TransformationTrace) -> bool:
    """Check that consecutive bare-bones pairs are legal folds/extensions."""
    c = t.c
    prev: BareBonesPair | None = None
    prev_kind = None
    for i, s in enumerate(t.steps):
        A, b = s.bbp.A, s.bbp.b
        if any(not 1 <= x <= c for x in A) or b < 0 or list(A) != sorted(A):
            return False
        if s.kind == "certify":
            if prev is not None and s.bbp != prev:
                return False
            if s.perfect and i != len(t.steps) - 1:
                return False
        elif s.kind in ("fold", "extend"):
            if prev is None or prev_kind != "certify":
                return False
            if b < prev.b:
                return False
            removed = Counter(prev.A) - Counter(A)
            added = Counter(A) - Counter(prev.A)
            if s.kind == "fold":
                if removed != Counter({c: 1}) or added:
                    return False
            else:
                if len(removed) != 1 or sum(removed.values()) != 1:
                    return False
                (x,) = removed
                if x >= c or (added and set(added) != {x + 1}):
                    return False
                d1 = added.get(x + 1, 0)
                if s.new_blocks is not None and d1 != s.new_blocks:
                    return False
                if s.extending_set_size is not None and d1 > s.extending_set_size:
                    return False
                if s.light_count is not None and b - prev.b > s.light_count:
                    return False
        else:
            return False
        prev, prev_kind = s.bbp, s.kind
    return True


# ------------------------------------------------------------------ driver


def reduce_support(
    h: Hypergraph,
    gamma: EdgeWeightFunction,
    c: int,
    k: Fraction | int,
    cap: int | None = None,
) -> tuple[EdgeWeightFunction, TransformationTrace]:
    """Run fold/extend transformations from the initial pair until the pair
    LP certifies a cover of weight <= k.

    Raises :class:`IterationCapExceeded` (carrying the trace) after ``cap``
    transformations.
    """
    k = Fraction(k)
    cap = default_cap() if cap is None else cap
    if gamma.host is not h and gamma.host != h:
        raise SupportReductionError("gamma does not live on h")
    p = _checked(initial_pair(h, gamma, c, k), "initial pair")
    trace = TransformationTrace(c)
    while True:
        nu, opt = _certify(p, k)
        trace.steps.append(TraceStep("certify", bbp_project(p), p, nu is not None, opt))
        if nu is not None:
            break
        if trace.transformations >= cap:
            raise IterationCapExceeded(trace)
        full = next((b for b in p.blocks if len(b) == c), None)
        if full is not None:
            p = fold(p, full)
            trace.steps.append(TraceStep("fold", bbp_project(p), p))
        else:
            ch = choose_extension(p, k)
            before = set(p.blocks)
            p = extend(p, ch)
            trace.steps.append(
                TraceStep(
                    "extend",
                    bbp_project(p),
                    p,
                    epsilon=ch.epsilon,
                    extending_set_size=len(ch.extending_set),
                    light_count=len(ch.light),
                    new_blocks=len(set(p.blocks) - before),
                )
            )
    # well-formedness already puts every covered vertex in U or a block core
    missing = gamma.covered() - nu.covered()
    if missing:
        raise SupportReductionError(f"reduced cover misses {sorted(missing)}")
    return nu, trace


def reduce_vertex_support(
    h: Hypergraph,
    beta: VertexWeightFunction,
    c: int,
    k: Fraction | int,
    cap: int | None = None,
) -> tuple[VertexWeightFunction, TransformationTrace]:
    """Vertex-cover analogue of :func:`reduce_support`, run on the dual.

    ``c`` is the intersection arity used for the dual; for a (c0, d0) input
    the dual satisfies the (d0 + 1, c0) bound.
    """
    m = dualize(h)
    gamma = vertex_to_dual_edge(m, beta)
    nu, trace = reduce_support(m.dual, gamma, c, k, cap)
    return dual_edge_to_vertex(m, nu), trace
