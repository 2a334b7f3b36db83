"""Tree decompositions and a desk-scale fractional hypertree width check.

``fhw_leq_k`` enumerates the inclusion-maximal vertex sets coverable with
weight <= k by at most q edges, then searches for a tree decomposition whose
bags are subsets of those sets. ``fhw_bruteforce`` is an independent exact
oracle based on elimination orderings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable

from .covers import EdgeWeightFunction, edge_cover_number
from .hypergraph import Hypergraph
from .rational import format_rational

BRUTEFORCE_MAX_VERTICES = 10


class MalformedTreeError(ValueError):
    pass


class InvalidDecompositionError(ValueError):
    pass


@dataclass
class TreeDecomposition:
    """Rooted tree given by parent links; node ids are list positions."""

    parent: list[int | None]
    bags: list[frozenset[str]]
    witnesses: dict[int, EdgeWeightFunction] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.bags)

    @property
    def root(self) -> int:
        return self.parent.index(None)

    def children(self, u: int) -> list[int]:
        return [i for i, p in enumerate(self.parent) if p == u]

    def check_structure(self) -> None:
        n = len(self.bags)
        if n == 0 or len(self.parent) != n:
            raise MalformedTreeError("need one parent entry per bag and at least one node")
        roots = [i for i, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise MalformedTreeError(f"expected exactly one root, found {len(roots)}")
        for i, p in enumerate(self.parent):
            if p is not None and not 0 <= p < n:
                raise MalformedTreeError(f"node {i} has unknown parent {p}")
        for i in range(n):
            seen = set()
            u: int | None = i
            while u is not None:
                if u in seen:
                    raise MalformedTreeError(f"cycle through node {u}")
                seen.add(u)
                u = self.parent[u]

    def to_json(self, h: Hypergraph) -> dict:
        nodes = []
        for i, bag in enumerate(self.bags):
            wit = self.witnesses.get(i)
            node = {"id": i, "parent": self.parent[i], "bag": h.sort_vertices(bag)}
            if wit is not None:
                node["cover"] = {e: format_rational(w) for e, w in wit.weights.items()}
                node["bag_width"] = format_rational(wit.weight)
            nodes.append(node)
        out: dict = {"nodes": nodes}
        if len(self.witnesses) == len(self.bags):
            out["width"] = format_rational(max(w.weight for w in self.witnesses.values()))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TreeDecomposition":
        nodes = sorted(data["nodes"], key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise MalformedTreeError("node ids must be 0..n-1")
        return cls([n["parent"] for n in nodes], [frozenset(n["bag"]) for n in nodes])


def validate_td(h: Hypergraph, td: TreeDecomposition) -> tuple[bool, str | None]:
    """Check edge coverage and connectedness; report the first violation."""
    td.check_structure()
    known = set(h.vertices)
    for i, bag in enumerate(td.bags):
        if not bag <= known:
            return False, f"bag {i} has unknown vertices {sorted(bag - known)}"
    for e, vs in h.edges.items():
        if not any(vs <= bag for bag in td.bags):
            return False, f"edge {e} is not contained in any bag"
    for v in h.vertices:
        nodes = [i for i, bag in enumerate(td.bags) if v in bag]
        tops = [i for i in nodes if td.parent[i] is None or v not in td.bags[td.parent[i]]]
        if len(tops) != 1:
            return False, f"vertex {v} occurs in a disconnected set of nodes"
    for i, wit in td.witnesses.items():
        if not td.bags[i] <= wit.covered():
            return False, f"witness of node {i} does not cover its bag"
    return True, None


def td_fractional_width(h: Hypergraph, td: TreeDecomposition) -> Fraction:
    """Largest bag cover number; fills ``td.witnesses`` with optimal covers."""
    ok, why = validate_td(h, td)
    if not ok:
        raise InvalidDecompositionError(why)
    width = Fraction(0)
    for i, bag in enumerate(td.bags):
        w, gamma = edge_cover_number(h, bag)
        td.witnesses[i] = gamma
        width = max(width, w)
    return width


# ----------------------------------------------------------- bitmask helpers


def _components(h: Hypergraph, mask: int) -> list[int]:
    """Connected components of the vertices in ``mask``, linked by edges."""
    emasks = list(h.edge_masks.values())
    out = []
    rest = mask
    while rest:
        comp = rest & -rest
        grow = True
        while grow:
            grow = False
            for em in emasks:
                if em & comp:
                    new = comp | (em & mask)
                    if new != comp:
                        comp, grow = new, True
        out.append(comp)
        rest &= ~comp
    return out


def _boundary(h: Hypergraph, comp: int) -> int:
    touched = 0
    for em in h.edge_masks.values():
        if em & comp:
            touched |= em
    return touched & ~comp


def _submasks_desc(mask: int) -> list[int]:
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = []
    for r in range(len(bits), 0, -1):
        for combo in combinations(bits, r):
            out.append(sum(combo))
    return out


def _mask_key(h: Hypergraph, mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(len(h.vertices)) if mask >> i & 1)


# -------------------------------------------------------- candidate bags


def enumerate_candidate_bags(
    h: Hypergraph, k: Fraction | int, q: int
) -> list[frozenset[str]]:
    """Inclusion-maximal vertex sets coverable with weight <= k by an edge
    weight function whose support has at most ``q`` edges."""
    if q < 1:
        raise ValueError("q must be at least 1")
    k = Fraction(k)
    names = h.edge_names
    # A support of size min(q, |E|) dominates all its subsets: any set
    # coverable with fewer edges is coverable with a superset of them.
    size = min(q, len(names))
    found: list[int] = []
    for support in combinations(names, size):
        for m in _maximal_coverable(h, support, k):
            found.append(m)
    return _maximal_sets(h, found)


def _maximal_coverable(h: Hypergraph, support: tuple[str, ...], k: Fraction) -> list[int]:
    full = 0
    for e in support:
        full |= h.edge_masks[e]
    found: list[int] = []
    level = {full}
    while level:
        nxt: set[int] = set()
        for X in sorted(level, key=lambda m: _mask_key(h, m)):
            if any(X & ~F == 0 for F in found):
                continue
            w, _ = edge_cover_number(h, h.unmask(X), support)
            if w <= k:
                found.append(X)
            else:
                bits = X
                while bits:
                    low = bits & -bits
                    if X & ~low:
                        nxt.add(X & ~low)
                    bits &= ~low
        level = nxt
    return found


def _maximal_sets(h: Hypergraph, masks: Iterable[int]) -> list[frozenset[str]]:
    uniq = sorted(set(masks), key=lambda m: (-m.bit_count(), _mask_key(h, m)))
    keep: list[int] = []
    for m in uniq:
        if not any(m & ~K == 0 for K in keep):
            keep.append(m)
    return [h.unmask(m) for m in keep]


# ----------------------------------------------------- decomposition search


def td_from_bags(
    h: Hypergraph, bags: Iterable[Iterable[str]]
) -> TreeDecomposition | None:
    """Find a tree decomposition whose bags are subsets of the given sets.

    Separator search: a component ``C`` with boundary ``dC`` (vertices outside
    ``C`` sharing an edge with it) is solved by a bag ``B`` with
    ``dC <= B <= C | dC`` that meets ``C`` and is a subset of a given set,
    provided every component of ``C - B`` is solvable in turn. Results are
    memoised per (component, boundary).
    """
    cands = sorted({h.mask(b) for b in bags}, key=lambda m: (-m.bit_count(), _mask_key(h, m)))
    if not cands:
        raise ValueError("at least one bag is required")
    memo: dict[tuple[int, int], tuple[int, list[int]] | None] = {}

    def solve(comp: int) -> tuple[int, list[int]] | None:
        bd = _boundary(h, comp)
        key = (comp, bd)
        if key in memo:
            return memo[key]
        memo[key] = None  # guards re-entry; components strictly shrink anyway
        tried: set[int] = set()
        for cand in cands:
            if bd & ~cand:
                continue
            avail = cand & comp
            if not avail:
                continue
            for sub in _submasks_desc(avail):
                bag = bd | sub
                if bag in tried:
                    continue
                tried.add(bag)
                kids = _components(h, comp & ~bag)
                if all(solve(c) is not None for c in kids):
                    memo[key] = (bag, kids)
                    return memo[key]
        return None

    all_v = (1 << len(h.vertices)) - 1
    if solve(all_v) is None:
        return None
    parent: list[int | None] = []
    out_bags: list[frozenset[str]] = []

    def build(comp: int, par: int | None) -> None:
        bag, kids = memo[(comp, _boundary(h, comp))]
        me = len(out_bags)
        parent.append(par)
        out_bags.append(h.unmask(bag))
        for c in kids:
            build(c, me)

    build(all_v, None)
    return TreeDecomposition(parent, out_bags)


def fhw_leq_k(h: Hypergraph, k: Fraction | int, q: int) -> TreeDecomposition | None:
    """Tree decomposition whose every bag is coverable with weight <= k by at
    most ``q`` edges, or None. A None answer refutes fhw(h) <= k only when
    ``q`` is large enough (``q >= |E|`` always is)."""
    k = Fraction(k)
    td = td_from_bags(h, enumerate_candidate_bags(h, k, q))
    if td is None:
        return None
    width = td_fractional_width(h, td)
    if width > k:
        raise AssertionError(f"decomposition width {width} exceeds k={k}")
    return td


# --------------------------------------------------------------- brute force


def decompose_by_elimination(
    h: Hypergraph, accept: Callable[[frozenset[str]], bool]
) -> TreeDecomposition | None:
    """Exact search over elimination orderings.

    For a subset-closed bag predicate, a tree decomposition with accepted bags
    exists iff some elimination ordering of the primal graph produces only
    accepted bags (each bag is a vertex plus its not-yet-eliminated
    neighbours in the fill-in graph). Dynamic programming over the set of
    eliminated vertices.
    """
    n = len(h.vertices)
    adj = [0] * n
    for em in h.edge_masks.values():
        for i in range(n):
            if em >> i & 1:
                adj[i] |= em & ~(1 << i)
    cache: dict[int, bool] = {}

    def ok(bag: int) -> bool:
        if bag not in cache:
            cache[bag] = accept(h.unmask(bag))
        return cache[bag]

    def later_neighbours(done: int, v: int) -> int:
        # vertices outside done+v reachable from v through eliminated vertices
        seen = 1 << v
        frontier = 1 << v
        reach = 0
        while frontier:
            nbrs = 0
            bits = frontier
            while bits:
                low = bits & -bits
                nbrs |= adj[low.bit_length() - 1]
                bits &= ~low
            nbrs &= ~seen
            seen |= nbrs
            reach |= nbrs & ~done
            frontier = nbrs & done
        return reach

    full = (1 << n) - 1
    reachable = {0: None}  # eliminated set -> (previous set, vertex)
    for size in range(n):
        layer = [s for s in reachable if s.bit_count() == size]
        for done in sorted(layer):
            for v in range(n):
                if done >> v & 1:
                    continue
                nxt = done | (1 << v)
                if nxt in reachable:
                    continue
                if ok((1 << v) | later_neighbours(done, v)):
                    reachable[nxt] = (done, v)
    if full not in reachable:
        return None
    order = []
    s = full
    while s:
        prev, v = reachable[s]
        order.append(v)
        s = prev
    order.reverse()
    return _td_from_order(h, order, later_neighbours)


def _td_from_order(h: Hypergraph, order: list[int], later) -> TreeDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    bags: list[int] = []
    parent: list[int | None] = []
    done = 0
    for v in order:
        bags.append((1 << v) | later(done, v))
        done |= 1 << v
    for i, v in enumerate(order):
        rest = bags[i] & ~(1 << v)
        if rest:
            nxt = min((u for u in range(len(order)) if rest >> u & 1), key=pos.__getitem__)
            parent.append(pos[nxt])
        else:
            parent.append(None)
    last = len(order) - 1
    for i in range(len(order)):
        if parent[i] is None and i != last:
            parent[i] = last
    return _contract_redundant(TreeDecomposition(parent, [h.unmask(b) for b in bags]))


def _contract_redundant(td: TreeDecomposition) -> TreeDecomposition:
    """Merge tree edges whose one endpoint bag contains the other."""
    parent = list(td.parent)
    bags = list(td.bags)
    alive = set(range(len(bags)))
    changed = True
    while changed:
        changed = False
        for u in sorted(alive):
            p = parent[u]
            if p is None:
                continue
            if bags[u] <= bags[p] or bags[p] <= bags[u]:
                bags[p] = bags[u] | bags[p]
                for w in alive:
                    if parent[w] == u:
                        parent[w] = p
                alive.discard(u)
                changed = True
                break
    ids = sorted(alive)
    new_id = {old: i for i, old in enumerate(ids)}
    return TreeDecomposition(
        [None if parent[i] is None else new_id[parent[i]] for i in ids],
        [bags[i] for i in ids],
    )


def fhw_bruteforce(h: Hypergraph, k: Fraction | int) -> TreeDecomposition | None:
    """Exact fhw(h) <= k decision for at most 10 vertices."""
    if len(h.vertices) > BRUTEFORCE_MAX_VERTICES:
        raise ValueError(
            f"brute force is limited to {BRUTEFORCE_MAX_VERTICES} vertices, got {len(h.vertices)}"
        )
    k = Fraction(k)
    td = decompose_by_elimination(h, lambda bag: edge_cover_number(h, bag)[0] <= k)
    if td is not None:
        td_fractional_width(h, td)
    return td
