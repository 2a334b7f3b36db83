"""End-to-end acceptance checks, one test per criterion.

Every check is exact rational arithmetic. Each test emits a single
``criterion N: PASS|FAIL`` line (shown with ``-s`` and in the summary).
"""

import random
import time
from itertools import combinations
from fractions import Fraction
from math import ceil

from fraccover.covers import (
    EdgeWeightFunction,
    edge_cover_number,
    heavy_vertex_bound,
    heavy_vertices,
    vertex_cover_number,
)
from fraccover.fhw import fhw_bruteforce, fhw_leq_k, td_fractional_width, validate_td
from fraccover.hypergraph import Hypergraph, dualize, is_cd, multi_intersection, reduce
from fraccover.ratlp import UnaryLP, solve, verify
from fraccover.support_reduction import reduce_support, reduce_vertex_support, validate_trace

from generators import h_n, random_cd_hypergraph, random_hypergraph, random_subset
from oracles import _solve_square, covering_lp_optimum

CD_CLASSES = [(2, 1), (2, 2), (3, 1)]


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _unique_optimum(h, gamma, sol_dual):
    """With a strictly positive optimal dual every optimal primal makes all
    constraints tight; a nonsingular tight system then pins it down."""
    if any(y <= 0 for y in sol_dual.values()):
        return False
    names = h.edge_names
    rows = [[Fraction(int(v in h.edges[e])) for e in names] for v in h.vertices]
    if len(rows) != len(names):
        return False
    x = _solve_square(rows, [Fraction(1)] * len(rows))
    return x is not None and dict(zip(names, x)) == {e: gamma[e] for e in names}


def test_criterion_1_long_edge_family(report):
    failures = []
    with Timer() as t:
        for n in range(2, 11):
            h = h_n(n)
            w, gamma = edge_cover_number(h)
            expected = {"e0": 1 - Fraction(1, n), **{f"e{i}": Fraction(1, n) for i in range(1, n + 1)}}
            if w != 2 - Fraction(1, n) or dict(gamma.weights) != expected:
                failures.append(f"n={n}: weight {w}")
                continue
            lp = UnaryLP.build(h.edges, [(v, h.incidence[v]) for v in h.vertices])
            if not _unique_optimum(h, gamma, solve(lp).dual):
                failures.append(f"n={n}: optimum not certified unique")
            integral = EdgeWeightFunction(h, {"e0": 1, "e1": 1})
            if integral.covered() != set(h.vertices) or integral.weight != 2 or len(integral.support) != 2:
                failures.append(f"n={n}: integral cover rejected")
    ok = not failures and t.elapsed < 1
    report(1, ok, f"H_n for n=2..10, exact 2-1/n, unique witness; {t.elapsed:.3f}s {failures}")
    assert ok


def test_criterion_2_support_reduction_contract(report):
    rng = random.Random(20240601)
    failures, transformations, max_n = [], 0, 0
    with Timer() as t:
        for i in range(200):
            c, d = CD_CLASSES[i % 3]
            h = random_cd_hypergraph(rng, c, d, rng.randint(2, 12), rng.randint(2, 10))
            assert len(h.edges) < c or is_cd(h, c, d)[0]
            X = random_subset(rng, h.vertices)
            w, gamma = edge_cover_number(h, X)
            k = Fraction(ceil(w))
            nu, trace = reduce_support(h, gamma, c, k)
            final = trace.final_pair
            good = (
                nu.weight <= k
                and gamma.covered() <= nu.covered()
                and len(nu.support) <= final.size
                and all(s.pair.is_well_formed() for s in trace.steps)
                and validate_trace(trace)
            )
            if not good:
                failures.append(i)
            transformations += trace.transformations
            max_n = max(max_n, trace.max_n)
    ok = not failures and t.elapsed < 60
    report(2, ok, f"200 (c,d) instances, {transformations} transformations, max n={max_n}; "
                  f"{t.elapsed:.2f}s failures={failures}")
    assert ok


def test_criterion_3_heavy_vertex_bound(report):
    rng = random.Random(7)
    failures, tight = [], Fraction(0)
    with Timer() as t:
        for i in range(200):
            c = rng.choice([1, 2, 3])
            d = rng.choice([1, 2, 3])
            h = random_cd_hypergraph(rng, c, d, rng.randint(2, 12), rng.randint(max(c, 2), 12))
            if len(h.edges) >= c:
                d = multi_intersection(h, c).d
            eps = Fraction(rng.randint(1, 6), 6)
            cap = eps / (2 * c)
            gamma = EdgeWeightFunction(h, {e: cap * Fraction(rng.randint(0, 3), 3) for e in h.edges})
            k = max(gamma.weight, Fraction(1, 100))
            heavy = heavy_vertices(gamma, eps)
            bound = heavy_vertex_bound(c, d, k, eps)
            if len(heavy) > bound:
                failures.append(i)
            if bound:
                tight = max(tight, Fraction(len(heavy)) / bound)
    ok = not failures and t.elapsed < 5
    report(3, ok, f"200 light-weight instances, max |heavy|/bound = {float(tight):.4f}; "
                  f"{t.elapsed:.2f}s failures={failures}")
    assert ok


def duality_corpus():
    rng = random.Random(4242)
    out = []
    while len(out) < 100:
        c, d = rng.choice(CD_CLASSES)
        h = random_cd_hypergraph(rng, c, d, rng.randint(2, 8), rng.randint(2, 8))
        h, _ = reduce(h)
        out.append((h, c, d, rng.randint(0, 2**31)))
    return out


def _double_dual_ok(h):
    m1 = dualize(h)
    m2 = dualize(m1.dual)
    vmap = {v: m2.vertex_of_edge[m1.edge_of_vertex[v]] for v in h.vertices}
    emap = {e: m2.edge_of_vertex[m1.vertex_of_edge[e]] for e in h.edges}
    return (
        len(set(vmap.values())) == len(h.vertices) == len(m2.dual.vertices)
        and len(set(emap.values())) == len(h.edges) == len(m2.dual.edges)
        and all(m2.dual.edges[emap[e]] == {vmap[v] for v in vs} for e, vs in h.edges.items())
    )


def test_criterion_4_duality(report):
    failures = []
    with Timer() as t:
        for i, (h, c, d, _) in enumerate(duality_corpus()):
            m = dualize(h)
            tau, _ = vertex_cover_number(h)
            rho, _ = edge_cover_number(m.dual, m.dual.vertices)
            if tau != rho:
                failures.append((i, "tau"))
            if len(h.edges) >= c and is_cd(h, c, d)[0] and len(m.dual.edges) >= d + 1:
                if not is_cd(m.dual, d + 1, c)[0]:
                    failures.append((i, "dual-cd"))
            if not _double_dual_ok(h):
                failures.append((i, "double-dual"))
    ok = not failures and t.elapsed < 30
    report(4, ok, f"100 reduced hypergraphs: tau*=rho*(dual), dual (d+1,c), double dual; "
                  f"{t.elapsed:.2f}s failures={failures}")
    assert ok


def test_criterion_5_vertex_support_transfer(report):
    failures, max_support = [], 0
    with Timer() as t:
        for i, (h, c, d, seed) in enumerate(duality_corpus()):
            rng = random.Random(seed)
            E = random_subset(rng, h.edges)
            w, beta = vertex_cover_number(h, E)
            k = Fraction(ceil(w))
            # the dual of a (c,d)-hypergraph satisfies the (d+1, c) bound
            nu, trace = reduce_vertex_support(h, beta, d + 1, k)
            good = (
                nu.weight <= k
                and beta.covered() <= nu.covered()
                and len(nu.support) <= trace.final_pair.size
                and validate_trace(trace)
            )
            if not good:
                failures.append(i)
            max_support = max(max_support, len(nu.support))
    ok = not failures and t.elapsed < 60
    report(5, ok, f"100 vertex covers reduced through the dual, max vsupport={max_support}; "
                  f"{t.elapsed:.2f}s failures={failures}")
    assert ok


def test_criterion_6_fhw_agreement(report):
    rng = random.Random(99)
    triangle = Hypergraph.from_edges([("ab", ["a", "b"]), ("bc", ["b", "c"]), ("ca", ["c", "a"])])
    single = Hypergraph.from_edges([("e", ["x", "y"])])
    k5 = Hypergraph.from_edges([(f"{a}{b}", [a, b]) for a, b in combinations("abcde", 2)])

    def sample():
        # half plain graphs, whose cycles and cliques give the negative answers
        if rng.random() < 0.5:
            return random_hypergraph(rng, rng.randint(3, 5), rng.randint(4, 10), max_size=2)
        return random_hypergraph(rng, rng.randint(1, 5), rng.randint(1, 6))

    corpus = [sample() for _ in range(100)]
    corpus += [triangle, h_n(3), k5]
    ks = [Fraction(1), Fraction(3, 2), Fraction(2)]
    failures, negatives = [], {k: 0 for k in ks}
    with Timer() as t:
        for i, h in enumerate(corpus):
            for k in ks:
                fast = fhw_leq_k(h, k, len(h.edges))
                slow = fhw_bruteforce(h, k)
                if (fast is None) != (slow is None):
                    failures.append((i, str(k)))
                for td in (fast, slow):
                    if td is not None and (not validate_td(h, td)[0] or td_fractional_width(h, td) > k):
                        failures.append((i, str(k), "bad td"))
                negatives[k] += fast is None
        anchors = (
            fhw_leq_k(triangle, Fraction(3, 2), 3) is not None
            and fhw_leq_k(triangle, 1, 3) is None
            and fhw_bruteforce(triangle, Fraction(3, 2)) is not None
            and fhw_bruteforce(triangle, 1) is None
            and fhw_leq_k(single, 1, 1) is not None
            and fhw_bruteforce(k5, 2) is None
            and fhw_bruteforce(k5, Fraction(5, 2)) is not None
        )
    ok = not failures and anchors and t.elapsed < 120
    neg = ", ".join(f"k={k}: {n}" for k, n in negatives.items())
    report(6, ok, f"{len(corpus)} hypergraphs x 3 widths, negatives {neg}; anchors={anchors}; "
                  f"{t.elapsed:.2f}s failures={failures}")
    assert ok


def test_criterion_7_lp_oracle(report):
    rng = random.Random(31337)
    failures = []
    with Timer() as t:
        for i in range(500):
            n = rng.randint(1, 6)
            names = [f"x{j}" for j in range(n)]
            cons = []
            for r in range(rng.randint(0, 8)):
                cons.append((f"c{r}", random_subset(rng, names)))
            lp = UnaryLP.build(names, cons)
            sol = solve(lp)
            idx = {v: j for j, v in enumerate(names)}
            if sol.optimum != covering_lp_optimum(n, [{idx[v] for v in vs} for _, vs in cons]):
                failures.append((i, "optimum"))
            if not verify(lp, sol) or sum(sol.dual.values()) != sol.optimum:
                failures.append((i, "duality"))
            slack_ok = all(
                sol.dual[lab] == 0 or sum(sol.primal[v] for v in vs) == 1 for lab, vs in lp.constraints
            ) and all(
                sol.primal[v] == 0 or sum(sol.dual[lab] for lab, vs in lp.constraints if v in vs) == 1
                for v in names
            )
            if not slack_ok:
                failures.append((i, "slackness"))
    ok = not failures and t.elapsed < 30
    report(7, ok, f"500 unary LPs vs basis enumeration; {t.elapsed:.2f}s failures={failures}")
    assert ok


def test_criterion_8_rank_bound_comparison(report):
    rng = random.Random(8)
    failures, meets = [], 0
    with Timer() as t:
        for i in range(50):
            r = rng.randint(1, 4)
            h = random_hypergraph(rng, rng.randint(r, 9), rng.randint(1, 8), max_size=r)
            h, _ = reduce(h)
            r = h.rank
            tau, beta = vertex_cover_number(h)
            c0 = min(2, len(h.edges))
            d0 = multi_intersection(h, c0).d
            nu, trace = reduce_vertex_support(h, beta, d0 + 1, Fraction(ceil(tau)))
            if len(nu.support) > len(h.vertices) or not beta.covered() <= nu.covered():
                failures.append(i)
            meets += len(nu.support) <= r * tau
    ok = not failures and t.elapsed < 30
    report(8, ok, f"50 rank<=4 hypergraphs, vsupport <= |V| everywhere; "
                  f"meets r*tau* bound on {meets}/50 (logged only); {t.elapsed:.2f}s failures={failures}")
    assert ok
