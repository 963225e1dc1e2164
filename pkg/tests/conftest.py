"""Shared builders and independent brute-force references.

The brute helpers deliberately use different data representations than
the package (vertex sequences instead of arc walks, permutation
products instead of incremental search) so agreement is meaningful.
"""

import itertools
import random

from bigenus.bigraph import (BipartiteGraph, Digraph, GenParams, Graph,
                             gen_random_bipartite, orient_randomly)
from bigenus.embedding import (RotationSystem, connected_components,
                               genus_of_embedding, trace_faces)
from bigenus.trails import (build_trail_hypergraph, find_disjoint_mirror_matching,
                            find_matching)


def rand_graph(rng: random.Random, max_edges: int = 12) -> Graph:
    n = rng.randint(3, 9)
    pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pool)
    m = rng.randint(0, min(max_edges, len(pool)))
    return Graph(n, pool[:m])


def rand_bipartite(rng: random.Random, max_edges: int = 20) -> BipartiteGraph:
    n1 = rng.randint(2, 6)
    n2 = rng.randint(2, 6)
    pool = [(x, n1 + y) for x in range(n1) for y in range(n2)]
    rng.shuffle(pool)
    m = rng.randint(0, min(max_edges, len(pool)))
    return BipartiteGraph(n1, n2, pool[:m])


def random_rotation(g, rng: random.Random) -> RotationSystem:
    order = {}
    for v in range(g.n_vertices):
        nbrs = list(g.neighbors(v))
        rng.shuffle(nbrs)
        order[v] = tuple(nbrs)
    return RotationSystem(order)


def brute_closed_trail_count(g, length: int) -> int:
    """Closed trails of exactly `length` edges, distinct edges, counted
    up to rotation and reflection of the vertex sequence."""

    def canon(seq):
        best = None
        for s in (seq, tuple(reversed(seq))):
            for r in range(length):
                rot = s[r:] + s[:r]
                if best is None or rot < best:
                    best = rot
        return best

    seen = set()

    def walk(start, v, used, seq):
        if len(seq) == length:
            e = (v, start) if v < start else (start, v)
            if start in g.neighbors(v) and e not in used:
                seen.add(canon(tuple(seq)))
            return
        for w in g.neighbors(v):
            e = (v, w) if v < w else (w, v)
            if e in used:
                continue
            used.add(e)
            seq.append(w)
            walk(start, w, used, seq)
            seq.pop()
            used.remove(e)

    for start in range(g.n_vertices):
        walk(start, start, set(), [start])
    return len(seen)


def brute_short_trail_total(g, i: int) -> int:
    return sum(brute_closed_trail_count(g, 2 * j) for j in range(2, i + 1))


def all_rotation_systems(g):
    verts = list(range(g.n_vertices))
    choices = []
    for v in verts:
        nbrs = list(g.neighbors(v))
        if len(nbrs) <= 1:
            choices.append([tuple(nbrs)])
        else:
            head, rest = nbrs[0], nbrs[1:]
            choices.append([(head,) + perm
                            for perm in itertools.permutations(rest)])
    for combo in itertools.product(*choices):
        yield RotationSystem(dict(zip(verts, combo)))


def brute_min_genus(g) -> int:
    return min(genus_of_embedding(g, rot) for rot in all_rotation_systems(g))


def component_euler_stats(g, rot):
    """(vertices, edges, faces) per connected component with >= 1 edge."""
    fs = trace_faces(g, rot)
    comps = connected_components(g)
    comp_of = {v: ci for ci, comp in enumerate(comps) for v in comp}
    f_count = [0] * len(comps)
    e_count = [0] * len(comps)
    for face in fs.faces:
        f_count[comp_of[face[0][0]]] += 1
    for (u, _v) in g.edge_list:
        e_count[comp_of[u]] += 1
    return [(len(comp), e_count[ci], f_count[ci])
            for ci, comp in enumerate(comps) if e_count[ci]]


def pipeline_family(n1: int, n2: int, p: float, seed: int, i: int = 1,
                    strategy: str = "greedy"):
    """The matched trail family before blossom removal, plus its graph."""
    g = gen_random_bipartite(GenParams(n1, n2, p, seed=seed))
    d = orient_randomly(g, seed)
    h = build_trail_hypergraph(d, i)
    h_rev = build_trail_hypergraph(d.reverse(), i)
    m = find_matching(h, strategy, seed).matching
    m2 = find_disjoint_mirror_matching(h_rev, m, strategy, seed).matching
    return g, list(m) + list(m2)
