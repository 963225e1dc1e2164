"""Closed trails, the trail hypergraph, and hypergraph matching.

For an orientation D of a bipartite graph, the closed trails of length
2i+2 are the hyperedges of a (2i+2)-uniform hypergraph H whose vertex
set is the arc set of D. A large matching in H is a family of
arc-disjoint trails that the blossom module turns into prescribed faces
of an embedding.

Trails are kept in canonical form: the cyclic arc sequence rotated to
start at its lexicographically least arc. A trail and its reverse are
distinct objects; the reverse lives in the reversed digraph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .bigraph import BipartiteGraph, Digraph, Graph, iter_bits, two_coloring
from .errors import GuardError, ValidationError

Arc = tuple[int, int]

CODEGREE_EXACT_LIMIT = 2000
CODEGREE_SAMPLE_PAIRS = 100_000

_DFS_WORK_LIMIT = 20_000_000


def _canonical_rotation(arcs: Sequence[Arc]) -> tuple[Arc, ...]:
    arcs = tuple(arcs)
    k = min(range(len(arcs)), key=lambda j: arcs[j])
    return arcs[k:] + arcs[:k]


@dataclass(frozen=True)
class ClosedTrail:
    """A directed closed walk with no repeated arc, stored canonically."""

    arcs: tuple[Arc, ...]

    def __post_init__(self) -> None:
        arcs = self.arcs
        if len(arcs) < 2:
            raise ValidationError("a closed trail needs at least 2 arcs")
        if len(set(arcs)) != len(arcs):
            raise ValidationError("trail repeats an arc")
        for j, (t, h) in enumerate(arcs):
            nt, _ = arcs[(j + 1) % len(arcs)]
            if h != nt:
                raise ValidationError("arcs do not chain head to tail")
        if arcs[0] != min(arcs):
            raise ValidationError("trail is not in canonical rotation")

    @classmethod
    def from_arcs(cls, arcs: Sequence[Arc]) -> "ClosedTrail":
        return cls(_canonical_rotation(arcs))

    def __len__(self) -> int:
        return len(self.arcs)

    def vertices(self) -> tuple[int, ...]:
        return tuple(t for (t, _h) in self.arcs)

    def reverse(self) -> "ClosedTrail":
        rev = tuple((h, t) for (t, h) in reversed(self.arcs))
        return ClosedTrail.from_arcs(rev)

    def __repr__(self) -> str:
        inner = " ".join(f"{t}>{h}" for (t, h) in self.arcs)
        return f"ClosedTrail({inner})"


@dataclass(frozen=True)
class TrailSet:
    """Enumeration result. truncated is set when the cap stopped the
    enumeration early; the listed trails are then a deterministic
    prefix, never a silent subset."""

    trails: tuple[ClosedTrail, ...]
    truncated: bool = False

    def __iter__(self):
        return iter(self.trails)

    def __len__(self) -> int:
        return len(self.trails)


def enumerate_closed_trails(d: Digraph, i: int, cap: int | None = None) -> TrailSet:
    """All canonical closed trails of length 2i+2 in D.

    When d is an orientation of a bipartite graph and i = 1 this runs
    the fast path: a 4-trail then has four distinct vertices, so for
    each unordered pair {y, y'} of the smaller color class the trails
    through both are products of two bitmask intersections. Otherwise a
    DFS anchored at each minimum arc enumerates trails directly
    (vertices may repeat, arcs may not).
    """
    if i < 1:
        raise ValidationError(f"i must be >= 1, got {i}")
    if cap is not None and cap < 0:
        raise ValidationError("cap must be nonnegative")
    coloring = two_coloring(_underlying(d)) if i == 1 else None
    if coloring is not None and d.is_orientation():
        raw, truncated = _enumerate_quads_bipartite(d, coloring, cap)
    else:
        raw, truncated = _enumerate_trails_dfs(d, 2 * i + 2, cap)
    trails = tuple(sorted((ClosedTrail.from_arcs(a) for a in raw),
                          key=lambda t: t.arcs))
    return TrailSet(trails, truncated)


def _underlying(d: Digraph):
    if d.source is not None:
        return d.source
    # Anti-parallel arc pairs collapse to one undirected edge.
    return Graph(d.n, set(d.underlying_edges()))


def _enumerate_quads_bipartite(d: Digraph, coloring, cap: int | None):
    side0, side1 = coloring
    small = side0 if len(side0) <= len(side1) else side1
    out = {v: d.out_mask(v) for v in small}
    inn = {v: d.in_mask(v) for v in small}
    found: list[tuple[Arc, ...]] = []
    truncated = False
    for ai, y in enumerate(small):
        for y2 in small[ai + 1:]:
            fwd = out[y] & inn[y2]    # x' with y -> x' -> y2
            bwd = out[y2] & inn[y]    # x with y2 -> x -> y
            if not fwd or not bwd:
                continue
            for xp in iter_bits(fwd):
                for x in iter_bits(bwd):
                    if cap is not None and len(found) >= cap:
                        truncated = True
                        return found, truncated
                    found.append(((x, y), (y, xp), (xp, y2), (y2, x)))
    return found, truncated


def _enumerate_trails_dfs(d: Digraph, length: int, cap: int | None):
    out_sorted = {v: d.out_neighbors(v) for v in range(d.n)}
    found: list[tuple[Arc, ...]] = []
    truncated = False
    arcs = d.arc_list
    for a0 in arcs:
        start, first = a0
        # Only arcs above the anchor may appear, which makes the anchor
        # the unique minimum and yields each rotation class once.
        path = [a0]
        used = {a0}

        def rec(v: int) -> bool:
            nonlocal truncated
            if len(path) == length:
                if v == start:
                    if cap is not None and len(found) >= cap:
                        truncated = True
                        return True
                    found.append(tuple(path))
                return False
            for w in out_sorted.get(v, ()):
                a = (v, w)
                if a <= a0 or a in used:
                    continue
                used.add(a)
                path.append(a)
                if rec(w):
                    return True
                path.pop()
                used.remove(a)
            return False

        if rec(first):
            return found, truncated
    return found, truncated


def rho(d: Digraph, b: int, a: int, i: int) -> int:
    """Number of directed paths (all vertices distinct) of length 2i+1
    from b to a."""
    length = 2 * i + 1
    out_sorted = {v: d.out_neighbors(v) for v in range(d.n)}

    def rec(v: int, depth: int, visited: set[int]) -> int:
        if depth == length:
            return 1 if v == a else 0
        if v == a:
            return 0
        total = 0
        for w in out_sorted.get(v, ()):
            if w in visited:
                continue
            visited.add(w)
            total += rec(w, depth + 1, visited)
            visited.remove(w)
        return total

    if b == a:
        return 0
    return rec(b, 0, {b})


def theoretical_delta(n1: int, n2: int, p: float, i: int) -> float:
    """The degree scale n1^i n2^i (p/2)^(2i+1) of the trail hypergraph."""
    return (n1 ** i) * (n2 ** i) * (p / 2.0) ** (2 * i + 1)


class TrailHypergraph:
    """(2i+2)-uniform hypergraph on the arcs of D whose hyperedges are
    the closed trails of length 2i+2."""

    def __init__(self, digraph: Digraph, i: int, trails: TrailSet):
        self.digraph = digraph
        self.i = i
        self.d = 2 * i + 2
        self.arcs: tuple[Arc, ...] = digraph.arc_list
        self.trails: tuple[ClosedTrail, ...] = trails.trails
        self.truncated = trails.truncated
        incidence: dict[Arc, list[int]] = {a: [] for a in self.arcs}
        for idx, t in enumerate(self.trails):
            for a in t.arcs:
                incidence[a].append(idx)
        self.incidence = {a: tuple(ix) for a, ix in incidence.items()}
        self.degree = {a: len(ix) for a, ix in self.incidence.items()}
        self._incidence_sets: dict[Arc, frozenset[int]] | None = None

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @property
    def n_hyperedges(self) -> int:
        return len(self.trails)

    def incidence_set(self, a: Arc) -> frozenset[int]:
        if self._incidence_sets is None:
            self._incidence_sets = {x: frozenset(ix) for x, ix in self.incidence.items()}
        return self._incidence_sets[a]


def build_trail_hypergraph(d: Digraph, i: int, cap: int | None = None) -> TrailHypergraph:
    return TrailHypergraph(d, i, enumerate_closed_trails(d, i, cap))


@dataclass(frozen=True)
class ConditionReport:
    """Empirical check of the three matching hypotheses against the
    degree scale Delta: (1) degrees within (1 +- delta) Delta, (2) max
    codegree below delta*Delta, (3) few hyperedges touch an over-degree
    arc. Codegree is exact for small hypergraphs and sampled above
    CODEGREE_EXACT_LIMIT arcs, with the method recorded."""

    delta: float
    Delta: float
    n_arcs: int
    n_hyperedges: int
    degree_fraction_in_band: float
    cond1_all: bool
    max_codegree: int
    codegree_threshold: float
    codegree_method: str
    codegree_pairs_checked: int
    cond2_ok: bool
    overfull_hyperedges: int
    overfull_threshold: float
    cond3_ok: bool


def check_matching_conditions(h: TrailHypergraph, delta: float, Delta: float,
                              sample_seed: int = 0) -> ConditionReport:
    if Delta <= 0:
        raise ValidationError(f"Delta must be positive, got {Delta}")
    if not (0.0 < delta < 1.0):
        raise ValidationError(f"delta must lie in (0,1), got {delta}")
    lo, hi = (1.0 - delta) * Delta, (1.0 + delta) * Delta
    n = h.n_arcs
    degrees = h.degree
    in_band = sum(1 for a in h.arcs if lo <= degrees[a] <= hi)
    frac = in_band / n if n else 1.0

    if n <= CODEGREE_EXACT_LIMIT:
        method = "exact"
        pair_count: dict[tuple[Arc, Arc], int] = {}
        for t in h.trails:
            arcs = t.arcs
            for j in range(len(arcs)):
                for k in range(j + 1, len(arcs)):
                    key = (arcs[j], arcs[k]) if arcs[j] < arcs[k] else (arcs[k], arcs[j])
                    pair_count[key] = pair_count.get(key, 0) + 1
        max_codeg = max(pair_count.values(), default=0)
        pairs_checked = n * (n - 1) // 2
    else:
        method = "sampled"
        rng = random.Random(sample_seed)
        pairs_checked = CODEGREE_SAMPLE_PAIRS
        max_codeg = 0
        arcs = h.arcs
        for _ in range(pairs_checked):
            a = arcs[rng.randrange(n)]
            b = arcs[rng.randrange(n)]
            if a == b:
                continue
            sa, sb = h.incidence_set(a), h.incidence_set(b)
            if len(sb) < len(sa):
                sa, sb = sb, sa
            c = len(sa & sb)
            if c > max_codeg:
                max_codeg = c

    over_arcs = {a for a in h.arcs if degrees[a] > hi}
    overfull = sum(1 for t in h.trails if any(a in over_arcs for a in t.arcs))
    return ConditionReport(
        delta=delta,
        Delta=Delta,
        n_arcs=n,
        n_hyperedges=h.n_hyperedges,
        degree_fraction_in_band=frac,
        cond1_all=(in_band == n),
        max_codegree=max_codeg,
        codegree_threshold=delta * Delta,
        codegree_method=method,
        codegree_pairs_checked=pairs_checked,
        cond2_ok=max_codeg < delta * Delta,
        overfull_hyperedges=overfull,
        overfull_threshold=delta * n * Delta,
        cond3_ok=overfull <= delta * n * Delta,
    )


@dataclass(frozen=True)
class MatchingReport:
    """A pairwise arc-disjoint set of hyperedges plus bookkeeping.
    Coverage is d*|M|/N, the fraction of arcs used by the matching."""

    matching: tuple[ClosedTrail, ...]
    coverage: float
    strategy: str
    seed: int
    n_arcs: int
    d: int
    excluded: int = 0
    conditions: ConditionReport | None = None

    @property
    def size(self) -> int:
        return len(self.matching)


STRATEGIES = ("greedy", "nibble")


def find_matching(h: TrailHypergraph, strategy: str = "greedy", seed: int = 0,
                  bite_fraction: float = 0.25,
                  exclude: Iterable[ClosedTrail] = ()) -> MatchingReport:
    """Arc-disjoint hyperedge set by one of two randomized strategies.

    greedy: repeatedly take a uniformly random surviving hyperedge and
    discard everything it conflicts with (implemented as a random
    priority order scanned once). nibble: rounds of small random bites;
    within a bite, hyperedges that claimed an arc more than once are
    dropped, the rest enter the matching; a final greedy sweep makes the
    result maximal. Both are deterministic given the seed and report
    achieved coverage; neither claims an a priori size guarantee.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    excluded_set = frozenset(exclude)
    rng = random.Random(seed)
    candidates = [idx for idx, t in enumerate(h.trails) if t not in excluded_set]
    used: set[Arc] = set()
    chosen: list[int] = []

    def try_take(idx: int) -> None:
        arcs = h.trails[idx].arcs
        if any(a in used for a in arcs):
            return
        used.update(arcs)
        chosen.append(idx)

    if strategy == "greedy":
        rng.shuffle(candidates)
        for idx in candidates:
            try_take(idx)
    else:
        alive = candidates
        stagnant = 0
        while alive and stagnant < 3:
            active_arcs = set()
            for idx in alive:
                active_arcs.update(h.trails[idx].arcs)
            mean_deg = h.d * len(alive) / max(1, len(active_arcs))
            p_sel = min(1.0, bite_fraction / max(1.0, mean_deg))
            bite = [idx for idx in alive if rng.random() < p_sel]
            claims: dict[Arc, int] = {}
            for idx in bite:
                for a in h.trails[idx].arcs:
                    claims[a] = claims.get(a, 0) + 1
            before = len(chosen)
            for idx in bite:
                arcs = h.trails[idx].arcs
                if all(claims[a] == 1 for a in arcs):
                    try_take(idx)
            stagnant = stagnant + 1 if len(chosen) == before else 0
            alive = [idx for idx in alive
                     if not any(a in used for a in h.trails[idx].arcs)]
        rng.shuffle(alive)
        for idx in alive:
            try_take(idx)

    chosen.sort()
    matching = tuple(h.trails[idx] for idx in chosen)
    coverage = h.d * len(matching) / h.n_arcs if h.n_arcs else 0.0
    return MatchingReport(matching, coverage, strategy, seed, h.n_arcs, h.d,
                          excluded=len(excluded_set))


def find_disjoint_mirror_matching(h_rev: TrailHypergraph, m: Sequence[ClosedTrail],
                                  strategy: str = "greedy", seed: int = 0,
                                  bite_fraction: float = 0.25) -> MatchingReport:
    """Matching in the reversed-digraph hypergraph avoiding the reverses
    of the given matching, so no prescribed face appears twice with
    opposite senses."""
    mirror = [t.reverse() for t in m]
    return find_matching(h_rev, strategy=strategy, seed=seed,
                         bite_fraction=bite_fraction, exclude=mirror)


def matching_report_to_text(report: MatchingReport, fh: TextIO) -> None:
    fh.write(f"strategy={report.strategy}\n")
    fh.write(f"seed={report.seed}\n")
    fh.write(f"size={report.size}\n")
    fh.write(f"n_arcs={report.n_arcs}\n")
    fh.write(f"d={report.d}\n")
    fh.write(f"coverage={report.coverage:.6f}\n")
    fh.write(f"excluded={report.excluded}\n")
    c = report.conditions
    if c is not None:
        fh.write(f"delta={c.delta}\n")
        fh.write(f"Delta={c.Delta:.6f}\n")
        fh.write(f"degree_fraction_in_band={c.degree_fraction_in_band:.6f}\n")
        fh.write(f"max_codegree={c.max_codegree}\n")
        fh.write(f"codegree_method={c.codegree_method}\n")
        fh.write(f"overfull_hyperedges={c.overfull_hyperedges}\n")


def trails_to_text(trails: Iterable[ClosedTrail], fh: TextIO) -> None:
    for t in trails:
        fh.write(" ".join(f"{a}>{b}" for (a, b) in t.arcs) + "\n")


def trails_from_text(fh: TextIO) -> list[ClosedTrail]:
    out = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        arcs = []
        for tok in line.split():
            a_s, _, b_s = tok.partition(">")
            arcs.append((int(a_s), int(b_s)))
        out.append(ClosedTrail.from_arcs(arcs))
    return out


# ---------------------------------------------------------------------------
# Undirected short-trail counting, used by the refined genus lower bound.


def count_short_closed_trails(g: BipartiteGraph, i: int) -> int:
    """Exact number of closed trails of length at most 2i in the
    undirected simple bipartite graph g (each counted once up to
    rotation and direction).

    In a simple bipartite graph every closed trail of length 4 or 6 is a
    cycle, so those lengths reduce to closed-form cycle counts over
    common neighborhoods. Longer lengths (j >= 4) fall back to an
    exhaustive walk search guarded by a work estimate.
    """
    if not isinstance(g, BipartiteGraph):
        raise ValidationError("count_short_closed_trails expects a bipartite graph")
    if i < 1:
        raise ValidationError(f"i must be >= 1, got {i}")
    total = 0
    for j in range(2, i + 1):
        if j == 2:
            total += _count_quad_cycles(g)
        elif j == 3:
            total += _count_hex_cycles(g)
        else:
            total += _count_trails_exhaustive(g, 2 * j)
    return total


def _y_masks(g: BipartiteGraph) -> list[int]:
    masks = []
    for y in g.y_vertices():
        m = 0
        for x in g.neighbors(y):
            m |= 1 << x
        masks.append(m)
    return masks


def _count_quad_cycles(g: BipartiteGraph) -> int:
    masks = _y_masks(g)
    total = 0
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            c = (masks[a] & masks[b]).bit_count()
            total += c * (c - 1) // 2
    return total


def _count_hex_cycles(g: BipartiteGraph) -> int:
    masks = _y_masks(g)
    n = len(masks)
    total = 0
    for a in range(n):
        for b in range(a + 1, n):
            mab = masks[a] & masks[b]
            if not mab:
                continue
            cab = mab.bit_count()
            for c in range(b + 1, n):
                cac = (masks[a] & masks[c]).bit_count()
                if not cac:
                    continue
                cbc = (masks[b] & masks[c]).bit_count()
                if not cbc:
                    continue
                t = (mab & masks[c]).bit_count()
                total += cab * cbc * cac - t * (cab + cbc + cac) + 2 * t
    return total


def _count_trails_exhaustive(g: BipartiteGraph, length: int) -> int:
    avg = 2 * g.n_edges / max(1, g.n_vertices)
    work = g.n_vertices * max(1.0, avg) ** (length - 1)
    if work > _DFS_WORK_LIMIT:
        raise GuardError(
            f"closed-trail count of length {length} too expensive here "
            f"(estimated {work:.2e} steps)"
        )
    canon: set[tuple[int, ...]] = set()

    def canonical(seq: tuple[int, ...]) -> tuple[int, ...]:
        best = None
        L = len(seq)
        for rot in range(L):
            fwd = seq[rot:] + seq[:rot]
            rev = tuple(reversed(fwd))
            rev = rev[-1:] + rev[:-1]  # keep rotation alignment after flip
            for cand in (fwd, rev):
                if best is None or cand < best:
                    best = cand
        return best

    for start in range(g.n_vertices):
        stack: list[tuple[int, tuple[int, ...], frozenset]] = [(start, (start,), frozenset())]
        while stack:
            v, seq, used = stack.pop()
            if len(seq) == length:
                if start in g.neighbors(v):
                    e = (v, start) if v < start else (start, v)
                    if e not in used:
                        canon.add(canonical(seq))
                continue
            for w in g.neighbors(v):
                e = (v, w) if v < w else (w, v)
                if e in used:
                    continue
                stack.append((w, seq + (w,), used | {e}))
    return len(canon)
