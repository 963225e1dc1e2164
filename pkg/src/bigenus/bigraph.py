"""Graph data model and random bipartite generation.

Vertices are integers. For a bipartite graph with parts of sizes n1 and
n2, the X-part is 0..n1-1 and the Y-part is n1..n1+n2-1; this labelling
is fixed globally and used by every other module.

Randomness comes from counter-based Philox streams keyed by (seed,
stream-id), so edge presence and edge orientation are independent and
reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

import numpy as np

from .errors import GuardError, ValidationError

# Stream ids keeping the different uses of one seed independent.
STREAM_EDGES = 0
STREAM_ORIENT = 1
STREAM_MATCH = 2
STREAM_MIRROR = 3
STREAM_CODEGREE = 4

# Subset-indexed operations refuse beyond this part size (2^n2 blowup).
MAX_SMALL_PART = 20

_GEN_CHUNK = 1 << 20


def rng_stream(seed: int, stream: int) -> np.random.Generator:
    """Philox generator for one (seed, stream) pair."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def derive_int_seed(seed: int, stream: int) -> int:
    """A 64-bit integer derived from (seed, stream), for random.Random."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class GenParams:
    """Parameters of the random bipartite model G(n1, n2, p).

    i is the trail half-length parameter carried along for pipeline
    runs; hyperedges and prescribed faces have length 2i+2.
    """

    n1: int
    n2: int
    p: float
    seed: int = 0
    i: int = 1

    def __post_init__(self) -> None:
        if not (self.n1 >= self.n2 >= 1):
            raise ValidationError(f"need n1 >= n2 >= 1, got n1={self.n1} n2={self.n2}")
        if not (0.0 <= self.p <= 1.0):
            raise ValidationError(f"p must lie in [0,1], got {self.p}")
        if self.i < 1:
            raise ValidationError(f"i must be >= 1, got {self.i}")


class BipartiteGraph:
    """Simple bipartite graph on X = 0..n1-1 and Y = n1..n1+n2-1."""

    def __init__(self, n1: int, n2: int, edges: Iterable[tuple[int, int]]):
        if n1 < 0 or n2 < 0:
            raise ValidationError("part sizes must be nonnegative")
        self.n1 = n1
        self.n2 = n2
        seen = set()
        norm = []
        for (a, b) in edges:
            x, y = (a, b) if a < b else (b, a)
            if not (0 <= x < n1 and n1 <= y < n1 + n2):
                raise ValidationError(f"edge ({a},{b}) does not join X to Y")
            if (x, y) in seen:
                raise ValidationError(f"duplicate edge ({x},{y})")
            seen.add((x, y))
            norm.append((x, y))
        norm.sort()
        self.edge_list: tuple[tuple[int, int], ...] = tuple(norm)
        self.edge_set = frozenset(norm)
        adj: dict[int, list[int]] = {v: [] for v in range(n1 + n2)}
        for (x, y) in norm:
            adj[x].append(y)
            adj[y].append(x)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @property
    def n_vertices(self) -> int:
        return self.n1 + self.n2

    @property
    def n_edges(self) -> int:
        return len(self.edge_list)

    def x_vertices(self) -> range:
        return range(self.n1)

    def y_vertices(self) -> range:
        return range(self.n1, self.n1 + self.n2)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BipartiteGraph)
            and self.n1 == other.n1
            and self.n2 == other.n2
            and self.edge_set == other.edge_set
        )

    def __hash__(self) -> int:
        return hash((self.n1, self.n2, self.edge_set))

    def __repr__(self) -> str:
        return f"BipartiteGraph(n1={self.n1}, n2={self.n2}, edges={self.n_edges})"


class Graph:
    """Simple undirected graph on vertices 0..n-1 (not necessarily bipartite)."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValidationError("vertex count must be nonnegative")
        self.n = n
        seen = set()
        norm = []
        for (a, b) in edges:
            if a == b:
                raise ValidationError(f"loop at vertex {a}")
            u, v = (a, b) if a < b else (b, a)
            if not (0 <= u and v < n):
                raise ValidationError(f"edge ({a},{b}) out of range")
            if (u, v) in seen:
                raise ValidationError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            norm.append((u, v))
        norm.sort()
        self.edge_list: tuple[tuple[int, int], ...] = tuple(norm)
        self.edge_set = frozenset(norm)
        adj: dict[int, list[int]] = {v: [] for v in range(n)}
        for (u, v) in norm:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @property
    def n_vertices(self) -> int:
        return self.n

    @property
    def n_edges(self) -> int:
        return len(self.edge_list)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_set == other.edge_set
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edge_set))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.n_edges})"


class Digraph:
    """Directed graph; when built by orient_randomly it is an orientation,
    meaning at most one of (u,v), (v,u) is present."""

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]],
                 source: BipartiteGraph | None = None):
        self.n = n
        seen = set()
        norm = []
        for (t, h) in arcs:
            if t == h:
                raise ValidationError(f"loop arc at {t}")
            if not (0 <= t < n and 0 <= h < n):
                raise ValidationError(f"arc ({t},{h}) out of range")
            if (t, h) in seen:
                raise ValidationError(f"duplicate arc ({t},{h})")
            seen.add((t, h))
            norm.append((t, h))
        norm.sort()
        self.arc_list: tuple[tuple[int, int], ...] = tuple(norm)
        self.arc_set = frozenset(norm)
        self.source = source
        out_m: dict[int, int] = {}
        in_m: dict[int, int] = {}
        for (t, h) in norm:
            out_m[t] = out_m.get(t, 0) | (1 << h)
            in_m[h] = in_m.get(h, 0) | (1 << t)
        self._out_mask = out_m
        self._in_mask = in_m

    @property
    def n_vertices(self) -> int:
        return self.n

    @property
    def n_arcs(self) -> int:
        return len(self.arc_list)

    def out_mask(self, v: int) -> int:
        return self._out_mask.get(v, 0)

    def in_mask(self, v: int) -> int:
        return self._in_mask.get(v, 0)

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(iter_bits(self._out_mask.get(v, 0)))

    def is_orientation(self) -> bool:
        return all((h, t) not in self.arc_set for (t, h) in self.arc_list)

    def reverse(self) -> "Digraph":
        return Digraph(self.n, [(h, t) for (t, h) in self.arc_list], source=self.source)

    def underlying_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((t, h) if t < h else (h, t) for (t, h) in self.arc_list))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.arc_set == other.arc_set
        )

    def __hash__(self) -> int:
        return hash((self.n, self.arc_set))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.n_arcs})"


def iter_bits(mask: int):
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def gen_random_bipartite(params: GenParams) -> BipartiteGraph:
    """Each of the n1*n2 possible edges appears independently with
    probability p, driven by the (seed, edge-stream) Philox generator.

    The uniform stream is consumed in row-major (x, then y) order in
    fixed-size chunks, so the output depends only on params.
    """
    n1, n2, p = params.n1, params.n2, params.p
    gen = rng_stream(params.seed, STREAM_EDGES)
    total = n1 * n2
    edges: list[tuple[int, int]] = []
    offset = 0
    while offset < total:
        k = min(_GEN_CHUNK, total - offset)
        u = gen.random(k)
        for flat in np.nonzero(u < p)[0]:
            cell = offset + int(flat)
            edges.append((cell // n2, n1 + cell % n2))
        offset += k
    return BipartiteGraph(n1, n2, edges)


def standard_class_sizes(n1: int, n2: int, p: float) -> list[int]:
    """Class size floor(p^m (1-p)^(n2-m) n1) for each subset cardinality m.

    Computed in exact rational arithmetic so the floor never suffers
    from float rounding at class-size boundaries.
    """
    pf = Fraction(p)
    qf = 1 - pf
    sizes = []
    for m in range(n2 + 1):
        val = pf ** m * qf ** (n2 - m) * n1
        sizes.append(int(val.numerator // val.denominator))
    return sizes


def standard_graph(n1: int, n2: int, p: float) -> BipartiteGraph:
    """The deterministic graph realizing the expected neighborhood-class
    sizes: for every subset Y' of Y, exactly floor(p^|Y'| (1-p)^(n2-|Y'|) n1)
    X-vertices have neighborhood exactly Y'.

    Subsets are processed in increasing bitmask order and take consecutive
    X labels; X-vertices left over after all classes are filled stay
    isolated, so the graph always has n1 X-slots.
    """
    if n2 > MAX_SMALL_PART:
        raise GuardError(f"standard_graph needs n2 <= {MAX_SMALL_PART}, got {n2}")
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"p must lie in [0,1], got {p}")
    if n1 < 1 or n2 < 1:
        raise ValidationError("need n1 >= 1 and n2 >= 1")
    size_by_m = standard_class_sizes(n1, n2, p)
    edges = []
    x = 0
    for mask in range(1 << n2):
        size = size_by_m[mask.bit_count()]
        for _ in range(size):
            if x >= n1:
                break
            for j in iter_bits(mask):
                edges.append((x, n1 + j))
            x += 1
    return BipartiteGraph(n1, n2, edges)


def orient_randomly(g, seed: int) -> Digraph:
    """One arc per edge, direction by a fair seeded coin per edge.

    Works for BipartiteGraph and Graph inputs alike; the coin stream is
    indexed by the position of the edge in sorted order.
    """
    gen = rng_stream(seed, STREAM_ORIENT)
    edges = g.edge_list
    u = gen.random(len(edges)) if edges else np.empty(0)
    arcs = []
    for k, (a, b) in enumerate(edges):
        arcs.append((a, b) if u[k] < 0.5 else (b, a))
    src = g if isinstance(g, BipartiteGraph) else None
    return Digraph(g.n_vertices, arcs, source=src)


def degree_class_partition(g: BipartiteGraph) -> dict[frozenset[int], list[int]]:
    """Map each realized neighborhood Y' to the X-vertices whose
    neighborhood is exactly Y'. Subsets with no member are absent from
    the result; every X-vertex appears in exactly one class.
    """
    if g.n2 > MAX_SMALL_PART:
        raise GuardError(f"degree_class_partition needs n2 <= {MAX_SMALL_PART}, got {g.n2}")
    classes: dict[frozenset[int], list[int]] = {}
    for x in g.x_vertices():
        key = frozenset(g.neighbors(x))
        classes.setdefault(key, []).append(x)
    return classes


# ---------------------------------------------------------------------------
# Plain-text formats. Bipartite graphs: header "bipartite n1 n2" then one
# "x y" line per edge. Digraphs: header "digraph n" then "tail head" lines.


def write_bipartite(g: BipartiteGraph, fh: TextIO) -> None:
    fh.write(f"bipartite {g.n1} {g.n2}\n")
    for (x, y) in g.edge_list:
        fh.write(f"{x} {y}\n")


def read_bipartite(fh: TextIO) -> BipartiteGraph:
    header = fh.readline().split()
    if len(header) != 3 or header[0] != "bipartite":
        raise ValidationError("expected header 'bipartite n1 n2'")
    n1, n2 = int(header[1]), int(header[2])
    edges = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()
        edges.append((int(a), int(b)))
    return BipartiteGraph(n1, n2, edges)


def write_digraph(d: Digraph, fh: TextIO) -> None:
    fh.write(f"digraph {d.n}\n")
    for (t, h) in d.arc_list:
        fh.write(f"{t} {h}\n")


def read_digraph(fh: TextIO) -> Digraph:
    header = fh.readline().split()
    if len(header) != 2 or header[0] != "digraph":
        raise ValidationError("expected header 'digraph n'")
    n = int(header[1])
    arcs = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()
        arcs.append((int(a), int(b)))
    return Digraph(n, arcs)


# ---------------------------------------------------------------------------
# Small deterministic families used by tests and the oracle CLI.


def complete_bipartite_graph(m: int, n: int) -> BipartiteGraph:
    return BipartiteGraph(m, n, [(x, m + y) for x in range(m) for y in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValidationError("cycle needs at least 3 vertices")
    return Graph(n, [(v, (v + 1) % n) for v in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(v, v + 1) for v in range(n - 1)])


def is_bipartite(g) -> bool:
    """BFS 2-coloring check; BipartiteGraph inputs short-circuit to True."""
    if isinstance(g, BipartiteGraph):
        return True
    color: dict[int, int] = {}
    for s in range(g.n_vertices):
        if s in color:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            v = queue.pop()
            for w in g.neighbors(v):
                if w not in color:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return False
    return True


def two_coloring(g) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """A proper 2-coloring (side0, side1) of the vertex set, or None."""
    if isinstance(g, BipartiteGraph):
        return tuple(g.x_vertices()), tuple(g.y_vertices())
    color: dict[int, int] = {}
    for s in range(g.n_vertices):
        if s in color:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            v = queue.pop()
            for w in g.neighbors(v):
                if w not in color:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
    side0 = tuple(v for v in range(g.n_vertices) if color[v] == 0)
    side1 = tuple(v for v in range(g.n_vertices) if color[v] == 1)
    return side0, side1


def expected_edges(n1: int, n2: int, p: float) -> float:
    return n1 * n2 * p


def edge_count_sigma(n1: int, n2: int, p: float) -> float:
    return math.sqrt(n1 * n2 * p * (1.0 - p))
