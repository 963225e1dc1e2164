"""Rotation systems and face tracing.

A rotation system assigns every vertex a cyclic order of its incident
edges; by the rotation principle this determines a 2-cell embedding in
an orientable surface. Faces are recovered by the orbit rule: the
successor of the arc (u -> v) is (v -> w) where vw is the edge after vu
in the cyclic order at v. Genus then falls out of Euler's formula,
computed per connected component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .errors import InternalConsistencyError, ValidationError

Arc = tuple[int, int]


class RotationSystem:
    """Cyclic edge order per vertex, stored as the tuple of neighbor
    endpoints in cyclic succession. Two systems are equal when every
    vertex has the same cyclic tuple (the stored tuple is positional,
    not normalized, so construction should be deterministic)."""

    def __init__(self, order: Mapping[int, Iterable[int]]):
        self.order: dict[int, tuple[int, ...]] = {
            v: tuple(ns) for v, ns in order.items()
        }

    def vertices(self) -> Iterable[int]:
        return self.order.keys()

    def at(self, v: int) -> tuple[int, ...]:
        return self.order[v]

    def validate_for(self, g) -> None:
        """Check the system covers exactly the vertices of g and each
        pi_v is a permutation of the neighbors of v."""
        for v in range(g.n_vertices):
            if v not in self.order:
                raise ValidationError(f"no rotation given for vertex {v}")
            cyc = self.order[v]
            if len(cyc) != len(set(cyc)):
                raise ValidationError(f"rotation at {v} repeats an edge")
            if set(cyc) != set(g.neighbors(v)):
                raise ValidationError(f"rotation at {v} does not match its neighbors")
        extra = set(self.order) - set(range(g.n_vertices))
        if extra:
            raise ValidationError(f"rotation given for unknown vertices {sorted(extra)}")

    def successor(self, v: int, u: int) -> int:
        """The neighbor after u in the cyclic order at v."""
        cyc = self.order[v]
        k = cyc.index(u)
        return cyc[(k + 1) % len(cyc)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RotationSystem) and self.order == other.order

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.order.items())))

    def __repr__(self) -> str:
        return f"RotationSystem(vertices={len(self.order)})"


@dataclass(frozen=True)
class FaceSet:
    """Traced faces of one embedding. Every face is a tuple of arcs in
    orbit order, stored starting at its lexicographically least arc so
    equal embeddings compare equal."""

    faces: tuple[tuple[Arc, ...], ...]
    n_edges: int

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.faces)

    def face_arcs(self) -> frozenset[tuple[Arc, ...]]:
        return frozenset(self.faces)


def sorted_rotation(g) -> RotationSystem:
    """The rotation that lists neighbors in ascending label order."""
    return RotationSystem({v: g.neighbors(v) for v in range(g.n_vertices)})


def trace_faces(g, rot: RotationSystem) -> FaceSet:
    """Orbit decomposition of the arc set under the face-successor map."""
    rot.validate_for(g)
    succ: dict[Arc, int] = {}
    for v in range(g.n_vertices):
        cyc = rot.at(v)
        d = len(cyc)
        for k, u in enumerate(cyc):
            succ[(v, u)] = cyc[(k + 1) % d]
    arcs = sorted(succ.keys())
    seen: set[Arc] = set()
    faces: list[tuple[Arc, ...]] = []
    for a0 in arcs:
        if a0 in seen:
            continue
        face = []
        a = a0
        while a not in seen:
            seen.add(a)
            face.append(a)
            u, v = a
            a = (v, succ[(v, u)])
        if a != a0:
            raise InternalConsistencyError("face orbit did not close on its start arc")
        faces.append(tuple(face))
    fs = FaceSet(tuple(faces), n_edges=len(arcs) // 2)
    if sum(fs.lengths) != len(arcs):
        raise InternalConsistencyError("face lengths do not cover every arc once")
    return fs


def connected_components(g) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    comps = []
    for s in range(g.n_vertices):
        if s in seen:
            continue
        stack = [s]
        seen.add(s)
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def genus_of_embedding(g, rot: RotationSystem) -> int:
    """Sum over components of (2 - n_c + e_c - f_c) / 2.

    Isolated vertices contribute 0. The per-component value must be a
    nonnegative even integer before halving; anything else means the
    trace is broken and raises InternalConsistencyError.
    """
    fs = trace_faces(g, rot)
    return genus_from_faces(g, fs)


def genus_from_faces(g, fs: FaceSet) -> int:
    comp_of: dict[int, int] = {}
    comps = connected_components(g)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    e_c = [0] * len(comps)
    for (u, v) in g.edge_list:
        e_c[comp_of[u]] += 1
    f_c = [0] * len(comps)
    for face in fs.faces:
        f_c[comp_of[face[0][0]]] += 1
    total = 0
    for ci, comp in enumerate(comps):
        if e_c[ci] == 0:
            continue
        val = 2 - len(comp) + e_c[ci] - f_c[ci]
        if val < 0 or val % 2 != 0:
            raise InternalConsistencyError(
                f"component {ci}: 2 - n + e - f = {val} is not an even nonnegative integer"
            )
        total += val // 2
    return total


def face_length_histogram(fs: FaceSet) -> dict[int, int]:
    hist: dict[int, int] = {}
    for L in fs.lengths:
        hist[L] = hist.get(L, 0) + 1
    return dict(sorted(hist.items()))


@dataclass(frozen=True)
class NearKgonReport:
    """Outcome of the near-k-gon test k*f_k >= 2(1-eps)|E|."""

    ok: bool
    k: int
    eps: float
    f_k: int
    lhs: float
    rhs: float
    histogram: dict[int, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def is_near_kgon(g, rot: RotationSystem, k: int, eps: float) -> NearKgonReport:
    """Whether faces of length k carry at least a (1-eps) fraction of
    the arc mass of the embedding."""
    if k < 3:
        raise ValidationError(f"k must be >= 3, got {k}")
    from .bigraph import BipartiteGraph

    if isinstance(g, BipartiteGraph) and k % 2 != 0:
        raise ValidationError("bipartite hosts have even faces; k must be even")
    if not (0.0 < eps < 1.0):
        raise ValidationError(f"eps must lie in (0,1), got {eps}")
    fs = trace_faces(g, rot)
    hist = face_length_histogram(fs)
    f_k = hist.get(k, 0)
    lhs = k * f_k
    rhs = 2.0 * (1.0 - eps) * g.n_edges
    return NearKgonReport(lhs >= rhs, k, eps, f_k, float(lhs), rhs, hist)


# ---------------------------------------------------------------------------
# Text formats. Rotations: one line per vertex, "v: a-b a-c ..." with each
# incident edge written as its sorted endpoint pair. Faces: one face per
# line as the arc sequence "u>v v>w ...".


def _edge_token(v: int, u: int) -> str:
    a, b = (u, v) if u < v else (v, u)
    return f"{a}-{b}"


def rotation_to_text(rot: RotationSystem, fh: TextIO) -> None:
    for v in sorted(rot.vertices()):
        tokens = " ".join(_edge_token(v, u) for u in rot.at(v))
        fh.write(f"{v}: {tokens}\n".rstrip() + "\n")


def rotation_from_text(fh: TextIO) -> RotationSystem:
    order: dict[int, tuple[int, ...]] = {}
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        v = int(head)
        nbrs = []
        for tok in rest.split():
            a_s, _, b_s = tok.partition("-")
            a, b = int(a_s), int(b_s)
            if v == a:
                nbrs.append(b)
            elif v == b:
                nbrs.append(a)
            else:
                raise ValidationError(f"edge {tok} is not incident with vertex {v}")
        order[v] = tuple(nbrs)
    return RotationSystem(order)


def faces_to_text(fs: FaceSet, fh: TextIO) -> None:
    for face in fs.faces:
        fh.write(" ".join(f"{t}>{h}" for (t, h) in face) + "\n")


def faces_from_text(fh: TextIO, n_edges: int) -> FaceSet:
    faces = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        arcs = []
        for tok in line.split():
            t_s, _, h_s = tok.partition(">")
            arcs.append((int(t_s), int(h_s)))
        faces.append(tuple(arcs))
    return FaceSet(tuple(faces), n_edges=n_edges)
