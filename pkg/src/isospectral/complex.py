"""The permutahedron's face poset and the complex obtained by gluing sign copies.

Faces of the permutahedron are indexed by ordered partitions.  A face of the
glued complex is a pair (ordered partition, sign class): the sign class
records the signs of the off-diagonal entries inside each diagonal block of a
block-diagonal tridiagonal matrix.  Concretely a sign vector ``eps`` in
``{+1,-1}^d`` acts by ``J -> D J D`` with ``D = diag(eps)``, and flipping
``eps`` on a whole row block does not change the result, so the canonical
representative has ``+1`` at the first row of every row block.

Row blocks are the consecutive row ranges of sizes ``|S_1|, ..., |S_r|``
occupied by the blocks of the direct sum, not the index sets ``S_k``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .counting import stirling2
from .partitions import (
    OrderedPartition,
    enumerate_ordered_partitions,
    refinements_by_one,
)

MAX_VERTEX_D = 9
MAX_FACE_D = 8
MAX_COMPLEX_D = 6
MAX_SURFACE_D = 3


# -- permutahedron ----------------------------------------------------------


def permutahedron_vertices(d: int) -> list[tuple[int, ...]]:
    """All permutations of ``(1, ..., d)`` as coordinate vectors, lexicographic."""
    if not 1 <= d <= MAX_VERTEX_D:
        raise ValueError(f"vertex enumeration supports d in 1..{MAX_VERTEX_D}, got {d}")
    return list(permutations(range(1, d + 1)))


def _face_vertices(partition: OrderedPartition) -> frozenset[tuple[int, ...]]:
    # sigma sends the k-th block onto the k-th run of consecutive values
    d = partition.d
    slots = []
    start = 1
    for block in partition.blocks:
        slots.append((sorted(block), list(range(start, start + len(block)))))
        start += len(block)
    out = []
    for choice in product(*(permutations(vals) for _, vals in slots)):
        sigma = [0] * d
        for (idx, _), vals in zip(slots, choice):
            for i, v in zip(idx, vals):
                sigma[i] = v
        out.append(tuple(sigma))
    return frozenset(out)


def vertex_partition(sigma: Sequence[int]) -> OrderedPartition:
    """The discrete partition ``({sigma^-1(1)}, {sigma^-1(2)}, ...)`` naming vertex ``sigma``."""
    d = len(sigma)
    if sorted(sigma) != list(range(1, d + 1)):
        raise ValueError(f"{tuple(sigma)} is not a permutation of 1..{d}")
    inv = [0] * d
    for i, v in enumerate(sigma):
        inv[v - 1] = i
    return OrderedPartition.discrete(inv)


def vertex_coordinates(partition: OrderedPartition) -> tuple[int, ...]:
    """Inverse of :func:`vertex_partition` for a partition into singletons."""
    if partition.r != partition.d:
        raise ValueError("only partitions into singletons name vertices")
    sigma = [0] * partition.d
    for k, block in enumerate(partition.blocks):
        (i,) = block
        sigma[i] = k + 1
    return tuple(sigma)


@dataclass(frozen=True)
class PermutahedronFace:
    partition: OrderedPartition

    @property
    def dim(self) -> int:
        return self.partition.dim

    @property
    def vertices(self) -> frozenset[tuple[int, ...]]:
        return _face_vertices(self.partition)

    def __le__(self, other: "PermutahedronFace") -> bool:
        return self.vertices <= other.vertices


def faces_of_permutahedron(d: int) -> list[PermutahedronFace]:
    if not 1 <= d <= MAX_FACE_D:
        raise ValueError(f"face enumeration supports d in 1..{MAX_FACE_D}, got {d}")
    return [PermutahedronFace(p) for p in enumerate_ordered_partitions(d)]


def face_count(d: int, n: int) -> int:
    """Number of n-faces of the d-permutahedron, by enumeration."""
    if not 0 <= n <= d - 1:
        raise ValueError(f"face dimension must be in 0..{d - 1}, got {n}")
    return sum(1 for p in enumerate_ordered_partitions(d) if p.dim == n)


# -- sign classes -------------------------------------------------------------


def canonical_signs(partition: OrderedPartition, eps: Sequence[int]) -> tuple[int, ...]:
    """Representative of ``eps`` with ``+1`` at the first row of every row block."""
    eps = tuple(int(e) for e in eps)
    if len(eps) != partition.d or any(e not in (1, -1) for e in eps):
        raise ValueError(f"need {partition.d} signs from {{+1, -1}}, got {eps}")
    out = list(eps)
    for rows in partition.row_blocks():
        s = eps[rows.start]
        for i in rows:
            out[i] = eps[i] * s
    return tuple(out)


def sign_classes(partition: OrderedPartition) -> list[tuple[int, ...]]:
    """All canonical sign vectors; there are ``2^dim`` of them."""
    d = partition.d
    starts = {rows.start for rows in partition.row_blocks()}
    free = [i for i in range(d) if i not in starts]
    out = []
    for bits in product((1, -1), repeat=len(free)):
        eps = [1] * d
        for i, b in zip(free, bits):
            eps[i] = b
        out.append(tuple(eps))
    return out


def offdiagonal_signs(partition: OrderedPartition, eps: Sequence[int]) -> tuple[int, ...]:
    """Signs ``eps_i eps_(i+1)`` of the off-diagonals, ``0`` where blocks meet."""
    d = partition.d
    inner = {i for rows in partition.row_blocks() for i in rows[:-1]}
    return tuple(eps[i] * eps[i + 1] if i in inner else 0 for i in range(d - 1))


@dataclass(frozen=True)
class ComplexFace:
    partition: OrderedPartition
    signs: tuple[int, ...]

    def __post_init__(self):
        canon = canonical_signs(self.partition, self.signs)
        if canon != tuple(self.signs):
            raise ValueError(f"signs {tuple(self.signs)} are not canonical for {self.partition}")

    @classmethod
    def of(cls, partition: OrderedPartition, eps: Sequence[int]) -> "ComplexFace":
        return cls(partition, canonical_signs(partition, eps))

    @property
    def dim(self) -> int:
        return self.partition.dim

    @property
    def label(self) -> str:
        return str(self.partition) + "[" + "".join("+" if e > 0 else "-" for e in self.signs) + "]"

    def __str__(self) -> str:
        return self.label

    def restrict(self, finer: OrderedPartition) -> "ComplexFace":
        """The face of the closure lying over the finer partition."""
        if not finer.refines(self.partition):
            raise ValueError(f"{finer} does not refine {self.partition}")
        return ComplexFace(finer, canonical_signs(finer, self.signs))

    def contains(self, other: "ComplexFace") -> bool:
        """``other`` lies in the closure of ``self``."""
        return other.partition.refines(self.partition) and (
            canonical_signs(other.partition, self.signs) == other.signs
        )


# -- the complex ------------------------------------------------------------


@dataclass
class CellComplex:
    """Faces in a fixed order with their codimension-one incidences."""

    d: int
    faces: list[ComplexFace]
    boundary: dict[int, list[int]]

    def __post_init__(self):
        self.index = {f: i for i, f in enumerate(self.faces)}
        cob: dict[int, list[int]] = defaultdict(list)
        for i, sub in self.boundary.items():
            for j in sub:
                cob[j].append(i)
        self.coboundary = {i: sorted(cob[i]) for i in range(len(self.faces))}

    def faces_of_dim(self, n: int) -> list[int]:
        return [i for i, f in enumerate(self.faces) if f.dim == n]

    def f_vector(self) -> list[int]:
        out = [0] * self.d
        for f in self.faces:
            out[f.dim] += 1
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * c for n, c in enumerate(self.f_vector()))

    def contains(self, i: int, j: int) -> bool:
        """Face ``j`` lies in the closure of face ``i``."""
        return self.faces[i].contains(self.faces[j])

    def closure_vertices(self, i: int) -> list[int]:
        f = self.faces[i]
        return [j for j in self.faces_of_dim(0) if f.contains(self.faces[j])]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "f_vector": self.f_vector(),
            "euler_characteristic": self.euler_characteristic(),
            "faces": [
                {
                    "id": i,
                    "dim": f.dim,
                    "partition": f.partition.to_labels(),
                    "signs": list(f.signs),
                    "boundary": self.boundary[i],
                }
                for i, f in enumerate(self.faces)
            ],
            "incidence": [[i, j] for i in range(len(self.faces)) for j in self.boundary[i]],
        }


def _complex_faces(d: int) -> Iterator[ComplexFace]:
    parts = sorted(enumerate_ordered_partitions(d), key=lambda p: p.dim)
    for p in parts:
        for eps in sign_classes(p):
            yield ComplexFace(p, eps)


def build_complex(d: int) -> CellComplex:
    """All faces of the sign-glued complex, ordered by dimension then partition then signs."""
    if not 1 <= d <= MAX_COMPLEX_D:
        raise ValueError(f"complex construction supports d in 1..{MAX_COMPLEX_D}, got {d}")
    faces = list(_complex_faces(d))
    index = {f: i for i, f in enumerate(faces)}
    boundary = {
        i: sorted(index[f.restrict(q)] for q in refinements_by_one(f.partition))
        for i, f in enumerate(faces)
    }
    return CellComplex(d, faces, boundary)


def enumerated_euler_characteristic(d: int) -> int:
    """Alternating count of faces, ``2^dim`` sign classes per ordered partition."""
    if not 1 <= d <= MAX_FACE_D:
        raise ValueError(f"enumeration supports d in 1..{MAX_FACE_D}, got {d}")
    return sum((-2) ** p.dim for p in enumerate_ordered_partitions(d))


def complex_face_count_formula(d: int, n: int) -> int:
    return 2 ** n * factorial(d - n) * stirling2(d, d - n)


# -- the d = 3 surface --------------------------------------------------------


def _require_surface(cx: CellComplex) -> None:
    if cx.d != MAX_SURFACE_D:
        raise ValueError("surface checks apply to the two-dimensional case d = 3")


def face_cycle(cx: CellComplex, i: int) -> list[int]:
    """Vertices of a 2-face in cyclic order, following its boundary edges."""
    _require_surface(cx)
    if cx.faces[i].dim != 2:
        raise ValueError("expected a 2-face")
    edges = [cx.boundary[e] for e in cx.boundary[i]]
    start = edges[0][0]
    cycle, prev, cur = [start], None, start
    while True:
        nxt = next(
            (b if a == cur else a)
            for a, b in edges
            if cur in (a, b) and (b if a == cur else a) != prev
        )
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    if len(cycle) != len(edges):
        raise ValueError(f"boundary of face {i} is not a single cycle")
    return cycle


def _components(nodes: Iterable[int], adj: dict[int, set[int]]) -> list[set[int]]:
    nodes = set(nodes)
    out = []
    while nodes:
        stack = [nodes.pop()]
        comp = set(stack)
        while stack:
            for m in adj[stack.pop()]:
                if m in nodes:
                    nodes.discard(m)
                    comp.add(m)
                    stack.append(m)
        out.append(comp)
    return out


def _orientable(cx: CellComplex) -> bool:
    two = cx.faces_of_dim(2)
    cycles = {f: face_cycle(cx, f) for f in two}

    def directed(f, flip):
        c = cycles[f][::-1] if flip else cycles[f]
        return {(c[k], c[(k + 1) % len(c)]) for k in range(len(c))}

    orient = {two[0]: False}
    stack = [two[0]]
    while stack:
        f = stack.pop()
        df = directed(f, orient[f])
        for e in cx.boundary[f]:
            for g in cx.coboundary[e]:
                if g == f:
                    continue
                a, b = cx.boundary[e]
                for flip in (False, True):
                    dg = directed(g, flip)
                    uses = ((a, b) in df and (b, a) in dg) or ((b, a) in df and (a, b) in dg)
                    if uses:
                        if g in orient and orient[g] != flip:
                            return False
                        if g not in orient:
                            orient[g] = flip
                            stack.append(g)
                        break
                else:
                    return False
    return True


@dataclass(frozen=True)
class SurfaceReport:
    """Closed-manifold checks for the complex of dimension ``d - 1 <= 2``.

    ``faces_per_ridge`` counts top faces on each codimension-one face (edges
    per vertex when ``d = 2``, hexagons per edge when ``d = 3``).  Vertex
    links are only examined for surfaces.
    """

    dimension: int
    f_vector: tuple[int, ...]
    faces_per_ridge: tuple[int, ...]
    face_sizes: tuple[int, ...]
    link_cycle_lengths: tuple[tuple[int, ...], ...]
    vertex_degrees: tuple[int, ...]
    connected: bool
    euler_characteristic: int
    orientable: bool

    @property
    def faces_per_edge(self) -> tuple[int, ...]:
        if self.dimension != 2:
            raise AttributeError("faces per edge is defined for surfaces only")
        return self.faces_per_ridge

    @property
    def failures(self) -> list[str]:
        out = []
        if any(k != 2 for k in self.faces_per_ridge):
            out.append("some codimension-one face does not lie in exactly two top faces")
        if any(len(c) != 1 or c[0] < 3 for c in self.link_cycle_lengths):
            out.append("some vertex link is not a single cycle")
        if not self.connected:
            out.append("complex is disconnected")
        return out

    @property
    def is_closed_surface(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "f_vector": list(self.f_vector),
            "faces_per_ridge": list(self.faces_per_ridge),
            "face_sizes": list(self.face_sizes),
            "link_cycle_lengths": [list(c) for c in self.link_cycle_lengths],
            "vertex_degrees": list(self.vertex_degrees),
            "connected": self.connected,
            "euler_characteristic": self.euler_characteristic,
            "orientable": self.orientable,
            "closed": self.is_closed_surface,
            "failures": self.failures,
        }


def surface_report(cx: CellComplex | None = None) -> SurfaceReport:
    """Closed-manifold diagnostics for ``d <= 3`` (point, circle, surface)."""
    cx = build_complex(MAX_SURFACE_D) if cx is None else cx
    if cx.d > MAX_SURFACE_D:
        raise ValueError(f"surface checks apply to d <= {MAX_SURFACE_D}")
    n = cx.d - 1
    verts = cx.faces_of_dim(0)
    ridges = cx.faces_of_dim(n - 1) if n >= 1 else []
    faces_per_ridge = tuple(len(cx.coboundary[r]) for r in ridges)
    face_sizes = tuple(len(cx.boundary[f]) for f in cx.faces_of_dim(n)) if n >= 1 else ()
    degrees = tuple(len(cx.coboundary[v]) for v in verts) if n >= 1 else ()
    links = []
    if n == 2:
        for v in verts:
            star_edges = cx.coboundary[v]
            adj: dict[int, set[int]] = {e: set() for e in star_edges}
            for f in cx.faces_of_dim(2):
                at_v = [e for e in cx.boundary[f] if v in cx.boundary[e]]
                if len(at_v) == 2:
                    a, b = at_v
                    adj[a].add(b)
                    adj[b].add(a)
            # a component is a cycle iff every node has degree two in it
            if any(len(adj[e]) != 2 for e in star_edges):
                links.append((-1,))
            else:
                links.append(tuple(sorted(len(c) for c in _components(star_edges, adj))))
    adj_v: dict[int, set[int]] = {v: set() for v in verts}
    for e in cx.faces_of_dim(1):
        a, b = cx.boundary[e]
        adj_v[a].add(b)
        adj_v[b].add(a)
    connected = len(_components(verts, adj_v)) == 1
    return SurfaceReport(
        n,
        tuple(cx.f_vector()),
        faces_per_ridge,
        face_sizes,
        tuple(links),
        degrees,
        connected,
        cx.euler_characteristic(),
        _orientable(cx) if n == 2 else True,
    )


@dataclass(frozen=True)
class PetrieWalk:
    flags: tuple[tuple[int, int, int], ...]

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(e for _, e, _ in self.flags)

    @property
    def length(self) -> int:
        return len(self.flags)


def petrie_polygon(cx: CellComplex | None = None, start: tuple[int, int, int] | None = None) -> PetrieWalk:
    """Iterate ``r2 r1 r0`` on flags ``(vertex, edge, face)`` until the start flag recurs.

    ``r0`` moves to the other vertex of the edge, ``r1`` to the other edge of
    the face at that vertex, ``r2`` to the other face across that edge.
    """
    cx = build_complex(MAX_SURFACE_D) if cx is None else cx
    _require_surface(cx)
    report = surface_report(cx)
    if not report.is_closed_surface:
        raise ValueError("Petrie walk needs a closed surface: " + "; ".join(report.failures))
    if start is None:
        e = cx.faces_of_dim(1)[0]
        start = (cx.boundary[e][0], e, cx.coboundary[e][0])

    def other(seq, x):
        (y,) = [z for z in seq if z != x]
        return y

    flags = []
    flag = start
    while True:
        flags.append(flag)
        v, e, f = flag
        v = other(cx.boundary[e], v)
        e = other([g for g in cx.boundary[f] if v in cx.boundary[g]], e)
        f = other(cx.coboundary[e], f)
        flag = (v, e, f)
        if flag == start:
            break
        if len(flags) > 4 * len(cx.faces) ** 2:
            raise RuntimeError("flag walk did not close")
    return PetrieWalk(tuple(flags))


def is_petrie_path(cx: CellComplex, walk: PetrieWalk) -> bool:
    """Cyclically, each two consecutive edges share exactly one face and no three share one."""
    es = walk.edges
    n = len(es)
    for k in range(n):
        a, b, c = (set(cx.coboundary[es[(k + j) % n]]) for j in range(3))
        if len(a & b) != 1 or a & b & c:
            return False
    return True


def to_off(cx: CellComplex | None = None) -> str:
    """OFF text: permutation coordinates for vertices, hexagons in cyclic order."""
    cx = build_complex(MAX_SURFACE_D) if cx is None else cx
    _require_surface(cx)
    verts = cx.faces_of_dim(0)
    pos = {v: k for k, v in enumerate(verts)}
    two = cx.faces_of_dim(2)
    lines = ["OFF", f"{len(verts)} {len(two)} {len(cx.faces_of_dim(1))}"]
    for v in verts:
        lines.append(" ".join(str(c) for c in vertex_coordinates(cx.faces[v].partition)))
    for f in two:
        cyc = face_cycle(cx, f)
        lines.append(" ".join([str(len(cyc))] + [str(pos[v]) for v in cyc]))
    return "\n".join(lines) + "\n"


# -- matrix realisation ---------------------------------------------------------


def realize(face: ComplexFace, spectrum, seq=None, rng=None):
    """A block-diagonal tridiagonal matrix lying on ``face``.

    Uses ``seq`` (a distribution sequence with ``face.partition``) if given,
    otherwise random weights.  Returns ``s_eps(J)`` for the face's signs.
    """
    from .spectral import Distribution, DistributionSequence, direct_sum_reconstruct, sign_conjugate

    if seq is None:
        rng = np.random.default_rng(0) if rng is None else rng
        seq = DistributionSequence(
            tuple(
                Distribution(spectrum, tuple(sorted(b)), rng.uniform(0.2, 1.0, len(b)))
                for b in face.partition.blocks
            )
        )
    elif seq.partition != face.partition:
        raise ValueError("sequence does not lie over this face's partition")
    return sign_conjugate(direct_sum_reconstruct(seq), face.signs)


def export_json(cx: CellComplex) -> str:
    return json.dumps(cx.to_json(), sort_keys=True)
