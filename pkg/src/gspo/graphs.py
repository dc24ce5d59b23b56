"""Mixed graphs with directed and bidirected edges.

Vertices are dense integer indices 0..n-1; external string labels are mapped
at file load. Adjacency is stored as per-vertex bitmasks, so vertex sets move
through the package as plain ints. Graphs are immutable; edits go through the
``with_*`` copy constructors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .util import iter_bits, max_vertices, set_of

TAIL = "tail"
HEAD = "head"


class MixedGraph:
    """An immutable graph whose edges are directed (i->j) or bidirected (i<->j).

    Parameters
    ----------
    num_vertices:
        Number of vertices; indices run 0..num_vertices-1.
    directed:
        Iterable of (i, j) pairs meaning i->j.
    bidirected:
        Iterable of unordered {i, j} pairs given as (i, j).

    Each vertex pair carries at most one edge. Self loops and duplicate pairs
    are rejected.

    Examples
    --------
    >>> g = MixedGraph(4, directed=[(0, 1), (0, 2), (1, 2), (3, 1)])
    >>> sorted(g.parents(2))
    [0, 1]
    >>> g.num_edges
    4
    """

    __slots__ = ("n", "_pa", "_ch", "_sib", "_anc", "_desc", "_hash")

    def __init__(
        self,
        num_vertices: int,
        directed: Iterable[tuple[int, int]] = (),
        bidirected: Iterable[tuple[int, int]] = (),
    ):
        n = num_vertices
        cap = max_vertices()
        if n < 0 or n > cap:
            raise ValueError(f"num_vertices must be in 0..{cap}, got {n}")
        pa = [0] * n
        ch = [0] * n
        sib = [0] * n

        def check(i: int, j: int) -> None:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"vertex out of range in edge ({i}, {j})")
            if i == j:
                raise ValueError(f"self loop at {i}")
            if (pa[j] | ch[j] | sib[j]) >> i & 1:
                raise ValueError(f"multiple edges between {i} and {j}")

        for i, j in directed:
            check(i, j)
            pa[j] |= 1 << i
            ch[i] |= 1 << j
        for i, j in bidirected:
            check(i, j)
            sib[i] |= 1 << j
            sib[j] |= 1 << i
        self.n = n
        self._pa = tuple(pa)
        self._ch = tuple(ch)
        self._sib = tuple(sib)
        self._anc: tuple[int, ...] | None = None
        self._desc: tuple[int, ...] | None = None
        self._hash: int | None = None

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MixedGraph)
            and self.n == other.n
            and self._pa == other._pa
            and self._sib == other._sib
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._pa, self._sib))
        return self._hash

    def __repr__(self) -> str:
        d = ", ".join(f"{i}->{j}" for i, j in self.directed_edges())
        b = ", ".join(f"{i}<->{j}" for i, j in self.bidirected_edges())
        inner = "; ".join(p for p in (d, b) if p)
        return f"MixedGraph({self.n}: {inner})"

    # -- edges ------------------------------------------------------------

    def directed_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(self.n) for i in iter_bits(self._pa[j])]

    def bidirected_edges(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.n)
            for j in iter_bits(self._sib[i])
            if i < j
        ]

    @property
    def num_edges(self) -> int:
        d = sum(m.bit_count() for m in self._pa)
        b = sum(m.bit_count() for m in self._sib) // 2
        return d + b

    def has_directed(self, i: int, j: int) -> bool:
        return bool(self._pa[j] >> i & 1)

    def has_bidirected(self, i: int, j: int) -> bool:
        return bool(self._sib[i] >> j & 1)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency_mask(i) >> j & 1)

    def adjacency_mask(self, i: int) -> int:
        return self._pa[i] | self._ch[i] | self._sib[i]

    # -- vertex relations --------------------------------------------------

    def parents(self, i: int) -> frozenset[int]:
        """Vertices k with k->i."""
        return set_of(self._pa[i])

    def children(self, i: int) -> frozenset[int]:
        return set_of(self._ch[i])

    def spouses(self, i: int) -> frozenset[int]:
        """Vertices k with k<->i."""
        return set_of(self._sib[i])

    def parent_mask(self, i: int) -> int:
        return self._pa[i]

    def child_mask(self, i: int) -> int:
        return self._ch[i]

    def spouse_mask(self, i: int) -> int:
        return self._sib[i]

    def ancestor_masks(self) -> tuple[int, ...]:
        """Per-vertex reflexive ancestor sets as bitmasks.

        ancestors(i) = {k : directed path k -> ... -> i} | {i}. Computed once
        per graph by fixpoint propagation over parent masks.
        """
        if self._anc is None:
            anc = [(1 << i) | self._pa[i] for i in range(self.n)]
            changed = True
            while changed:
                changed = False
                for i in range(self.n):
                    acc = anc[i]
                    for p in iter_bits(self._pa[i]):
                        acc |= anc[p]
                    if acc != anc[i]:
                        anc[i] = acc
                        changed = True
            self._anc = tuple(anc)
        return self._anc

    def descendant_masks(self) -> tuple[int, ...]:
        if self._desc is None:
            anc = self.ancestor_masks()
            desc = [0] * self.n
            for j in range(self.n):
                for i in iter_bits(anc[j]):
                    desc[i] |= 1 << j
            self._desc = tuple(desc)
        return self._desc

    def ancestors(self, i: int) -> frozenset[int]:
        """Reflexive ancestors of i."""
        return set_of(self.ancestor_masks()[i])

    def ancestor_mask_of_set(self, vertices_mask: int) -> int:
        anc = self.ancestor_masks()
        out = 0
        for v in iter_bits(vertices_mask):
            out |= anc[v]
        return out

    def ancestors_of_set(self, vertices: Iterable[int]) -> frozenset[int]:
        """Union of reflexive ancestor sets."""
        m = 0
        for v in vertices:
            m |= 1 << v
        return set_of(self.ancestor_mask_of_set(m))

    def strict_ancestors_of_set(self, vertices: Iterable[int]) -> frozenset[int]:
        """ancestors_of_set(S) minus S itself."""
        m = 0
        for v in vertices:
            m |= 1 << v
        return set_of(self.ancestor_mask_of_set(m) & ~m)

    # -- structural predicates ----------------------------------------------

    def is_ancestral(self) -> bool:
        """True iff the directed part is acyclic and no bidirected edge joins
        ancestrally related vertices."""
        anc = self.ancestor_masks()
        for i in range(self.n):
            for j in iter_bits(anc[i] & ~(1 << i)):
                if anc[j] >> i & 1:
                    return False  # directed cycle through i and j
        for i in range(self.n):
            for j in iter_bits(self._sib[i]):
                if anc[j] >> i & 1 or anc[i] >> j & 1:
                    return False
        return True

    def skeleton(self) -> frozenset[tuple[int, int]]:
        """Unordered adjacencies as (i, j) pairs with i < j."""
        out = set()
        for i in range(self.n):
            for j in iter_bits(self.adjacency_mask(i)):
                if i < j:
                    out.add((i, j))
        return frozenset(out)

    def v_structures(self) -> frozenset[tuple[int, int, int]]:
        """Triples (i, k, j), i < j, with arrowheads at k from both i and j
        (i*->k<-*j) and i, j non-adjacent."""
        out = set()
        for k in range(self.n):
            into_k = self._pa[k] | self._sib[k]
            ends = list(iter_bits(into_k))
            for a in range(len(ends)):
                for b in range(a + 1, len(ends)):
                    i, j = ends[a], ends[b]
                    if not self.adjacent(i, j):
                        out.add((i, k, j))
        return frozenset(out)

    # -- copy-and-edit constructors ----------------------------------------

    def with_edge_removed(self, i: int, j: int) -> "MixedGraph":
        """Drop the single edge joining i and j, whatever its marks."""
        if self.has_directed(j, i):
            i, j = j, i
        if self.has_directed(i, j):
            return MixedGraph(
                self.n,
                [e for e in self.directed_edges() if e != (i, j)],
                self.bidirected_edges(),
            )
        if self.has_bidirected(i, j):
            a, b = min(i, j), max(i, j)
            return MixedGraph(
                self.n,
                self.directed_edges(),
                [e for e in self.bidirected_edges() if e != (a, b)],
            )
        raise ValueError(f"no edge between {i} and {j}")

    def with_bidirected_added(self, i: int, j: int) -> "MixedGraph":
        return MixedGraph(
            self.n,
            self.directed_edges(),
            self.bidirected_edges() + [(min(i, j), max(i, j))],
        )

    def induced_subgraph(self, vertices: Sequence[int]) -> "MixedGraph":
        """Subgraph on the given vertices, relabeled 0..len-1 in given order."""
        index = {v: k for k, v in enumerate(vertices)}
        keep = set(vertices)
        d = [
            (index[i], index[j])
            for i, j in self.directed_edges()
            if i in keep and j in keep
        ]
        b = [
            (index[i], index[j])
            for i, j in self.bidirected_edges()
            if i in keep and j in keep
        ]
        return MixedGraph(len(vertices), d, b)


# -- paths -----------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """A simple path: its vertex sequence plus per-step end marks.

    marks[t] is a (mark at vertices[t], mark at vertices[t+1]) pair, each
    TAIL or HEAD, describing the t-th edge as traversed.
    """

    vertices: tuple[int, ...]
    marks: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.vertices) - 1


def edge_marks(g: MixedGraph, i: int, j: int) -> tuple[str, str]:
    """Marks (at i, at j) of the edge joining i and j."""
    if g.has_directed(i, j):
        return (TAIL, HEAD)
    if g.has_directed(j, i):
        return (HEAD, TAIL)
    if g.has_bidirected(i, j):
        return (HEAD, HEAD)
    raise ValueError(f"no edge between {i} and {j}")


def path_between(g: MixedGraph, vertices: Sequence[int]) -> Path:
    vs = tuple(vertices)
    marks = tuple(edge_marks(g, vs[t], vs[t + 1]) for t in range(len(vs) - 1))
    return Path(vs, marks)


# -- discriminating paths ----------------------------------------------------
#
# A path <i, c_1, ..., c_l, k, j> with l >= 1 is discriminating for k when i
# and j are non-adjacent and every c_m is both a collider on the path and a
# parent of j. Collider status forces c_m <-> c_{m+1} internally, an arrowhead
# at c_1 from i, and an arrowhead at c_l from k.


def _default_max_length(n: int) -> int | None:
    return None if n <= 16 else 8


def has_discriminating_path(
    g: MixedGraph, second_last: int, last: int, max_length: int | None = None
) -> bool:
    """True iff some path discriminating for ``second_last`` ends
    <..., second_last, last>."""
    if max_length is None:
        max_length = _default_max_length(g.n)
    v, j = second_last, last
    pa_j = g.parent_mask(j)
    adj_j = g.adjacency_mask(j)
    start = pa_j & (g.child_mask(v) | g.spouse_mask(v)) & ~(1 << j)
    blocked0 = (1 << v) | (1 << j)

    def search(c: int, used: int, chain_len: int) -> bool:
        # a valid first vertex attaches to c with an arrowhead at c
        k_mask = (g.parent_mask(c) | g.spouse_mask(c)) & ~used & ~adj_j & ~(1 << j)
        if k_mask:
            return True
        if max_length is not None and chain_len + 2 >= max_length:
            return False
        for c2 in iter_bits(g.spouse_mask(c) & pa_j & ~used):
            if search(c2, used | (1 << c2), chain_len + 1):
                return True
        return False

    for c in iter_bits(start):
        if search(c, blocked0 | (1 << c), 1):
            return True
    return False


@lru_cache(maxsize=4096)
def discriminating_paths(
    g: MixedGraph, max_length: int | None = None
) -> tuple[tuple[Path, int, int], ...]:
    """All discriminating paths of g as (path, k, j) triples.

    k is the discriminated vertex (second to last on the path), j the final
    vertex. Deduplicated by vertex sequence; deterministic order.
    """
    if max_length is None:
        max_length = _default_max_length(g.n)
    found: dict[tuple[int, ...], tuple[Path, int, int]] = {}
    for j in range(g.n):
        pa_j = g.parent_mask(j)
        adj_j = g.adjacency_mask(j)
        for k in iter_bits(adj_j):
            start = pa_j & (g.child_mask(k) | g.spouse_mask(k)) & ~(1 << j)

            def collect(c: int, chain: tuple[int, ...], used: int) -> None:
                i_mask = (
                    (g.parent_mask(c) | g.spouse_mask(c))
                    & ~used
                    & ~adj_j
                    & ~(1 << j)
                )
                for i in iter_bits(i_mask):
                    vs = (i,) + tuple(reversed(chain)) + (k, j)
                    if vs not in found:
                        found[vs] = (path_between(g, vs), k, j)
                if max_length is not None and len(chain) + 2 >= max_length:
                    return
                for c2 in iter_bits(g.spouse_mask(c) & pa_j & ~used):
                    collect(c2, chain + (c2,), used | (1 << c2))

            for c in iter_bits(start):
                collect(c, (c,), (1 << k) | (1 << j) | (1 << c))
    return tuple(found[vs] for vs in sorted(found))


# -- JSON interchange ---------------------------------------------------------


def graph_to_json(g: MixedGraph, labels: Sequence[str] | None = None) -> dict:
    if labels is None:
        labels = [str(i) for i in range(g.n)]
    if len(labels) != g.n or len(set(labels)) != g.n:
        raise ValueError("labels must be unique and match the vertex count")
    return {
        "nodes": list(labels),
        "directed": [[labels[i], labels[j]] for i, j in g.directed_edges()],
        "bidirected": [[labels[i], labels[j]] for i, j in g.bidirected_edges()],
    }


def graph_from_json(doc: dict) -> tuple[MixedGraph, list[str]]:
    """Parse {"nodes": [...], "directed": [[a,b],...], "bidirected": [...]}.

    Returns the graph plus the label list, in node order. Unknown labels,
    self loops, and duplicate pairs are rejected.
    """
    nodes = doc.get("nodes")
    if not isinstance(nodes, list) or any(not isinstance(x, str) for x in nodes):
        raise ValueError("nodes must be a list of strings")
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate node labels")
    index = {lab: i for i, lab in enumerate(nodes)}

    def pairs(key: str) -> list[tuple[int, int]]:
        out = []
        for entry in doc.get(key, []):
            if len(entry) != 2:
                raise ValueError(f"malformed {key} entry {entry!r}")
            a, b = entry
            if a not in index or b not in index:
                raise ValueError(f"unknown label in {key} entry {entry!r}")
            out.append((index[a], index[b]))
        return out

    g = MixedGraph(len(nodes), pairs("directed"), pairs("bidirected"))
    return g, list(nodes)


def save_graph(g: MixedGraph, path, labels: Sequence[str] | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(g, labels), fh, indent=2)
        fh.write("\n")


def load_graph(path) -> tuple[MixedGraph, list[str]]:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
