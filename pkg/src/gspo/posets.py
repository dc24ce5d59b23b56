"""Partial orders on vertex sets 0..n-1.

A poset is stored as its transitive closure: per-vertex up-set bitmasks,
up[i] = {j : i <= j} (reflexive). Posets are immutable and hashable, so they
serve directly as memo keys during search.
"""
from __future__ import annotations

import json
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .graphs import MixedGraph
from .util import iter_bits, mask_of, set_of

_ENUMERATION_CAP = 6


class Poset:
    """A reflexive, transitive, antisymmetric relation on 0..n-1.

    Examples
    --------
    >>> p = Poset.from_relations(3, [(0, 1), (1, 2)])
    >>> p.leq(0, 2)
    True
    >>> sorted(p.relations)
    [(0, 1), (0, 2), (1, 2)]
    """

    __slots__ = ("n", "_up", "_down", "_hash")

    def __init__(self, n: int, up_masks: Sequence[int]):
        # trusted constructor: up_masks must already be a valid closure
        self.n = n
        self._up = tuple(up_masks)
        self._down: tuple[int, ...] | None = None
        self._hash: int | None = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Poset":
        """The antichain: only reflexive pairs."""
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def total(cls, order: Sequence[int]) -> "Poset":
        """Total order with order[0] smallest."""
        n = len(order)
        if sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of 0..n-1")
        up = [0] * n
        suffix = 0
        for v in reversed(order):
            suffix |= 1 << v
            up[v] = suffix
        return cls(n, up)

    @classmethod
    def from_relations(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Poset":
        """Build from (i, j) meaning i <= j; closes transitively, rejects
        antisymmetry violations."""
        up = [1 << i for i in range(n)]
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"relation ({i}, {j}) out of range")
            up[i] |= 1 << j
        _close(up)
        for i in range(n):
            for j in iter_bits(up[i] & ~(1 << i)):
                if up[j] >> i & 1:
                    raise ValueError(f"antisymmetry violated by {i} and {j}")
        return cls(n, up)

    # -- identity ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poset)
            and self.n == other.n
            and self._up == other._up
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._up))
        return self._hash

    def __repr__(self) -> str:
        rels = ", ".join(f"{i}<={j}" for i, j in self.relations)
        return f"Poset({self.n}: {rels})"

    # -- queries --------------------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        return bool(self._up[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return self.leq(i, j) or self.leq(j, i)

    @property
    def relations(self) -> list[tuple[int, int]]:
        """Non-reflexive closure pairs, sorted."""
        return [
            (i, j)
            for i in range(self.n)
            for j in iter_bits(self._up[i] & ~(1 << i))
        ]

    def up_mask(self, i: int) -> int:
        return self._up[i]

    def down_masks(self) -> tuple[int, ...]:
        if self._down is None:
            down = [0] * self.n
            for i in range(self.n):
                for j in iter_bits(self._up[i]):
                    down[j] |= 1 << i
            self._down = tuple(down)
        return self._down

    def down_mask(self, targets_mask: int) -> int:
        """{x : x <= t for some target t}, as a mask."""
        out = 0
        for t in iter_bits(targets_mask):
            out |= self.down_masks()[t]
        return out

    def strict_down_mask(self, targets_mask: int) -> int:
        return self.down_mask(targets_mask) & ~targets_mask

    def down_set(self, targets: Iterable[int]) -> frozenset[int]:
        """Union of down-sets of the targets (targets included)."""
        return set_of(self.down_mask(mask_of(targets)))

    def strict_down_set(self, targets: Iterable[int]) -> frozenset[int]:
        """Union of down-sets with the targets themselves removed."""
        return set_of(self.strict_down_mask(mask_of(targets)))

    # -- Hasse moves -----------------------------------------------------------

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j): i < j with nothing strictly between."""
        out = []
        down = self.down_masks()
        for i in range(self.n):
            for j in iter_bits(self._up[i] & ~(1 << i)):
                between = self._up[i] & down[j] & ~(1 << i) & ~(1 << j)
                if not between:
                    out.append((i, j))
        return sorted(out)

    def hasse_neighbors(self) -> list["Poset"]:
        """Posets whose closure differs from this one in exactly one ordered
        pair: cover removals first, then single-pair additions, each in
        lexicographic (i, j) order."""
        out = []
        for i, j in self.covers():
            up = list(self._up)
            up[i] &= ~(1 << j)
            out.append(Poset(self.n, up))
        down = self.down_masks()
        for i in range(self.n):
            for j in range(self.n):
                if i == j or self.comparable(i, j):
                    continue
                ok = True
                for a in iter_bits(down[i]):
                    need = self._up[j] & ~(1 << j) if a == i else self._up[j]
                    if need & ~self._up[a]:
                        ok = False
                        break
                if ok:
                    up = list(self._up)
                    up[i] |= 1 << j
                    out.append(Poset(self.n, up))
        return out

    def restrict(self, vertices: Sequence[int]) -> "Poset":
        """Induced subposet, relabeled 0..len-1 in the given order."""
        index = {v: k for k, v in enumerate(vertices)}
        keep = mask_of(vertices)
        up = [0] * len(vertices)
        for v in vertices:
            m = 0
            for j in iter_bits(self._up[v] & keep):
                m |= 1 << index[j]
            up[index[v]] = m
        return Poset(len(vertices), up)


def _close(up: list[int]) -> None:
    """In-place transitive closure of up-set masks (Warshall)."""
    n = len(up)
    for k in range(n):
        for i in range(n):
            if up[i] >> k & 1:
                up[i] |= up[k]


def ancestor_poset(g: MixedGraph) -> Poset:
    """The partial order i <= j iff i is an ancestor of j in g.

    Requires an ancestral graph.
    """
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    desc = g.descendant_masks()
    return Poset(g.n, desc)


def enumerate_posets(n: int) -> Iterator[Poset]:
    """All labeled posets on n vertices, in lexicographic order of the
    flattened closure matrix. Supported for n <= 6.

    Counts for n = 0..5: 1, 1, 3, 19, 219, 4231.
    """
    if n > _ENUMERATION_CAP:
        raise ValueError(f"poset enumeration supported for n <= {_ENUMERATION_CAP}")
    if n == 0:
        yield Poset(0, [])
        return
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen: set[tuple[int, ...]] = set()
    for bits in range(1 << len(pairs)):
        up = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                up[i] |= 1 << j
        # keep transitively closed upper-triangular relations only
        if any(up[j] & ~up[i] for i in range(n) for j in iter_bits(up[i])):
            continue
        for perm in permutations(range(n)):
            relabeled = [0] * n
            for i in range(n):
                m = 0
                for j in iter_bits(up[i]):
                    m |= 1 << perm[j]
                relabeled[perm[i]] = m
            seen.add(tuple(relabeled))
    for up_t in sorted(seen):
        yield Poset(n, list(up_t))


# -- JSON interchange -----------------------------------------------------------


def poset_to_json(p: Poset) -> dict:
    return {"n": p.n, "relations": [list(r) for r in p.relations]}


def poset_from_json(doc: dict) -> Poset:
    n = doc.get("n")
    if not isinstance(n, int) or n < 0:
        raise ValueError("field 'n' must be a non-negative integer")
    return Poset.from_relations(n, [tuple(r) for r in doc.get("relations", [])])


def save_poset(p: Poset, path) -> None:
    with open(path, "w") as fh:
        json.dump(poset_to_json(p), fh, indent=2)
        fh.write("\n")


def load_poset(path) -> Poset:
    with open(path) as fh:
        return poset_from_json(json.load(fh))
