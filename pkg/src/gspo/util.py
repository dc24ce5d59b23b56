"""Small shared helpers: vertex bitmasks and the vertex-count cap."""
from __future__ import annotations

import os
from typing import Iterable, Iterator

DEFAULT_MAX_VERTICES = 64


def max_vertices() -> int:
    """Vertex cap for graph construction. Override with env GSPO_MAX_VERTICES."""
    raw = os.environ.get("GSPO_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def set_of(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
