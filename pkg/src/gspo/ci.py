"""Conditional-independence oracles and the Gaussian CI test.

Oracles answer independence queries over variables 0..n-1. Conditioning sets
travel as vertex bitmasks on the fast path (``independent_mask``); the
friendly entry point ``independent`` accepts any iterable of indices.

The sample-based test is the standard Fisher-z partial-correlation test,
adopted here as the conventional choice for linear-Gaussian data.
"""
from __future__ import annotations

import math
import statistics
from abc import ABC, abstractmethod
from typing import Iterable

import numpy as np

from .graphs import MixedGraph
from .separation import m_connected_mask
from .util import iter_bits, mask_of, set_of

_PIVOT_TOLERANCE = 1e-12
_CORRELATION_CLAMP = 1.0 - 1e-10


class DegenerateInputError(ValueError):
    """Raised when a covariance submatrix is numerically singular."""

    def __init__(self, variables: frozenset[int]):
        self.variables = variables
        super().__init__(
            f"degenerate covariance over variables {sorted(variables)}"
        )


class CIOracle(ABC):
    """Base class for conditional-independence oracles.

    Subclasses implement ``_decide``; the base class validates queries and
    counts them in ``queries``.
    """

    def __init__(self, num_variables: int):
        self.num_variables = num_variables
        self.queries = 0

    def independent(self, i: int, j: int, cond: Iterable[int] = ()) -> bool:
        return self.independent_mask(i, j, mask_of(cond))

    def independent_mask(self, i: int, j: int, cond_mask: int) -> bool:
        n = self.num_variables
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"bad query pair ({i}, {j})")
        if cond_mask >> n or cond_mask >> i & 1 or cond_mask >> j & 1:
            raise ValueError("conditioning set must exclude endpoints and fit n")
        self.queries += 1
        return self._decide(i, j, cond_mask)

    @abstractmethod
    def _decide(self, i: int, j: int, cond_mask: int) -> bool: ...


class GraphOracle(CIOracle):
    """Answers queries by m-separation in a fixed ground-truth graph."""

    def __init__(self, graph: MixedGraph):
        super().__init__(graph.n)
        self.graph = graph

    def _decide(self, i: int, j: int, cond_mask: int) -> bool:
        return not m_connected_mask(self.graph, i, j, cond_mask)


def normal_quantile(q: float) -> float:
    """Inverse standard-normal CDF."""
    return statistics.NormalDist().inv_cdf(q)


def _submatrix_inverse(cov: np.ndarray, idx: list[int]) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting; raises DegenerateInputError
    when a pivot falls below 1e-12."""
    k = len(idx)
    m = cov[np.ix_(idx, idx)].astype(float)
    inv = np.eye(k)
    for col in range(k):
        piv = col + int(np.argmax(np.abs(m[col:, col])))
        if abs(m[piv, col]) < _PIVOT_TOLERANCE:
            raise DegenerateInputError(frozenset(idx))
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            inv[[col, piv]] = inv[[piv, col]]
        scale = m[col, col]
        m[col] /= scale
        inv[col] /= scale
        for row in range(k):
            if row != col and m[row, col] != 0.0:
                factor = m[row, col]
                m[row] -= factor * m[col]
                inv[row] -= factor * inv[col]
    return inv


def partial_correlation(
    cov: np.ndarray, i: int, j: int, cond: Iterable[int] = ()
) -> float:
    """Partial correlation of variables i and j given the conditioning set,
    from the inverse of the covariance submatrix over {i, j} | cond."""
    cond_list = sorted(set(cond))
    if i == j or i in cond_list or j in cond_list:
        raise ValueError("query endpoints must be distinct and unconditioned")
    idx = [i, j, *cond_list]
    omega = _submatrix_inverse(np.asarray(cov), idx)
    rho = -omega[0, 1] / math.sqrt(omega[0, 0] * omega[1, 1])
    return min(1.0, max(-1.0, float(rho)))


class GaussianCITester(CIOracle):
    """Fisher-z partial-correlation test at level alpha.

    The statistic is sqrt(n - |S| - 3) * |atanh(r)| with r clamped away from
    +-1; independence is declared when it does not exceed the two-sided
    normal quantile. Each query needs n - |S| - 3 >= 1.
    """

    def __init__(self, cov: np.ndarray, num_samples: int, alpha: float):
        cov = np.asarray(cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("cov must be square")
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        super().__init__(cov.shape[0])
        self.cov = cov
        self.num_samples = num_samples
        self.alpha = alpha
        self._threshold = normal_quantile(1.0 - alpha / 2.0)

    @classmethod
    def from_data(cls, data: np.ndarray, alpha: float) -> "GaussianCITester":
        """Build from an (n_samples, n_variables) matrix; the covariance uses
        the 1/n convention."""
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be two-dimensional")
        centered = data - data.mean(axis=0)
        cov = centered.T @ centered / data.shape[0]
        return cls(cov, data.shape[0], alpha)

    def _decide(self, i: int, j: int, cond_mask: int) -> bool:
        size = cond_mask.bit_count()
        dof = self.num_samples - size - 3
        if dof < 1:
            raise ValueError(
                f"need num_samples - |S| - 3 >= 1, got {dof} for |S| = {size}"
            )
        r = partial_correlation(self.cov, i, j, iter_bits(cond_mask))
        r = min(_CORRELATION_CLAMP, max(-_CORRELATION_CLAMP, r))
        stat = math.sqrt(dof) * abs(math.atanh(r))
        return stat <= self._threshold


class PartialCorrelationOracle(CIOracle):
    """Population-level oracle: independent iff the exact partial correlation
    vanishes (within tolerance)."""

    def __init__(self, cov: np.ndarray, tolerance: float = 1e-8):
        cov = np.asarray(cov, dtype=float)
        super().__init__(cov.shape[0])
        self.cov = cov
        self.tolerance = tolerance

    def _decide(self, i: int, j: int, cond_mask: int) -> bool:
        rho = partial_correlation(self.cov, i, j, iter_bits(cond_mask))
        return abs(rho) <= self.tolerance


class CachingOracle(CIOracle):
    """Memoizes an inner oracle on the canonical key (min, max, S-bitset).

    ``queries`` counts calls at this layer; ``misses`` counts inner queries.
    """

    def __init__(self, inner: CIOracle):
        super().__init__(inner.num_variables)
        self.inner = inner
        self._cache: dict[tuple[int, int, int], bool] = {}

    @property
    def misses(self) -> int:
        return len(self._cache)

    def _decide(self, i: int, j: int, cond_mask: int) -> bool:
        key = (i, j, cond_mask) if i < j else (j, i, cond_mask)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.inner.independent_mask(i, j, cond_mask)
            self._cache[key] = hit
        return hit

    def recorded(self) -> dict[tuple[int, int, int], bool]:
        """Copy of the memoized answers keyed by (i, j, S-bitset), i < j."""
        return dict(self._cache)


class ReplayOracle(CIOracle):
    """Answers from a fixed table of recorded queries; unknown queries raise."""

    def __init__(self, num_variables: int, table: dict[tuple[int, int, int], bool]):
        super().__init__(num_variables)
        self._table = dict(table)

    def _decide(self, i: int, j: int, cond_mask: int) -> bool:
        key = (i, j, cond_mask) if i < j else (j, i, cond_mask)
        try:
            return self._table[key]
        except KeyError:
            raise ValueError(
                f"no recorded answer for ({i}, {j} | {sorted(set_of(cond_mask))})"
            ) from None


def dump_relations(oracle: CachingOracle, path) -> None:
    """Write recorded answers as lines 'i j | s1 s2 ... : 0/1'."""
    lines = []
    for (i, j, smask), verdict in sorted(oracle.recorded().items()):
        inside = " ".join(str(v) for v in iter_bits(smask))
        middle = f"| {inside} " if inside else "| "
        lines.append(f"{i} {j} {middle}: {int(verdict)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def load_relations(path, num_variables: int) -> ReplayOracle:
    table: dict[tuple[int, int, int], bool] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            left, verdict = line.rsplit(":", 1)
            pair_part, cond_part = left.split("|", 1)
            i, j = (int(tok) for tok in pair_part.split())
            smask = mask_of(int(tok) for tok in cond_part.split())
            key = (i, j, smask) if i < j else (j, i, smask)
            table[key] = bool(int(verdict))
    return ReplayOracle(num_variables, table)
